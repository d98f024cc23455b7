#include "soilspec/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "soilspec/csv.hpp"
#include "soilspec/error.hpp"
#include "soilspec/rng.hpp"

namespace soilspec {

BandAxis::BandAxis() {
  wavelengths_.reserve(kBandCount);
  for (std::size_t k = kTrimPerEnd; k < kRawBandCount - kTrimPerEnd; ++k)
    wavelengths_.push_back(kRawStartNm + kBandSpacingNm * static_cast<double>(k));
}

int BandAxis::index_of(double wavelength_nm) const {
  double rel = (wavelength_nm - wavelengths_.front()) / kBandSpacingNm;
  double rounded = std::round(rel);
  if (rel != rounded) return -1;
  auto idx = static_cast<long>(rounded);
  if (idx < 0 || idx >= static_cast<long>(kBandCount)) return -1;
  return static_cast<int>(idx);
}

std::vector<double> trim_bands(const std::vector<double>& raw) {
  require(raw.size() == kRawBandCount,
          "trim_bands: expected " + std::to_string(kRawBandCount) + " values, got " +
              std::to_string(raw.size()));
  return std::vector<double>(raw.begin() + kTrimPerEnd, raw.end() - kTrimPerEnd);
}

namespace {

struct ColumnMap {
  // band wavelength (nm) -> csv column, ascending by wavelength
  std::vector<std::pair<long, int>> bands;
  int lwir = -1;
  int moisture = -1;
  int plot = -1;
  int record = -1;
};

ColumnMap map_columns(const CsvTable& table, const std::string& path) {
  ColumnMap map;
  for (std::size_t i = 0; i < table.header.size(); ++i) {
    const std::string& name = table.header[i];
    if (name.rfind("band_", 0) == 0) {
      const std::string tail = name.substr(5);
      char* end = nullptr;
      long wl = std::strtol(tail.c_str(), &end, 10);
      require(end && *end == '\0' && !tail.empty(),
              path + ": malformed band column name '" + name + "'");
      map.bands.emplace_back(wl, static_cast<int>(i));
    } else if (name == "lwir_c") {
      map.lwir = static_cast<int>(i);
    } else if (name == "soil_moisture_pct") {
      map.moisture = static_cast<int>(i);
    } else if (name == "plot_id") {
      map.plot = static_cast<int>(i);
    } else if (name == "record_id") {
      map.record = static_cast<int>(i);
    } else {
      throw Error(path + ": unknown column '" + name + "'");
    }
  }
  require(map.lwir >= 0, path + ": missing column 'lwir_c'");
  require(map.moisture >= 0, path + ": missing column 'soil_moisture_pct'");
  std::sort(map.bands.begin(), map.bands.end());

  const std::size_t nb = map.bands.size();
  require(nb == kRawBandCount || nb == kBandCount,
          path + ": expected " + std::to_string(kRawBandCount) + " or " +
              std::to_string(kBandCount) + " band columns, found " + std::to_string(nb));
  const std::size_t offset = nb == kRawBandCount ? 0 : kTrimPerEnd;
  for (std::size_t k = 0; k < nb; ++k) {
    long expect = static_cast<long>(kRawStartNm + kBandSpacingNm * (k + offset));
    if (map.bands[k].first != expect) {
      std::ostringstream msg;
      msg << path << ": band columns do not form the " << (nb == kRawBandCount ? "450-946" : "470-926")
          << " nm grid (expected band_" << expect << ", found band_" << map.bands[k].first << ")";
      throw Error(msg.str());
    }
  }
  return map;
}

}  // namespace

Dataset load_csv(const std::string& path) {
  CsvTable table = read_csv(path);
  ColumnMap map = map_columns(table, path);
  const bool needs_trim = map.bands.size() == kRawBandCount;

  Dataset ds;
  ds.samples.reserve(table.rows.size());
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    const auto& row = table.rows[r];
    SpectralSample s;
    std::vector<double> raw;
    raw.reserve(map.bands.size());
    for (const auto& [wl, col] : map.bands)
      raw.push_back(parse_double_cell(row[col], r, table.header[col]));
    s.reflectance = needs_trim ? trim_bands(raw) : std::move(raw);
    for (std::size_t b = 0; b < s.reflectance.size(); ++b) {
      double v = s.reflectance[b];
      if (!(v >= 0.0 && v <= 1.0)) {
        std::ostringstream msg;
        msg << path << ": row " << r << ": reflectance " << v << " outside [0, 1] in band "
            << ds.band_axis.wavelength(b) << " nm";
        throw Error(msg.str());
      }
    }
    s.lwir = parse_double_cell(row[map.lwir], r, "lwir_c");
    s.soil_moisture = parse_double_cell(row[map.moisture], r, "soil_moisture_pct");
    if (s.soil_moisture < 0.0) {
      std::ostringstream msg;
      msg << path << ": row " << r << ": soil moisture " << s.soil_moisture << " is negative";
      throw Error(msg.str());
    }
    s.plot_id = map.plot >= 0
                    ? static_cast<int>(std::llround(parse_double_cell(row[map.plot], r, "plot_id")))
                    : 0;
    s.record_id = map.record >= 0
                      ? std::llround(parse_double_cell(row[map.record], r, "record_id"))
                      : static_cast<long>(r);
    ds.samples.push_back(std::move(s));
  }
  return ds;
}

void save_csv(const Dataset& dataset, const std::string& path) {
  CsvWriter out(path);
  std::vector<std::string> row;
  for (double wl : dataset.band_axis.wavelengths())
    row.push_back("band_" + std::to_string(static_cast<long>(wl)));
  row.push_back("lwir_c");
  row.push_back("soil_moisture_pct");
  row.push_back("plot_id");
  row.push_back("record_id");
  out.write_row(row);

  for (const auto& s : dataset.samples) {
    row.clear();
    for (double v : s.reflectance) row.push_back(format_double(v));
    row.push_back(format_double(s.lwir));
    row.push_back(format_double(s.soil_moisture));
    row.push_back(std::to_string(s.plot_id));
    row.push_back(std::to_string(s.record_id));
    out.write_row(row);
  }
}

std::pair<Dataset, Dataset> split_train_test(const Dataset& dataset, const SplitSpec& spec) {
  require(spec.train_count > 0 && spec.test_count > 0,
          "split_train_test: both subset sizes must be positive");
  require(spec.train_count + spec.test_count == dataset.size(),
          "split_train_test: counts " + std::to_string(spec.train_count) + "+" +
              std::to_string(spec.test_count) + " do not sum to dataset size " +
              std::to_string(dataset.size()));

  std::vector<std::size_t> order(dataset.size());
  std::iota(order.begin(), order.end(), 0);
  Rng rng(spec.seed);
  for (std::size_t i = order.size() - 1; i > 0; --i) {
    std::size_t j = rng.uniform_int(i + 1);
    std::swap(order[i], order[j]);
  }

  Dataset train, test;
  train.samples.reserve(spec.train_count);
  test.samples.reserve(spec.test_count);
  for (std::size_t i = 0; i < spec.train_count; ++i)
    train.samples.push_back(dataset.samples[order[i]]);
  for (std::size_t i = spec.train_count; i < order.size(); ++i)
    test.samples.push_back(dataset.samples[order[i]]);
  return {std::move(train), std::move(test)};
}

std::pair<Matrix, std::vector<double>> assemble_features(const Dataset& dataset) {
  require(!dataset.samples.empty(), "assemble_features: empty dataset");
  Matrix x(dataset.size(), kFeatureCount);
  std::vector<double> y(dataset.size());
  for (std::size_t i = 0; i < dataset.size(); ++i) {
    const auto& s = dataset.samples[i];
    require(s.reflectance.size() == kBandCount, "assemble_features: sample with wrong band count");
    double* row = x.row(i);
    std::copy(s.reflectance.begin(), s.reflectance.end(), row);
    row[kBandCount] = s.lwir;
    y[i] = s.soil_moisture;
  }
  return {std::move(x), std::move(y)};
}

Histogram make_histogram(const std::vector<double>& values, std::size_t n_bins) {
  require(!values.empty(), "make_histogram: no values");
  auto [lo_it, hi_it] = std::minmax_element(values.begin(), values.end());
  return make_histogram(values, n_bins, *lo_it, *hi_it);
}

Histogram make_histogram(const std::vector<double>& values, std::size_t n_bins, double lo,
                         double hi) {
  require(!values.empty(), "make_histogram: no values");
  require(n_bins >= 1, "make_histogram: n_bins must be >= 1");
  require(hi >= lo, "make_histogram: inverted range");

  Histogram h;
  h.edges.resize(n_bins + 1);
  for (std::size_t k = 0; k <= n_bins; ++k)
    h.edges[k] = lo + (hi - lo) * static_cast<double>(k) / static_cast<double>(n_bins);
  h.counts.assign(n_bins, 0);
  for (double v : values) {
    std::size_t idx;
    if (hi == lo) {
      idx = n_bins - 1;
    } else {
      idx = static_cast<std::size_t>((v - lo) / (hi - lo) * static_cast<double>(n_bins));
      if (idx >= n_bins) idx = n_bins - 1;
    }
    ++h.counts[idx];
  }
  return h;
}

Histogram target_histogram(const Dataset& dataset, std::size_t n_bins) {
  require(!dataset.samples.empty(), "target_histogram: empty dataset");
  std::vector<double> targets(dataset.size());
  for (std::size_t i = 0; i < dataset.size(); ++i) targets[i] = dataset.samples[i].soil_moisture;
  return make_histogram(targets, n_bins);
}

void save_histogram_csv(const Histogram& hist, const std::string& path) {
  CsvWriter out(path);
  out.write_row({"bin_left", "bin_right", "count"});
  for (std::size_t k = 0; k < hist.counts.size(); ++k)
    out.write_row({format_double(hist.edges[k]), format_double(hist.edges[k + 1]),
                   std::to_string(hist.counts[k])});
}

namespace {

// Fixed scene parameters. Only the noise levels and the moisture range are
// configurable; the spectral shape exists so that structural checks
// (importance peak, model ordering) can run at desk scale.
constexpr double kAbsorptionCenterNm = 826.0;
constexpr double kAbsorptionWidthNm = 8.0;
constexpr double kAbsorptionMaxDepth = 0.22;
constexpr double kAbsorptionSteepness = 10.0;
constexpr double kAmplitudeSlope = 0.12;
constexpr double kLwirBase = 32.0;
constexpr double kLwirSlope = 5.0;

double normalized_moisture(double moisture, const SynthConfig& c) {
  return (moisture - c.moisture_min) / (c.moisture_max - c.moisture_min);
}

double mixture_reflectance(double wavelength_nm) {
  // Soil line rising with wavelength plus a vegetation curve: green bump,
  // chlorophyll absorption, red edge, NIR plateau.
  double soil = 0.15 + 0.25 * (wavelength_nm - 470.0) / 456.0;
  double green = 0.06 * std::exp(-std::pow((wavelength_nm - 550.0) / 30.0, 2.0) / 2.0);
  double red_edge = 0.48 / (1.0 + std::exp(-(wavelength_nm - 718.0) / 16.0));
  double veg = 0.04 + green + red_edge;
  return 0.45 * soil + 0.55 * veg;
}

}  // namespace

double synthetic_absorption_depth(double moisture, const SynthConfig& config) {
  double t = normalized_moisture(moisture, config);
  return kAbsorptionMaxDepth / (1.0 + std::exp(-kAbsorptionSteepness * (t - 0.5)));
}

std::size_t synthetic_absorption_band() {
  return static_cast<std::size_t>(
      (kAbsorptionCenterNm - (kRawStartNm + kBandSpacingNm * kTrimPerEnd)) / kBandSpacingNm);
}

std::vector<double> synthetic_reflectance(double moisture, const SynthConfig& config) {
  BandAxis axis;
  double amplitude = 1.0 - kAmplitudeSlope * normalized_moisture(moisture, config);
  double depth = synthetic_absorption_depth(moisture, config);
  std::vector<double> out(kBandCount);
  for (std::size_t b = 0; b < kBandCount; ++b) {
    double wl = axis.wavelength(b);
    double feature =
        depth * std::exp(-std::pow((wl - kAbsorptionCenterNm) / kAbsorptionWidthNm, 2.0) / 2.0);
    out[b] = amplitude * mixture_reflectance(wl) - feature;
  }
  return out;
}

double synthetic_lwir(double moisture, const SynthConfig& config) {
  return kLwirBase - kLwirSlope * normalized_moisture(moisture, config);
}

Dataset generate_synthetic(const SynthConfig& config, std::uint64_t seed) {
  require(config.n_samples > 0, "generate_synthetic: sample count must be positive");
  require(config.moisture_max > config.moisture_min,
          "generate_synthetic: inverted moisture range");
  require(config.band_noise >= 0.0 && config.target_noise >= 0.0 && config.lwir_noise >= 0.0,
          "generate_synthetic: noise levels must be >= 0");

  Rng rng(derive_seed(seed, "synth"));
  Dataset ds;
  ds.samples.reserve(config.n_samples);
  for (std::size_t i = 0; i < config.n_samples; ++i) {
    double moisture = rng.uniform(config.moisture_min, config.moisture_max);
    SpectralSample s;
    s.reflectance = synthetic_reflectance(moisture, config);
    for (auto& v : s.reflectance) {
      if (config.band_noise > 0.0) v += config.band_noise * rng.normal();
      v = std::clamp(v, 0.0, 1.0);
    }
    s.lwir = synthetic_lwir(moisture, config);
    if (config.lwir_noise > 0.0) s.lwir += config.lwir_noise * rng.normal();
    s.soil_moisture = moisture;
    if (config.target_noise > 0.0)
      s.soil_moisture = std::max(0.0, moisture + config.target_noise * rng.normal());
    s.plot_id = static_cast<int>(i % 8) + 1;
    s.record_id = static_cast<long>(i);
    ds.samples.push_back(std::move(s));
  }
  return ds;
}

}  // namespace soilspec
