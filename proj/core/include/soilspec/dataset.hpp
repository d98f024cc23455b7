#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "soilspec/linalg.hpp"

namespace soilspec {

inline constexpr std::size_t kRawBandCount = 125;   // sensor channels
inline constexpr std::size_t kBandCount = 115;      // after trimming 5 per end
inline constexpr std::size_t kTrimPerEnd = 5;
inline constexpr double kRawStartNm = 450.0;
inline constexpr double kBandSpacingNm = 4.0;
inline constexpr std::size_t kFeatureCount = kBandCount + 1;  // bands + LWIR

/// One datapoint: a trimmed reflectance spectrum, one LWIR temperature and
/// the volumetric soil-moisture target.
struct SpectralSample {
  std::vector<double> reflectance;  // kBandCount values in [0, 1]
  double lwir = 0.0;                // degrees Celsius
  double soil_moisture = 0.0;       // percent, >= 0
  int plot_id = 0;
  long record_id = 0;
};

/// The canonical trimmed wavelength grid: 470..926 nm at 4 nm spacing.
class BandAxis {
public:
  BandAxis();
  const std::vector<double>& wavelengths() const { return wavelengths_; }
  double wavelength(std::size_t band) const { return wavelengths_[band]; }
  /// Band index of the given wavelength, -1 if not on the grid.
  int index_of(double wavelength_nm) const;

private:
  std::vector<double> wavelengths_;
};

struct Dataset {
  std::vector<SpectralSample> samples;
  BandAxis band_axis;

  std::size_t size() const { return samples.size(); }
};

struct SplitSpec {
  std::size_t train_count = 0;
  std::size_t test_count = 0;
  std::uint64_t seed = 0;
};

struct SynthConfig {
  std::size_t n_samples = 1332;
  double moisture_min = 8.0;   // percent
  double moisture_max = 28.0;  // percent
  double band_noise = 0.01;    // sd of additive reflectance noise
  double target_noise = 1.5;   // sd in percentage points (TDR-grade)
  double lwir_noise = 2.0;     // sd in degrees Celsius
};

struct Histogram {
  std::vector<double> edges;   // n_bins + 1
  std::vector<long> counts;    // n_bins
};

/// Drops kTrimPerEnd bands at each end of a raw 125-channel spectrum.
std::vector<double> trim_bands(const std::vector<double>& raw);

/// Loads a dataset from CSV. Band columns are matched by name
/// (band_<wavelength_nm>); a 125-band header is trimmed automatically.
Dataset load_csv(const std::string& path);

/// Writes the trimmed 115-band schema read back by load_csv.
void save_csv(const Dataset& dataset, const std::string& path);

/// Seeded uniform partition into (train, test) with the requested sizes.
std::pair<Dataset, Dataset> split_train_test(const Dataset& dataset, const SplitSpec& spec);

/// Feature matrix (n x 116: bands then LWIR) and target vector.
std::pair<Matrix, std::vector<double>> assemble_features(const Dataset& dataset);

/// Equal-width histogram over [min, max] of the values, or an explicit range.
Histogram make_histogram(const std::vector<double>& values, std::size_t n_bins);
Histogram make_histogram(const std::vector<double>& values, std::size_t n_bins, double lo,
                         double hi);
Histogram target_histogram(const Dataset& dataset, std::size_t n_bins);
void save_histogram_csv(const Histogram& hist, const std::string& path);

/// Noise-free reflectance spectrum of the synthetic scene at the given
/// moisture: a vegetation/soil mixture whose amplitude decreases with
/// moisture, minus an absorption feature centered at 826 nm whose depth
/// increases with moisture.
std::vector<double> synthetic_reflectance(double moisture, const SynthConfig& config);

/// Noise-free synthetic LWIR temperature (decreases affinely with moisture).
double synthetic_lwir(double moisture, const SynthConfig& config);

/// Depth of the 826 nm absorption feature at the given moisture.
double synthetic_absorption_depth(double moisture, const SynthConfig& config);

/// Index of the synthetic absorption center on the trimmed band grid.
std::size_t synthetic_absorption_band();

/// Desk-scale stand-in for the field-campaign data; deterministic per seed.
Dataset generate_synthetic(const SynthConfig& config, std::uint64_t seed);

}  // namespace soilspec
