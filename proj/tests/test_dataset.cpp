#include <algorithm>
#include <fstream>
#include <set>
#include <vector>

#include "doctest.h"
#include "soilspec/dataset.hpp"
#include "soilspec/error.hpp"
#include "support/tempdir.hpp"

using namespace soilspec;
using testsupport::TempDir;

TEST_CASE("band axis: 470 to 926 nm at 4 nm spacing") {
  BandAxis axis;
  REQUIRE(axis.wavelengths().size() == kBandCount);
  CHECK(axis.wavelength(0) == 470.0);
  CHECK(axis.wavelength(1) == 474.0);
  CHECK(axis.wavelength(kBandCount - 1) == 926.0);
  CHECK(axis.index_of(826.0) == 89);
  CHECK(axis.index_of(470.0) == 0);
  CHECK(axis.index_of(471.0) == -1);
  CHECK(axis.index_of(930.0) == -1);
}

TEST_CASE("trim_bands: drops five channels at each end") {
  std::vector<double> raw(kRawBandCount);
  for (std::size_t i = 0; i < raw.size(); ++i) raw[i] = static_cast<double>(i);
  const std::vector<double> trimmed = trim_bands(raw);
  REQUIRE(trimmed.size() == kBandCount);
  CHECK(trimmed.front() == 5.0);
  CHECK(trimmed.back() == 119.0);
  CHECK_THROWS_AS(trim_bands(std::vector<double>(100)), Error);
}

TEST_CASE("generate_synthetic: deterministic per seed, structurally sound") {
  SynthConfig cfg;
  cfg.n_samples = 50;
  const Dataset a = generate_synthetic(cfg, 9);
  const Dataset b = generate_synthetic(cfg, 9);
  const Dataset c = generate_synthetic(cfg, 10);

  REQUIRE(a.size() == 50);
  bool identical = true;
  for (std::size_t i = 0; i < a.size(); ++i) {
    identical = identical && a.samples[i].reflectance == b.samples[i].reflectance &&
                a.samples[i].lwir == b.samples[i].lwir &&
                a.samples[i].soil_moisture == b.samples[i].soil_moisture;
  }
  CHECK(identical);

  bool differs = false;
  for (std::size_t i = 0; i < a.size() && !differs; ++i)
    differs = a.samples[i].soil_moisture != c.samples[i].soil_moisture;
  CHECK(differs);

  for (const auto& s : a.samples) {
    REQUIRE(s.reflectance.size() == kBandCount);
    for (double v : s.reflectance) {
      CHECK(v >= 0.0);
      CHECK(v <= 1.0);
    }
    CHECK(s.soil_moisture >= 0.0);
  }
}

TEST_CASE("generate_synthetic: absorption deepens and temperature drops with moisture") {
  SynthConfig cfg;
  CHECK(synthetic_absorption_depth(25.0, cfg) > synthetic_absorption_depth(10.0, cfg));
  CHECK(synthetic_lwir(25.0, cfg) < synthetic_lwir(10.0, cfg));
  CHECK(synthetic_absorption_band() == 89);

  // The noise-free spectrum actually dips at the feature.
  const std::vector<double> wet = synthetic_reflectance(27.0, cfg);
  const std::vector<double> dry = synthetic_reflectance(9.0, cfg);
  const std::size_t center = synthetic_absorption_band();
  CHECK(wet[center] < dry[center]);

  CHECK_THROWS_AS(generate_synthetic(SynthConfig{0}, 1), Error);
}

TEST_CASE("save_csv then load_csv: exact round trip") {
  TempDir tmp;
  SynthConfig cfg;
  cfg.n_samples = 20;
  const Dataset original = generate_synthetic(cfg, 4);
  save_csv(original, tmp.file("ds.csv"));
  const Dataset loaded = load_csv(tmp.file("ds.csv"));

  REQUIRE(loaded.size() == original.size());
  for (std::size_t i = 0; i < loaded.size(); ++i) {
    CHECK(loaded.samples[i].reflectance == original.samples[i].reflectance);
    CHECK(loaded.samples[i].lwir == original.samples[i].lwir);
    CHECK(loaded.samples[i].soil_moisture == original.samples[i].soil_moisture);
    CHECK(loaded.samples[i].plot_id == original.samples[i].plot_id);
    CHECK(loaded.samples[i].record_id == original.samples[i].record_id);
  }
}

TEST_CASE("load_csv: 125-band header is trimmed on ingest") {
  TempDir tmp;
  std::ofstream out(tmp.file("raw.csv"));
  for (std::size_t k = 0; k < kRawBandCount; ++k)
    out << "band_" << static_cast<long>(kRawStartNm + 4.0 * k) << ",";
  out << "lwir_c,soil_moisture_pct\n";
  for (std::size_t k = 0; k < kRawBandCount; ++k) out << "0.5,";
  out << "25,14.5\n";
  out.close();

  const Dataset ds = load_csv(tmp.file("raw.csv"));
  REQUIRE(ds.size() == 1);
  CHECK(ds.samples[0].reflectance.size() == kBandCount);
  CHECK(ds.samples[0].lwir == 25.0);
  CHECK(ds.samples[0].soil_moisture == 14.5);
}

TEST_CASE("load_csv: input validation") {
  TempDir tmp;

  SUBCASE("reflectance outside [0, 1]") {
    std::ofstream out(tmp.file("bad.csv"));
    BandAxis axis;
    for (double wl : axis.wavelengths()) out << "band_" << static_cast<long>(wl) << ",";
    out << "lwir_c,soil_moisture_pct\n";
    for (std::size_t k = 0; k < kBandCount; ++k) out << "1.5,";
    out << "25,14.5\n";
    out.close();
    CHECK_THROWS_AS(load_csv(tmp.file("bad.csv")), Error);
  }

  SUBCASE("negative soil moisture") {
    std::ofstream out(tmp.file("bad.csv"));
    BandAxis axis;
    for (double wl : axis.wavelengths()) out << "band_" << static_cast<long>(wl) << ",";
    out << "lwir_c,soil_moisture_pct\n";
    for (std::size_t k = 0; k < kBandCount; ++k) out << "0.5,";
    out << "25,-1\n";
    out.close();
    CHECK_THROWS_AS(load_csv(tmp.file("bad.csv")), Error);
  }

  SUBCASE("wrong band grid") {
    std::ofstream out(tmp.file("bad.csv"));
    out << "band_470,band_475,lwir_c,soil_moisture_pct\n0.5,0.5,25,14\n";
    out.close();
    CHECK_THROWS_AS(load_csv(tmp.file("bad.csv")), Error);
  }

  SUBCASE("unknown column") {
    std::ofstream out(tmp.file("bad.csv"));
    out << "mystery,lwir_c,soil_moisture_pct\n1,25,14\n";
    out.close();
    CHECK_THROWS_AS(load_csv(tmp.file("bad.csv")), Error);
  }
}

TEST_CASE("split_train_test: seeded partition") {
  SynthConfig cfg;
  cfg.n_samples = 100;
  const Dataset ds = generate_synthetic(cfg, 2);

  const SplitSpec spec{70, 30, 11};
  auto [train, test] = split_train_test(ds, spec);
  CHECK(train.size() == 70);
  CHECK(test.size() == 30);

  // Disjoint and exhaustive by record id.
  std::set<long> seen;
  for (const auto& s : train.samples) seen.insert(s.record_id);
  for (const auto& s : test.samples) seen.insert(s.record_id);
  CHECK(seen.size() == 100);

  // Same seed reproduces the split; a different seed changes it.
  auto [train2, test2] = split_train_test(ds, spec);
  CHECK(train2.samples[0].record_id == train.samples[0].record_id);
  bool same_membership = true;
  auto [train3, test3] = split_train_test(ds, SplitSpec{70, 30, 12});
  std::set<long> members, members3;
  for (const auto& s : train.samples) members.insert(s.record_id);
  for (const auto& s : train3.samples) members3.insert(s.record_id);
  same_membership = members == members3;
  CHECK(!same_membership);

  CHECK_THROWS_AS(split_train_test(ds, SplitSpec{70, 40, 1}), Error);
  CHECK_THROWS_AS(split_train_test(ds, SplitSpec{100, 0, 1}), Error);
}

TEST_CASE("assemble_features: bands then lwir, targets aligned") {
  SynthConfig cfg;
  cfg.n_samples = 5;
  const Dataset ds = generate_synthetic(cfg, 3);
  auto [x, y] = assemble_features(ds);
  REQUIRE(x.rows() == 5);
  REQUIRE(x.cols() == kFeatureCount);
  for (std::size_t i = 0; i < 5; ++i) {
    CHECK(x(i, 0) == ds.samples[i].reflectance[0]);
    CHECK(x(i, kBandCount - 1) == ds.samples[i].reflectance[kBandCount - 1]);
    CHECK(x(i, kBandCount) == ds.samples[i].lwir);
    CHECK(y[i] == ds.samples[i].soil_moisture);
  }
}

TEST_CASE("make_histogram: counts, edges and edge cases") {
  const std::vector<double> values = {0.0, 0.5, 1.0, 1.5, 2.0};
  const Histogram h = make_histogram(values, 4);
  REQUIRE(h.edges.size() == 5);
  CHECK(h.edges.front() == 0.0);
  CHECK(h.edges.back() == 2.0);
  long total = 0;
  for (long c : h.counts) total += c;
  CHECK(total == 5);
  // The maximum lands in the last bin, not past it.
  CHECK(h.counts[3] == 2);

  const Histogram fixed = make_histogram({0.5}, 3, 0.0, 3.0);
  CHECK(fixed.counts[0] == 1);

  const Histogram constant = make_histogram({2.0, 2.0}, 3);
  total = 0;
  for (long c : constant.counts) total += c;
  CHECK(total == 2);

  CHECK_THROWS_AS(make_histogram({}, 3), Error);
  CHECK_THROWS_AS(make_histogram({1.0}, 0), Error);
}

TEST_CASE("target_histogram and save_histogram_csv") {
  TempDir tmp;
  SynthConfig cfg;
  cfg.n_samples = 40;
  const Dataset ds = generate_synthetic(cfg, 8);
  const Histogram h = target_histogram(ds, 10);
  long total = 0;
  for (long c : h.counts) total += c;
  CHECK(total == 40);

  save_histogram_csv(h, tmp.file("hist.csv"));
  std::ifstream in(tmp.file("hist.csv"));
  std::string header;
  std::getline(in, header);
  CHECK(header == "bin_left,bin_right,count");
}
