#include "soilspec/knn.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>

#include <nlohmann/json.hpp>

#include "soilspec/error.hpp"

namespace soilspec {

KnnRegressor::KnnRegressor(const HyperparameterSet& hp) : hp_(hp), train_x_(0, 0) {
  require(hp.kind() == "knn", "KnnRegressor: wrong hyperparameter kind");
  if (hp.get_int("leaf_size") != 1)
    std::cerr << "knn: leaf_size is accepted for compatibility and ignored "
                 "(search is exact brute force)\n";
}

void KnnRegressor::fit(const Matrix& x, const std::vector<double>& y) {
  check_fit_inputs(x, y);
  require(x.rows() >= static_cast<std::size_t>(hp_.get_int("n_neighbors")),
          "fit_knn: fewer samples than n_neighbors");
  train_x_ = x;
  train_y_ = y;
}

double KnnRegressor::predict_one(const double* q) const {
  const std::size_t n = train_x_.rows();
  const std::size_t k = static_cast<std::size_t>(hp_.get_int("n_neighbors"));
  const bool by_distance = hp_.get_string("weights") == "distance";

  std::vector<std::pair<double, std::size_t>> dist(n);
  for (std::size_t i = 0; i < n; ++i)
    dist[i] = {squared_distance(train_x_.row(i), q, train_x_.cols()), i};
  std::partial_sort(dist.begin(), dist.begin() + k, dist.end());

  if (by_distance && dist[0].first == 0.0) {
    // Only the first k entries are ordered; scan everything for exact matches.
    double sum = 0.0;
    std::size_t count = 0;
    for (const auto& [d2, idx] : dist) {
      if (d2 == 0.0) {
        sum += train_y_[idx];
        ++count;
      }
    }
    return sum / static_cast<double>(count);
  }

  double wsum = 0.0, acc = 0.0;
  for (std::size_t j = 0; j < k; ++j) {
    double w = by_distance ? 1.0 / std::sqrt(dist[j].first) : 1.0;
    acc += w * train_y_[dist[j].second];
    wsum += w;
  }
  return acc / wsum;
}

std::vector<double> KnnRegressor::predict(const Matrix& x) const {
  check_predict_input(x);
  std::vector<double> out(x.rows());
  for (std::size_t i = 0; i < x.rows(); ++i) out[i] = predict_one(x.row(i));
  return out;
}

nlohmann::json KnnRegressor::params_to_json() const {
  std::vector<std::vector<double>> rows(train_x_.rows());
  for (std::size_t i = 0; i < train_x_.rows(); ++i)
    rows[i].assign(train_x_.row(i), train_x_.row(i) + train_x_.cols());
  return {{"train_x", rows}, {"train_y", train_y_}};
}

void KnnRegressor::params_from_json(const nlohmann::json& j) {
  auto rows = j.at("train_x").get<std::vector<std::vector<double>>>();
  require(!rows.empty(), "knn: empty stored training set");
  train_x_ = Matrix(rows.size(), rows[0].size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    require(rows[i].size() == train_x_.cols(), "knn: ragged stored training matrix");
    for (std::size_t c = 0; c < rows[i].size(); ++c) train_x_(i, c) = rows[i][c];
  }
  train_y_ = j.at("train_y").get<std::vector<double>>();
  require(train_y_.size() == train_x_.rows(), "knn: stored target length mismatch");
  fitted_width_ = train_x_.cols();
}

}  // namespace soilspec
