#include "soilspec/cart.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <nlohmann/json.hpp>

#include "soilspec/error.hpp"

namespace soilspec {

namespace {

struct Candidate {
  bool valid = false;
  int feature = -1;
  double threshold = 0.0;
  double gain = -1.0;
};

struct Builder {
  const Matrix& x;
  const std::vector<double>& y;
  const TreeParams& params;
  Rng& rng;
  std::vector<TreeNode>& nodes;

  std::vector<int> feature_pool;
  std::vector<std::pair<double, std::size_t>> scratch;

  // Sampled candidate features in ascending order (all features when the
  // subset size covers them).
  std::vector<int> sample_features() {
    const std::size_t d = x.cols();
    std::size_t k = params.features_per_split == 0 ? d : params.features_per_split;
    if (k >= d) {
      std::vector<int> all(d);
      std::iota(all.begin(), all.end(), 0);
      return all;
    }
    if (feature_pool.size() != d) {
      feature_pool.resize(d);
      std::iota(feature_pool.begin(), feature_pool.end(), 0);
    }
    for (std::size_t i = 0; i < k; ++i) {
      std::size_t j = i + static_cast<std::size_t>(rng.uniform_int(d - i));
      std::swap(feature_pool[i], feature_pool[j]);
    }
    std::vector<int> picked(feature_pool.begin(), feature_pool.begin() + k);
    std::sort(picked.begin(), picked.end());
    return picked;
  }

  void consider(Candidate& best, int feature, double threshold, double gain) {
    if (!best.valid || gain > best.gain) {
      best = {true, feature, threshold, gain};
    }
  }

  Candidate best_exhaustive_split(const std::vector<std::size_t>& idx, int feature,
                                  Candidate best) {
    const std::size_t n = idx.size();
    scratch.clear();
    for (std::size_t i : idx) scratch.emplace_back(x(i, feature), i);
    std::sort(scratch.begin(), scratch.end());

    double total_sum = 0.0, total_sq = 0.0;
    for (auto& [v, i] : scratch) {
      total_sum += y[i];
      total_sq += y[i] * y[i];
    }
    const double parent_sse = total_sq - total_sum * total_sum / static_cast<double>(n);

    double left_sum = 0.0, left_sq = 0.0;
    for (std::size_t pos = 0; pos + 1 < n; ++pos) {
      const double yi = y[scratch[pos].second];
      left_sum += yi;
      left_sq += yi * yi;
      const double a = scratch[pos].first;
      const double b = scratch[pos + 1].first;
      if (a == b) continue;
      double thr = 0.5 * (a + b);
      if (thr >= b) thr = a;  // midpoint can round up between adjacent doubles
      const double nl = static_cast<double>(pos + 1);
      const double nr = static_cast<double>(n - pos - 1);
      const double right_sum = total_sum - left_sum;
      const double right_sq = total_sq - left_sq;
      const double sse_l = left_sq - left_sum * left_sum / nl;
      const double sse_r = right_sq - right_sum * right_sum / nr;
      consider(best, feature, thr, parent_sse - sse_l - sse_r);
    }
    return best;
  }

  Candidate best_random_split(const std::vector<std::size_t>& idx, int feature, Candidate best) {
    double lo = x(idx[0], feature), hi = lo;
    for (std::size_t i : idx) {
      lo = std::min(lo, x(i, feature));
      hi = std::max(hi, x(i, feature));
    }
    if (lo == hi) return best;
    const double thr = rng.uniform(lo, hi);

    double total_sum = 0.0, total_sq = 0.0, left_sum = 0.0, left_sq = 0.0;
    std::size_t nl = 0;
    for (std::size_t i : idx) {
      total_sum += y[i];
      total_sq += y[i] * y[i];
      if (x(i, feature) <= thr) {
        left_sum += y[i];
        left_sq += y[i] * y[i];
        ++nl;
      }
    }
    const std::size_t n = idx.size();
    const double nr = static_cast<double>(n - nl);
    const double parent_sse = total_sq - total_sum * total_sum / static_cast<double>(n);
    const double right_sum = total_sum - left_sum;
    const double right_sq = total_sq - left_sq;
    const double sse_l = left_sq - left_sum * left_sum / static_cast<double>(nl);
    const double sse_r = right_sq - right_sum * right_sum / nr;
    consider(best, feature, thr, parent_sse - sse_l - sse_r);
    return best;
  }

  int build(std::vector<std::size_t> idx, std::size_t depth) {
    const std::size_t n = idx.size();
    double sum = 0.0;
    for (std::size_t i : idx) sum += y[i];
    const double mean = sum / static_cast<double>(n);

    bool pure = true;
    for (std::size_t i : idx) {
      if (y[i] != y[idx[0]]) {
        pure = false;
        break;
      }
    }

    const int node_id = static_cast<int>(nodes.size());
    nodes.emplace_back();
    nodes[node_id].value = mean;
    nodes[node_id].n_samples = n;

    const bool depth_capped = params.max_depth > 0 && depth >= params.max_depth;
    if (pure || n < params.min_samples_split || depth_capped) return node_id;

    Candidate best;
    for (int feature : sample_features()) {
      best = params.split_mode == SplitMode::exhaustive
                 ? best_exhaustive_split(idx, feature, best)
                 : best_random_split(idx, feature, best);
    }
    if (!best.valid) return node_id;  // every candidate feature constant here

    std::vector<std::size_t> left_idx, right_idx;
    for (std::size_t i : idx) {
      (x(i, best.feature) <= best.threshold ? left_idx : right_idx).push_back(i);
    }
    idx.clear();
    idx.shrink_to_fit();

    nodes[node_id].feature = best.feature;
    nodes[node_id].threshold = best.threshold;
    nodes[node_id].gain = std::max(best.gain, 0.0);
    const int left = build(std::move(left_idx), depth + 1);
    nodes[node_id].left = left;
    const int right = build(std::move(right_idx), depth + 1);
    nodes[node_id].right = right;
    return node_id;
  }
};

}  // namespace

void CartTree::fit(const Matrix& x, const std::vector<double>& y, const TreeParams& params,
                   Rng& rng) {
  std::vector<std::size_t> idx(x.rows());
  std::iota(idx.begin(), idx.end(), 0);
  fit(x, y, std::move(idx), params, rng);
}

void CartTree::fit(const Matrix& x, const std::vector<double>& y, std::vector<std::size_t> indices,
                   const TreeParams& params, Rng& rng) {
  require(x.rows() >= 1 && x.rows() == y.size(), "fit_cart: bad training shape");
  require(!indices.empty(), "fit_cart: empty index set");
  require(params.min_samples_split >= 2, "fit_cart: min_samples_split must be >= 2");
  require(params.features_per_split <= x.cols(), "fit_cart: features_per_split exceeds width");
  for (std::size_t i : indices) require(i < x.rows(), "fit_cart: index out of range");

  nodes_.clear();
  Builder builder{x, y, params, rng, nodes_, {}, {}};
  builder.build(std::move(indices), 0);
}

double CartTree::predict_one(const double* row, std::size_t width) const {
  return nodes_[static_cast<std::size_t>(leaf_for(row, width))].value;
}

int CartTree::leaf_for(const double* row, std::size_t width) const {
  require(!nodes_.empty(), "tree: not fitted");
  int node = 0;
  while (nodes_[node].feature >= 0) {
    require(static_cast<std::size_t>(nodes_[node].feature) < width, "tree: feature out of range");
    node = row[nodes_[node].feature] <= nodes_[node].threshold ? nodes_[node].left
                                                               : nodes_[node].right;
  }
  return node;
}

void CartTree::set_value(int node_id, double value) {
  require(node_id >= 0 && static_cast<std::size_t>(node_id) < nodes_.size(),
          "tree: node id out of range");
  nodes_[static_cast<std::size_t>(node_id)].value = value;
}

std::vector<double> CartTree::predict(const Matrix& x) const {
  std::vector<double> out(x.rows());
  for (std::size_t i = 0; i < x.rows(); ++i) out[i] = predict_one(x.row(i), x.cols());
  return out;
}

bool CartTree::has_split() const {
  for (const TreeNode& n : nodes_)
    if (n.feature >= 0) return true;
  return false;
}

void CartTree::add_importance(std::vector<double>& acc, double weight) const {
  double total = 0.0;
  for (const TreeNode& n : nodes_)
    if (n.feature >= 0) total += n.gain;
  if (total <= 0.0) return;
  for (const TreeNode& n : nodes_) {
    if (n.feature >= 0) acc[static_cast<std::size_t>(n.feature)] += weight * n.gain / total;
  }
}

nlohmann::json CartTree::to_json() const {
  nlohmann::json arr = nlohmann::json::array();
  for (const TreeNode& n : nodes_) {
    arr.push_back({{"feature", n.feature},
                   {"threshold", n.threshold},
                   {"left", n.left},
                   {"right", n.right},
                   {"value", n.value},
                   {"n", n.n_samples},
                   {"gain", n.gain}});
  }
  return arr;
}

CartTree CartTree::from_json(const nlohmann::json& j) {
  CartTree tree;
  for (const auto& nj : j) {
    TreeNode n;
    n.feature = nj.at("feature").get<int>();
    n.threshold = nj.at("threshold").get<double>();
    n.left = nj.at("left").get<int>();
    n.right = nj.at("right").get<int>();
    n.value = nj.at("value").get<double>();
    n.n_samples = nj.at("n").get<std::size_t>();
    n.gain = nj.at("gain").get<double>();
    tree.nodes_.push_back(n);
  }
  require(!tree.nodes_.empty(), "tree: empty stored node array");
  return tree;
}

}  // namespace soilspec
