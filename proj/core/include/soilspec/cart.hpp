#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "soilspec/linalg.hpp"
#include "soilspec/rng.hpp"

namespace soilspec {

// Flat-array regression tree node; feature == -1 marks a leaf.
struct TreeNode {
  int feature = -1;
  double threshold = 0.0;
  int left = -1;
  int right = -1;
  double value = 0.0;
  std::size_t n_samples = 0;
  double gain = 0.0;  // squared-error reduction achieved by this split
};

enum class SplitMode { exhaustive, random_threshold };

struct TreeParams {
  std::size_t max_depth = 0;           // 0 = unbounded
  std::size_t min_samples_split = 2;
  SplitMode split_mode = SplitMode::exhaustive;
  std::size_t features_per_split = 0;  // 0 = all features
};

// Binary regression tree grown by recursive variance-reducing splits.
// Exhaustive mode scans midpoints between consecutive sorted feature values;
// random mode draws one uniform threshold per candidate feature. Equal-gain
// ties go to the lowest feature index, then the lowest threshold.
class CartTree {
 public:
  void fit(const Matrix& x, const std::vector<double>& y, const TreeParams& params, Rng& rng);
  void fit(const Matrix& x, const std::vector<double>& y, std::vector<std::size_t> indices,
           const TreeParams& params, Rng& rng);

  double predict_one(const double* row, std::size_t width) const;
  std::vector<double> predict(const Matrix& x) const;

  // Index of the leaf an input lands in, and leaf-value assignment; boosting
  // rewrites fitted leaves with loss-specific updates.
  int leaf_for(const double* row, std::size_t width) const;
  void set_value(int node_id, double value);

  const std::vector<TreeNode>& nodes() const { return nodes_; }
  bool has_split() const;

  // Adds this tree's split gains per feature into acc (length d), normalized
  // so the tree's own contributions sum to `weight` (no-op on a stump).
  void add_importance(std::vector<double>& acc, double weight) const;

  nlohmann::json to_json() const;
  static CartTree from_json(const nlohmann::json& j);

 private:
  std::vector<TreeNode> nodes_;
};

}  // namespace soilspec
