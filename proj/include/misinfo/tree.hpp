#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "misinfo/model.hpp"

namespace misinfo {

// Decision tree node in a flat pool. Splits test feature presence
// (value > 0); sparse n-gram features make that the only informative cut.
struct TreeNode {
  std::int32_t feature = -1;  // -1 for leaves
  std::int32_t absent = -1;   // child when x[feature] == 0
  std::int32_t present = -1;  // child when x[feature] > 0
  std::array<double, 2> class_weight{0.0, 0.0};  // weighted label counts at the node
};

class TreeModel final : public Model {
 public:
  TreeModel(LearnerKind kind, std::uint32_t dim, std::vector<TreeNode> nodes);

  LearnerKind kind() const override { return kind_; }
  std::uint32_t dim() const override { return dim_; }
  Prediction predict(const SparseVector& x) const override;
  nlohmann::json to_json() const override;

  const std::vector<TreeNode>& nodes() const { return nodes_; }
  int leaf_count() const;
  int depth() const;

  // Index of the root split feature, or -1 when the tree is a single leaf.
  std::int32_t root_feature() const { return nodes_.empty() ? -1 : nodes_[0].feature; }

  static TrainedModel from_json(const nlohmann::json& j);

 private:
  LearnerKind kind_;
  std::uint32_t dim_;
  std::vector<TreeNode> nodes_;  // nodes_[0] is the root
};

struct C45Params {
  int min_leaf = 2;
  bool prune = true;
  double confidence = 0.25;
  int max_depth = -1;  // < 0 means unlimited
};

// Gain-ratio tree with optional pessimistic-error subtree replacement.
TrainedModel train_c45(const FeatureMatrix& X, const std::vector<Label>& y,
                       const C45Params& params, const std::vector<double>* weights = nullptr);

struct RandomForestParams {
  int n_trees = 100;
  int max_depth = -1;
  int features_per_split = 0;  // 0 = floor(sqrt(dim))
  int min_leaf = 1;
  bool bootstrap = true;  // test hook: false trains every tree on the full set
};

// Bootstrap-sampled unpruned trees with per-split random feature subsets;
// prediction averages smoothed leaf distributions.
class ForestModel final : public Model {
 public:
  ForestModel(std::uint32_t dim, std::vector<std::vector<TreeNode>> trees);

  LearnerKind kind() const override { return LearnerKind::random_forest; }
  std::uint32_t dim() const override { return dim_; }
  Prediction predict(const SparseVector& x) const override;
  nlohmann::json to_json() const override;

  std::size_t n_trees() const { return trees_.size(); }

  static TrainedModel from_json(const nlohmann::json& j);

 private:
  std::uint32_t dim_;
  std::vector<std::vector<TreeNode>> trees_;
};

TrainedModel train_random_forest(const FeatureMatrix& X, const std::vector<Label>& y,
                                 const RandomForestParams& params, std::uint64_t seed);

// Hand-check helpers for the split-selection tests.
double entropy2(double n0, double n1);
struct SplitScore {
  double gain = 0.0;
  double gain_ratio = 0.0;
  bool valid = false;
};
SplitScore score_presence_split(double n0_absent, double n1_absent, double n0_present,
                                double n1_present);

// Standard-normal quantile (Acklam's approximation plus one Halley step).
double normal_quantile(double p);

// Pessimistic extra-error estimate for a node with n weighted instances and e
// weighted errors at the given confidence; the continuity-corrected normal
// upper bound classically used for subtree-replacement pruning.
double pessimistic_added_errors(double n, double e, double confidence);

}  // namespace misinfo
