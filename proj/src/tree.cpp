#include "misinfo/tree.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "misinfo/error.hpp"
#include "misinfo/rng.hpp"

namespace misinfo {

using nlohmann::json;

double entropy2(double n0, double n1) {
  const double n = n0 + n1;
  if (n <= 0.0) return 0.0;
  double h = 0.0;
  for (double c : {n0, n1}) {
    if (c <= 0.0) continue;
    const double p = c / n;
    h -= p * std::log2(p);
  }
  return h;
}

SplitScore score_presence_split(double n0_absent, double n1_absent, double n0_present,
                                double n1_present) {
  SplitScore s;
  const double wa = n0_absent + n1_absent;
  const double wp = n0_present + n1_present;
  const double w = wa + wp;
  if (wa <= 0.0 || wp <= 0.0 || w <= 0.0) return s;
  const double h_parent = entropy2(n0_absent + n0_present, n1_absent + n1_present);
  s.gain = h_parent - (wa / w) * entropy2(n0_absent, n1_absent) -
           (wp / w) * entropy2(n0_present, n1_present);
  const double split_info = entropy2(wa, wp);
  if (split_info <= 0.0) return s;
  s.gain_ratio = s.gain / split_info;
  s.valid = true;
  return s;
}

double normal_quantile(double p) {
  if (!(p > 0.0 && p < 1.0)) throw ValidationError("normal_quantile: p must be in (0,1)");
  static const double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                             -2.759285104469687e+02, 1.383577518672690e+02,
                             -3.066479806614716e+01, 2.506628277459239e+00};
  static const double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                             -1.556989798598866e+02, 6.680131188771972e+01,
                             -1.328068155288572e+01};
  static const double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                             -2.400758277161838e+00, -2.549732539343734e+00,
                             4.374664141464968e+00,  2.938163982698783e+00};
  static const double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                             2.445134137142996e+00, 3.754408661907416e+00};
  constexpr double plow = 0.02425;
  double x;
  if (p < plow) {
    const double q = std::sqrt(-2.0 * std::log(p));
    x = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  } else if (p <= 1.0 - plow) {
    const double q = p - 0.5;
    const double r = q * q;
    x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
        (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
  } else {
    const double q = std::sqrt(-2.0 * std::log(1.0 - p));
    x = -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  }
  // One Halley refinement pushes the approximation to full double precision.
  const double e = 0.5 * std::erfc(-x / std::sqrt(2.0)) - p;
  const double u = e * std::sqrt(2.0 * M_PI) * std::exp(x * x / 2.0);
  return x - u / (1.0 + x * u / 2.0);
}

double pessimistic_added_errors(double n, double e, double confidence) {
  if (n <= 0.0) return 0.0;
  if (e < 1.0) {
    const double base = n * (1.0 - std::pow(confidence, 1.0 / n));
    if (e <= 0.0) return base;
    return base + e * (pessimistic_added_errors(n, 1.0, confidence) - base);
  }
  if (e + 0.5 >= n) return std::max(n - e, 0.0);
  const double z = normal_quantile(1.0 - confidence);
  const double f = (e + 0.5) / n;
  const double r = (f + z * z / (2.0 * n) +
                    z * std::sqrt(f / n - f * f / n + z * z / (4.0 * n * n))) /
                   (1.0 + z * z / n);
  return r * n - e;
}

TreeModel::TreeModel(LearnerKind kind, std::uint32_t dim, std::vector<TreeNode> nodes)
    : kind_(kind), dim_(dim), nodes_(std::move(nodes)) {
  if (nodes_.empty()) throw ValidationError("tree model: empty node pool");
}

namespace {

bool has_feature(const SparseVector& x, std::uint32_t f) {
  const auto it = std::lower_bound(
      x.entries.begin(), x.entries.end(), f,
      [](const std::pair<std::uint32_t, double>& e, std::uint32_t key) { return e.first < key; });
  return it != x.entries.end() && it->first == f && it->second > 0.0;
}

const TreeNode& descend(const std::vector<TreeNode>& nodes, const SparseVector& x) {
  std::size_t i = 0;
  while (nodes[i].feature >= 0) {
    const std::int32_t next = has_feature(x, static_cast<std::uint32_t>(nodes[i].feature))
                                  ? nodes[i].present
                                  : nodes[i].absent;
    i = static_cast<std::size_t>(next);
  }
  return nodes[i];
}

json nodes_to_json(const std::vector<TreeNode>& nodes) {
  json arr = json::array();
  for (const TreeNode& n : nodes)
    arr.push_back(json::array({n.feature, n.absent, n.present, n.class_weight[0],
                               n.class_weight[1]}));
  return arr;
}

std::vector<TreeNode> nodes_from_json(const json& arr) {
  std::vector<TreeNode> nodes;
  for (const auto& e : arr) {
    TreeNode n;
    n.feature = e.at(0).get<std::int32_t>();
    n.absent = e.at(1).get<std::int32_t>();
    n.present = e.at(2).get<std::int32_t>();
    n.class_weight = {e.at(3).get<double>(), e.at(4).get<double>()};
    nodes.push_back(n);
  }
  return nodes;
}

}  // namespace

Prediction TreeModel::predict(const SparseVector& x) const {
  check_dim(x);
  const TreeNode& leaf = descend(nodes_, x);
  const double w = leaf.class_weight[0] + leaf.class_weight[1];
  if (w <= 0.0) return make_prediction({0.5, 0.5}, true);
  return make_prediction({leaf.class_weight[0] / w, leaf.class_weight[1] / w}, true);
}

int TreeModel::leaf_count() const {
  int n = 0;
  for (const TreeNode& node : nodes_)
    if (node.feature < 0) ++n;
  return n;
}

int TreeModel::depth() const {
  // Edge count on the longest root-to-leaf path.
  std::vector<int> depth_of(nodes_.size(), 0);
  int best = 0;
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    const TreeNode& node = nodes_[i];
    if (node.feature < 0) {
      best = std::max(best, depth_of[i]);
      continue;
    }
    depth_of[static_cast<std::size_t>(node.absent)] = depth_of[i] + 1;
    depth_of[static_cast<std::size_t>(node.present)] = depth_of[i] + 1;
  }
  return best;
}

json TreeModel::to_json() const {
  json j;
  j["kind"] = to_string(kind_);
  j["dim"] = dim_;
  j["nodes"] = nodes_to_json(nodes_);
  return j;
}

TrainedModel TreeModel::from_json(const json& j) {
  const std::string kind_str = j.at("kind").get<std::string>();
  const auto kind = learner_kind_from_string(kind_str);
  if (!kind) throw ParseError("tree model: unknown kind \"" + kind_str + "\"");
  return std::make_unique<TreeModel>(*kind, j.at("dim").get<std::uint32_t>(),
                                     nodes_from_json(j.at("nodes")));
}

namespace {

// Shared recursive grower for C4.5 and random-forest member trees. Instances
// are (index, weight) pairs; node counts use weighted sums throughout.
class TreeBuilder {
 public:
  TreeBuilder(const FeatureMatrix& X, const std::vector<Label>& y, int min_leaf, int max_depth)
      : X_(X),
        y_(y),
        min_leaf_(min_leaf),
        max_depth_(max_depth),
        present_w0_(X.dim, 0.0),
        present_w1_(X.dim, 0.0) {}

  // Random-subspace mode: evaluate `k` features sampled without replacement
  // per split instead of every feature present at the node.
  void enable_feature_sampling(int k, Rng* rng) {
    sample_k_ = k;
    rng_ = rng;
    feature_pool_.resize(X_.dim);
    std::iota(feature_pool_.begin(), feature_pool_.end(), 0u);
  }

  std::vector<TreeNode> build(std::vector<std::pair<std::size_t, double>> instances) {
    nodes_.clear();
    grow(std::move(instances), 0);
    return std::move(nodes_);
  }

 private:
  std::int32_t grow(std::vector<std::pair<std::size_t, double>> instances, int depth) {
    std::array<double, 2> cw{0.0, 0.0};
    for (const auto& [i, w] : instances) cw[static_cast<int>(y_[i])] += w;

    const std::int32_t self = static_cast<std::int32_t>(nodes_.size());
    nodes_.push_back(TreeNode{});
    nodes_[self].class_weight = cw;

    const bool pure = cw[0] <= 0.0 || cw[1] <= 0.0;
    const bool depth_capped = max_depth_ >= 0 && depth >= max_depth_;
    if (pure || depth_capped || cw[0] + cw[1] < 2.0 * min_leaf_) return self;

    const auto [feature, valid] = choose_split(instances, cw);
    if (!valid) return self;

    std::vector<std::pair<std::size_t, double>> absent, present;
    for (const auto& inst : instances)
      (has_feature(X_.rows[inst.first], feature) ? present : absent).push_back(inst);
    instances.clear();
    instances.shrink_to_fit();

    nodes_[self].feature = static_cast<std::int32_t>(feature);
    const std::int32_t absent_child = grow(std::move(absent), depth + 1);
    nodes_[self].absent = absent_child;
    const std::int32_t present_child = grow(std::move(present), depth + 1);
    nodes_[self].present = present_child;
    return self;
  }

  std::pair<std::uint32_t, bool> choose_split(
      const std::vector<std::pair<std::size_t, double>>& instances,
      const std::array<double, 2>& cw) {
    // Per-label presence weights for every feature touched at this node.
    touched_.clear();
    for (const auto& [i, w] : instances) {
      const int c = static_cast<int>(y_[i]);
      for (const auto& [f, v] : X_.rows[i].entries) {
        if (v <= 0.0) continue;
        if (present_w0_[f] == 0.0 && present_w1_[f] == 0.0) touched_.push_back(f);
        (c == 0 ? present_w0_[f] : present_w1_[f]) += w;
      }
    }

    std::uint32_t best_f = 0;
    double best_ratio = 0.0;
    bool found = false;
    auto consider = [&](std::uint32_t f) {
      const double p0 = present_w0_[f], p1 = present_w1_[f];
      const double a0 = cw[0] - p0, a1 = cw[1] - p1;
      if (p0 + p1 < min_leaf_ || a0 + a1 < min_leaf_) return;
      const SplitScore s = score_presence_split(a0, a1, p0, p1);
      if (!s.valid || s.gain <= 1e-12) return;
      if (!found || s.gain_ratio > best_ratio + 1e-12 ||
          (std::fabs(s.gain_ratio - best_ratio) <= 1e-12 && f < best_f)) {
        best_f = f;
        best_ratio = s.gain_ratio;
        found = true;
      }
    };

    if (sample_k_ > 0) {
      // Partial Fisher-Yates over the persistent pool; swaps are undone
      // afterwards so the pool ordering stays canonical for the next draw.
      const std::uint32_t n = static_cast<std::uint32_t>(feature_pool_.size());
      const std::uint32_t k = std::min<std::uint32_t>(static_cast<std::uint32_t>(sample_k_), n);
      std::vector<std::pair<std::uint32_t, std::uint32_t>> swaps;
      swaps.reserve(k);
      for (std::uint32_t i = 0; i < k; ++i) {
        const std::uint32_t j = i + static_cast<std::uint32_t>(rng_->uniform(n - i));
        std::swap(feature_pool_[i], feature_pool_[j]);
        swaps.emplace_back(i, j);
      }
      for (std::uint32_t i = 0; i < k; ++i) consider(feature_pool_[i]);
      for (auto it = swaps.rbegin(); it != swaps.rend(); ++it)
        std::swap(feature_pool_[it->first], feature_pool_[it->second]);
    } else {
      std::sort(touched_.begin(), touched_.end());
      for (std::uint32_t f : touched_) consider(f);
    }

    for (std::uint32_t f : touched_) {
      present_w0_[f] = 0.0;
      present_w1_[f] = 0.0;
    }
    return {best_f, found};
  }

  const FeatureMatrix& X_;
  const std::vector<Label>& y_;
  double min_leaf_;
  int max_depth_;
  std::vector<double> present_w0_, present_w1_;
  std::vector<std::uint32_t> touched_;
  std::vector<TreeNode> nodes_;
  int sample_k_ = 0;
  Rng* rng_ = nullptr;
  std::vector<std::uint32_t> feature_pool_;
};

double node_leaf_errors(const TreeNode& n, double confidence) {
  const double total = n.class_weight[0] + n.class_weight[1];
  const double errors = total - std::max(n.class_weight[0], n.class_weight[1]);
  return errors + pessimistic_added_errors(total, errors, confidence);
}

// Bottom-up subtree replacement: collapse an internal node whenever its
// as-a-leaf pessimistic error does not exceed the sum over its branches.
double prune_subtree(std::vector<TreeNode>& nodes, std::int32_t idx, double confidence) {
  TreeNode& node = nodes[idx];
  if (node.feature < 0) return node_leaf_errors(node, confidence);
  const double branch_errors = prune_subtree(nodes, node.absent, confidence) +
                               prune_subtree(nodes, node.present, confidence);
  const double leaf_errors = node_leaf_errors(node, confidence);
  if (leaf_errors <= branch_errors + 0.1) {
    node.feature = -1;
    node.absent = -1;
    node.present = -1;
    return leaf_errors;
  }
  return branch_errors;
}

// Drops nodes orphaned by pruning and reindexes children in preorder.
std::vector<TreeNode> compact_nodes(const std::vector<TreeNode>& nodes) {
  std::vector<TreeNode> out;
  std::vector<std::int32_t> order;
  std::vector<std::int32_t> new_index(nodes.size(), -1);
  std::vector<std::int32_t> walk{0};
  while (!walk.empty()) {
    const std::int32_t i = walk.back();
    walk.pop_back();
    new_index[i] = static_cast<std::int32_t>(order.size());
    order.push_back(i);
    if (nodes[i].feature >= 0) {
      walk.push_back(nodes[i].present);
      walk.push_back(nodes[i].absent);
    }
  }
  out.reserve(order.size());
  for (std::int32_t i : order) {
    TreeNode n = nodes[i];
    if (n.feature >= 0) {
      n.absent = new_index[n.absent];
      n.present = new_index[n.present];
    }
    out.push_back(n);
  }
  return out;
}

std::vector<std::pair<std::size_t, double>> all_instances(std::size_t n,
                                                          const std::vector<double>* weights) {
  std::vector<std::pair<std::size_t, double>> inst;
  inst.reserve(n);
  for (std::size_t i = 0; i < n; ++i) inst.emplace_back(i, weights ? (*weights)[i] : 1.0);
  return inst;
}

}  // namespace

TrainedModel train_c45(const FeatureMatrix& X, const std::vector<Label>& y,
                       const C45Params& params, const std::vector<double>* weights) {
  if (params.min_leaf < 1) throw ValidationError("train_c45: min_leaf must be >= 1");
  if (params.prune && (params.confidence <= 0.0 || params.confidence >= 1.0))
    throw ValidationError("train_c45: confidence must be in (0,1)");
  if (X.size() != y.size()) throw ValidationError("train_c45: X and y sizes differ");
  if (X.size() == 0) throw ValidationError("train_c45: empty training set");
  if (weights && weights->size() != X.size())
    throw ValidationError("train_c45: weight vector size mismatch");

  TreeBuilder builder(X, y, params.min_leaf, params.max_depth);
  std::vector<TreeNode> nodes = builder.build(all_instances(X.size(), weights));
  if (params.prune) {
    prune_subtree(nodes, 0, params.confidence);
    nodes = compact_nodes(nodes);
  }
  return std::make_unique<TreeModel>(LearnerKind::c45_tree, X.dim, std::move(nodes));
}

ForestModel::ForestModel(std::uint32_t dim, std::vector<std::vector<TreeNode>> trees)
    : dim_(dim), trees_(std::move(trees)) {
  if (trees_.empty()) throw ValidationError("forest model: no trees");
}

Prediction ForestModel::predict(const SparseVector& x) const {
  check_dim(x);
  std::array<double, 2> acc{0.0, 0.0};
  for (const auto& tree : trees_) {
    const TreeNode& leaf = descend(tree, x);
    // Laplace-smoothed leaf distribution keeps empty-ish leaves well defined.
    const double w = leaf.class_weight[0] + leaf.class_weight[1];
    acc[0] += (leaf.class_weight[0] + 1.0) / (w + 2.0);
    acc[1] += (leaf.class_weight[1] + 1.0) / (w + 2.0);
  }
  const double n = static_cast<double>(trees_.size());
  return make_prediction({acc[0] / n, acc[1] / n}, true);
}

json ForestModel::to_json() const {
  json j;
  j["kind"] = to_string(LearnerKind::random_forest);
  j["dim"] = dim_;
  json trees = json::array();
  for (const auto& tree : trees_) trees.push_back(nodes_to_json(tree));
  j["trees"] = std::move(trees);
  return j;
}

TrainedModel ForestModel::from_json(const json& j) {
  std::vector<std::vector<TreeNode>> trees;
  for (const auto& t : j.at("trees")) trees.push_back(nodes_from_json(t));
  return std::make_unique<ForestModel>(j.at("dim").get<std::uint32_t>(), std::move(trees));
}

TrainedModel train_random_forest(const FeatureMatrix& X, const std::vector<Label>& y,
                                 const RandomForestParams& params, std::uint64_t seed) {
  if (params.n_trees < 1) throw ValidationError("train_random_forest: n_trees must be >= 1");
  if (params.features_per_split < 0)
    throw ValidationError("train_random_forest: features_per_split must be >= 0");
  if (X.size() != y.size()) throw ValidationError("train_random_forest: X and y sizes differ");
  if (X.size() == 0) throw ValidationError("train_random_forest: empty training set");

  const int k = params.features_per_split > 0
                    ? params.features_per_split
                    : std::max(1, static_cast<int>(std::sqrt(static_cast<double>(X.dim))));

  std::vector<std::vector<TreeNode>> trees;
  trees.reserve(params.n_trees);
  for (int t = 0; t < params.n_trees; ++t) {
    Rng rng(Rng::derive(seed, static_cast<std::uint64_t>(t)));
    std::vector<std::pair<std::size_t, double>> sample;
    sample.reserve(X.size());
    for (std::size_t i = 0; i < X.size(); ++i)
      sample.emplace_back(params.bootstrap ? rng.uniform(X.size()) : i, 1.0);
    TreeBuilder builder(X, y, params.min_leaf, params.max_depth);
    builder.enable_feature_sampling(k, &rng);
    trees.push_back(builder.build(std::move(sample)));
  }
  return std::make_unique<ForestModel>(X.dim, std::move(trees));
}

}  // namespace misinfo
