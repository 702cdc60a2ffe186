#include "misinfo/ensemble.hpp"

#include <cmath>

#include "misinfo/error.hpp"
#include "misinfo/rng.hpp"

namespace misinfo {

using nlohmann::json;

BaggingModel::BaggingModel(std::uint32_t dim, std::vector<TrainedModel> members)
    : dim_(dim), members_(std::move(members)) {
  if (members_.empty()) throw ValidationError("bagging model: no members");
}

Prediction BaggingModel::predict(const SparseVector& x) const {
  check_dim(x);
  std::array<double, 2> acc{0.0, 0.0};
  bool probabilistic = true;
  for (const auto& m : members_) {
    const Prediction p = m->predict(x);
    acc[0] += p.scores[0];
    acc[1] += p.scores[1];
    probabilistic = probabilistic && p.probabilistic;
  }
  const double n = static_cast<double>(members_.size());
  return make_prediction({acc[0] / n, acc[1] / n}, probabilistic);
}

bool BaggingModel::converged() const {
  for (const auto& m : members_)
    if (!m->converged()) return false;
  return true;
}

json BaggingModel::to_json() const {
  json j;
  j["kind"] = to_string(LearnerKind::bagging);
  j["dim"] = dim_;
  json members = json::array();
  for (const auto& m : members_) members.push_back(m->to_json());
  j["members"] = std::move(members);
  return j;
}

TrainedModel BaggingModel::from_json(const json& j) {
  std::vector<TrainedModel> members;
  for (const auto& m : j.at("members")) members.push_back(model_from_json(m));
  return std::make_unique<BaggingModel>(j.at("dim").get<std::uint32_t>(), std::move(members));
}

TrainedModel train_bagging(const ModelSpec& base, const FeatureMatrix& X,
                           const std::vector<Label>& y, int n_members, std::uint64_t seed) {
  if (n_members < 1) throw ValidationError("train_bagging: n_members must be >= 1");
  if (X.size() != y.size()) throw ValidationError("train_bagging: X and y sizes differ");
  if (X.size() == 0) throw ValidationError("train_bagging: empty training set");

  std::vector<TrainedModel> members;
  members.reserve(n_members);
  for (int m = 0; m < n_members; ++m) {
    const std::uint64_t member_seed = Rng::derive(seed, static_cast<std::uint64_t>(m));
    Rng rng(member_seed);
    FeatureMatrix bx;
    bx.dim = X.dim;
    bx.rows.reserve(X.size());
    std::vector<Label> by;
    by.reserve(X.size());
    for (std::size_t i = 0; i < X.size(); ++i) {
      const std::size_t pick = rng.uniform(X.size());
      bx.rows.push_back(X.rows[pick]);
      by.push_back(y[pick]);
    }
    members.push_back(train_model(base, bx, by, Rng::derive(member_seed, 1)));
  }
  return std::make_unique<BaggingModel>(X.dim, std::move(members));
}

AdaBoostModel::AdaBoostModel(std::uint32_t dim, std::vector<TrainedModel> members,
                             std::vector<double> member_weights)
    : dim_(dim), members_(std::move(members)), member_weights_(std::move(member_weights)) {
  if (members_.empty()) throw ValidationError("adaboost model: no members");
  if (members_.size() != member_weights_.size())
    throw ValidationError("adaboost model: member and weight counts differ");
}

Prediction AdaBoostModel::predict(const SparseVector& x) const {
  check_dim(x);
  // Weighted vote over member labels, normalized to a distribution.
  std::array<double, 2> votes{0.0, 0.0};
  for (std::size_t m = 0; m < members_.size(); ++m)
    votes[static_cast<int>(members_[m]->predict(x).label)] += member_weights_[m];
  const double total = votes[0] + votes[1];
  if (total <= 0.0) return make_prediction({0.5, 0.5}, true);
  return make_prediction({votes[0] / total, votes[1] / total}, true);
}

bool AdaBoostModel::converged() const {
  for (const auto& m : members_)
    if (!m->converged()) return false;
  return true;
}

json AdaBoostModel::to_json() const {
  json j;
  j["kind"] = to_string(LearnerKind::adaboost_m1);
  j["dim"] = dim_;
  json members = json::array();
  for (const auto& m : members_) members.push_back(m->to_json());
  j["members"] = std::move(members);
  j["member_weights"] = member_weights_;
  return j;
}

TrainedModel AdaBoostModel::from_json(const json& j) {
  std::vector<TrainedModel> members;
  for (const auto& m : j.at("members")) members.push_back(model_from_json(m));
  return std::make_unique<AdaBoostModel>(j.at("dim").get<std::uint32_t>(), std::move(members),
                                         j.at("member_weights").get<std::vector<double>>());
}

TrainedModel train_adaboost_m1(const ModelSpec& base, const FeatureMatrix& X,
                               const std::vector<Label>& y, int n_rounds, std::uint64_t seed,
                               AdaBoostTrace* trace) {
  if (n_rounds < 1) throw ValidationError("train_adaboost_m1: n_rounds must be >= 1");
  if (X.size() != y.size()) throw ValidationError("train_adaboost_m1: X and y sizes differ");
  if (X.size() == 0) throw ValidationError("train_adaboost_m1: empty training set");

  const std::size_t n = X.size();
  std::vector<double> w(n, 1.0 / static_cast<double>(n));
  std::vector<TrainedModel> members;
  std::vector<double> member_weights;

  // The boosting distribution stays normalized to sum 1; the base learner
  // sees it rescaled to total mass n so that weight-sensitive hyperparameters
  // (leaf minimums, smoothing) keep their unit-instance meaning.
  std::vector<double> scaled(n);
  for (int round = 0; round < n_rounds; ++round) {
    for (std::size_t i = 0; i < n; ++i) scaled[i] = w[i] * static_cast<double>(n);
    TrainedModel model = train_model_weighted(base, X, y, scaled,
                                              Rng::derive(seed, static_cast<std::uint64_t>(round)));
    std::vector<bool> wrong(n);
    double eps = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      wrong[i] = model->predict(X.rows[i]).label != y[i];
      if (wrong[i]) eps += w[i];
    }

    if (eps >= 0.5) {
      // The weak-learning assumption failed; keep a degenerate one-member
      // ensemble when this happens on the very first round.
      if (members.empty()) {
        members.push_back(std::move(model));
        member_weights.push_back(1.0);
        if (trace) {
          trace->round_errors.push_back(eps);
          trace->round_weights.push_back(1.0);
          trace->weight_sums.push_back(1.0);
        }
      }
      break;
    }

    const double eps_clamped = std::max(eps, 1e-12);
    const double beta = std::log((1.0 - eps_clamped) / eps_clamped);
    members.push_back(std::move(model));
    member_weights.push_back(beta);

    if (eps == 0.0) {
      if (trace) {
        trace->round_errors.push_back(eps);
        trace->round_weights.push_back(beta);
        double sum = 0.0;
        for (double wi : w) sum += wi;
        trace->weight_sums.push_back(sum);
      }
      break;
    }

    // Scale up misclassified instances, then renormalize to sum 1.
    const double up = (1.0 - eps) / eps;
    double sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      if (wrong[i]) w[i] *= up;
      sum += w[i];
    }
    for (double& wi : w) wi /= sum;
    if (trace) {
      trace->round_errors.push_back(eps);
      trace->round_weights.push_back(beta);
      double check = 0.0;
      for (double wi : w) check += wi;
      trace->weight_sums.push_back(check);
    }
  }

  return std::make_unique<AdaBoostModel>(X.dim, std::move(members), std::move(member_weights));
}

}  // namespace misinfo
