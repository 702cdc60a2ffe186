#include "misinfo/naive_bayes.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "misinfo/error.hpp"
#include "misinfo/rng.hpp"

namespace misinfo {

using nlohmann::json;

NaiveBayesModel::NaiveBayesModel(LearnerKind kind, std::uint32_t dim, double alpha,
                                 std::array<std::vector<double>, 2> feature_counts,
                                 std::array<double, 2> mass, std::array<double, 2> prior_counts)
    : kind_(kind),
      dim_(dim),
      alpha_(alpha),
      feature_counts_(std::move(feature_counts)),
      mass_(mass),
      prior_counts_(prior_counts) {}

std::array<double, 2> NaiveBayesModel::log_joint(const SparseVector& x) const {
  check_dim(x);
  const double prior_total = prior_counts_[0] + prior_counts_[1];
  std::array<double, 2> lj{};
  for (int c = 0; c < 2; ++c) {
    lj[c] = std::log(prior_counts_[c] / prior_total);
    for (const auto& [f, v] : x.entries)
      lj[c] += v * std::log(feature_counts_[c][f] / mass_[c]);
  }
  return lj;
}

Prediction NaiveBayesModel::predict(const SparseVector& x) const {
  const auto lj = log_joint(x);
  const double m = std::max(lj[0], lj[1]);
  const double e0 = std::exp(lj[0] - m);
  const double e1 = std::exp(lj[1] - m);
  return make_prediction({e0 / (e0 + e1), e1 / (e0 + e1)}, true);
}

json NaiveBayesModel::to_json() const {
  json j;
  j["kind"] = to_string(kind_);
  j["dim"] = dim_;
  j["alpha"] = alpha_;
  j["feature_counts"] = json::array({feature_counts_[0], feature_counts_[1]});
  j["mass"] = json::array({mass_[0], mass_[1]});
  j["prior_counts"] = json::array({prior_counts_[0], prior_counts_[1]});
  return j;
}

TrainedModel NaiveBayesModel::from_json(const json& j) {
  const std::string kind_str = j.at("kind").get<std::string>();
  const auto kind = learner_kind_from_string(kind_str);
  if (!kind || (*kind != LearnerKind::mnb && *kind != LearnerKind::dmnb))
    throw ParseError("naive bayes model: unexpected kind \"" + kind_str + "\"");
  const auto dim = j.at("dim").get<std::uint32_t>();
  std::array<std::vector<double>, 2> counts{
      j.at("feature_counts").at(0).get<std::vector<double>>(),
      j.at("feature_counts").at(1).get<std::vector<double>>()};
  if (counts[0].size() != dim || counts[1].size() != dim)
    throw ParseError("naive bayes model: count table size does not match dim");
  std::array<double, 2> mass{j.at("mass").at(0).get<double>(), j.at("mass").at(1).get<double>()};
  std::array<double, 2> priors{j.at("prior_counts").at(0).get<double>(),
                               j.at("prior_counts").at(1).get<double>()};
  return std::make_unique<NaiveBayesModel>(*kind, dim, j.at("alpha").get<double>(),
                                           std::move(counts), mass, priors);
}

namespace {

void require_both_labels(const std::vector<Label>& y) {
  bool seen[2] = {false, false};
  for (Label l : y) seen[static_cast<int>(l)] = true;
  for (int c = 0; c < 2; ++c)
    if (!seen[c])
      throw ValidationError(std::string("training data lacks label \"") +
                            to_string(static_cast<Label>(c)) + "\"");
}

}  // namespace

TrainedModel train_mnb(const FeatureMatrix& X, const std::vector<Label>& y, double alpha,
                       const std::vector<double>* weights) {
  if (alpha <= 0.0) throw ValidationError("train_mnb: alpha must be > 0");
  if (X.size() != y.size()) throw ValidationError("train_mnb: X and y sizes differ");
  if (X.size() == 0) throw ValidationError("train_mnb: empty training set");
  require_both_labels(y);

  std::array<std::vector<double>, 2> counts{std::vector<double>(X.dim, alpha),
                                            std::vector<double>(X.dim, alpha)};
  std::array<double, 2> mass{alpha * X.dim, alpha * X.dim};
  std::array<double, 2> priors{0.0, 0.0};
  for (std::size_t i = 0; i < X.size(); ++i) {
    const double w = weights ? (*weights)[i] : 1.0;
    const int c = static_cast<int>(y[i]);
    priors[c] += w;
    for (const auto& [f, v] : X.rows[i].entries) {
      counts[c][f] += w * v;
      mass[c] += w * v;
    }
  }
  if (priors[0] <= 0.0 || priors[1] <= 0.0)
    throw ValidationError("train_mnb: a label carries no training weight");
  return std::make_unique<NaiveBayesModel>(LearnerKind::mnb, X.dim, alpha, std::move(counts),
                                           mass, priors);
}

TrainedModel train_dmnb(const FeatureMatrix& X, const std::vector<Label>& y, double alpha,
                        int passes, std::uint64_t seed, const std::vector<double>* weights) {
  if (alpha <= 0.0) throw ValidationError("train_dmnb: alpha must be > 0");
  if (passes < 0) throw ValidationError("train_dmnb: passes must be >= 0");
  if (X.size() != y.size()) throw ValidationError("train_dmnb: X and y sizes differ");
  if (X.size() == 0) throw ValidationError("train_dmnb: empty training set");
  require_both_labels(y);

  // Tables start with smoothing mass only; the prior counts likewise start at
  // one pseudo-observation per label so that zero passes yield uniform tables.
  std::array<std::vector<double>, 2> counts{std::vector<double>(X.dim, alpha),
                                            std::vector<double>(X.dim, alpha)};
  std::array<double, 2> mass{alpha * X.dim, alpha * X.dim};
  std::array<double, 2> priors{1.0, 1.0};

  // One seeded shuffle fixes the visit order for every pass.
  std::vector<std::size_t> order(X.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  Rng rng(seed);
  rng.shuffle(order);

  for (int pass = 0; pass < passes; ++pass) {
    for (std::size_t idx : order) {
      const SparseVector& x = X.rows[idx];
      const int c = static_cast<int>(y[idx]);
      // Current model's probability of the true label.
      const double prior_total = priors[0] + priors[1];
      double lj[2];
      for (int l = 0; l < 2; ++l) {
        lj[l] = std::log(priors[l] / prior_total);
        for (const auto& [f, v] : x.entries) lj[l] += v * std::log(counts[l][f] / mass[l]);
      }
      const double m = std::max(lj[0], lj[1]);
      const double e0 = std::exp(lj[0] - m);
      const double e1 = std::exp(lj[1] - m);
      const double p_hat = (c == 0 ? e0 : e1) / (e0 + e1);
      const double w = (weights ? (*weights)[idx] : 1.0) * (1.0 - p_hat);
      priors[c] += w;
      for (const auto& [f, v] : x.entries) {
        counts[c][f] += w * v;
        mass[c] += w * v;
      }
    }
  }
  return std::make_unique<NaiveBayesModel>(LearnerKind::dmnb, X.dim, alpha, std::move(counts),
                                           mass, priors);
}

}  // namespace misinfo
