#pragma once

#include <memory>
#include <vector>

#include "misinfo/model.hpp"

namespace misinfo {

// Bagging: n_members bootstrap resamples of size n, base learner trained on
// each, prediction by averaging member scores.
class BaggingModel final : public Model {
 public:
  BaggingModel(std::uint32_t dim, std::vector<TrainedModel> members);

  LearnerKind kind() const override { return LearnerKind::bagging; }
  std::uint32_t dim() const override { return dim_; }
  Prediction predict(const SparseVector& x) const override;
  nlohmann::json to_json() const override;
  bool converged() const override;

  std::size_t n_members() const { return members_.size(); }

  static TrainedModel from_json(const nlohmann::json& j);

 private:
  std::uint32_t dim_;
  std::vector<TrainedModel> members_;
};

TrainedModel train_bagging(const ModelSpec& base, const FeatureMatrix& X,
                           const std::vector<Label>& y, int n_members, std::uint64_t seed);

// AdaBoost.M1 with weighted error eps, member weight log((1-eps)/eps),
// exponential reweighting, early halt on eps >= 0.5 or eps == 0.
class AdaBoostModel final : public Model {
 public:
  AdaBoostModel(std::uint32_t dim, std::vector<TrainedModel> members,
                std::vector<double> member_weights);

  LearnerKind kind() const override { return LearnerKind::adaboost_m1; }
  std::uint32_t dim() const override { return dim_; }
  Prediction predict(const SparseVector& x) const override;
  nlohmann::json to_json() const override;
  bool converged() const override;

  std::size_t n_members() const { return members_.size(); }
  const std::vector<double>& member_weights() const { return member_weights_; }

  static TrainedModel from_json(const nlohmann::json& j);

 private:
  std::uint32_t dim_;
  std::vector<TrainedModel> members_;
  std::vector<double> member_weights_;
};

struct AdaBoostTrace {
  std::vector<double> round_errors;
  std::vector<double> round_weights;
  // Instance-weight sum after each round's renormalization.
  std::vector<double> weight_sums;
};

TrainedModel train_adaboost_m1(const ModelSpec& base, const FeatureMatrix& X,
                               const std::vector<Label>& y, int n_rounds, std::uint64_t seed,
                               AdaBoostTrace* trace = nullptr);

}  // namespace misinfo
