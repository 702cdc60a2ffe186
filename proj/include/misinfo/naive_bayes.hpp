#pragma once

#include <array>
#include <vector>

#include "misinfo/model.hpp"

namespace misinfo {

// Multinomial naive Bayes over sparse feature values, with additive
// smoothing baked into the count tables. The same table machinery backs both
// the generative (MNB) and the discriminative (DMNB) trainer.
class NaiveBayesModel final : public Model {
 public:
  NaiveBayesModel(LearnerKind kind, std::uint32_t dim, double alpha,
                  std::array<std::vector<double>, 2> feature_counts,
                  std::array<double, 2> mass, std::array<double, 2> prior_counts);

  LearnerKind kind() const override { return kind_; }
  std::uint32_t dim() const override { return dim_; }
  Prediction predict(const SparseVector& x) const override;
  nlohmann::json to_json() const override;

  // Log posterior up to the per-instance normalizer; exposed for tests.
  std::array<double, 2> log_joint(const SparseVector& x) const;

  static TrainedModel from_json(const nlohmann::json& j);

 private:
  LearnerKind kind_;
  std::uint32_t dim_;
  double alpha_;
  std::array<std::vector<double>, 2> feature_counts_;  // includes smoothing mass
  std::array<double, 2> mass_;                         // per-label total count
  std::array<double, 2> prior_counts_;
};

TrainedModel train_mnb(const FeatureMatrix& X, const std::vector<Label>& y, double alpha,
                       const std::vector<double>* weights = nullptr);

// Discriminative frequency estimate: per pass, instances are visited in one
// seeded shuffle order and the true label's tables gain (1 - p̂) * x, where
// p̂ is the current model's probability of the true label.
TrainedModel train_dmnb(const FeatureMatrix& X, const std::vector<Label>& y, double alpha,
                        int passes, std::uint64_t seed,
                        const std::vector<double>* weights = nullptr);

}  // namespace misinfo
