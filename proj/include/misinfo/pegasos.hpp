#pragma once

#include <vector>

#include "misinfo/model.hpp"

namespace misinfo {

// Pegasos: stochastic subgradient descent on
//   lambda/2 * ||w||^2 + mean_i loss(y_i, w.x_i)
// with step size 1/(lambda*t), one seeded shuffle per epoch, and the bias as
// an always-on trailing feature.
class PegasosModel final : public Model {
 public:
  PegasosModel(std::uint32_t dim, std::vector<double> weights, PegasosLoss loss, double lambda);

  LearnerKind kind() const override { return LearnerKind::pegasos; }
  std::uint32_t dim() const override { return dim_; }
  Prediction predict(const SparseVector& x) const override;
  nlohmann::json to_json() const override;

  double decision_value(const SparseVector& x) const;
  const std::vector<double>& weights() const { return weights_; }

  static TrainedModel from_json(const nlohmann::json& j);

 private:
  std::uint32_t dim_;
  std::vector<double> weights_;  // dim + 1
  PegasosLoss loss_;
  double lambda_;
};

TrainedModel train_pegasos(const FeatureMatrix& X, const std::vector<Label>& y,
                           PegasosLoss loss, double lambda, int epochs, std::uint64_t seed);

// lambda/2 ||w||^2 + mean loss; used by the objective-trend property test.
double pegasos_objective(const FeatureMatrix& X, const std::vector<Label>& y, PegasosLoss loss,
                         double lambda, const std::vector<double>& weights);

}  // namespace misinfo
