#pragma once

#include <vector>

#include "misinfo/model.hpp"

namespace misinfo {

// L2-regularized binary logistic regression minimizing
//   lambda/2 * ||w||^2 + sum_i log(1 + exp(-y_i w.x_i))
// with y in {+1,-1} (+1 = label index 0) and the bias folded in as an
// always-on trailing feature. Optimized with L-BFGS; deterministic.
class LogisticModel final : public Model {
 public:
  LogisticModel(std::uint32_t dim, std::vector<double> weights, double lambda, bool converged);

  LearnerKind kind() const override { return LearnerKind::logistic_ridge; }
  std::uint32_t dim() const override { return dim_; }
  Prediction predict(const SparseVector& x) const override;
  nlohmann::json to_json() const override;
  bool converged() const override { return converged_; }

  // Margin w.x + b; exposed for calibration and tests.
  double decision_value(const SparseVector& x) const;
  const std::vector<double>& weights() const { return weights_; }

  static TrainedModel from_json(const nlohmann::json& j);

 private:
  std::uint32_t dim_;
  std::vector<double> weights_;  // dim + 1, last entry is the bias feature
  double lambda_;
  bool converged_;
};

TrainedModel train_logistic_ridge(const FeatureMatrix& X, const std::vector<Label>& y,
                                  double lambda, int max_iter, double grad_tol);

// Objective value at the given weight vector (dim+1 entries); test oracle hook.
double logistic_ridge_objective(const FeatureMatrix& X, const std::vector<Label>& y,
                                double lambda, const std::vector<double>& weights);

}  // namespace misinfo
