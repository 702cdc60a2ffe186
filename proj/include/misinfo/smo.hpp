#pragma once

#include <memory>
#include <vector>

#include "misinfo/logistic.hpp"
#include "misinfo/model.hpp"

namespace misinfo {

// Kernel SVM fit by sequential minimal optimization. Supports linear,
// polynomial and sigmoid kernels; sigmoid Gram matrices can be indefinite, so
// the solver caps work at 100 * n successful multiplier updates and reports
// convergence instead of looping. Optional ridge-logistic calibration maps
// decision values to probabilities.
class SmoModel final : public Model {
 public:
  SmoModel(std::uint32_t dim, KernelConfig kernel, std::vector<SparseVector> support_vectors,
           std::vector<double> sv_coef, double bias, bool converged,
           std::vector<double> calibrator_weights);

  LearnerKind kind() const override { return LearnerKind::smo_kernel; }
  std::uint32_t dim() const override { return dim_; }
  Prediction predict(const SparseVector& x) const override;
  nlohmann::json to_json() const override;
  bool converged() const override { return converged_; }

  // f(x) = sum_i alpha_i y_i K(x_i, x) - b
  double decision_value(const SparseVector& x) const;
  std::size_t n_support() const { return support_vectors_.size(); }
  bool calibrated() const { return calibrator_weights_.size() == 2; }

  static TrainedModel from_json(const nlohmann::json& j);

 private:
  std::uint32_t dim_;
  KernelConfig kernel_;
  std::vector<SparseVector> support_vectors_;
  std::vector<double> sv_coef_;  // alpha_i * y_i
  double bias_ = 0.0;
  bool converged_ = true;
  std::vector<double> calibrator_weights_;  // {w, b} on decision values, empty if uncalibrated
};

struct SmoDiagnostics {
  std::vector<double> alphas;   // in training order
  double bias = 0.0;
  double dual_objective = 0.0;  // sum(alpha) - 1/2 sum alpha_i alpha_j y_i y_j K_ij
  double alpha_y_sum = 0.0;     // drift of the equality constraint
  bool converged = true;
};

TrainedModel train_smo(const FeatureMatrix& X, const std::vector<Label>& y,
                       const KernelConfig& kernel, double C, double tol, bool calibrate,
                       SmoDiagnostics* diag = nullptr);

}  // namespace misinfo
