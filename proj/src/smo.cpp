#include "misinfo/smo.hpp"

#include <cmath>

#include "misinfo/error.hpp"

namespace misinfo {

using nlohmann::json;

namespace {

double sign_of(Label l) { return l == Label::misinformation ? 1.0 : -1.0; }

double sigmoid(double z) {
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

// Platt-style SMO over a fully cached Gram matrix. The error cache covers
// every instance and is refreshed after each successful step, which keeps the
// bookkeeping simple at O(n) per step.
class SmoSolver {
 public:
  SmoSolver(const FeatureMatrix& X, const std::vector<double>& y, double C, double tol)
      : X_(X), y_(y), C_(C), tol_(tol), n_(X.size()), alpha_(n_, 0.0), error_(n_) {
    gram_.resize(n_ * n_);
  }

  void fill_gram(const KernelConfig& kernel) {
    for (std::size_t i = 0; i < n_; ++i)
      for (std::size_t j = i; j < n_; ++j) {
        const double k = kernel_eval(kernel, X_.rows[i], X_.rows[j]);
        gram_[i * n_ + j] = k;
        gram_[j * n_ + i] = k;
      }
  }

  // Returns true when KKT conditions were met within the step budget.
  bool solve(std::size_t max_steps) {
    for (std::size_t i = 0; i < n_; ++i) error_[i] = -y_[i];  // f = 0 initially
    max_steps_ = max_steps;
    steps_ = 0;
    bool examine_all = true;
    std::size_t num_changed = 0;
    while ((num_changed > 0 || examine_all) && steps_ < max_steps_) {
      num_changed = 0;
      for (std::size_t i = 0; i < n_ && steps_ < max_steps_; ++i)
        if (examine_all || (alpha_[i] > 0.0 && alpha_[i] < C_)) num_changed += examine(i);
      if (examine_all)
        examine_all = false;
      else if (num_changed == 0)
        examine_all = true;
    }
    return steps_ < max_steps_;
  }

  const std::vector<double>& alphas() const { return alpha_; }
  double bias() const { return b_; }
  double gram(std::size_t i, std::size_t j) const { return gram_[i * n_ + j]; }

 private:
  std::size_t examine(std::size_t i2) {
    const double y2 = y_[i2];
    const double a2 = alpha_[i2];
    const double e2 = error_[i2];
    const double r2 = e2 * y2;
    if (!((r2 < -tol_ && a2 < C_) || (r2 > tol_ && a2 > 0.0))) return 0;

    // First heuristic: maximize |E1 - E2| over non-bound multipliers.
    std::size_t best = n_;
    double best_gap = 0.0;
    for (std::size_t i = 0; i < n_; ++i) {
      if (i == i2 || alpha_[i] <= 0.0 || alpha_[i] >= C_) continue;
      const double gap = std::fabs(error_[i] - e2);
      if (gap > best_gap) {
        best_gap = gap;
        best = i;
      }
    }
    if (best < n_ && take_step(best, i2)) return 1;

    // Then every non-bound multiplier, then everything, from a deterministic
    // starting offset.
    for (std::size_t k = 1; k <= n_; ++k) {
      const std::size_t i1 = (i2 + k) % n_;
      if (i1 == i2 || alpha_[i1] <= 0.0 || alpha_[i1] >= C_) continue;
      if (take_step(i1, i2)) return 1;
    }
    for (std::size_t k = 1; k <= n_; ++k) {
      const std::size_t i1 = (i2 + k) % n_;
      if (i1 == i2) continue;
      if (take_step(i1, i2)) return 1;
    }
    return 0;
  }

  bool take_step(std::size_t i1, std::size_t i2) {
    if (i1 == i2) return false;
    const double a1_old = alpha_[i1], a2_old = alpha_[i2];
    const double y1 = y_[i1], y2 = y_[i2];
    const double e1 = error_[i1], e2 = error_[i2];
    const double s = y1 * y2;

    double lo, hi;
    if (s < 0.0) {
      lo = std::max(0.0, a2_old - a1_old);
      hi = std::min(C_, C_ + a2_old - a1_old);
    } else {
      lo = std::max(0.0, a1_old + a2_old - C_);
      hi = std::min(C_, a1_old + a2_old);
    }
    if (lo >= hi) return false;

    const double k11 = gram(i1, i1), k12 = gram(i1, i2), k22 = gram(i2, i2);
    const double eta = k11 + k22 - 2.0 * k12;
    double a2;
    if (eta > 0.0) {
      a2 = a2_old + y2 * (e1 - e2) / eta;
      a2 = std::min(hi, std::max(lo, a2));
    } else {
      // Indefinite direction (possible with sigmoid kernels): evaluate the
      // objective at both clip ends and move to the smaller one.
      const double f1 = y1 * (e1 + b_) - a1_old * k11 - s * a2_old * k12;
      const double f2 = y2 * (e2 + b_) - s * a1_old * k12 - a2_old * k22;
      const double l1 = a1_old + s * (a2_old - lo);
      const double h1 = a1_old + s * (a2_old - hi);
      const double lo_obj = l1 * f1 + lo * f2 + 0.5 * l1 * l1 * k11 + 0.5 * lo * lo * k22 +
                            s * lo * l1 * k12;
      const double hi_obj = h1 * f1 + hi * f2 + 0.5 * h1 * h1 * k11 + 0.5 * hi * hi * k22 +
                            s * hi * h1 * k12;
      constexpr double kObjEps = 1e-12;
      if (lo_obj < hi_obj - kObjEps)
        a2 = lo;
      else if (lo_obj > hi_obj + kObjEps)
        a2 = hi;
      else
        a2 = a2_old;
    }
    constexpr double kStepEps = 1e-8;
    if (std::fabs(a2 - a2_old) < kStepEps * (a2 + a2_old + kStepEps)) return false;
    const double a1 = a1_old + s * (a2_old - a2);

    // Threshold update (Platt's b1/b2 rule).
    const double d1 = y1 * (a1 - a1_old);
    const double d2 = y2 * (a2 - a2_old);
    const double b_old = b_;
    const double b1 = e1 + d1 * k11 + d2 * k12 + b_old;
    const double b2 = e2 + d1 * k12 + d2 * k22 + b_old;
    if (a1 > 0.0 && a1 < C_)
      b_ = b1;
    else if (a2 > 0.0 && a2 < C_)
      b_ = b2;
    else
      b_ = 0.5 * (b1 + b2);

    alpha_[i1] = a1;
    alpha_[i2] = a2;
    for (std::size_t i = 0; i < n_; ++i)
      error_[i] += d1 * gram(i1, i) + d2 * gram(i2, i) + b_old - b_;
    ++steps_;
    return true;
  }

  const FeatureMatrix& X_;
  const std::vector<double>& y_;
  double C_;
  double tol_;
  std::size_t n_;
  std::vector<double> alpha_;
  std::vector<double> error_;  // E_i = f(x_i) - y_i
  std::vector<double> gram_;
  double b_ = 0.0;
  std::size_t max_steps_ = 0;
  std::size_t steps_ = 0;
};

}  // namespace

SmoModel::SmoModel(std::uint32_t dim, KernelConfig kernel,
                   std::vector<SparseVector> support_vectors, std::vector<double> sv_coef,
                   double bias, bool converged, std::vector<double> calibrator_weights)
    : dim_(dim),
      kernel_(kernel),
      support_vectors_(std::move(support_vectors)),
      sv_coef_(std::move(sv_coef)),
      bias_(bias),
      converged_(converged),
      calibrator_weights_(std::move(calibrator_weights)) {
  if (support_vectors_.size() != sv_coef_.size())
    throw ValidationError("smo model: support vector and coefficient counts differ");
  if (!calibrator_weights_.empty() && calibrator_weights_.size() != 2)
    throw ValidationError("smo model: calibrator must have exactly two weights");
}

double SmoModel::decision_value(const SparseVector& x) const {
  check_dim(x);
  double u = -bias_;
  for (std::size_t i = 0; i < support_vectors_.size(); ++i)
    u += sv_coef_[i] * kernel_eval(kernel_, support_vectors_[i], x);
  return u;
}

Prediction SmoModel::predict(const SparseVector& x) const {
  const double u = decision_value(x);
  if (calibrated()) {
    const double p = sigmoid(calibrator_weights_[0] * u + calibrator_weights_[1]);
    return make_prediction({p, 1.0 - p}, true);
  }
  return make_prediction({u, -u}, false);
}

json SmoModel::to_json() const {
  json j;
  j["kind"] = to_string(LearnerKind::smo_kernel);
  j["dim"] = dim_;
  j["kernel"] = kernel_to_json(kernel_);
  json svs = json::array();
  for (const auto& sv : support_vectors_) {
    json entries = json::array();
    for (const auto& [f, v] : sv.entries) entries.push_back(json::array({f, v}));
    svs.push_back(std::move(entries));
  }
  j["support_vectors"] = std::move(svs);
  j["sv_coef"] = sv_coef_;
  j["bias"] = bias_;
  j["converged"] = converged_;
  j["calibrator_weights"] = calibrator_weights_;
  return j;
}

TrainedModel SmoModel::from_json(const json& j) {
  const auto dim = j.at("dim").get<std::uint32_t>();
  std::vector<SparseVector> svs;
  for (const auto& entries : j.at("support_vectors")) {
    SparseVector sv;
    sv.dim = dim;
    for (const auto& e : entries)
      sv.entries.emplace_back(e.at(0).get<std::uint32_t>(), e.at(1).get<double>());
    svs.push_back(std::move(sv));
  }
  return std::make_unique<SmoModel>(
      dim, kernel_from_json(j.at("kernel")), std::move(svs),
      j.at("sv_coef").get<std::vector<double>>(), j.at("bias").get<double>(),
      j.at("converged").get<bool>(), j.at("calibrator_weights").get<std::vector<double>>());
}

TrainedModel train_smo(const FeatureMatrix& X, const std::vector<Label>& y,
                       const KernelConfig& kernel, double C, double tol, bool calibrate,
                       SmoDiagnostics* diag) {
  if (C <= 0.0) throw ValidationError("train_smo: C must be > 0");
  if (tol <= 0.0) throw ValidationError("train_smo: tol must be > 0");
  kernel.validate();
  if (X.size() != y.size()) throw ValidationError("train_smo: X and y sizes differ");
  if (X.size() == 0) throw ValidationError("train_smo: empty training set");

  std::vector<double> ys(X.size());
  for (std::size_t i = 0; i < y.size(); ++i) ys[i] = sign_of(y[i]);

  SmoSolver solver(X, ys, C, tol);
  solver.fill_gram(kernel);
  const bool converged = solver.solve(100 * X.size());
  const std::vector<double>& alpha = solver.alphas();
  const double bias = solver.bias();

  if (diag) {
    diag->alphas = alpha;
    diag->bias = bias;
    diag->converged = converged;
    diag->alpha_y_sum = 0.0;
    double obj = 0.0;
    for (std::size_t i = 0; i < alpha.size(); ++i) {
      diag->alpha_y_sum += alpha[i] * ys[i];
      obj += alpha[i];
      if (alpha[i] == 0.0) continue;
      for (std::size_t j = 0; j < alpha.size(); ++j)
        obj -= 0.5 * alpha[i] * alpha[j] * ys[i] * ys[j] * solver.gram(i, j);
    }
    diag->dual_objective = obj;
  }

  std::vector<SparseVector> svs;
  std::vector<double> coef;
  for (std::size_t i = 0; i < alpha.size(); ++i) {
    if (alpha[i] <= 1e-12) continue;
    svs.push_back(X.rows[i]);
    coef.push_back(alpha[i] * ys[i]);
  }

  std::vector<double> calib;
  if (calibrate) {
    // Ridge-logistic fit on the training decision values.
    SmoModel raw(X.dim, kernel, svs, coef, bias, converged, {});
    FeatureMatrix D;
    D.dim = 1;
    D.rows.reserve(X.size());
    for (const auto& row : X.rows) {
      SparseVector v;
      v.dim = 1;
      v.entries.emplace_back(0u, raw.decision_value(row));
      D.rows.push_back(std::move(v));
    }
    TrainedModel lr = train_logistic_ridge(D, y, 1.0, 300, 1e-6);
    calib = static_cast<const LogisticModel*>(lr.get())->weights();
  }

  return std::make_unique<SmoModel>(X.dim, kernel, std::move(svs), std::move(coef), bias,
                                    converged, std::move(calib));
}

}  // namespace misinfo
