#include "misinfo/logistic.hpp"

#include <cmath>
#include <deque>

#include "misinfo/error.hpp"

namespace misinfo {

using nlohmann::json;

namespace {

// log(1 + exp(-z)) without overflow for large |z|.
double log1p_exp_neg(double z) {
  if (z > 0.0) return std::log1p(std::exp(-z));
  return -z + std::log1p(std::exp(z));
}

double sigmoid(double z) {
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

// +1 for label index 0 (the positive class), -1 otherwise.
double sign_of(Label l) { return l == Label::misinformation ? 1.0 : -1.0; }

double margin(const std::vector<double>& w, const SparseVector& x) {
  double m = w.back();  // always-on bias feature
  for (const auto& [f, v] : x.entries) m += w[f] * v;
  return m;
}

struct Objective {
  const FeatureMatrix& X;
  const std::vector<Label>& y;
  double lambda;

  // Returns f(w) and writes the gradient.
  double eval(const std::vector<double>& w, std::vector<double>* grad) const {
    const std::size_t n = w.size();
    double f = 0.0;
    if (grad) {
      grad->assign(n, 0.0);
      for (std::size_t j = 0; j < n; ++j) (*grad)[j] = lambda * w[j];
    }
    for (std::size_t j = 0; j < n; ++j) f += 0.5 * lambda * w[j] * w[j];
    for (std::size_t i = 0; i < X.size(); ++i) {
      const double s = sign_of(y[i]);
      const double m = margin(w, X.rows[i]);
      f += log1p_exp_neg(s * m);
      if (grad) {
        const double coeff = -s * sigmoid(-s * m);
        for (const auto& [fidx, v] : X.rows[i].entries) (*grad)[fidx] += coeff * v;
        (*grad)[n - 1] += coeff;
      }
    }
    return f;
  }
};

double sup_norm(const std::vector<double>& v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::fabs(x));
  return m;
}

}  // namespace

LogisticModel::LogisticModel(std::uint32_t dim, std::vector<double> weights, double lambda,
                             bool converged)
    : dim_(dim), weights_(std::move(weights)), lambda_(lambda), converged_(converged) {
  if (weights_.size() != static_cast<std::size_t>(dim_) + 1)
    throw ValidationError("logistic model: weight vector must have dim + 1 entries");
}

double LogisticModel::decision_value(const SparseVector& x) const {
  check_dim(x);
  return margin(weights_, x);
}

Prediction LogisticModel::predict(const SparseVector& x) const {
  const double p = sigmoid(decision_value(x));
  return make_prediction({p, 1.0 - p}, true);
}

json LogisticModel::to_json() const {
  json j;
  j["kind"] = to_string(LearnerKind::logistic_ridge);
  j["dim"] = dim_;
  j["lambda"] = lambda_;
  j["converged"] = converged_;
  j["weights"] = weights_;
  return j;
}

TrainedModel LogisticModel::from_json(const json& j) {
  return std::make_unique<LogisticModel>(
      j.at("dim").get<std::uint32_t>(), j.at("weights").get<std::vector<double>>(),
      j.at("lambda").get<double>(), j.at("converged").get<bool>());
}

double logistic_ridge_objective(const FeatureMatrix& X, const std::vector<Label>& y,
                                double lambda, const std::vector<double>& weights) {
  if (weights.size() != static_cast<std::size_t>(X.dim) + 1)
    throw ValidationError("logistic_ridge_objective: weights must have dim + 1 entries");
  return Objective{X, y, lambda}.eval(weights, nullptr);
}

TrainedModel train_logistic_ridge(const FeatureMatrix& X, const std::vector<Label>& y,
                                  double lambda, int max_iter, double grad_tol) {
  if (lambda <= 0.0) throw ValidationError("train_logistic_ridge: lambda must be > 0");
  if (max_iter < 1) throw ValidationError("train_logistic_ridge: max_iter must be >= 1");
  if (X.size() != y.size()) throw ValidationError("train_logistic_ridge: X and y sizes differ");
  if (X.size() == 0) throw ValidationError("train_logistic_ridge: empty training set");

  const std::size_t n = static_cast<std::size_t>(X.dim) + 1;
  const Objective obj{X, y, lambda};
  std::vector<double> w(n, 0.0), g;
  double f = obj.eval(w, &g);

  // L-BFGS with a short memory and Armijo backtracking.
  constexpr std::size_t kMemory = 10;
  constexpr double kArmijo = 1e-4;
  std::deque<std::pair<std::vector<double>, std::vector<double>>> pairs;  // (s, y)
  std::deque<double> rhos;

  bool converged = sup_norm(g) <= grad_tol;
  for (int iter = 0; iter < max_iter && !converged; ++iter) {
    // Two-loop recursion for the search direction d = -H g.
    std::vector<double> d = g;
    std::vector<double> alpha(pairs.size());
    for (std::size_t k = pairs.size(); k-- > 0;) {
      const auto& [s, yk] = pairs[k];
      double sd = 0.0;
      for (std::size_t j = 0; j < n; ++j) sd += s[j] * d[j];
      alpha[k] = rhos[k] * sd;
      for (std::size_t j = 0; j < n; ++j) d[j] -= alpha[k] * yk[j];
    }
    double h0 = 1.0;
    if (!pairs.empty()) {
      const auto& [s, yk] = pairs.back();
      double sy = 0.0, yy = 0.0;
      for (std::size_t j = 0; j < n; ++j) {
        sy += s[j] * yk[j];
        yy += yk[j] * yk[j];
      }
      if (yy > 0.0) h0 = sy / yy;
    }
    for (std::size_t j = 0; j < n; ++j) d[j] *= h0;
    for (std::size_t k = 0; k < pairs.size(); ++k) {
      const auto& [s, yk] = pairs[k];
      double yd = 0.0;
      for (std::size_t j = 0; j < n; ++j) yd += yk[j] * d[j];
      const double beta = rhos[k] * yd;
      for (std::size_t j = 0; j < n; ++j) d[j] += (alpha[k] - beta) * s[j];
    }
    for (std::size_t j = 0; j < n; ++j) d[j] = -d[j];

    double gd = 0.0;
    for (std::size_t j = 0; j < n; ++j) gd += g[j] * d[j];
    if (gd >= 0.0) {  // not a descent direction; restart from steepest descent
      pairs.clear();
      rhos.clear();
      gd = 0.0;
      for (std::size_t j = 0; j < n; ++j) {
        d[j] = -g[j];
        gd -= g[j] * g[j];
      }
    }

    double step = pairs.empty() ? 1.0 / std::max(1.0, sup_norm(g)) : 1.0;
    std::vector<double> w_new(n), g_new;
    double f_new = f;
    bool accepted = false;
    for (int ls = 0; ls < 60; ++ls) {
      for (std::size_t j = 0; j < n; ++j) w_new[j] = w[j] + step * d[j];
      f_new = obj.eval(w_new, &g_new);
      if (f_new <= f + kArmijo * step * gd) {
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) break;  // no further progress possible at double precision

    std::vector<double> s(n), yk(n);
    double sy = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      s[j] = w_new[j] - w[j];
      yk[j] = g_new[j] - g[j];
      sy += s[j] * yk[j];
    }
    if (sy > 1e-12) {
      pairs.emplace_back(std::move(s), std::move(yk));
      rhos.push_back(1.0 / sy);
      if (pairs.size() > kMemory) {
        pairs.pop_front();
        rhos.pop_front();
      }
    }
    w = std::move(w_new);
    g = std::move(g_new);
    f = f_new;
    converged = sup_norm(g) <= grad_tol;
  }

  return std::make_unique<LogisticModel>(X.dim, std::move(w), lambda, converged);
}

}  // namespace misinfo
