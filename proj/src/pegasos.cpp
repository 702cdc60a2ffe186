#include "misinfo/pegasos.hpp"

#include <cmath>
#include <numeric>

#include "misinfo/error.hpp"
#include "misinfo/rng.hpp"

namespace misinfo {

using nlohmann::json;

namespace {

double sign_of(Label l) { return l == Label::misinformation ? 1.0 : -1.0; }

double sigmoid(double z) {
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

double log1p_exp_neg(double z) {
  if (z > 0.0) return std::log1p(std::exp(-z));
  return -z + std::log1p(std::exp(z));
}

double margin(const std::vector<double>& w, const SparseVector& x) {
  double m = w.back();
  for (const auto& [f, v] : x.entries) m += w[f] * v;
  return m;
}

}  // namespace

PegasosModel::PegasosModel(std::uint32_t dim, std::vector<double> weights, PegasosLoss loss,
                           double lambda)
    : dim_(dim), weights_(std::move(weights)), loss_(loss), lambda_(lambda) {
  if (weights_.size() != static_cast<std::size_t>(dim_) + 1)
    throw ValidationError("pegasos model: weight vector must have dim + 1 entries");
}

double PegasosModel::decision_value(const SparseVector& x) const {
  check_dim(x);
  return margin(weights_, x);
}

Prediction PegasosModel::predict(const SparseVector& x) const {
  const double m = decision_value(x);
  if (loss_ == PegasosLoss::log) {
    const double p = sigmoid(m);
    return make_prediction({p, 1.0 - p}, true);
  }
  return make_prediction({m, -m}, false);
}

json PegasosModel::to_json() const {
  json j;
  j["kind"] = to_string(LearnerKind::pegasos);
  j["dim"] = dim_;
  j["loss"] = loss_ == PegasosLoss::hinge ? "hinge" : "log";
  j["lambda"] = lambda_;
  j["weights"] = weights_;
  return j;
}

TrainedModel PegasosModel::from_json(const json& j) {
  const std::string loss_str = j.at("loss").get<std::string>();
  const PegasosLoss loss = loss_str == "hinge" ? PegasosLoss::hinge : PegasosLoss::log;
  return std::make_unique<PegasosModel>(j.at("dim").get<std::uint32_t>(),
                                        j.at("weights").get<std::vector<double>>(), loss,
                                        j.at("lambda").get<double>());
}

double pegasos_objective(const FeatureMatrix& X, const std::vector<Label>& y, PegasosLoss loss,
                         double lambda, const std::vector<double>& weights) {
  if (weights.size() != static_cast<std::size_t>(X.dim) + 1)
    throw ValidationError("pegasos_objective: weights must have dim + 1 entries");
  double f = 0.0;
  for (double w : weights) f += 0.5 * lambda * w * w;
  double loss_sum = 0.0;
  for (std::size_t i = 0; i < X.size(); ++i) {
    const double z = sign_of(y[i]) * margin(weights, X.rows[i]);
    loss_sum += loss == PegasosLoss::hinge ? std::max(0.0, 1.0 - z) : log1p_exp_neg(z);
  }
  return f + loss_sum / static_cast<double>(X.size());
}

TrainedModel train_pegasos(const FeatureMatrix& X, const std::vector<Label>& y,
                           PegasosLoss loss, double lambda, int epochs, std::uint64_t seed) {
  if (lambda <= 0.0) throw ValidationError("train_pegasos: lambda must be > 0");
  if (epochs < 1) throw ValidationError("train_pegasos: epochs must be >= 1");
  if (X.size() != y.size()) throw ValidationError("train_pegasos: X and y sizes differ");
  if (X.size() == 0) throw ValidationError("train_pegasos: empty training set");

  std::vector<double> w(static_cast<std::size_t>(X.dim) + 1, 0.0);
  std::vector<std::size_t> order(X.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  Rng rng(seed);

  std::uint64_t t = 0;
  for (int epoch = 0; epoch < epochs; ++epoch) {
    rng.shuffle(order);
    for (std::size_t idx : order) {
      ++t;
      const double eta = 1.0 / (lambda * static_cast<double>(t));
      const SparseVector& x = X.rows[idx];
      const double s = sign_of(y[idx]);
      const double m = margin(w, x);
      // Shrink, then take the loss subgradient step against the pre-shrink margin.
      const double shrink = 1.0 - eta * lambda;
      for (double& wj : w) wj *= shrink;
      double coeff = 0.0;
      if (loss == PegasosLoss::hinge) {
        if (s * m < 1.0) coeff = eta * s;
      } else {
        coeff = eta * s * sigmoid(-s * m);
      }
      if (coeff != 0.0) {
        for (const auto& [f, v] : x.entries) w[f] += coeff * v;
        w.back() += coeff;
      }
    }
  }
  return std::make_unique<PegasosModel>(X.dim, std::move(w), loss, lambda);
}

}  // namespace misinfo
