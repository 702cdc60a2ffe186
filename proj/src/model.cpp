#include "misinfo/model.hpp"

#include <algorithm>
#include <cmath>

#include "misinfo/ensemble.hpp"
#include "misinfo/error.hpp"
#include "misinfo/knn.hpp"
#include "misinfo/logistic.hpp"
#include "misinfo/naive_bayes.hpp"
#include "misinfo/pegasos.hpp"
#include "misinfo/rng.hpp"
#include "misinfo/smo.hpp"
#include "misinfo/tree.hpp"

namespace misinfo {

using nlohmann::json;

const char* to_string(LearnerKind k) {
  switch (k) {
    case LearnerKind::mnb: return "mnb";
    case LearnerKind::dmnb: return "dmnb";
    case LearnerKind::logistic_ridge: return "logistic_ridge";
    case LearnerKind::pegasos: return "pegasos";
    case LearnerKind::smo_kernel: return "smo_kernel";
    case LearnerKind::knn: return "knn";
    case LearnerKind::c45_tree: return "c45_tree";
    case LearnerKind::random_forest: return "random_forest";
    case LearnerKind::bagging: return "bagging";
    case LearnerKind::adaboost_m1: return "adaboost_m1";
  }
  return "unknown";
}

std::optional<LearnerKind> learner_kind_from_string(const std::string& s) {
  for (LearnerKind k :
       {LearnerKind::mnb, LearnerKind::dmnb, LearnerKind::logistic_ridge, LearnerKind::pegasos,
        LearnerKind::smo_kernel, LearnerKind::knn, LearnerKind::c45_tree,
        LearnerKind::random_forest, LearnerKind::bagging, LearnerKind::adaboost_m1})
    if (s == to_string(k)) return k;
  return std::nullopt;
}

void KernelConfig::validate() const {
  if (kind == Kind::polynomial) {
    if (gamma <= 0.0) throw ValidationError("polynomial kernel requires gamma > 0");
    if (degree < 1) throw ValidationError("polynomial kernel requires degree >= 1");
  }
}

double kernel_eval(const KernelConfig& cfg, const SparseVector& x, const SparseVector& y) {
  if (x.dim != y.dim)
    throw ValidationError("kernel_eval: dimensionality mismatch (" + std::to_string(x.dim) +
                          " vs " + std::to_string(y.dim) + ")");
  const double xy = dot(x, y);
  switch (cfg.kind) {
    case KernelConfig::Kind::linear: return xy;
    case KernelConfig::Kind::polynomial: return std::pow(cfg.gamma * xy + cfg.coef0, cfg.degree);
    case KernelConfig::Kind::sigmoid: return std::tanh(cfg.gamma * xy + cfg.coef0);
  }
  return xy;
}

void ModelSpec::validate() const {
  switch (kind) {
    case LearnerKind::mnb:
      if (alpha <= 0.0) throw ValidationError("mnb: alpha must be > 0");
      break;
    case LearnerKind::dmnb:
      if (alpha <= 0.0) throw ValidationError("dmnb: alpha must be > 0");
      if (passes < 0) throw ValidationError("dmnb: passes must be >= 0");
      break;
    case LearnerKind::logistic_ridge:
      if (lambda <= 0.0) throw ValidationError("logistic_ridge: lambda must be > 0");
      if (max_iter < 1) throw ValidationError("logistic_ridge: max_iter must be >= 1");
      break;
    case LearnerKind::pegasos:
      if (lambda <= 0.0) throw ValidationError("pegasos: lambda must be > 0");
      if (epochs < 1) throw ValidationError("pegasos: epochs must be >= 1");
      break;
    case LearnerKind::smo_kernel:
      if (C <= 0.0) throw ValidationError("smo_kernel: C must be > 0");
      if (tol <= 0.0) throw ValidationError("smo_kernel: tol must be > 0");
      kernel.validate();
      break;
    case LearnerKind::knn:
      if (k_neighbors < 1) throw ValidationError("knn: k must be >= 1");
      break;
    case LearnerKind::c45_tree:
      if (min_leaf < 1) throw ValidationError("c45_tree: min_leaf must be >= 1");
      if (prune && (confidence <= 0.0 || confidence >= 1.0))
        throw ValidationError("c45_tree: confidence must be in (0,1)");
      break;
    case LearnerKind::random_forest:
      if (n_trees < 1) throw ValidationError("random_forest: n_trees must be >= 1");
      if (features_per_split < 0)
        throw ValidationError("random_forest: features_per_split must be >= 0");
      break;
    case LearnerKind::bagging:
      if (n_members < 1) throw ValidationError("bagging: n_members must be >= 1");
      if (!base) throw ValidationError("bagging: missing base learner spec");
      base->validate();
      break;
    case LearnerKind::adaboost_m1:
      if (n_rounds < 1) throw ValidationError("adaboost_m1: n_rounds must be >= 1");
      if (!base) throw ValidationError("adaboost_m1: missing base learner spec");
      base->validate();
      break;
  }
}

json kernel_to_json(const KernelConfig& k) {
  json j;
  j["kind"] = k.kind == KernelConfig::Kind::linear      ? "linear"
              : k.kind == KernelConfig::Kind::polynomial ? "polynomial"
                                                         : "sigmoid";
  j["gamma"] = k.gamma;
  j["coef0"] = k.coef0;
  j["degree"] = k.degree;
  return j;
}

KernelConfig kernel_from_json(const json& j) {
  KernelConfig k;
  const std::string kind = j.value("kind", "linear");
  if (kind == "linear")
    k.kind = KernelConfig::Kind::linear;
  else if (kind == "polynomial")
    k.kind = KernelConfig::Kind::polynomial;
  else if (kind == "sigmoid")
    k.kind = KernelConfig::Kind::sigmoid;
  else
    throw ValidationError("unknown kernel kind \"" + kind + "\"");
  k.gamma = j.value("gamma", 1.0);
  k.coef0 = j.value("coef0", 0.0);
  k.degree = j.value("degree", 1);
  return k;
}

json spec_to_json(const ModelSpec& spec) {
  json j;
  j["learner"] = to_string(spec.kind);
  switch (spec.kind) {
    case LearnerKind::mnb:
      j["alpha"] = spec.alpha;
      break;
    case LearnerKind::dmnb:
      j["alpha"] = spec.alpha;
      j["passes"] = spec.passes;
      break;
    case LearnerKind::logistic_ridge:
      j["lambda"] = spec.lambda;
      j["max_iter"] = spec.max_iter;
      j["grad_tol"] = spec.grad_tol;
      break;
    case LearnerKind::pegasos:
      j["loss"] = spec.loss == PegasosLoss::hinge ? "hinge" : "log";
      j["lambda"] = spec.lambda;
      j["epochs"] = spec.epochs;
      break;
    case LearnerKind::smo_kernel:
      j["kernel"] = kernel_to_json(spec.kernel);
      j["C"] = spec.C;
      j["tol"] = spec.tol;
      j["calibrate"] = spec.calibrate;
      break;
    case LearnerKind::knn:
      j["k"] = spec.k_neighbors;
      break;
    case LearnerKind::c45_tree:
      j["min_leaf"] = spec.min_leaf;
      j["prune"] = spec.prune;
      j["confidence"] = spec.confidence;
      if (spec.max_depth >= 0) j["max_depth"] = spec.max_depth;
      break;
    case LearnerKind::random_forest:
      j["n_trees"] = spec.n_trees;
      if (spec.max_depth >= 0) j["max_depth"] = spec.max_depth;
      j["features_per_split"] = spec.features_per_split;
      j["min_leaf"] = spec.min_leaf;
      break;
    case LearnerKind::bagging:
      j["n_members"] = spec.n_members;
      j["base"] = spec_to_json(*spec.base);
      break;
    case LearnerKind::adaboost_m1:
      j["n_rounds"] = spec.n_rounds;
      j["base"] = spec_to_json(*spec.base);
      break;
  }
  return j;
}

ModelSpec spec_from_json(const json& j) {
  ModelSpec spec;
  const std::string learner = j.value("learner", "");
  const auto kind = learner_kind_from_string(learner);
  if (!kind) throw ValidationError("unknown learner kind \"" + learner + "\"");
  spec.kind = *kind;
  spec.alpha = j.value("alpha", spec.alpha);
  spec.passes = j.value("passes", spec.passes);
  spec.lambda = j.value("lambda", spec.lambda);
  spec.max_iter = j.value("max_iter", spec.max_iter);
  spec.grad_tol = j.value("grad_tol", spec.grad_tol);
  if (j.contains("loss")) {
    const std::string loss = j["loss"].get<std::string>();
    if (loss == "hinge")
      spec.loss = PegasosLoss::hinge;
    else if (loss == "log")
      spec.loss = PegasosLoss::log;
    else
      throw ValidationError("unknown pegasos loss \"" + loss + "\"");
  }
  spec.epochs = j.value("epochs", spec.epochs);
  if (j.contains("kernel")) spec.kernel = kernel_from_json(j["kernel"]);
  spec.C = j.value("C", spec.C);
  spec.tol = j.value("tol", spec.tol);
  spec.calibrate = j.value("calibrate", spec.calibrate);
  spec.k_neighbors = j.value("k", spec.k_neighbors);
  spec.min_leaf = j.value("min_leaf", spec.min_leaf);
  spec.prune = j.value("prune", spec.prune);
  spec.confidence = j.value("confidence", spec.confidence);
  spec.max_depth = j.value("max_depth", spec.max_depth);
  spec.n_trees = j.value("n_trees", spec.n_trees);
  spec.features_per_split = j.value("features_per_split", spec.features_per_split);
  spec.n_members = j.value("n_members", spec.n_members);
  spec.n_rounds = j.value("n_rounds", spec.n_rounds);
  if (j.contains("base")) spec.base = std::make_shared<ModelSpec>(spec_from_json(j["base"]));
  spec.validate();
  return spec;
}

Prediction make_prediction(const std::array<double, 2>& scores, bool probabilistic) {
  Prediction p;
  p.scores = scores;
  p.probabilistic = probabilistic;
  p.label = scores[0] >= scores[1] ? Label::misinformation : Label::no_misinformation;
  return p;
}

void Model::check_dim(const SparseVector& x) const {
  if (x.dim != dim())
    throw ValidationError("predict: vector dimensionality " + std::to_string(x.dim) +
                          " does not match model dimensionality " + std::to_string(dim()));
}

namespace {

// Weighted resample for base learners without native instance weights.
void weighted_resample(const FeatureMatrix& X, const std::vector<Label>& y,
                       const std::vector<double>& weights, std::uint64_t seed,
                       FeatureMatrix* out_X, std::vector<Label>* out_y) {
  double total = 0.0;
  for (double w : weights) total += w;
  std::vector<double> cumulative(weights.size());
  double acc = 0.0;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    acc += weights[i];
    cumulative[i] = acc;
  }
  Rng rng(seed);
  out_X->dim = X.dim;
  out_X->rows.reserve(X.size());
  out_y->reserve(y.size());
  for (std::size_t i = 0; i < X.size(); ++i) {
    const double u = rng.uniform01() * total;
    const auto it = std::lower_bound(cumulative.begin(), cumulative.end(), u);
    const std::size_t pick =
        it == cumulative.end() ? weights.size() - 1 : static_cast<std::size_t>(it - cumulative.begin());
    out_X->rows.push_back(X.rows[pick]);
    out_y->push_back(y[pick]);
  }
}

}  // namespace

TrainedModel train_model(const ModelSpec& spec, const FeatureMatrix& X,
                         const std::vector<Label>& y, std::uint64_t seed) {
  spec.validate();
  if (X.size() != y.size()) throw ValidationError("train_model: X and y sizes differ");
  if (X.size() == 0) throw ValidationError("train_model: empty training set");
  switch (spec.kind) {
    case LearnerKind::mnb:
      return train_mnb(X, y, spec.alpha);
    case LearnerKind::dmnb:
      return train_dmnb(X, y, spec.alpha, spec.passes, seed);
    case LearnerKind::logistic_ridge:
      return train_logistic_ridge(X, y, spec.lambda, spec.max_iter, spec.grad_tol);
    case LearnerKind::pegasos:
      return train_pegasos(X, y, spec.loss, spec.lambda, spec.epochs, seed);
    case LearnerKind::smo_kernel:
      return train_smo(X, y, spec.kernel, spec.C, spec.tol, spec.calibrate);
    case LearnerKind::knn:
      return train_knn(X, y, spec.k_neighbors);
    case LearnerKind::c45_tree: {
      C45Params p{spec.min_leaf, spec.prune, spec.confidence, spec.max_depth};
      return train_c45(X, y, p);
    }
    case LearnerKind::random_forest: {
      RandomForestParams p{spec.n_trees, spec.max_depth, spec.features_per_split, spec.min_leaf};
      return train_random_forest(X, y, p, seed);
    }
    case LearnerKind::bagging:
      return train_bagging(*spec.base, X, y, spec.n_members, seed);
    case LearnerKind::adaboost_m1:
      return train_adaboost_m1(*spec.base, X, y, spec.n_rounds, seed);
  }
  throw ValidationError("train_model: unhandled learner kind");
}

TrainedModel train_model_weighted(const ModelSpec& spec, const FeatureMatrix& X,
                                  const std::vector<Label>& y,
                                  const std::vector<double>& weights, std::uint64_t seed) {
  spec.validate();
  if (weights.size() != X.size())
    throw ValidationError("train_model_weighted: weight vector size mismatch");
  switch (spec.kind) {
    case LearnerKind::mnb:
      return train_mnb(X, y, spec.alpha, &weights);
    case LearnerKind::dmnb:
      return train_dmnb(X, y, spec.alpha, spec.passes, seed, &weights);
    case LearnerKind::c45_tree: {
      C45Params p{spec.min_leaf, spec.prune, spec.confidence, spec.max_depth};
      return train_c45(X, y, p, &weights);
    }
    default: {
      FeatureMatrix rx;
      std::vector<Label> ry;
      weighted_resample(X, y, weights, Rng::derive(seed, 0x9d), &rx, &ry);
      return train_model(spec, rx, ry, seed);
    }
  }
}

TrainedModel model_from_json(const json& j) {
  const std::string kind = j.value("kind", "");
  if (kind == "mnb" || kind == "dmnb") return NaiveBayesModel::from_json(j);
  if (kind == "logistic_ridge") return LogisticModel::from_json(j);
  if (kind == "pegasos") return PegasosModel::from_json(j);
  if (kind == "smo_kernel") return SmoModel::from_json(j);
  if (kind == "knn") return KnnModel::from_json(j);
  if (kind == "c45_tree") return TreeModel::from_json(j);
  if (kind == "random_forest") return ForestModel::from_json(j);
  if (kind == "bagging") return BaggingModel::from_json(j);
  if (kind == "adaboost_m1") return AdaBoostModel::from_json(j);
  throw ValidationError("model_from_json: unknown model kind \"" + kind + "\"");
}

}  // namespace misinfo
