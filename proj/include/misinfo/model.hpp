#pragma once

#include <array>
#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "misinfo/corpus.hpp"
#include "misinfo/sparse.hpp"

#include "json.hpp"

namespace misinfo {

enum class LearnerKind {
  mnb,
  dmnb,
  logistic_ridge,
  pegasos,
  smo_kernel,
  knn,
  c45_tree,
  random_forest,
  bagging,
  adaboost_m1,
};

const char* to_string(LearnerKind k);
std::optional<LearnerKind> learner_kind_from_string(const std::string& s);

struct KernelConfig {
  enum class Kind { linear, polynomial, sigmoid };
  Kind kind = Kind::linear;
  double gamma = 1.0;
  double coef0 = 0.0;
  int degree = 1;  // polynomial only; ignored by sigmoid like common SVM libraries

  void validate() const;
};

double kernel_eval(const KernelConfig& cfg, const SparseVector& x, const SparseVector& y);

nlohmann::json kernel_to_json(const KernelConfig& k);
KernelConfig kernel_from_json(const nlohmann::json& j);

enum class PegasosLoss { hinge, log };

// Declarative learner configuration. Fields are interpreted per kind; the
// rest are ignored. validate() checks the documented ranges.
struct ModelSpec {
  LearnerKind kind = LearnerKind::mnb;

  // mnb / dmnb
  double alpha = 1.0;  // smoothing, > 0
  int passes = 1;      // dmnb discriminative passes (0 allowed: smoothing-only tables)

  // logistic_ridge
  double lambda = 1.0;
  int max_iter = 300;
  double grad_tol = 1e-6;

  // pegasos
  PegasosLoss loss = PegasosLoss::log;
  int epochs = 100;  // pegasos also reuses lambda

  // smo_kernel
  KernelConfig kernel;
  double C = 1.0;
  double tol = 1e-3;  // KKT tolerance
  bool calibrate = true;

  // knn
  int k_neighbors = 5;

  // c45_tree (max_depth < 0 means unlimited; also used by random_forest)
  int min_leaf = 2;
  bool prune = true;
  double confidence = 0.25;
  int max_depth = -1;

  // random_forest
  int n_trees = 100;
  int features_per_split = 0;  // 0 = floor(sqrt(dim))

  // ensembles
  int n_members = 10;  // bagging
  int n_rounds = 10;   // adaboost_m1
  std::shared_ptr<ModelSpec> base;

  void validate() const;  // throws ValidationError
};

nlohmann::json spec_to_json(const ModelSpec& spec);
ModelSpec spec_from_json(const nlohmann::json& j);

struct Prediction {
  Label label = Label::misinformation;
  std::array<double, 2> scores{0.0, 0.0};
  bool probabilistic = false;
};

// Argmax with ties broken toward the lower label index.
Prediction make_prediction(const std::array<double, 2>& scores, bool probabilistic);

struct FeatureMatrix {
  std::vector<SparseVector> rows;
  std::uint32_t dim = 0;

  std::size_t size() const { return rows.size(); }
};

// Immutable fitted artifact. Predictions are safe to run concurrently.
class Model {
 public:
  virtual ~Model() = default;
  virtual LearnerKind kind() const = 0;
  virtual std::uint32_t dim() const = 0;
  virtual Prediction predict(const SparseVector& x) const = 0;
  virtual nlohmann::json to_json() const = 0;
  virtual bool converged() const { return true; }

 protected:
  // Throws ValidationError on dimensionality mismatch.
  void check_dim(const SparseVector& x) const;
};

using TrainedModel = std::unique_ptr<Model>;

TrainedModel train_model(const ModelSpec& spec, const FeatureMatrix& X,
                         const std::vector<Label>& y, std::uint64_t seed);

// Instance-weighted variant used by AdaBoost.M1. MNB, DMNB and trees take
// weights natively; other learners are trained on a weighted resample.
TrainedModel train_model_weighted(const ModelSpec& spec, const FeatureMatrix& X,
                                  const std::vector<Label>& y,
                                  const std::vector<double>& weights, std::uint64_t seed);

// Deserializes any model previously produced by Model::to_json. Round-trip
// reproduces bit-identical predictions.
TrainedModel model_from_json(const nlohmann::json& j);

}  // namespace misinfo
