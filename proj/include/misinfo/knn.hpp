#pragma once

#include <vector>

#include "misinfo/model.hpp"

namespace misinfo {

// Lazy learner: stores the training matrix and votes among the k nearest
// neighbors by cosine distance. Distance ties favor the lower training index,
// vote ties the lower label index. Scores are vote fractions.
class KnnModel final : public Model {
 public:
  KnnModel(FeatureMatrix train, std::vector<Label> y, int k);

  LearnerKind kind() const override { return LearnerKind::knn; }
  std::uint32_t dim() const override { return train_.dim; }
  Prediction predict(const SparseVector& x) const override;
  nlohmann::json to_json() const override;

  static TrainedModel from_json(const nlohmann::json& j);

 private:
  FeatureMatrix train_;
  std::vector<Label> y_;
  int k_;
};

TrainedModel train_knn(const FeatureMatrix& X, const std::vector<Label>& y, int k);

// Single-query form of the operation; k <= training size required.
Prediction knn_predict(const FeatureMatrix& X, const std::vector<Label>& y,
                       const SparseVector& query, int k);

}  // namespace misinfo
