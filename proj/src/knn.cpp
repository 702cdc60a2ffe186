#include "misinfo/knn.hpp"

#include <algorithm>
#include <numeric>

#include "misinfo/error.hpp"

namespace misinfo {

using nlohmann::json;

KnnModel::KnnModel(FeatureMatrix train, std::vector<Label> y, int k)
    : train_(std::move(train)), y_(std::move(y)), k_(k) {
  if (k_ < 1) throw ValidationError("knn: k must be >= 1");
  if (static_cast<std::size_t>(k_) > train_.size())
    throw ValidationError("knn: k exceeds training size");
  if (train_.size() != y_.size()) throw ValidationError("knn: X and y sizes differ");
}

Prediction KnnModel::predict(const SparseVector& x) const {
  check_dim(x);
  return knn_predict(train_, y_, x, k_);
}

Prediction knn_predict(const FeatureMatrix& X, const std::vector<Label>& y,
                       const SparseVector& query, int k) {
  if (X.size() == 0) throw ValidationError("knn_predict: empty training set");
  if (X.size() != y.size()) throw ValidationError("knn_predict: X and y sizes differ");
  if (k < 1 || static_cast<std::size_t>(k) > X.size())
    throw ValidationError("knn_predict: k must be in [1, training size]");

  std::vector<std::size_t> idx(X.size());
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  std::vector<double> dist(X.size());
  for (std::size_t i = 0; i < X.size(); ++i) dist[i] = cosine_distance(X.rows[i], query);
  // Stable ordering: distance, then training index.
  std::partial_sort(idx.begin(), idx.begin() + k, idx.end(), [&](std::size_t a, std::size_t b) {
    if (dist[a] != dist[b]) return dist[a] < dist[b];
    return a < b;
  });

  std::array<double, 2> votes{0.0, 0.0};
  for (int j = 0; j < k; ++j) votes[static_cast<int>(y[idx[j]])] += 1.0;
  return make_prediction({votes[0] / k, votes[1] / k}, true);
}

TrainedModel train_knn(const FeatureMatrix& X, const std::vector<Label>& y, int k) {
  return std::make_unique<KnnModel>(X, y, k);
}

json KnnModel::to_json() const {
  json j;
  j["kind"] = to_string(LearnerKind::knn);
  j["dim"] = train_.dim;
  j["k"] = k_;
  json rows = json::array();
  for (const auto& row : train_.rows) {
    json entries = json::array();
    for (const auto& [f, v] : row.entries) entries.push_back(json::array({f, v}));
    rows.push_back(std::move(entries));
  }
  j["train"] = std::move(rows);
  json labels = json::array();
  for (Label l : y_) labels.push_back(static_cast<int>(l));
  j["labels"] = std::move(labels);
  return j;
}

TrainedModel KnnModel::from_json(const json& j) {
  FeatureMatrix X;
  X.dim = j.at("dim").get<std::uint32_t>();
  for (const auto& entries : j.at("train")) {
    SparseVector v;
    v.dim = X.dim;
    for (const auto& e : entries)
      v.entries.emplace_back(e.at(0).get<std::uint32_t>(), e.at(1).get<double>());
    X.rows.push_back(std::move(v));
  }
  std::vector<Label> y;
  for (const auto& l : j.at("labels")) y.push_back(static_cast<Label>(l.get<int>()));
  return std::make_unique<KnnModel>(std::move(X), std::move(y), j.at("k").get<int>());
}

}  // namespace misinfo
