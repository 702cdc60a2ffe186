#include <cmath>
#include <vector>

#include "doctest.h"
#include "misinfo/error.hpp"
#include "misinfo/tree.hpp"

using namespace misinfo;

namespace {

SparseVector sv(std::uint32_t dim, std::vector<std::pair<std::uint32_t, double>> entries) {
  SparseVector v;
  v.dim = dim;
  v.entries = std::move(entries);
  return v;
}

FeatureMatrix matrix(std::uint32_t dim, std::vector<SparseVector> rows) {
  FeatureMatrix X;
  X.dim = dim;
  X.rows = std::move(rows);
  return X;
}

constexpr Label kMis = Label::misinformation;
constexpr Label kNo = Label::no_misinformation;

const TreeModel& as_tree(const TrainedModel& m) {
  const auto* t = dynamic_cast<const TreeModel*>(m.get());
  REQUIRE(t != nullptr);
  return *t;
}

// Continuity-corrected normal upper confidence bound on the error rate,
// recovered by bisection on its defining quadratic instead of the closed form.
double wilson_added_errors_oracle(double n, double e, double confidence) {
  const double z = normal_quantile(1.0 - confidence);
  const double f = (e + 0.5) / n;
  auto g = [&](double p) { return (p - f) * (p - f) - z * z * p * (1.0 - p) / n; };
  double lo = f, hi = 1.0;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    (g(mid) < 0.0 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi) * n - e;
}

}  // namespace

TEST_CASE("two-class entropy in bits") {
  CHECK(entropy2(1.0, 1.0) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(entropy2(2.0, 0.0) == 0.0);
  CHECK(entropy2(0.0, 0.0) == 0.0);
  CHECK(entropy2(3.0, 1.0) == doctest::Approx(0.8112781244591328).epsilon(1e-14));
  CHECK(entropy2(2.0, 4.0) == doctest::Approx(0.9182958340544896).epsilon(1e-14));
  CHECK(entropy2(2.0, 4.0) == entropy2(4.0, 2.0));
}

TEST_CASE("presence split scoring") {
  SUBCASE("perfect separation") {
    const auto s = score_presence_split(2.0, 0.0, 0.0, 2.0);
    CHECK(s.valid);
    CHECK(s.gain == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(s.gain_ratio == doctest::Approx(1.0).epsilon(1e-15));
  }
  SUBCASE("uneven pure branch") {
    const auto s = score_presence_split(2.0, 4.0, 2.0, 0.0);
    const double gain = 1.0 - 0.75 * 0.9182958340544896;
    const double info = 0.8112781244591328;
    CHECK(s.valid);
    CHECK(s.gain == doctest::Approx(gain).epsilon(1e-13));
    CHECK(s.gain_ratio == doctest::Approx(gain / info).epsilon(1e-13));
  }
  SUBCASE("empty side is invalid") {
    CHECK(!score_presence_split(0.0, 0.0, 4.0, 4.0).valid);
    CHECK(!score_presence_split(4.0, 4.0, 0.0, 0.0).valid);
  }
  SUBCASE("uninformative split has zero gain") {
    const auto s = score_presence_split(1.0, 1.0, 1.0, 1.0);
    CHECK(s.valid);
    CHECK(s.gain == doctest::Approx(0.0).scale(1.0).epsilon(1e-15));
  }
}

TEST_CASE("normal quantile agrees with the stdlib error function") {
  CHECK(normal_quantile(0.5) == doctest::Approx(0.0).scale(1.0).epsilon(1e-15));
  CHECK(normal_quantile(0.75) == doctest::Approx(0.6744897501960817).epsilon(1e-14));
  CHECK(normal_quantile(0.975) == doctest::Approx(1.959963984540054).epsilon(1e-14));
  CHECK(normal_quantile(0.01) == doctest::Approx(-2.3263478740408408).epsilon(1e-14));
  for (const double p : {0.001, 0.01, 0.1, 0.25, 0.5, 0.9, 0.999}) {
    const double z = normal_quantile(p);
    CHECK(0.5 * std::erfc(-z / std::sqrt(2.0)) == doctest::Approx(p).epsilon(1e-13));
    CHECK(normal_quantile(1.0 - p) == doctest::Approx(-z).scale(1.0).epsilon(1e-12));
  }
  CHECK_THROWS_AS(normal_quantile(0.0), ValidationError);
  CHECK_THROWS_AS(normal_quantile(1.0), ValidationError);
}

TEST_CASE("pessimistic added errors") {
  SUBCASE("zero observed errors use the exact binomial bound") {
    CHECK(pessimistic_added_errors(10.0, 0.0, 0.25) ==
          doctest::Approx(10.0 * (1.0 - std::pow(0.25, 0.1))).epsilon(1e-14));
    CHECK(pessimistic_added_errors(2.0, 0.0, 0.25) == doctest::Approx(1.0).epsilon(1e-14));
  }
  SUBCASE("fractional errors below one interpolate linearly") {
    const double base = 10.0 * (1.0 - std::pow(0.25, 0.1));
    const double at1 = pessimistic_added_errors(10.0, 1.0, 0.25);
    CHECK(pessimistic_added_errors(10.0, 0.5, 0.25) ==
          doctest::Approx(base + 0.5 * (at1 - base)).epsilon(1e-13));
  }
  SUBCASE("saturated nodes cannot add more than the remainder") {
    CHECK(pessimistic_added_errors(10.0, 9.8, 0.25) == doctest::Approx(0.2).epsilon(1e-13));
    CHECK(pessimistic_added_errors(4.0, 4.0, 0.25) == 0.0);
  }
  SUBCASE("general branch matches a bisection solution of the Wilson bound") {
    CHECK(pessimistic_added_errors(10.0, 1.0, 0.25) ==
          doctest::Approx(wilson_added_errors_oracle(10.0, 1.0, 0.25)).epsilon(1e-9));
    CHECK(pessimistic_added_errors(20.0, 3.0, 0.25) ==
          doctest::Approx(wilson_added_errors_oracle(20.0, 3.0, 0.25)).epsilon(1e-9));
    CHECK(pessimistic_added_errors(7.0, 2.0, 0.1) ==
          doctest::Approx(wilson_added_errors_oracle(7.0, 2.0, 0.1)).epsilon(1e-9));
  }
  SUBCASE("monotone in the error count and in optimism") {
    CHECK(pessimistic_added_errors(10.0, 3.0, 0.25) > pessimistic_added_errors(10.0, 2.0, 0.25));
    CHECK(pessimistic_added_errors(10.0, 2.0, 0.1) > pessimistic_added_errors(10.0, 2.0, 0.5));
  }
}

TEST_CASE("c45 grows a depth-one tree on a single predictive feature") {
  const auto X = matrix(2, {sv(2, {{0, 1.0}}), sv(2, {{0, 1.0}}), sv(2, {{0, 1.0}}), sv(2, {}),
                            sv(2, {}), sv(2, {})});
  const std::vector<Label> y{kMis, kMis, kMis, kNo, kNo, kNo};
  const auto model = train_c45(X, y, C45Params{}, nullptr);
  const auto& tree = as_tree(model);
  CHECK(tree.root_feature() == 0);
  CHECK(tree.depth() == 1);
  CHECK(tree.leaf_count() == 2);
  for (std::size_t i = 0; i < X.rows.size(); ++i) {
    const auto p = model->predict(X.rows[i]);
    CHECK(p.label == y[i]);
    CHECK(p.scores[static_cast<int>(y[i])] == 1.0);
    CHECK(p.probabilistic);
  }
}

TEST_CASE("c45 keeps a pure node as a single leaf") {
  const auto X = matrix(2, {sv(2, {{0, 1.0}}), sv(2, {{1, 1.0}}), sv(2, {})});
  const std::vector<Label> y{kMis, kMis, kMis};
  const auto model = train_c45(X, y, C45Params{}, nullptr);
  const auto& tree = as_tree(model);
  CHECK(tree.leaf_count() == 1);
  CHECK(tree.depth() == 0);
  CHECK(tree.root_feature() == -1);
}

TEST_CASE("c45 maximizes gain ratio, not raw gain") {
  // Feature 0 splits 4/4 with the larger information gain; feature 1 isolates
  // one document and wins on gain ratio. min_leaf decides whether the tiny
  // branch is admissible at all.
  const auto X = matrix(2, {
                               sv(2, {{0, 1.0}}),  // mis
                               sv(2, {{0, 1.0}}),  // mis
                               sv(2, {{0, 1.0}}),  // mis
                               sv(2, {{1, 1.0}}),  // mis
                               sv(2, {{0, 1.0}}),  // no
                               sv(2, {}),          // no
                               sv(2, {}),          // no
                               sv(2, {}),          // no
                           });
  const std::vector<Label> y{kMis, kMis, kMis, kMis, kNo, kNo, kNo, kNo};

  C45Params params;
  params.prune = false;
  SUBCASE("with min_leaf=1 the high-ratio singleton split wins") {
    params.min_leaf = 1;
    const auto model = train_c45(X, y, params, nullptr);
    const auto& tree = as_tree(model);
    CHECK(tree.root_feature() == 1);
    CHECK(tree.predict(sv(2, {{1, 1.0}})).scores[0] == 1.0);
    CHECK(tree.predict(sv(2, {{0, 1.0}})).scores[0] == doctest::Approx(0.75).epsilon(1e-15));
    CHECK(tree.predict(sv(2, {})).label == kNo);
  }
  SUBCASE("with min_leaf=2 only the balanced split is admissible") {
    params.min_leaf = 2;
    const auto model = train_c45(X, y, params, nullptr);
    const auto& tree = as_tree(model);
    CHECK(tree.root_feature() == 0);
  }
}

TEST_CASE("c45 split ties resolve to the lower feature index") {
  const auto X = matrix(3, {sv(3, {{1, 1.0}, {2, 1.0}}), sv(3, {{1, 1.0}, {2, 1.0}}), sv(3, {}),
                            sv(3, {})});
  const std::vector<Label> y{kMis, kMis, kNo, kNo};
  C45Params params;
  params.prune = false;
  const auto model = train_c45(X, y, params, nullptr);
  const auto& tree = as_tree(model);
  CHECK(tree.root_feature() == 1);  // features 1 and 2 are identical columns
  CHECK(tree.depth() == 1);         // the duplicate column adds no second split
}

TEST_CASE("pessimistic pruning collapses a noisy split but keeps a clean one") {
  SUBCASE("noisy split collapses to a leaf") {
    const auto X = matrix(1, {sv(1, {{0, 1.0}}), sv(1, {{0, 1.0}}), sv(1, {{0, 1.0}}), sv(1, {}),
                              sv(1, {})});
    const std::vector<Label> y{kMis, kMis, kNo, kMis, kMis};
    C45Params unpruned;
    unpruned.prune = false;
    CHECK(as_tree(train_c45(X, y, unpruned, nullptr)).leaf_count() == 2);

    const auto pruned_model = train_c45(X, y, C45Params{}, nullptr);
    const auto& pruned = as_tree(pruned_model);
    CHECK(pruned.leaf_count() == 1);
    CHECK(pruned.root_feature() == -1);
    const auto p = pruned.predict(sv(1, {}));
    CHECK(p.label == kMis);
    CHECK(p.scores[0] == doctest::Approx(0.8).epsilon(1e-15));
  }
  SUBCASE("separating split survives pruning") {
    const auto X = matrix(1, {sv(1, {{0, 1.0}}), sv(1, {{0, 1.0}}), sv(1, {{0, 1.0}}), sv(1, {}),
                              sv(1, {}), sv(1, {})});
    const std::vector<Label> y{kMis, kMis, kMis, kNo, kNo, kNo};
    const auto model = train_c45(X, y, C45Params{}, nullptr);
    const auto& tree = as_tree(model);
    CHECK(tree.leaf_count() == 2);
    CHECK(tree.root_feature() == 0);
  }
}

TEST_CASE("c45 depth cap and min leaf stop growth") {
  // Needs two chained splits to separate: f0 first (tie with f1 resolves
  // low), then f1 inside the present branch.
  const auto X = matrix(2, {sv(2, {{0, 1.0}, {1, 1.0}}), sv(2, {{1, 1.0}}), sv(2, {{0, 1.0}}),
                            sv(2, {})});
  const std::vector<Label> y{kMis, kNo, kNo, kNo};
  C45Params params;
  params.prune = false;
  params.min_leaf = 1;

  CHECK(as_tree(train_c45(X, y, params, nullptr)).depth() == 2);
  params.max_depth = 1;
  CHECK(as_tree(train_c45(X, y, params, nullptr)).depth() == 1);
  params.max_depth = 0;
  CHECK(as_tree(train_c45(X, y, params, nullptr)).depth() == 0);
  params.max_depth = -1;
  params.min_leaf = 8;
  CHECK(as_tree(train_c45(X, y, params, nullptr)).leaf_count() == 1);
}

TEST_CASE("c45 instance weights match duplicating rows") {
  const auto Xw = matrix(1, {sv(1, {{0, 1.0}}), sv(1, {})});
  const std::vector<Label> yw{kMis, kNo};
  const std::vector<double> w{2.0, 3.0};
  const auto weighted = train_c45(Xw, yw, C45Params{}, &w);

  const auto Xd = matrix(1, {sv(1, {{0, 1.0}}), sv(1, {{0, 1.0}}), sv(1, {}), sv(1, {}),
                             sv(1, {})});
  const std::vector<Label> yd{kMis, kMis, kNo, kNo, kNo};
  const auto duplicated = train_c45(Xd, yd, C45Params{}, nullptr);
  CHECK(weighted->to_json().dump() == duplicated->to_json().dump());
}

TEST_CASE("random forest with sampling disabled reduces to a single unpruned tree") {
  const auto X = matrix(3, {sv(3, {{0, 1.0}, {2, 1.0}}), sv(3, {{0, 1.0}}), sv(3, {{1, 1.0}}),
                            sv(3, {{1, 1.0}, {2, 1.0}}), sv(3, {{2, 1.0}}), sv(3, {})});
  const std::vector<Label> y{kMis, kMis, kNo, kNo, kMis, kNo};

  RandomForestParams fp;
  fp.n_trees = 1;
  fp.bootstrap = false;
  fp.features_per_split = 3;  // every feature at every split
  fp.min_leaf = 2;
  const auto forest = train_random_forest(X, y, fp, 17);

  C45Params cp;
  cp.prune = false;
  cp.min_leaf = 2;
  const auto tree = train_c45(X, y, cp, nullptr);

  CHECK(forest->to_json().at("trees").at(0) == tree->to_json().at("nodes"));
  for (const auto& row : X.rows) {
    CHECK(forest->predict(row).label == tree->predict(row).label);
  }
}

TEST_CASE("forest scores average smoothed leaf distributions") {
  const auto X = matrix(1, {sv(1, {{0, 1.0}}), sv(1, {{0, 1.0}}), sv(1, {{0, 1.0}}), sv(1, {}),
                            sv(1, {}), sv(1, {})});
  const std::vector<Label> y{kMis, kMis, kMis, kNo, kNo, kNo};
  RandomForestParams fp;
  fp.n_trees = 1;
  fp.bootstrap = false;
  fp.features_per_split = 1;
  fp.min_leaf = 2;
  const auto forest = train_random_forest(X, y, fp, 1);
  const auto p = forest->predict(sv(1, {{0, 1.0}}));
  CHECK(p.scores[0] == doctest::Approx(0.8).epsilon(1e-15));  // (3+1)/(3+2)
  CHECK(p.scores[1] == doctest::Approx(0.2).epsilon(1e-15));
}

TEST_CASE("random forest separates an easy corpus and is seed-deterministic") {
  std::vector<SparseVector> rows;
  std::vector<Label> y;
  for (int i = 0; i < 8; ++i) {
    rows.push_back(sv(4, {{0, 1.0}, {static_cast<std::uint32_t>(2 + i % 2), 1.0}}));
    y.push_back(kMis);
    rows.push_back(sv(4, {{1, 1.0}, {static_cast<std::uint32_t>(2 + i % 2), 1.0}}));
    y.push_back(kNo);
  }
  const auto X = matrix(4, std::move(rows));

  RandomForestParams fp;
  fp.n_trees = 25;
  const auto forest = train_random_forest(X, y, fp, 7);
  const auto* fm = dynamic_cast<const ForestModel*>(forest.get());
  REQUIRE(fm != nullptr);
  CHECK(fm->n_trees() == 25);
  for (std::size_t i = 0; i < X.rows.size(); ++i) CHECK(forest->predict(X.rows[i]).label == y[i]);

  const auto again = train_random_forest(X, y, fp, 7);
  CHECK(forest->to_json().dump() == again->to_json().dump());
}
