#include <cmath>
#include <vector>

#include "doctest.h"
#include "misinfo/error.hpp"
#include "misinfo/knn.hpp"
#include "misinfo/smo.hpp"

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

double label_sign(Label l) { return l == kMis ? 1.0 : -1.0; }

// Dual objective sum(alpha) - 1/2 sum_ij alpha_i alpha_j y_i y_j K_ij.
double dual_objective(const FeatureMatrix& X, const std::vector<Label>& y,
                      const KernelConfig& kernel, const std::vector<double>& alpha) {
  double obj = 0.0;
  for (std::size_t i = 0; i < alpha.size(); ++i) obj += alpha[i];
  for (std::size_t i = 0; i < alpha.size(); ++i)
    for (std::size_t j = 0; j < alpha.size(); ++j)
      obj -= 0.5 * alpha[i] * alpha[j] * label_sign(y[i]) * label_sign(y[j]) *
             kernel_eval(kernel, X.rows[i], X.rows[j]);
  return obj;
}

}  // namespace

TEST_CASE("kernel evaluation matches hand values") {
  const auto a = sv(2, {{0, 1.0}, {1, 2.0}});
  const auto b = sv(2, {{0, 3.0}, {1, 1.0}});

  KernelConfig linear;
  CHECK(kernel_eval(linear, a, b) == 5.0);

  KernelConfig poly;
  poly.kind = KernelConfig::Kind::polynomial;
  poly.gamma = 1.0;
  poly.coef0 = 1.0;
  poly.degree = 2;
  const auto u = sv(1, {{0, 1.0}});
  CHECK(kernel_eval(poly, u, u) == doctest::Approx(4.0).epsilon(1e-15));
  CHECK(kernel_eval(poly, a, b) == doctest::Approx(36.0).epsilon(1e-12));

  KernelConfig sig;
  sig.kind = KernelConfig::Kind::sigmoid;
  sig.gamma = 0.5;
  sig.coef0 = 0.3;
  CHECK(kernel_eval(sig, u, u) == doctest::Approx(0.6640367702678491).epsilon(1e-12));

  SUBCASE("kernels are symmetric") {
    for (const auto& k : {linear, poly, sig}) {
      CHECK(kernel_eval(k, a, b) == kernel_eval(k, b, a));
    }
  }
  SUBCASE("dimension mismatch is rejected") {
    CHECK_THROWS_AS(kernel_eval(linear, a, sv(3, {{0, 1.0}})), ValidationError);
  }
  SUBCASE("config validation") {
    KernelConfig bad = poly;
    bad.degree = 0;
    CHECK_THROWS_AS(bad.validate(), ValidationError);
    bad = poly;
    bad.gamma = 0.0;
    CHECK_THROWS_AS(bad.validate(), ValidationError);
  }
}

TEST_CASE("smo solves the two-point linear problem analytically") {
  // Points x=1 (positive) and x=3 (negative): the maximum-margin separator
  // sits at x=2 with alpha = 0.5 for both points and threshold -2.
  const auto X = matrix(1, {sv(1, {{0, 1.0}}), sv(1, {{0, 3.0}})});
  const std::vector<Label> y{kMis, kNo};
  KernelConfig linear;
  SmoDiagnostics diag;
  const auto model = train_smo(X, y, linear, 1.0, 1e-3, false, &diag);
  const auto* sm = dynamic_cast<const SmoModel*>(model.get());
  REQUIRE(sm != nullptr);

  CHECK(diag.alphas[0] == doctest::Approx(0.5).epsilon(1e-9));
  CHECK(diag.alphas[1] == doctest::Approx(0.5).epsilon(1e-9));
  CHECK(diag.bias == doctest::Approx(-2.0).epsilon(1e-9));
  CHECK(std::abs(diag.alpha_y_sum) < 1e-12);
  CHECK(diag.converged);
  CHECK(sm->n_support() == 2);
  CHECK(!sm->calibrated());

  CHECK(sm->decision_value(sv(1, {{0, 1.0}})) == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(sm->decision_value(sv(1, {{0, 3.0}})) == doctest::Approx(-1.0).epsilon(1e-9));
  CHECK(sm->decision_value(sv(1, {{0, 2.0}})) == doctest::Approx(0.0).scale(1.0).epsilon(1e-9));
  CHECK(model->predict(sv(1, {{0, 0.5}})).label == kMis);
  CHECK(model->predict(sv(1, {{0, 4.0}})).label == kNo);
  CHECK(!model->predict(sv(1, {{0, 4.0}})).probabilistic);

  SUBCASE("dual objective equals the analytic optimum") {
    CHECK(diag.dual_objective == doctest::Approx(0.5).epsilon(1e-9));
    CHECK(dual_objective(X, y, linear, diag.alphas) ==
          doctest::Approx(diag.dual_objective).epsilon(1e-9));
  }
}

TEST_CASE("smo with a quadratic kernel separates xor") {
  const auto X = matrix(2, {sv(2, {}), sv(2, {{0, 1.0}, {1, 1.0}}), sv(2, {{0, 1.0}}),
                            sv(2, {{1, 1.0}})});
  const std::vector<Label> y{kMis, kMis, kNo, kNo};
  KernelConfig poly;
  poly.kind = KernelConfig::Kind::polynomial;
  poly.gamma = 1.0;
  poly.coef0 = 1.0;
  poly.degree = 2;
  SmoDiagnostics diag;
  const auto model = train_smo(X, y, poly, 10.0, 1e-3, false, &diag);
  for (std::size_t i = 0; i < X.rows.size(); ++i) CHECK(model->predict(X.rows[i]).label == y[i]);
  CHECK(diag.converged);

  SUBCASE("multipliers satisfy the dual constraints") {
    double ay = 0.0;
    for (std::size_t i = 0; i < diag.alphas.size(); ++i) {
      CHECK(diag.alphas[i] >= -1e-12);
      CHECK(diag.alphas[i] <= 10.0 + 1e-12);
      ay += diag.alphas[i] * label_sign(y[i]);
    }
    CHECK(std::abs(ay) < 1e-9);
  }
  SUBCASE("no feasible pairwise move improves the dual objective") {
    const double best = dual_objective(X, y, poly, diag.alphas);
    const double delta = 1e-4;
    for (std::size_t i = 0; i < diag.alphas.size(); ++i) {
      for (std::size_t j = 0; j < diag.alphas.size(); ++j) {
        if (i == j) continue;
        for (const double d : {delta, -delta}) {
          auto trial = diag.alphas;
          trial[i] += d;
          trial[j] -= d * label_sign(y[i]) * label_sign(y[j]);
          bool feasible = true;
          for (const double a : trial) feasible = feasible && a >= 0.0 && a <= 10.0;
          if (!feasible) continue;
          // KKT residuals up to the working tolerance allow improvements of
          // at most ~2 * tol * delta.
          CHECK(dual_objective(X, y, poly, trial) <= best + 1e-6);
        }
      }
    }
  }
}

TEST_CASE("smo calibration yields probabilities") {
  const auto X = matrix(2, {sv(2, {{0, 1.0}}), sv(2, {{0, 2.0}}), sv(2, {{0, 1.0}, {1, 1.0}}),
                            sv(2, {{1, 1.0}}), sv(2, {{1, 2.0}}), sv(2, {{1, 3.0}})});
  const std::vector<Label> y{kMis, kMis, kMis, kNo, kNo, kNo};
  KernelConfig linear;
  const auto model = train_smo(X, y, linear, 1.0, 1e-3, true, nullptr);
  const auto* sm = dynamic_cast<const SmoModel*>(model.get());
  REQUIRE(sm != nullptr);
  CHECK(sm->calibrated());
  for (std::size_t i = 0; i < X.rows.size(); ++i) {
    const auto p = model->predict(X.rows[i]);
    CHECK(p.probabilistic);
    CHECK(p.scores[0] + p.scores[1] == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(p.scores[static_cast<int>(y[i])] > 0.5);
    CHECK(p.label == y[i]);
  }
}

TEST_CASE("smo with a sigmoid kernel still terminates and reports convergence") {
  const auto X = matrix(2, {sv(2, {{0, 1.0}}), sv(2, {{0, 2.0}}), sv(2, {{1, 1.0}}),
                            sv(2, {{1, 2.0}}), sv(2, {{0, 1.0}, {1, 1.0}})});
  const std::vector<Label> y{kMis, kMis, kNo, kNo, kMis};
  KernelConfig sig;
  sig.kind = KernelConfig::Kind::sigmoid;
  sig.gamma = 0.5;
  sig.coef0 = -1.0;
  SmoDiagnostics diag;
  const auto model = train_smo(X, y, sig, 1.0, 1e-3, false, &diag);
  CHECK(model->dim() == 2);
  for (const double a : diag.alphas) {
    CHECK(a >= -1e-12);
    CHECK(a <= 1.0 + 1e-12);
  }
  CHECK(std::abs(diag.alpha_y_sum) < 1e-9);
  // Indefinite kernels may hit the work cap; either way the flag must be set
  // coherently and prediction must work.
  const auto p = model->predict(sv(2, {{0, 1.0}}));
  CHECK((p.label == kMis || p.label == kNo));
}

TEST_CASE("smo training is deterministic") {
  const auto X = matrix(2, {sv(2, {{0, 1.0}}), sv(2, {{0, 2.0}}), sv(2, {{1, 1.0}}),
                            sv(2, {{1, 2.0}}), sv(2, {{0, 1.0}, {1, 1.0}}), sv(2, {{1, 4.0}})});
  const std::vector<Label> y{kMis, kMis, kNo, kNo, kMis, kNo};
  KernelConfig poly;
  poly.kind = KernelConfig::Kind::polynomial;
  poly.gamma = 0.5;
  poly.coef0 = 1.0;
  poly.degree = 3;
  const auto a = train_smo(X, y, poly, 2.0, 1e-3, true, nullptr);
  const auto b = train_smo(X, y, poly, 2.0, 1e-3, true, nullptr);
  CHECK(a->to_json().dump() == b->to_json().dump());
}

TEST_CASE("knn votes among cosine neighbors") {
  const auto X = matrix(2, {
                               sv(2, {{0, 1.0}}),            // 0: mis
                               sv(2, {{0, 1.0}, {1, 1.0}}),  // 1: mis
                               sv(2, {{1, 1.0}}),            // 2: no
                               sv(2, {{1, 2.0}}),            // 3: mis (same direction as 2)
                               sv(2, {{0, 2.0}, {1, 1.0}}),  // 4: mis
                           });
  const std::vector<Label> y{kMis, kMis, kNo, kMis, kMis};
  const auto q = sv(2, {{0, 2.0}, {1, 1.0}});

  SUBCASE("k=1 returns the exact match") {
    const auto p = knn_predict(X, y, q, 1);
    CHECK(p.label == kMis);
    CHECK(p.scores[0] == 1.0);
    CHECK(p.scores[1] == 0.0);
    CHECK(p.probabilistic);
  }
  SUBCASE("k=3 gathers the three closest directions") {
    // Distances from q: index 4 at 0, index 1 at 0.051, index 0 at 0.106.
    const auto p = knn_predict(X, y, q, 3);
    CHECK(p.label == kMis);
    CHECK(p.scores[0] == 1.0);
  }
  SUBCASE("k=n yields overall vote fractions") {
    const auto p = knn_predict(X, y, q, 5);
    CHECK(p.scores[0] == doctest::Approx(0.8).epsilon(1e-15));
    CHECK(p.scores[1] == doctest::Approx(0.2).epsilon(1e-15));
  }
  SUBCASE("distance ties favor the lower training index") {
    // Indices 2 and 3 lie in the same direction as the query; with k=1 the
    // lower index (label no) must win even though index 3 is equally close.
    const auto p = knn_predict(X, y, sv(2, {{1, 1.0}}), 1);
    CHECK(p.label == kNo);
  }
  SUBCASE("vote ties favor the lower label index") {
    const auto p = knn_predict(X, y, sv(2, {{1, 1.0}}), 2);
    CHECK(p.scores[0] == 0.5);
    CHECK(p.label == kMis);
  }
  SUBCASE("zero query is equidistant from everything") {
    const auto p = knn_predict(X, y, sv(2, {}), 3);
    // All distances are 1; the first three training indices vote.
    CHECK(p.scores[0] == doctest::Approx(2.0 / 3.0).epsilon(1e-15));
  }
  SUBCASE("k bounds are enforced") {
    CHECK_THROWS_AS(knn_predict(X, y, q, 0), ValidationError);
    CHECK_THROWS_AS(knn_predict(X, y, q, 6), ValidationError);
  }
}

TEST_CASE("knn model wraps the same vote") {
  const auto X = matrix(2, {sv(2, {{0, 1.0}}), sv(2, {{1, 1.0}}), sv(2, {{0, 1.0}, {1, 1.0}})});
  const std::vector<Label> y{kMis, kNo, kMis};
  const auto model = train_knn(X, y, 3);
  const auto q = sv(2, {{0, 4.0}});
  const auto direct = knn_predict(X, y, q, 3);
  const auto wrapped = model->predict(q);
  CHECK(wrapped.label == direct.label);
  CHECK(wrapped.scores[0] == direct.scores[0]);
  CHECK(wrapped.scores[1] == direct.scores[1]);
  CHECK(model->kind() == LearnerKind::knn);
  CHECK_THROWS_AS(static_cast<void>(train_knn(X, y, 4)), ValidationError);
}
