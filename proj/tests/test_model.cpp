// Apache License, Version 2.0, refer to LICENSE.txt

#include <doctest.h>

#include <cmath>

#include "mmnl/error.hpp"
#include "mmnl/model.hpp"
#include "mmnl/rng.hpp"
#include "test_util.hpp"

using namespace mmnl;
using mmnl::testing::reference_x;

namespace {

// Independent logit: plain exponentials of small utilities.
Vector naive_logit(const CovariateMatrix& x, const Vector& beta) {
  Vector e(static_cast<Eigen::Index>(x.alternatives()));
  for (std::size_t j = 0; j < x.alternatives(); ++j) {
    double u = 0.0;
    for (std::size_t k = 0; k < x.dim(); ++k) {
      u += x.values()(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(k)) *
           beta[static_cast<Eigen::Index>(k)];
    }
    e[static_cast<Eigen::Index>(j)] = std::exp(u);
  }
  return e / e.sum();
}

}  // namespace

TEST_CASE("covariate matrix validation") {
  CHECK_THROWS_AS(CovariateMatrix(RowMatrix::Zero(1, 2)), InvalidInput);
  CHECK_THROWS_AS(CovariateMatrix(RowMatrix::Zero(3, 0)), InvalidInput);
  RowMatrix bad = RowMatrix::Zero(2, 2);
  bad(1, 1) = std::nan("");
  CHECK_THROWS_AS(CovariateMatrix{bad}, InvalidInput);
  const CovariateMatrix x = reference_x();
  CHECK(x.alternatives() == 3);
  CHECK(x.dim() == 2);
  CHECK(x.values()(1, 1) == doctest::Approx(0.2));
}

TEST_CASE("observation choices are 1-based") {
  CHECK_THROWS_AS(Observation(1, 0, reference_x()), InvalidInput);
  CHECK_THROWS_AS(Observation(1, 4, reference_x()), InvalidInput);
  const Observation o(7, 3, reference_x());
  CHECK(o.choice() == 3);
  CHECK(o.chosen() == 2);
  CHECK_THROWS_AS(PanelObservation(1, {1, 2}, {reference_x()}), InvalidInput);
  CHECK_THROWS_AS(PanelObservation(1, {}, {}), InvalidInput);
}

TEST_CASE("datasets reject mismatched dimensions") {
  ChoiceDataset data(3, 2);
  data.add(Observation(1, 1, reference_x()));
  const double flat[] = {1, 2, 3, 4};
  CHECK_THROWS_AS(data.add(Observation(2, 1, CovariateMatrix::from_flat(flat, 2, 2))),
                  InvalidInput);
  CHECK_THROWS_AS(data.add(Observation(2, 1, CovariateMatrix::from_flat(flat, 4, 1))),
                  InvalidInput);
  const PanelDataset panel = PanelDataset::from_choices(data);
  CHECK(panel.size() == 1);
  CHECK(panel[0].periods() == 1);
}

TEST_CASE("mnl_prob: uniform at beta = 0") {
  const Simplex p = mnl_prob(reference_x(), Vector::Zero(2));
  for (std::size_t j = 0; j < 3; ++j) CHECK(p[j] == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
}

TEST_CASE("mnl_prob: worked example at the reference point") {
  const Simplex p = mnl_prob(reference_x(), Vector{{-5.0, 5.0}});
  // exp(-9.5), exp(-4), exp(-0.5) normalized.
  const double e1 = std::exp(-9.5), e2 = std::exp(-4.0), e3 = std::exp(-0.5);
  const double s = e1 + e2 + e3;
  CHECK(std::abs(p[0] - e1 / s) < 1e-15);
  CHECK(std::abs(p[1] - e2 / s) < 1e-15);
  CHECK(std::abs(p[2] - e3 / s) < 1e-15);
  CHECK(std::abs(p[0] - 0.000120) < 1e-6);
  CHECK(std::abs(p[1] - 0.029309) < 1e-6);
  CHECK(std::abs(p[2] - 0.970571) < 1e-6);
}

TEST_CASE("mnl_prob: shift invariance and overflow safety") {
  const CovariateMatrix x = reference_x();
  const Vector beta{{0.7, -1.3}};
  // Adding 1000 to every utility: shift the intercept column by 1000 / beta_1.
  RowMatrix shifted = x.values();
  shifted.col(0).array() += 1000.0 / beta[0];
  const Simplex a = mnl_prob(x, beta);
  const Simplex b = mnl_prob(CovariateMatrix(shifted), beta);
  for (std::size_t j = 0; j < 3; ++j) CHECK(std::abs(a[j] - b[j]) < 1e-12);

  // Row shift by an arbitrary d-vector.
  RowMatrix row_shift = x.values();
  row_shift.rowwise() += Eigen::RowVector2d(3.5, -2.25);
  const Simplex c = mnl_prob(CovariateMatrix(row_shift), beta);
  for (std::size_t j = 0; j < 3; ++j) CHECK(std::abs(a[j] - c[j]) < 1e-12);

  // Utilities near 700 stay finite.
  const Simplex big = mnl_prob(x, Vector{{700.0, 0.0}});
  for (std::size_t j = 0; j < 3; ++j) CHECK(big[j] == doctest::Approx(1.0 / 3.0));
  CHECK_THROWS_AS(mnl_prob(x, Vector{{1e308, 1e308}}), InvalidInput);
  CHECK_THROWS_AS(mnl_prob(x, Vector{{1.0, 2.0, 3.0}}), InvalidInput);
}

TEST_CASE("mnl_prob: entries positive and summing to one over random inputs") {
  RngStream rng(11);
  for (int rep = 0; rep < 200; ++rep) {
    RowMatrix v(4, 3);
    for (Eigen::Index i = 0; i < v.size(); ++i) v.data()[i] = 4.0 * rng.normal();
    const CovariateMatrix x(v);
    const Vector beta{{rng.normal(), rng.normal(), rng.normal()}};
    const Simplex p = mnl_prob(x, beta);
    CHECK(std::abs(p.values().sum() - 1.0) < 1e-12);
    CHECK(p.values().minCoeff() > 0.0);
    CHECK((p.values() - naive_logit(x, beta)).cwiseAbs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("mixture_choice_prob") {
  const CovariateMatrix x = reference_x();
  SUBCASE("two-point truth") {
    const MixingDistribution g({0.5, 0.5}, {Vector{{-5.0, 5.0}}, Vector{{5.0, -5.0}}});
    const Simplex p = mixture_choice_prob(x, g);
    const Vector oracle = 0.5 * naive_logit(x, Vector{{-5.0, 5.0}}) +
                          0.5 * naive_logit(x, Vector{{5.0, -5.0}});
    CHECK((p.values() - oracle).cwiseAbs().maxCoeff() < 1e-14);
    CHECK(std::abs(p[0] - 0.4980) < 5e-5);
    CHECK(std::abs(p[1] - 0.0167) < 5e-5);
    CHECK(std::abs(p[2] - 0.4853) < 5e-5);
  }
  SUBCASE("degenerate mixtures") {
    const Vector z{{0.3, -1.1}};
    const Simplex single = mixture_choice_prob(x, MixingDistribution({1.0}, {z}));
    const Simplex four =
        mixture_choice_prob(x, MixingDistribution({0.25, 0.25, 0.25, 0.25}, {z, z, z, z}));
    const Simplex direct = mnl_prob(x, z);
    CHECK((single.values() - direct.values()).cwiseAbs().maxCoeff() < 1e-15);
    CHECK((four.values() - direct.values()).cwiseAbs().maxCoeff() < 1e-15);
  }
  SUBCASE("affine in the weights") {
    const std::vector<Vector> atoms{Vector{{1.0, 0.0}}, Vector{{-2.0, 1.5}}, Vector{{0.5, 3.0}}};
    const std::vector<double> p{0.2, 0.5, 0.3}, q{0.6, 0.1, 0.3};
    const double alpha = 0.35;
    std::vector<double> mix(3);
    for (int k = 0; k < 3; ++k) mix[k] = alpha * p[k] + (1 - alpha) * q[k];
    const Vector lhs = alpha * mixture_choice_prob(x, MixingDistribution(p, atoms)).values() +
                       (1 - alpha) * mixture_choice_prob(x, MixingDistribution(q, atoms)).values();
    const Vector rhs = mixture_choice_prob(x, MixingDistribution(mix, atoms)).values();
    CHECK((lhs - rhs).cwiseAbs().maxCoeff() < 1e-12);
  }
  SUBCASE("invalid weights") {
    CHECK_THROWS_AS(MixingDistribution({0.5, 0.6}, {Vector::Zero(2), Vector::Zero(2)}),
                    InvalidInput);
    CHECK_THROWS_AS(MixingDistribution({1.5, -0.5}, {Vector::Zero(2), Vector::Zero(2)}),
                    InvalidInput);
    CHECK_THROWS_AS(MixingDistribution({1.0}, {Vector::Zero(2), Vector::Zero(2)}),
                    InvalidInput);
  }
}

TEST_CASE("panel log-likelihood") {
  const CovariateMatrix x = reference_x();
  SUBCASE("single period equals the chosen logit") {
    const PanelObservation obs(1, {2}, {x});
    const Vector beta{{0.4, -0.8}};
    CHECK(std::abs(std::exp(panel_log_likelihood(obs, beta)) - mnl_prob(x, beta)[1]) < 1e-12);
  }
  SUBCASE("uniform case") {
    std::vector<int> choices(10, 1);
    std::vector<CovariateMatrix> xs(10, x);
    const PanelObservation obs(1, choices, xs);
    CHECK(panel_log_likelihood(obs, Vector::Zero(2)) == doctest::Approx(10.0 * std::log(1.0 / 3.0)));
    CHECK(std::abs(panel_log_likelihood(obs, Vector::Zero(2)) + 10.9861) < 5e-5);
  }
  SUBCASE("two periods, worked example") {
    const PanelObservation obs(1, {3, 3}, {x, x});
    const double ll = panel_log_likelihood(obs, Vector{{-5.0, 5.0}});
    const Vector p = naive_logit(x, Vector{{-5.0, 5.0}});
    CHECK(ll == doctest::Approx(2.0 * std::log(p[2])).epsilon(1e-13));
    CHECK(std::abs(ll + 0.05974) < 5e-6);
    CHECK(std::exp(ll) <= 1.0);
    CHECK(std::exp(ll) > 0.0);
  }
}

TEST_CASE("simplex validation") {
  CHECK_THROWS_AS(Simplex(Vector{{0.5, 0.6}}), InvalidInput);
  CHECK_THROWS_AS(Simplex(Vector{{1.2, -0.2}}), InvalidInput);
  const Simplex s(Vector{{0.25, 0.75}});
  CHECK(s[1] == 0.75);
}
