// Apache License, Version 2.0, refer to LICENSE.txt

#include <doctest.h>

#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <vector>

#include "mmnl/error.hpp"
#include "mmnl/rng.hpp"
#include "test_util.hpp"

using namespace mmnl;
using mmnl::testing::mean_se;
using mmnl::testing::variance_se;
using mmnl::testing::within_se;

TEST_CASE("generator is the standard 64-bit Mersenne twister") {
  // The 10000th output of a default-seeded mt19937_64 is fixed by the
  // C++ standard.
  RngStream rng(5489u);
  std::uint64_t v = 0;
  for (int i = 0; i < 10000; ++i) v = rng.next_u64();
  CHECK(v == 9981545732273789042ULL);
}

TEST_CASE("equal seeds give identical streams") {
  RngStream a(42), b(42), c(43);
  bool differs = false;
  for (int i = 0; i < 1000; ++i) {
    const double x = a.normal(), y = b.normal(), z = c.normal();
    CHECK(x == y);
    differs = differs || x != z;
    CHECK(a.uniform() == b.uniform());
    CHECK(a.gamma(0.3) == b.gamma(0.3));
  }
  CHECK(differs);
  CHECK(a.substream(3).next_u64() == b.substream(3).next_u64());
  CHECK(a.substream(3).next_u64() != a.substream(4).next_u64());
}

TEST_CASE("uniform stays in the open unit interval") {
  RngStream rng(1);
  std::vector<double> u(100000);
  for (double& x : u) {
    x = rng.uniform();
    REQUIRE(x > 0.0);
    REQUIRE(x < 1.0);
  }
  const auto m = mean_se(u);
  CHECK(within_se(m.mean, 0.5, m.se));
  CHECK(within_se(m.var, 1.0 / 12.0, variance_se(u)));
}

TEST_CASE("gumbel inverse CDF") {
  CHECK(std::abs(sample_gumbel(std::exp(-1.0))) < 1e-15);
  CHECK(sample_gumbel(std::exp(-std::numbers::e)) == doctest::Approx(-1.0).epsilon(1e-14));
  CHECK(sample_gumbel(0.5) == doctest::Approx(-std::log(std::log(2.0))));
  CHECK(std::abs(sample_gumbel(0.5) - 0.36651) < 5e-6);
  CHECK_THROWS_AS(sample_gumbel(0.0), InvalidInput);
  CHECK_THROWS_AS(sample_gumbel(1.0), InvalidInput);
  CHECK_THROWS_AS(sample_gumbel(-0.2), InvalidInput);
}

TEST_CASE("normal and gamma moments") {
  RngStream rng(2);
  std::vector<double> z(100000), g(100000), gs(100000);
  for (double& x : z) x = rng.normal();
  for (double& x : g) x = rng.gamma(3.5);
  for (double& x : gs) x = rng.gamma(0.2);
  const auto mz = mean_se(z), mg = mean_se(g), ms = mean_se(gs);
  CHECK(within_se(mz.mean, 0.0, mz.se));
  CHECK(within_se(mz.var, 1.0, variance_se(z)));
  CHECK(within_se(mg.mean, 3.5, mg.se));
  CHECK(within_se(mg.var, 3.5, variance_se(g)));
  CHECK(within_se(ms.mean, 0.2, ms.se));
  // Tiny shapes stay finite on the log scale.
  CHECK(std::isfinite(rng.log_gamma_variate(1e-6)));
}

TEST_CASE("beta draws") {
  RngStream rng(3);
  auto moments = [&](double a, double b) {
    std::vector<double> v(100000);
    for (double& x : v) {
      x = sample_beta_rv(a, b, rng);
      REQUIRE(x > 0.0);
      REQUIRE(x < 1.0);
    }
    return v;
  };
  const auto v11 = moments(1, 1);
  const auto m11 = mean_se(v11);
  CHECK(within_se(m11.mean, 0.5, m11.se));
  const auto v32 = moments(3, 2);
  const auto m32 = mean_se(v32);
  CHECK(within_se(m32.mean, 0.6, m32.se));
  CHECK(within_se(m32.var, 0.04, variance_se(v32)));  // ab / ((a+b)^2 (a+b+1))

  int small = 0;
  for (int i = 0; i < 10000; ++i) small += sample_beta_rv(1.0, 1e6, rng) < 1e-4;
  CHECK(small > 9900);
  CHECK_THROWS_AS(sample_beta_rv(0.0, 1.0, rng), InvalidInput);
  CHECK_THROWS_AS(sample_beta_rv(1.0, -1.0, rng), InvalidInput);
}

TEST_CASE("categorical draws") {
  RngStream rng(4);
  const std::vector<double> point{0.0, 1.0, 0.0};
  for (int i = 0; i < 1000; ++i) CHECK(sample_categorical(point, rng) == 1);

  const int n = 100000;
  std::vector<double> hits(n);
  const std::vector<double> even{1.0, 1.0};
  for (double& h : hits) h = sample_categorical(even, rng) == 0;
  auto m = mean_se(hits);
  CHECK(within_se(m.mean, 0.5, m.se));

  const std::vector<double> skew{0.1, 0.4};
  for (double& h : hits) h = sample_categorical(skew, rng) == 1;
  m = mean_se(hits);
  CHECK(within_se(m.mean, 0.8, m.se));

  CHECK_THROWS_AS(sample_categorical(std::vector<double>{0.0, 0.0}, rng), InvalidInput);
  CHECK_THROWS_AS(sample_categorical(std::vector<double>{1.0, -0.1}, rng), InvalidInput);
}

TEST_CASE("multivariate normal draws") {
  RngStream rng(5);
  CHECK_THROWS_AS(sample_mvn(Vector::Zero(2), 1e-18 * Matrix::Identity(2, 2), rng), InvalidInput);
  Matrix asym(2, 2);
  asym << 1.0, 0.5, 0.4, 1.0;
  CHECK_THROWS_AS(sample_mvn(Vector::Zero(2), asym, rng), InvalidInput);

  const int n = 100000;
  Matrix cov(2, 2);
  cov << 2.0, 1.0, 1.0, 2.0;
  const Vector mean{{1.0, 2.0}};
  std::vector<double> x0(n), x1(n), prod(n);
  for (int i = 0; i < n; ++i) {
    const Vector v = sample_mvn(mean, cov, rng);
    x0[i] = v[0];
    x1[i] = v[1];
    prod[i] = (v[0] - 1.0) * (v[1] - 2.0);
  }
  const auto m0 = mean_se(x0), m1 = mean_se(x1), mp = mean_se(prod);
  CHECK(within_se(m0.mean, 1.0, m0.se));
  CHECK(within_se(m1.mean, 2.0, m1.se));
  CHECK(within_se(m0.var, 2.0, variance_se(x0)));
  CHECK(within_se(m1.var, 2.0, variance_se(x1)));
  CHECK(within_se(mp.mean, 1.0, mp.se));
}

TEST_CASE("inverse wishart draws") {
  RngStream rng(6);
  SUBCASE("symmetric and positive definite") {
    Matrix psi(3, 3);
    psi << 2.0, 0.3, 0.1, 0.3, 1.0, -0.2, 0.1, -0.2, 0.5;
    for (int i = 0; i < 1000; ++i) {
      const Matrix tau = sample_inverse_wishart(3.5, psi, rng);
      CHECK((tau - tau.transpose()).cwiseAbs().maxCoeff() < 1e-10);
      CHECK(is_spd(tau));
    }
    CHECK_THROWS_AS(sample_inverse_wishart(3.5, -psi, rng), InvalidInput);
  }
  SUBCASE("mean in the nu-scaled convention, d = 2") {
    const int n = 100000;
    std::vector<double> t00(n), t01(n), t11(n);
    for (int i = 0; i < n; ++i) {
      const Matrix tau = sample_inverse_wishart(10.0, Matrix::Identity(2, 2), rng);
      t00[i] = tau(0, 0);
      t01[i] = tau(0, 1);
      t11[i] = tau(1, 1);
    }
    const auto a = mean_se(t00), b = mean_se(t01), c = mean_se(t11);
    CHECK(within_se(a.mean, 10.0 / 7.0, a.se));
    CHECK(within_se(b.mean, 0.0, b.se));
    CHECK(within_se(c.mean, 10.0 / 7.0, c.se));
  }
  SUBCASE("scalar reduction: inverse gamma") {
    const int n = 100000;
    std::vector<double> t(n);
    for (double& x : t) x = sample_inverse_wishart(4.0, Matrix::Identity(1, 1), rng)(0, 0);
    const auto m = mean_se(t);
    CHECK(within_se(m.mean, 2.0, m.se));
  }
}

TEST_CASE("normal inverse wishart draws") {
  RngStream rng(7);
  SUBCASE("huge lambda pins the mean") {
    NIWParams p = NIWParams::defaults(2);
    p.m = Vector{{1.5, -0.5}};
    p.nu0 = 10.0;
    p.lambda = 1e12;
    for (int i = 0; i < 100; ++i) {
      const Theta t = sample_niw(p, rng);
      CHECK((t.mu - p.m).cwiseAbs().maxCoeff() < 1e-5);
    }
  }
  SUBCASE("covariance of mu is E[tau] / lambda") {
    NIWParams p = NIWParams::defaults(2);
    p.nu0 = 10.0;
    const int n = 100000;
    std::vector<double> m0(n), m1(n), sq0(n), sq1(n);
    for (int i = 0; i < n; ++i) {
      const Theta t = sample_niw(p, rng);
      m0[i] = t.mu[0];
      m1[i] = t.mu[1];
      sq0[i] = t.mu[0] * t.mu[0];
      sq1[i] = t.mu[1] * t.mu[1];
    }
    const auto a = mean_se(m0), b = mean_se(m1), c = mean_se(sq0), d = mean_se(sq1);
    CHECK(within_se(a.mean, 0.0, a.se));
    CHECK(within_se(b.mean, 0.0, b.se));
    CHECK(within_se(c.mean, 10.0 / 7.0, c.se));
    CHECK(within_se(d.mean, 10.0 / 7.0, d.se));
  }
  SUBCASE("parameter validation") {
    NIWParams p = NIWParams::defaults(2);
    p.lambda = 0.0;
    CHECK_THROWS_AS(p.validate(), InvalidInput);
    p = NIWParams::defaults(2);
    p.nu0 = 0.5;
    CHECK_THROWS_AS(p.validate(), InvalidInput);
    p = NIWParams::defaults(2);
    p.S0(0, 1) = 0.5;
    CHECK_THROWS_AS(p.validate(), InvalidInput);
  }
}

TEST_CASE("mvn log density") {
  Matrix cov(2, 2);
  cov << 2.0, 0.5, 0.5, 1.0;
  const Matrix L = cholesky_spd(cov);
  const Vector x{{0.3, -1.2}}, mu{{1.0, 0.5}};
  const Vector r = x - mu;
  const double oracle = -std::log(2.0 * std::numbers::pi) - 0.5 * std::log(cov.determinant()) -
                        0.5 * r.dot(cov.inverse() * r);
  CHECK(mvn_log_density(x, mu, L) == doctest::Approx(oracle).epsilon(1e-13));
}

TEST_CASE("factor_draw accepts ill-conditioned draws that cholesky_spd rejects") {
  // Rotated diag(1e16, 1): the shape a nu = 2 inverse-Wishart produces about
  // once in 1e7 draws.
  const double c = std::cos(0.3), s = std::sin(0.3);
  Matrix R(2, 2);
  R << c, -s, s, c;
  const Matrix cov = R * Vector{{1e16, 1.0}}.asDiagonal() * R.transpose();
  CHECK_THROWS_AS(cholesky_spd(cov), InvalidInput);
  const Matrix L = factor_draw(cov);
  CHECK((L.diagonal().array() > 0.0).all());
  CHECK((L * L.transpose() - cov).cwiseAbs().maxCoeff() <= 1e-12 * cov.cwiseAbs().maxCoeff());

  SUBCASE("well-conditioned input gives the plain Cholesky factor") {
    Matrix good(2, 2);
    good << 2.0, 0.5, 0.5, 1.0;
    CHECK((factor_draw(good) - cholesky_spd(good)).cwiseAbs().maxCoeff() == 0.0);
  }
  SUBCASE("rank-one input gets a rounding-level ridge") {
    const Vector v{{1.0, 2.0}};
    const Matrix rank_one = v * v.transpose();
    const Matrix F = factor_draw(rank_one);
    CHECK(F.allFinite());
    CHECK((F.diagonal().array() > 0.0).all());
    CHECK((F * F.transpose() - rank_one).cwiseAbs().maxCoeff() <= 1e-12);
  }
  SUBCASE("non-finite input still throws") {
    Matrix bad = Matrix::Identity(2, 2);
    bad(0, 0) = std::numeric_limits<double>::quiet_NaN();
    CHECK_THROWS_AS(factor_draw(bad), InvalidInput);
  }
}
