#include <stdexcept>
#include <cmath>
#include <vector>

#include "doctest.h"
#include "screenlab/gaussian.hpp"
#include "screenlab/rng.hpp"

using namespace screenlab;

TEST_SUITE("gaussian") {

TEST_CASE("model validation") {
  CHECK_THROWS_AS(GaussianModel(0.0, 0.0, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(GaussianModel(0.0, 1.0, -2.0), std::invalid_argument);
}

TEST_CASE("conditional variance basics") {
  const GaussianModel unit(0.0, 1.0, 1.0);
  CHECK(conditional_variance(unit, 0) == doctest::Approx(1.0));
  CHECK(conditional_variance(unit, 1) == doctest::Approx(0.5).epsilon(1e-15));

  const GaussianModel model(2.0, 1.7, 0.6);
  double prev = conditional_variance(model, 0);
  CHECK(prev == doctest::Approx(1.7));
  for (int n = 1; n <= 100; ++n) {
    const double v = conditional_variance(model, n);
    CHECK(v < prev);
    CHECK(v == doctest::Approx(1.0 / (1.0 / 1.7 + n / 0.6)).epsilon(1e-15));
    prev = v;
  }
  CHECK(conditional_variance(model, 1000000) < 1e-5);
}

TEST_CASE("conditional mean basics") {
  const GaussianModel model(2.0, 1.5, 0.5);
  const std::vector<double> centered(7, 2.0);
  CHECK(conditional_mean(model, centered) == doctest::Approx(2.0).epsilon(1e-14));

  // Large n with a fixed sample mean drives the posterior to that mean.
  std::vector<double> large(20000, 3.25);
  CHECK(conditional_mean(model, large) == doctest::Approx(3.25).epsilon(1e-4));
}

TEST_CASE("closed forms match the Schur oracle") {
  RandomStream rng(404);
  for (double sq2 : {0.5, 1.0, 2.0}) {
    for (double se2 : {0.5, 1.0, 2.0}) {
      const GaussianModel model(0.7, sq2, se2);
      for (int n : {1, 2, 5, 10, 50}) {
        const auto oracle = schur_oracle(model, n);
        CHECK(!oracle.ill_conditioned);
        const double weight = 1.0 / (se2 / sq2 + n);
        INFO("sq2=" << (sq2) << " " << "se2=" << (se2) << " " << "n=" << (n));
        CHECK(oracle.weight == doctest::Approx(weight).epsilon(1e-9));
        CHECK(oracle.variance ==
              doctest::Approx(conditional_variance(model, n)).epsilon(1e-9));

        std::vector<double> data(n);
        for (auto& y : data) y = model.mu_q + rng.next_gaussian();
        CHECK(conditional_mean(model, data) ==
              doctest::Approx(schur_conditional_mean(model, data)).epsilon(1e-9));
      }
    }
  }
}

TEST_CASE("single observation weight is the regression coefficient") {
  const GaussianModel model(0.0, 2.0, 0.5);
  const auto oracle = schur_oracle(model, 1);
  CHECK(oracle.weight == doctest::Approx(2.0 / 2.5).epsilon(1e-12));
}

TEST_CASE("posterior summary weight stays inside (0, 1/n)") {
  RandomStream rng(73);
  for (double sq2 : {0.4, 1.0, 3.0}) {
    for (double se2 : {0.4, 1.0, 3.0}) {
      const GaussianModel model(1.0, sq2, se2);
      for (int n : {1, 2, 7, 25}) {
        std::vector<double> data(n);
        for (auto& y : data) y = rng.next_gaussian();
        const auto summary = conditional_summary(model, data);
        CHECK(summary.weight > 0.0);
        CHECK(summary.weight < 1.0 / n);
        CHECK(summary.variance < sq2);
      }
    }
  }
}

TEST_CASE("rank-1 inverse entries") {
  const auto plain = rank1_inverse(2.0, 0.0, 6);
  CHECK(plain.off_diagonal == doctest::Approx(0.0));
  CHECK(plain.on_diagonal == doctest::Approx(0.5));

  CHECK_THROWS_AS(rank1_inverse(0.0, 1.0, 3), std::invalid_argument);
  CHECK_THROWS_AS(rank1_inverse(1.0, -0.25, 4), std::invalid_argument);
}

TEST_CASE("rank-1 inverse solves the matrix equation") {
  for (double d : {0.5, 1.0, 3.0}) {
    for (double c : {0.25, 1.0, 2.0}) {
      for (int n : {1, 2, 5, 10, 50}) {
        const auto inv = rank1_inverse(d, c, n);
        // (A + B) * inverse should be the identity; entries of the product
        // come in two flavors by symmetry.
        const double row_sum_inv = inv.on_diagonal + (n - 1) * inv.off_diagonal;
        const double diag_entry = (d + c) * inv.on_diagonal + (n - 1) * c * inv.off_diagonal;
        const double off_entry = d * inv.off_diagonal + c * row_sum_inv;
        INFO("d=" << (d) << " " << "c=" << (c) << " " << "n=" << (n));
        CHECK(diag_entry == doctest::Approx(1.0).epsilon(1e-10));
        CHECK(off_entry == doctest::Approx(0.0).epsilon(1e-10));
      }
    }
  }
}

TEST_CASE("rank-1 inverse matches a plain Gaussian elimination") {
  const GaussianModel model(0.0, 1.4, 0.7);
  const int n = 8;
  const auto inv = rank1_inverse(model.sigma_eta2, model.sigma_q2, n);

  // Invert the first column of Sigma22 the dumb way.
  std::vector<std::vector<double>> m(n, std::vector<double>(n + 1, 0.0));
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) m[i][j] = model.sigma_q2;
    m[i][i] += model.sigma_eta2;
  }
  m[0][n] = 1.0;
  for (int col = 0; col < n; ++col) {
    int pivot = col;
    for (int row = col + 1; row < n; ++row)
      if (std::abs(m[row][col]) > std::abs(m[pivot][col])) pivot = row;
    std::swap(m[col], m[pivot]);
    for (int row = 0; row < n; ++row) {
      if (row == col) continue;
      const double f = m[row][col] / m[col][col];
      for (int j = col; j <= n; ++j) m[row][j] -= f * m[col][j];
    }
  }
  const double numeric_diag = m[0][n] / m[0][0];
  const double numeric_off = m[1][n] / m[1][1];
  CHECK(inv.on_diagonal == doctest::Approx(numeric_diag).epsilon(1e-11));
  CHECK(inv.off_diagonal == doctest::Approx(numeric_off).epsilon(1e-11));
}

TEST_CASE("variance equalization") {
  const GaussianModel clean(1.0, 2.0, 0.5);
  const GaussianModel same(1.0, 2.0, 0.5);
  CHECK(equalize_variance_tests(clean, same, 6).n2 == doctest::Approx(6.0));

  const GaussianModel noisy(1.0, 2.0, 2.0);  // 4x the noise variance
  const auto eq = equalize_variance_tests(clean, noisy, 5);
  CHECK(eq.n2 == doctest::Approx(20.0).epsilon(1e-14));
  CHECK(eq.n2_ceil == 20);
  CHECK(conditional_variance(noisy, 20) ==
        doctest::Approx(conditional_variance(clean, 5)).epsilon(1e-12));
  CHECK(eq.variance_gap_at_ceil == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("non-integral equalization reports the ceiling residual") {
  const GaussianModel clean(0.0, 1.0, 1.0);
  const GaussianModel noisy(0.0, 1.0, 1.5);
  const auto eq = equalize_variance_tests(clean, noisy, 3);
  CHECK(eq.n2 == doctest::Approx(4.5));
  CHECK(eq.n2_ceil == 5);
  // Extra tests push the noisy group's variance slightly below.
  CHECK(eq.variance_gap_at_ceil < 0.0);
}

TEST_CASE("expectation gap factorizes through the sample means") {
  const GaussianModel clean(0.5, 1.2, 0.8);
  const GaussianModel noisy(0.5, 1.2, 1.6);
  const int n1 = 4;

  // Equal sample means: the gap vanishes.
  std::vector<double> d1{1.0, 2.0, 0.5, 0.5};  // mean 1
  std::vector<double> d2(8, 1.0);
  const auto zero_gap = expectations_match_check(clean, noisy, n1, d1, d2);
  CHECK(zero_gap.gap == doctest::Approx(0.0).epsilon(1e-12));

  // Random draws: gap / (ybar1 - ybar2) is one constant.
  RandomStream rng(31415);
  double reference = 0.0;
  for (int rep = 0; rep < 100; ++rep) {
    std::vector<double> a(n1), b(8);
    double sa = 0.0, sb = 0.0;
    for (auto& y : a) { y = rng.next_gaussian(); sa += y; }
    for (auto& y : b) { y = 2.0 + rng.next_gaussian(); sb += y; }
    const double mean_diff = sa / a.size() - sb / b.size();
    const auto gap = expectations_match_check(clean, noisy, n1, a, b);
    const double ratio = gap.gap / mean_diff;
    CHECK(ratio == doctest::Approx(gap.coefficient).epsilon(1e-10));
    if (rep == 0) reference = ratio;
    CHECK(ratio == doctest::Approx(reference).epsilon(1e-10));

    // And the numeric Schur path agrees with the closed-form gap.
    const double schur_gap =
        schur_conditional_mean(clean, a) - schur_conditional_mean(noisy, b);
    CHECK(gap.gap == doctest::Approx(schur_gap).epsilon(1e-9));
  }
}

TEST_CASE("non-integral equalized counts are rejected") {
  const GaussianModel clean(0.0, 1.0, 1.0);
  const GaussianModel noisy(0.0, 1.0, 1.5);
  std::vector<double> d1{0.0, 1.0, 2.0};
  std::vector<double> d2{0.0, 1.0, 2.0, 3.0};
  CHECK_THROWS_AS(expectations_match_check(clean, noisy, 3, d1, d2),
                  std::invalid_argument);
}

}  // TEST_SUITE
