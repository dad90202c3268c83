#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "irswb/bounds.hpp"
#include "irswb/errors.hpp"

using namespace irswb;

namespace {

// log(1 + y) by its power series, |y| < 1.
double log1p_series(double y) {
  double s = 0, term = y;
  for (int i = 1; i < 200; ++i) {
    s += term / i;
    term *= -y;
  }
  return s;
}

}  // namespace

TEST_CASE("relative entropy") {
  CHECK(rel_entropy(0.3, 0.3) == 0.0);
  CHECK(rel_entropy(1.0, 0.25) == doctest::Approx(std::log(4.0)).epsilon(1e-14));
  CHECK(rel_entropy(0.0, 0.25) == doctest::Approx(std::log(4.0 / 3.0)).epsilon(1e-14));
  // 1/2·log(2) + 1/2·log(2/3), rewritten through log(1+y) for y = 1 and y = −1/3.
  const double series = 0.5 * std::log(2.0) + 0.5 * log1p_series(-1.0 / 3.0);
  CHECK(rel_entropy(0.5, 0.25) == doctest::Approx(series).epsilon(1e-13));
  CHECK(rel_entropy(0.5, 0.25) == doctest::Approx(0.14384103622589045).epsilon(1e-14));
  CHECK_THROWS_AS(rel_entropy(0.5, 0.0), DomainError);
  CHECK_THROWS_AS(rel_entropy(0.5, 1.0), DomainError);
  for (int i = 0; i <= 1000; ++i)
    for (int j = 1; j < 1000; j += 7) {
      const double a = i / 1000.0, p = j / 1000.0;
      const double h = rel_entropy(a, p);
      CHECK(h >= 0);
      if (i != j) CHECK(h > 0);
    }
}

TEST_CASE("hypergeometric law") {
  // Fix K = U = {0,1} among 4 points and count |K·σ ∩ U| = 1 over all 24 permutations.
  std::vector<int> perm{0, 1, 2, 3};
  int hits = 0, total = 0;
  do {
    int inter = (perm[0] < 2) + (perm[1] < 2);
    hits += inter == 1;
    ++total;
  } while (std::next_permutation(perm.begin(), perm.end()));
  CHECK(hypergeom_pmf(4, 2, 2, 1) == Rational(hits, total));
  CHECK(hypergeom_pmf(4, 2, 2, 1) == Rational(2, 3));
  CHECK(hypergeom_pmf(4, 2, 2, 3) == 0);
  for (unsigned x = 0; x <= 12; ++x)
    for (unsigned u = 0; u <= x; ++u)
      for (unsigned k = 0; k <= x; ++k) {
        Rational s = 0;
        for (unsigned i = 0; i <= k; ++i) s += hypergeom_pmf(x, u, k, i);
        CHECK(s == 1);
      }
}

TEST_CASE("chernoff bound dominates the exact tail") {
  CHECK(chernoff_tail(0.3, 0.0, 5, TailSide::upper) == 1.0);
  CHECK(chernoff_tail(0.3, 1e-9, 5, TailSide::upper) == doctest::Approx(1.0));
  for (double k = 1; k < 50; ++k)
    CHECK(chernoff_tail(0.3, 0.2, k + 1, TailSide::upper) < chernoff_tail(0.3, 0.2, k, TailSide::upper));
  CHECK_THROWS_AS(chernoff_tail(0.8, 0.3, 5, TailSide::upper), DomainError);
  auto r = chernoff_dominance(10);
  CHECK(r.checked == 1748);
  CHECK(r.failures == 0);
}

TEST_CASE("sup ratio") {
  double best = 0;
  for (unsigned x = 2; x <= 50; ++x)
    for (unsigned u = 0; u <= x; ++u)
      for (unsigned k = 0; 2 * k <= x; ++k) best = std::max(best, sup_bound_ratio(x, u, k));
  // Regression constant from the exhaustive scan.
  CHECK(best <= 0.5557748832);
  CHECK(best == doctest::Approx(0.5557748831852652).epsilon(1e-12));
  // Symmetric case: the maximizing i is k/2.
  for (unsigned x = 4; x <= 40; x += 2)
    for (unsigned k = 2; 2 * k <= x; k += 2) {
      const unsigned u = x / 2;
      Rational top = 0;
      unsigned arg = 0;
      for (unsigned i = 1; i < k; ++i) {
        // pmf(i)^2·i(k−i) compares the same way as pmf(i)·sqrt(i(k−i)/k).
        Rational v = hypergeom_pmf(x, u, k, i);
        v = v * v * Rational(i * (k - i));
        if (v > top) top = v, arg = i;
      }
      CHECK(arg == k / 2);
    }
  CHECK(sup_bound_ratio(4, 2, 2) == doctest::Approx(2.0 / 3.0 * std::sqrt(0.5)));
  CHECK_THROWS_AS(sup_bound_ratio(4, 2, 3), DomainError);
}

TEST_CASE("stirling bounds") {
  auto b1 = stirling_bounds(1);
  CHECK(b1.lower <= 1.0);
  CHECK(b1.upper >= 1.0);
  auto b10 = stirling_bounds(10);
  CHECK(b10.lower <= 3628800.0);
  CHECK(b10.upper >= 3628800.0);
  double f = 1;
  for (unsigned n = 1; n <= 170; ++n) {
    f *= n;
    auto b = stirling_bounds(n);
    CHECK(b.lower <= f);
    CHECK(f <= b.upper);
    CHECK(b.upper / b.lower == doctest::Approx(std::exp(1.0) / std::sqrt(2 * M_PI)));
  }
  for (unsigned n = 1; n <= 30; ++n) {
    auto b = stirling_bounds(n);
    CHECK(Rational(b.lower) <= Rational(factorial(n)));
    CHECK(Rational(factorial(n)) <= Rational(b.upper));
  }
}

TEST_CASE("size bound") {
  CHECK(size1_bound(2, 2, 2, 2) == doctest::Approx(4.0 / 3.0));
  for (std::size_t n = 3; n < 20; ++n) CHECK(log_size1_bound(2, 2, 2, n + 1) < log_size1_bound(2, 2, 2, n));
  CHECK(size1_bound(1, 1, 2, 12) < 1e-300);
}

TEST_CASE("case bounds") {
  BoundParams p{2, 4, 1, 1, 0.1};
  CHECK(p.alpha() == 0.125);
  CHECK_THROWS_AS((BoundParams{2, 4, 1, 1, 0.3}.validate()), DomainError);
  CHECK_THROWS_AS((BoundParams{1, 4, 1, 1, 0.1}.validate()), DomainError);
  for (std::size_t n = 2; n < 60; ++n) CHECK(delta_n(p, n + 1) > delta_n(p, n));
  // With q = 4 the crossover of case III lies beyond double range, so the scan uses q = 1.
  const BoundParams p1{2, 1, 1, 1, 0.1};
  for (auto which : {BoundCase::I, BoundCase::II, BoundCase::III, BoundCase::III_aggregate}) {
    // Each bound is decreasing in k_n once past the point where the prefactor stops dominating.
    double prev = INFINITY;
    double decreasing_from = 0;
    for (double k = 2; k < 1e300; k *= 1.5) {
      const double v = log_case_bound(which, p1, k, k / 2);
      CHECK(std::isfinite(v));
      if (v >= prev) decreasing_from = 0;
      else if (decreasing_from == 0) decreasing_from = k;
      prev = v;
    }
    CHECK(decreasing_from > 0);
  }
  CHECK(log_case_one_by_gap(p, 100, 0) == doctest::Approx(std::log(1 + std::exp(-std::pow(100.0, 1.0 / 64)))));
}

TEST_CASE("aggregate series settles") {
  BoundParams p{2, 4, 1, 1, 0.1};
  auto rows = aggregate_series(p, 1'000'000);
  // Past n ≈ 2003 the k_n term is gone and only C/n² remains.
  for (std::size_t n = 2100; n <= 1'000'000; n += 997)
    CHECK(rows[n - 1].log_term == doctest::Approx(-2 * std::log(static_cast<double>(n))).epsilon(1e-9));
  CHECK(rows[99'999].log_partial_sum == doctest::Approx(rows.back().log_partial_sum).epsilon(1e-12));
  CHECK(std::exp(max_log_increment(p, 200, 200)) > 1e50);
}
