#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>

#include "irswb/errors.hpp"
#include "irswb/montecarlo.hpp"

using namespace irswb;

namespace {

bool within(const Estimate& e, const Rational& exact, double sigmas) {
  const double p = static_cast<double>(exact);
  const double se = std::max(e.std_error, std::sqrt(p * (1 - p) / static_cast<double>(e.trials)));
  return std::abs(e.p_hat - p) <= sigmas * se + 1e-12;
}

std::vector<LeafSet> subsets_of(std::uint32_t n, std::size_t k) {
  std::vector<LeafSet> out;
  for (std::uint32_t mask = 0; mask < (1u << n); ++mask) {
    if (static_cast<std::size_t>(__builtin_popcount(mask)) != k) continue;
    LeafSet s;
    for (std::uint32_t i = 0; i < n; ++i)
      if (mask >> i & 1) s.push_back(i);
    out.push_back(s);
  }
  return out;
}

// Splits a subset of the level into its parts in the first two cones of size m.
std::pair<LeafSet, LeafSet> split(const LeafSet& s, std::uint32_t m) {
  LeafSet a, b;
  for (auto x : s) {
    if (x < m) a.push_back(x);
    else if (x < 2 * m) b.push_back(x - m);
  }
  return {a, b};
}

}  // namespace

TEST_CASE("counter rng and subset sampling") {
  CounterRng a(1, 2), b(1, 2), c(1, 3);
  CHECK(a.next() == b.next());
  CHECK(a.next() != c.next());
  for (int i = 0; i < 1000; ++i) CHECK(a.below(7) < 7);
  std::vector<std::uint32_t> ground(20);
  std::iota(ground.begin(), ground.end(), 100u);
  CHECK(sample_k_subset(a, ground, 20) == ground);
  CHECK(sample_k_subset(a, ground, 0).empty());
  CHECK_THROWS_AS(sample_k_subset(a, ground, 21), KTooLarge);
  const int draws = 100000;
  int hits = 0;
  for (int t = 0; t < draws; ++t) {
    CounterRng r(99, static_cast<std::uint64_t>(t));
    auto s = sample_k_subset(r, ground, 5);
    CHECK(std::is_sorted(s.begin(), s.end()));
    hits += std::binary_search(s.begin(), s.end(), 107u);
  }
  const double p = 0.25, se = std::sqrt(p * (1 - p) / draws);
  CHECK(std::abs(hits / static_cast<double>(draws) - p) < 4 * se);
}

TEST_CASE("results do not depend on the worker count") {
  auto one = estimate_treematch(2, 3, 3, {20000, 11, 1});
  auto three = estimate_treematch(2, 3, 3, {20000, 11, 3});
  CHECK(one.successes == three.successes);
  CHECK(one.p_hat == three.p_hat);
  CHECK(one.std_error == three.std_error);
  auto other = estimate_treematch(2, 3, 3, {20000, 12, 1});
  CHECK(other.successes != one.successes);
  auto c1 = estimate_cut2(2, 3, 3, 4, {5000, 5, 1});
  auto c4 = estimate_cut2(2, 3, 3, 4, {5000, 5, 4});
  CHECK(c1.successes == c4.successes);
}

TEST_CASE("treematch") {
  CHECK(exact_treematch(2, 2, 2) == Rational(5, 9));
  CHECK(exact_treematch(2, 3, 1) == 1);
  auto one = estimate_treematch(2, 3, 1, {1000, 1, 1});
  CHECK(one.successes == 1000);
  auto e = estimate_treematch(2, 2, 2, {100000, 7, 1});
  CHECK(within(e, Rational(5, 9), 3));
  CHECK(e.warnings.empty());
  CHECK_FALSE(estimate_treematch(2, 2, 3, {10, 7, 1}).warnings.empty());
  CHECK(e.config["experiment"] == "treematch");
  for (std::size_t k = 1; k <= 4; ++k) {
    auto x = estimate_treematch(3, 2, k, {20000, k, 1});
    CHECK(within(x, exact_treematch(3, 2, k), 4));
  }
}

TEST_CASE("cut1 against exhaustive enumeration") {
  auto full = Canonicalizer::full(2);
  const Cone cone{2, kNoColour};
  std::uint64_t hits = 0, total = 0;
  for (const auto& s : subsets_of(8, 2)) {
    auto [a, b] = split(s, 4);
    hits += brute_force_equivalent(full, a, cone, b, cone);
    ++total;
  }
  CHECK(Rational(hits, total) == Rational(4, 7));
  CHECK(exact_cut1(2, 2, 2, 2) == Rational(4, 7));
  CHECK(within(estimate_cut1(2, 2, 2, 2, {100000, 3, 1}), Rational(4, 7), 3));
  CHECK(estimate_cut1(2, 2, 2, 8, {500, 3, 1}).p_hat == 1.0);
  CHECK(exact_cut1(2, 2, 2, 8) == 1);
  for (std::size_t k : {1u, 3u, 5u}) {
    std::uint64_t h = 0, t = 0;
    for (const auto& s : subsets_of(12, k)) {
      auto [a, b] = split(s, 4);
      h += brute_force_equivalent(full, a, cone, b, cone);
      ++t;
    }
    CHECK(exact_cut1(2, 3, 2, k) == Rational(h, t));
  }
}

TEST_CASE("a different fixed K gives the same law") {
  // Explicit uniform permutation applied to the last k leaves instead of the first k.
  const std::size_t d = 2, q = 3, n = 2, k = 3;
  const std::uint32_t m = 4, N = 12;
  auto full = Canonicalizer::full(d);
  const Cone cone{n, kNoColour};
  auto e = run_trials({60000, 21, 1}, [&]() -> TrialFn {
    return [&](CounterRng& rng) {
      std::vector<std::uint32_t> sigma(N);
      std::iota(sigma.begin(), sigma.end(), 0u);
      for (std::uint32_t i = N - 1; i > 0; --i) std::swap(sigma[i], sigma[rng.below(i + 1)]);
      LeafSet image;
      for (std::uint32_t x = N - k; x < N; ++x) image.push_back(sigma[x]);
      std::sort(image.begin(), image.end());
      auto [a, b] = split(image, m);
      return full.equivalent(a, cone, b, cone);
    };
  });
  auto f = estimate_cut1(d, q, n, k, {60000, 22, 1});
  CHECK(std::abs(e.p_hat - f.p_hat) < 4 * std::sqrt(e.std_error * e.std_error + f.std_error * f.std_error));
  CHECK(within(e, exact_cut1(d, q, n, k), 4));
}

TEST_CASE("cut2 against exhaustive enumeration") {
  auto full = Canonicalizer::full(2);
  const Cone cone{2, kNoColour};
  for (std::size_t k : {1u, 2u, 3u}) {
    std::uint64_t hits = 0, total = 0;
    for (const auto& s1 : subsets_of(8, k))
      for (const auto& s2 : subsets_of(8, k)) {
        LeafSet both;
        std::set_intersection(s1.begin(), s1.end(), s2.begin(), s2.end(), std::back_inserter(both));
        if (!both.empty()) continue;
        hits += brute_force_equivalent(full, split(s1, 4).first, cone, split(s2, 4).second, cone);
        ++total;
      }
    CHECK(exact_cut2(2, 2, 2, k) == Rational(hits, total));
  }
  CHECK(exact_cut2(2, 2, 2, 0) == 1);
  CHECK(estimate_cut2(2, 2, 2, 0, {100, 1, 1}).p_hat == 1.0);
  CHECK(within(estimate_cut2(2, 2, 2, 2, {100000, 4, 1}), exact_cut2(2, 2, 2, 2), 3));
  CHECK_THROWS_AS(estimate_cut2(2, 2, 2, 5, {10, 1, 1}), KTooLarge);
  // Decay in k tracks cut1 within a constant factor.
  for (std::size_t k : {2u, 4u, 6u}) {
    const double r = static_cast<double>(exact_cut2(2, 2, 4, k) / exact_cut1(2, 2, 4, k));
    CHECK(r > 0.2);
    CHECK(r < 5);
  }
}

TEST_CASE("colormatch") {
  auto full = ColourScheme::full(2);
  for (std::size_t k = 1; k <= 2; ++k) {
    CHECK(exact_colormatch(full, 2, k, 0) == exact_treematch(2, 2, k));
    auto a = estimate_colormatch(full, 2, k, 0, {50000, 8, 1});
    auto b = estimate_treematch(2, 2, k, {50000, 9, 1});
    CHECK(std::abs(a.p_hat - b.p_hat) < 3 * std::sqrt(a.std_error * a.std_error + b.std_error * b.std_error) + 1e-12);
  }
  auto trivial = ColourScheme::trivial(2);
  for (std::size_t label = 0; label < 3; ++label) {
    auto mode = Canonicalizer::coloured(trivial);
    auto labels = mode.leaf_labels({3, 0});
    const auto size = static_cast<unsigned>(std::count(labels.begin(), labels.end(), label));
    if (size == 0) continue;
    CHECK(exact_colormatch(trivial, 3, 1, label) == Rational(1, size));
    if (size >= 2) CHECK(exact_colormatch(trivial, 3, 2, label) == Rational(BigInt(1), binomial(size, 2)));
  }
  auto swap = ColourScheme(2, GeneratedGroup(3, {Permutation::from_cycles(3, {{0, 1}})}));
  auto mode = Canonicalizer::coloured(swap);
  for (Point cu : {0u, 1u, 2u})
    for (Point cv : {0u, 1u, 2u})
      for (std::size_t label = 0; label < 2; ++label) {
        const Cone a{2, cu}, b{2, cv};
        const auto la = mode.leaf_labels(a), lb = mode.leaf_labels(b);
        std::uint64_t hits = 0, total = 0;
        for (std::uint32_t x = 0; x < 4; ++x)
          for (std::uint32_t y = 0; y < 4; ++y) {
            if (la[x] != label || lb[y] != label) continue;
            hits += brute_force_equivalent(mode, {x}, a, {y}, b);
            ++total;
          }
        if (total == 0) continue;
        const Rational exact = exact_colormatch(swap, 2, 1, label, cu, cv);
        CHECK(exact == Rational(hits, total));
        CHECK(within(estimate_colormatch(swap, 2, 1, label, {30000, 13, 1}, cu, cv), exact, 3));
      }
}

TEST_CASE("decay fit is an upper envelope") {
  std::vector<std::size_t> ks{4, 8, 16, 32};
  std::vector<Estimate> est;
  const double C = 2.0, c = 1.5, beta = 0.5;
  for (std::size_t i = 0; i < ks.size(); ++i) {
    Estimate e;
    e.trials = 1000000;
    e.p_hat = C * std::exp(-c * std::pow(static_cast<double>(ks[i]), beta)) * (i % 2 ? 0.9 : 1.1);
    e.successes = static_cast<std::uint64_t>(e.p_hat * 1e6);
    est.push_back(e);
  }
  auto fit = fit_decay(ks, est, beta);
  CHECK(fit.c == doctest::Approx(c).epsilon(0.1));
  for (const auto& [k, lp] : fit.points) CHECK(lp <= fit.log_C - fit.c * std::pow(k, beta) + 1e-12);
  est[1].successes = est[2].successes = est[3].successes = 0;
  CHECK_THROWS_AS(fit_decay(ks, est, beta), InvalidArgument);
}
