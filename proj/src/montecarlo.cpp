#include "irswb/montecarlo.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <exception>
#include <numeric>
#include <thread>

#include "irswb/errors.hpp"

namespace irswb {

namespace {

constexpr std::uint64_t kGolden = 0x9e3779b97f4a7c15ULL;

std::uint64_t mix(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

std::uint64_t ipow(std::size_t d, std::size_t n) {
  std::uint64_t r = 1;
  for (std::size_t i = 0; i < n; ++i) {
    r *= d;
    if (r > (std::uint64_t{1} << 31)) throw DepthExceeded("level too large to sample");
  }
  return r;
}

std::vector<std::uint32_t> iota_vec(std::uint64_t n) {
  std::vector<std::uint32_t> v(n);
  std::iota(v.begin(), v.end(), 0u);
  return v;
}

// Moves a uniform ordered k-prefix into buf[0..k). Callers reset buf per trial so the draw depends
// only on the trial's stream.
void partial_shuffle(CounterRng& rng, std::vector<std::uint32_t>& buf, std::size_t k) {
  for (std::size_t i = 0; i < k; ++i) {
    const std::size_t j = i + rng.below(buf.size() - i);
    std::swap(buf[i], buf[j]);
  }
}

// P(|E| = |F| = a) weights times the census match probability of a-subsets of one cone.
Rational cut_mixture(std::size_t d, std::size_t n, const std::vector<Rational>& size_weights) {
  auto mode = Canonicalizer::full(d);
  Rational p = 0;
  for (std::size_t a = 0; a < size_weights.size(); ++a) {
    if (size_weights[a] == 0) continue;
    auto census = orbit_census(mode, {n, kNoColour}, a);
    p += size_weights[a] * match_probability(census, census);
  }
  return p;
}

void check_cut_shape(std::size_t d, std::size_t q, std::size_t n) {
  if (d < 2) throw InvalidArgument("d must be at least 2");
  if (q < 2) throw InvalidArgument("q must be at least 2 for two cones");
  if (n == 0) throw InvalidArgument("n must be positive");
}

}  // namespace

CounterRng::CounterRng(std::uint64_t seed, std::uint64_t stream)
    : state_(mix(seed + kGolden) ^ mix(stream * kGolden + 0x632be59bd9b4e019ULL)) {}

std::uint64_t CounterRng::next() {
  state_ += kGolden;
  return mix(state_);
}

std::uint64_t CounterRng::below(std::uint64_t n) {
  if (n == 0) throw InvalidArgument("empty range");
  unsigned __int128 m = static_cast<unsigned __int128>(next()) * n;
  auto low = static_cast<std::uint64_t>(m);
  if (low < n) {
    const std::uint64_t t = -n % n;
    while (low < t) {
      m = static_cast<unsigned __int128>(next()) * n;
      low = static_cast<std::uint64_t>(m);
    }
  }
  return static_cast<std::uint64_t>(m >> 64);
}

std::vector<std::uint32_t> sample_k_subset(CounterRng& rng, const std::vector<std::uint32_t>& ground,
                                           std::size_t k) {
  if (k > ground.size()) throw KTooLarge("k exceeds the ground set");
  std::vector<std::uint32_t> buf = ground;
  partial_shuffle(rng, buf, k);
  buf.resize(k);
  std::sort(buf.begin(), buf.end());
  return buf;
}

Estimate run_trials(const RunOptions& opts, const std::function<TrialFn()>& make_trial) {
  if (opts.trials == 0) throw InvalidArgument("need at least one trial");
  const std::size_t workers =
      static_cast<std::size_t>(std::clamp<std::uint64_t>(opts.workers, 1, opts.trials));
  std::vector<std::uint64_t> hits(workers, 0);
  std::vector<std::exception_ptr> errors(workers);
  auto work = [&](std::size_t w) {
    try {
      TrialFn trial = make_trial();
      const std::uint64_t lo = opts.trials * w / workers, hi = opts.trials * (w + 1) / workers;
      for (std::uint64_t t = lo; t < hi; ++t) {
        CounterRng rng(opts.seed, t);
        hits[w] += trial(rng);
      }
    } catch (...) {
      errors[w] = std::current_exception();
    }
  };
  if (workers == 1) {
    work(0);
  } else {
    std::vector<std::thread> threads;
    for (std::size_t w = 0; w < workers; ++w) threads.emplace_back(work, w);
    for (auto& t : threads) t.join();
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
  Estimate est;
  est.trials = opts.trials;
  est.successes = std::accumulate(hits.begin(), hits.end(), std::uint64_t{0});
  est.p_hat = static_cast<double>(est.successes) / static_cast<double>(est.trials);
  est.std_error = std::sqrt(est.p_hat * (1 - est.p_hat) / static_cast<double>(est.trials));
  est.seed = opts.seed;
  return est;
}

Estimate estimate_treematch(std::size_t d, std::size_t n, std::size_t k, const RunOptions& opts) {
  const std::uint64_t m = ipow(d, n);
  if (k > m) throw KTooLarge("k exceeds the cone size");
  auto mode = Canonicalizer::full(d);
  const Cone cone{n, kNoColour};
  auto est = run_trials(opts, [&]() -> TrialFn {
    return [&, buf = iota_vec(m)](CounterRng& rng) mutable {
      std::iota(buf.begin(), buf.end(), 0u);
      partial_shuffle(rng, buf, k);
      LeafSet E(buf.begin(), buf.begin() + static_cast<std::ptrdiff_t>(k));
      partial_shuffle(rng, buf, k);
      LeafSet F(buf.begin(), buf.begin() + static_cast<std::ptrdiff_t>(k));
      std::sort(E.begin(), E.end());
      std::sort(F.begin(), F.end());
      return mode.canon(E, cone) == mode.canon(F, cone);
    };
  });
  est.config = {{"experiment", "treematch"}, {"d", d}, {"n", n}, {"k", k}};
  if (k < 2 || 2 * k > m) est.warnings.push_back("k outside [2, d^n/2]");
  return est;
}

namespace {

Estimate estimate_cut(bool two_sets, std::size_t d, std::size_t q, std::size_t n, std::size_t k,
                      const RunOptions& opts) {
  check_cut_shape(d, q, n);
  const std::uint64_t m = ipow(d, n);
  const std::uint64_t total = m * q;
  if ((two_sets ? 2 * k : k) > total) throw KTooLarge("k exceeds the level size");
  auto mode = Canonicalizer::full(d);
  const Cone cone{n, kNoColour};
  auto est = run_trials(opts, [&]() -> TrialFn {
    return [&, buf = iota_vec(total)](CounterRng& rng) mutable {
      std::iota(buf.begin(), buf.end(), 0u);
      partial_shuffle(rng, buf, two_sets ? 2 * k : k);
      LeafSet E, F;
      for (std::size_t i = 0; i < k; ++i)
        if (buf[i] < m) E.push_back(buf[i]);
      const std::size_t from = two_sets ? k : 0;
      for (std::size_t i = from; i < from + k; ++i)
        if (buf[i] >= m && buf[i] < 2 * m) F.push_back(static_cast<std::uint32_t>(buf[i] - m));
      if (E.size() != F.size()) {
        // Orbits preserve cardinality.
        if (mode.equivalent(E, cone, F, cone)) throw Error("cardinality mismatch judged equivalent");
        return false;
      }
      std::sort(E.begin(), E.end());
      std::sort(F.begin(), F.end());
      return mode.canon(E, cone) == mode.canon(F, cone);
    };
  });
  est.config = {{"experiment", two_sets ? "cut2" : "cut1"}, {"d", d}, {"q", q}, {"n", n}, {"k", k}};
  if (!two_sets && 2 * k > total) est.warnings.push_back("k above |L_n|/2");
  return est;
}

}  // namespace

Estimate estimate_cut1(std::size_t d, std::size_t q, std::size_t n, std::size_t k, const RunOptions& opts) {
  return estimate_cut(false, d, q, n, k, opts);
}

Estimate estimate_cut2(std::size_t d, std::size_t q, std::size_t n, std::size_t k, const RunOptions& opts) {
  return estimate_cut(true, d, q, n, k, opts);
}

Estimate estimate_colormatch(const ColourScheme& scheme, std::size_t n, std::size_t k, std::size_t label,
                             const RunOptions& opts, Point colour_u, Point colour_v, ColouringRule rule) {
  auto mode = Canonicalizer::coloured(scheme, rule);
  const Cone a{n, colour_u}, b{n, colour_v};
  auto labelled = [&](const Cone& c) {
    std::vector<std::uint32_t> out;
    const auto labels = mode.leaf_labels(c);
    for (std::size_t i = 0; i < labels.size(); ++i)
      if (labels[i] == label) out.push_back(static_cast<std::uint32_t>(i));
    return out;
  };
  const auto ground_u = labelled(a), ground_v = labelled(b);
  if (k > ground_u.size() || k > ground_v.size()) throw KTooLarge("k exceeds the labelled leaves");
  auto est = run_trials(opts, [&]() -> TrialFn {
    return [&, bu = ground_u, bv = ground_v](CounterRng& rng) mutable {
      std::copy(ground_u.begin(), ground_u.end(), bu.begin());
      std::copy(ground_v.begin(), ground_v.end(), bv.begin());
      partial_shuffle(rng, bu, k);
      LeafSet E(bu.begin(), bu.begin() + static_cast<std::ptrdiff_t>(k));
      partial_shuffle(rng, bv, k);
      LeafSet F(bv.begin(), bv.begin() + static_cast<std::ptrdiff_t>(k));
      std::sort(E.begin(), E.end());
      std::sort(F.begin(), F.end());
      return mode.equivalent(E, a, F, b);
    };
  });
  est.config = {{"experiment", "colormatch"}, {"scheme", scheme_to_json(scheme)}, {"n", n}, {"k", k},
                {"label", label}, {"colour_u", colour_u}, {"colour_v", colour_v},
                {"rule", rule == ColouringRule::natural ? "natural" : "orbit_sorted"}};
  if (2 * k > ground_u.size()) est.warnings.push_back("k above half the labelled leaves");
  return est;
}

Rational exact_treematch(std::size_t d, std::size_t n, std::size_t k) {
  auto census = orbit_census(Canonicalizer::full(d), {n, kNoColour}, k);
  return match_probability(census, census);
}

Rational exact_cut1(std::size_t d, std::size_t q, std::size_t n, std::size_t k) {
  check_cut_shape(d, q, n);
  const auto m = static_cast<unsigned>(ipow(d, n));
  const auto N = static_cast<unsigned>(m * q);
  if (k > N) throw KTooLarge("k exceeds the level size");
  const auto K = static_cast<unsigned>(k);
  std::vector<Rational> w(std::min(K, m) + 1, Rational(0));
  const BigInt all = binomial(N, K);
  for (unsigned a = 0; 2 * a <= K && a <= m; ++a)
    w[a] = Rational(binomial(m, a) * binomial(m, a) * binomial(N - 2 * m, K - 2 * a), all);
  return cut_mixture(d, n, w);
}

Rational exact_cut2(std::size_t d, std::size_t q, std::size_t n, std::size_t k) {
  check_cut_shape(d, q, n);
  const auto m = static_cast<unsigned>(ipow(d, n));
  const auto N = static_cast<unsigned>(m * q);
  if (2 * k > N) throw KTooLarge("2k exceeds the level size");
  const auto K = static_cast<unsigned>(k);
  std::vector<Rational> w(std::min(K, m) + 1, Rational(0));
  const BigInt all = binomial(N, K) * binomial(N - K, K);
  for (unsigned a = 0; a <= K && a <= m; ++a) {
    BigInt count = 0;
    // j leaves of the first set fall in the second cone.
    for (unsigned j = 0; a + j <= K && j <= m; ++j) {
      const BigInt first = binomial(m, a) * binomial(m, j) * binomial(N - 2 * m, K - a - j);
      const BigInt second = binomial(m - j, a) * binomial(N - K - (m - j), K - a);
      count += first * second;
    }
    w[a] = Rational(count, all);
  }
  return cut_mixture(d, n, w);
}

Rational exact_colormatch(const ColourScheme& scheme, std::size_t n, std::size_t k, std::size_t label,
                          Point colour_u, Point colour_v, ColouringRule rule) {
  auto mode = Canonicalizer::coloured(scheme, rule);
  auto cu = orbit_census(mode, {n, colour_u}, k, label);
  auto cv = orbit_census(mode, {n, colour_v}, k, label);
  if (scheme.orbit_of(colour_u) != scheme.orbit_of(colour_v)) return Rational(0);
  return match_probability(cu, cv);
}

DecayFit fit_decay(const std::vector<std::size_t>& ks, const std::vector<Estimate>& estimates,
                   double exponent) {
  if (ks.size() != estimates.size()) throw InvalidArgument("one estimate per k");
  DecayFit fit;
  fit.exponent = exponent;
  for (std::size_t i = 0; i < ks.size(); ++i)
    if (estimates[i].successes > 0)
      fit.points.emplace_back(static_cast<double>(ks[i]), std::log(estimates[i].p_hat));
  if (fit.points.size() < 2) throw InvalidArgument("need two estimates with successes to fit");
  const auto m = static_cast<Eigen::Index>(fit.points.size());
  Eigen::MatrixXd A(m, 2);
  Eigen::VectorXd y(m);
  for (Eigen::Index i = 0; i < m; ++i) {
    A(i, 0) = 1;
    A(i, 1) = -std::pow(fit.points[static_cast<std::size_t>(i)].first, exponent);
    y(i) = fit.points[static_cast<std::size_t>(i)].second;
  }
  const Eigen::VectorXd beta = A.colPivHouseholderQr().solve(y);
  fit.c = beta(1);
  fit.log_C = -INFINITY;
  for (const auto& [k, lp] : fit.points) fit.log_C = std::max(fit.log_C, lp + fit.c * std::pow(k, exponent));
  return fit;
}

}  // namespace irswb
