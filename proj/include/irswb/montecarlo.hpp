#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include <json.hpp>

#include "irswb/canon.hpp"
#include "irswb/rational.hpp"
#include "irswb/tree.hpp"

namespace irswb {

// SplitMix64 keyed by (seed, stream). Every trial gets its own stream, so results do not depend
// on how trials are spread over workers.
class CounterRng {
 public:
  CounterRng(std::uint64_t seed, std::uint64_t stream);
  std::uint64_t next();
  // Uniform in [0, n), n > 0 (Lemire's multiply-and-reject).
  std::uint64_t below(std::uint64_t n);

 private:
  std::uint64_t state_;
};

// Uniform k-subset of `ground` by partial Fisher–Yates, returned sorted. Throws KTooLarge.
std::vector<std::uint32_t> sample_k_subset(CounterRng& rng, const std::vector<std::uint32_t>& ground,
                                           std::size_t k);

struct RunOptions {
  std::uint64_t trials = 10000;
  std::uint64_t seed = 0x5eed;
  std::size_t workers = 1;
};

struct Estimate {
  double p_hat = 0;
  std::uint64_t trials = 0;
  std::uint64_t successes = 0;
  double std_error = 0;
  std::uint64_t seed = 0;
  nlohmann::json config;
  std::vector<std::string> warnings;
};

// Runs trial(rng) for every trial index with a fresh stream, split over opts.workers threads.
// make_trial is called once per worker so each can keep its own buffers.
using TrialFn = std::function<bool(CounterRng&)>;
Estimate run_trials(const RunOptions& opts, const std::function<TrialFn()>& make_trial);

// E and F independent uniform k-subsets of the leaves of two depth-n cones of the d-ary tree;
// success when some tree automorphism carries one onto the other.
Estimate estimate_treematch(std::size_t d, std::size_t n, std::size_t k, const RunOptions& opts);

// K is the first k leaves of level n+1 of the tree whose root has q children (q·d^n leaves) and
// σ is a uniform permutation of that level. Success when K·σ meets the cones below the first two
// root children in equivalent sets.
Estimate estimate_cut1(std::size_t d, std::size_t q, std::size_t n, std::size_t k, const RunOptions& opts);
// Same with disjoint K1, K2 (the first k leaves and the next k) intersected with the two cones.
Estimate estimate_cut2(std::size_t d, std::size_t q, std::size_t n, std::size_t k, const RunOptions& opts);

// E1, E2 uniform k-subsets of the label-`label` leaves of two depth-n cones whose parent edges
// have colours colour_u and colour_v; success under coloured equivalence.
Estimate estimate_colormatch(const ColourScheme& scheme, std::size_t n, std::size_t k, std::size_t label,
                             const RunOptions& opts, Point colour_u = 0, Point colour_v = 0,
                             ColouringRule rule = ColouringRule::orbit_sorted);

// Exact values of the same probabilities, from orbit censuses or full enumeration.
Rational exact_treematch(std::size_t d, std::size_t n, std::size_t k);
Rational exact_cut1(std::size_t d, std::size_t q, std::size_t n, std::size_t k);
Rational exact_cut2(std::size_t d, std::size_t q, std::size_t n, std::size_t k);
Rational exact_colormatch(const ColourScheme& scheme, std::size_t n, std::size_t k, std::size_t label,
                          Point colour_u = 0, Point colour_v = 0,
                          ColouringRule rule = ColouringRule::orbit_sorted);

struct DecayFit {
  double log_C = 0;
  double c = 0;
  double exponent = 0;
  // Points (k, log p_hat) with at least one success.
  std::vector<std::pair<double, double>> points;
};

// Least-squares slope of log p_hat against k^exponent, then log C raised to the smallest value
// that puts every point on or below log C − c·k^exponent.
DecayFit fit_decay(const std::vector<std::size_t>& ks, const std::vector<Estimate>& estimates,
                   double exponent);

}  // namespace irswb
