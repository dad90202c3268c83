#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "irswb/rational.hpp"

namespace irswb {

// Tree parameters plus the two unnamed constants of the decay estimates, which are always
// supplied by the caller.
struct BoundParams {
  std::size_t d = 2;
  std::size_t q = 2;
  double C = 1.0;
  double c = 1.0;
  double eps = 0.1;

  // (d−1)/(4d), strictly inside (0, (d−1)/(2d)).
  double alpha() const { return static_cast<double>(d - 1) / (4.0 * static_cast<double>(d)); }
  // Throws DomainError unless d ≥ 2, q ≥ 1, C, c > 0 and 0 < eps < 1/d².
  void validate() const;
};

// Bernoulli relative entropy in nats, with 0·log 0 = 0.
double rel_entropy(double a, double p);

enum class TailSide { upper, lower };

// e^(−H(p ± x ‖ p)·k).
double chernoff_tail(double p, double x, double k, TailSide side);

// C(u,i)·C(x−u,k−i)/C(x,k); zero when i is out of range.
Rational hypergeom_pmf(unsigned x, unsigned u, unsigned k, unsigned i);
// P(hits ≥ t) for the upper side, P(hits ≤ t) for the lower side.
Rational hypergeom_tail(unsigned x, unsigned u, unsigned k, unsigned t, TailSide side);

struct ChernoffReport {
  std::uint64_t checked = 0;
  std::uint64_t failures = 0;
  std::string first_failure;
};

// Every population x ≤ max_x, u with 0 < u < x, draw count k ≤ x and threshold on either side of
// the mean: the exact tail must not exceed the Chernoff value, widened by a relative 1e−12.
ChernoffReport chernoff_dominance(unsigned max_x);

// max over integer i ∈ [pk/2, 3pk/2] of pmf(i)·sqrt(i(k−i)/k), p = u/x. Evaluated with lgamma.
double sup_bound_ratio(unsigned x, unsigned u, unsigned k);

struct StirlingBounds {
  double lower = 0;
  double upper = 0;
};

// lower = √(2πn)(n/e)^n, upper = lower·e/√(2π).
StirlingBounds stirling_bounds(unsigned n);
double log_stirling_lower(double n);
double log_stirling_upper(double n);

// log(|Γ|·|F|^(d^n) / (d^n)!).
double log_size1_bound(double gamma_order, double F_order, std::size_t d, std::size_t n);
double size1_bound(double gamma_order, double F_order, std::size_t d, std::size_t n);

enum class BoundCase { I, II, III, III_aggregate };
std::string to_string(BoundCase c);

// Natural log of the bound for a subgroup with giant component t_gamma at level size k_n.
// III uses the exponent α/(3q); III_aggregate the α/(6q) that appears in the summed bound.
double log_case_bound(BoundCase which, const BoundParams& p, double k_n, double t_gamma);
// Case I written in terms of the gap k_n − t_gamma, for gaps far below the precision of k_n.
double log_case_one_by_gap(const BoundParams& p, double k_n, double gap);

double level_size(const BoundParams& p, std::size_t n);  // q·d^n
double delta_n(const BoundParams& p, std::size_t n);     // ((2/c)·log n)^(1/α)

// log(C e^(−cΔ_n^α) + C k_n e^(−c k_n^(α/(6q)))).
double log_aggregate_term(const BoundParams& p, std::size_t n);

struct SeriesRow {
  std::size_t n = 0;
  double log_k_n = 0;
  double delta = 0;
  double log_term = 0;
  double log_partial_sum = 0;
};

// Rows n = 1 … n_max of the aggregate series with running partial sums, all in log-space.
std::vector<SeriesRow> aggregate_series(const BoundParams& p, std::size_t n_max);

// Largest increment term over n ∈ [from, to], as a log.
double max_log_increment(const BoundParams& p, std::size_t from, std::size_t to);

}  // namespace irswb
