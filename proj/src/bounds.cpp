#include "irswb/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "irswb/errors.hpp"

namespace irswb {

namespace {

double log_add(double a, double b) {
  if (a == -INFINITY) return b;
  if (b == -INFINITY) return a;
  const double m = std::max(a, b);
  return m + std::log1p(std::exp(-std::abs(a - b)));
}

double log_choose(double n, double k) {
  return std::lgamma(n + 1) - std::lgamma(k + 1) - std::lgamma(n - k + 1);
}

}  // namespace

void BoundParams::validate() const {
  if (d < 2) throw DomainError("d must be at least 2");
  if (q < 1) throw DomainError("q must be positive");
  if (!(C > 0) || !(c > 0)) throw DomainError("C and c must be positive");
  const double dd = static_cast<double>(d);
  if (!(eps > 0) || !(eps < 1.0 / (dd * dd))) throw DomainError("eps must lie in (0, 1/d^2)");
}

double rel_entropy(double a, double p) {
  if (!(p > 0 && p < 1)) throw DomainError("p must lie strictly between 0 and 1");
  if (!(a >= 0 && a <= 1)) throw DomainError("a must lie in [0, 1]");
  double h = 0;
  if (a > 0) h += a * std::log(a / p);
  if (a < 1) h += (1 - a) * std::log((1 - a) / (1 - p));
  return std::max(h, 0.0);
}

double chernoff_tail(double p, double x, double k, TailSide side) {
  if (!(k >= 1)) throw DomainError("k must be at least 1");
  if (!(x >= 0)) throw DomainError("x must be nonnegative");
  const double a = side == TailSide::upper ? p + x : p - x;
  if (!(a >= 0 && a <= 1)) throw DomainError("p +- x must lie in [0, 1]");
  return std::exp(-rel_entropy(a, p) * k);
}

Rational hypergeom_pmf(unsigned x, unsigned u, unsigned k, unsigned i) {
  if (u > x || k > x) throw DomainError("need u <= x and k <= x");
  if (i > u || i > k || k - i > x - u) return Rational(0);
  return Rational(binomial(u, i) * binomial(x - u, k - i), binomial(x, k));
}

Rational hypergeom_tail(unsigned x, unsigned u, unsigned k, unsigned t, TailSide side) {
  Rational s = 0;
  if (side == TailSide::upper) {
    for (unsigned i = t; i <= k; ++i) s += hypergeom_pmf(x, u, k, i);
  } else {
    for (unsigned i = 0; i <= std::min(t, k); ++i) s += hypergeom_pmf(x, u, k, i);
  }
  return s;
}

ChernoffReport chernoff_dominance(unsigned max_x) {
  ChernoffReport r;
  for (unsigned x = 2; x <= max_x; ++x)
    for (unsigned u = 1; u < x; ++u)
      for (unsigned k = 1; k <= x; ++k)
        for (unsigned t = 0; t <= k; ++t) {
          // Only thresholds on the far side of the mean carry a bound below 1.
          const Rational mean(u * k, x);
          for (TailSide side : {TailSide::upper, TailSide::lower}) {
            if (side == TailSide::upper && !(Rational(t) > mean)) continue;
            if (side == TailSide::lower && !(Rational(t) < mean)) continue;
            const double p = static_cast<double>(u) / x;
            const double a = static_cast<double>(t) / k;
            const double bound = chernoff_tail(p, std::abs(a - p), k, side) * (1 + 1e-12);
            const Rational exact = hypergeom_tail(x, u, k, t, side);
            ++r.checked;
            if (exact > Rational(bound)) {
              if (r.failures++ == 0)
                r.first_failure = "x=" + std::to_string(x) + " u=" + std::to_string(u) +
                                  " k=" + std::to_string(k) + " t=" + std::to_string(t);
            }
          }
        }
  return r;
}

double sup_bound_ratio(unsigned x, unsigned u, unsigned k) {
  if (u > x || k > x) throw DomainError("need u <= x and k <= x");
  if (2 * k > x) throw DomainError("need k <= x/2");
  if (k == 0) return 0;
  const double p = static_cast<double>(u) / x;
  const auto lo = static_cast<unsigned>(std::ceil(p * k / 2));
  const auto hi = static_cast<unsigned>(std::floor(3 * p * k / 2));
  double best = 0;
  for (unsigned i = std::max(lo, 1u); i <= std::min({hi, k - 1, u}); ++i) {
    if (k - i > x - u) continue;
    const double log_pmf = log_choose(u, i) + log_choose(x - u, k - i) - log_choose(x, k);
    best = std::max(best, std::exp(log_pmf) * std::sqrt(static_cast<double>(i) * (k - i) / k));
  }
  return best;
}

double log_stirling_lower(double n) {
  if (!(n >= 1)) throw DomainError("n must be at least 1");
  return 0.5 * std::log(2 * std::numbers::pi * n) + n * std::log(n) - n;
}

double log_stirling_upper(double n) {
  return log_stirling_lower(n) + 1 - 0.5 * std::log(2 * std::numbers::pi);
}

StirlingBounds stirling_bounds(unsigned n) {
  return {std::exp(log_stirling_lower(n)), std::exp(log_stirling_upper(n))};
}

double log_size1_bound(double gamma_order, double F_order, std::size_t d, std::size_t n) {
  if (!(gamma_order > 0) || !(F_order > 0) || d == 0) throw DomainError("orders must be positive");
  const double leaves = std::pow(static_cast<double>(d), static_cast<double>(n));
  return std::log(gamma_order) + leaves * std::log(F_order) - std::lgamma(leaves + 1);
}

double size1_bound(double gamma_order, double F_order, std::size_t d, std::size_t n) {
  return std::exp(log_size1_bound(gamma_order, F_order, d, n));
}

std::string to_string(BoundCase c) {
  switch (c) {
    case BoundCase::I: return "I";
    case BoundCase::II: return "II";
    case BoundCase::III: return "III";
    case BoundCase::III_aggregate: return "III_aggregate";
  }
  return "?";
}

double log_case_one_by_gap(const BoundParams& p, double k_n, double gap) {
  p.validate();
  if (!(k_n >= 1) || !(gap >= 0)) throw DomainError("need k_n >= 1 and a nonnegative gap");
  const double a = p.alpha();
  const double q = static_cast<double>(p.q);
  return log_add(std::log(p.C) - p.c * std::pow(gap, a), std::log(p.C) - p.c * std::pow(k_n, a / (2 * q)));
}

double log_case_bound(BoundCase which, const BoundParams& p, double k_n, double t_gamma) {
  p.validate();
  if (!(k_n >= 1)) throw DomainError("k_n must be at least 1");
  if (!(t_gamma >= 0 && t_gamma <= k_n)) throw DomainError("t_gamma must lie in [0, k_n]");
  const double a = p.alpha();
  const double q = static_cast<double>(p.q);
  switch (which) {
    case BoundCase::I:
      return log_case_one_by_gap(p, k_n, k_n - t_gamma);
    case BoundCase::II:
      return -(1 / (2 * q)) * k_n * std::log(k_n / p.C);
    case BoundCase::III:
      return std::log(p.C) + std::log(k_n) - p.c * std::pow(k_n, a / (3 * q));
    case BoundCase::III_aggregate:
      return std::log(p.C) + std::log(k_n) - p.c * std::pow(k_n, a / (6 * q));
  }
  throw DomainError("unknown case");
}

double level_size(const BoundParams& p, std::size_t n) {
  return static_cast<double>(p.q) * std::pow(static_cast<double>(p.d), static_cast<double>(n));
}

double delta_n(const BoundParams& p, std::size_t n) {
  p.validate();
  if (n == 0) throw DomainError("n must be positive");
  return std::pow((2 / p.c) * std::log(static_cast<double>(n)), 1 / p.alpha());
}

double log_aggregate_term(const BoundParams& p, std::size_t n) {
  const double delta = delta_n(p, n);
  const double log_k = std::log(static_cast<double>(p.q)) + static_cast<double>(n) * std::log(static_cast<double>(p.d));
  const double expo = p.alpha() / (6 * static_cast<double>(p.q));
  const double first = std::log(p.C) - p.c * std::pow(delta, p.alpha());
  const double second = std::log(p.C) + log_k - p.c * std::exp(expo * log_k);
  return log_add(first, second);
}

std::vector<SeriesRow> aggregate_series(const BoundParams& p, std::size_t n_max) {
  p.validate();
  std::vector<SeriesRow> rows;
  double acc = -INFINITY;
  for (std::size_t n = 1; n <= n_max; ++n) {
    SeriesRow r;
    r.n = n;
    r.log_k_n = std::log(static_cast<double>(p.q)) + static_cast<double>(n) * std::log(static_cast<double>(p.d));
    r.delta = delta_n(p, n);
    r.log_term = log_aggregate_term(p, n);
    acc = log_add(acc, r.log_term);
    r.log_partial_sum = acc;
    rows.push_back(r);
  }
  return rows;
}

double max_log_increment(const BoundParams& p, std::size_t from, std::size_t to) {
  p.validate();
  if (from == 0 || from > to) throw DomainError("need 1 <= from <= to");
  double best = -INFINITY;
  for (std::size_t n = from; n <= to; ++n) best = std::max(best, log_aggregate_term(p, n));
  return best;
}

}  // namespace irswb
