#include "irswb/classifier.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>
#include <unordered_set>

#include "irswb/canon.hpp"
#include "irswb/errors.hpp"
#include "irswb/subgroups.hpp"

namespace irswb {

namespace {

bool is_invariant(const GeneratedGroup& G, const PointSet& U) {
  for (const auto& g : G.generators())
    if (image_of(U, g) != U) return false;
  return true;
}

PointSet merge(const PointSet& a, const PointSet& b) {
  PointSet out;
  std::set_union(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return out;
}

// Larger sets first, then lexicographic, so witnesses are deterministic.
bool better_witness(const PointSet& a, const PointSet& b) {
  if (a.size() != b.size()) return a.size() > b.size();
  return a < b;
}

// Candidates for U inside `points` (a union of orbits): every orbit of size ≥ 3 and every union
// of orbits with at most two points in total.
std::vector<PointSet> xi_candidates(const std::vector<PointSet>& orbs) {
  std::vector<PointSet> out{{}};
  std::vector<PointSet> small;
  for (const auto& o : orbs) {
    if (o.size() >= 3) out.push_back(o);
    else small.push_back(o);
  }
  for (std::size_t i = 0; i < small.size(); ++i) {
    out.push_back(small[i]);
    for (std::size_t j = i + 1; j < small.size(); ++j)
      if (small[i].size() + small[j].size() <= 2) out.push_back(merge(small[i], small[j]));
  }
  return out;
}

std::optional<PointSet> best_u(const GeneratedGroup& G, const std::vector<PointSet>& orbs, std::size_t min_size) {
  std::optional<PointSet> best;
  for (const auto& U : xi_candidates(orbs)) {
    if (U.size() < min_size) continue;
    if (best && !better_witness(U, *best)) continue;
    if (contains_alt_on(G, U)) best = U;
  }
  return best;
}

std::size_t ipow(std::size_t d, std::size_t n) {
  std::size_t r = 1;
  for (std::size_t i = 0; i < n; ++i) r *= d;
  return r;
}

}  // namespace

TransitiveProfile profile(const GeneratedGroup& G) {
  TransitiveProfile p;
  p.components = orbits(G);
  std::stable_sort(p.components.begin(), p.components.end(),
                   [](const PointSet& a, const PointSet& b) { return a.size() > b.size(); });
  for (const auto& c : p.components) p.sizes.push_back(c.size());
  p.t_max = p.sizes.empty() ? 0 : p.sizes.front();
  return p;
}

std::optional<XiWitness> in_Xi(const GeneratedGroup& G, std::size_t delta) {
  const std::size_t n = G.degree();
  const std::size_t min_size = delta >= n ? 0 : n - delta;
  auto U = best_u(G, orbits(G), min_size);
  if (!U) return std::nullopt;
  return XiWitness{*U, delta};
}

std::optional<XiWitness> in_Xi_unpruned(const GeneratedGroup& G, std::size_t delta) {
  const std::size_t n = G.degree();
  if (n > 20) throw DegreeTooLarge("unpruned search needs degree <= 20");
  std::optional<PointSet> best;
  for (std::uint32_t mask = 0; mask < (1u << n); ++mask) {
    if (static_cast<std::size_t>(__builtin_popcount(mask)) + delta < n) continue;
    PointSet U;
    for (Point x = 0; x < n; ++x)
      if (mask >> x & 1) U.push_back(x);
    if (best && !better_witness(U, *best)) continue;
    if (is_invariant(G, U) && contains_alt_on(G, U)) best = U;
  }
  if (!best) return std::nullopt;
  return XiWitness{*best, delta};
}

std::optional<PiWitness> in_Pi(const GeneratedGroup& G, const std::vector<PointSet>& labels,
                               std::size_t delta) {
  std::vector<int> seen(G.degree(), 0);
  for (const auto& part : labels)
    for (Point x : part) {
      if (x >= G.degree() || seen[x]++) throw LabelPartitionViolated("labels must partition the points");
    }
  if (std::find(seen.begin(), seen.end(), 0) != seen.end())
    throw LabelPartitionViolated("labels must cover every point");
  for (const auto& part : labels)
    if (!is_invariant(G, part)) throw LabelPartitionViolated("group moves a point across labels");

  const auto orbs = orbits(G);
  PiWitness w;
  for (const auto& part : labels) {
    // Alt(U_i)×{id} ≤ G means Alt(U_i) lies in the kernel of the action off part i.
    const GeneratedGroup kernel = rigid_stabilizer(G, part);
    std::vector<PointSet> inside;
    for (const auto& o : orbs)
      if (std::includes(part.begin(), part.end(), o.begin(), o.end())) inside.push_back(o);
    const std::size_t min_size = delta >= part.size() ? 0 : part.size() - delta;
    auto U = best_u(kernel, inside, min_size);
    if (!U) return std::nullopt;
    w.U.push_back(*U);
  }
  return w;
}

std::vector<PraegerSaxlRow> praeger_saxl_check(std::size_t max_degree) {
  if (max_degree > 7) throw DegreeTooLarge("Praeger-Saxl check needs degree <= 7");
  std::vector<PraegerSaxlRow> rows;
  for (std::size_t m = 1; m <= max_degree; ++m) {
    std::vector<GeneratedGroup> family;
    if (m <= kMaxEnumerationDegree) {
      family = enumerate_subgroups(m).subgroups;
    } else {
      std::vector<Point> cycle(m);
      std::iota(cycle.begin(), cycle.end(), Point{0});
      family = enumerate_overgroups(GeneratedGroup(m, {Permutation::from_cycles(m, {cycle})}), 10000);
    }
    PraegerSaxlRow row;
    row.degree = m;
    const BigInt bound = BigInt(1) << (2 * m);
    PointSet all(m);
    std::iota(all.begin(), all.end(), Point{0});
    for (const auto& G : family) {
      if (!is_primitive(G) || contains_alt_on(G, all)) continue;
      ++row.checked;
      const std::size_t ord = G.order();
      if (BigInt(ord) > bound) ++row.exceptions;
      row.max_order = std::max(row.max_order, ord);
      row.max_ratio = std::max(row.max_ratio, Rational(BigInt(ord), bound));
    }
    rows.push_back(row);
  }
  return rows;
}

std::string to_string(GroupCase c) {
  switch (c) {
    case GroupCase::Xi: return "Xi";
    case GroupCase::I: return "I";
    case GroupCase::II: return "II";
    case GroupCase::III: return "III";
  }
  return "?";
}

Classification classify(const GeneratedGroup& G, std::size_t delta, std::size_t q) {
  if (q == 0) throw InvalidArgument("q must be positive");
  Classification c;
  c.profile = profile(G);
  c.xi = in_Xi(G, delta);
  const PointSet& Y = c.profile.giant();
  const GeneratedGroup proj = restrict_to(G, Y);
  PointSet all(Y.size());
  std::iota(all.begin(), all.end(), Point{0});
  c.blocks = minimal_blocks(proj, all);
  c.giant_primitive = !c.blocks.has_value();
  c.giant_has_alt = contains_alt_on(proj, all);
  if (c.blocks) {
    // Report the blocks on the original points.
    for (auto& b : c.blocks->blocks)
      for (auto& x : b) x = Y[x];
  }
  const double n = static_cast<double>(G.degree());
  const bool large = static_cast<double>(c.profile.t_max) > (1 - 1 / (2.0 * static_cast<double>(q))) * n;
  if (c.xi) c.group_case = GroupCase::Xi;
  else if (large && c.giant_primitive && !c.giant_has_alt) c.group_case = GroupCase::II;
  else if (large && !c.giant_primitive) c.group_case = GroupCase::III;
  else c.group_case = GroupCase::I;
  if (c.group_case != GroupCase::III) c.blocks.reset();
  return c;
}

std::optional<double> classification_log_bound(const Classification& c, const BoundParams& p,
                                               std::size_t degree) {
  const double k = static_cast<double>(degree);
  const double t = static_cast<double>(c.profile.t_max);
  switch (c.group_case) {
    case GroupCase::Xi: return std::nullopt;
    case GroupCase::I: return log_case_bound(BoundCase::I, p, k, t);
    case GroupCase::II: return log_case_bound(BoundCase::II, p, k, t);
    case GroupCase::III: return log_case_bound(BoundCase::III, p, k, t);
  }
  return std::nullopt;
}

std::map<GroupCase, Rational> weighted_case_report(
    const std::vector<std::pair<GeneratedGroup, Rational>>& mixture, std::size_t delta, std::size_t q) {
  std::map<GroupCase, Rational> out;
  for (const auto& [G, w] : mixture) out[classify(G, delta, q).group_case] += w;
  return out;
}

std::size_t StarLevel::leaves() const { return q * cone_size(); }
std::size_t StarLevel::cone_size() const { return ipow(d, n); }

namespace {

void check_level(const StarLevel& level, const ColourScheme& scheme) {
  if (scheme.d() != level.d) throw ColourSchemeMismatch("scheme arity differs from the tree");
  if (level.q < 1 || level.q > level.d + 1) throw InvalidArgument("need 1 <= q <= d+1");
}

struct Realizer {
  const Permutation& h;
  const ColourScheme& scheme;
  ColouringRule rule;
  std::size_t d;
  std::set<std::vector<Point>> F;

  // Block [x, x + d^height) maps onto [y, y + d^height) through an F-local map.
  bool block(std::size_t x, std::size_t y, std::size_t height, Point cx, Point cy) const {
    if (height == 0) return h.image(static_cast<Point>(x)) == y;
    const std::size_t sub = ipow(d, height - 1);
    const auto kx = scheme.child_colours(cx, rule), ky = scheme.child_colours(cy, rule);
    std::vector<Point> sigma(d + 1, 0);
    std::vector<char> used(d, 0);
    sigma[cx] = cy;
    std::vector<std::size_t> target(d);
    for (std::size_t i = 0; i < d; ++i) {
      const std::size_t img = h.image(static_cast<Point>(x + i * sub));
      if (img < y || img >= y + sub * d) return false;
      const std::size_t t = (img - y) / sub;
      if (used[t]++) return false;
      target[i] = t;
      sigma[kx[i]] = ky[t];
    }
    if (!F.count(sigma)) return false;
    for (std::size_t i = 0; i < d; ++i)
      if (!block(x + i * sub, y + target[i] * sub, height - 1, kx[i], ky[target[i]])) return false;
    return true;
  }
};

}  // namespace

bool realizable(const Permutation& h, const StarLevel& level, const ColourScheme& scheme, ColouringRule rule) {
  check_level(level, scheme);
  if (h.degree() != level.leaves()) throw DegreeMismatch("permutation degree differs from the level size");
  Realizer r{h, scheme, rule, level.d, {}};
  for (const auto& f : elements_of(scheme.group())) r.F.insert(f.images());
  const auto top = scheme.child_colours(kNoColour, rule);
  const std::size_t m = level.cone_size();
  std::vector<char> used(level.q, 0);
  for (std::size_t j = 0; j < level.q; ++j) {
    const std::size_t tj = h.image(static_cast<Point>(j * m)) / m;
    if (used[tj]++) return false;
    if (scheme.orbit_of(top[j]) != scheme.orbit_of(top[tj])) return false;
    if (!r.block(j * m, tj * m, level.n, top[j], top[tj])) return false;
  }
  return true;
}

bool theta_event(const GeneratedGroup& G, std::size_t u, std::size_t v, const StarLevel& level,
                 const ColourScheme& scheme, ColouringRule rule) {
  check_level(level, scheme);
  if (u >= level.q || v >= level.q) throw InvalidArgument("u and v must be root children");
  const auto top = scheme.child_colours(kNoColour, rule);
  if (scheme.orbit_of(top[u]) != scheme.orbit_of(top[v])) throw LabelMismatch("u and v carry different labels");
  if (G.degree() != level.leaves()) throw DegreeMismatch("group degree differs from the level size");
  const std::size_t m = level.cone_size();
  for (const auto& h : elements_of(G)) {
    // C_u·h = C_v is implied by realizability once the first leaf of C_u lands in C_v.
    if (h.image(static_cast<Point>(u * m)) / m != v) continue;
    if (realizable(h, level, scheme, rule)) return true;
  }
  return false;
}

std::vector<Permutation> realizable_level_maps(const StarLevel& level, const ColourScheme& scheme,
                                               ColouringRule rule, std::size_t cap) {
  check_level(level, scheme);
  const auto top = scheme.child_colours(kNoColour, rule);
  const auto mode = Canonicalizer::coloured(scheme, rule);
  const std::size_t m = level.cone_size(), q = level.q;
  std::vector<std::size_t> tau(q);
  std::iota(tau.begin(), tau.end(), std::size_t{0});
  std::vector<Permutation> out;
  do {
    bool ok = true;
    for (std::size_t j = 0; j < q && ok; ++j) ok = scheme.orbit_of(top[j]) == scheme.orbit_of(top[tau[j]]);
    if (!ok) continue;
    std::vector<std::vector<std::vector<std::uint32_t>>> per_cone(q);
    for (std::size_t j = 0; j < q; ++j)
      per_cone[j] = enumerate_cone_maps(mode, {level.n, top[j]}, {level.n, top[tau[j]]}, cap);
    if (std::any_of(per_cone.begin(), per_cone.end(), [](const auto& v) { return v.empty(); })) continue;
    std::vector<std::size_t> idx(q, 0);
    while (true) {
      std::vector<Point> images(q * m);
      for (std::size_t j = 0; j < q; ++j)
        for (std::size_t i = 0; i < m; ++i)
          images[j * m + i] = static_cast<Point>(tau[j] * m + per_cone[j][idx[j]][i]);
      out.push_back(Permutation::unchecked(std::move(images)));
      if (out.size() > cap) throw ClosureExceedsCap("too many realizable maps");
      std::size_t j = 0;
      while (j < q && ++idx[j] == per_cone[j].size()) idx[j++] = 0;
      if (j == q) break;
    }
  } while (std::next_permutation(tau.begin(), tau.end()));
  return out;
}

HeredityReport children_heredity_check(const GeneratedGroup& G_n, const GeneratedGroup& G_next,
                                       std::size_t d, std::size_t delta) {
  const std::size_t k = G_n.degree();
  if (G_next.degree() != k * d) throw IncompatibleChain("next level must have d times as many points");
  if (!in_Xi(G_n, delta)) throw IncompatibleChain("the level-n group is not in Xi");
  for (const auto& g : G_n.generators()) {
    std::vector<Point> lift(k * d);
    for (std::size_t x = 0; x < k; ++x)
      for (std::size_t i = 0; i < d; ++i) lift[x * d + i] = static_cast<Point>(g.image(static_cast<Point>(x)) * d + i);
    if (!G_next.contains(Permutation::unchecked(lift)))
      throw IncompatibleChain("next level misses the lift of " + g.cycle_string());
  }
  HeredityReport r;
  r.giant_n = profile(G_n).giant();
  r.giant_next = profile(G_next).giant();
  for (Point x = 0; x < k; ++x) {
    const bool in = std::binary_search(r.giant_n.begin(), r.giant_n.end(), x);
    bool kids = true;
    for (std::size_t i = 0; i < d; ++i)
      kids = kids && std::binary_search(r.giant_next.begin(), r.giant_next.end(), static_cast<Point>(x * d + i));
    if (in && !kids) r.only_if_violations.push_back(x);
    if (!in && kids) r.if_violations.push_back(x);
  }
  return r;
}

}  // namespace irswb
