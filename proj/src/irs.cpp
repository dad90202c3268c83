#include "irswb/irs.hpp"

#include <algorithm>
#include <map>
#include <set>

#include "irswb/errors.hpp"
#include "irswb/subgroups.hpp"

namespace irswb {

namespace {

using ElementKey = std::vector<Permutation>;

// Identity on the points outside `side`, g on the points of `side`.
Permutation project(const Permutation& g, const std::vector<char>& on_side) {
  std::vector<Point> im(g.degree());
  for (Point x = 0; x < g.degree(); ++x) im[x] = on_side[x] ? g.image(x) : x;
  return Permutation::unchecked(std::move(im));
}

std::vector<char> indicator(std::size_t degree, const PointSet& S) {
  std::vector<char> m(degree, 0);
  for (Point x : S) m[x] = 1;
  return m;
}

PartialMap restriction(const Permutation& g, const PointSet& U) {
  PartialMap m;
  m.reserve(U.size());
  for (Point u : U) m.push_back(g.image(u));
  return m;
}

bool disjoint(const PointSet& a, const PointSet& b) {
  for (Point x : a)
    if (std::binary_search(b.begin(), b.end(), x)) return false;
  return true;
}

}  // namespace

ConjInvariantMeasure::ConjInvariantMeasure(GeneratedGroup ambient,
                                           std::vector<WeightedSubgroup> support)
    : ambient_(ambient.with_elements()) {
  std::map<ElementKey, std::size_t> where;
  Rational total = 0;
  for (auto& atom : support) {
    if (atom.weight < 0) throw InvalidArgument("negative weight");
    total += atom.weight;
    GeneratedGroup H = atom.group.with_elements();
    auto [it, fresh] = where.emplace(H.sorted_elements(), support_.size());
    if (fresh)
      support_.push_back({H, atom.weight});
    else
      support_[it->second].weight += atom.weight;
  }
  if (total != 1) throw InvalidArgument("weights sum to " + to_string(total));
}

bool ConjInvariantMeasure::is_conjugation_invariant() const {
  std::map<ElementKey, Rational> weight;
  for (const auto& atom : support_) weight.emplace(atom.group.sorted_elements(), atom.weight);
  for (const auto& atom : support_) {
    for (const auto& g : ambient_.generators()) {
      ElementKey conj;
      for (const auto& h : atom.group.elements()) conj.push_back(conjugate(h, g));
      std::sort(conj.begin(), conj.end());
      auto it = weight.find(conj);
      if (it == weight.end() || it->second != atom.weight) return false;
    }
  }
  return true;
}

ConjInvariantMeasure uniform_conjugate_measure(const GeneratedGroup& gamma,
                                               const GeneratedGroup& ambient) {
  GeneratedGroup amb = ambient.with_elements();
  if (!gamma.is_subgroup_of(amb)) throw NotASubgroup("gamma is not contained in the ambient group");
  auto conj = conjugates_of(gamma, amb);
  std::vector<WeightedSubgroup> support;
  for (auto& H : conj) support.push_back({H, Rational(1, static_cast<long>(conj.size()))});
  return ConjInvariantMeasure(amb, std::move(support));
}

ConjInvariantMeasure stabilizer_measure(const GeneratedGroup& ambient) {
  GeneratedGroup amb = ambient.with_elements();
  std::vector<WeightedSubgroup> support;
  for (Point x = 0; x < amb.degree(); ++x) {
    std::vector<Permutation> fix;
    for (const auto& g : amb.elements())
      if (g.image(x) == x) fix.push_back(g);
    support.push_back({GeneratedGroup::from_elements(amb.degree(), std::move(fix), amb.cap()),
                       Rational(1, static_cast<long>(amb.degree()))});
  }
  return ConjInvariantMeasure(amb, std::move(support));
}

Transporter transporter(const GeneratedGroup& H, const PointSet& U, const PointSet& V) {
  Transporter t{U, V, {}, {}};
  std::set<PartialMap> maps;
  for (const auto& h : elements_of(H)) {
    if (image_of(U, h) != V) continue;
    t.elements.push_back(h);
    maps.insert(restriction(h, U));
  }
  t.restrictions.assign(maps.begin(), maps.end());
  return t;
}

LemmaCheck verify_E1(const ConjInvariantMeasure& mu, const PointSet& U, const PointSet& V,
                     const std::vector<PartialMap>& A) {
  if (U.empty() || V.empty() || !disjoint(U, V))
    throw InvalidArgument("U and V must be disjoint and nonempty");
  if (!mu.is_conjugation_invariant()) throw NotConjInvariant("measure is not conjugation invariant");
  const auto allowed = transporter(mu.ambient(), U, V).restrictions;
  std::set<PartialMap> Aset;
  for (const auto& a : A) {
    if (!std::binary_search(allowed.begin(), allowed.end(), a))
      throw InvalidArgument("A contains a map that no ambient element realizes");
    Aset.insert(a);
  }
  const Rational a_size(static_cast<long>(Aset.size()));

  // R(U) restricted to U, as partial maps U -> U.
  std::vector<PartialMap> rigid;
  for (const auto& r : rigid_stabilizer(mu.ambient(), U).elements()) rigid.push_back(restriction(r, U));

  LemmaCheck out{0, 0, false};
  for (const auto& atom : mu.support()) {
    auto uv = transporter(atom.group, U, V);
    if (uv.elements.empty()) continue;
    bool hit = std::any_of(uv.restrictions.begin(), uv.restrictions.end(),
                           [&](const PartialMap& m) { return Aset.count(m) > 0; });
    if (hit) out.lhs += atom.weight;
    auto uu = transporter(atom.group, U, U).restrictions;
    long common = 0;
    for (const auto& r : rigid)
      if (std::binary_search(uu.begin(), uu.end(), r)) ++common;
    Rational index(static_cast<long>(rigid.size()), common);
    Rational term = a_size / index;
    if (term > 1) term = 1;
    out.rhs += atom.weight * term;
  }
  out.holds = out.lhs <= out.rhs;
  return out;
}

LemmaCheck verify_E2(const ConjInvariantMeasure& mu, const Factorization& f,
                     const std::vector<Permutation>& B, NormalizerScope scope) {
  const auto& amb = mu.ambient();
  const std::size_t n = amb.degree();
  if (f.side1.size() + f.side2.size() != n || !disjoint(f.side1, f.side2))
    throw BadFactorization("sides do not partition the points");
  for (const auto& g : amb.generators())
    if (image_of(f.side1, g) != f.side1) throw BadFactorization("ambient group mixes the two sides");
  for (const auto& b : B)
    if (!amb.contains(b)) throw InvalidArgument("B is not a subset of the ambient group");
  if (!mu.is_conjugation_invariant()) throw NotConjInvariant("measure is not conjugation invariant");

  const auto on1 = indicator(n, f.side1);
  const auto on2 = indicator(n, f.side2);
  const Permutation id = Permutation::identity(n);

  std::vector<Permutation> range;
  {
    std::set<Permutation> r;
    for (const auto& g : amb.elements()) {
      if (scope == NormalizerScope::kernel) {
        if (project(g, on2) == id) r.insert(g);
      } else {
        r.insert(project(g, on1));
      }
    }
    range.assign(r.begin(), r.end());
  }

  LemmaCheck out{0, 0, false};
  for (const auto& atom : mu.support()) {
    const auto& H = atom.group;
    bool contains_all = std::all_of(B.begin(), B.end(), [&](const Permutation& b) { return H.contains(b); });
    if (contains_all) out.lhs += atom.weight;

    std::set<Permutation> pi2H;
    std::vector<Permutation> H1;
    for (const auto& h : H.elements()) {
      Permutation p2 = project(h, on2);
      if (p2 == id) H1.push_back(h);
      pi2H.insert(std::move(p2));
    }
    bool covered = std::all_of(B.begin(), B.end(),
                               [&](const Permutation& b) { return pi2H.count(project(b, on2)) > 0; });
    if (!covered) continue;

    std::sort(H1.begin(), H1.end());
    std::set<Permutation> coset;
    for (const auto& b : B) {
      Permutation b1 = project(b, on1);
      for (const auto& h : H1) coset.insert(compose(b1, h));
    }
    std::set<std::set<Permutation>> classes;
    for (const auto& g : range) {
      bool normalizes = true;
      for (const auto& h : H1)
        if (!std::binary_search(H1.begin(), H1.end(), conjugate(h, g))) {
          normalizes = false;
          break;
        }
      if (!normalizes) continue;
      std::set<Permutation> moved;
      for (const auto& x : coset) moved.insert(conjugate(x, g));
      classes.insert(std::move(moved));
    }
    out.rhs += atom.weight / Rational(static_cast<long>(classes.size()));
  }
  out.holds = out.lhs <= out.rhs;
  return out;
}

LemmaCheck verify_index(const GeneratedGroup& gamma, const std::vector<Permutation>& Q,
                        const PointSet& U, const PointSet& V) {
  for (const auto& q : Q)
    if (image_of(U, q) != V) throw BadTransporterSet("an element of Q does not map U onto V");
  GeneratedGroup G = gamma.with_elements();
  auto conj = conjugates_of(G, GeneratedGroup::symmetric(G.degree()));
  long hits = 0;
  for (const auto& H : conj)
    if (std::any_of(Q.begin(), Q.end(), [&](const Permutation& q) { return H.contains(q); })) ++hits;
  std::set<PartialMap> qu;
  for (const auto& q : Q) qu.insert(restriction(q, U));
  LemmaCheck out;
  out.lhs = Rational(hits, static_cast<long>(conj.size()));
  out.rhs = Rational(static_cast<long>(G.order()) * static_cast<long>(qu.size())) /
            Rational(factorial(static_cast<unsigned>(U.size())));
  out.holds = out.lhs <= out.rhs;
  return out;
}

namespace {

std::vector<PointSet> subsets_of(std::size_t n) {
  std::vector<PointSet> out;
  for (std::size_t mask = 1; mask < (std::size_t{1} << n); ++mask) {
    PointSet s;
    for (Point x = 0; x < n; ++x)
      if (mask >> x & 1) s.push_back(x);
    out.push_back(std::move(s));
  }
  std::sort(out.begin(), out.end(), [](const PointSet& a, const PointSet& b) {
    return a.size() != b.size() ? a.size() < b.size() : a < b;
  });
  return out;
}

}  // namespace

std::vector<CountingRow> counting_sweep(std::size_t degree, std::size_t cap) {
  if (degree > 5) throw DegreeTooLarge("counting sweeps are limited to degree 5");
  const auto L = enumerate_subgroups(degree, cap);
  const GeneratedGroup sym = GeneratedGroup::symmetric(degree, cap).with_elements();
  const auto subsets = subsets_of(degree);
  std::vector<CountingRow> rows;

  for (std::size_t gi = 0; gi < L.subgroups.size(); ++gi) {
    const auto& gamma = L.subgroups[gi];
    const auto mu = uniform_conjugate_measure(gamma, sym);
    for (const auto& U : subsets) {
      for (const auto& V : subsets) {
        if (U.size() != V.size() || !disjoint(U, V)) continue;
        auto t = transporter(gamma, U, V);
        if (t.elements.empty()) continue;
        rows.push_back({"E1", degree, gi, U, V, "", verify_E1(mu, U, V, t.restrictions)});
        rows.push_back({"index", degree, gi, U, V, "", verify_index(gamma, t.elements, U, V)});
      }
    }
  }

  const std::size_t a = degree / 2;
  if (a >= 1 && degree - a >= 1) {
    Factorization f;
    for (Point x = 0; x < degree; ++x) (x < a ? f.side1 : f.side2).push_back(x);
    for (std::size_t gi = 0; gi < L.subgroups.size(); ++gi) {
      const auto& gamma = L.subgroups[gi];
      if (std::any_of(gamma.generators().begin(), gamma.generators().end(),
                      [&](const Permutation& g) { return image_of(f.side1, g) != f.side1; }))
        continue;
      std::set<ElementKey> measures_seen;
      for (std::size_t li = 0; li < L.subgroups.size(); ++li) {
        const auto& lambda = L.subgroups[li];
        if (!lambda.is_subgroup_of(gamma)) continue;
        auto mu = uniform_conjugate_measure(lambda, gamma);
        ElementKey key;
        for (const auto& atom : mu.support())
          key.insert(key.end(), atom.group.sorted_elements().begin(), atom.group.sorted_elements().end());
        if (!measures_seen.insert(key).second) continue;
        for (const auto& b : gamma.sorted_elements()) {
          std::string detail = "mu=" + std::to_string(li) + " B=" + b.cycle_string();
          rows.push_back({"E2", degree, gi, f.side1, f.side2, detail, verify_E2(mu, f, {b})});
        }
      }
    }
  }

  if (rows.empty()) rows.push_back({"none", degree, 0, {}, {}, "", {0, 0, true}});
  return rows;
}

}  // namespace irswb
