#include "irswb/perm.hpp"

#include <algorithm>
#include <numeric>
#include <sstream>
#include <unordered_set>

#include "irswb/errors.hpp"

namespace irswb {

Permutation::Permutation(std::vector<Point> images) : images_(std::move(images)) {
  std::vector<char> seen(images_.size(), 0);
  for (Point y : images_) {
    if (y >= images_.size() || seen[y]) throw InvalidArgument("images do not form a bijection");
    seen[y] = 1;
  }
}

Permutation Permutation::identity(std::size_t degree) {
  std::vector<Point> im(degree);
  std::iota(im.begin(), im.end(), Point{0});
  return unchecked(std::move(im));
}

Permutation Permutation::unchecked(std::vector<Point> images) {
  Permutation p;
  p.images_ = std::move(images);
  return p;
}

Permutation Permutation::from_cycles(std::size_t degree,
                                     const std::vector<std::vector<Point>>& cycles) {
  std::vector<Point> im(degree);
  std::iota(im.begin(), im.end(), Point{0});
  std::vector<char> used(degree, 0);
  for (const auto& c : cycles) {
    for (std::size_t i = 0; i < c.size(); ++i) {
      if (c[i] >= degree || used[c[i]]) throw InvalidArgument("bad cycle notation");
      used[c[i]] = 1;
      im[c[i]] = c[(i + 1) % c.size()];
    }
  }
  return Permutation(std::move(im));
}

bool Permutation::is_identity() const {
  for (std::size_t i = 0; i < images_.size(); ++i)
    if (images_[i] != i) return false;
  return true;
}

bool Permutation::is_even() const {
  std::vector<char> seen(images_.size(), 0);
  std::size_t transpositions = 0;
  for (std::size_t i = 0; i < images_.size(); ++i) {
    if (seen[i]) continue;
    std::size_t len = 0;
    for (Point x = static_cast<Point>(i); !seen[x]; x = images_[x]) {
      seen[x] = 1;
      ++len;
    }
    transpositions += len - 1;
  }
  return transpositions % 2 == 0;
}

std::size_t Permutation::order() const {
  std::vector<char> seen(images_.size(), 0);
  std::size_t ord = 1;
  for (std::size_t i = 0; i < images_.size(); ++i) {
    if (seen[i]) continue;
    std::size_t len = 0;
    for (Point x = static_cast<Point>(i); !seen[x]; x = images_[x]) {
      seen[x] = 1;
      ++len;
    }
    ord = std::lcm(ord, len);
  }
  return ord;
}

PointSet Permutation::support() const {
  PointSet s;
  for (std::size_t i = 0; i < images_.size(); ++i)
    if (images_[i] != i) s.push_back(static_cast<Point>(i));
  return s;
}

std::string Permutation::cycle_string() const {
  std::ostringstream out;
  std::vector<char> seen(images_.size(), 0);
  for (std::size_t i = 0; i < images_.size(); ++i) {
    if (seen[i] || images_[i] == i) continue;
    out << '(';
    bool first = true;
    for (Point x = static_cast<Point>(i); !seen[x]; x = images_[x]) {
      seen[x] = 1;
      if (!first) out << ' ';
      out << x;
      first = false;
    }
    out << ')';
  }
  std::string s = out.str();
  return s.empty() ? "()" : s;
}

std::size_t PermutationHash::operator()(const Permutation& p) const noexcept {
  std::uint64_t h = 1469598103934665603ULL;
  for (Point x : p.images()) {
    h ^= x;
    h *= 1099511628211ULL;
  }
  return static_cast<std::size_t>(h);
}

Permutation compose(const Permutation& p, const Permutation& q) {
  if (p.degree() != q.degree()) throw DegreeMismatch("compose of different degrees");
  std::vector<Point> im(p.degree());
  for (std::size_t x = 0; x < im.size(); ++x) im[x] = q.image(p.image(static_cast<Point>(x)));
  return Permutation::unchecked(std::move(im));
}

Permutation inverse(const Permutation& p) {
  std::vector<Point> im(p.degree());
  for (std::size_t x = 0; x < im.size(); ++x) im[p.image(static_cast<Point>(x))] = static_cast<Point>(x);
  return Permutation::unchecked(std::move(im));
}

Permutation conjugate(const Permutation& h, const Permutation& g) {
  return compose(compose(inverse(g), h), g);
}

Permutation power(const Permutation& p, long long e) {
  Permutation base = e < 0 ? inverse(p) : p;
  unsigned long long n = e < 0 ? static_cast<unsigned long long>(-e) : static_cast<unsigned long long>(e);
  Permutation result = Permutation::identity(p.degree());
  while (n) {
    if (n & 1) result = compose(result, base);
    base = compose(base, base);
    n >>= 1;
  }
  return result;
}

std::vector<Permutation> close(std::size_t degree, const std::vector<Permutation>& generators,
                               std::size_t cap) {
  for (const auto& g : generators)
    if (g.degree() != degree) throw DegreeMismatch("generator degree differs from group degree");
  std::vector<Permutation> out{Permutation::identity(degree)};
  std::unordered_set<Permutation, PermutationHash> seen(out.begin(), out.end());
  for (std::size_t head = 0; head < out.size(); ++head) {
    for (const auto& g : generators) {
      Permutation next = compose(out[head], g);
      if (seen.insert(next).second) {
        if (out.size() >= cap) throw ClosureExceedsCap("more than " + std::to_string(cap) + " elements");
        out.push_back(std::move(next));
      }
    }
  }
  return out;
}

GeneratedGroup::GeneratedGroup(std::size_t degree, std::vector<Permutation> generators,
                               std::size_t cap)
    : degree_(degree), generators_(std::move(generators)), cap_(cap) {
  for (const auto& g : generators_)
    if (g.degree() != degree_) throw DegreeMismatch("generator degree differs from group degree");
}

void GeneratedGroup::fill(std::vector<Permutation> elements) {
  auto cache = std::make_shared<Cache>();
  cache->sorted = elements;
  std::sort(cache->sorted.begin(), cache->sorted.end());
  cache->bfs = std::move(elements);
  data_ = std::move(cache);
}

GeneratedGroup GeneratedGroup::enumerated(std::size_t degree, std::vector<Permutation> generators,
                                          std::size_t cap) {
  GeneratedGroup G(degree, std::move(generators), cap);
  G.fill(close(degree, G.generators_, cap));
  return G;
}

GeneratedGroup GeneratedGroup::from_elements(std::size_t degree, std::vector<Permutation> elements,
                                             std::size_t cap) {
  std::vector<Permutation> sorted = elements;
  std::sort(sorted.begin(), sorted.end());
  std::vector<Permutation> gens;
  std::unordered_set<Permutation, PermutationHash> span{Permutation::identity(degree)};
  for (const auto& e : sorted) {
    if (span.count(e)) continue;
    gens.push_back(e);
    auto closed = close(degree, gens, std::max(cap, elements.size()));
    span = std::unordered_set<Permutation, PermutationHash>(closed.begin(), closed.end());
  }
  GeneratedGroup G(degree, std::move(gens), cap);
  G.fill(std::move(elements));
  return G;
}

GeneratedGroup GeneratedGroup::from_parts(std::size_t degree, std::vector<Permutation> generators,
                                          std::vector<Permutation> elements, std::size_t cap) {
  GeneratedGroup G(degree, std::move(generators), cap);
  G.fill(std::move(elements));
  return G;
}

GeneratedGroup GeneratedGroup::trivial(std::size_t degree) {
  GeneratedGroup G(degree, {});
  G.fill({Permutation::identity(degree)});
  return G;
}

GeneratedGroup GeneratedGroup::symmetric_on(std::size_t degree, const PointSet& on,
                                            std::size_t cap) {
  std::vector<Permutation> gens;
  if (on.size() >= 2) gens.push_back(Permutation::from_cycles(degree, {{on[0], on[1]}}));
  if (on.size() >= 3) gens.push_back(Permutation::from_cycles(degree, {on}));
  return GeneratedGroup(degree, std::move(gens), cap);
}

GeneratedGroup GeneratedGroup::alternating_on(std::size_t degree, const PointSet& on,
                                              std::size_t cap) {
  std::vector<Permutation> gens;
  for (std::size_t i = 2; i < on.size(); ++i)
    gens.push_back(Permutation::from_cycles(degree, {{on[0], on[1], on[i]}}));
  return GeneratedGroup(degree, std::move(gens), cap);
}

GeneratedGroup GeneratedGroup::symmetric(std::size_t degree, std::size_t cap) {
  PointSet all(degree);
  std::iota(all.begin(), all.end(), Point{0});
  return symmetric_on(degree, all, cap);
}

GeneratedGroup GeneratedGroup::alternating(std::size_t degree, std::size_t cap) {
  PointSet all(degree);
  std::iota(all.begin(), all.end(), Point{0});
  return alternating_on(degree, all, cap);
}

GeneratedGroup GeneratedGroup::with_elements() const {
  if (has_elements()) return *this;
  GeneratedGroup G = *this;
  G.fill(close(degree_, generators_, cap_));
  return G;
}

const std::vector<Permutation>& GeneratedGroup::elements() const& {
  if (!data_) throw InvalidArgument("group elements not enumerated");
  return data_->bfs;
}

const std::vector<Permutation>& GeneratedGroup::sorted_elements() const& {
  if (!data_) throw InvalidArgument("group elements not enumerated");
  return data_->sorted;
}

std::size_t GeneratedGroup::order() const {
  if (data_) return data_->bfs.size();
  return close(degree_, generators_, cap_).size();
}

bool GeneratedGroup::contains(const Permutation& p) const {
  if (p.degree() != degree_) return false;
  const auto& s = has_elements() ? sorted_elements() : with_elements().sorted_elements();
  return std::binary_search(s.begin(), s.end(), p);
}

bool GeneratedGroup::is_subgroup_of(const GeneratedGroup& other) const {
  if (other.degree() != degree_) return false;
  GeneratedGroup big = other.with_elements();
  for (const auto& g : generators_)
    if (!big.contains(g)) return false;
  return true;
}

bool GeneratedGroup::same_elements(const GeneratedGroup& other) const {
  if (other.degree() != degree_) return false;
  return with_elements().sorted_elements() == other.with_elements().sorted_elements();
}

std::vector<Permutation> elements_of(const GeneratedGroup& G) {
  if (G.has_elements()) return G.elements();
  return close(G.degree(), G.generators(), G.cap());
}

PointSet orbit_of(const GeneratedGroup& G, Point x) {
  std::vector<char> seen(G.degree(), 0);
  PointSet orb{x};
  seen[x] = 1;
  for (std::size_t head = 0; head < orb.size(); ++head) {
    for (const auto& g : G.generators()) {
      Point y = g.image(orb[head]);
      if (!seen[y]) {
        seen[y] = 1;
        orb.push_back(y);
      }
    }
  }
  std::sort(orb.begin(), orb.end());
  return orb;
}

std::vector<PointSet> orbits(const GeneratedGroup& G) {
  std::vector<char> seen(G.degree(), 0);
  std::vector<PointSet> out;
  for (Point x = 0; x < G.degree(); ++x) {
    if (seen[x]) continue;
    PointSet orb = orbit_of(G, x);
    for (Point y : orb) seen[y] = 1;
    out.push_back(std::move(orb));
  }
  return out;
}

bool is_transitive(const GeneratedGroup& G) {
  return G.degree() <= 1 || orbit_of(G, 0).size() == G.degree();
}

namespace {

struct UnionFind {
  std::vector<Point> parent;
  explicit UnionFind(std::size_t n) : parent(n) { std::iota(parent.begin(), parent.end(), Point{0}); }
  Point find(Point x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  }
  bool unite(Point a, Point b) {
    a = find(a);
    b = find(b);
    if (a == b) return false;
    if (b < a) std::swap(a, b);
    parent[b] = a;
    return true;
  }
};

// Smallest G-invariant partition of `component` in which a and b share a block.
std::vector<PointSet> block_closure(const GeneratedGroup& G, const PointSet& component, Point a,
                                    Point b) {
  UnionFind uf(G.degree());
  uf.unite(a, b);
  bool changed = true;
  while (changed) {
    changed = false;
    for (const auto& g : G.generators()) {
      for (Point x : component) {
        Point r = uf.find(x);
        if (uf.unite(g.image(x), g.image(r))) changed = true;
      }
    }
  }
  std::vector<PointSet> blocks;
  std::vector<long> index(G.degree(), -1);
  for (Point x : component) {
    Point r = uf.find(x);
    if (index[r] < 0) {
      index[r] = static_cast<long>(blocks.size());
      blocks.emplace_back();
    }
    blocks[static_cast<std::size_t>(index[r])].push_back(x);
  }
  return blocks;
}

}  // namespace

std::optional<BlockSystem> minimal_blocks(const GeneratedGroup& G, const PointSet& component) {
  if (component.empty()) throw NotTransitive("empty component");
  if (orbit_of(G, component.front()) != component)
    throw NotTransitive("component " + to_string(component) + " is not a single orbit");
  std::optional<BlockSystem> best;
  for (std::size_t i = 1; i < component.size(); ++i) {
    auto blocks = block_closure(G, component, component[0], component[i]);
    if (blocks.size() <= 1) continue;
    std::size_t size = blocks.front().size();
    if (!best || size < best->block_size) best = BlockSystem{std::move(blocks), size};
  }
  return best;
}

bool is_primitive(const GeneratedGroup& G) {
  if (!is_transitive(G)) return false;
  if (G.degree() <= 1) return true;
  PointSet all(G.degree());
  std::iota(all.begin(), all.end(), Point{0});
  return !minimal_blocks(G, all).has_value();
}

GeneratedGroup rigid_stabilizer(const GeneratedGroup& G, const PointSet& U) {
  std::vector<char> inside(G.degree(), 0);
  for (Point u : U) inside[u] = 1;
  std::vector<Permutation> kept;
  for (const auto& g : elements_of(G)) {
    bool ok = true;
    for (Point x = 0; x < G.degree() && ok; ++x)
      if (!inside[x] && g.image(x) != x) ok = false;
    if (ok) kept.push_back(g);
  }
  return GeneratedGroup::from_elements(G.degree(), std::move(kept), G.cap());
}

PointSet image_of(const PointSet& U, const Permutation& g) {
  PointSet out;
  out.reserve(U.size());
  for (Point u : U) out.push_back(g.image(u));
  std::sort(out.begin(), out.end());
  return out;
}

GeneratedGroup setwise_stabilizer(const GeneratedGroup& G, const PointSet& U) {
  std::vector<Permutation> kept;
  for (const auto& g : elements_of(G))
    if (image_of(U, g) == U) kept.push_back(g);
  return GeneratedGroup::from_elements(G.degree(), std::move(kept), G.cap());
}

Permutation restrict_to(const Permutation& p, const PointSet& U) {
  std::vector<Point> im(U.size());
  for (std::size_t i = 0; i < U.size(); ++i) {
    auto it = std::lower_bound(U.begin(), U.end(), p.image(U[i]));
    if (it == U.end() || *it != p.image(U[i])) throw InvalidArgument("permutation does not preserve U");
    im[i] = static_cast<Point>(it - U.begin());
  }
  return Permutation(std::move(im));
}

GeneratedGroup restrict_to(const GeneratedGroup& G, const PointSet& U) {
  std::vector<Permutation> gens;
  for (const auto& g : G.generators()) gens.push_back(restrict_to(g, U));
  return GeneratedGroup(U.size(), std::move(gens), G.cap());
}

bool contains_alt_on(const GeneratedGroup& G, const PointSet& U) {
  if (U.size() <= 2) return true;
  GeneratedGroup R = rigid_stabilizer(G, U);
  unsigned long long full = 1;
  for (std::size_t i = 2; i <= U.size(); ++i) full *= i;
  std::size_t ord = R.order();
  if (ord == full) return true;
  if (ord != full / 2) return false;
  // The only index-2 subgroup of Sym(U) is Alt(U).
  for (const auto& g : R.elements())
    if (!g.is_even()) return false;
  return true;
}

PointSet complement(std::size_t degree, const PointSet& U) {
  std::vector<char> inside(degree, 0);
  for (Point u : U) inside[u] = 1;
  PointSet out;
  for (Point x = 0; x < degree; ++x)
    if (!inside[x]) out.push_back(x);
  return out;
}

std::string to_string(const PointSet& U) {
  std::string s = "{";
  for (std::size_t i = 0; i < U.size(); ++i) {
    if (i) s += ' ';
    s += std::to_string(U[i]);
  }
  return s + "}";
}

}  // namespace irswb
