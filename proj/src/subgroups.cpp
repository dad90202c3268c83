#include "irswb/subgroups.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <unordered_map>

#include "irswb/errors.hpp"

namespace irswb {

namespace {

// Sym(n) with elements indexed in lexicographic order of their image arrays.
class SymTable {
 public:
  explicit SymTable(std::size_t n) : n_(n) {
    std::vector<Point> im(n);
    std::iota(im.begin(), im.end(), Point{0});
    do {
      perms_.push_back(Permutation::unchecked(im));
      flat_.insert(flat_.end(), im.begin(), im.end());
    } while (std::next_permutation(im.begin(), im.end()));
    const std::size_t N = perms_.size();
    mul_.resize(N * N);
    std::uint8_t prod[8];
    for (std::size_t a = 0; a < N; ++a)
      for (std::size_t b = 0; b < N; ++b) {
        for (std::size_t x = 0; x < n_; ++x) prod[x] = flat_[b * n_ + flat_[a * n_ + x]];
        mul_[a * N + b] = rank_of(prod);
      }
  }

  std::size_t size() const { return perms_.size(); }
  std::uint16_t mul(std::uint16_t a, std::uint16_t b) const { return mul_[a * perms_.size() + b]; }
  const Permutation& perm(std::uint16_t i) const { return perms_[i]; }

  std::uint16_t rank(const Permutation& p) const {
    std::uint8_t im[8];
    for (std::size_t x = 0; x < n_; ++x) im[x] = static_cast<std::uint8_t>(p.image(static_cast<Point>(x)));
    return rank_of(im);
  }

 private:
  std::size_t n_;
  std::vector<Permutation> perms_;
  std::vector<std::uint8_t> flat_;
  std::vector<std::uint16_t> mul_;

  // Lehmer code, which is the position in lexicographic order.
  std::uint16_t rank_of(const std::uint8_t* im) const {
    std::size_t r = 0;
    for (std::size_t i = 0; i < n_; ++i) {
      std::size_t smaller = 0;
      for (std::size_t j = i + 1; j < n_; ++j)
        if (im[j] < im[i]) ++smaller;
      r = r * (n_ - i) + smaller;
    }
    return static_cast<std::uint16_t>(r);
  }
};

using Bits = std::vector<std::uint64_t>;

struct BitsHash {
  std::size_t operator()(const Bits& b) const noexcept {
    std::uint64_t h = 0x9e3779b97f4a7c15ULL;
    for (auto w : b) h = (h ^ w) * 0xff51afd7ed558ccdULL;
    return static_cast<std::size_t>(h ^ (h >> 29));
  }
};

struct IndexGroup {
  Bits bits;
  std::vector<std::uint16_t> elements;  // breadth-first order
  std::vector<std::uint16_t> gens;
};

bool test(const Bits& b, std::size_t i) { return (b[i >> 6] >> (i & 63)) & 1; }
void set(Bits& b, std::size_t i) { b[i >> 6] |= std::uint64_t{1} << (i & 63); }

// Closure of `base` (already a group) together with the extra generators.
IndexGroup join(const SymTable& T, const IndexGroup& base, const std::vector<std::uint16_t>& extra) {
  IndexGroup out;
  out.bits = base.bits;
  out.elements = base.elements;
  out.gens = base.gens;
  out.gens.insert(out.gens.end(), extra.begin(), extra.end());
  // Elements of `base` times base generators stay in base, so start products from all of them
  // only with the new generators, and use every generator for newly found elements.
  std::size_t old = out.elements.size();
  for (std::size_t head = 0; head < out.elements.size(); ++head) {
    const bool fresh = head >= old;
    for (std::size_t gi = fresh ? 0 : base.gens.size(); gi < out.gens.size(); ++gi) {
      std::uint16_t y = T.mul(out.elements[head], out.gens[gi]);
      if (!test(out.bits, y)) {
        set(out.bits, y);
        out.elements.push_back(y);
      }
    }
  }
  return out;
}

std::vector<std::uint16_t> cyclic_generators(const SymTable& T) {
  const std::size_t N = T.size();
  std::vector<std::uint16_t> cyclic;
  std::unordered_map<Bits, bool, BitsHash> seen;
  IndexGroup trivial;
  trivial.bits.assign((N + 63) / 64, 0);
  set(trivial.bits, 0);
  trivial.elements = {0};
  for (std::size_t e = 1; e < N; ++e) {
    IndexGroup c = join(T, trivial, {static_cast<std::uint16_t>(e)});
    if (seen.emplace(c.bits, true).second) cyclic.push_back(static_cast<std::uint16_t>(e));
  }
  return cyclic;
}

// Conjugation x -> s⁻¹xs on element indices, one map per generator of Sym(n).
std::vector<std::vector<std::uint16_t>> conjugation_maps(const SymTable& T, std::size_t degree) {
  std::vector<std::vector<std::uint16_t>> maps;
  const GeneratedGroup sym = GeneratedGroup::symmetric(degree);
  for (const auto& s : sym.generators()) {
    std::vector<std::uint16_t> m(T.size());
    Permutation si = inverse(s);
    for (std::size_t x = 0; x < T.size(); ++x)
      m[x] = T.rank(compose(compose(si, T.perm(static_cast<std::uint16_t>(x))), s));
    maps.push_back(std::move(m));
  }
  return maps;
}

IndexGroup conjugate_by(const IndexGroup& H, const std::vector<std::uint16_t>& m) {
  IndexGroup out;
  out.bits.assign(H.bits.size(), 0);
  for (auto e : H.elements) {
    out.elements.push_back(m[e]);
    set(out.bits, m[e]);
  }
  for (auto g : H.gens) out.gens.push_back(m[g]);
  return out;
}

// Closure of {start} under joins with cyclic subgroups. With `conj_maps` nonempty only one
// representative per conjugacy class is extended and whole classes are registered at once;
// this is valid when `start` is normal in Sym(n).
std::vector<IndexGroup> overgroup_search(const SymTable& T, const IndexGroup& start,
                                         const std::vector<std::vector<std::uint16_t>>& conj_maps) {
  const auto cyclic = cyclic_generators(T);
  std::vector<IndexGroup> found;
  std::unordered_map<Bits, std::size_t, BitsHash> index;
  std::vector<std::size_t> queue;
  auto add_class = [&](IndexGroup G) {
    std::size_t first = found.size();
    index.emplace(G.bits, found.size());
    found.push_back(std::move(G));
    queue.push_back(first);
    for (std::size_t head = first; head < found.size(); ++head)
      for (const auto& m : conj_maps) {
        IndexGroup C = conjugate_by(found[head], m);
        if (index.count(C.bits)) continue;
        index.emplace(C.bits, found.size());
        found.push_back(std::move(C));
      }
  };
  add_class(start);
  for (std::size_t qi = 0; qi < queue.size(); ++qi) {
    for (std::uint16_t g : cyclic) {
      const IndexGroup& H = found[queue[qi]];
      if (test(H.bits, g)) continue;
      IndexGroup J = join(T, H, {g});
      if (index.count(J.bits)) continue;
      add_class(std::move(J));
    }
  }
  std::vector<std::vector<std::uint16_t>> keys(found.size());
  for (std::size_t i = 0; i < found.size(); ++i) {
    keys[i] = found[i].elements;
    std::sort(keys[i].begin(), keys[i].end());
  }
  std::vector<std::size_t> order(found.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (keys[a].size() != keys[b].size()) return keys[a].size() < keys[b].size();
    return keys[a] < keys[b];
  });
  std::vector<IndexGroup> sorted;
  sorted.reserve(found.size());
  for (std::size_t i : order) sorted.push_back(std::move(found[i]));
  return sorted;
}

GeneratedGroup to_group(const SymTable& T, std::size_t degree, const IndexGroup& g,
                        std::size_t cap) {
  std::vector<Permutation> gens, elems;
  for (auto i : g.gens) gens.push_back(T.perm(i));
  for (auto i : g.elements) elems.push_back(T.perm(i));
  return GeneratedGroup::from_parts(degree, std::move(gens), std::move(elems), cap);
}

IndexGroup to_index_group(const SymTable& T, const GeneratedGroup& G) {
  IndexGroup out;
  out.bits.assign((T.size() + 63) / 64, 0);
  for (const auto& p : elements_of(G)) {
    auto r = T.rank(p);
    set(out.bits, r);
    out.elements.push_back(r);
  }
  for (const auto& g : G.generators()) out.gens.push_back(T.rank(g));
  return out;
}

std::size_t factorial_size(std::size_t n) {
  std::size_t f = 1;
  for (std::size_t i = 2; i <= n; ++i) f *= i;
  return f;
}

}  // namespace

SubgroupLattice enumerate_subgroups(std::size_t degree, std::size_t cap) {
  if (degree == 0) throw InvalidArgument("degree must be positive");
  if (degree > kMaxEnumerationDegree || factorial_size(degree) > cap)
    throw DegreeTooLarge("Sym(" + std::to_string(degree) + ") is beyond the enumeration budget");
  SymTable T(degree);
  IndexGroup trivial;
  trivial.bits.assign((T.size() + 63) / 64, 0);
  set(trivial.bits, 0);
  trivial.elements = {0};
  const auto conj_maps = conjugation_maps(T, degree);
  auto found = overgroup_search(T, trivial, conj_maps);

  SubgroupLattice L;
  L.degree = degree;
  std::unordered_map<Bits, std::size_t, BitsHash> index;
  for (std::size_t i = 0; i < found.size(); ++i) {
    index.emplace(found[i].bits, i);
    L.subgroups.push_back(to_group(T, degree, found[i], cap));
  }

  // Conjugacy classes: orbits of the conjugation action of Sym(degree)'s two generators.
  const std::size_t none = static_cast<std::size_t>(-1);
  L.class_of.assign(found.size(), none);
  for (std::size_t i = 0; i < found.size(); ++i) {
    if (L.class_of[i] != none) continue;
    std::size_t cls = L.classes.size();
    L.classes.push_back({i});
    L.class_of[i] = cls;
    for (std::size_t head = 0; head < L.classes[cls].size(); ++head) {
      const auto& H = found[L.classes[cls][head]];
      for (const auto& m : conj_maps) {
        std::size_t j = index.at(conjugate_by(H, m).bits);
        if (L.class_of[j] == none) {
          L.class_of[j] = cls;
          L.classes[cls].push_back(j);
        }
      }
    }
    std::sort(L.classes[cls].begin(), L.classes[cls].end());
  }
  return L;
}

std::vector<GeneratedGroup> enumerate_overgroups(const GeneratedGroup& seed, std::size_t cap) {
  const std::size_t degree = seed.degree();
  if (degree == 0) throw InvalidArgument("degree must be positive");
  if (degree > 7 || factorial_size(degree) > cap)
    throw DegreeTooLarge("Sym(" + std::to_string(degree) + ") is beyond the enumeration budget");
  SymTable T(degree);
  auto found = overgroup_search(T, to_index_group(T, seed), {});
  std::vector<GeneratedGroup> out;
  for (const auto& g : found) out.push_back(to_group(T, degree, g, cap));
  return out;
}

std::vector<GeneratedGroup> conjugates_of(const GeneratedGroup& H, const GeneratedGroup& by) {
  std::map<std::vector<Permutation>, GeneratedGroup> seen;
  GeneratedGroup start = H.with_elements();
  seen.emplace(start.sorted_elements(), start);
  std::vector<GeneratedGroup> queue{start};
  for (std::size_t head = 0; head < queue.size(); ++head) {
    for (const auto& g : by.generators()) {
      std::vector<Permutation> gens, elems;
      for (const auto& x : queue[head].generators()) gens.push_back(conjugate(x, g));
      for (const auto& x : queue[head].elements()) elems.push_back(conjugate(x, g));
      auto C = GeneratedGroup::from_parts(H.degree(), std::move(gens), std::move(elems), H.cap());
      if (seen.emplace(C.sorted_elements(), C).second) queue.push_back(C);
    }
  }
  std::vector<GeneratedGroup> out;
  for (auto& [key, G] : seen) out.push_back(G);
  return out;
}

}  // namespace irswb
