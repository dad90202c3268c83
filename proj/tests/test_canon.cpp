#include <doctest.h>

#include <algorithm>
#include <map>
#include <random>
#include <set>

#include "irswb/canon.hpp"
#include "irswb/errors.hpp"
#include "irswb/subgroups.hpp"

using namespace irswb;

namespace {

LeafSet leaves(const Canonicalizer& mode, std::size_t depth, std::initializer_list<const char*> addrs) {
  LeafSet out;
  for (const char* a : addrs) {
    std::uint32_t idx = 0;
    for (const char* p = a; *p; ++p) idx = idx * static_cast<std::uint32_t>(mode.d()) + static_cast<std::uint32_t>(*p - '0');
    REQUIRE(std::string(a).size() == depth);
    out.push_back(idx);
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<ColourScheme> all_schemes(std::size_t d) {
  std::vector<ColourScheme> out;
  for (const auto& G : enumerate_subgroups(d + 1).subgroups) out.emplace_back(d, G);
  return out;
}

// A random admissible map from a cone with parent colour ca onto one with parent colour cb,
// built one vertex at a time. Returns an empty map when no local permutation fits.
std::vector<std::uint32_t> random_map(const Canonicalizer& mode, const std::vector<Permutation>& F,
                                      Point ca, Point cb, std::size_t h, std::mt19937_64& rng) {
  if (h == 0) return {0};
  const std::size_t d = mode.d();
  std::vector<std::uint32_t> target(d);
  if (!mode.is_coloured()) {
    for (std::size_t j = 0; j < d; ++j) target[j] = static_cast<std::uint32_t>(j);
    std::shuffle(target.begin(), target.end(), rng);
  } else {
    std::vector<Permutation> ok;
    for (const auto& s : F)
      if (s.image(ca) == cb) ok.push_back(s);
    if (ok.empty()) return {};
    const auto& s = ok[rng() % ok.size()];
    const auto& ka = mode.child_colours(ca);
    const auto& kb = mode.child_colours(cb);
    for (std::size_t j = 0; j < d; ++j)
      target[j] = static_cast<std::uint32_t>(std::find(kb.begin(), kb.end(), s.image(ka[j])) - kb.begin());
  }
  std::size_t chunk = 1;
  for (std::size_t i = 1; i < h; ++i) chunk *= d;
  std::vector<std::uint32_t> m(chunk * d);
  for (std::size_t j = 0; j < d; ++j) {
    Point cj = mode.is_coloured() ? mode.child_colours(ca)[j] : 0;
    Point cj2 = mode.is_coloured() ? mode.child_colours(cb)[target[j]] : 0;
    auto sub = random_map(mode, F, cj, cj2, h - 1, rng);
    for (std::size_t x = 0; x < chunk; ++x) m[j * chunk + x] = static_cast<std::uint32_t>(target[j] * chunk + sub[x]);
  }
  return m;
}

}  // namespace

TEST_CASE("small examples in full mode") {
  auto c = Canonicalizer::full(2);
  Cone cone{2, kNoColour};
  CHECK(c.equivalent(leaves(c, 2, {"00", "01"}), cone, leaves(c, 2, {"10", "11"}), cone));
  CHECK_FALSE(c.equivalent(leaves(c, 2, {"00", "01"}), cone, leaves(c, 2, {"00", "10"}), cone));
  CHECK(c.equivalent(leaves(c, 2, {"00", "11"}), cone, leaves(c, 2, {"01", "10"}), cone));
  CHECK(c.equivalent(leaves(c, 2, {"00", "10"}), cone, leaves(c, 2, {"01", "11"}), cone));
  CHECK_FALSE(c.equivalent(leaves(c, 2, {"00"}), cone, leaves(c, 2, {"00", "01"}), cone));
  CHECK_THROWS_AS(c.equivalent({0}, cone, {0}, Cone{3, kNoColour}), DepthMismatch);
  CHECK_THROWS_AS(c.canon({4}, cone), InvalidArgument);
  CHECK_THROWS_AS(c.canon({1, 0}, cone), InvalidArgument);
  CHECK(canon_full(2, {0, 1}, 2) == canon_full(2, {2, 3}, 2));
}

TEST_CASE("canon and canon_mask agree") {
  auto c = Canonicalizer::full(3);
  std::mt19937_64 rng(7);
  Cone cone{3, kNoColour};
  for (int t = 0; t < 500; ++t) {
    std::uint64_t mask = rng() & ((std::uint64_t{1} << 27) - 1);
    LeafSet E;
    for (std::uint32_t i = 0; i < 27; ++i)
      if (mask >> i & 1) E.push_back(i);
    CHECK(c.canon(E, cone) == c.canon_mask(mask, cone));
  }
  CHECK_THROWS_AS(c.canon_mask(1, Cone{4, kNoColour}), InvalidArgument);
}

TEST_CASE("census of two leaves at depth two") {
  auto c = Canonicalizer::full(2);
  auto census = orbit_census(c, {2, kNoColour}, 2);
  CHECK(census.total == 6);
  REQUIRE(census.classes.size() == 2);
  std::multiset<std::uint64_t> sizes;
  for (const auto& cl : census.classes) sizes.insert(cl.count);
  CHECK(sizes == std::multiset<std::uint64_t>{2, 4});
  CHECK(match_probability(census, census) == Rational(5, 9));
  CHECK(orbit_census(c, {2, kNoColour}, 0).classes.size() == 1);
  CHECK(orbit_census(c, {2, kNoColour}, 4).classes.size() == 1);
  CHECK_THROWS_AS(orbit_census(c, {2, kNoColour}, 5), KTooLarge);
  CHECK_THROWS_AS(orbit_census(c, {5, kNoColour}, 16, std::nullopt, 1000), BudgetExceeded);
}

TEST_CASE("match probability equals the pair-count oracle") {
  for (std::size_t d : {2u, 3u}) {
    auto c = Canonicalizer::full(d);
    Cone cone{2, kNoColour};
    const std::uint32_t n = static_cast<std::uint32_t>(d * d);
    for (std::size_t k = 1; k <= 3; ++k) {
      auto census = orbit_census(c, cone, k);
      std::vector<LeafSet> subsets;
      for (std::uint32_t mask = 0; mask < (1u << n); ++mask) {
        if (static_cast<std::size_t>(__builtin_popcount(mask)) != k) continue;
        LeafSet E;
        for (std::uint32_t i = 0; i < n; ++i)
          if (mask >> i & 1) E.push_back(i);
        subsets.push_back(E);
      }
      std::uint64_t hits = 0;
      for (const auto& a : subsets)
        for (const auto& b : subsets) hits += brute_force_equivalent(c, a, cone, b, cone);
      CHECK(match_probability(census, census) ==
            Rational(BigInt(hits), BigInt(subsets.size() * subsets.size())));
    }
  }
}

TEST_CASE("census descriptions are sorted and classes cover every subset") {
  auto c = Canonicalizer::coloured(ColourScheme::trivial(2));
  auto census = orbit_census(c, {3, 0}, 3);
  std::uint64_t sum = 0;
  for (std::size_t i = 0; i < census.classes.size(); ++i) {
    sum += census.classes[i].count;
    CHECK(census.classes[i].class_id == i);
    if (i) CHECK(census.classes[i - 1].description < census.classes[i].description);
  }
  CHECK(sum == census.total);
  // A trivial local group fixes every vertex, so every subset is its own class.
  CHECK(census.classes.size() == 56);
  auto labelled = orbit_census(c, {3, 0}, 1, std::size_t{1});
  std::uint64_t with_label = 0;
  for (auto l : c.leaf_labels({3, 0})) with_label += l == 1;
  CHECK(labelled.total == with_label);
}

TEST_CASE("the full local group gives the full-mode relation") {
  auto full = Canonicalizer::full(2);
  auto col = Canonicalizer::coloured(ColourScheme::full(2));
  for (std::size_t depth = 1; depth <= 3; ++depth) {
    const std::uint32_t n = 1u << depth;
    for (std::uint32_t a = 0; a < (1u << n); ++a)
      for (std::uint32_t b = 0; b < (1u << n); ++b) {
        bool f = full.canon_mask(a, {depth, kNoColour}) == full.canon_mask(b, {depth, kNoColour});
        for (Point pa = 0; pa <= 2; ++pa)
          CHECK(f == col.equivalent(LeafSet(), {depth, pa}, LeafSet(), {depth, 0}) *
                         (col.canon_mask(a, {depth, pa}) == col.canon_mask(b, {depth, 0})));
      }
  }
}

TEST_CASE("canonical forms agree with brute-force map enumeration") {
  for (const auto& scheme : all_schemes(2)) {
    for (auto rule : {ColouringRule::orbit_sorted, ColouringRule::natural}) {
      auto c = Canonicalizer::coloured(scheme, rule);
      for (std::size_t depth = 1; depth <= 3; ++depth) {
        const std::uint32_t n = 1u << depth;
        for (Point pa = 0; pa <= 2; ++pa)
          for (Point pb = 0; pb <= 2; ++pb) {
            const Cone a{depth, pa}, b{depth, pb};
            std::vector<std::set<std::uint32_t>> images(1u << n);
            for (const auto& m : enumerate_cone_maps(c, a, b))
              for (std::uint32_t s = 0; s < (1u << n); ++s) {
                std::uint32_t t = 0;
                for (std::uint32_t i = 0; i < n; ++i)
                  if (s >> i & 1) t |= 1u << m[i];
                images[s].insert(t);
              }
            for (std::uint32_t s = 0; s < (1u << n); ++s)
              for (std::uint32_t t = 0; t < (1u << n); ++t) {
                const bool fast = c.equivalent(LeafSet(), a, LeafSet(), b) &&
                                  c.canon_mask(s, a) == c.canon_mask(t, b);
                CHECK(fast == (images[s].count(t) == 1));
              }
          }
      }
    }
  }
  auto full3 = Canonicalizer::full(3);
  const Cone cone{2, kNoColour};
  auto maps = enumerate_cone_maps(full3, cone, cone);
  CHECK(maps.size() == 1296);
  std::vector<std::set<std::uint32_t>> images(1u << 9);
  for (const auto& m : maps)
    for (std::uint32_t s = 0; s < 512; ++s) {
      std::uint32_t t = 0;
      for (std::uint32_t i = 0; i < 9; ++i)
        if (s >> i & 1) t |= 1u << m[i];
      images[s].insert(t);
    }
  for (std::uint32_t s = 0; s < 512; ++s)
    for (std::uint32_t t = 0; t < 512; ++t)
      CHECK((full3.canon_mask(s, cone) == full3.canon_mask(t, cone)) == (images[s].count(t) == 1));
}

TEST_CASE("canonical forms are invariant under random admissible maps") {
  std::mt19937_64 rng(2024);
  auto schemes = all_schemes(3);
  for (int t = 0; t < 300; ++t) {
    const bool coloured = t % 3 != 0;
    const std::size_t d = t % 2 ? 2 : 3;
    const std::size_t depth = 1 + rng() % (d == 2 ? 8 : 5);
    Canonicalizer c = Canonicalizer::full(d);
    std::vector<Permutation> F;
    Point pa = kNoColour, pb = kNoColour;
    if (coloured) {
      auto pool = d == 2 ? all_schemes(2) : schemes;
      const auto& scheme = pool[rng() % pool.size()];
      c = Canonicalizer::coloured(scheme, t % 4 ? ColouringRule::orbit_sorted : ColouringRule::natural);
      F = elements_of(scheme.group());
      pa = static_cast<Point>(rng() % (d + 1));
      pb = F[rng() % F.size()].image(pa);
    }
    auto m = random_map(c, F, pa, pb, depth, rng);
    REQUIRE(!m.empty());
    LeafSet E, image;
    for (std::uint32_t i = 0; i < m.size(); ++i)
      if (rng() % 3 == 0) E.push_back(i);
    for (auto x : E) image.push_back(m[x]);
    std::sort(image.begin(), image.end());
    CHECK(c.equivalent(E, {depth, pa}, image, {depth, pb}));
    CHECK(c.canon(E, {depth, pa}) == c.canon(image, {depth, pb}));
  }
}

TEST_CASE("descriptions do not depend on intern order") {
  auto c = Canonicalizer::coloured(ColourScheme(2, GeneratedGroup(3, {Permutation::from_cycles(3, {{1, 2}})})));
  CHECK(c.describe(c.canon({}, {0, 1})) == "0:1");
  CHECK(c.describe(c.canon({0}, {0, 0})) == "1:0");
  auto f = Canonicalizer::full(2);
  CHECK(f.describe(f.canon({0}, {2, kNoColour})) == "((0,0),(0,1))");
  CHECK_THROWS_AS(c.canon({}, {1, 5}), ColourSchemeMismatch);
}
