#include <doctest.h>

#include <algorithm>
#include <numeric>
#include <random>
#include <set>
#include <unordered_set>

#include "irswb/classifier.hpp"
#include "irswb/errors.hpp"
#include "irswb/subgroups.hpp"

using namespace irswb;

namespace {

Permutation cyc(std::size_t n, std::vector<std::vector<Point>> cycles) {
  return Permutation::from_cycles(n, cycles);
}

PointSet range_set(Point from, Point to) {
  PointSet s(to - from);
  std::iota(s.begin(), s.end(), from);
  return s;
}

std::vector<ColourScheme> schemes3() {
  std::vector<ColourScheme> out;
  for (const auto& G : enumerate_subgroups(3).subgroups) out.emplace_back(2, G);
  return out;
}

}  // namespace

TEST_CASE("transitive profiles") {
  auto p = profile(GeneratedGroup(4, {cyc(4, {{0, 1}}), cyc(4, {{2, 3}})}));
  CHECK(p.sizes == std::vector<std::size_t>{2, 2});
  CHECK(p.giant() == PointSet{0, 1});
  CHECK(profile(GeneratedGroup::symmetric(5)).sizes == std::vector<std::size_t>{5});
  auto t = profile(GeneratedGroup::trivial(4));
  CHECK(t.sizes == std::vector<std::size_t>{1, 1, 1, 1});
  CHECK(t.t_max == 1);
  auto q = profile(GeneratedGroup(5, {cyc(5, {{3, 4}}), cyc(5, {{0, 2, 1}})}));
  CHECK(q.components == std::vector<PointSet>{{0, 1, 2}, {3, 4}});
}

TEST_CASE("Xi membership examples") {
  auto s8 = GeneratedGroup::symmetric(8, 50000);
  auto w = in_Xi(s8, 0);
  REQUIRE(w);
  CHECK(w->U == range_set(0, 8));
  auto a6 = GeneratedGroup::alternating_on(8, range_set(0, 6));
  auto w6 = in_Xi(a6, 2);
  REQUIRE(w6);
  CHECK(w6->U == range_set(0, 6));
  CHECK(contains_alt_on(a6, w6->U));
  CHECK_FALSE(in_Xi(a6, 1));
  CHECK_FALSE(in_Xi(GeneratedGroup(8, {cyc(8, {{0, 1}})}), 2));
  // Alt on an orbit whose action is tied to another orbit is not enough.
  auto tied = GeneratedGroup(6, {cyc(6, {{0, 1, 2}, {3, 4, 5}})});
  CHECK_FALSE(in_Xi(tied, 3));
  CHECK(in_Xi(tied, 6));
}

TEST_CASE("pruned Xi search matches the definitional search on Sym(6)") {
  auto L = enumerate_subgroups(6);
  std::size_t members = 0;
  for (const auto& G : L.subgroups)
    for (std::size_t delta : {0u, 1u, 2u}) {
      auto a = in_Xi(G, delta);
      auto b = in_Xi_unpruned(G, delta);
      REQUIRE(a.has_value() == b.has_value());
      if (a) {
        CHECK(a->U == b->U);
        ++members;
      }
    }
  CHECK(members > 0);
}

TEST_CASE("Pi membership") {
  const std::vector<PointSet> labels{{0, 1, 2}, {3, 4, 5}};
  auto full = GeneratedGroup(6, {cyc(6, {{0, 1}}), cyc(6, {{0, 1, 2}}), cyc(6, {{3, 4}}), cyc(6, {{3, 4, 5}})});
  auto w = in_Pi(full, labels, 0);
  REQUIRE(w);
  CHECK(w->U == labels);
  CHECK_FALSE(in_Pi(GeneratedGroup(6, {cyc(6, {{0, 1, 2}, {3, 4, 5}})}), labels, 0));
  CHECK(in_Pi(GeneratedGroup(6, {cyc(6, {{0, 1, 2}}), cyc(6, {{3, 4, 5}})}), labels, 0));
  CHECK_THROWS_AS(in_Pi(GeneratedGroup(6, {cyc(6, {{2, 3}})}), labels, 0), LabelPartitionViolated);
  CHECK_THROWS_AS(in_Pi(full, {{0, 1, 2}}, 0), LabelPartitionViolated);
  // With slack the diagonal passes through small U_i.
  CHECK(in_Pi(GeneratedGroup(6, {cyc(6, {{0, 1, 2}, {3, 4, 5}})}), labels, 3));
}

TEST_CASE("Praeger-Saxl at small degree") {
  auto rows = praeger_saxl_check(6);
  REQUIRE(rows.size() == 6);
  Rational worst = 0;
  for (const auto& r : rows) {
    CHECK(r.exceptions == 0);
    worst = std::max(worst, r.max_ratio);
  }
  CHECK(rows[4].max_order == 20);
  CHECK(rows[3].checked == 0);
  CHECK(rows[5].max_order == 120);
  CHECK(worst == Rational(120, 4096));
  CHECK_THROWS_AS(praeger_saxl_check(8), DegreeTooLarge);
  // AGL(1,7) on 7 points.
  auto agl7 = GeneratedGroup(7, {cyc(7, {{0, 1, 2, 3, 4, 5, 6}}), cyc(7, {{1, 3, 2, 6, 4, 5}})});
  CHECK(agl7.order() == 42);
  CHECK(is_primitive(agl7));
}

TEST_CASE("classification examples") {
  auto s6 = classify(GeneratedGroup::symmetric(6), 0, 3);
  CHECK(s6.group_case == GroupCase::Xi);
  REQUIRE(s6.xi);
  CHECK(s6.xi->U.size() == 6);
  auto c6 = classify(GeneratedGroup(6, {cyc(6, {{0, 1, 2, 3, 4, 5}})}), 0, 3);
  CHECK(c6.group_case == GroupCase::III);
  REQUIRE(c6.blocks);
  CHECK((c6.blocks->blocks == std::vector<PointSet>{{0, 3}, {1, 4}, {2, 5}} ||
         c6.blocks->blocks == std::vector<PointSet>{{0, 2, 4}, {1, 3, 5}}));
  auto triv = classify(GeneratedGroup::trivial(4), 0, 3);
  CHECK(triv.group_case == GroupCase::I);
  CHECK(triv.profile.t_max == 1);
  auto c5 = classify(GeneratedGroup(5, {cyc(5, {{0, 1, 2, 3, 4}})}), 0, 3);
  CHECK(c5.group_case == GroupCase::II);
  BoundParams p{2, 3, 1, 1, 0.1};
  CHECK_FALSE(classification_log_bound(s6, p, 6).has_value());
  CHECK(classification_log_bound(c6, p, 6).has_value());
  auto report = weighted_case_report({{GeneratedGroup::symmetric(6), Rational(1, 3)},
                                      {GeneratedGroup::trivial(6), Rational(2, 3)}},
                                     0, 3);
  CHECK(report[GroupCase::Xi] == Rational(1, 3));
  CHECK(report[GroupCase::I] == Rational(2, 3));
}

TEST_CASE("cases are exclusive and exhaustive on Sym(6)") {
  auto L = enumerate_subgroups(6);
  const std::size_t q = 3;
  std::map<GroupCase, std::size_t> counts;
  PointSet all = range_set(0, 6);
  for (const auto& G : L.subgroups)
    for (std::size_t delta : {0u, 1u, 2u}) {
      auto c = classify(G, delta, q);
      const bool xi = in_Xi_unpruned(G, delta).has_value();
      const bool large = 6 * c.profile.t_max * 2 * q > 6 * 6 * (2 * q - 1);
      const auto proj = restrict_to(G, c.profile.giant());
      const auto local = range_set(0, static_cast<Point>(c.profile.t_max));
      const bool prim = !minimal_blocks(proj, local).has_value();
      const bool alt = contains_alt_on(proj, local);
      const bool two = !xi && large && prim && !alt;
      const bool three = !xi && large && !prim;
      const bool one = !xi && !two && !three;
      CHECK(xi + two + three + one == 1);
      CHECK((c.group_case == GroupCase::Xi) == xi);
      CHECK((c.group_case == GroupCase::II) == two);
      CHECK((c.group_case == GroupCase::III) == three);
      CHECK((c.group_case == GroupCase::I) == one);
      ++counts[c.group_case];
    }
  CHECK(counts.size() == 4);
}

TEST_CASE("theta event examples") {
  const StarLevel level{2, 2, 1};
  auto full = ColourScheme::full(2);
  CHECK(theta_event(GeneratedGroup(4, {cyc(4, {{0, 2}, {1, 3}})}), 0, 1, level, full));
  CHECK_FALSE(theta_event(GeneratedGroup(4, {cyc(4, {{0, 2}})}), 0, 1, level, full));
  CHECK_FALSE(theta_event(GeneratedGroup::trivial(4), 0, 1, level, full));
  CHECK(theta_event(GeneratedGroup::trivial(4), 0, 0, level, full));
  CHECK_THROWS_AS(theta_event(GeneratedGroup::trivial(4), 0, 1, level, ColourScheme::trivial(2)), LabelMismatch);
  CHECK_THROWS_AS(theta_event(GeneratedGroup::trivial(5), 0, 1, level, full), DegreeMismatch);
}

TEST_CASE("realizable maps: recursive check against explicit enumeration") {
  for (const auto& scheme : schemes3())
    for (auto rule : {ColouringRule::orbit_sorted, ColouringRule::natural})
      for (std::size_t q : {2u, 3u}) {
        const StarLevel level{2, q, 1};
        auto maps = realizable_level_maps(level, scheme, rule);
        std::set<Permutation> listed(maps.begin(), maps.end());
        CHECK(listed.size() == maps.size());
        std::size_t count = 0;
        for (const auto& h : GeneratedGroup::symmetric(level.leaves()).with_elements().elements()) {
          const bool r = realizable(h, level, scheme, rule);
          CHECK(r == (listed.count(h) == 1));
          count += r;
        }
        CHECK(count == maps.size());
      }
}

TEST_CASE("theta event agrees with brute force over the realizable maps") {
  std::mt19937_64 rng(5);
  for (const auto& scheme : schemes3())
    for (std::size_t q : {2u, 3u})
      for (std::size_t n : {1u, 2u}) {
        const StarLevel level{2, q, n};
        const auto maps = realizable_level_maps(level, scheme);
        std::unordered_set<Permutation, PermutationHash> R(maps.begin(), maps.end());
        const auto top = scheme.child_colours(kNoColour, ColouringRule::orbit_sorted);
        const std::size_t N = level.leaves(), m = level.cone_size();
        std::vector<GeneratedGroup> groups;
        if (N <= 6) {
          groups = enumerate_subgroups(N).subgroups;
        } else {
          std::vector<Point> im(N);
          for (int t = 0; t < 40; ++t) {
            std::vector<Permutation> gens{maps[rng() % maps.size()]};
            std::iota(im.begin(), im.end(), Point{0});
            const Point a = static_cast<Point>(rng() % N), b = static_cast<Point>(rng() % N);
            std::swap(im[a], im[b]);
            if (t % 2) gens.push_back(compose(maps[rng() % maps.size()], Permutation(im)));
            try {
              groups.push_back(GeneratedGroup::enumerated(N, gens, 50000));
            } catch (const ClosureExceedsCap&) {
            }
          }
          CHECK(groups.size() >= 20);
        }
        for (const auto& G : groups)
          for (std::size_t u = 0; u < q; ++u)
            for (std::size_t v = 0; v < q; ++v) {
              if (scheme.orbit_of(top[u]) != scheme.orbit_of(top[v])) continue;
              bool brute = false;
              for (const auto& h : elements_of(G)) {
                if (!R.count(h)) continue;
                PointSet cu = range_set(static_cast<Point>(u * m), static_cast<Point>((u + 1) * m));
                if (image_of(cu, h) == range_set(static_cast<Point>(v * m), static_cast<Point>((v + 1) * m))) {
                  brute = true;
                  break;
                }
              }
              CHECK(theta_event(G, u, v, level, scheme) == brute);
            }
      }
}

TEST_CASE("children heredity") {
  // d = 3: Alt(3) on three of four vertices, and Alt(3) wr Alt(3) on their children.
  auto g_n = GeneratedGroup(4, {cyc(4, {{0, 1, 2}})});
  std::vector<Permutation> gens{cyc(12, {{0, 3, 6}, {1, 4, 7}, {2, 5, 8}}), cyc(12, {{0, 1, 2}}),
                                cyc(12, {{3, 4, 5}}), cyc(12, {{6, 7, 8}})};
  auto wreath = GeneratedGroup(12, gens);
  auto r = children_heredity_check(g_n, wreath, 3, 1);
  CHECK(r.giant_n == PointSet{0, 1, 2});
  CHECK(r.giant_next == range_set(0, 9));
  CHECK(r.if_holds());
  CHECK(r.only_if_holds());

  auto full = children_heredity_check(GeneratedGroup::alternating(3), GeneratedGroup::alternating(6), 2, 0);
  CHECK(full.if_holds());
  CHECK(full.only_if_holds());

  // Every child at the next level joins the giant although vertex 3 is outside it.
  auto broken = children_heredity_check(GeneratedGroup(4, {cyc(4, {{0, 1, 2}})}),
                                        GeneratedGroup::alternating(8, 50000), 2, 1);
  CHECK_FALSE(broken.if_holds());
  CHECK(broken.if_violations == std::vector<Point>{3});
  CHECK(broken.only_if_holds());

  CHECK_THROWS_AS(children_heredity_check(g_n, GeneratedGroup::trivial(12), 3, 1), IncompatibleChain);
  CHECK_THROWS_AS(children_heredity_check(g_n, wreath, 3, 0), IncompatibleChain);
}
