#pragma once

#include <algorithm>
#include <array>
#include <atomic>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "irswb/rational.hpp"
#include "irswb/tree.hpp"

namespace irswb {

using FormId = std::uint32_t;

inline constexpr std::size_t kMaxCanonArity = 8;

struct FormKey {
  std::uint32_t tag = 0;
  std::uint32_t size = 0;
  std::array<std::uint32_t, kMaxCanonArity + 1> v{};

  bool operator==(const FormKey& o) const {
    return tag == o.tag && size == o.size && std::equal(v.begin(), v.begin() + size, o.v.begin());
  }
};

// Hash-consing table shared by every canonicalizer. Identities are stable once handed out and
// insert-or-get is safe to call from several threads.
class InternTable {
 public:
  InternTable();
  ~InternTable();
  FormId intern(const FormKey& key);
  FormKey key(FormId id) const;
  std::size_t size() const;

 private:
  struct Shard;
  static constexpr std::size_t kShardBits = 6;
  std::unique_ptr<Shard[]> shards_;
};

InternTable& intern_table();

// Cone of a given depth below a vertex, leaves numbered 0 … d^depth − 1 in digit order.
// parent_colour is the colour of the edge above the cone root; unused in full mode.
struct Cone {
  std::size_t depth = 0;
  Point parent_colour = kNoColour;
};

using LeafSet = std::vector<std::uint32_t>;  // sorted leaf indices

// Canonical forms of marked leaf subsets, either under all rooted automorphisms of the cone
// (full mode) or under tree maps whose local colour permutations lie in F (coloured mode).
class Canonicalizer {
 public:
  static Canonicalizer full(std::size_t d);
  static Canonicalizer coloured(const ColourScheme& scheme,
                                ColouringRule rule = ColouringRule::orbit_sorted);

  bool is_coloured() const { return coloured_; }
  std::size_t d() const { return d_; }
  const ColourScheme* scheme() const { return scheme_.get(); }
  ColouringRule rule() const { return rule_; }

  FormId canon(const LeafSet& E, const Cone& cone) const;
  // Same as canon for cones with at most 64 leaves, bit i standing for leaf i.
  FormId canon_mask(std::uint64_t mask, const Cone& cone) const;

  // True iff some admissible map carries the first cone onto the second and E onto F.
  bool equivalent(const LeafSet& E, const Cone& a, const LeafSet& F, const Cone& b) const;

  // Orbit label of every leaf of the cone (all zero in full mode).
  std::vector<std::size_t> leaf_labels(const Cone& cone) const;
  // Child colours for each colour, in digit order.
  const std::vector<Point>& child_colours(Point colour) const;

  // Serialization that does not depend on intern order; used to order census classes.
  std::string describe(FormId id) const;

 private:
  Canonicalizer() = default;
  struct Memo;

  FormId leaf_form(bool marked, Point colour) const;
  FormId combine(Point colour, const std::array<FormId, kMaxCanonArity>& children) const;
  FormId form_mask(Point colour, std::size_t height, std::uint64_t mask) const;
  FormId form_list(Point colour, std::size_t height, const std::uint32_t* lo, const std::uint32_t* hi,
                   std::uint64_t base) const;
  void check_cone(const Cone& cone) const;
  std::string describe_locked(FormId id, std::map<FormId, std::string>& cache) const;

  bool coloured_ = false;
  std::size_t d_ = 2;
  ColouringRule rule_ = ColouringRule::orbit_sorted;
  std::shared_ptr<const ColourScheme> scheme_;
  std::size_t slots_ = 1;                          // colour slots: 1 in full mode, d+1 coloured
  std::vector<std::vector<Point>> kids_;           // child colours per colour slot
  std::vector<Point> orbit_min_;                   // smallest colour of each colour's orbit
  // For each colour c and each σ ∈ F with σ(c) = min, the child digits listed by the
  // increasing colour b ≠ min they are sent to, i.e. the digit of colour σ⁻¹(b).
  std::vector<std::vector<std::vector<std::uint32_t>>> digit_orders_;
  std::vector<std::vector<Permutation>> stab_;  // stabilizer in F of each colour
  std::shared_ptr<Memo> memo_;
};

FormId canon_full(std::size_t d, const LeafSet& E, std::size_t depth);
FormId canon_coloured(const ColourScheme& scheme, const LeafSet& E, std::size_t depth,
                      Point parent_colour, ColouringRule rule = ColouringRule::orbit_sorted);

// Every admissible map from cone a to cone b, as the image of each leaf of a. Full mode uses all
// of Sym(d) at each vertex; coloured mode the elements of F compatible with the edge colours.
std::vector<std::vector<std::uint32_t>> enumerate_cone_maps(const Canonicalizer& mode, const Cone& a,
                                                            const Cone& b,
                                                            std::size_t cap = 1u << 20);
bool brute_force_equivalent(const Canonicalizer& mode, const LeafSet& E, const Cone& a,
                            const LeafSet& F, const Cone& b, std::size_t cap = 1u << 20);

struct CensusClass {
  std::size_t class_id = 0;
  FormId form = 0;
  std::string description;
  std::uint64_t count = 0;
};

struct Census {
  std::size_t depth = 0;
  std::size_t k = 0;
  std::uint64_t total = 0;
  std::vector<CensusClass> classes;  // ordered by description
};

// Every k-subset of the cone's leaves (restricted to leaves of orbit `label` when given),
// grouped by canonical form. Throws BudgetExceeded when the number of subsets exceeds budget.
Census orbit_census(const Canonicalizer& mode, const Cone& cone, std::size_t k,
                    std::optional<std::size_t> label = std::nullopt,
                    std::uint64_t budget = 5'000'000);

// P(E ~ F) for independent uniform draws from the two censuses.
Rational match_probability(const Census& a, const Census& b);

}  // namespace irswb
