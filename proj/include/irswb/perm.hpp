#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace irswb {

using Point = std::uint32_t;
using PointSet = std::vector<Point>;  // kept sorted, no duplicates

inline constexpr std::size_t kDefaultCap = 10000;

// Permutation of {0, ..., degree-1} acting on the right: x·p = p.image(x).
class Permutation {
 public:
  Permutation() = default;
  explicit Permutation(std::vector<Point> images);

  static Permutation identity(std::size_t degree);
  // Skips the bijection check; for images already known to be a permutation.
  static Permutation unchecked(std::vector<Point> images);
  static Permutation from_cycles(std::size_t degree, const std::vector<std::vector<Point>>& cycles);

  std::size_t degree() const { return images_.size(); }
  Point image(Point x) const { return images_[x]; }
  const std::vector<Point>& images() const { return images_; }

  bool is_identity() const;
  bool is_even() const;
  std::size_t order() const;
  PointSet support() const;
  std::string cycle_string() const;

  friend bool operator==(const Permutation&, const Permutation&) = default;
  friend auto operator<=>(const Permutation&, const Permutation&) = default;

 private:
  std::vector<Point> images_;
};

struct PermutationHash {
  std::size_t operator()(const Permutation& p) const noexcept;
};

// x·compose(p, q) = (x·p)·q, i.e. p is applied first.
Permutation compose(const Permutation& p, const Permutation& q);
Permutation inverse(const Permutation& p);
// g⁻¹ h g
Permutation conjugate(const Permutation& h, const Permutation& g);
Permutation power(const Permutation& p, long long e);

// Breadth-first closure from the identity, multiplying by the generators in order.
std::vector<Permutation> close(std::size_t degree, const std::vector<Permutation>& generators,
                               std::size_t cap = kDefaultCap);

class GeneratedGroup {
 public:
  GeneratedGroup() = default;
  GeneratedGroup(std::size_t degree, std::vector<Permutation> generators,
                 std::size_t cap = kDefaultCap);

  // Closes immediately; throws ClosureExceedsCap.
  static GeneratedGroup enumerated(std::size_t degree, std::vector<Permutation> generators,
                                   std::size_t cap = kDefaultCap);
  // `elements` must already be a group; a small generating set is extracted greedily.
  static GeneratedGroup from_elements(std::size_t degree, std::vector<Permutation> elements,
                                      std::size_t cap = kDefaultCap);
  // Trusted constructor: `elements` must be exactly the closure of `generators`.
  static GeneratedGroup from_parts(std::size_t degree, std::vector<Permutation> generators,
                                   std::vector<Permutation> elements,
                                   std::size_t cap = kDefaultCap);
  static GeneratedGroup trivial(std::size_t degree);
  static GeneratedGroup symmetric(std::size_t degree, std::size_t cap = kDefaultCap);
  static GeneratedGroup alternating(std::size_t degree, std::size_t cap = kDefaultCap);
  // Sym or Alt on the points of `on`, identity elsewhere.
  static GeneratedGroup symmetric_on(std::size_t degree, const PointSet& on,
                                     std::size_t cap = kDefaultCap);
  static GeneratedGroup alternating_on(std::size_t degree, const PointSet& on,
                                       std::size_t cap = kDefaultCap);

  std::size_t degree() const { return degree_; }
  std::size_t cap() const { return cap_; }
  const std::vector<Permutation>& generators() const& { return generators_; }
  std::vector<Permutation> generators() && { return std::move(generators_); }

  bool has_elements() const { return data_ != nullptr; }
  // Copy with the element cache filled (no-op if already present).
  GeneratedGroup with_elements() const;
  // Elements in breadth-first order; requires has_elements().
  const std::vector<Permutation>& elements() const&;
  // Rvalue overloads copy out, so range-for over a temporary group stays valid.
  std::vector<Permutation> elements() && { return static_cast<const GeneratedGroup&>(*this).elements(); }
  // Elements sorted lexicographically by image array; doubles as an identity key.
  const std::vector<Permutation>& sorted_elements() const&;
  std::vector<Permutation> sorted_elements() && {
    return static_cast<const GeneratedGroup&>(*this).sorted_elements();
  }
  std::size_t order() const;
  bool contains(const Permutation& p) const;
  bool is_subgroup_of(const GeneratedGroup& other) const;
  bool same_elements(const GeneratedGroup& other) const;

 private:
  struct Cache {
    std::vector<Permutation> bfs;
    std::vector<Permutation> sorted;
  };
  std::size_t degree_ = 0;
  std::vector<Permutation> generators_;
  std::size_t cap_ = kDefaultCap;
  std::shared_ptr<const Cache> data_;

  void fill(std::vector<Permutation> elements);
};

// Elements of G, either cached or freshly closed under G.cap().
std::vector<Permutation> elements_of(const GeneratedGroup& G);

// Orbits sorted by smallest point; each orbit sorted.
std::vector<PointSet> orbits(const GeneratedGroup& G);
PointSet orbit_of(const GeneratedGroup& G, Point x);
bool is_transitive(const GeneratedGroup& G);

struct BlockSystem {
  std::vector<PointSet> blocks;
  std::size_t block_size = 0;
};

// Minimal nontrivial block system of G on `component`; std::nullopt means primitive.
std::optional<BlockSystem> minimal_blocks(const GeneratedGroup& G, const PointSet& component);
bool is_primitive(const GeneratedGroup& G);

// {g ∈ G : x·g = x for all x ∉ U}
GeneratedGroup rigid_stabilizer(const GeneratedGroup& G, const PointSet& U);
// {g ∈ G : U·g = U}
GeneratedGroup setwise_stabilizer(const GeneratedGroup& G, const PointSet& U);
// Restriction of a group preserving U to a group on |U| points (U relabelled 0..|U|-1 in order).
GeneratedGroup restrict_to(const GeneratedGroup& G, const PointSet& U);
Permutation restrict_to(const Permutation& p, const PointSet& U);

// True iff the rigid stabilizer of U, restricted to U, contains Alt(U).
bool contains_alt_on(const GeneratedGroup& G, const PointSet& U);

PointSet image_of(const PointSet& U, const Permutation& g);
PointSet complement(std::size_t degree, const PointSet& U);
std::string to_string(const PointSet& U);

}  // namespace irswb
