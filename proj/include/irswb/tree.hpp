#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include <json.hpp>

#include "irswb/errors.hpp"
#include "irswb/perm.hpp"

namespace irswb {

// Rooted tree whose root has q children and every other vertex d children, cut at depth n_max.
struct TreeShape {
  std::size_t d = 2;
  std::size_t q = 2;
  std::size_t n_max = 8;

  TreeShape() = default;
  TreeShape(std::size_t d, std::size_t q, std::size_t n_max);
};

// Vertex of a rooted tree as its digit path; the root is the empty address.
class Address {
 public:
  Address() = default;
  explicit Address(std::vector<std::uint32_t> digits) : digits_(std::move(digits)) {}
  // Digits 0-9 then a-z.
  static Address parse(const std::string& s);

  std::size_t depth() const { return digits_.size(); }
  const std::vector<std::uint32_t>& digits() const { return digits_; }
  bool is_root() const { return digits_.empty(); }
  Address parent() const;
  Address child(std::uint32_t j) const;
  bool is_prefix_of(const Address& other) const;
  std::string to_string() const;

  auto operator<=>(const Address&) const = default;
  bool operator==(const Address&) const = default;

 private:
  std::vector<std::uint32_t> digits_;
};

// Throws InvalidArgument for out-of-range digits and DepthExceeded past n_max.
void validate(const Address& a, const TreeShape& shape);

std::size_t level_size(const TreeShape& shape, std::size_t n);
// All addresses of level n in digit order.
std::vector<Address> level(const TreeShape& shape, std::size_t n);
std::size_t level_index(const TreeShape& shape, const Address& a);
Address level_address(const TreeShape& shape, std::size_t n, std::size_t index);

// Addresses of length |u| + n extending u, in digit order.
std::vector<Address> cone(const TreeShape& shape, const Address& u, std::size_t n);

// How a vertex with parent-edge colour c hands out the remaining colours to its children.
// orbit_sorted: the j-th child gets the j-th colour of D∖{c} ordered by (orbit, colour), so every
// orbit label occupies a digit interval. natural: the j-th smallest colour of D∖{c}.
enum class ColouringRule { orbit_sorted, natural };

inline constexpr Point kNoColour = std::numeric_limits<Point>::max();

// Local group F ≤ Sym(D) on the colours D = {0, …, d}.
class ColourScheme {
 public:
  ColourScheme(std::size_t d, GeneratedGroup F);
  static ColourScheme trivial(std::size_t d);
  static ColourScheme full(std::size_t d);

  std::size_t d() const { return d_; }
  std::size_t colour_count() const { return d_ + 1; }
  const GeneratedGroup& group() const { return F_; }
  const std::vector<PointSet>& orbits() const { return orbits_; }
  std::size_t orbit_count() const { return orbits_.size(); }
  std::size_t orbit_of(Point colour) const { return orbit_index_.at(colour); }

  // Colours of the child edges in digit order. The root (parent colour kNoColour) uses all of D.
  std::vector<Point> child_colours(Point parent_colour, ColouringRule rule) const;

 private:
  std::size_t d_;
  GeneratedGroup F_;
  std::vector<PointSet> orbits_;
  std::vector<std::size_t> orbit_index_;
};

ColourScheme scheme_from_json(const nlohmann::json& j);
nlohmann::json scheme_to_json(const ColourScheme& s);

// Colour of the edge from v to its parent. The root needs q ≤ d+1 children to be coloured.
Point edge_colour(const Address& v, const ColourScheme& scheme,
                  ColouringRule rule = ColouringRule::orbit_sorted);
std::size_t orbit_label(const Address& v, const ColourScheme& scheme,
                        ColouringRule rule = ColouringRule::orbit_sorted);

struct LevelCountVector {
  std::vector<std::uint64_t> counts;  // indexed by orbit
  std::uint64_t total() const;
  bool operator==(const LevelCountVector&) const = default;
};

// (M − I)^(n−1) applied to the child-label vector of a vertex labelled `label`, where every row
// k of M is constant |D^(k)|.
template <class Scalar>
Eigen::Matrix<Scalar, Eigen::Dynamic, 1> level_counts_as(std::size_t label, std::size_t n,
                                                          const ColourScheme& scheme) {
  if (n == 0) throw InvalidArgument("level counts need n >= 1");
  const auto m = static_cast<Eigen::Index>(scheme.orbit_count());
  if (label >= scheme.orbit_count()) throw InvalidArgument("label out of range");
  Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> step(m, m);
  Eigen::Matrix<Scalar, Eigen::Dynamic, 1> v(m);
  for (Eigen::Index k = 0; k < m; ++k) {
    const auto size = static_cast<Scalar>(scheme.orbits()[static_cast<std::size_t>(k)].size());
    step.row(k).setConstant(size);
    v(k) = size;
  }
  step -= Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>::Identity(m, m);
  v(static_cast<Eigen::Index>(label)) -= Scalar(1);
  for (std::size_t i = 1; i < n; ++i) v = step * v;
  return v;
}

LevelCountVector level_counts(std::size_t label, std::size_t n, const ColourScheme& scheme);
LevelCountVector level_counts(const Address& u, std::size_t n, const ColourScheme& scheme,
                              ColouringRule rule = ColouringRule::orbit_sorted);

// The same counts by walking the cone below u with the concrete colouring.
LevelCountVector level_counts_direct(const TreeShape& shape, const Address& u, std::size_t n,
                                     const ColourScheme& scheme,
                                     ColouringRule rule = ColouringRule::orbit_sorted);

// Limit of counts[i] / d^n, namely |D^(i)| / (d+1), independent of the starting label.
std::vector<double> asymptotic_level_shares(const ColourScheme& scheme);

}  // namespace irswb
