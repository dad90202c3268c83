#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include <json.hpp>

#include "irswb/tree.hpp"

namespace irswb {

// Element of the Higman–Thompson group on the tree whose root has q children and every other
// vertex d children: domain leaf i goes to range leaf sigma[i], and below a leaf the map is the
// digit-order-preserving identification of cones. Leaf lists are kept in address order.
class TreePair {
 public:
  TreePair() = default;
  // Validates completeness of both trees and the bijection; throws MalformedPair.
  TreePair(std::size_t d, std::size_t q, std::vector<Address> domain, std::vector<Address> range,
           std::vector<std::uint32_t> sigma);

  static TreePair identity(std::size_t d, std::size_t q);

  std::size_t d() const { return d_; }
  std::size_t q() const { return q_; }
  const std::vector<Address>& domain_leaves() const { return domain_; }
  const std::vector<Address>& range_leaves() const { return range_; }
  const std::vector<std::uint32_t>& sigma() const { return sigma_; }
  std::size_t max_depth() const;

  // Replaces domain leaf i, and its image, by their children.
  void expand_domain_leaf(std::size_t i);
  // Replaces range leaf j, and its preimage, by their children.
  void expand_range_leaf(std::size_t j);

  bool operator==(const TreePair&) const = default;

 private:
  std::size_t d_ = 2;
  std::size_t q_ = 2;
  std::vector<Address> domain_;
  std::vector<Address> range_;
  std::vector<std::uint32_t> sigma_;

  void sort_leaves();
};

// Collapses carets mapped order-preservingly onto carets until none is left.
TreePair reduce(const TreePair& p);
// p1 first, then p2; reduced.
TreePair compose(const TreePair& p1, const TreePair& p2);
TreePair inverse(const TreePair& p);

// Swaps the prefix of w that is a domain leaf for its image. Throws AddressTooShallow when w is
// above the domain leaves, unless deepen is set, in which case w is extended by zeros first.
Address act_on_address(const TreePair& p, const Address& w, bool deepen = false);

// Every domain leaf and its image carry the same orbit label. The colouring rule fixes the plane
// order; with orbit_sorted, equal labels give equal label sequences below, so cone
// identifications keep labels too.
bool is_label_preserving(const TreePair& p, const ColourScheme& scheme,
                         ColouringRule rule = ColouringRule::orbit_sorted);

// Random complete tree with the given number of expansions, as leaves in address order.
std::vector<Address> random_tree(std::size_t d, std::size_t q, std::size_t expansions, std::mt19937_64& rng);
// Reduced pair from two random trees with the same expansion count and a uniform bijection.
TreePair random_pair(std::size_t d, std::size_t q, std::size_t max_expansions, std::mt19937_64& rng);

nlohmann::json pair_to_json(const TreePair& p);
TreePair pair_from_json(const nlohmann::json& j);

}  // namespace irswb
