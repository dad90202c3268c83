#pragma once

#include <cstddef>
#include <vector>

#include "irswb/perm.hpp"

namespace irswb {

struct SubgroupLattice {
  std::size_t degree = 0;
  // Sorted by (order, sorted element list); every subgroup carries its element cache.
  std::vector<GeneratedGroup> subgroups;
  // class_of[i] indexes into classes; classes are numbered by first member.
  std::vector<std::size_t> class_of;
  std::vector<std::vector<std::size_t>> classes;
};

inline constexpr std::size_t kMaxEnumerationDegree = 6;

// All subgroups of Sym(degree), each exactly once, with their Sym(degree)-conjugacy classes.
// Throws DegreeTooLarge when degree > kMaxEnumerationDegree or degree! > cap.
SubgroupLattice enumerate_subgroups(std::size_t degree, std::size_t cap = kDefaultCap);

// All subgroups of Sym(degree) containing `seed` (degree <= 7), same ordering rule, no classes.
std::vector<GeneratedGroup> enumerate_overgroups(const GeneratedGroup& seed,
                                                 std::size_t cap = kDefaultCap);

// Distinct conjugates g⁻¹Hg for g in `by`, sorted by element list.
std::vector<GeneratedGroup> conjugates_of(const GeneratedGroup& H, const GeneratedGroup& by);

}  // namespace irswb
