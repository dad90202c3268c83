#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "irswb/bounds.hpp"
#include "irswb/perm.hpp"
#include "irswb/rational.hpp"
#include "irswb/tree.hpp"

namespace irswb {

struct TransitiveProfile {
  std::vector<std::size_t> sizes;     // non-increasing
  std::vector<PointSet> components;   // same order; ties broken by smallest point
  std::size_t t_max = 0;
  const PointSet& giant() const { return components.front(); }
};

TransitiveProfile profile(const GeneratedGroup& G);

struct XiWitness {
  PointSet U;
  std::size_t delta = 0;
};

// Some U with |U| ≥ degree − delta, Alt(U)×{id} ≤ G ≤ Sym(U)×Sym(U^c). Only single orbits of size
// ≥ 3 and unions of orbits of total size ≤ 2 are tried; the largest U found is returned.
std::optional<XiWitness> in_Xi(const GeneratedGroup& G, std::size_t delta);
// The same question answered by trying every subset U.
std::optional<XiWitness> in_Xi_unpruned(const GeneratedGroup& G, std::size_t delta);

struct PiWitness {
  std::vector<PointSet> U;  // one per label class
};

// Coloured version over a partition of the points into label classes, which G must preserve
// (LabelPartitionViolated otherwise). Each class is handled through the subgroup of G acting
// trivially off that class.
std::optional<PiWitness> in_Pi(const GeneratedGroup& G, const std::vector<PointSet>& labels,
                               std::size_t delta);

struct PraegerSaxlRow {
  std::size_t degree = 0;
  std::size_t checked = 0;      // primitive groups without Alt(degree)
  std::size_t exceptions = 0;   // of those, order > 4^degree
  std::size_t max_order = 0;
  Rational max_ratio = 0;       // max order / 4^degree
};

// Degrees 1 … max_degree. Up to degree 6 every subgroup of Sym(m) is checked; at degree 7 the
// overgroups of a 7-cycle, which meet every conjugacy class of transitive groups.
std::vector<PraegerSaxlRow> praeger_saxl_check(std::size_t max_degree);

enum class GroupCase { Xi, I, II, III };
std::string to_string(GroupCase c);

struct Classification {
  TransitiveProfile profile;
  GroupCase group_case = GroupCase::I;
  std::optional<XiWitness> xi;
  std::optional<BlockSystem> blocks;  // case III
  bool giant_primitive = false;
  bool giant_has_alt = false;
};

// Xi when in_Xi holds; otherwise II or III when t_max > (1 − 1/(2q))·degree and the projection
// to the giant component is primitive without Alt, resp. imprimitive; I in every other case.
Classification classify(const GeneratedGroup& G, std::size_t delta, std::size_t q);

// log of the case bound for the classification, with k_n = degree; nullopt for Xi.
std::optional<double> classification_log_bound(const Classification& c, const BoundParams& p,
                                               std::size_t degree);

// Total weight per case over a finite mixture of groups.
std::map<GroupCase, Rational> weighted_case_report(
    const std::vector<std::pair<GeneratedGroup, Rational>>& mixture, std::size_t delta, std::size_t q);

// Level n+1 of the tree whose root has q ≤ d+1 children, leaf x·d^n + i being leaf i of the cone
// below root child x. Root child j has colour child_colours(kNoColour, rule)[j].
struct StarLevel {
  std::size_t d = 2;
  std::size_t q = 2;
  std::size_t n = 1;
  std::size_t leaves() const;
  std::size_t cone_size() const;
};

// True iff h maps every cone below a root child onto such a cone, preserving root-child labels,
// with every local permutation in F.
bool realizable(const Permutation& h, const StarLevel& level, const ColourScheme& scheme,
                ColouringRule rule = ColouringRule::orbit_sorted);

// Some h ∈ G realizable and with C_u·h = C_v. Throws LabelMismatch when u and v carry different
// labels.
bool theta_event(const GeneratedGroup& G, std::size_t u, std::size_t v, const StarLevel& level,
                 const ColourScheme& scheme, ColouringRule rule = ColouringRule::orbit_sorted);

// All realizable permutations of the level, built from label-preserving cone permutations and
// per-cone maps. Throws ClosureExceedsCap past cap.
std::vector<Permutation> realizable_level_maps(const StarLevel& level, const ColourScheme& scheme,
                                               ColouringRule rule = ColouringRule::orbit_sorted,
                                               std::size_t cap = 1u << 20);

struct HeredityReport {
  PointSet giant_n;
  PointSet giant_next;
  std::vector<Point> only_if_violations;  // x in the giant with a child outside the next giant
  std::vector<Point> if_violations;       // x outside the giant with all children inside
  bool only_if_holds() const { return only_if_violations.empty(); }
  bool if_holds() const { return if_violations.empty(); }
};

// Compares membership in the giant component at level n with membership of all d children
// (x·d + i) at level n+1. Throws IncompatibleChain unless G_n is in Xi for delta and G_next
// contains the order-preserving lift of every generator of G_n.
HeredityReport children_heredity_check(const GeneratedGroup& G_n, const GeneratedGroup& G_next,
                                       std::size_t d, std::size_t delta);

}  // namespace irswb
