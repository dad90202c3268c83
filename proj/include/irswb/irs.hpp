#pragma once

#include <string>
#include <vector>

#include "irswb/perm.hpp"
#include "irswb/rational.hpp"

namespace irswb {

struct WeightedSubgroup {
  GeneratedGroup group;  // element cache filled
  Rational weight;
};

// Finitely supported probability measure on subgroups of `ambient`.
class ConjInvariantMeasure {
 public:
  // Atoms with equal element sets are merged; weights must be nonnegative and sum to 1.
  ConjInvariantMeasure(GeneratedGroup ambient, std::vector<WeightedSubgroup> support);

  const GeneratedGroup& ambient() const { return ambient_; }
  const std::vector<WeightedSubgroup>& support() const { return support_; }
  // Exact check that (g⁻¹Hg, w) is an atom for every atom (H, w) and every generator g.
  bool is_conjugation_invariant() const;

 private:
  GeneratedGroup ambient_;
  std::vector<WeightedSubgroup> support_;
};

// Uniform over the distinct ambient-conjugates of gamma; throws NotASubgroup.
ConjInvariantMeasure uniform_conjugate_measure(const GeneratedGroup& gamma,
                                               const GeneratedGroup& ambient);
// Law of St(x) for x uniform among the points.
ConjInvariantMeasure stabilizer_measure(const GeneratedGroup& ambient);

// A map U -> V stored as the images of the points of U in increasing order.
using PartialMap = std::vector<Point>;

struct Transporter {
  PointSet U, V;
  std::vector<Permutation> elements;     // {h : U·h = V}
  std::vector<PartialMap> restrictions;  // distinct h|_U, sorted
};

Transporter transporter(const GeneratedGroup& H, const PointSet& U, const PointSet& V);

struct LemmaCheck {
  Rational lhs;
  Rational rhs;
  bool holds = false;
};

// P(some element of A extends to H) against E[min(|A| / [R(U) : H_{U→U} ∩ R(U)], 1); H_{U→V} ≠ ∅].
LemmaCheck verify_E1(const ConjInvariantMeasure& mu, const PointSet& U, const PointSet& V,
                     const std::vector<PartialMap>& A);

struct Factorization {
  PointSet side1;
  PointSet side2;
};

// Where the normalizer N_1 of H_1 is taken. `kernel` uses the elements of the ambient group that
// act trivially on side 2; `projection` uses the image of the whole ambient group on side 1.
enum class NormalizerScope { kernel, projection };

LemmaCheck verify_E2(const ConjInvariantMeasure& mu, const Factorization& f,
                     const std::vector<Permutation>& B,
                     NormalizerScope scope = NormalizerScope::kernel);

// ν_Γ(H ∩ Q ≠ ∅) over Sym(degree)-conjugates H of Γ, against |Γ|·|Q_U|/|U|!.
LemmaCheck verify_index(const GeneratedGroup& gamma, const std::vector<Permutation>& Q,
                        const PointSet& U, const PointSet& V);

struct CountingRow {
  std::string lemma;  // "E1", "index", "E2" or "none"
  std::size_t degree = 0;
  std::size_t gamma_id = 0;
  PointSet U, V;
  std::string detail;
  LemmaCheck check;
};

// Every E1/index instance over the subgroups of Sym(degree) (measure ν_Γ, A and Q the full
// transporter of Γ) followed by every E2 instance on Sym(a)×Sym(degree−a), a = degree/2.
// A single vacuous "none" row is emitted when no instance exists.
std::vector<CountingRow> counting_sweep(std::size_t degree, std::size_t cap = kDefaultCap);

}  // namespace irswb
