#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "ijets/reduction.hpp"

namespace ijets {

// ---- symbolic normal-form determining equations ---------------------------

/// Unknowns X̄^i_J (jet deps 1..p) and u^α_J (deps p+1..p+q); target jets
/// Û^α_J are Tgt variables differentiated through X̄ by the chain rule.
struct NormalFormSystem {
  int p = 1;
  int q = 1;
  DifferentialSystem system;
  std::map<Var, Expr> chain;  // reduced Ū^α_K -> expression in X̄ jets and Û
  int order = 0;
};

/// Substitute Ū = Û(X̄) into the reduced equations and re-solve.
NormalFormSystem build_nf_system(const PseudoGroupSpec& g, const ReducedSystem& red, const JetPoint& section);

/// Identity values: X̄ = x, X̄^i_j = δ, higher X̄ jets 0, u and Û taken from
/// the section (Sec) jets.
Expr nf_identity(const Expr& e, int p);

/// Linearization at the identity.  Jet deps 1..p are ξ̄, p+1..p+q are ψ;
/// coefficients are section (Sec) jets.
DifferentialSystem linearize_nf(const NormalFormSystem& nf);

// ---- pointwise linear algebra at a section jet ------------------------------

struct LinearColumn {
  bool xi = false;  // ξ̄^dep_J, otherwise ψ^dep_J
  int dep = 1;
  MultiIndex index;
  int order() const { return index.order(); }
  auto operator<=>(const LinearColumn&) const = default;
};

/// Linearized normal-form equations at a section jet, as rows over
/// (ξ̄^(n), ψ^(n)).  Computed from the annihilator of the reduced Jacobian
/// followed by the prolongation substitution for the Ū jets.
struct LinearizedNF {
  int p = 1;
  int q = 1;
  int order = 0;
  std::vector<LinearColumn> cols;  // ξ̄ graded, then ψ graded; column order within an order
  QMatrix rows;
  int column(const LinearColumn& c) const;
  std::vector<int> columns_where(const std::function<bool(const LinearColumn&)>& pred) const;
};

LinearizedNF linearized_rows(const PseudoGroupSpec& g, const JetPoint& section, int n);
/// Rows of a symbolic linear system (from linearize_nf) at the section point.
LinearizedNF linear_rows(const DifferentialSystem& lin, const PseudoGroupSpec& g, const JetPoint& section, int n);

/// Ψ^k: rows over the order-k ψ columns (reduced echelon form).
QMatrix vertical_symbol(const LinearizedNF& lin, int k);
/// Z^(k) over (ξ̄, ψ^(k)) columns of `lin` with every ξ̄_J, |J| >= 1, eliminated.
QMatrix prolonged_annihilator(const LinearizedNF& lin);
/// Υ^k: the order-k ψ part of Z^(k).
QMatrix annihilator_symbol(const LinearizedNF& lin, int k);
/// ψ columns of order k, in the order used by the two symbol functions.
std::vector<LinearColumn> psi_columns(const LinearizedNF& lin, int k);

/// Trivial isotropy of the linearized system with ψ^(n) = 0.
bool linearized_free(const LinearizedNF& lin);
/// Smallest n <= max_order at which the linearized action is free.
std::optional<int> freeness_order(const PseudoGroupSpec& g, const JetPoint& section, int max_order);

struct CompatibilityReport {
  std::vector<int> orders;
  std::vector<bool> equal;
  std::vector<bool> psi_in_upsilon;
  bool ok() const;
};
CompatibilityReport compatibility_check(const PseudoGroupSpec& g, const JetPoint& section, int lo, int hi);

// ---- cross-sections ----------------------------------------------------------

/// A family {(dep; J) : lo_i <= J_i <= hi_i} with a common value.
struct NormalizationFamily {
  int dep = 1;
  std::vector<std::pair<int, std::optional<int>>> bounds;  // per variable
  Q value = 0;
  bool contains(int d, const MultiIndex& J, int p) const;
};

struct CrossSection {
  int p = 1;
  int q = 1;
  std::vector<Q> base;
  std::vector<NormalizationFamily> families;
  std::map<IndexedCoordinate, Q> values;  // explicit normalizations (override family values)

  bool contains(int dep, const MultiIndex& J) const;
  Q value(int dep, const MultiIndex& J) const;
  std::vector<IndexedCoordinate> indices(int k) const;  // order exactly k, column order
  int count_upto(int n) const;                          // base normalizations included
  /// A jet lying in the cross-section: phantom slots from the cross-section,
  /// free slots from `fill`.
  SectionJet sample(int order, const JetPoint& fill) const;
};

CrossSection cross_section_from_json(const nlohmann::json& j, int p, int q, const Names& names);
nlohmann::json cross_section_to_json(const CrossSection& cs);

struct WellPosedVerdict {
  bool count_ok = true;           // normalizations <= n_f equal d^(n_f)
  std::vector<int> orders;        // n_f+1 .. n_f+span
  std::vector<int> ranks;         // normalization Jacobian ranks
  std::vector<int> params;        // order-k parametric group jets
  bool rank_ok = true;
  std::vector<IndexedCoordinate> generators;  // read off at order n_f+1
  ReesVerdict rees;
  std::string reason;
  bool ok() const { return count_ok && rank_ok && rees.ok; }
};

WellPosedVerdict wellposed_check(const PseudoGroupSpec& g, const CrossSection& cs, int nf, int span = 5,
                                 std::uint64_t seed = 0);

// ---- moving frame ------------------------------------------------------------

/// Closed-form low-order frame: reduced jet -> expression in the source
/// jets (Sec) and base (Base), valid through order nf.
struct FrameSpec {
  int nf = 0;
  std::map<Var, Expr> closed_forms;
};

struct FrameSolution {
  bool exact = true;
  std::map<Var, Q> params;  // parametric group jets at the target point
  std::map<Var, long double> approx;
  std::map<Var, Q> reduced;  // reduced jets Z̄ through order nf (exact mode)
  std::vector<QSeries> base_map;  // X̄^i(x0 + t) as series in t (exact mode)
  SectionJet target;
  int order = 0;
};

struct NormalFormSlot {
  int dep = 1;
  MultiIndex index;
  bool phantom = false;
  Q value;
  long double approx = 0;
};

struct NormalFormSeries {
  int p = 1;
  int q = 1;
  int order = 0;
  bool exact = true;
  std::vector<NormalFormSlot> slots;  // graded
  std::vector<QSeries> series;        // exact mode only
  const NormalFormSlot* find(int dep, const MultiIndex& J) const;
  std::string to_csv(const Names& names) const;
  nlohmann::json to_json(const Names& names) const;
};

std::pair<FrameSolution, NormalFormSeries> solve_frame(const PseudoGroupSpec& g, const FrameSpec& spec,
                                                       const CrossSection& cs, const SectionJet& target, int N);

/// Target series moved by a group element given as explicit maps Z^a(x, u)
/// (expressions in Base variables 1..p+q).
SectionJet apply_transformation(int p, int q, const std::vector<Expr>& maps, const SectionJet& target, int N);

}  // namespace ijets
