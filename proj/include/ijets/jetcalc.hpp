#pragma once

#include <cstdint>
#include <map>
#include <vector>

#include "ijets/expr.hpp"
#include "ijets/series.hpp"

namespace ijets {

/// Coordinates of a jet bundle: p independent variables (Base), m unknown
/// dependents (Jet), plus optional fixed section (Sec) and target (Tgt) jets.
struct JetSpace {
  int p = 1;
  int m = 1;
  int q_sec = 0;
  int q_tgt = 0;
  /// Target jets are functions of the unknowns listed here (one per target
  /// variable); empty means target jets are treated as constants.
  std::vector<int> tgt_xdeps;
  Names names;

  std::vector<int> deps() const;
};

/// D_i on a jet space: shift Jet/Sec indices, chain rule through Tgt.
class StandardRule : public DerivRule {
 public:
  explicit StandardRule(const JetSpace& s) : s_(s) {}
  Expr d(const Var& v, int i) const override;

 private:
  const JetSpace& s_;
};

/// Total derivative on the lifted bundle: diffeomorphism jets Z^a_B are
/// functions of (x, u) with u a fixed section (Sec).  Base variables
/// 1..p are x, p+1..p+q are u.
class LiftedRule : public DerivRule {
 public:
  LiftedRule(int p, int q) : p_(p), q_(q) {}
  Expr d(const Var& v, int i) const override;

 private:
  int p_, q_;
};

/// D_x^J e under the standard rule.
Expr total_derivative(const Expr& e, int i, const JetSpace& s);

/// Symbolic inverse of a small matrix (Gauss-Jordan, structural pivots).
std::vector<std::vector<Expr>> invert_matrix(std::vector<std::vector<Expr>> a);

/// Σ_j W^j_i D_{x^j} e with W the inverse of jac[i][j] = D_j X̄^i.
Expr implicit_total_derivative(const Expr& e, int i, const std::vector<std::vector<Expr>>& jacobian_inverse,
                               const DerivRule& rule);

/// D_{x^i} = Σ_j D_{x^i}(X̄^j) D_{X^j} on expressions in target jets.
Expr chain_rule_derivative(const Expr& e, int i, const JetSpace& s);

/// Prolonged action Û^α_J for |J| <= n.  Reduced jets are Jet deps 1..p
/// (X̄) and p+1..p+q (Ū); section jets are Sec.  `simplify` applies the
/// reduced determining equations.
std::map<IndexedCoordinate, Expr> prolong_action(int p, int q, int n, const std::function<Expr(const Expr&)>& simplify);

/// Deterministic point in jet space: fixed values, otherwise a rational
/// derived from (seed, variable) so that access order does not matter.
class JetPoint {
 public:
  explicit JetPoint(std::uint64_t seed = 0) : seed_(seed) {}
  Q operator()(const Var& v) const;
  void set(const Var& v, const Q& value) { fixed_[v] = value; }
  bool has(const Var& v) const { return fixed_.count(v) > 0; }
  const std::map<Var, Q>& fixed() const { return fixed_; }
  std::uint64_t seed() const { return seed_; }
  Q eval(const Expr& e) const;

 private:
  std::uint64_t seed_;
  std::map<Var, Q> fixed_;
};

/// Section jets with an optional Taylor series per dependent variable.
struct SectionJet {
  std::vector<Q> base;
  std::map<IndexedCoordinate, Q> jets;
  std::vector<QSeries> series;  // about the base point, coefficient = u_J / J!

  static SectionJet from_series(std::vector<Q> base, std::vector<QSeries> series);
  Q value(int dep, const MultiIndex& J) const;
  int order() const;
  bool consistent() const;
};

nlohmann::json section_to_json(const SectionJet& s);
SectionJet section_from_json(const nlohmann::json& j, int p);

}  // namespace ijets
