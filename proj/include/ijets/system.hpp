#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "ijets/jetcalc.hpp"
#include "ijets/linalg.hpp"
#include "ijets/multiindex.hpp"

namespace ijets {

struct Equation {
  Var lhs;
  Expr rhs;
  Expr residual() const { return sym(lhs) - rhs; }
};

/// Solved system "principal jet = expression", with a term order and a
/// recipe for regular points.
class DifferentialSystem {
 public:
  JetSpace space;
  ClassTermOrder term_order;
  std::map<Var, Q> regular_point;  // overrides for sample points
  bool identity_point = false;     // default parametric values at the identity jet

  DifferentialSystem() = default;
  DifferentialSystem(JetSpace s, ClassTermOrder o) : space(std::move(s)), term_order(std::move(o)) {}

  void add(const Var& lhs, const Expr& rhs);
  const std::vector<Equation>& equations() const { return eqs_; }
  const Equation* find(const Var& lhs) const;
  bool is_principal(const Var& v) const { return find(v) != nullptr; }
  /// maximum lhs order
  int order() const;
  /// highest order of an unknown jet in the equation
  int equation_order(const Equation& e) const;
  std::vector<const Equation*> equations_of_order(int k) const;

  /// substitute principal jets by their right hand sides until none remain
  Expr reduce(const Expr& e) const;
  /// add D_i of lower-order equations until every order <= n is closed
  DifferentialSystem complete(int n) const;
  /// keep only equations of order <= n
  DifferentialSystem truncated(int n) const;
  /// a point of R^(n): parametric jets sampled (or identity), principal solved
  JetPoint point_on(std::uint64_t seed, int n) const;
  /// identity diffeomorphism jet values for order <= n (needs m == p)
  void set_identity(JetPoint& pt, int n) const;

  std::string to_string() const;

 private:
  std::vector<Equation> eqs_;
  std::map<Var, std::size_t> index_;
};

struct SymbolReport {
  int order = 0;
  std::vector<IndexedCoordinate> columns;
  QMatrix matrix;
  Echelon echelon;
  std::vector<int> t, beta, alpha;  // indexed by class 0..p
  int rank = 0;
  int dim = 0;
  std::vector<IndexedCoordinate> principal, parametric;
  int weighted_beta() const;
  int weighted_alpha() const;
};

/// Symbol at order n built from every equation of order <= eq_max (default n),
/// each prolonged to order n; coefficients evaluated at pt.
SymbolReport symbol(const DifferentialSystem& sys, int n, const JetPoint& pt, int eq_max = -1);

struct InvolutivityVerdict {
  int order = 0;
  SymbolReport report;
  int weighted_beta = 0;
  int prolonged_rank = 0;   // r_{n+1}
  int prolonged_dim = 0;    // d_{n+1}
  int weighted_alpha = 0;
  bool symbol_involutive = false;
  std::vector<Expr> conditions;
  bool no_integrability = true;
  bool involutive = false;
};

/// Integrability conditions of order <= n hidden in the first prolongation.
std::vector<Expr> project_check(const DifferentialSystem& sys, int n, std::uint64_t seed, int points = 3);
InvolutivityVerdict involutivity(const DifferentialSystem& sys, int n, std::uint64_t seed);

struct ProbeReport {
  int original = 0;
  int best = 0;
  bool irregular = false;
  std::vector<std::vector<Q>> witness;  // change of variables achieving `best`
};

/// Random linear changes of the independent variables, compared on Σ kβ.
ProbeReport delta_regularity_probe(const DifferentialSystem& sys, int n, int trials, std::uint64_t seed);
/// β per class after the change x = A x'.
std::vector<int> symbol_indices_after_change(const DifferentialSystem& sys, int n, const JetPoint& pt,
                                             const std::vector<std::vector<Q>>& a);

struct FirstOrderSystem {
  DifferentialSystem system;
  std::map<IndexedCoordinate, int> dep_of;  // (original dep, J) -> new dep
};
FirstOrderSystem first_order_reduction(const DifferentialSystem& sys);

struct SchemaEntry {
  int dep = 0;
  std::string name;
  std::vector<int> arguments;  // independent variables it depends on
};
struct Schema {
  std::vector<SchemaEntry> functions;  // arguments non-empty
  std::vector<SchemaEntry> points;     // point values
  std::vector<int> per_arity;          // per_arity[k] = number of functions of k variables
};
/// Initial data for an involutive first-order system in Cartan normal form.
Schema initial_condition_schema(const DifferentialSystem& first_order, std::uint64_t seed);

}  // namespace ijets
