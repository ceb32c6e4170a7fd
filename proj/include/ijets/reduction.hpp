#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "ijets/system.hpp"

namespace ijets {

/// Determining system of a pseudo-group acting on (x, u) with p base and q
/// fiber coordinates.  Base variables 1..p are x, p+1..p+q are u; jets
/// 1..p+q are the diffeomorphism components (X, U).
struct PseudoGroupSpec {
  int p = 1;
  int q = 1;
  DifferentialSystem system;  // identity_point should be set
  int nstar = 1;              // order at which the system is involutive
  Names reduced_names;        // jets X̄.., Ū..; sec u..
  ClassTermOrder reduced_order;

  /// number of parametric group jets of order <= n
  int dim(int n) const;
  std::vector<Var> parametric(int n) const;
};

/// Value of a group jet Z^a_B at the identity, with u taken from the section.
Q group_identity_value(const PseudoGroupSpec& g, const Var& jet, const JetPoint& section);
/// X̄^i = x^i, Ū^α_K = u^α_K
Q reduced_identity_value(const PseudoGroupSpec& g, const Var& jet, const JetPoint& section);

/// Gradients of the reduced jets Z̄^a_J (|J| <= N) with respect to the
/// parametric group jets, at the identity over the section point.
struct ReducedJacobian {
  int order = 0;
  std::vector<std::vector<IndexedCoordinate>> cols;  // reduced jets per order, column order
  std::vector<QMatrix> rows;                         // rows[k][r] = gradient of cols[k][r]
  std::vector<Var> params;
};

ReducedJacobian reduced_jacobian(const PseudoGroupSpec& g, const JetPoint& section, int N);

/// Reduced pseudo-group read off its image: the reduced jets Z̄^a_J of
/// order <= n as functions of the parametric group jets near the identity.
struct ReducedImage {
  int order = 0;
  std::vector<int> dims;          // d̄_k, k = 0..order
  std::vector<int> cumulative;    // d̄^(k)
  std::vector<int> t, beta, alpha;  // at `order`, indexed by class 0..p
  int prolonged_rank = 0;         // rank of the prolonged symbol, order+1
  int actual_rank = 0;            // t̄_{n+1} - d̄_{n+1}
  bool symbol_involutive = false;
  bool involutive = false;
  std::vector<IndexedCoordinate> parametric;  // all orders <= n, graded
  int weighted_beta() const;
};

ReducedImage reduced_image(const PseudoGroupSpec& g, const JetPoint& section, int n);

/// Reduced determining equations obtained by eliminating the parametric
/// group jets from Z̄^a_J = D_x^J Z^a.
struct ReducedSystem {
  DifferentialSystem system;
  std::vector<Var> parametric;         // reduced jets used as pivots
  std::map<Var, Expr> group_solution;  // group parametric jet -> expression in reduced jets
  int order = 0;
};

/// Throws MathError("manual reduced system required ...") when a reduced jet
/// cannot be used to eliminate a group jet affinely.
ReducedSystem reduce(const PseudoGroupSpec& g, const JetPoint& section, int n);

struct ReducibilityReport {
  std::vector<int> orders;
  std::vector<int> d, dbar;
  std::optional<int> natural_order;  // first order from which d = d̄ through the range
  bool reducible() const { return natural_order.has_value(); }
};

ReducibilityReport reducibility_check(const PseudoGroupSpec& g, const JetPoint& section, int lo, int hi);

struct CharacterCheck {
  std::vector<int> group_alpha;    // by class 0..p+q
  std::vector<int> reduced_alpha;  // by class 0..p
  bool ok = false;
  std::string reason;
};

/// α^(i) = ᾱ^(i) for i <= p and α^(p+a) = 0.
CharacterCheck reduced_character_check(const PseudoGroupSpec& g, const JetPoint& section, int n,
                                       std::uint64_t seed = 0);

}  // namespace ijets
