#pragma once

#include <functional>
#include <vector>

#include "ijets/normalform.hpp"

namespace ijets {

using OdeState = std::vector<double>;
using OdeRhs = std::function<OdeState(double, const OdeState&)>;

struct Trajectory {
  std::vector<double> x;
  std::vector<OdeState> y;
};

/// Classical fixed-step RK4 from x0 to x1 (the last step is shortened to land on x1).
Trajectory rk4(const OdeRhs& f, OdeState y0, double x0, double x1, double h);

/// log2(e(h) / e(h/2)) for the end-point error in component `comp`.
double rk4_empirical_order(const OdeRhs& f, const OdeState& y0, double x0, double x1, double h,
                           const std::function<double(double)>& exact, int comp = 0);

/// Surface u = Û(X) given by exact Taylor data about a base point, evaluated in doubles.
class Surface {
 public:
  Surface(std::vector<Q> base, QSeries series);
  static Surface from_section(const SectionJet& s, int dep = 1);
  int p() const { return static_cast<int>(base_.size()); }
  /// ∂^J Û at X
  double operator()(const std::vector<double>& X, const MultiIndex& J = {}) const;

 private:
  std::vector<double> base_;
  std::vector<std::vector<int>> exps_;
  std::vector<double> coeffs_;
};

/// Chain X̄' = 1 / Û(X̄, Y0) of the pseudo-group X = f(x), Y = y + b, U = u / f'(x).
Trajectory separable_chain(const Surface& u, double X0, double Y0, double x1, double h);

/// Chain ODEs for the running example with cross-section functions c(x), d(x):
/// state (X̄, X̄', Ȳ), X̄'' = Û_Y X̄'^2 - d X̄', Ȳ' = (Û - c) X̄'.
struct RunningChain {
  std::function<double(double)> c = [](double) { return 0.0; };
  std::function<double(double)> d = [](double) { return 0.0; };
  OdeRhs rhs(const Surface& u) const;
  /// initial state with X̄'(0) = 1 / sqrt(Û_YY(X0, Y0)), so that u_yy = 1 in the normal form
  OdeState initial(const Surface& u, double X0, double Y0) const;
};

struct ChainRevalidation {
  double trajectory = 0;  // max |chain - inverse frame series| on the line
  double curvature = 0;   // max |Û_YY X̄'^2 - Σ I_{k,2} x^k / k!|
  double phantom_u = 0;   // max |Û - Ȳ'/X̄' - c| with X̄, Ȳ from the inverse frame
  double phantom_uy = 0;  // max |Û_Y X̄' - X̄''/X̄' - d|, same
  double max() const;
};

/// Integrate the running-example chain from the target base point and compare
/// it with the exact frame (order N) over [0, x1].
ChainRevalidation revalidate_running_chain(const PseudoGroupSpec& g, const FrameSpec& spec, const CrossSection& cs,
                                           const SectionJet& target, int N, double x1, double h);

}  // namespace ijets
