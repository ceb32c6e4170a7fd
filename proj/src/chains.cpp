#include "ijets/chains.hpp"

#include <algorithm>
#include <cmath>

namespace ijets {

namespace {

OdeState axpy(const OdeState& y, double a, const OdeState& k) {
  OdeState r(y);
  for (std::size_t i = 0; i < r.size(); ++i) r[i] += a * k[i];
  return r;
}

double to_d(const Q& q) { return q.get_d(); }

}  // namespace

Trajectory rk4(const OdeRhs& f, OdeState y, double x0, double x1, double h) {
  if (!(h > 0)) throw InputError("rk4: step must be positive");
  Trajectory t;
  double x = x0;
  t.x.push_back(x);
  t.y.push_back(y);
  const double dir = x1 >= x0 ? 1 : -1;
  while (dir * (x1 - x) > 1e-14 * std::max(1.0, std::fabs(x1))) {
    double s = dir * std::min(h, dir * (x1 - x));
    OdeState k1 = f(x, y);
    OdeState k2 = f(x + s / 2, axpy(y, s / 2, k1));
    OdeState k3 = f(x + s / 2, axpy(y, s / 2, k2));
    OdeState k4 = f(x + s, axpy(y, s, k3));
    for (std::size_t i = 0; i < y.size(); ++i) y[i] += s / 6 * (k1[i] + 2 * k2[i] + 2 * k3[i] + k4[i]);
    x += s;
    t.x.push_back(x);
    t.y.push_back(y);
  }
  return t;
}

double rk4_empirical_order(const OdeRhs& f, const OdeState& y0, double x0, double x1, double h,
                           const std::function<double(double)>& exact, int comp) {
  double e1 = std::fabs(rk4(f, y0, x0, x1, h).y.back().at(comp) - exact(x1));
  double e2 = std::fabs(rk4(f, y0, x0, x1, h / 2).y.back().at(comp) - exact(x1));
  if (e2 == 0) throw MathError("rk4 order: error vanished at h/2");
  return std::log2(e1 / e2);
}

Surface::Surface(std::vector<Q> base, QSeries series) {
  for (const auto& b : base) base_.push_back(to_d(b));
  const auto& tab = series.table();
  for (int m = 0; m < tab.size(); ++m) {
    if (series[m] == 0) continue;
    exps_.push_back(tab.exps[m]);
    coeffs_.push_back(to_d(series[m]));
  }
}

Surface Surface::from_section(const SectionJet& s, int dep) {
  if (static_cast<int>(s.series.size()) < dep) throw InputError("surface needs a section with series data");
  return Surface(s.base, s.series[dep - 1]);
}

double Surface::operator()(const std::vector<double>& X, const MultiIndex& J) const {
  const int n = p();
  auto j = J.exponents(n);
  double sum = 0;
  for (std::size_t m = 0; m < coeffs_.size(); ++m) {
    const auto& e = exps_[m];
    double term = coeffs_[m];
    for (int i = 0; i < n && term != 0; ++i) {
      if (e[i] < j[i]) {
        term = 0;
        break;
      }
      for (int k = 0; k < j[i]; ++k) term *= e[i] - k;
      term *= std::pow(X[i] - base_[i], e[i] - j[i]);
    }
    sum += term;
  }
  return sum;
}

Trajectory separable_chain(const Surface& u, double X0, double Y0, double x1, double h) {
  OdeRhs f = [&](double, const OdeState& y) {
    double v = u({y[0], Y0});
    if (v == 0) throw MathError("chain left the region u != 0");
    return OdeState{1 / v};
  };
  return rk4(f, {X0}, 0, x1, h);
}

OdeRhs RunningChain::rhs(const Surface& u) const {
  return [this, &u](double x, const OdeState& s) {
    std::vector<double> P{s[0], s[2]};
    double uy = u(P, MultiIndex({2}));
    double v = u(P);
    return OdeState{s[1], uy * s[1] * s[1] - d(x) * s[1], (v - c(x)) * s[1]};
  };
}

OdeState RunningChain::initial(const Surface& u, double X0, double Y0) const {
  double uyy = u({X0, Y0}, MultiIndex({2, 2}));
  if (!(uyy > 0)) throw MathError("chain needs u_yy > 0 at the initial point");
  return {X0, 1 / std::sqrt(uyy), Y0};
}

double ChainRevalidation::max() const { return std::max({trajectory, curvature, phantom_u, phantom_uy}); }

ChainRevalidation revalidate_running_chain(const PseudoGroupSpec& g, const FrameSpec& spec, const CrossSection& cs,
                                           const SectionJet& target, int N, double x1, double h) {
  auto [fs, nf] = solve_frame(g, spec, cs, target, N);
  if (!fs.exact) throw MathError("chain revalidation needs an exact frame");
  Surface u = Surface::from_section(target);
  double X0 = to_d(target.base.at(0)), Y0 = to_d(target.base.at(1));

  // inverse frame: normal-form coordinates -> target coordinates
  std::vector<QSeries> F;
  for (int i = 0; i < 2; ++i) {
    QSeries s = fs.base_map[i];
    s[0] -= cs.base.at(i);
    F.push_back(s);
  }
  auto G = invert_map(F);
  // s(x, 0) and its x-derivatives
  auto line = [&](const QSeries& s, double x, int der = 0) {
    double sum = 0;
    const auto& tab = s.table();
    for (int m = 0; m < tab.size(); ++m) {
      int e = tab.exps[m][0];
      if (tab.exps[m][1] != 0 || s[m] == 0 || e < der) continue;
      double c = to_d(s[m]);
      for (int k = 0; k < der; ++k) c *= e - k;
      sum += c * std::pow(x, e - der);
    }
    return sum;
  };
  // u_yy of the normal form along the line
  std::vector<double> iyy;
  for (int k = 0; k + 2 <= N; ++k) {
    const auto* slot = nf.find(1, MultiIndex::from_exponents({k, 2}));
    iyy.push_back(!slot ? 0.0 : nf.exact ? to_d(slot->value) : static_cast<double>(slot->approx));
  }

  RunningChain chain;
  OdeRhs f = chain.rhs(u);
  Trajectory t = rk4(f, chain.initial(u, X0, Y0), 0, x1, h);
  ChainRevalidation out;
  for (std::size_t k = 0; k < t.x.size(); ++k) {
    double x = t.x[k];
    const auto& s = t.y[k];
    out.trajectory = std::max({out.trajectory, std::fabs(s[0] - X0 - line(G[0], x)), std::fabs(s[2] - Y0 - line(G[1], x))});
    std::vector<double> P{s[0], s[2]};
    double series = 0, xk = 1;
    for (std::size_t j = 0; j < iyy.size(); ++j) {
      series += iyy[j] * xk;
      xk *= x / static_cast<double>(j + 1);
    }
    out.curvature = std::max(out.curvature, std::fabs(u(P, MultiIndex({2, 2})) * s[1] * s[1] - series));
    // the same identities with X̄', X̄'', Ȳ' read off the inverse frame
    double xp = line(G[0], x, 1), xpp = line(G[0], x, 2), yp = line(G[1], x, 1);
    out.phantom_u = std::max(out.phantom_u, std::fabs(u(P) - yp / xp - chain.c(x)));
    out.phantom_uy = std::max(out.phantom_uy, std::fabs(u(P, MultiIndex({2})) * xp - xpp / xp - chain.d(x)));
  }
  return out;
}

}  // namespace ijets
