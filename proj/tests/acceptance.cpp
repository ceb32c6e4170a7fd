// Acceptance run: one PASS/FAIL line per criterion.
#include <chrono>
#include <cmath>
#include <functional>
#include <iostream>
#include <set>
#include <sstream>

#include "fixtures/running_newton.hpp"
#include "ijets/catalog.hpp"
#include "ijets/chains.hpp"
#include "ijets/parser.hpp"

using namespace ijets;

namespace {

// tolerances
constexpr double kTime1 = 5.0;            // s, criterion 1
constexpr double kTimeInvariance = 30.0;  // s per entry, criterion 8
constexpr double kOracleTol = 1e-9;       // criterion 7
constexpr double kEx10Tol = 1e-8;         // criterion 9
constexpr double kChainTol = 1e-6;        // criterion 9
constexpr double kRk4Order = 3.8;         // criterion 9
constexpr int kSemanticPoints = 5;        // criterion 5

int failures = 0;

struct Log {
  std::ostringstream detail;
  bool ok = true;
  void check(bool c, const std::string& what) {
    if (!c) {
      ok = false;
      detail << " [" << what << "]";
    }
  }
};

void run(int k, const std::string& title, const std::function<void(Log&)>& body) {
  Log log;
  auto t0 = std::chrono::steady_clock::now();
  try {
    body(log);
  } catch (const std::exception& e) {
    log.ok = false;
    log.detail << " exception: " << e.what();
  }
  double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  std::cout << (log.ok ? "PASS" : "FAIL") << " " << k << " " << title << " (" << std::fixed << std::setprecision(2) << s
            << " s)" << log.detail.str() << std::endl;
  std::cout.unsetf(std::ios::fixed);
  failures += !log.ok;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::vector<int> tail(const std::vector<int>& v) { return {v.begin() + 1, v.end()}; }

std::string str(const std::vector<int>& v) {
  std::string s;
  for (int x : v) s += (s.empty() ? "" : ",") + std::to_string(x);
  return "(" + s + ")";
}

// the degree-5 target shared with the Newton oracle
SectionJet oracle_target(int N) {
  QSeries s(2, N);
  auto set = [&](int i, int j, Q v) { s.set({i, j}, v); };
  set(0, 0, Q(1, 3)), set(1, 0, Q(1, 2)), set(0, 1, Q(-1, 5)), set(2, 0, Q(1, 4)), set(1, 1, Q(1, 7));
  set(0, 2, Q(2)), set(2, 1, Q(1, 3)), set(0, 3, Q(-1, 4)), set(1, 2, Q(1, 6)), set(3, 0, Q(1, 5));
  set(4, 0, Q(1, 8)), set(2, 2, Q(-1, 3)), set(0, 4, Q(1, 7)), set(1, 3, Q(1, 9)), set(5, 0, Q(1, 10));
  set(3, 2, Q(-1, 4)), set(0, 5, Q(1, 11)), set(2, 3, Q(1, 5)), set(4, 1, Q(1, 6)), set(1, 4, Q(1, 12));
  return SectionJet::from_series({Q(1, 2), Q(-1, 3)}, {s});
}

// compare "lhs = rhs" lists against a solved system
void compare_equations(Log& log, const DifferentialSystem& sys,
                       const std::vector<std::pair<std::string, std::string>>& want, const std::string& tag) {
  const auto& nm = sys.space.names;
  RationalSampler rng(7);
  for (const auto& [l, r] : want) {
    const Equation* e = sys.find(parse_var(l, nm));
    if (!e) {
      log.check(false, tag + " missing " + l);
      continue;
    }
    log.check(semantically_equal(e->rhs, parse_expr(r, nm), rng, kSemanticPoints), tag + " " + l);
  }
}

QMatrix unit_rows(const std::vector<LinearColumn>& cols, const std::function<bool(const LinearColumn&)>& pick) {
  QMatrix m;
  for (std::size_t c = 0; c < cols.size(); ++c)
    if (pick(cols[c])) {
      QVec row(cols.size(), Q(0));
      row[c] = 1;
      m.push_back(row);
    }
  return m;
}

}  // namespace

int main() {
  run(1, "running determining system", [](Log& log) {
    auto t0 = std::chrono::steady_clock::now();
    auto c = load_catalog("running");
    auto v = involutivity(c.group.system, 2, 0);
    double s = seconds_since(t0);
    log.check(tail(v.report.beta) == std::vector<int>{7, 6, 3}, "beta " + str(tail(v.report.beta)));
    log.check(tail(v.report.alpha) == std::vector<int>{2, 0, 0}, "alpha " + str(tail(v.report.alpha)));
    log.check(v.weighted_beta == 28 && v.prolonged_rank == 28, "r3 " + std::to_string(v.prolonged_rank));
    log.check(c.group.dim(3) - c.group.dim(2) == 2, "d3");
    log.check(v.involutive, "verdict");
    log.check(s < kTime1, "time " + std::to_string(s));
  });

  run(2, "reduced running example", [](Log& log) {
    auto c = load_catalog("running");
    auto sec = c.section(0);
    auto img = reduced_image(c.group, sec, 2);
    log.check(tail(img.beta) == std::vector<int>{4, 3}, "beta");
    log.check(tail(img.alpha) == std::vector<int>{2, 0}, "alpha");
    log.check(img.actual_rank == 10 && img.weighted_beta() == 10, "r3");
    log.check(img.involutive, "verdict");
    auto img3 = reduced_image(c.group, sec, 3);
    log.check(img3.dims.at(3) == 2, "d3");
    // parametric: X, Y, U, X_x, U_{x^k}, U_{x^{k-1} y}
    auto red = reduce(c.group, sec, 3);
    const auto& nm = red.system.space.names;
    std::set<std::string> got, want{"X", "Y", "U", "X_x"};
    for (const auto& v : red.parametric) got.insert(nm.var(v));
    for (int k = 1; k <= 3; ++k) {
      want.insert("U_" + std::string(k, 'x'));
      want.insert("U_" + std::string(k - 1, 'x') + "y");
    }
    log.check(got == want, "parametric list");
    auto r = reducibility_check(c.group, sec, 1, 6);
    for (std::size_t k = 0; k < r.orders.size(); ++k)
      log.check(r.dbar[k] == 2 * r.orders[k] + 4, "dbar at " + std::to_string(r.orders[k]));
  });

  run(3, "ex4 reduced involutivity", [](Log& log) {
    auto c = load_catalog("ex4");
    auto sec = c.section(0);
    auto two = reduced_image(c.group, sec, 2);
    log.check(two.weighted_beta() == 8 && two.actual_rank == 9 && !two.involutive, "order 2");
    auto three = reduced_image(c.group, sec, 3);
    log.check(tail(three.beta) == std::vector<int>{6, 3} && tail(three.alpha) == std::vector<int>{3, 0}, "order 3 data");
    log.check(three.weighted_beta() == 12 && three.actual_rank == 12 && three.involutive, "order 3 verdict");
  });

  run(4, "reducibility of ex5, ex99, xfxu", [](Log& log) {
    auto e5 = load_catalog("ex5");
    auto r5 = reducibility_check(e5.group, e5.section(0), 1, 6);
    log.check(r5.natural_order == 2, "ex5 natural order");
    log.check(r5.dbar.at(0) == 4, "ex5 dbar1");
    for (std::size_t k = 1; k < r5.dbar.size(); ++k) log.check(r5.dbar[k] == 5 && r5.d[k] == 5, "ex5 dbar");
    auto e99 = load_catalog("ex99");
    auto sec99 = e99.section(0);
    auto r99 = reducibility_check(e99.group, sec99, 1, 6);
    log.check(!r99.reducible(), "ex99 reducible");
    for (std::size_t k = 0; k < r99.orders.size(); ++k)
      log.check(r99.dbar[k] == r99.orders[k] + 2 && r99.d[k] == r99.orders[k] + 3, "ex99 dims");
    for (int n = 2; n <= 3; ++n) log.check(reduced_character_check(e99.group, sec99, n).ok, "ex99 characters");
    auto xf = load_catalog("xfxu");
    auto rx = reducibility_check(xf.group, xf.section(0), 1, 6);
    log.check(!rx.reducible(), "xfxu reducible");
    for (std::size_t k = 0; k < rx.orders.size(); ++k) {
      int n = rx.orders[k];
      log.check(rx.d[k] == (n + 2) * (n + 1) / 2, "xfxu d");
      // Ū, Ū_x, ..., Ū_{x^n} are all free: n + 1 reduced parameters (the quoted count is n)
      log.check(rx.dbar[k] == n + 1, "xfxu dbar");
    }
  });

  run(5, "running normal-form system and linearization", [](Log& log) {
    auto c = load_catalog("running");
    auto sec = c.section(0);
    auto nf = build_nf_system(c.group, reduce(c.group, sec, 3), sec);
    log.check(nf.system.equations().size() == 20, "equation count");
    const std::string cubic = "(u_y^2 - u_xy)*X_x - 3*u_y*U_Y*X_x^2 + (U_XY + 2*U_Y^2 + (U - u)*U_YY)*X_x^3";
    compare_equations(
        log, nf.system,
        {{"X_y", "0"},
         {"Y_x", "(U - u)*X_x"},
         {"Y_y", "X_x"},
         {"X_xx", "U_Y*X_x^2 - u_y*X_x"},
         {"X_xy", "0"},
         {"X_yy", "0"},
         {"Y_xx", "(U_X + 2*(U - u)*U_Y)*X_x^2 - (u_x + (U - u)*u_y)*X_x"},
         {"Y_xy", "U_Y*X_x^2 - u_y*X_x"},
         {"Y_yy", "0"},
         {"u_yy", "U_YY*X_x^2"},
         {"X_xxx", cubic},
         {"X_xxy", "0"},
         {"X_xyy", "0"},
         {"X_yyy", "0"},
         {"Y_xyy", "0"},
         {"Y_yyy", "0"},
         {"Y_xxx",
          "(2*u_x*u_y - u_xx + (U - u)*(u_y^2 - u_xy))*X_x - 3*(u_x*U_Y + u_y*U_X + 2*(U - u)*u_y*U_Y)*X_x^2"
          " + (U_XX + 4*U_X*U_Y + 3*(U - u)*(U_XY + 2*U_Y^2) + 2*(U - u)^2*U_YY)*X_x^3"},
         {"Y_xxy", cubic},
         {"u_xyy", "-2*u_y*U_YY*X_x^2 + (U_XYY + 2*U_Y*U_YY - u*U_YYY + U*U_YYY)*X_x^3"},
         {"u_yyy", "U_YYY*X_x^3"}},
        "nf");
    auto lin = linearize_nf(nf);
    const std::string xi3 = "(2*u_xy + u_y^2)*xi_x - psi_xy - u_y*psi_y - u_yy*psi";
    compare_equations(log, lin,
                      {{"xi_y", "0"},
                       {"eta_x", "-psi"},
                       {"eta_y", "xi_x"},
                       {"xi_xx", "u_y*xi_x - psi_y"},
                       {"xi_xy", "0"},
                       {"xi_yy", "0"},
                       {"eta_xx", "u_x*xi_x - u_y*psi - psi_x"},
                       {"eta_xy", "u_y*xi_x - psi_y"},
                       {"eta_yy", "0"},
                       {"psi_yy", "2*u_yy*xi_x"},
                       {"xi_xxx", xi3},
                       {"xi_xxy", "0"},
                       {"xi_xyy", "0"},
                       {"xi_yyy", "0"},
                       // coefficient of xi_x: 2 u_xx (linearizing the nonlinear Y_xxx equation)
                       {"eta_xxx", "(2*u_xx + 2*u_x*u_y)*xi_x - psi_xx - u_y*psi_x - u_x*psi_y - (2*u_xy + u_y^2)*psi"},
                       {"eta_xxy", xi3},
                       {"eta_xyy", "0"},
                       {"eta_yyy", "0"},
                       {"psi_xyy", "(3*u_xyy + 2*u_y*u_yy)*xi_x - 2*u_yy*psi_y - u_yyy*psi"},
                       {"psi_yyy", "3*u_yyy*xi_x"}},
                      "lin");
    // the pointwise rows agree with the symbolic linearization
    for (int n = 2; n <= 3; ++n) {
      auto a = linearized_rows(c.group, sec, n);
      auto b = linear_rows(lin, c.group, sec, n);
      log.check(same_row_space(a.rows, b.rows, static_cast<int>(a.cols.size())), "pointwise rows at " + std::to_string(n));
    }
    // vertical symbol and prolonged annihilator; the u_yy = 0 point is a
    // surface affine in y, so every u_{x^i y^j} with j >= 2 vanishes
    JetPoint flat = sec;
    for (int n = 2; n <= 6; ++n)
      for (const auto& J : all_of_order(2, n))
        if (J.count(2) >= 2) flat.set(sec_var(1, J), 0);
    for (int n = 2; n <= 5; ++n) {
      auto lin_n = linearized_rows(c.group, sec, n);
      auto cols = psi_columns(lin_n, n);
      int nc = static_cast<int>(cols.size());
      auto psi = vertical_symbol(lin_n, n);
      QMatrix want = n == 2 ? unit_rows(cols, [](const LinearColumn& l) { return l.index == MultiIndex{2, 2}; })
                            : unit_rows(cols, [&](const LinearColumn& l) { return l.index.count(1) <= n - 2; });
      log.check(same_row_space(psi, want, nc), "Psi^" + std::to_string(n));
      if (n >= 3)
        log.check(same_row_space(annihilator_symbol(lin_n, n), psi, nc), "Upsilon^" + std::to_string(n) + " (u_yy != 0)");
      auto lin_f = linearized_rows(c.group, flat, n);
      auto cf = static_cast<int>(psi_columns(lin_f, n).size());
      log.check(same_row_space(annihilator_symbol(lin_f, n), vertical_symbol(lin_f, n), cf),
                "Upsilon^" + std::to_string(n) + " (u_yy = 0)");
    }
  });

  run(6, "well-posed cross-sections and Rees decompositions", [](Log& log) {
    std::vector<std::pair<std::string, std::vector<std::vector<int>>>> want{
        {"running", {{3, 0}, {2, 1}}},
        {"ex13", {{2, 0}}},
        {"ex14", {{2, 0}, {1, 1}, {0, 2}}},
        {"ex15", {{2, 0, 0}, {1, 1, 0}}}};
    for (const auto& [id, gens] : want) {
      auto c = load_catalog(id);
      auto w = wellposed_check(c.group, *c.cross_section, c.nf, 5, 0);
      std::set<std::vector<int>> got, exp(gens.begin(), gens.end());
      for (const auto& g : w.generators) {
        auto e = g.index.exponents(c.p);
        // the ex14 decomposition is quoted without the z exponent
        if (e.size() > gens.front().size() && e.back() == 0) e.pop_back();
        got.insert(e);
      }
      log.check(w.ok(), id + " " + w.reason);
      log.check(got == exp, id + " generators");
      log.check(w.orders.front() == c.nf + 1 && w.orders.back() == c.nf + 5, id + " orders");
    }
  });

  run(7, "running moving frame at U_YY = 4", [](Log& log) {
    auto c = load_catalog("running");
    auto tgt = oracle_target(5);
    auto [fs, nf] = solve_frame(c.group, *c.frame, *c.cross_section, tgt, 5);
    log.check(fs.exact, "exact mode");
    Q U = tgt.value(1, {}), UY = tgt.value(1, {2}), UYY = tgt.value(1, {2, 2});
    Q UXYY = tgt.value(1, {1, 2, 2}), UYYY = tgt.value(1, {2, 2, 2});
    log.check(UYY == 4, "target");
    log.check(fs.reduced.at(jet_var(1, {1})) == 2, "X_x");
    log.check(fs.reduced.at(jet_var(3, {1, 2})) == -4 * U, "U_xy");
    log.check(fs.reduced.at(jet_var(3, {1, 1})) == 4 * U * U, "U_xx");
    Q s3 = 8;  // U_YY^{3/2}
    log.check(nf.find(1, {2, 2, 2})->value == UYYY / s3, "I_03");
    log.check(nf.find(1, {1, 2, 2})->value == (UXYY + U * UYYY + 2 * UY * UYY) / s3, "I_12");
    double worst = 0;
    for (const auto& o : oracle::running_newton) {
      if (o.i + o.j < 4) continue;
      const auto* slot = nf.find(1, MultiIndex::from_exponents({o.i, o.j}));
      worst = std::max(worst, std::fabs(slot->value.get_d() - static_cast<double>(o.value)));
    }
    log.check(worst < kOracleTol, "oracle deviation " + std::to_string(worst));
  });

  run(8, "frame invariance under random group elements", [](Log& log) {
    const int N = 6;
    for (const std::string id : {"running", "pg12", "ex13", "ex14", "ex15"}) {
      auto t0 = std::chrono::steady_clock::now();
      auto c = load_catalog(id);
      auto tgt = c.target(N, 1);
      auto [fs, nf] = solve_frame(c.group, *c.frame, *c.cross_section, tgt, N);
      log.check(nf.exact, id + " exact");
      for (int s = 1; s <= 3; ++s) {
        auto moved = apply_transformation(c.p, c.q, c.random_element(s), tgt, N);
        auto [fs2, nf2] = solve_frame(c.group, *c.frame, *c.cross_section, moved, N);
        bool same = nf2.slots.size() == nf.slots.size();
        for (std::size_t k = 0; same && k < nf.slots.size(); ++k) same = nf.slots[k].value == nf2.slots[k].value;
        log.check(same, id + " element " + std::to_string(s));
      }
      double t = seconds_since(t0);
      log.check(t < kTimeInvariance, id + " time " + std::to_string(t));
    }
  });

  run(9, "chains", [](Log& log) {
    auto e10 = load_catalog("ex10");
    auto t10 = e10.target_from_json(e10.raw["target"], 3);
    Surface u = Surface::from_section(t10);
    const double X0 = 0, x1 = 0.5;
    auto traj = separable_chain(u, X0, 0, x1, 1e-3);
    double err = std::fabs(traj.y.back()[0] - (std::sqrt((1 + X0) * (1 + X0) + 2 * x1) - 1));
    log.check(err < kEx10Tol, "ex10 error " + std::to_string(err));
    OdeRhs f = [&](double, const OdeState& y) { return OdeState{1 / u({y[0], 0})}; };
    double ord = rk4_empirical_order(f, {X0}, 0, x1, 0.1, [](double x) { return std::sqrt(1 + 2 * x) - 1; });
    log.check(ord >= kRk4Order, "rk4 order " + std::to_string(ord));
    auto c = load_catalog("running");
    auto r = revalidate_running_chain(c.group, *c.frame, *c.cross_section, oracle_target(8), 8, 0.1, 1e-3);
    log.check(r.max() < kChainTol, "running revalidation " + std::to_string(r.max()));
  });

  run(10, "ex12 delta-regularity", [](Log& log) {
    auto e12 = load_catalog("ex12");
    log.check(delta_regularity_probe(e12.group.system, 1, 20, 0).irregular, "probe on original coordinates");
    log.check(!involutivity(e12.group.system, 1, 0).involutive, "original verdict");
    auto c = load_catalog("pg12");
    log.check(!delta_regularity_probe(c.group.system, 1, 20, 0).irregular, "probe on regularized coordinates");
    auto sec = c.section(0);
    auto nf = build_nf_system(c.group, reduce(c.group, sec, 2), sec);
    auto v = involutivity(nf.system, 2, 0);
    log.check(tail(v.report.beta) == std::vector<int>{4, 3} && tail(v.report.alpha) == std::vector<int>{2, 0},
              "indices " + str(tail(v.report.beta)));
    log.check(v.weighted_beta == 10 && v.prolonged_rank == 10 && v.involutive, "verdict");
  });

  run(11, "cm-complex system", [](Log& log) {
    auto c = load_catalog("cm-complex");
    auto v = involutivity(c.group.system, 1, 0);
    log.check(tail(v.report.beta) == std::vector<int>{0, 0, 2, 2}, "beta " + str(tail(v.report.beta)));
    log.check(tail(v.report.alpha) == std::vector<int>{2, 2, 0, 0}, "alpha " + str(tail(v.report.alpha)));
    log.check(v.weighted_beta == 14 && v.prolonged_rank == 14 && v.involutive, "verdict");
  });

  run(12, "property suites", [](Log& log) {
    // counting identities against enumeration
    for (int p = 1; p <= 4; ++p)
      for (int q = 1; q <= 3; ++q) {
        long long cumulative = q;
        for (int k = 1; k <= 6; ++k) {
          std::vector<long long> brute(p + 1, 0);
          auto all = all_of_order(p, k);
          for (const auto& J : all) brute[J.cls()] += q;
          long long sum = 0, weighted = 0;
          for (int i = 1; i <= p; ++i) {
            long long t = count_class(p, q, k, i);
            log.check(t == brute[i] && Q(static_cast<long>(t)) == q * binomial(p + k - i - 1, k - 1), "t_k^i");
            sum += t;
            weighted += i * t;
          }
          log.check(sum == count_order(p, q, k) && sum == q * static_cast<long long>(all.size()), "t_k");
          log.check(weighted == count_order(p, q, k + 1), "sum i t_k^i");
          cumulative += sum;
          log.check(Q(static_cast<long>(cumulative)) == q * binomial(p + k, k), "t^(n)");
        }
      }
    // Cartan characters of involutive systems
    for (const auto& id : catalog_ids()) {
      auto c = load_catalog(id);
      const auto& sys = c.group.system;
      int n = c.group.nstar;
      auto v = involutivity(sys, n, 0);
      if (!v.involutive) continue;
      int p = sys.space.p;
      auto a0 = v.report.alpha;
      for (int k = 1; k <= 3; ++k) {
        auto ak = symbol(sys.complete(n + k), n + k, sys.point_on(k, n + k)).alpha;
        for (int i = 1; i <= p; ++i) {
          Q want = 0;
          for (int j = i; j <= p; ++j) want += binomial(k + j - i - 1, k - 1) * a0[j];
          log.check(Q(ak[i]) == want, id + " Cartan relation k=" + std::to_string(k));
          if (i < p) log.check(ak[i] >= ak[i + 1], id + " monotone");
        }
      }
      for (int i = 1; i < p; ++i) log.check(a0[i] >= a0[i + 1] && a0[p] >= 0, id + " monotone");
    }
    // series round trips
    RationalSampler rng(3);
    for (int nv = 1; nv <= 3; ++nv)
      for (int N = 1; N <= 8; ++N) {
        if (nv == 3 && N > 6) continue;
        QSeries s(nv, N);
        for (std::size_t m = 0; m < s.size(); ++m) s[m] = rng.next();
        s[0] = 2;
        QSeries one = QSeries::constant(nv, N, 1);
        log.check(s * s.inverse() == one, "inverse");
        log.check((s * s).sqrt() == s, "sqrt");
        std::vector<QSeries> F;
        for (int i = 1; i <= nv; ++i) {
          QSeries f = QSeries::variable(nv, N, i) + (s - QSeries::constant(nv, N, 2)) * QSeries::variable(nv, N, i);
          F.push_back(f);
        }
        auto G = invert_map(F);
        for (int i = 0; i < nv; ++i) log.check(F[i].compose(G) == QSeries::variable(nv, N, i + 1), "invert_map");
      }
    // total derivatives commute
    for (const auto& id : catalog_ids()) {
      auto c = load_catalog(id);
      const auto& sys = c.group.system;
      int p = sys.space.p;
      for (const auto& e : sys.equations())
        for (int i = 1; i <= p; ++i)
          for (int j = i + 1; j <= p; ++j) {
            Expr a = total_derivative(total_derivative(e.rhs, j, sys.space), i, sys.space);
            Expr b = total_derivative(total_derivative(e.rhs, i, sys.space), j, sys.space);
            for (std::uint64_t s = 1; s <= 5; ++s) {
              JetPoint pt(s);
              log.check(pt.eval(a) == pt.eval(b), id + " D commute");
            }
          }
    }
  });

  std::cout << (failures ? std::to_string(failures) + " criteria fail" : "all criteria pass") << std::endl;
  return failures ? 1 : 0;
}
