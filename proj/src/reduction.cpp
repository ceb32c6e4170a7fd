#include "ijets/reduction.hpp"

#include <algorithm>
#include <numeric>

#include "ijets/action.hpp"
#include "ijets/solver.hpp"

namespace ijets {

namespace {

Q inv_factorial(const MultiIndex& E, int nvars) {
  Q f = 1;
  for (int e : E.exponents(nvars)) f *= factorial(e);
  return 1 / f;
}

// group jets are carried as Fn variables while reduced jets are Jet
Var mark(const Var& v) { return {VarKind::Fn, v.dep, v.idx}; }
Var unmark(const Var& v) { return {VarKind::Jet, v.dep, v.idx}; }

}  // namespace

std::vector<Var> PseudoGroupSpec::parametric(int n) const {
  FormalSolver<Q> s(system, nstar);
  return s.parametric(n);
}

int PseudoGroupSpec::dim(int n) const { return static_cast<int>(parametric(n).size()); }

Q group_identity_value(const PseudoGroupSpec& g, const Var& jet, const JetPoint& section) {
  if (jet.idx.empty()) return jet.dep <= g.p ? section(base_var(jet.dep)) : section(sec_var(jet.dep - g.p));
  if (jet.idx.order() == 1 && jet.idx.entries()[0] == jet.dep) return 1;
  return 0;
}

Q reduced_identity_value(const PseudoGroupSpec& g, const Var& jet, const JetPoint& section) {
  if (jet.dep > g.p) return section(sec_var(jet.dep - g.p, jet.idx));
  if (jet.idx.empty()) return section(base_var(jet.dep));
  if (jet.idx.order() == 1 && jet.idx.entries()[0] == jet.dep) return 1;
  return 0;
}

int ReducedImage::weighted_beta() const {
  int s = 0;
  for (std::size_t i = 1; i < beta.size(); ++i) s += static_cast<int>(i) * beta[i];
  return s;
}

ReducedJacobian reduced_jacobian(const PseudoGroupSpec& g, const JetPoint& section, int N) {
  using D = Dual<Q>;
  using DS = TruncatedSeries<D>;
  const int P = g.p, M = g.p + g.q;
  FormalSolver<D> solver(g.system, g.nstar);
  ReducedJacobian out;
  out.order = N;
  out.params = solver.parametric(N);
  const std::size_t nd = out.params.size();
  std::map<Var, std::size_t> seed_of;
  for (std::size_t k = 0; k < nd; ++k) seed_of[out.params[k]] = k;

  auto given = [&](const Var& v) -> D {
    switch (v.kind) {
      case VarKind::Base:
        return D(v.dep <= P ? section(v) : section(sec_var(v.dep - P)));
      case VarKind::Jet: {
        Q val = group_identity_value(g, v, section);
        auto it = seed_of.find(v);
        if (it == seed_of.end()) return D(val);
        return D::seed(val, nd, it->second);
      }
      default:
        return D(section(v));
    }
  };
  auto values = solver.solve(N, given);

  std::vector<DS> sec;
  for (int a = 1; a <= g.q; ++a) {
    DS s(P, N);
    const auto& tab = s.table();
    for (int m = 0; m < tab.size(); ++m) {
      MultiIndex K = MultiIndex::from_exponents(tab.exps[m]);
      s[m] = D(section(sec_var(a, K)) * inv_factorial(K, P));
    }
    sec.push_back(s);
  }
  std::function<D(int, const MultiIndex&)> gjet = [&](int a, const MultiIndex& B) -> D {
    auto it = values.find(jet_var(a, B));
    if (it == values.end()) throw MathError("reduced image: missing group jet " + g.system.space.names.var(jet_var(a, B)));
    return it->second;
  };
  auto zbar = lifted_series<D>(P, g.q, N, gjet, sec);

  std::vector<int> deps(M);
  std::iota(deps.begin(), deps.end(), 1);
  out.cols.resize(N + 1);
  out.rows.resize(N + 1);
  for (int k = 0; k <= N; ++k) {
    out.cols[k] = g.reduced_order.columns(k, deps);
    for (const auto& c : out.cols[k]) {
      D v = zbar[c.dep - 1].jet(c.index);
      QVec r(nd, Q(0));
      for (std::size_t s = 0; s < nd; ++s) r[s] = v.grad(s);
      out.rows[k].push_back(std::move(r));
    }
  }
  return out;
}

ReducedImage reduced_image(const PseudoGroupSpec& g, const JetPoint& section, int n) {
  const int P = g.p, N = n + 1;
  ReducedJacobian jac = reduced_jacobian(g, section, N);
  const auto& cols = jac.cols;
  const auto& rows = jac.rows;
  const std::size_t nd = jac.params.size();
  const auto& order = g.reduced_order;

  ReducedImage out;
  out.order = n;
  QMatrix below;  // rows of order < k
  auto symbol_at = [&](int k, const QMatrix& lower) {
    // S_k = J_k null(J_<k); returns a basis as rows over cols[k]
    QMatrix basis;
    QMatrix nul;
    if (lower.empty()) {
      for (std::size_t s = 0; s < nd; ++s) {
        QVec e(nd, Q(0));
        e[s] = 1;
        nul.push_back(e);
      }
    } else {
      nul = nullspace(lower, static_cast<int>(nd));
    }
    for (const auto& v : nul) {
      QVec img(cols[k].size(), Q(0));
      for (std::size_t r = 0; r < cols[k].size(); ++r)
        for (std::size_t s = 0; s < nd; ++s)
          if (v[s] != 0 && rows[k][r][s] != 0) img[r] += rows[k][r][s] * v[s];
      basis.push_back(img);
    }
    return basis;
  };

  Echelon top_annihilator;
  for (int k = 0; k <= N; ++k) {
    QMatrix s = symbol_at(k, below);
    int ncols = static_cast<int>(cols[k].size());
    int dim = s.empty() ? 0 : rank(s, ncols);
    if (k <= n) {
      out.dims.push_back(dim);
      out.cumulative.push_back((k ? out.cumulative.back() : 0) + dim);
      QMatrix ann = s.empty() || dim == 0 ? QMatrix{} : nullspace(s, ncols);
      if (s.empty() || dim == 0) {
        for (int c = 0; c < ncols; ++c) {
          QVec e(ncols, Q(0));
          e[c] = 1;
          ann.push_back(e);
        }
      }
      Echelon ech = row_echelon(ann, ncols);
      std::vector<bool> piv(ncols, false);
      for (int c : ech.pivots) piv[c] = true;
      for (int c = ncols - 1; c >= 0; --c)
        if (!piv[c]) out.parametric.push_back(cols[k][c]);
      if (k == n) {
        out.t.assign(P + 1, 0);
        out.beta.assign(P + 1, 0);
        for (int c = 0; c < ncols; ++c) {
          int cl = order.cls(cols[k][c].index);
          out.t[cl]++;
          if (piv[c]) out.beta[cl]++;
        }
        out.alpha.resize(P + 1);
        for (int i = 0; i <= P; ++i) out.alpha[i] = out.t[i] - out.beta[i];
        top_annihilator = ech;
      }
    } else {
      out.actual_rank = ncols - dim;
    }
    for (const auto& r : rows[k]) below.push_back(r);
  }

  // prolonged symbol of the order-n annihilator
  std::map<IndexedCoordinate, int> col_next;
  for (std::size_t c = 0; c < cols[N].size(); ++c) col_next[cols[N][c]] = static_cast<int>(c);
  QMatrix prolonged;
  for (const auto& r : top_annihilator.rows)
    for (int i = 1; i <= P; ++i) {
      QVec row(cols[N].size(), Q(0));
      for (std::size_t c = 0; c < cols[n].size(); ++c)
        if (r[c] != 0) row[col_next.at({cols[n][c].dep, cols[n][c].index.with(i)})] += r[c];
      prolonged.push_back(std::move(row));
    }
  out.prolonged_rank = prolonged.empty() ? 0 : rank(prolonged, static_cast<int>(cols[N].size()));
  out.symbol_involutive = n >= 1 && out.weighted_beta() == out.prolonged_rank;
  out.involutive = out.symbol_involutive && out.prolonged_rank == out.actual_rank;
  return out;
}

ReducedSystem reduce(const PseudoGroupSpec& g, const JetPoint& section, int n) {
  const int P = g.p, M = g.p + g.q;
  DifferentialSystem G = g.system.order() < n ? g.system.complete(n) : g.system;
  LiftedRule rule(P, g.q);

  JetSpace rs;
  rs.p = P;
  rs.m = M;
  rs.q_sec = g.q;
  rs.names = g.reduced_names;
  ReducedSystem out;
  out.order = n;
  out.system = DifferentialSystem(rs, g.reduced_order);
  out.system.regular_point = {};

  auto marked = [&](const Expr& e) {
    return substitute(e, [&](const Var& v) -> std::optional<Expr> {
      if (v.kind == VarKind::Base && v.dep > P) return sym(sec_var(v.dep - P));
      if (v.kind == VarKind::Jet) return sym(mark(v));
      return std::nullopt;
    });
  };
  auto point_value = [&](const Var& v) -> Q {
    switch (v.kind) {
      case VarKind::Fn:
        return group_identity_value(g, unmark(v), section);
      case VarKind::Jet:
        return reduced_identity_value(g, v, section);
      default:
        return section(v);
    }
  };
  auto at_point = [&](const Expr& e) -> std::optional<Q> {
    try {
      return eval<Q>(e, point_value);
    } catch (const MathError&) {
      return std::nullopt;
    }
  };

  // lifted total derivatives Z̄^a_J, with principal group jets substituted
  std::map<IndexedCoordinate, Expr> lifted;
  for (int a = 1; a <= M; ++a) lifted[{a, {}}] = G.reduce(sym(jet_var(a)));
  for (int k = 1; k <= n; ++k)
    for (const auto& J : all_of_order(P, k))
      for (int a = 1; a <= M; ++a) {
        std::vector<int> e = J.entries();
        int last = e.back();
        e.pop_back();
        const Expr& parent = lifted.at({a, MultiIndex(e)});
        lifted[{a, J}] = G.reduce(total_derivative(parent, last, rule));
      }

  std::map<Var, Expr> solution;  // marked group jet -> expression
  auto apply_solution = [&](const Expr& e) {
    if (solution.empty()) return e;
    return substitute(e, [&](const Var& v) -> std::optional<Expr> {
      if (v.kind != VarKind::Fn) return std::nullopt;
      auto it = solution.find(v);
      if (it == solution.end()) return std::nullopt;
      return it->second;
    });
  };

  const auto& ord = g.reduced_order;
  for (int k = 0; k <= n; ++k) {
    auto Js = all_of_order(P, k);
    std::stable_sort(Js.begin(), Js.end(),
                     [&](const MultiIndex& a, const MultiIndex& b) { return ord.cls(a) < ord.cls(b); });
    for (const auto& J : Js)
      for (int a = 1; a <= M; ++a) {
        Var R = jet_var(a, J);
        Expr E = apply_solution(marked(lifted.at({a, J})));
        std::vector<Var> gvars;
        for (const auto& v : free_vars(E))
          if (v.kind == VarKind::Fn) gvars.push_back(v);
        if (gvars.empty()) {
          out.system.add(R, out.system.reduce(E));
          continue;
        }
        // highest order first, then lowest class
        std::stable_sort(gvars.begin(), gvars.end(), [&](const Var& x, const Var& y) {
          if (x.order() != y.order()) return x.order() > y.order();
          return g.system.term_order.before(IndexedCoordinate{y.dep, y.idx}, IndexedCoordinate{x.dep, x.idx});
        });
        bool solved = false;
        for (const auto& v : gvars) {
          Expr c = partial(E, v);
          if (mentions(c, [&](const Var& w) { return w == v; })) continue;
          auto cv = at_point(c);
          if (!cv || *cv == 0) continue;
          Expr rest = substitute(E, std::map<Var, Expr>{{v, cst(0)}});
          Expr val = (sym(R) - rest) / c;
          for (auto& [w, s] : solution) s = substitute(s, std::map<Var, Expr>{{v, val}});
          solution[v] = val;
          out.parametric.push_back(R);
          solved = true;
          break;
        }
        if (!solved)
          throw MathError("manual reduced system required: " + g.reduced_names.var(R) + " = " +
                          to_string(E, g.system.space.names));
      }
  }
  for (const auto& [v, s] : solution) out.group_solution[unmark(v)] = s;
  return out;
}

ReducibilityReport reducibility_check(const PseudoGroupSpec& g, const JetPoint& section, int lo, int hi) {
  ReducibilityReport r;
  ReducedImage img = reduced_image(g, section, hi);
  auto params = g.parametric(hi);
  for (int n = lo; n <= hi; ++n) {
    int d = 0;
    for (const auto& v : params)
      if (v.order() <= n) ++d;
    r.orders.push_back(n);
    r.d.push_back(d);
    r.dbar.push_back(img.cumulative[n]);
  }
  for (std::size_t k = 0; k < r.orders.size(); ++k) {
    bool tail = true;
    for (std::size_t j = k; j < r.orders.size(); ++j)
      if (r.d[j] != r.dbar[j]) tail = false;
    if (tail) {
      r.natural_order = r.orders[k];
      break;
    }
  }
  return r;
}

CharacterCheck reduced_character_check(const PseudoGroupSpec& g, const JetPoint& section, int n, std::uint64_t seed) {
  CharacterCheck c;
  DifferentialSystem G = g.system.order() < n ? g.system.complete(n) : g.system;
  InvolutivityVerdict gv = involutivity(G, n, seed);
  ReducedImage img = reduced_image(g, section, n);
  c.group_alpha = gv.report.alpha;
  c.reduced_alpha = img.alpha;
  if (!gv.involutive) {
    c.reason = "group system not involutive at this order";
    throw MathError(c.reason);
  }
  if (!img.involutive) {
    c.reason = "reduced system not involutive at this order";
    throw MathError(c.reason);
  }
  c.ok = true;
  for (int i = 1; i <= g.p; ++i)
    if (c.group_alpha[i] != c.reduced_alpha[i]) {
      c.ok = false;
      c.reason = "character " + std::to_string(i) + " differs";
    }
  for (int a = g.p + 1; a <= g.p + g.q; ++a)
    if (c.group_alpha[a] != 0) {
      c.ok = false;
      c.reason = "group depends on a function of more than p variables";
    }
  return c;
}

}  // namespace ijets
