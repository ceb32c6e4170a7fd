#include "ijets/system.hpp"

#include <algorithm>
#include <random>
#include <set>
#include <sstream>

namespace ijets {

void DifferentialSystem::add(const Var& lhs, const Expr& rhs) {
  if (lhs.kind != VarKind::Jet) throw InputError("equation lhs must be an unknown jet");
  auto it = index_.find(lhs);
  if (it != index_.end()) {
    eqs_[it->second].rhs = rhs;
    return;
  }
  index_[lhs] = eqs_.size();
  eqs_.push_back({lhs, rhs});
}

const Equation* DifferentialSystem::find(const Var& lhs) const {
  auto it = index_.find(lhs);
  return it == index_.end() ? nullptr : &eqs_[it->second];
}

int DifferentialSystem::order() const {
  int o = -1;
  for (const auto& e : eqs_) o = std::max(o, e.lhs.order());
  return o;
}

int DifferentialSystem::equation_order(const Equation& e) const {
  int o = e.lhs.order();
  for (const auto& v : free_vars(e.rhs))
    if (v.kind == VarKind::Jet) o = std::max(o, v.order());
  return o;
}

std::vector<const Equation*> DifferentialSystem::equations_of_order(int k) const {
  std::vector<const Equation*> out;
  for (const auto& e : eqs_)
    if (equation_order(e) == k) out.push_back(&e);
  return out;
}

Expr DifferentialSystem::reduce(const Expr& e) const {
  VarMap f = [this](const Var& v) -> std::optional<Expr> {
    if (v.kind != VarKind::Jet) return std::nullopt;
    auto it = index_.find(v);
    if (it == index_.end()) return std::nullopt;
    return eqs_[it->second].rhs;
  };
  Expr cur = e;
  for (int pass = 0; pass < 64; ++pass) {
    Expr next = substitute(cur, f);
    if (next.get() == cur.get()) return cur;
    cur = next;
  }
  throw MathError("principal substitution does not terminate (system not in Cartan normal form?)");
}

DifferentialSystem DifferentialSystem::truncated(int n) const {
  DifferentialSystem r(space, term_order);
  r.regular_point = regular_point;
  r.identity_point = identity_point;
  for (const auto& e : eqs_)
    if (e.lhs.order() <= n) r.add(e.lhs, e.rhs);
  return r;
}

DifferentialSystem DifferentialSystem::complete(int n) const {
  DifferentialSystem r = *this;
  for (int k = 0; k < n; ++k) {
    std::vector<Equation> fresh;
    std::set<Var> claimed;
    for (const auto& e : r.eqs_) {
      if (e.lhs.order() != k) continue;
      for (int i = 1; i <= space.p; ++i) {
        Var L = e.lhs.shifted(i);
        if (r.is_principal(L) || claimed.count(L)) continue;
        claimed.insert(L);
        fresh.push_back({L, total_derivative(e.rhs, i, space)});
      }
    }
    for (const auto& f : fresh) r.add(f.lhs, f.rhs);
    for (const auto& f : fresh) r.add(f.lhs, r.reduce(f.rhs));
  }
  return r;
}

void DifferentialSystem::set_identity(JetPoint& pt, int n) const {
  for (int a = 1; a <= space.m; ++a) {
    for (int k = 0; k <= n; ++k)
      for (const auto& J : all_of_order(space.p, k)) {
        Var v = jet_var(a, J);
        if (regular_point.count(v)) continue;
        Q val = 0;
        if (k == 0)
          val = a <= space.p ? pt(base_var(a)) : Q(0);
        else if (k == 1 && J.entries()[0] == a)
          val = 1;
        pt.set(v, val);
      }
  }
}

JetPoint DifferentialSystem::point_on(std::uint64_t seed, int n) const {
  DifferentialSystem c = n > order() ? complete(n) : truncated(n);
  JetPoint pt(seed);
  for (const auto& [v, q] : regular_point) pt.set(v, q);
  if (identity_point) set_identity(pt, n);
  std::vector<const Equation*> eqs;
  for (const auto& e : c.eqs_)
    if (e.lhs.order() <= n) eqs.push_back(&e);
  std::stable_sort(eqs.begin(), eqs.end(),
                   [](const Equation* a, const Equation* b) { return a->lhs.order() < b->lhs.order(); });
  for (int pass = 0; pass < 200; ++pass) {
    bool changed = false;
    for (const auto* e : eqs) {
      Q v = pt.eval(e->rhs);
      if (!pt.has(e->lhs) || pt(e->lhs) != v) {
        pt.set(e->lhs, v);
        changed = true;
      }
    }
    if (!changed) return pt;
  }
  throw MathError("principal jets did not settle at the sample point");
}

std::string DifferentialSystem::to_string() const {
  std::ostringstream os;
  std::vector<const Equation*> sorted;
  for (const auto& e : eqs_) sorted.push_back(&e);
  std::stable_sort(sorted.begin(), sorted.end(), [this](const Equation* a, const Equation* b) {
    if (a->lhs.order() != b->lhs.order()) return a->lhs.order() < b->lhs.order();
    return term_order.before({b->lhs.dep, b->lhs.idx}, {a->lhs.dep, a->lhs.idx});
  });
  for (const auto* e : sorted) os << space.names.var(e->lhs) << " = " << ijets::to_string(e->rhs, space.names) << "\n";
  return os.str();
}

int SymbolReport::weighted_beta() const {
  int s = 0;
  for (std::size_t k = 1; k < beta.size(); ++k) s += static_cast<int>(k) * beta[k];
  return s;
}

int SymbolReport::weighted_alpha() const {
  int s = 0;
  for (std::size_t k = 1; k < alpha.size(); ++k) s += static_cast<int>(k) * alpha[k];
  return s;
}

namespace {

struct TopPart {
  int order;
  std::vector<std::pair<IndexedCoordinate, Q>> coeffs;
};

TopPart top_part(const DifferentialSystem& sys, const Equation& e, const JetPoint& pt) {
  TopPart t{sys.equation_order(e), {}};
  Expr r = e.residual();
  for (const auto& v : free_vars(r)) {
    if (v.kind != VarKind::Jet || v.order() != t.order) continue;
    Q c = pt.eval(partial(r, v));
    if (c != 0) t.coeffs.push_back({{v.dep, v.idx}, c});
  }
  return t;
}

}  // namespace

SymbolReport symbol(const DifferentialSystem& sys, int n, const JetPoint& pt, int eq_max) {
  if (eq_max < 0) eq_max = n;
  const int p = sys.space.p;
  SymbolReport rep;
  rep.order = n;
  rep.columns = sys.term_order.columns(n, sys.space.deps());
  std::map<IndexedCoordinate, int> col;
  for (std::size_t k = 0; k < rep.columns.size(); ++k) col[rep.columns[k]] = static_cast<int>(k);
  const int ncols = static_cast<int>(rep.columns.size());
  for (const auto& e : sys.equations()) {
    int k = sys.equation_order(e);
    if (k > eq_max || k > n) continue;
    TopPart t = top_part(sys, e, pt);
    if (t.coeffs.empty()) continue;
    for (const auto& K : all_of_order(p, n - k)) {
      QVec row(ncols, Q(0));
      for (const auto& [c, v] : t.coeffs) row[col.at({c.dep, c.index.plus(K)})] += v;
      rep.matrix.push_back(std::move(row));
    }
  }
  rep.echelon = row_echelon(rep.matrix, ncols);
  rep.rank = rep.echelon.rank();
  rep.dim = ncols - rep.rank;
  rep.t.assign(p + 1, 0);
  rep.beta.assign(p + 1, 0);
  rep.alpha.assign(p + 1, 0);
  std::vector<bool> piv(ncols, false);
  for (int c : rep.echelon.pivots) piv[c] = true;
  for (int c = 0; c < ncols; ++c) {
    int cls = sys.term_order.cls(rep.columns[c].index);
    rep.t[cls] += 1;
    if (piv[c]) {
      rep.beta[cls] += 1;
      rep.principal.push_back(rep.columns[c]);
    } else {
      rep.alpha[cls] += 1;
      rep.parametric.push_back(rep.columns[c]);
    }
  }
  return rep;
}

std::vector<Expr> project_check(const DifferentialSystem& sys, int n, std::uint64_t seed, int points) {
  DifferentialSystem c = sys.order() < n ? sys.complete(n) : sys.truncated(n);
  std::vector<Expr> prolonged;
  for (const auto& e : c.equations()) {
    if (c.equation_order(e) > n) continue;
    for (int i = 1; i <= c.space.p; ++i) prolonged.push_back(total_derivative(e.residual(), i, c.space));
  }
  std::vector<Var> top;
  {
    std::set<Var> s;
    for (const auto& f : prolonged)
      for (const auto& v : free_vars(f))
        if (v.kind == VarKind::Jet && v.order() == n + 1) s.insert(v);
    top.assign(s.begin(), s.end());
  }
  std::vector<std::vector<Expr>> dF(prolonged.size());
  for (std::size_t r = 0; r < prolonged.size(); ++r)
    for (const auto& w : top) dF[r].push_back(partial(prolonged[r], w));

  std::vector<Expr> conditions;
  for (int k = 0; k < points; ++k) {
    JetPoint pt = c.point_on(seed + 7919ULL * (k + 1), n);
    for (const auto& w : top) pt.set(w, 0);
    QMatrix a(prolonged.size(), QVec(top.size()));
    QVec b(prolonged.size());
    for (std::size_t r = 0; r < prolonged.size(); ++r) {
      for (std::size_t j = 0; j < top.size(); ++j) a[r][j] = pt.eval(dF[r][j]);
      b[r] = pt.eval(prolonged[r]);
    }
    QMatrix ys;
    if (top.empty()) {
      for (std::size_t r = 0; r < prolonged.size(); ++r) {
        QVec y(prolonged.size(), Q(0));
        y[r] = 1;
        ys.push_back(y);
      }
    } else {
      ys = left_nullspace(a);
    }
    for (const auto& y : ys) {
      Q s = 0;
      for (std::size_t r = 0; r < y.size(); ++r) s += y[r] * b[r];
      if (s == 0) continue;
      std::vector<Expr> terms;
      for (std::size_t r = 0; r < y.size(); ++r)
        if (y[r] != 0) terms.push_back(cst(y[r]) * prolonged[r]);
      std::map<Var, Expr> zero;
      for (const auto& w : top) zero[w] = cst(0);
      conditions.push_back(c.reduce(substitute(add(std::move(terms)), zero)));
    }
    if (!conditions.empty()) break;
  }
  return conditions;
}

InvolutivityVerdict involutivity(const DifferentialSystem& sys, int n, std::uint64_t seed) {
  InvolutivityVerdict v;
  v.order = n;
  DifferentialSystem s = sys.truncated(n);
  JetPoint pt = s.point_on(seed, n);
  v.report = symbol(s, n, pt, n);
  SymbolReport next = symbol(s, n + 1, pt, n);
  v.weighted_beta = v.report.weighted_beta();
  v.weighted_alpha = v.report.weighted_alpha();
  v.prolonged_rank = next.rank;
  v.prolonged_dim = next.dim;
  v.symbol_involutive = v.weighted_beta == v.prolonged_rank;
  v.conditions = project_check(s, n, seed);
  v.no_integrability = v.conditions.empty();
  v.involutive = v.symbol_involutive && v.no_integrability;
  return v;
}

std::vector<int> symbol_indices_after_change(const DifferentialSystem& sys, int n, const JetPoint& pt,
                                             const std::vector<std::vector<Q>>& a) {
  const int p = sys.space.p;
  // B = A^{-1}; old ∂_j = Σ_i B_ij ∂'_i
  QMatrix aug(p, QVec(2 * p, Q(0)));
  for (int i = 0; i < p; ++i) {
    for (int j = 0; j < p; ++j) aug[i][j] = a[i][j];
    aug[i][p + i] = 1;
  }
  Echelon e = row_echelon(aug);
  if (e.rank() < p || e.pivots.back() >= p) throw MathError("change of variables is singular");
  QMatrix b(p, QVec(p));
  for (int i = 0; i < p; ++i)
    for (int j = 0; j < p; ++j) b[i][j] = e.rows[i][p + j];
  std::vector<QSeries> lin;
  for (int j = 0; j < p; ++j) {
    QSeries s(p, n);
    for (int i = 0; i < p; ++i) s[1 + i] = b[i][j];
    lin.push_back(s);
  }
  SymbolReport rep = symbol(sys, n, pt);
  auto cols = sys.term_order.columns(n, sys.space.deps());
  std::map<IndexedCoordinate, int> col;
  for (std::size_t k = 0; k < cols.size(); ++k) col[cols[k]] = static_cast<int>(k);
  QMatrix m;
  for (const auto& row : rep.matrix) {
    std::map<int, QSeries> poly;
    for (std::size_t c = 0; c < row.size(); ++c) {
      if (row[c] == 0) continue;
      const auto& ic = rep.columns[c];
      QSeries mono = QSeries::constant(p, n, 1);
      for (int j : ic.index.entries()) mono = mono * lin[j - 1];
      auto it = poly.find(ic.dep);
      if (it == poly.end()) it = poly.emplace(ic.dep, QSeries(p, n)).first;
      it->second = it->second + mono.scaled(row[c]);
    }
    QVec out(cols.size(), Q(0));
    for (const auto& [dep, s] : poly)
      for (const auto& J : all_of_order(p, n)) out[col.at({dep, J})] = s.coeff(J.exponents(p));
    m.push_back(std::move(out));
  }
  Echelon ech = row_echelon(m, static_cast<int>(cols.size()));
  std::vector<int> beta(p + 1, 0);
  for (int c : ech.pivots) beta[sys.term_order.cls(cols[c].index)] += 1;
  return beta;
}

ProbeReport delta_regularity_probe(const DifferentialSystem& sys, int n, int trials, std::uint64_t seed) {
  ProbeReport r;
  const int p = sys.space.p;
  JetPoint pt = sys.point_on(seed, n);
  auto weighted = [](const std::vector<int>& beta) {
    int s = 0;
    for (std::size_t k = 1; k < beta.size(); ++k) s += static_cast<int>(k) * beta[k];
    return s;
  };
  r.original = symbol(sys, n, pt).weighted_beta();
  r.best = r.original;
  if (p == 1) return r;
  std::mt19937_64 g(seed + 17);
  std::uniform_int_distribution<int> d(-3, 3);
  for (int t = 0; t < trials; ++t) {
    std::vector<std::vector<Q>> a(p, std::vector<Q>(p));
    for (auto& row : a)
      for (auto& x : row) x = d(g);
    if (rank(a, p) < p) continue;
    int w = weighted(symbol_indices_after_change(sys, n, pt, a));
    if (w > r.best) {
      r.best = w;
      r.witness = a;
    }
  }
  r.irregular = r.best > r.original;
  return r;
}

FirstOrderSystem first_order_reduction(const DifferentialSystem& sys_in) {
  const int n = sys_in.order();
  if (n <= 1) return {sys_in, {}};
  DifferentialSystem sys = sys_in.complete(n);
  const int p = sys.space.p;
  FirstOrderSystem out;
  JetSpace s;
  s.p = p;
  s.q_sec = sys.space.q_sec;
  s.q_tgt = sys.space.q_tgt;
  s.names.base = sys.space.names.base;
  s.names.sec = sys.space.names.sec;
  s.names.tgt = sys.space.names.tgt;
  s.names.tgt_index = sys.space.names.tgt_index;
  s.names.par = sys.space.names.par;
  std::vector<int> dep_order;
  for (int k = 0; k < n; ++k)
    for (const auto& J : all_of_order(p, k))
      for (int a = 1; a <= sys.space.m; ++a) {
        int id = static_cast<int>(out.dep_of.size()) + 1;
        out.dep_of[{a, J}] = id;
        std::string nm = sys.space.names.var(jet_var(a, J));
        std::erase(nm, '_');
        s.names.jet.push_back(nm);
      }
  s.m = static_cast<int>(out.dep_of.size());
  // Tgt chain rule points at the order-0 representative of the same unknown
  for (int xd : sys.space.tgt_xdeps) s.tgt_xdeps.push_back(out.dep_of.at({xd, {}}));
  for (int a = 1; a <= sys.space.m; ++a) dep_order.push_back(a);
  std::vector<int> ranks;
  for (const auto& [key, id] : out.dep_of) (void)key;
  ClassTermOrder ord(p, sys.term_order.variable_order());
  DifferentialSystem fo(s, ord);
  auto canonical = [&](int a, const MultiIndex& K) -> Var {
    if (K.order() < n) return jet_var(out.dep_of.at({a, K}));
    // lowest-positioned variable in K (its class)
    int c = K.entries()[0];
    for (int v : K.entries())
      if (ord.position(v) < ord.position(c)) c = v;
    return jet_var(out.dep_of.at({a, *K.without(c)}), MultiIndex{c});
  };
  VarMap rename = [&](const Var& v) -> std::optional<Expr> {
    if (v.kind != VarKind::Jet) return std::nullopt;
    return sym(canonical(v.dep, v.idx));
  };
  for (const auto& [key, id] : out.dep_of) {
    const auto& [a, J] = key;
    for (int i = 1; i <= p; ++i) {
      MultiIndex K = J.with(i);
      Var lhs = jet_var(id, MultiIndex{i});
      Var canon = canonical(a, K);
      if (K.order() < n) {
        fo.add(lhs, sym(canon));
      } else if (!(canon == lhs)) {
        fo.add(lhs, sym(canon));
      }
    }
  }
  for (const auto& e : sys.equations()) {
    if (e.lhs.order() > n) continue;
    Expr rhs = substitute(e.rhs, rename);
    fo.add(canonical(e.lhs.dep, e.lhs.idx), rhs);
  }
  for (const auto& [v, q] : sys.regular_point) {
    if (v.kind != VarKind::Jet) {
      fo.regular_point[v] = q;
      continue;
    }
    if (v.order() < n) fo.regular_point[jet_var(out.dep_of.at({v.dep, v.idx}))] = q;
  }
  out.system = std::move(fo);
  return out;
}

Schema initial_condition_schema(const DifferentialSystem& fo, std::uint64_t seed) {
  if (fo.order() > 1) throw InputError("initial data schema needs a first-order system");
  auto verdict = involutivity(fo, 1, seed);
  if (!verdict.involutive) throw MathError("initial data schema needs an involutive system");
  const int p = fo.space.p;
  std::set<IndexedCoordinate> parametric(verdict.report.parametric.begin(), verdict.report.parametric.end());
  Schema sc;
  sc.per_arity.assign(p + 1, 0);
  for (int a = 1; a <= fo.space.m; ++a) {
    if (fo.is_principal(jet_var(a))) continue;  // algebraically determined
    int k = 0;
    for (int pos = 1; pos <= p; ++pos)
      if (parametric.count({a, MultiIndex{fo.term_order.variable_at(pos)}})) k = pos;
    for (int pos = 1; pos <= k; ++pos)
      if (!parametric.count({a, MultiIndex{fo.term_order.variable_at(pos)}}))
        throw MathError("parametric derivatives do not form an initial segment");
    SchemaEntry e;
    e.dep = a;
    e.name = fo.space.names.var(jet_var(a));
    for (int pos = 1; pos <= k; ++pos) e.arguments.push_back(fo.term_order.variable_at(pos));
    sc.per_arity[k] += 1;
    (k == 0 ? sc.points : sc.functions).push_back(std::move(e));
  }
  return sc;
}

}  // namespace ijets
