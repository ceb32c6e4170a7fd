#include "ijets/normalform.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "ijets/action.hpp"
#include "ijets/parser.hpp"
#include "ijets/solver.hpp"

namespace ijets {

namespace {

std::vector<int> iota_deps(int n) {
  std::vector<int> d(n);
  std::iota(d.begin(), d.end(), 1);
  return d;
}

Q inv_factorial(const MultiIndex& E, int nvars) {
  Q f = 1;
  for (int e : E.exponents(nvars)) f *= factorial(e);
  return 1 / f;
}

/// Π_j binom(K_j, L_j) for L a sub-multiset of K.
Q multi_binomial(const MultiIndex& K, const MultiIndex& L, int p) {
  auto k = K.exponents(p), l = L.exponents(p);
  Q c = 1;
  for (int j = 0; j < p; ++j) c *= binomial(k[j], l[j]);
  return c;
}

/// all sub-multisets of K (as exponent vectors), excluding the empty one
std::vector<MultiIndex> sub_indices(const MultiIndex& K, int p) {
  auto k = K.exponents(p);
  std::vector<MultiIndex> out;
  std::vector<int> cur(p, 0);
  std::function<void(int)> rec = [&](int j) {
    if (j == p) {
      if (std::accumulate(cur.begin(), cur.end(), 0) > 0) out.push_back(MultiIndex::from_exponents(cur));
      return;
    }
    for (int e = 0; e <= k[j]; ++e) {
      cur[j] = e;
      rec(j + 1);
    }
    cur[j] = 0;
  };
  rec(0);
  return out;
}

/// RREF with `first` columns eliminated; rows whose pivot lies in `keep`,
/// restricted to `keep`.
QMatrix eliminate(const QMatrix& rows, const std::vector<int>& first, const std::vector<int>& keep) {
  QMatrix m;
  for (const auto& r : rows) {
    QVec v;
    v.reserve(first.size() + keep.size());
    for (int c : first) v.push_back(r[c]);
    for (int c : keep) v.push_back(r[c]);
    m.push_back(std::move(v));
  }
  const int nf = static_cast<int>(first.size());
  const int nc = nf + static_cast<int>(keep.size());
  QMatrix out;
  if (m.empty() || nc == 0) return out;
  Echelon e = row_echelon(m, nc);
  for (int r = 0; r < e.rank(); ++r)
    if (e.pivots[r] >= nf) out.emplace_back(e.rows[r].begin() + nf, e.rows[r].end());
  return out;
}

QMatrix rref(const QMatrix& m, int ncols) {
  if (m.empty()) return {};
  Echelon e = row_echelon(m, ncols);
  QMatrix out(e.rows.begin(), e.rows.begin() + e.rank());
  return out;
}

}  // namespace

// ---- symbolic normal-form system -------------------------------------------

Expr nf_identity(const Expr& e, int p) {
  return substitute(e, [&](const Var& v) -> std::optional<Expr> {
    if (v.kind == VarKind::Jet) {
      if (v.dep > p) return sym(sec_var(v.dep - p, v.idx));
      if (v.idx.empty()) return sym(base_var(v.dep));
      if (v.idx.order() == 1 && v.idx.entries()[0] == v.dep) return cst(1);
      return cst(0);
    }
    if (v.kind == VarKind::Tgt) return sym(sec_var(v.dep, v.idx));
    return std::nullopt;
  });
}

NormalFormSystem build_nf_system(const PseudoGroupSpec& g, const ReducedSystem& red, const JetPoint& section) {
  const int P = g.p, Qn = g.q, n = red.order;
  NormalFormSystem out;
  out.p = P;
  out.q = Qn;
  out.order = n;

  JetSpace ns;
  ns.p = P;
  ns.m = P + Qn;
  ns.q_tgt = Qn;
  ns.tgt_xdeps = iota_deps(P);
  const Names& rn = g.reduced_names;
  ns.names.base = rn.base;
  ns.names.jet.assign(rn.jet.begin(), rn.jet.begin() + P);
  ns.names.jet.insert(ns.names.jet.end(), rn.sec.begin(), rn.sec.end());
  ns.names.tgt.assign(rn.jet.begin() + P, rn.jet.end());
  ns.names.tgt_index.assign(rn.jet.begin(), rn.jet.begin() + P);
  std::vector<int> dep_order = g.reduced_order.dep_order();
  out.system = DifferentialSystem(ns, g.reduced_order);

  // chain rule expressions for Ū^α_K
  for (int a = 1; a <= Qn; ++a) {
    out.chain[jet_var(P + a)] = sym(tgt_var(a));
    for (int k = 1; k <= n; ++k)
      for (const auto& K : all_of_order(P, k)) {
        std::vector<int> e = K.entries();
        int last = e.back();
        e.pop_back();
        out.chain[jet_var(P + a, K)] = total_derivative(out.chain.at(jet_var(P + a, MultiIndex(e))), last, ns);
      }
  }
  auto to_nf = [&](const Expr& e) {
    return substitute(e, [&](const Var& v) -> std::optional<Expr> {
      if (v.kind == VarKind::Jet && v.dep > P) return out.chain.at(v);
      if (v.kind == VarKind::Sec) return sym(jet_var(P + v.dep, v.idx));
      return std::nullopt;
    });
  };
  auto identity_value = [&](const Expr& e) -> std::optional<Q> {
    try {
      return eval<Q>(nf_identity(e, P), [&](const Var& v) { return section(v); });
    } catch (const MathError&) {
      return std::nullopt;
    }
  };

  std::map<Var, Expr> sol;
  std::vector<Var> leaders;
  auto apply = [&](const Expr& e) {
    if (sol.empty()) return e;
    return substitute(e, sol);
  };
  RationalSampler rng(section.seed() + 101);
  for (const auto& eq : red.system.equations()) {
    Expr res = apply(to_nf(sym(eq.lhs))) - apply(to_nf(eq.rhs));
    if (is_zero(res) || semantically_equal(res, cst(0), rng, 3)) continue;
    std::vector<Var> cands;
    if (eq.lhs.dep <= P) {
      cands.push_back(eq.lhs);
    } else {
      cands.push_back(jet_var(eq.lhs.dep, eq.lhs.idx));  // u^α_K
    }
    std::vector<Var> unknowns;
    for (const auto& v : free_vars(res))
      if (v.kind == VarKind::Jet) unknowns.push_back(v);
    std::stable_sort(unknowns.begin(), unknowns.end(), [&](const Var& x, const Var& y) {
      if (x.order() != y.order()) return x.order() > y.order();
      return g.reduced_order.before({x.dep, x.idx}, {y.dep, y.idx});
    });
    cands.insert(cands.end(), unknowns.begin(), unknowns.end());
    bool solved = false;
    for (const auto& v : cands) {
      if (!free_vars(res).count(v)) continue;
      Expr c = partial(res, v);
      if (mentions(c, [&](const Var& w) { return w == v; })) continue;
      auto cv = identity_value(c);
      if (!cv || *cv == 0) continue;
      Expr rest = substitute(res, std::map<Var, Expr>{{v, cst(0)}});
      Expr val = -rest / c;
      for (auto& [w, s] : sol) s = substitute(s, std::map<Var, Expr>{{v, val}});
      sol[v] = val;
      leaders.push_back(v);
      solved = true;
      break;
    }
    if (!solved)
      throw MathError("normal form equation cannot be solved at the identity: " + to_string(res, ns.names) + " = 0");
  }
  for (const auto& v : leaders) out.system.add(v, sol.at(v));
  return out;
}

DifferentialSystem linearize_nf(const NormalFormSystem& nf) {
  const int P = nf.p, Qn = nf.q;
  JetSpace ls;
  ls.p = P;
  ls.m = P + Qn;
  ls.q_sec = Qn;
  ls.names.base = nf.system.space.names.base;
  static const std::vector<std::string> xi_names{"xi", "eta", "zeta", "theta"};
  static const std::vector<std::string> psi_names{"psi", "gamma", "chi", "omega"};
  for (int i = 0; i < P; ++i) ls.names.jet.push_back(i < 4 ? xi_names[i] : "xi" + std::to_string(i + 1));
  for (int a = 0; a < Qn; ++a) ls.names.jet.push_back(a < 4 ? psi_names[a] : "psi" + std::to_string(a + 1));
  ls.names.sec.assign(nf.system.space.names.jet.begin() + P, nf.system.space.names.jet.end());
  DifferentialSystem lin(ls, nf.system.term_order);
  for (const auto& e : nf.system.equations()) {
    std::vector<Expr> terms;
    for (const auto& w : free_vars(e.rhs)) {
      if (w.kind != VarKind::Jet) continue;
      Expr c = nf_identity(partial(e.rhs, w), P);
      if (!is_zero(c)) terms.push_back(c * sym(w));
    }
    lin.add(e.lhs, add(std::move(terms)));
  }
  return lin;
}

// ---- pointwise linearization -------------------------------------------------

int LinearizedNF::column(const LinearColumn& c) const {
  auto it = std::find(cols.begin(), cols.end(), c);
  if (it == cols.end()) return -1;
  return static_cast<int>(it - cols.begin());
}

std::vector<int> LinearizedNF::columns_where(const std::function<bool(const LinearColumn&)>& pred) const {
  std::vector<int> out;
  for (std::size_t c = 0; c < cols.size(); ++c)
    if (pred(cols[c])) out.push_back(static_cast<int>(c));
  return out;
}

namespace {

LinearizedNF empty_linearized(const PseudoGroupSpec& g, int n) {
  LinearizedNF out;
  out.p = g.p;
  out.q = g.q;
  out.order = n;
  for (int k = 0; k <= n; ++k)
    for (const auto& c : g.reduced_order.columns(k, iota_deps(g.p))) out.cols.push_back({true, c.dep, c.index});
  for (int k = 0; k <= n; ++k)
    for (const auto& c : g.reduced_order.columns(k, iota_deps(g.q))) out.cols.push_back({false, c.dep, c.index});
  return out;
}

}  // namespace

LinearizedNF linearized_rows(const PseudoGroupSpec& g, const JetPoint& section, int n) {
  const int P = g.p;
  ReducedJacobian jac = reduced_jacobian(g, section, n);
  LinearizedNF out = empty_linearized(g, n);
  std::map<LinearColumn, int> index;
  for (std::size_t c = 0; c < out.cols.size(); ++c) index[out.cols[c]] = static_cast<int>(c);

  QMatrix A;
  std::vector<IndexedCoordinate> coords;
  for (int k = 0; k <= n; ++k)
    for (std::size_t r = 0; r < jac.cols[k].size(); ++r) {
      A.push_back(jac.rows[k][r]);
      coords.push_back(jac.cols[k][r]);
    }
  QMatrix ann;
  if (jac.params.empty()) {
    for (std::size_t r = 0; r < coords.size(); ++r) {
      QVec e(coords.size(), Q(0));
      e[r] = 1;
      ann.push_back(e);
    }
  } else {
    ann = left_nullspace(A);
  }

  // φ^α_K -> Σ_i Σ_{∅≠L⊆K} C(K,L) u^α_{(K-L)+i} ξ^i_L - ψ^α_K
  std::map<IndexedCoordinate, std::vector<std::pair<int, Q>>> phi;
  for (const auto& c : coords) {
    if (c.dep <= P) continue;
    int a = c.dep - P;
    std::vector<std::pair<int, Q>> terms;
    terms.push_back({index.at({false, a, c.index}), Q(-1)});
    for (const auto& L : sub_indices(c.index, P)) {
      MultiIndex rest = *c.index.minus(L);
      Q bin = multi_binomial(c.index, L, P);
      for (int i = 1; i <= P; ++i) {
        Q u = section(sec_var(a, rest.with(i)));
        if (u != 0) terms.push_back({index.at({true, i, L}), bin * u});
      }
    }
    phi[c] = std::move(terms);
  }
  for (const auto& y : ann) {
    QVec row(out.cols.size(), Q(0));
    for (std::size_t r = 0; r < coords.size(); ++r) {
      if (y[r] == 0) continue;
      const auto& c = coords[r];
      if (c.dep <= P) {
        row[index.at({true, c.dep, c.index})] += y[r];
      } else {
        for (const auto& [col, v] : phi.at(c)) row[col] += y[r] * v;
      }
    }
    out.rows.push_back(std::move(row));
  }
  return out;
}

LinearizedNF linear_rows(const DifferentialSystem& lin, const PseudoGroupSpec& g, const JetPoint& section, int n) {
  const int P = g.p;
  LinearizedNF out = empty_linearized(g, n);
  DifferentialSystem full = lin.order() < n ? lin.complete(n) : lin;
  auto col_of = [&](const Var& v) {
    bool xi = v.dep <= P;
    return out.column({xi, xi ? v.dep : v.dep - P, v.idx});
  };
  for (const auto& e : full.equations()) {
    if (e.lhs.order() > n) continue;
    QVec row(out.cols.size(), Q(0));
    Expr res = e.residual();
    bool ok = true;
    for (const auto& w : free_vars(res)) {
      if (w.kind != VarKind::Jet) continue;
      int c = col_of(w);
      if (c < 0) {
        ok = false;
        break;
      }
      row[c] += eval<Q>(partial(res, w), [&](const Var& v) { return section(v); });
    }
    if (ok) out.rows.push_back(std::move(row));
  }
  return out;
}

std::vector<LinearColumn> psi_columns(const LinearizedNF& lin, int k) {
  std::vector<LinearColumn> out;
  for (const auto& c : lin.cols)
    if (!c.xi && c.order() == k) out.push_back(c);
  return out;
}

namespace {

/// rows of the order <= k subsystem over the order <= k columns of lin
std::pair<QMatrix, std::vector<int>> subsystem(const LinearizedNF& lin, int k) {
  auto high = lin.columns_where([&](const LinearColumn& c) { return c.order() > k; });
  auto low = lin.columns_where([&](const LinearColumn& c) { return c.order() <= k; });
  return {eliminate(lin.rows, high, low), low};
}

}  // namespace

QMatrix vertical_symbol(const LinearizedNF& lin, int k) {
  auto [rows, low] = subsystem(lin, k);
  // positions within `low`
  std::vector<int> xi_k, psi_k;
  for (std::size_t j = 0; j < low.size(); ++j) {
    const auto& c = lin.cols[low[j]];
    if (c.order() != k) continue;
    (c.xi ? xi_k : psi_k).push_back(static_cast<int>(j));
  }
  return eliminate(rows, xi_k, psi_k);
}

QMatrix prolonged_annihilator(const LinearizedNF& lin) {
  auto xi_hi = lin.columns_where([](const LinearColumn& c) { return c.xi && c.order() >= 1; });
  auto rest = lin.columns_where([](const LinearColumn& c) { return !(c.xi && c.order() >= 1); });
  return eliminate(lin.rows, xi_hi, rest);
}

QMatrix annihilator_symbol(const LinearizedNF& lin, int k) {
  auto [rows, low] = subsystem(lin, k);
  std::vector<int> xi_hi, rest;
  for (std::size_t j = 0; j < low.size(); ++j) {
    const auto& c = lin.cols[low[j]];
    ((c.xi && c.order() >= 1) ? xi_hi : rest).push_back(static_cast<int>(j));
  }
  QMatrix z = eliminate(rows, xi_hi, rest);
  std::vector<int> psi_k;
  for (std::size_t j = 0; j < rest.size(); ++j) {
    const auto& c = lin.cols[low[rest[j]]];
    if (!c.xi && c.order() == k) psi_k.push_back(static_cast<int>(j));
  }
  QMatrix proj;
  for (const auto& r : z) {
    QVec v;
    for (int j : psi_k) v.push_back(r[j]);
    proj.push_back(std::move(v));
  }
  return rref(proj, static_cast<int>(psi_k.size()));
}

bool linearized_free(const LinearizedNF& lin) {
  auto xi = lin.columns_where([](const LinearColumn& c) { return c.xi; });
  QMatrix r;
  for (const auto& row : lin.rows) {
    QVec v;
    for (int c : xi) v.push_back(row[c]);
    r.push_back(std::move(v));
  }
  int nx = static_cast<int>(xi.size());
  QMatrix nul = r.empty() ? QMatrix{} : nullspace(r, nx);
  if (r.empty() || (nul.empty() && rank(r, nx) < nx)) {
    for (int c = 0; c < nx; ++c) {
      QVec e(nx, Q(0));
      e[c] = 1;
      nul.push_back(e);
    }
  }
  for (const auto& v : nul)
    for (int j = 0; j < nx; ++j)
      if (v[j] != 0 && lin.cols[xi[j]].order() >= 1) return false;
  return true;
}

std::optional<int> freeness_order(const PseudoGroupSpec& g, const JetPoint& section, int max_order) {
  for (int n = 1; n <= max_order; ++n)
    if (linearized_free(linearized_rows(g, section, n))) return n;
  return std::nullopt;
}

bool CompatibilityReport::ok() const {
  return std::all_of(equal.begin(), equal.end(), [](bool b) { return b; });
}

CompatibilityReport compatibility_check(const PseudoGroupSpec& g, const JetPoint& section, int lo, int hi) {
  CompatibilityReport out;
  for (int k = lo; k <= hi; ++k) {
    LinearizedNF lin = linearized_rows(g, section, k);
    QMatrix psi = vertical_symbol(lin, k), ups = annihilator_symbol(lin, k);
    int nc = static_cast<int>(psi_columns(lin, k).size());
    out.orders.push_back(k);
    out.equal.push_back(same_row_space(psi, ups, nc));
    out.psi_in_upsilon.push_back(row_space_within(psi, ups, nc));
  }
  return out;
}

// ---- cross-sections -------------------------------------------------------------

bool NormalizationFamily::contains(int d, const MultiIndex& J, int p) const {
  if (d != dep) return false;
  auto e = J.exponents(p);
  for (int i = 0; i < p; ++i) {
    const auto& [lo, hi] = bounds.at(i);
    if (e[i] < lo) return false;
    if (hi && e[i] > *hi) return false;
  }
  return true;
}

bool CrossSection::contains(int dep, const MultiIndex& J) const {
  if (values.count({dep, J})) return true;
  return std::any_of(families.begin(), families.end(), [&](const auto& f) { return f.contains(dep, J, p); });
}

Q CrossSection::value(int dep, const MultiIndex& J) const {
  auto it = values.find({dep, J});
  if (it != values.end()) return it->second;
  for (const auto& f : families)
    if (f.contains(dep, J, p)) return f.value;
  throw InputError("not a cross-section coordinate");
}

std::vector<IndexedCoordinate> CrossSection::indices(int k) const {
  std::vector<IndexedCoordinate> out;
  for (int a = 1; a <= q; ++a)
    for (const auto& J : all_of_order(p, k))
      if (contains(a, J)) out.push_back({a, J});
  return out;
}

int CrossSection::count_upto(int n) const {
  int c = static_cast<int>(base.size());
  for (int k = 0; k <= n; ++k) c += static_cast<int>(indices(k).size());
  return c;
}

SectionJet CrossSection::sample(int order, const JetPoint& fill) const {
  std::vector<QSeries> ser;
  for (int a = 1; a <= q; ++a) {
    QSeries s(p, order);
    const auto& tab = s.table();
    for (int m = 0; m < tab.size(); ++m) {
      MultiIndex J = MultiIndex::from_exponents(tab.exps[m]);
      Q v = contains(a, J) ? value(a, J) : fill(sec_var(a, J));
      s[m] = v * inv_factorial(J, p);
    }
    ser.push_back(s);
  }
  return SectionJet::from_series(base, ser);
}

CrossSection cross_section_from_json(const nlohmann::json& j, int p, int q, const Names& names) {
  auto q_of = [](const nlohmann::json& v) {
    if (v.is_string()) return parse_q(v.get<std::string>());
    if (v.is_number_integer()) return Q(v.get<long>());
    throw InputError("cross-section value must be a string or integer");
  };
  try {
    CrossSection cs;
    cs.p = p;
    cs.q = q;
    for (const auto& b : j.at("base")) cs.base.push_back(q_of(b));
    if (static_cast<int>(cs.base.size()) != p) throw InputError("cross-section base needs one value per variable");
    for (const auto& f : j.value("families", nlohmann::json::array())) {
      NormalizationFamily fam;
      fam.dep = f.at("dep").get<int>();
      for (const auto& b : f.at("exponents")) {
        int lo = b.at(0).get<int>();
        std::optional<int> hi;
        if (!b.at(1).is_null()) hi = b.at(1).get<int>();
        fam.bounds.push_back({lo, hi});
      }
      if (static_cast<int>(fam.bounds.size()) != p) throw InputError("family needs bounds for every variable");
      fam.value = f.contains("value") ? q_of(f["value"]) : Q(0);
      cs.families.push_back(fam);
    }
    for (const auto& v : j.value("normalizations", nlohmann::json::array())) {
      IndexedCoordinate c;
      if (v.contains("jet")) {
        Names sn;
        sn.base = names.base;
        sn.sec = names.sec;
        Var var = parse_var(v["jet"].get<std::string>(), sn);
        if (var.kind != VarKind::Sec) throw InputError("normalization must name a section jet");
        c = {var.dep, var.idx};
      } else {
        c = v.get<IndexedCoordinate>();
      }
      cs.values[c] = v.contains("value") ? q_of(v["value"]) : Q(0);
    }
    return cs;
  } catch (const nlohmann::json::exception& e) {
    throw InputError(std::string("cross-section: ") + e.what());
  }
}

nlohmann::json cross_section_to_json(const CrossSection& cs) {
  nlohmann::json j;
  j["base"] = nlohmann::json::array();
  for (const auto& b : cs.base) j["base"].push_back(q_str(b));
  j["families"] = nlohmann::json::array();
  for (const auto& f : cs.families) {
    nlohmann::json b = nlohmann::json::array();
    for (const auto& [lo, hi] : f.bounds) b.push_back({lo, hi ? nlohmann::json(*hi) : nlohmann::json()});
    j["families"].push_back({{"dep", f.dep}, {"exponents", b}, {"value", q_str(f.value)}});
  }
  j["normalizations"] = nlohmann::json::array();
  for (const auto& [c, v] : cs.values) j["normalizations"].push_back({{"dep", c.dep}, {"index", c.index}, {"value", q_str(v)}});
  return j;
}

// ---- frame engine ------------------------------------------------------------------

namespace {

template <class T>
T target_jet(const std::vector<TruncatedSeries<T>>& s, int a, const MultiIndex& K) {
  return s.at(a - 1).jet(K);
}

template <class T>
std::vector<TruncatedSeries<T>> target_series(const SectionJet& t, int p, int q, int N) {
  std::vector<TruncatedSeries<T>> out;
  for (int a = 1; a <= q; ++a) {
    TruncatedSeries<T> s(p, N);
    const auto& tab = s.table();
    for (int m = 0; m < tab.size(); ++m) {
      MultiIndex J = MultiIndex::from_exponents(tab.exps[m]);
      Q v = 0;
      if (static_cast<int>(t.series.size()) >= a && J.order() <= t.series[a - 1].order()) {
        v = t.series[a - 1][t.series[a - 1].table().index.at(tab.exps[m])];
      } else {
        auto it = t.jets.find({a, J});
        if (it != t.jets.end()) v = it->second * inv_factorial(J, p);
      }
      s[m] = RingTraits<T>::from_q(v);
    }
    out.push_back(s);
  }
  return out;
}

template <class T>
bool small(const T& v) {
  if constexpr (std::is_same_v<T, Q>) {
    return v == 0;
  } else {
    using std::abs;
    return abs(v) < T(1e-28);
  }
}

template <class T>
struct FrameEngine {
  using D = Dual<T>;
  using DS = TruncatedSeries<D>;
  const PseudoGroupSpec& g;
  const FrameSpec& spec;
  const CrossSection& cs;
  int P, Qn, N;
  FormalSolver<D> solver;
  std::vector<T> x0, u0;
  std::vector<TruncatedSeries<T>> tser;
  std::vector<DS> dser;

  FrameEngine(const PseudoGroupSpec& g_, const FrameSpec& s_, const CrossSection& c_, const SectionJet& target, int N_)
      : g(g_), spec(s_), cs(c_), P(g_.p), Qn(g_.q), N(N_), solver(g_.system, g_.nstar) {
    for (int i = 0; i < P; ++i) x0.push_back(RingTraits<T>::from_q(i < static_cast<int>(target.base.size()) ? target.base[i] : Q(0)));
    tser = target_series<T>(target, P, Qn, N);
    for (const auto& s : tser) {
      u0.push_back(s[0]);
      DS d(P, N);
      for (std::size_t m = 0; m < s.size(); ++m) d[m] = D(s[m]);
      dser.push_back(d);
    }
  }

  T identity_value(const Var& v) const {
    if (v.idx.empty()) return v.dep <= P ? x0[v.dep - 1] : u0[v.dep - P - 1];
    if (v.idx.order() == 1 && v.idx.entries()[0] == v.dep) return RingTraits<T>::from_q(Q(1));
    return RingTraits<T>::from_q(Q(0));
  }

  struct Eval {
    std::vector<D> base;
    std::vector<DS> lifted;
    std::vector<DS> transformed;
  };

  Eval run(int k, const std::map<Var, T>& known, const std::vector<Var>& seeded, const std::vector<T>& vals) const {
    std::map<Var, std::size_t> seed_of;
    for (std::size_t s = 0; s < seeded.size(); ++s) seed_of[seeded[s]] = s;
    auto given = [&](const Var& v) -> D {
      switch (v.kind) {
        case VarKind::Base:
          return D(v.dep <= P ? x0[v.dep - 1] : u0[v.dep - P - 1]);
        case VarKind::Jet: {
          auto it = seed_of.find(v);
          if (it != seed_of.end()) return D::seed(vals[it->second], seeded.size(), it->second);
          auto kt = known.find(v);
          if (kt != known.end()) return D(kt->second);
          return D(RingTraits<T>::from_q(Q(0)));
        }
        default:
          throw MathError("frame: unsupported variable in the determining system");
      }
    };
    auto values = solver.solve(k, given);
    std::function<D(int, const MultiIndex&)> gjet = [&](int a, const MultiIndex& B) -> D {
      auto it = values.find(jet_var(a, B));
      if (it == values.end()) return D(RingTraits<T>::from_q(Q(0)));
      return it->second;
    };
    std::vector<DS> sec;
    for (const auto& s : dser) sec.push_back(s.truncated(k));
    Eval ev;
    ev.lifted = lifted_series<D>(P, Qn, k, gjet, sec);
    auto [base, tr] = transformed_section<D>(P, Qn, ev.lifted);
    ev.base = base;
    ev.transformed = tr;
    return ev;
  }

  T closed_value(const Expr& e) const {
    return eval<T>(e, [&](const Var& v) -> T {
      if (v.kind == VarKind::Base) return x0.at(v.dep - 1);
      if (v.kind == VarKind::Sec) return target_jet(tser, v.dep, v.idx);
      throw InputError("closed-form frame may only use base and section variables");
    });
  }

  std::vector<D> residuals(int k, const Eval& ev) const {
    std::vector<D> r;
    bool closed = k <= spec.nf && std::any_of(spec.closed_forms.begin(), spec.closed_forms.end(),
                                                [&](const auto& kv) { return kv.first.order() == k; });
    if (closed) {
      for (const auto& [R, e] : spec.closed_forms)
        if (R.order() == k) r.push_back(ev.lifted.at(R.dep - 1).jet(R.idx) - D(closed_value(e)));
      return r;
    }
    if (k == 0)
      for (int i = 0; i < static_cast<int>(cs.base.size()); ++i) r.push_back(ev.base[i] - D(RingTraits<T>::from_q(cs.base[i])));
    for (const auto& c : cs.indices(k))
      r.push_back(ev.transformed.at(c.dep - 1).jet(c.index) - D(RingTraits<T>::from_q(cs.value(c.dep, c.index))));
    return r;
  }

  std::map<Var, T> solve(FrameSolution& fs) const {
    std::map<Var, T> known;
    auto params = solver.parametric(N);
    for (int k = 0; k <= N; ++k) {
      std::vector<Var> pk;
      for (const auto& v : params)
        if (v.order() == k) pk.push_back(v);
      std::vector<T> vals;
      for (const auto& v : pk) vals.push_back(identity_value(v));
      bool done = false;
      for (int it = 0; it < 60 && !done; ++it) {
        Eval ev = run(k, known, pk, vals);
        auto r = residuals(k, ev);
        if (r.size() != pk.size())
          throw MathError("order " + std::to_string(k) + ": " + std::to_string(r.size()) + " normalizations for " +
                          std::to_string(pk.size()) + " parametric group jets");
        if (std::all_of(r.begin(), r.end(), [](const D& x) { return small(x.v); })) {
          done = true;
          break;
        }
        std::vector<std::vector<T>> A(r.size(), std::vector<T>(pk.size()));
        std::vector<T> b(r.size());
        for (std::size_t i = 0; i < r.size(); ++i) {
          for (std::size_t j = 0; j < pk.size(); ++j) A[i][j] = r[i].grad(j);
          b[i] = -r[i].v;
        }
        auto d = solve_dense(A, b);
        for (std::size_t j = 0; j < pk.size(); ++j) vals[j] = vals[j] + d[j];
      }
      if (!done) throw MathError("frame normalization did not converge at order " + std::to_string(k));
      for (std::size_t j = 0; j < pk.size(); ++j) known[pk[j]] = vals[j];
    }
    (void)fs;
    return known;
  }
};

template <class T>
Q to_q_value(const T& v) {
  if constexpr (std::is_same_v<T, Q>) {
    return v;
  } else {
    return Q(static_cast<double>(v));
  }
}

template <class T>
long double to_ld(const T& v) {
  if constexpr (std::is_same_v<T, Q>) {
    return RingTraits<long double>::from_q(v);
  } else {
    return static_cast<long double>(v);
  }
}

template <class T>
std::pair<FrameSolution, NormalFormSeries> solve_frame_impl(const PseudoGroupSpec& g, const FrameSpec& spec,
                                                            const CrossSection& cs, const SectionJet& target, int N) {
  FrameEngine<T> eng(g, spec, cs, target, N);
  FrameSolution fs;
  fs.exact = std::is_same_v<T, Q>;
  fs.target = target;
  fs.order = N;
  auto known = eng.solve(fs);
  for (const auto& [v, x] : known) {
    if (fs.exact) fs.params[v] = to_q_value(x);
    fs.approx[v] = to_ld(x);
  }
  auto ev = eng.run(N, known, {}, {});
  for (int k = 0; k <= std::min(spec.nf, N); ++k)
    for (int a = 1; a <= g.p + g.q; ++a)
      for (const auto& J : all_of_order(g.p, k))
        if (fs.exact) fs.reduced[jet_var(a, J)] = to_q_value(ev.lifted[a - 1].jet(J).v);
  if (fs.exact)
    for (int i = 0; i < g.p; ++i) {
      QSeries s(g.p, N);
      for (std::size_t m = 0; m < s.size(); ++m) s[m] = to_q_value(ev.lifted[i][m].v);
      fs.base_map.push_back(s);
    }

  NormalFormSeries nf;
  nf.p = g.p;
  nf.q = g.q;
  nf.order = N;
  nf.exact = fs.exact;
  for (int i = 0; i < static_cast<int>(cs.base.size()); ++i) {
    T b = ev.base[i].v;
    if (!small(T(b - RingTraits<T>::from_q(cs.base[i])))) throw MathError("frame misses the cross-section base point");
  }
  std::string bad;
  for (int k = 0; k <= N; ++k)
    for (int a = 1; a <= g.q; ++a)
      for (const auto& J : all_of_order(g.p, k)) {
        NormalFormSlot s;
        s.dep = a;
        s.index = J;
        s.phantom = cs.contains(a, J);
        T v = ev.transformed[a - 1].jet(J).v;
        s.approx = to_ld(v);
        if (fs.exact) s.value = to_q_value(v);
        if (s.phantom) {
          T c = RingTraits<T>::from_q(cs.value(a, J));
          if (!small(T(v - c)))
            bad += " " + std::to_string(a) + ":" + J.str({}) + "=" + std::to_string(static_cast<double>(to_ld(v)));
        }
        nf.slots.push_back(std::move(s));
      }
  if (!bad.empty()) throw MathError("phantom slots do not match the cross-section:" + bad);
  if (fs.exact)
    for (int a = 0; a < g.q; ++a) {
      QSeries s(g.p, N);
      for (std::size_t m = 0; m < s.size(); ++m) s[m] = to_q_value(ev.transformed[a][m].v);
      nf.series.push_back(s);
    }
  return {fs, nf};
}

}  // namespace

const NormalFormSlot* NormalFormSeries::find(int dep, const MultiIndex& J) const {
  for (const auto& s : slots)
    if (s.dep == dep && s.index == J) return &s;
  return nullptr;
}

std::string NormalFormSeries::to_csv(const Names& names) const {
  std::ostringstream os;
  os << "dep,index,kind,value\n";
  for (const auto& s : slots) {
    std::string dep = s.dep - 1 < static_cast<int>(names.sec.size()) ? names.sec[s.dep - 1] : std::to_string(s.dep);
    os << dep << "," << (s.index.empty() ? std::string("-") : s.index.str(names.base)) << ","
       << (s.phantom ? "phantom" : "invariant") << ",";
    if (exact)
      os << q_str(s.value);
    else
      os << static_cast<double>(s.approx);
    os << "\n";
  }
  return os.str();
}

nlohmann::json NormalFormSeries::to_json(const Names& names) const {
  nlohmann::json j;
  j["exact"] = exact;
  j["order"] = order;
  j["slots"] = nlohmann::json::array();
  for (const auto& s : slots) {
    nlohmann::json e = {{"dep", s.dep},
                        {"index", s.index},
                        {"name", names.var(sec_var(s.dep, s.index))},
                        {"kind", s.phantom ? "phantom" : "invariant"}};
    if (exact)
      e["value"] = q_str(s.value);
    else
      e["value"] = static_cast<double>(s.approx);
    j["slots"].push_back(e);
  }
  if (exact) {
    j["series"] = nlohmann::json::array();
    for (const auto& s : series) j["series"].push_back(series_to_json(s));
  }
  return j;
}

std::pair<FrameSolution, NormalFormSeries> solve_frame(const PseudoGroupSpec& g, const FrameSpec& spec,
                                                       const CrossSection& cs, const SectionJet& target, int N) {
  try {
    return solve_frame_impl<Q>(g, spec, cs, target, N);
  } catch (const InexactSqrt&) {
    return solve_frame_impl<Quad>(g, spec, cs, target, N);
  }
}

// ---- well-posedness -----------------------------------------------------------------

WellPosedVerdict wellposed_check(const PseudoGroupSpec& g, const CrossSection& cs, int nf, int span,
                                 std::uint64_t seed) {
  WellPosedVerdict out;
  const int P = g.p, Qn = g.q;
  int d = g.dim(nf);
  int c = cs.count_upto(nf);
  if (c != d) {
    out.count_ok = false;
    out.reason = "normalizations of order <= " + std::to_string(nf) + ": " + std::to_string(c) + ", expected " +
                 std::to_string(d);
  }

  // normalization Jacobian at the identity frame over a jet in the cross-section
  const int hi = nf + span;
  JetPoint fill(seed * 131 + 7);
  SectionJet target = cs.sample(hi, fill);
  FrameSpec none;
  FrameEngine<Q> eng(g, none, cs, target, hi);
  auto params = eng.solver.parametric(hi);
  std::map<Var, Q> known;
  for (const auto& v : params) known[v] = eng.identity_value(v);
  for (int k = nf + 1; k <= hi; ++k) {
    std::vector<Var> pk;
    std::vector<Q> vals;
    for (const auto& v : params)
      if (v.order() == k) {
        pk.push_back(v);
        vals.push_back(known.at(v));
      }
    auto ev = eng.run(k, known, pk, vals);
    QMatrix A;
    for (const auto& ic : cs.indices(k)) {
      auto x = ev.transformed.at(ic.dep - 1).jet(ic.index);
      QVec row(pk.size());
      for (std::size_t j = 0; j < pk.size(); ++j) row[j] = x.grad(j);
      A.push_back(row);
    }
    int r = A.empty() ? 0 : rank(A, static_cast<int>(pk.size()));
    out.orders.push_back(k);
    out.ranks.push_back(r);
    out.params.push_back(static_cast<int>(pk.size()));
    if (r != static_cast<int>(pk.size()) || A.size() != pk.size()) {
      out.rank_ok = false;
      if (out.reason.empty())
        out.reason = "order " + std::to_string(k) + ": normalization Jacobian rank " + std::to_string(r) + " with " +
                     std::to_string(A.size()) + " normalizations and " + std::to_string(pk.size()) + " group jets";
    }
  }

  out.generators = cs.indices(nf + 1);
  out.rees = verify_rees(
      out.generators, [&](const IndexedCoordinate& ic) { return cs.contains(ic.dep, ic.index); }, P, iota_deps(Qn),
      nf + 1, hi);
  if (!out.rees.ok && out.reason.empty()) out.reason = "cross-section indices admit no Rees decomposition";
  return out;
}

SectionJet apply_transformation(int p, int q, const std::vector<Expr>& maps, const SectionJet& target, int N) {
  auto tser = target_series<Q>(target, p, q, N);
  std::vector<QSeries> lifted;
  for (const auto& m : maps) {
    lifted.push_back(eval_series<Q>(m, p, N, [&](const Var& v) -> QSeries {
      if (v.kind != VarKind::Base) throw InputError("group element maps may only use base variables");
      if (v.dep <= p) return QSeries::variable(p, N, v.dep, target.base.at(v.dep - 1));
      return tser.at(v.dep - p - 1);
    }));
  }
  auto [base, ser] = transformed_section<Q>(p, q, lifted);
  return SectionJet::from_series(base, ser);
}

}  // namespace ijets
