#include "ijets/jetcalc.hpp"

#include <random>

namespace ijets {

std::vector<int> JetSpace::deps() const {
  std::vector<int> d;
  for (int a = 1; a <= m; ++a) d.push_back(a);
  return d;
}

Expr StandardRule::d(const Var& v, int i) const {
  switch (v.kind) {
    case VarKind::Base:
      return cst(v.dep == i ? 1 : 0);
    case VarKind::Jet:
    case VarKind::Sec:
      return sym(v.shifted(i));
    case VarKind::Tgt: {
      if (s_.tgt_xdeps.empty()) return cst(0);
      std::vector<Expr> terms;
      for (std::size_t j = 0; j < s_.tgt_xdeps.size(); ++j)
        terms.push_back(sym(v.shifted(static_cast<int>(j) + 1)) * sym(jet_var(s_.tgt_xdeps[j], MultiIndex{i})));
      return add(std::move(terms));
    }
    default:
      return cst(0);
  }
}

Expr LiftedRule::d(const Var& v, int i) const {
  switch (v.kind) {
    case VarKind::Base:
      if (v.dep <= p_) return cst(v.dep == i ? 1 : 0);
      return sym(sec_var(v.dep - p_, MultiIndex{i}));
    case VarKind::Sec:
      return sym(v.shifted(i));
    case VarKind::Jet: {
      std::vector<Expr> terms{sym(v.shifted(i))};
      for (int a = 1; a <= q_; ++a) terms.push_back(sym(sec_var(a, MultiIndex{i})) * sym(v.shifted(p_ + a)));
      return add(std::move(terms));
    }
    default:
      return cst(0);
  }
}

Expr total_derivative(const Expr& e, int i, const JetSpace& s) {
  StandardRule r(s);
  return total_derivative(e, i, r);
}

std::vector<std::vector<Expr>> invert_matrix(std::vector<std::vector<Expr>> a) {
  const std::size_t n = a.size();
  std::vector<std::vector<Expr>> inv(n, std::vector<Expr>(n, cst(0)));
  for (std::size_t i = 0; i < n; ++i) inv[i][i] = cst(1);
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t piv = c;
    while (piv < n && is_zero(a[piv][c])) ++piv;
    if (piv == n) throw MathError("singular Jacobian");
    std::swap(a[piv], a[c]);
    std::swap(inv[piv], inv[c]);
    Expr f = pow(a[c][c], -1);
    for (std::size_t j = 0; j < n; ++j) {
      a[c][j] = a[c][j] * f;
      inv[c][j] = inv[c][j] * f;
    }
    for (std::size_t r = 0; r < n; ++r) {
      if (r == c || is_zero(a[r][c])) continue;
      Expr g = a[r][c];
      for (std::size_t j = 0; j < n; ++j) {
        a[r][j] = a[r][j] - g * a[c][j];
        inv[r][j] = inv[r][j] - g * inv[c][j];
      }
    }
  }
  return inv;
}

Expr implicit_total_derivative(const Expr& e, int i, const std::vector<std::vector<Expr>>& w, const DerivRule& rule) {
  // jac[a][j] = D_j X^a; D_{X^i} = Σ_j (jac^{-1})[j][i] D_j
  std::vector<Expr> terms;
  for (std::size_t j = 0; j < w.size(); ++j) {
    if (is_zero(w[j][i - 1])) continue;
    terms.push_back(w[j][i - 1] * total_derivative(e, static_cast<int>(j) + 1, rule));
  }
  return add(std::move(terms));
}

Expr chain_rule_derivative(const Expr& e, int i, const JetSpace& s) {
  StandardRule r(s);
  return total_derivative(e, i, r);
}

namespace {

class ReducedRule : public DerivRule {
 public:
  Expr d(const Var& v, int i) const override {
    if (v.kind == VarKind::Base) return cst(v.dep == i ? 1 : 0);
    if (v.kind == VarKind::Jet || v.kind == VarKind::Sec) return sym(v.shifted(i));
    return cst(0);
  }
};

}  // namespace

std::map<IndexedCoordinate, Expr> prolong_action(int p, int q, int n,
                                                 const std::function<Expr(const Expr&)>& simplify) {
  ReducedRule rule;
  std::vector<std::vector<Expr>> jac(p, std::vector<Expr>(p));
  for (int a = 1; a <= p; ++a)
    for (int j = 1; j <= p; ++j) jac[a - 1][j - 1] = simplify(sym(jet_var(a, MultiIndex{j})));
  auto w = invert_matrix(jac);
  std::map<IndexedCoordinate, Expr> out;
  for (int al = 1; al <= q; ++al) out[{al, {}}] = simplify(sym(jet_var(p + al)));
  for (int k = 1; k <= n; ++k)
    for (const auto& J : all_of_order(p, k))
      for (int al = 1; al <= q; ++al) {
        // build from the lexicographically smallest parent
        int i = J.entries().back();
        MultiIndex parent = *J.without(i);
        out[{al, J}] = simplify(implicit_total_derivative(out.at({al, parent}), i, w, rule));
      }
  return out;
}

Q JetPoint::operator()(const Var& v) const {
  auto it = fixed_.find(v);
  if (it != fixed_.end()) return it->second;
  std::mt19937_64 g(seed_ * 0x9e3779b97f4a7c15ULL ^ v.hash());
  std::uniform_int_distribution<int> num(1, 19), den(1, 7), sign(0, 1);
  Q r(num(g), den(g));
  r.canonicalize();
  return sign(g) ? r : Q(-r);
}

Q JetPoint::eval(const Expr& e) const {
  return ijets::eval<Q>(e, [this](const Var& v) { return (*this)(v); });
}

SectionJet SectionJet::from_series(std::vector<Q> base, std::vector<QSeries> series) {
  SectionJet s;
  s.base = std::move(base);
  s.series = std::move(series);
  for (std::size_t a = 0; a < s.series.size(); ++a) {
    const auto& ser = s.series[a];
    for (int k = 0; k <= ser.order(); ++k)
      for (const auto& J : all_of_order(ser.nvars(), k)) s.jets[{static_cast<int>(a) + 1, J}] = ser.jet(J);
  }
  return s;
}

Q SectionJet::value(int dep, const MultiIndex& J) const {
  auto it = jets.find({dep, J});
  if (it == jets.end()) throw InputError("section jet u" + std::to_string(dep) + " of order " +
                                         std::to_string(J.order()) + " not provided");
  return it->second;
}

int SectionJet::order() const {
  int o = -1;
  for (const auto& [c, v] : jets) o = std::max(o, c.index.order());
  return o;
}

bool SectionJet::consistent() const {
  for (std::size_t a = 0; a < series.size(); ++a)
    for (const auto& [c, v] : jets)
      if (c.dep == static_cast<int>(a) + 1 && c.index.order() <= series[a].order() && series[a].jet(c.index) != v)
        return false;
  return true;
}

nlohmann::json section_to_json(const SectionJet& s) {
  nlohmann::json base = nlohmann::json::array();
  for (const auto& b : s.base) base.push_back(q_str(b));
  nlohmann::json jets = nlohmann::json::array();
  for (const auto& [c, v] : s.jets) jets.push_back({{"dep", c.dep}, {"index", c.index}, {"value", q_str(v)}});
  return {{"base", base}, {"jets", jets}};
}

SectionJet section_from_json(const nlohmann::json& j, int p) {
  auto q_of = [](const nlohmann::json& v) {
    return v.is_string() ? parse_q(v.get<std::string>()) : Q(v.get<long>());
  };
  SectionJet s;
  if (j.contains("base"))
    for (const auto& b : j.at("base")) s.base.push_back(q_of(b));
  while (static_cast<int>(s.base.size()) < p) s.base.push_back(0);
  if (j.contains("series")) {
    std::vector<QSeries> ser;
    for (const auto& t : j.at("series")) ser.push_back(series_from_json(t));
    auto rest = SectionJet::from_series(s.base, ser);
    s.series = rest.series;
    s.jets = rest.jets;
  }
  if (j.contains("jets"))
    for (const auto& t : j.at("jets")) s.jets[{t.at("dep").get<int>(), t.at("index").get<MultiIndex>()}] = q_of(t.at("value"));
  return s;
}

}  // namespace ijets
