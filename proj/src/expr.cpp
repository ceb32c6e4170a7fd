#include "ijets/expr.hpp"

#include <algorithm>

namespace ijets {

namespace {

std::size_t mix(std::size_t h, std::size_t v) {
  h ^= v + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
  return h;
}

std::size_t hash_q(const Q& v) {
  std::size_t h = 1469598103934665603ULL;
  h = mix(h, mpz_get_ui(v.get_num_mpz_t()));
  h = mix(h, static_cast<std::size_t>(mpz_sgn(v.get_num_mpz_t()) + 7));
  h = mix(h, mpz_get_ui(v.get_den_mpz_t()));
  h = mix(h, mpz_sizeinbase(v.get_num_mpz_t(), 2));
  return h;
}

Expr make(Node n) {
  std::size_t h = mix(0x51ed27u, static_cast<std::size_t>(n.op));
  switch (n.op) {
    case Op::Const:
      h = mix(h, hash_q(n.value));
      break;
    case Op::Sym:
      h = mix(h, n.var.hash());
      break;
    default:
      h = mix(h, static_cast<std::size_t>(n.exponent + 1000));
      for (const auto& a : n.args) h = mix(h, a->h);
  }
  n.h = h;
  return std::make_shared<const Node>(std::move(n));
}

const Expr& zero_expr() {
  static const Expr z = make(Node{Op::Const, Q(0), {}, {}, 0, 0});
  return z;
}
const Expr& one_expr() {
  static const Expr o = make(Node{Op::Const, Q(1), {}, {}, 0, 0});
  return o;
}

// split c*rest
std::pair<Q, Expr> split_coef(const Expr& e) {
  if (e->op == Op::Const) return {e->value, one_expr()};
  if (e->op == Op::Mul && e->args[0]->op == Op::Const) {
    std::vector<Expr> rest(e->args.begin() + 1, e->args.end());
    if (rest.size() == 1) return {e->args[0]->value, rest[0]};
    Node n{Op::Mul, Q(0), {}, std::move(rest), 0, 0};
    return {e->args[0]->value, make(std::move(n))};
  }
  return {Q(1), e};
}

std::pair<Expr, int> split_pow(const Expr& e) {
  if (e->op == Op::Pow) return {e->args[0], e->exponent};
  return {e, 1};
}

struct ExprKeyHash {
  std::size_t operator()(const Expr& e) const { return e->h; }
};
struct ExprKeyEq {
  bool operator()(const Expr& a, const Expr& b) const { return same(a, b); }
};

bool less_expr(const Expr& a, const Expr& b) { return compare(a, b) < 0; }

}  // namespace

std::size_t Var::hash() const {
  std::size_t h = mix(static_cast<std::size_t>(kind) * 131 + 17, static_cast<std::size_t>(dep));
  for (int v : idx.entries()) h = mix(h, static_cast<std::size_t>(v));
  return mix(h, idx.entries().size());
}

Expr cst(const Q& v) {
  if (v == 0) return zero_expr();
  if (v == 1) return one_expr();
  return make(Node{Op::Const, v, {}, {}, 0, 0});
}
Expr cst(long v) { return cst(Q(v)); }

Expr sym(const Var& v) { return make(Node{Op::Sym, Q(0), v, {}, 0, 0}); }

bool is_const(const Expr& e) { return e->op == Op::Const; }
bool is_zero(const Expr& e) { return e->op == Op::Const && e->value == 0; }
bool is_one(const Expr& e) { return e->op == Op::Const && e->value == 1; }

int compare(const Expr& a, const Expr& b) {
  if (a.get() == b.get()) return 0;
  if (a->h != b->h) return a->h < b->h ? -1 : 1;
  if (a->op != b->op) return a->op < b->op ? -1 : 1;
  switch (a->op) {
    case Op::Const:
      return cmp(a->value, b->value) < 0 ? -1 : (a->value == b->value ? 0 : 1);
    case Op::Sym:
      if (a->var == b->var) return 0;
      return a->var < b->var ? -1 : 1;
    default:
      break;
  }
  if (a->exponent != b->exponent) return a->exponent < b->exponent ? -1 : 1;
  if (a->args.size() != b->args.size()) return a->args.size() < b->args.size() ? -1 : 1;
  for (std::size_t k = 0; k < a->args.size(); ++k) {
    int c = compare(a->args[k], b->args[k]);
    if (c != 0) return c;
  }
  return 0;
}

bool same(const Expr& a, const Expr& b) { return compare(a, b) == 0; }

Expr add(std::vector<Expr> terms) {
  Q constant = 0;
  std::vector<std::pair<Expr, Q>> acc;
  std::unordered_map<Expr, std::size_t, ExprKeyHash, ExprKeyEq> slot;
  std::vector<Expr> stack(terms.rbegin(), terms.rend());
  while (!stack.empty()) {
    Expr t = stack.back();
    stack.pop_back();
    if (t->op == Op::Add) {
      for (auto it = t->args.rbegin(); it != t->args.rend(); ++it) stack.push_back(*it);
      continue;
    }
    if (t->op == Op::Const) {
      constant += t->value;
      continue;
    }
    auto [c, core] = split_coef(t);
    auto it = slot.find(core);
    if (it == slot.end()) {
      slot.emplace(core, acc.size());
      acc.emplace_back(core, c);
    } else {
      acc[it->second].second += c;
    }
  }
  std::vector<Expr> out;
  for (auto& [core, c] : acc) {
    if (c == 0) continue;
    if (c == 1)
      out.push_back(core);
    else
      out.push_back(mul({cst(c), core}));
  }
  std::sort(out.begin(), out.end(), less_expr);
  if (constant != 0) out.insert(out.begin(), cst(constant));
  if (out.empty()) return zero_expr();
  if (out.size() == 1) return out[0];
  return make(Node{Op::Add, Q(0), {}, std::move(out), 0, 0});
}

Expr mul(std::vector<Expr> factors) {
  Q constant = 1;
  std::vector<std::pair<Expr, int>> acc;
  std::unordered_map<Expr, std::size_t, ExprKeyHash, ExprKeyEq> slot;
  std::vector<Expr> stack(factors.rbegin(), factors.rend());
  while (!stack.empty()) {
    Expr f = stack.back();
    stack.pop_back();
    if (f->op == Op::Mul) {
      for (auto it = f->args.rbegin(); it != f->args.rend(); ++it) stack.push_back(*it);
      continue;
    }
    if (f->op == Op::Const) {
      constant *= f->value;
      continue;
    }
    auto [b, n] = split_pow(f);
    auto it = slot.find(b);
    if (it == slot.end()) {
      slot.emplace(b, acc.size());
      acc.emplace_back(b, n);
    } else {
      acc[it->second].second += n;
    }
  }
  if (constant == 0) return zero_expr();
  std::vector<Expr> out;
  for (auto& [b, n] : acc) {
    if (n == 0) continue;
    Expr f = pow(b, n);
    if (f->op == Op::Const) {
      constant *= f->value;
      continue;
    }
    if (f->op == Op::Mul) {
      // sqrt(b)^2 collapsing may expose a product; fold it back in
      auto [c, rest] = split_coef(f);
      constant *= c;
      if (rest->op == Op::Mul)
        out.insert(out.end(), rest->args.begin(), rest->args.end());
      else if (!is_one(rest))
        out.push_back(rest);
      continue;
    }
    out.push_back(f);
  }
  if (constant == 0) return zero_expr();
  std::sort(out.begin(), out.end(), less_expr);
  if (out.empty()) return cst(constant);
  if (constant == 1 && out.size() == 1) return out[0];
  if (constant != 1) out.insert(out.begin(), cst(constant));
  return make(Node{Op::Mul, Q(0), {}, std::move(out), 0, 0});
}

Expr pow(const Expr& base, int n) {
  if (n == 0) return one_expr();
  if (n == 1) return base;
  if (base->op == Op::Const) {
    if (base->value == 0) {
      if (n < 0) throw MathError("division by zero");
      return zero_expr();
    }
    Q r = 1;
    Q b = n > 0 ? base->value : Q(1 / base->value);
    for (int k = 0; k < std::abs(n); ++k) r *= b;
    return cst(r);
  }
  if (base->op == Op::Pow) return pow(base->args[0], base->exponent * n);
  if (base->op == Op::Sqrt && n % 2 == 0) return pow(base->args[0], n / 2);
  if (base->op == Op::Mul) {
    std::vector<Expr> fs;
    for (const auto& f : base->args) fs.push_back(pow(f, n));
    return mul(std::move(fs));
  }
  return make(Node{Op::Pow, Q(0), {}, {base}, n, 0});
}

Expr sqrt(const Expr& e) {
  if (e->op == Op::Const) {
    try {
      return cst(q_sqrt(e->value));
    } catch (const InexactSqrt&) {
    }
  }
  return make(Node{Op::Sqrt, Q(0), {}, {e}, 0, 0});
}

Expr operator+(const Expr& a, const Expr& b) { return add({a, b}); }
Expr operator-(const Expr& a, const Expr& b) { return add({a, mul({cst(-1), b})}); }
Expr operator-(const Expr& a) { return mul({cst(-1), a}); }
Expr operator*(const Expr& a, const Expr& b) { return mul({a, b}); }
Expr operator/(const Expr& a, const Expr& b) { return mul({a, pow(b, -1)}); }

std::set<Var> free_vars(const Expr& e) {
  std::set<Var> out;
  std::unordered_map<const Node*, bool> seen;
  std::vector<const Node*> stack{e.get()};
  while (!stack.empty()) {
    const Node* n = stack.back();
    stack.pop_back();
    if (!seen.emplace(n, true).second) continue;
    if (n->op == Op::Sym) out.insert(n->var);
    for (const auto& a : n->args) stack.push_back(a.get());
  }
  return out;
}

bool mentions(const Expr& e, const std::function<bool(const Var&)>& pred) {
  for (const auto& v : free_vars(e))
    if (pred(v)) return true;
  return false;
}

std::size_t node_count(const Expr& e) {
  std::size_t c = 1;
  for (const auto& a : e->args) c += node_count(a);
  return c;
}

namespace {

class Differ {
 public:
  explicit Differ(std::function<Expr(const Var&)> leaf) : leaf_(std::move(leaf)) {}

  Expr operator()(const Expr& e) {
    auto it = memo_.find(e.get());
    if (it != memo_.end()) return it->second;
    Expr r = go(e);
    memo_.emplace(e.get(), r);
    return r;
  }

 private:
  Expr go(const Expr& e) {
    switch (e->op) {
      case Op::Const:
        return zero_expr();
      case Op::Sym:
        return leaf_(e->var);
      case Op::Add: {
        std::vector<Expr> ts;
        for (const auto& a : e->args) ts.push_back((*this)(a));
        return add(std::move(ts));
      }
      case Op::Mul: {
        std::vector<Expr> ts;
        for (std::size_t k = 0; k < e->args.size(); ++k) {
          Expr dk = (*this)(e->args[k]);
          if (is_zero(dk)) continue;
          std::vector<Expr> fs;
          for (std::size_t j = 0; j < e->args.size(); ++j) fs.push_back(j == k ? dk : e->args[j]);
          ts.push_back(mul(std::move(fs)));
        }
        return add(std::move(ts));
      }
      case Op::Pow: {
        Expr db = (*this)(e->args[0]);
        if (is_zero(db)) return zero_expr();
        return mul({cst(e->exponent), pow(e->args[0], e->exponent - 1), db});
      }
      case Op::Sqrt: {
        Expr db = (*this)(e->args[0]);
        if (is_zero(db)) return zero_expr();
        return mul({cst(Q(1, 2)), db, pow(e, -1)});
      }
    }
    throw MathError("bad node");
  }

  std::function<Expr(const Var&)> leaf_;
  std::unordered_map<const Node*, Expr> memo_;
};

class Subst {
 public:
  explicit Subst(const VarMap& f) : f_(f) {}
  Expr operator()(const Expr& e) {
    if (e->op == Op::Const) return e;
    auto it = memo_.find(e.get());
    if (it != memo_.end()) return it->second;
    Expr r;
    if (e->op == Op::Sym) {
      auto s = f_(e->var);
      r = s ? *s : e;
    } else {
      std::vector<Expr> as;
      bool changed = false;
      for (const auto& a : e->args) {
        as.push_back((*this)(a));
        if (as.back().get() != a.get()) changed = true;
      }
      if (!changed)
        r = e;
      else if (e->op == Op::Add)
        r = add(std::move(as));
      else if (e->op == Op::Mul)
        r = mul(std::move(as));
      else if (e->op == Op::Pow)
        r = pow(as[0], e->exponent);
      else
        r = sqrt(as[0]);
    }
    memo_.emplace(e.get(), r);
    return r;
  }

 private:
  const VarMap& f_;
  std::unordered_map<const Node*, Expr> memo_;
};

}  // namespace

Expr partial(const Expr& e, const Var& v) {
  Differ d([&](const Var& w) { return w == v ? one_expr() : zero_expr(); });
  return d(e);
}

Expr substitute(const Expr& e, const VarMap& f) {
  Subst s(f);
  return s(e);
}

Expr substitute(const Expr& e, const std::map<Var, Expr>& m) {
  if (m.empty()) return e;
  VarMap f = [&](const Var& v) -> std::optional<Expr> {
    auto it = m.find(v);
    if (it == m.end()) return std::nullopt;
    return it->second;
  };
  return substitute(e, f);
}

Expr total_derivative(const Expr& e, int i, const DerivRule& rule) {
  Differ d([&](const Var& v) { return rule.d(v, i); });
  return d(e);
}

Expr total_derivative(const Expr& e, const MultiIndex& k, const DerivRule& rule) {
  Expr r = e;
  for (int i : k.entries()) r = total_derivative(r, i, rule);
  return r;
}

const std::vector<std::string>& Names::index_letters(const Var& v) const {
  static const std::vector<std::string> none;
  switch (v.kind) {
    case VarKind::Tgt:
      return tgt_index.empty() ? base : tgt_index;
    case VarKind::Fn:
      return v.dep - 1 < static_cast<int>(fn_index.size()) ? fn_index[v.dep - 1] : none;
    default:
      return base;
  }
}

std::string Names::var(const Var& v) const {
  auto pick = [&](const std::vector<std::string>& names, const char* fallback) {
    if (v.dep >= 1 && v.dep - 1 < static_cast<int>(names.size())) return names[v.dep - 1];
    return std::string(fallback) + std::to_string(v.dep);
  };
  std::string head;
  switch (v.kind) {
    case VarKind::Base: return pick(base, "x");
    case VarKind::Par: return pick(par, "a");
    case VarKind::Jet: head = pick(jet, "Z"); break;
    case VarKind::Sec: head = pick(sec, "u"); break;
    case VarKind::Tgt: head = pick(tgt, "T"); break;
    case VarKind::Fn: head = pick(fn, "f"); break;
  }
  if (v.idx.empty()) return head;
  return head + "_" + v.idx.str(index_letters(v));
}

namespace {

int precedence(const Expr& e) {
  switch (e->op) {
    case Op::Add: return 1;
    case Op::Mul: return 2;
    case Op::Const: return e->value < 0 || e->value.get_den() != 1 ? 2 : 4;
    case Op::Pow: return 3;
    default: return 4;
  }
}

std::string show(const Expr& e, const Names& names);

std::string wrap(const Expr& e, const Names& names, int min_prec) {
  std::string s = show(e, names);
  if (precedence(e) < min_prec) return "(" + s + ")";
  return s;
}

std::string show(const Expr& e, const Names& names) {
  switch (e->op) {
    case Op::Const:
      return e->value.get_str();
    case Op::Sym:
      return names.var(e->var);
    case Op::Add: {
      std::string s;
      for (std::size_t k = 0; k < e->args.size(); ++k) {
        auto [c, core] = split_coef(e->args[k]);
        std::string t;
        if (k > 0 && c < 0) {
          Expr pos = is_one(core) ? cst(Q(-c)) : (c == -1 ? core : mul({cst(Q(-c)), core}));
          s += " - " + wrap(pos, names, 2);
          continue;
        }
        t = wrap(e->args[k], names, 1);
        s += (k ? " + " : "") + t;
      }
      return s;
    }
    case Op::Mul: {
      std::vector<std::string> num, den;
      std::string sign;
      for (const auto& f : e->args) {
        if (f->op == Op::Const) {
          if (f->value == -1) {
            sign = "-";
            continue;
          }
          num.push_back(wrap(f, names, 3));
          continue;
        }
        if (f->op == Op::Pow && f->exponent < 0) {
          Expr inv = pow(f->args[0], -f->exponent);
          den.push_back(wrap(inv, names, 3));
          continue;
        }
        num.push_back(wrap(f, names, 2));
      }
      auto join = [](const std::vector<std::string>& v) {
        std::string s;
        for (std::size_t k = 0; k < v.size(); ++k) s += (k ? "*" : "") + v[k];
        return s;
      };
      std::string s = num.empty() ? "1" : join(num);
      if (!den.empty()) s += "/" + (den.size() > 1 ? "(" + join(den) + ")" : den[0]);
      return sign + s;
    }
    case Op::Pow:
      if (e->exponent < 0) return "1/" + wrap(pow(e->args[0], -e->exponent), names, 3);
      return wrap(e->args[0], names, 4) + "^" + std::to_string(e->exponent);
    case Op::Sqrt:
      return "sqrt(" + show(e->args[0], names) + ")";
  }
  return "?";
}

}  // namespace

std::string to_string(const Expr& e, const Names& names) { return show(e, names); }

Q eval_q(const Expr& e, const Point& pt) {
  return eval<Q>(e, [&](const Var& v) -> Q {
    auto it = pt.find(v);
    if (it == pt.end()) throw InputError("unbound variable in evaluation");
    return it->second;
  });
}

FlaggedValue eval_flagged(const Expr& e, const Point& pt) {
  FlaggedValue out;
  try {
    out.value = eval_q(e, pt);
    out.approx = RingTraits<Quad>::from_q(out.value);
    return out;
  } catch (const InexactSqrt&) {
  }
  out.exact = false;
  out.approx = eval<Quad>(e, [&](const Var& v) -> Quad {
    auto it = pt.find(v);
    if (it == pt.end()) throw InputError("unbound variable in evaluation");
    return RingTraits<Quad>::from_q(it->second);
  });
  return out;
}

bool semantically_equal(const Expr& a, const Expr& b, RationalSampler& rng, int points, const Point& fixed) {
  auto vars = free_vars(a);
  for (const auto& v : free_vars(b)) vars.insert(v);
  int done = 0, attempts = 0;
  while (done < points) {
    if (++attempts > 20 * points) throw MathError("could not find evaluation points");
    Point pt = fixed;
    for (const auto& v : vars)
      if (!pt.count(v)) pt[v] = rng.next();
    try {
      FlaggedValue va = eval_flagged(a, pt), vb = eval_flagged(b, pt);
      if (va.exact && vb.exact) {
        if (va.value != vb.value) return false;
      } else {
        Quad scale = 1 + boost::multiprecision::abs(va.approx);
        if (boost::multiprecision::abs(va.approx - vb.approx) > Quad("1e-25") * scale) return false;
      }
      ++done;
    } catch (const MathError&) {
      // pole or negative radicand at this point; draw another
    }
  }
  return true;
}

}  // namespace ijets
