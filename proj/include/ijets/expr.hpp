#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <unordered_map>
#include <vector>

#include <boost/multiprecision/cpp_bin_float.hpp>

#include "ijets/multiindex.hpp"
#include "ijets/rational.hpp"

namespace ijets {

/// Base: independent (or lifted base) variable number `dep`.
/// Jet: unknown dependent `dep` differentiated by `idx`.
/// Sec: fixed section u^dep_idx.  Tgt: target jet Û^dep_idx.
/// Par: constant parameter.  Fn: derivative idx of a group-law function.
enum class VarKind : std::uint8_t { Base, Jet, Sec, Tgt, Par, Fn };

struct Var {
  VarKind kind = VarKind::Base;
  int dep = 1;
  MultiIndex idx;

  auto operator<=>(const Var&) const = default;
  bool operator==(const Var&) const = default;
  int order() const { return idx.order(); }
  Var shifted(int i) const { return {kind, dep, idx.with(i)}; }
  Var shifted(const MultiIndex& k) const { return {kind, dep, idx.plus(k)}; }
  std::size_t hash() const;
};

inline Var base_var(int i) { return {VarKind::Base, i, {}}; }
inline Var jet_var(int dep, MultiIndex j = {}) { return {VarKind::Jet, dep, std::move(j)}; }
inline Var sec_var(int dep, MultiIndex j = {}) { return {VarKind::Sec, dep, std::move(j)}; }
inline Var tgt_var(int dep, MultiIndex j = {}) { return {VarKind::Tgt, dep, std::move(j)}; }
inline Var par_var(int k) { return {VarKind::Par, k, {}}; }

struct VarHash {
  std::size_t operator()(const Var& v) const { return v.hash(); }
};

enum class Op : std::uint8_t { Const, Sym, Add, Mul, Pow, Sqrt };

struct Node;
using Expr = std::shared_ptr<const Node>;

struct Node {
  Op op = Op::Const;
  Q value;                 // Const
  Var var;                 // Sym
  std::vector<Expr> args;  // Add, Mul, Pow (1 arg), Sqrt (1 arg)
  int exponent = 0;        // Pow
  std::size_t h = 0;
};

Expr cst(const Q& v);
Expr cst(long v);
Expr sym(const Var& v);
Expr add(std::vector<Expr> terms);
Expr mul(std::vector<Expr> factors);
Expr pow(const Expr& base, int n);
Expr sqrt(const Expr& e);

Expr operator+(const Expr& a, const Expr& b);
Expr operator-(const Expr& a, const Expr& b);
Expr operator-(const Expr& a);
Expr operator*(const Expr& a, const Expr& b);
Expr operator/(const Expr& a, const Expr& b);

bool is_const(const Expr& e);
bool is_zero(const Expr& e);
bool is_one(const Expr& e);
/// total structural order; 0 means identical trees
int compare(const Expr& a, const Expr& b);
bool same(const Expr& a, const Expr& b);

std::set<Var> free_vars(const Expr& e);
bool mentions(const Expr& e, const std::function<bool(const Var&)>& pred);
std::size_t node_count(const Expr& e);

Expr partial(const Expr& e, const Var& v);

using VarMap = std::function<std::optional<Expr>(const Var&)>;
Expr substitute(const Expr& e, const VarMap& f);
Expr substitute(const Expr& e, const std::map<Var, Expr>& m);

/// D_i of each variable; total_derivative extends it by the Leibniz rule.
class DerivRule {
 public:
  virtual ~DerivRule() = default;
  virtual Expr d(const Var& v, int i) const = 0;
};

Expr total_derivative(const Expr& e, int i, const DerivRule& rule);
Expr total_derivative(const Expr& e, const MultiIndex& k, const DerivRule& rule);

/// Names used to print and parse variables of each kind.
struct Names {
  std::vector<std::string> base;
  std::vector<std::string> jet;
  std::vector<std::string> sec;
  std::vector<std::string> tgt;
  std::vector<std::string> tgt_index;  // letters differentiating target jets
  std::vector<std::string> par;
  std::vector<std::string> fn;
  std::vector<std::vector<std::string>> fn_index;

  std::string var(const Var& v) const;
  const std::vector<std::string>& index_letters(const Var& v) const;
};

std::string to_string(const Expr& e, const Names& names);

// ---- evaluation over rings ------------------------------------------------

using Quad = boost::multiprecision::cpp_bin_float_quad;

template <class R>
struct RingTraits;

template <>
struct RingTraits<Q> {
  static Q from_q(const Q& v) { return v; }
  static Q inv(const Q& v) {
    if (v == 0) throw MathError("division by zero");
    return Q(1) / v;
  }
  static Q sqrt(const Q& v) { return q_sqrt(v); }
};

template <>
struct RingTraits<double> {
  static double from_q(const Q& v) { return v.get_d(); }
  static double inv(double v) {
    if (v == 0.0) throw MathError("division by zero");
    return 1.0 / v;
  }
  static double sqrt(double v) {
    if (v < 0) throw MathError("negative radicand");
    return std::sqrt(v);
  }
};

template <>
struct RingTraits<long double> {
  static long double from_q(const Q& v) {
    return static_cast<long double>(v.get_num().get_d()) / static_cast<long double>(v.get_den().get_d());
  }
  static long double inv(long double v) {
    if (v == 0.0L) throw MathError("division by zero");
    return 1.0L / v;
  }
  static long double sqrt(long double v) {
    if (v < 0) throw MathError("negative radicand");
    return std::sqrt(v);
  }
};

template <>
struct RingTraits<Quad> {
  static Quad from_q(const Q& v) { return Quad(v.get_num().get_str()) / Quad(v.get_den().get_str()); }
  static Quad inv(const Quad& v) {
    if (v == 0) throw MathError("division by zero");
    return Quad(1) / v;
  }
  static Quad sqrt(const Quad& v) {
    if (v < 0) throw MathError("negative radicand");
    return boost::multiprecision::sqrt(v);
  }
};

template <class R>
R ring_pow(const R& b, int n) {
  if (n < 0) return RingTraits<R>::inv(ring_pow(b, -n));
  R result = RingTraits<R>::from_q(Q(1));
  R base = b;
  bool first = true;
  while (n > 0) {
    if (n & 1) {
      result = first ? base : R(result * base);
      first = false;
    }
    n >>= 1;
    if (n > 0) base = base * base;
  }
  return result;
}

template <class R>
class Evaluator {
 public:
  using Lookup = std::function<R(const Var&)>;
  explicit Evaluator(Lookup lookup) : lookup_(std::move(lookup)) {}

  R operator()(const Expr& e) {
    auto it = memo_.find(e.get());
    if (it != memo_.end()) return it->second;
    R r = compute(e);
    memo_.emplace(e.get(), r);
    keep_.push_back(e);
    return r;
  }

 private:
  R compute(const Expr& e) {
    switch (e->op) {
      case Op::Const:
        return RingTraits<R>::from_q(e->value);
      case Op::Sym:
        return lookup_(e->var);
      case Op::Add: {
        R acc = (*this)(e->args[0]);
        for (std::size_t k = 1; k < e->args.size(); ++k) acc = acc + (*this)(e->args[k]);
        return acc;
      }
      case Op::Mul: {
        R acc = (*this)(e->args[0]);
        for (std::size_t k = 1; k < e->args.size(); ++k) acc = acc * (*this)(e->args[k]);
        return acc;
      }
      case Op::Pow:
        return ring_pow<R>((*this)(e->args[0]), e->exponent);
      case Op::Sqrt:
        return RingTraits<R>::sqrt((*this)(e->args[0]));
    }
    throw MathError("bad node");
  }

  Lookup lookup_;
  std::unordered_map<const Node*, R> memo_;
  std::vector<Expr> keep_;
};

template <class R>
R eval(const Expr& e, const std::function<R(const Var&)>& lookup) {
  Evaluator<R> ev(lookup);
  return ev(e);
}

using Point = std::map<Var, Q>;

Q eval_q(const Expr& e, const Point& pt);

/// Exact value when possible, otherwise 113-bit float with `exact` cleared.
struct FlaggedValue {
  bool exact = true;
  Q value;
  Quad approx;
};
FlaggedValue eval_flagged(const Expr& e, const Point& pt);

/// Probabilistic identity test at `points` random rational points.
bool semantically_equal(const Expr& a, const Expr& b, RationalSampler& rng, int points = 5,
                        const Point& fixed = {});

}  // namespace ijets
