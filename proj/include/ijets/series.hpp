#pragma once

#include <map>
#include <memory>
#include <mutex>
#include <stdexcept>
#include <vector>

#include "ijets/expr.hpp"
#include "ijets/multiindex.hpp"
#include "ijets/rational.hpp"

namespace ijets {

/// Monomials of degree <= order in n variables, graded, with a product table.
struct MonomialTable {
  int nvars = 0;
  int order = 0;
  std::vector<std::vector<int>> exps;
  std::vector<int> degree;
  std::map<std::vector<int>, int> index;
  std::vector<int> product;  // product[a*size+b], -1 if truncated
  std::vector<std::vector<int>> lower;  // lower[i][m]: monomial m minus e_i, or -1

  int size() const { return static_cast<int>(exps.size()); }
  static std::shared_ptr<const MonomialTable> get(int nvars, int order);
};

/// value plus gradient with respect to a fixed list of seeds
template <class T>
struct Dual {
  T v{};
  std::vector<T> d;

  Dual() = default;
  Dual(T value) : v(std::move(value)) {}  // NOLINT: constants promote
  Dual(T value, std::vector<T> grad) : v(std::move(value)), d(std::move(grad)) {}

  static Dual seed(T value, std::size_t n, std::size_t k) {
    Dual r(std::move(value));
    r.d.assign(n, T(0));
    r.d[k] = T(1);
    return r;
  }
  T grad(std::size_t k) const { return k < d.size() ? d[k] : T(0); }

  friend Dual operator+(const Dual& a, const Dual& b) {
    Dual r(a.v + b.v);
    std::size_t n = std::max(a.d.size(), b.d.size());
    r.d.resize(n);
    for (std::size_t k = 0; k < n; ++k) r.d[k] = a.grad(k) + b.grad(k);
    return r;
  }
  friend Dual operator-(const Dual& a, const Dual& b) {
    Dual r(a.v - b.v);
    std::size_t n = std::max(a.d.size(), b.d.size());
    r.d.resize(n);
    for (std::size_t k = 0; k < n; ++k) r.d[k] = a.grad(k) - b.grad(k);
    return r;
  }
  friend Dual operator-(const Dual& a) {
    Dual r(-a.v);
    for (const auto& x : a.d) r.d.push_back(-x);
    return r;
  }
  friend Dual operator*(const Dual& a, const Dual& b) {
    Dual r(a.v * b.v);
    std::size_t n = std::max(a.d.size(), b.d.size());
    r.d.resize(n);
    for (std::size_t k = 0; k < n; ++k) {
      T s(0);
      if (k < a.d.size() && a.d[k] != 0) s += a.d[k] * b.v;
      if (k < b.d.size() && b.d[k] != 0) s += a.v * b.d[k];
      r.d[k] = s;
    }
    return r;
  }
  Dual& operator+=(const Dual& o) { return *this = *this + o; }
  Dual& operator-=(const Dual& o) { return *this = *this - o; }
  Dual& operator*=(const Dual& o) { return *this = *this * o; }
  bool is_zero() const {
    if (v != 0) return false;
    for (const auto& x : d)
      if (x != 0) return false;
    return true;
  }
  friend bool operator==(const Dual& a, const Dual& b) {
    if (a.v != b.v) return false;
    std::size_t n = std::max(a.d.size(), b.d.size());
    for (std::size_t k = 0; k < n; ++k)
      if (a.grad(k) != b.grad(k)) return false;
    return true;
  }
};

template <class T>
struct RingTraits<Dual<T>> {
  static Dual<T> from_q(const Q& v) { return Dual<T>(RingTraits<T>::from_q(v)); }
  static Dual<T> inv(const Dual<T>& a) {
    T iv = RingTraits<T>::inv(a.v);
    Dual<T> r(iv);
    T m = -(iv * iv);
    for (const auto& x : a.d) r.d.push_back(x * m);
    return r;
  }
  static Dual<T> sqrt(const Dual<T>& a) {
    T s = RingTraits<T>::sqrt(a.v);
    Dual<T> r(s);
    if (!a.d.empty()) {
      T f = RingTraits<T>::inv(s + s);
      for (const auto& x : a.d) r.d.push_back(x * f);
    }
    return r;
  }
};

template <class T>
inline bool ring_is_zero(const T& v) {
  return v == 0;
}
template <class T>
inline bool ring_is_zero(const Dual<T>& v) {
  return v.is_zero();
}

/// Truncated Taylor polynomial in nvars variables about the origin,
/// coefficients c_E of y^E (not scaled by E!).
template <class T>
class TruncatedSeries {
 public:
  TruncatedSeries() = default;
  TruncatedSeries(int nvars, int order)
      : tab_(MonomialTable::get(nvars, order)), c_(tab_->size(), RingTraits<T>::from_q(Q(0))) {}

  static TruncatedSeries constant(int nvars, int order, const T& v) {
    TruncatedSeries s(nvars, order);
    s.c_[0] = v;
    return s;
  }
  /// y_i (1-based) plus a constant
  static TruncatedSeries variable(int nvars, int order, int i, const T& at = T(0)) {
    TruncatedSeries s = constant(nvars, order, at);
    if (order >= 1) s.c_[1 + (i - 1)] = RingTraits<T>::from_q(Q(1));
    return s;
  }

  int nvars() const { return tab_->nvars; }
  int order() const { return tab_->order; }
  const MonomialTable& table() const { return *tab_; }
  std::size_t size() const { return c_.size(); }
  const T& operator[](std::size_t k) const { return c_[k]; }
  T& operator[](std::size_t k) { return c_[k]; }
  const T& constant_term() const { return c_[0]; }

  T coeff(const std::vector<int>& ex) const {
    auto it = tab_->index.find(ex);
    if (it == tab_->index.end()) return RingTraits<T>::from_q(Q(0));
    return c_[it->second];
  }
  void set(const std::vector<int>& ex, const T& v) {
    auto it = tab_->index.find(ex);
    if (it == tab_->index.end()) throw std::out_of_range("monomial beyond truncation");
    c_[it->second] = v;
  }
  /// J!-scaled coefficient, i.e. the jet value at the origin
  T jet(const MultiIndex& J) const {
    auto ex = J.exponents(nvars());
    Q f = 1;
    for (int e : ex) f *= factorial(e);
    return coeff(ex) * RingTraits<T>::from_q(f);
  }

  TruncatedSeries truncated(int order) const {
    TruncatedSeries r(nvars(), order);
    for (std::size_t k = 0; k < r.size(); ++k) r.c_[k] = coeff(r.tab_->exps[k]);
    return r;
  }

  friend TruncatedSeries operator+(const TruncatedSeries& a, const TruncatedSeries& b) {
    a.check(b);
    TruncatedSeries r = a;
    for (std::size_t k = 0; k < r.size(); ++k) r.c_[k] = r.c_[k] + b.c_[k];
    return r;
  }
  friend TruncatedSeries operator-(const TruncatedSeries& a, const TruncatedSeries& b) {
    a.check(b);
    TruncatedSeries r = a;
    for (std::size_t k = 0; k < r.size(); ++k) r.c_[k] = r.c_[k] - b.c_[k];
    return r;
  }
  friend TruncatedSeries operator-(const TruncatedSeries& a) {
    TruncatedSeries r = a;
    for (auto& x : r.c_) x = -x;
    return r;
  }
  friend TruncatedSeries operator*(const TruncatedSeries& a, const TruncatedSeries& b) {
    a.check(b);
    TruncatedSeries r(a.nvars(), a.order());
    const int n = a.tab_->size();
    for (int i = 0; i < n; ++i) {
      if (ring_is_zero(a.c_[i])) continue;
      const int* row = &a.tab_->product[static_cast<std::size_t>(i) * n];
      for (int j = 0; j < n; ++j) {
        int k = row[j];
        if (k < 0) continue;
        if (ring_is_zero(b.c_[j])) continue;
        r.c_[k] = r.c_[k] + a.c_[i] * b.c_[j];
      }
    }
    return r;
  }
  TruncatedSeries scaled(const T& s) const {
    TruncatedSeries r = *this;
    for (auto& x : r.c_) x = x * s;
    return r;
  }

  TruncatedSeries inverse() const {
    if (ring_is_zero(c_[0])) throw MathError("series with zero constant term is not invertible");
    T a0i = RingTraits<T>::inv(c_[0]);
    TruncatedSeries h = scaled(a0i);
    h.c_[0] = RingTraits<T>::from_q(Q(0));  // a = a0 (1 + h)
    TruncatedSeries term = constant(nvars(), order(), RingTraits<T>::from_q(Q(1)));
    TruncatedSeries acc = term;
    for (int k = 1; k <= order(); ++k) {
      term = -(term * h);
      acc = acc + term;
    }
    return acc.scaled(a0i);
  }

  TruncatedSeries sqrt() const {
    T s0 = RingTraits<T>::sqrt(c_[0]);
    if (ring_is_zero(s0)) throw MathError("square root of series with zero constant term");
    T a0i = RingTraits<T>::inv(c_[0]);
    TruncatedSeries h = scaled(a0i);
    h.c_[0] = RingTraits<T>::from_q(Q(0));
    TruncatedSeries term = constant(nvars(), order(), RingTraits<T>::from_q(Q(1)));
    TruncatedSeries acc = term;
    Q coef = 1;  // binom(1/2, k)
    for (int k = 1; k <= order(); ++k) {
      coef = coef * (Q(1, 2) - Q(k - 1)) / Q(k);
      term = term * h;
      acc = acc + term.scaled(RingTraits<T>::from_q(coef));
    }
    return acc.scaled(s0);
  }

  /// d/dy_i; the result is only meaningful to order-1, so it is truncated there
  TruncatedSeries derivative(int i) const {
    int ord = std::max(order() - 1, 0);
    TruncatedSeries r(nvars(), ord);
    for (int m = 0; m < tab_->size(); ++m) {
      const auto& ex = tab_->exps[m];
      if (ex[i - 1] == 0) continue;
      auto lo = ex;
      lo[i - 1] -= 1;
      auto it = r.tab_->index.find(lo);
      if (it == r.tab_->index.end()) continue;
      r.c_[it->second] = c_[m] * RingTraits<T>::from_q(Q(ex[i - 1]));
    }
    return r;
  }

  /// Substitute y_i -> args[i]; the args must have zero constant term.
  TruncatedSeries compose(const std::vector<TruncatedSeries>& args) const {
    if (static_cast<int>(args.size()) != nvars()) throw std::invalid_argument("compose: wrong arity");
    const auto& a0 = args.at(0);
    int out_vars = a0.nvars(), out_order = a0.order();
    for (const auto& a : args)
      if (!ring_is_zero(a.c_[0])) throw MathError("compose: inner series must vanish at the origin");
    // powers[i][e] = args[i]^e
    std::vector<std::vector<TruncatedSeries>> powers(nvars());
    for (int i = 0; i < nvars(); ++i) {
      powers[i].push_back(constant(out_vars, out_order, RingTraits<T>::from_q(Q(1))));
      for (int e = 1; e <= order(); ++e) powers[i].push_back(powers[i].back() * args[i]);
    }
    TruncatedSeries r(out_vars, out_order);
    // monomials computed incrementally: mono[m] = mono[lower] * arg
    std::vector<TruncatedSeries> mono(tab_->size());
    for (int m = 0; m < tab_->size(); ++m) {
      const auto& ex = tab_->exps[m];
      if (tab_->degree[m] == 0) {
        mono[m] = constant(out_vars, out_order, RingTraits<T>::from_q(Q(1)));
      } else {
        int i = 0;
        while (ex[i] == 0) ++i;
        int lo = tab_->lower[i][m];
        mono[m] = mono[lo] * args[i];
      }
      if (tab_->degree[m] > out_order) continue;
      if (ring_is_zero(c_[m])) continue;
      r = r + mono[m].scaled(c_[m]);
    }
    return r;
  }

  friend bool operator==(const TruncatedSeries& a, const TruncatedSeries& b) {
    if (a.nvars() != b.nvars() || a.order() != b.order()) return false;
    for (std::size_t k = 0; k < a.size(); ++k)
      if (!(a.c_[k] == b.c_[k])) return false;
    return true;
  }

 private:
  void check(const TruncatedSeries& b) const {
    if (tab_ != b.tab_) throw std::invalid_argument("series shape mismatch");
  }
  std::shared_ptr<const MonomialTable> tab_;
  std::vector<T> c_;
};

template <class T>
struct RingTraits<TruncatedSeries<T>> {
  // constants need a shape; callers evaluate with a lookup that fixes it
  static thread_local int nvars, order;
  static TruncatedSeries<T> from_q(const Q& v) {
    return TruncatedSeries<T>::constant(nvars, order, RingTraits<T>::from_q(v));
  }
  static TruncatedSeries<T> inv(const TruncatedSeries<T>& a) { return a.inverse(); }
  static TruncatedSeries<T> sqrt(const TruncatedSeries<T>& a) { return a.sqrt(); }
};
template <class T>
thread_local int RingTraits<TruncatedSeries<T>>::nvars = 1;
template <class T>
thread_local int RingTraits<TruncatedSeries<T>>::order = 0;

/// Sets the shape used for series constants during an evaluation.
template <class T>
class SeriesShape {
 public:
  SeriesShape(int nvars, int order)
      : saved_n_(RingTraits<TruncatedSeries<T>>::nvars), saved_o_(RingTraits<TruncatedSeries<T>>::order) {
    RingTraits<TruncatedSeries<T>>::nvars = nvars;
    RingTraits<TruncatedSeries<T>>::order = order;
  }
  ~SeriesShape() {
    RingTraits<TruncatedSeries<T>>::nvars = saved_n_;
    RingTraits<TruncatedSeries<T>>::order = saved_o_;
  }
  SeriesShape(const SeriesShape&) = delete;
  SeriesShape& operator=(const SeriesShape&) = delete;

 private:
  int saved_n_, saved_o_;
};

template <class T>
TruncatedSeries<T> eval_series(const Expr& e, int nvars, int order,
                               const std::function<TruncatedSeries<T>(const Var&)>& lookup) {
  SeriesShape<T> shape(nvars, order);
  return eval<TruncatedSeries<T>>(e, lookup);
}

/// Solve A x = b over a field-like T by Gaussian elimination (A square, invertible).
template <class T>
std::vector<T> solve_dense(std::vector<std::vector<T>> a, std::vector<T> b) {
  const std::size_t n = a.size();
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t piv = col;
    while (piv < n && ring_is_zero(a[piv][col])) ++piv;
    if (piv == n) throw MathError("singular linear system");
    std::swap(a[piv], a[col]);
    std::swap(b[piv], b[col]);
    T inv = RingTraits<T>::inv(a[col][col]);
    for (std::size_t r = 0; r < n; ++r) {
      if (r == col || ring_is_zero(a[r][col])) continue;
      T f = a[r][col] * inv;
      for (std::size_t c = col; c < n; ++c) a[r][c] = a[r][c] - f * a[col][c];
      b[r] = b[r] - f * b[col];
    }
  }
  std::vector<T> x(n);
  for (std::size_t r = 0; r < n; ++r) x[r] = b[r] * RingTraits<T>::inv(a[r][r]);
  return x;
}

/// Invert a map y -> F(y) with F(0) = 0 and invertible linear part:
/// returns G with F(G(z)) = z to the common truncation order.
template <class T>
std::vector<TruncatedSeries<T>> invert_map(const std::vector<TruncatedSeries<T>>& F) {
  const int n = static_cast<int>(F.size());
  const int order = F.at(0).order();
  // linear part L[i][j] = dF_i/dy_j
  std::vector<std::vector<T>> L(n, std::vector<T>(n));
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) L[i][j] = F[i][1 + j];
  // columns of L^{-1}
  std::vector<std::vector<T>> Linv(n, std::vector<T>(n));
  for (int j = 0; j < n; ++j) {
    std::vector<T> e(n, RingTraits<T>::from_q(Q(0)));
    e[j] = RingTraits<T>::from_q(Q(1));
    auto col = solve_dense(L, e);
    for (int i = 0; i < n; ++i) Linv[i][j] = col[i];
  }
  // nonlinear remainder N = F - L y
  std::vector<TruncatedSeries<T>> N = F;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) N[i][1 + j] = RingTraits<T>::from_q(Q(0));
  std::vector<TruncatedSeries<T>> z;
  for (int i = 0; i < n; ++i) z.push_back(TruncatedSeries<T>::variable(n, order, i + 1));
  // G = L^{-1} (z - N(G)), each pass fixes one more degree
  std::vector<TruncatedSeries<T>> G(n, TruncatedSeries<T>(n, order));
  for (int pass = 0; pass < order; ++pass) {
    std::vector<TruncatedSeries<T>> rhs;
    for (int i = 0; i < n; ++i) rhs.push_back(z[i] - N[i].compose(G));
    std::vector<TruncatedSeries<T>> next(n, TruncatedSeries<T>(n, order));
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) next[i] = next[i] + rhs[j].scaled(Linv[i][j]);
    G = std::move(next);
  }
  return G;
}

using QSeries = TruncatedSeries<Q>;

nlohmann::json series_to_json(const QSeries& s);
QSeries series_from_json(const nlohmann::json& j);

}  // namespace ijets
