#pragma once

#include <map>
#include <vector>

#include "ijets/series.hpp"
#include "ijets/system.hpp"

namespace ijets {

/// Order-by-order Taylor solver for a complete involutive system of order
/// nstar: principal jets above nstar are read off the Pommaret cone of their
/// order-nstar generator.
template <class T>
class FormalSolver {
 public:
  FormalSolver(DifferentialSystem sys, int nstar) : sys_(std::move(sys)), nstar_(nstar) {
    sys_ = sys_.order() < nstar ? sys_.complete(nstar) : sys_.truncated(nstar);
    const auto& eqs = sys_.equations();
    for (std::size_t k = 0; k < eqs.size(); ++k)
      if (eqs[k].lhs.order() == nstar_) generators_.push_back(k);
  }

  const DifferentialSystem& system() const { return sys_; }
  int nstar() const { return nstar_; }

  const Equation* generator_of(const Var& v) const {
    if (v.order() <= nstar_) return sys_.find(v);
    for (std::size_t k : generators_) {
      const Equation* g = &sys_.equations()[k];
      if (sys_.term_order.in_cone({v.dep, v.idx}, {g->lhs.dep, g->lhs.idx})) return g;
    }
    return nullptr;
  }
  bool is_principal(const Var& v) const { return generator_of(v) != nullptr; }

  /// parametric jets of order <= n, graded, in column order within an order
  std::vector<Var> parametric(int n) const {
    std::vector<Var> out;
    for (int k = 0; k <= n; ++k) {
      auto cols = sys_.term_order.columns(k, sys_.space.deps());
      for (auto it = cols.rbegin(); it != cols.rend(); ++it) {
        Var v = jet_var(it->dep, it->index);
        if (!is_principal(v)) out.push_back(v);
      }
    }
    return out;
  }

  /// All unknown jets of order <= n.  `given` supplies Base/Par/Sec values
  /// and every parametric jet.
  std::map<Var, T> solve(int n, const std::function<T(const Var&)>& given) const {
    std::map<Var, T> values;
    auto lookup = [&](const Var& v) -> T {
      auto it = values.find(v);
      if (it != values.end()) return it->second;
      if (v.kind == VarKind::Jet) {
        if (is_principal(v)) return RingTraits<T>::from_q(Q(0));  // not yet computed
        T g = given(v);
        values.emplace(v, g);
        return g;
      }
      return given(v);
    };
    // parametric jets first so that the table is complete
    for (const auto& v : parametric(n)) values.emplace(v, given(v));

    std::vector<const Equation*> low;
    for (const auto& e : sys_.equations())
      if (e.lhs.order() <= std::min(n, nstar_)) low.push_back(&e);
    for (int pass = 0;; ++pass) {
      if (pass > 200) throw MathError("formal solver: low-order jets did not settle");
      bool changed = false;
      for (const auto* e : low) {
        T v = eval<T>(e->rhs, lookup);
        auto it = values.find(e->lhs);
        if (it == values.end() || !(it->second == v)) {
          values[e->lhs] = v;
          changed = true;
        }
      }
      if (!changed) break;
    }

    const int p = sys_.space.p;
    for (int k = nstar_ + 1; k <= n; ++k) {
      const int depth = k - nstar_;
      // principal order-k jets grouped by generator
      std::map<const Equation*, std::vector<std::pair<Var, MultiIndex>>> work;
      for (const auto& J : all_of_order(p, k))
        for (int a = 1; a <= sys_.space.m; ++a) {
          Var v = jet_var(a, J);
          const Equation* g = generator_of(v);
          if (!g) continue;
          work[g].push_back({v, *J.minus(g->lhs.idx)});
          values.emplace(v, RingTraits<T>::from_q(Q(0)));
        }
      for (int pass = 0;; ++pass) {
        if (pass > 100) throw MathError("formal solver: order " + std::to_string(k) + " did not settle");
        bool changed = false;
        std::map<Var, TruncatedSeries<T>> cache;
        auto series_of = [&](const Var& v) -> TruncatedSeries<T> {
          auto it = cache.find(v);
          if (it != cache.end()) return it->second;
          TruncatedSeries<T> s(p, depth);
          if (v.kind == VarKind::Base) {
            s = TruncatedSeries<T>::constant(p, depth, lookup(v));
            if (v.dep <= p && depth >= 1) s[v.dep] = RingTraits<T>::from_q(Q(1));
          } else if (v.kind == VarKind::Jet || v.kind == VarKind::Sec) {
            const auto& tab = s.table();
            for (int m = 0; m < tab.size(); ++m) {
              MultiIndex E = MultiIndex::from_exponents(tab.exps[m]);
              Q f = 1;
              for (int e : tab.exps[m]) f *= factorial(e);
              T val = v.kind == VarKind::Jet ? lookup(v.shifted(E)) : given(v.shifted(E));
              s[m] = val * RingTraits<T>::from_q(1 / f);
            }
          } else {
            s = TruncatedSeries<T>::constant(p, depth, lookup(v));
          }
          cache.emplace(v, s);
          return s;
        };
        for (const auto& [g, targets] : work) {
          TruncatedSeries<T> r = eval_series<T>(g->rhs, p, depth, series_of);
          for (const auto& [v, K] : targets) {
            T val = r.coeff(K.exponents(p));
            Q f = 1;
            for (int e : K.exponents(p)) f *= factorial(e);
            val = val * RingTraits<T>::from_q(f);
            auto& slot = values[v];
            if (!(slot == val)) {
              slot = val;
              changed = true;
            }
          }
        }
        if (!changed) break;
      }
    }
    return values;
  }

 private:
  DifferentialSystem sys_;
  int nstar_;
  std::vector<std::size_t> generators_;
};

}  // namespace ijets
