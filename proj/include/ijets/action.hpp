#pragma once

#include <functional>
#include <utility>
#include <vector>

#include "ijets/series.hpp"

namespace ijets {

/// Z^a(x0 + y, u(x0 + y)) as series in y.  `gjet(a, B)` is the group jet
/// Z^a_B at (x0, u0); `section[α]` is u^α(x0 + y) (constant term u0).
template <class T>
std::vector<TruncatedSeries<T>> lifted_series(int p, int q, int order,
                                              const std::function<T(int, const MultiIndex&)>& gjet,
                                              const std::vector<TruncatedSeries<T>>& section) {
  using S = TruncatedSeries<T>;
  const int m = p + q;
  std::vector<S> args;
  for (int i = 1; i <= p; ++i) args.push_back(S::variable(p, order, i));
  for (int a = 0; a < q; ++a) {
    S s = section.at(a).truncated(order);
    s[0] = RingTraits<T>::from_q(Q(0));
    args.push_back(s);
  }
  std::vector<S> out;
  for (int a = 1; a <= m; ++a) {
    S z(m, order);
    const auto& tab = z.table();
    for (int k = 0; k < tab.size(); ++k) {
      Q f = 1;
      for (int e : tab.exps[k]) f *= factorial(e);
      z[k] = gjet(a, MultiIndex::from_exponents(tab.exps[k])) * RingTraits<T>::from_q(1 / f);
    }
    out.push_back(z.compose(args));
  }
  return out;
}

/// The image section Û = Ū ∘ X̄^{-1}: new base point and series about it.
template <class T>
std::pair<std::vector<T>, std::vector<TruncatedSeries<T>>> transformed_section(
    int p, int q, const std::vector<TruncatedSeries<T>>& lifted) {
  using S = TruncatedSeries<T>;
  std::vector<T> base;
  std::vector<S> F;
  for (int i = 0; i < p; ++i) {
    base.push_back(lifted[i][0]);
    S f = lifted[i];
    f[0] = RingTraits<T>::from_q(Q(0));
    F.push_back(f);
  }
  std::vector<S> out;
  if (lifted.at(0).order() == 0) {
    for (int a = 0; a < q; ++a) out.push_back(lifted[p + a]);
    return {base, out};
  }
  std::vector<S> G = invert_map(F);
  for (int a = 0; a < q; ++a) out.push_back(lifted[p + a].compose(G));
  return {base, out};
}

}  // namespace ijets
