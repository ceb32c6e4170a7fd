#include "ijets/series.hpp"

#include <functional>

namespace ijets {

std::shared_ptr<const MonomialTable> MonomialTable::get(int nvars, int order) {
  static std::mutex mu;
  static std::map<std::pair<int, int>, std::shared_ptr<const MonomialTable>> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto key = std::make_pair(nvars, order);
  auto it = cache.find(key);
  if (it != cache.end()) return it->second;

  auto t = std::make_shared<MonomialTable>();
  t->nvars = nvars;
  t->order = order;
  for (int d = 0; d <= order; ++d) {
    // graded; within a degree, exponent vectors in descending lex
    std::vector<int> ex(nvars, 0);
    std::function<void(int, int)> rec = [&](int i, int left) {
      if (i == nvars - 1) {
        ex[i] = left;
        t->exps.push_back(ex);
        t->degree.push_back(d);
        return;
      }
      for (int e = left; e >= 0; --e) {
        ex[i] = e;
        rec(i + 1, left - e);
      }
    };
    if (nvars == 0) {
      if (d == 0) {
        t->exps.emplace_back();
        t->degree.push_back(0);
      }
      continue;
    }
    rec(0, d);
  }
  for (int k = 0; k < t->size(); ++k) t->index[t->exps[k]] = k;
  const int n = t->size();
  t->product.assign(static_cast<std::size_t>(n) * n, -1);
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) {
      if (t->degree[a] + t->degree[b] > order) continue;
      std::vector<int> s(nvars);
      for (int i = 0; i < nvars; ++i) s[i] = t->exps[a][i] + t->exps[b][i];
      t->product[static_cast<std::size_t>(a) * n + b] = t->index.at(s);
    }
  t->lower.assign(nvars, std::vector<int>(n, -1));
  for (int i = 0; i < nvars; ++i)
    for (int m = 0; m < n; ++m) {
      if (t->exps[m][i] == 0) continue;
      auto lo = t->exps[m];
      lo[i] -= 1;
      t->lower[i][m] = t->index.at(lo);
    }
  cache.emplace(key, t);
  return t;
}

nlohmann::json series_to_json(const QSeries& s) {
  nlohmann::json terms = nlohmann::json::array();
  for (std::size_t k = 0; k < s.size(); ++k) {
    if (s[k] == 0) continue;
    terms.push_back({{"index", MultiIndex::from_exponents(s.table().exps[k]).entries()}, {"coeff", q_str(s[k])}});
  }
  return {{"vars", s.nvars()}, {"order", s.order()}, {"terms", terms}};
}

QSeries series_from_json(const nlohmann::json& j) {
  QSeries s(j.at("vars").get<int>(), j.at("order").get<int>());
  for (const auto& t : j.at("terms")) {
    MultiIndex m(t.at("index").get<std::vector<int>>());
    const auto& c = t.at("coeff");
    Q v = c.is_string() ? parse_q(c.get<std::string>()) : Q(c.get<long>());
    if (m.order() > s.order()) continue;
    s.set(m.exponents(s.nvars()), v);
  }
  return s;
}

}  // namespace ijets
