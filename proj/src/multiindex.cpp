#include "ijets/multiindex.hpp"

#include <algorithm>

#include <set>

#include "ijets/rational.hpp"

namespace ijets {

MultiIndex::MultiIndex(std::vector<int> entries) : e_(std::move(entries)) {
  for (int v : e_)
    if (v < 1) throw InputError("multi-index entries start at 1");
  std::sort(e_.begin(), e_.end());
}

MultiIndex MultiIndex::from_exponents(const std::vector<int>& ex) {
  std::vector<int> e;
  for (std::size_t i = 0; i < ex.size(); ++i)
    for (int k = 0; k < ex[i]; ++k) e.push_back(static_cast<int>(i) + 1);
  return MultiIndex(std::move(e));
}

int MultiIndex::count(int i) const { return static_cast<int>(std::count(e_.begin(), e_.end(), i)); }

MultiIndex MultiIndex::with(int i) const {
  MultiIndex r = *this;
  r.e_.insert(std::upper_bound(r.e_.begin(), r.e_.end(), i), i);
  return r;
}

MultiIndex MultiIndex::plus(const MultiIndex& o) const {
  std::vector<int> e = e_;
  e.insert(e.end(), o.e_.begin(), o.e_.end());
  return MultiIndex(std::move(e));
}

std::optional<MultiIndex> MultiIndex::without(int i) const {
  auto it = std::find(e_.begin(), e_.end(), i);
  if (it == e_.end()) return std::nullopt;
  MultiIndex r = *this;
  r.e_.erase(r.e_.begin() + (it - e_.begin()));
  return r;
}

std::optional<MultiIndex> MultiIndex::minus(const MultiIndex& o) const {
  std::vector<int> rest;
  std::size_t j = 0;
  for (int v : e_) {
    if (j < o.e_.size() && o.e_[j] == v)
      ++j;
    else
      rest.push_back(v);
  }
  if (j != o.e_.size()) return std::nullopt;
  MultiIndex r;
  r.e_ = std::move(rest);
  return r;
}

std::vector<int> MultiIndex::exponents(int p) const {
  std::vector<int> ex(p, 0);
  for (int v : e_) ex.at(v - 1) += 1;
  return ex;
}

std::string MultiIndex::str(const std::vector<std::string>& names) const {
  std::string s;
  for (int v : e_) {
    if (v - 1 < static_cast<int>(names.size()))
      s += names[v - 1];
    else
      s += "x" + std::to_string(v);
  }
  return s;
}

std::vector<MultiIndex> all_of_order(int p, int k) {
  std::vector<MultiIndex> out;
  std::vector<int> cur;
  std::function<void(int)> rec = [&](int start) {
    if (static_cast<int>(cur.size()) == k) {
      out.emplace_back(cur);
      return;
    }
    for (int v = start; v <= p; ++v) {
      cur.push_back(v);
      rec(v);
      cur.pop_back();
    }
  };
  rec(1);
  return out;
}

long long count_order(int p, int q, int k) { return q * binom_ll(p + k - 1, k); }

long long count_class(int p, int q, int k, int i) {
  if (k < 1 || i < 1 || i > p) return 0;
  return q * binom_ll(p + k - i - 1, k - 1);
}

bool in_cone(const IndexedCoordinate& target, const IndexedCoordinate& generator) {
  if (target.dep != generator.dep) return false;
  auto rest = target.index.minus(generator.index);
  if (!rest) return false;
  if (rest->empty()) return true;
  int c = generator.index.cls();
  // the empty generator has class 0 and only covers itself
  return rest->entries().back() <= c;
}

ReesVerdict verify_rees(const std::vector<IndexedCoordinate>& generators,
                        const std::function<bool(const IndexedCoordinate&)>& universe, int p,
                        const std::vector<int>& deps, int lo, int hi) {
  ReesVerdict v;
  for (int k = lo; k <= hi; ++k) {
    for (const auto& J : all_of_order(p, k)) {
      for (int dep : deps) {
        IndexedCoordinate c{dep, J};
        int hits = 0;
        for (const auto& g : generators)
          if (in_cone(c, g)) ++hits;
        bool inside = universe(c);
        if (inside && hits == 0) v.uncovered.push_back(c);
        if (hits > 1) v.overlapped.push_back(c);
        if (!inside && hits > 0) v.stray.push_back(c);
      }
    }
  }
  v.ok = v.uncovered.empty() && v.overlapped.empty() && v.stray.empty();
  return v;
}

ClassTermOrder::ClassTermOrder(int p, std::vector<int> variable_order, std::vector<int> dep_order)
    : p_(p), dep_order_(std::move(dep_order)) {
  if (variable_order.empty())
    for (int i = 1; i <= p; ++i) variable_order.push_back(i);
  if (static_cast<int>(variable_order.size()) != p) throw InputError("variable order has wrong length");
  order_ = variable_order;
  pos_.assign(p, 0);
  for (int k = 0; k < p; ++k) {
    int v = order_[k];
    if (v < 1 || v > p || pos_[v - 1] != 0) throw InputError("variable order is not a permutation");
    pos_[v - 1] = k + 1;
  }
}

std::vector<int> ClassTermOrder::relabel(const MultiIndex& j) const {
  std::vector<int> r;
  r.reserve(j.entries().size());
  for (int v : j.entries()) r.push_back(position(v));
  std::sort(r.begin(), r.end());
  return r;
}

int ClassTermOrder::cls(const MultiIndex& j) const {
  int c = 0;
  for (int v : j.entries()) {
    int pv = position(v);
    if (c == 0 || pv < c) c = pv;
  }
  return c;
}

bool ClassTermOrder::in_cone(const IndexedCoordinate& target, const IndexedCoordinate& generator) const {
  if (target.dep != generator.dep) return false;
  auto rest = target.index.minus(generator.index);
  if (!rest) return false;
  int c = cls(generator.index);
  for (int v : rest->entries())
    if (position(v) > c) return false;
  return true;
}

int ClassTermOrder::dep_rank(int dep) const {
  for (std::size_t k = 0; k < dep_order_.size(); ++k)
    if (dep_order_[k] == dep) return static_cast<int>(k);
  return static_cast<int>(dep_order_.size()) + dep;
}

bool ClassTermOrder::before(const IndexedCoordinate& a, const IndexedCoordinate& b) const {
  if (a.index.order() != b.index.order()) return a.index.order() > b.index.order();
  int ca = cls(a.index), cb = cls(b.index);
  if (ca != cb) return ca > cb;
  auto ra = relabel(a.index), rb = relabel(b.index);
  if (ra != rb) return ra > rb;
  return dep_rank(a.dep) < dep_rank(b.dep);
}

std::vector<IndexedCoordinate> ClassTermOrder::columns(int n, const std::vector<int>& deps) const {
  std::vector<IndexedCoordinate> cols;
  for (const auto& J : all_of_order(p_, n))
    for (int d : deps) cols.push_back({d, J});
  std::sort(cols.begin(), cols.end(), [&](const auto& a, const auto& b) { return before(a, b); });
  return cols;
}

void to_json(nlohmann::json& j, const MultiIndex& m) { j = m.entries(); }
void from_json(const nlohmann::json& j, MultiIndex& m) { m = MultiIndex(j.get<std::vector<int>>()); }
void to_json(nlohmann::json& j, const IndexedCoordinate& c) { j = {{"dep", c.dep}, {"index", c.index}}; }
void from_json(const nlohmann::json& j, IndexedCoordinate& c) {
  c.dep = j.at("dep").get<int>();
  c.index = j.at("index").get<MultiIndex>();
}

}  // namespace ijets
