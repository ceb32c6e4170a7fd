#pragma once

#include <compare>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

namespace ijets {

/// Symmetric multi-index, stored as a sorted list of variable numbers 1..p.
class MultiIndex {
 public:
  MultiIndex() = default;
  explicit MultiIndex(std::vector<int> entries);
  MultiIndex(std::initializer_list<int> entries) : MultiIndex(std::vector<int>(entries)) {}

  /// (2,0,1) -> x1 x1 x3
  static MultiIndex from_exponents(const std::vector<int>& ex);

  int order() const { return static_cast<int>(e_.size()); }
  bool empty() const { return e_.empty(); }
  const std::vector<int>& entries() const { return e_; }
  int cls() const { return e_.empty() ? 0 : e_.front(); }
  int count(int i) const;

  MultiIndex with(int i) const;
  MultiIndex plus(const MultiIndex& o) const;
  std::optional<MultiIndex> without(int i) const;
  /// this - o if o is a sub-multiset
  std::optional<MultiIndex> minus(const MultiIndex& o) const;
  std::vector<int> exponents(int p) const;

  std::string str(const std::vector<std::string>& names) const;

  auto operator<=>(const MultiIndex&) const = default;
  bool operator==(const MultiIndex&) const = default;

 private:
  std::vector<int> e_;
};

/// All multi-indices of order k over p variables, ascending lexicographic.
std::vector<MultiIndex> all_of_order(int p, int k);

long long count_order(int p, int q, int k);
long long count_class(int p, int q, int k, int i);

struct IndexedCoordinate {
  int dep = 1;
  MultiIndex index;
  auto operator<=>(const IndexedCoordinate&) const = default;
  bool operator==(const IndexedCoordinate&) const = default;
};

/// Pommaret cone membership, classes taken with the identity variable order.
bool in_cone(const IndexedCoordinate& target, const IndexedCoordinate& generator);

struct ReesVerdict {
  bool ok = true;
  std::vector<IndexedCoordinate> uncovered;
  std::vector<IndexedCoordinate> overlapped;
  std::vector<IndexedCoordinate> stray;  // covered but outside the universe
};

/// Every coordinate of order in [lo,hi] in the universe must sit in exactly one
/// cone, and no cone element of those orders may leave the universe.
ReesVerdict verify_rees(const std::vector<IndexedCoordinate>& generators,
                        const std::function<bool(const IndexedCoordinate&)>& universe,
                        int p, const std::vector<int>& deps, int lo, int hi);

/// Column order: classes descending, then descending lex on (relabelled)
/// entries, then dep by rank.
class ClassTermOrder {
 public:
  ClassTermOrder() = default;
  ClassTermOrder(int p, std::vector<int> variable_order = {}, std::vector<int> dep_order = {});

  int p() const { return p_; }
  /// position (1-based) of variable i in the ordering
  int position(int var) const { return pos_.at(var - 1); }
  int variable_at(int position) const { return order_.at(position - 1); }
  int cls(const MultiIndex& j) const;
  /// appended entries must have position <= cls(generator)
  bool in_cone(const IndexedCoordinate& target, const IndexedCoordinate& generator) const;
  int dep_rank(int dep) const;
  /// true if a comes before b (a, b of equal order)
  bool before(const IndexedCoordinate& a, const IndexedCoordinate& b) const;
  std::vector<IndexedCoordinate> columns(int n, const std::vector<int>& deps) const;
  const std::vector<int>& dep_order() const { return dep_order_; }
  const std::vector<int>& variable_order() const { return order_; }

 private:
  std::vector<int> relabel(const MultiIndex& j) const;
  int p_ = 1;
  std::vector<int> order_{1};
  std::vector<int> pos_{1};
  std::vector<int> dep_order_;
};

void to_json(nlohmann::json& j, const MultiIndex& m);
void from_json(const nlohmann::json& j, MultiIndex& m);
void to_json(nlohmann::json& j, const IndexedCoordinate& c);
void from_json(const nlohmann::json& j, IndexedCoordinate& c);

}  // namespace ijets
