#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ijets/catalog.hpp"

namespace ijets {

struct GoldenResult {
  std::string entry;
  std::string check;
  bool ok = false;
  std::string detail;  // computed values, or the error message
};

/// Recompute the "golden" block of one entry.
std::vector<GoldenResult> run_goldens(const CatalogEntry& c, std::uint64_t seed = 0);
/// Every catalog entry that carries a golden block.
std::vector<GoldenResult> run_all_goldens(std::uint64_t seed = 0);

}  // namespace ijets
