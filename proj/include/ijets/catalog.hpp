#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "ijets/normalform.hpp"

namespace ijets {

/// Explicit transformations Z^a(x, u) built from arbitrary functions and
/// constant parameters; used to generate group elements.
struct GroupLaw {
  Names names;                          // base = x.., u..; fn; par
  std::vector<Expr> maps;               // one per component
  std::vector<std::vector<Expr>> args;  // arguments of each function
  std::string constraint;               // "" or "cauchy-riemann:<f>,<g>"
};

struct CatalogEntry {
  std::string id;
  std::string description;
  int p = 1;
  int q = 1;
  PseudoGroupSpec group;
  std::map<Var, Q> section_overrides;  // Base / Sec values
  std::optional<GroupLaw> law;
  std::optional<CrossSection> cross_section;
  std::optional<FrameSpec> frame;
  int nf = 0;  // order at which the cross-section starts to be well-posed
  bool plain = false;  // a bare differential system (no pseudo-group structure)
  nlohmann::json raw;

  /// generic section jet: overrides, otherwise seeded rationals
  JetPoint section(std::uint64_t seed) const;
  /// Group element from polynomial choices for the law's functions
  /// (expressions in Base 1..nargs) and parameter values.
  std::vector<Expr> element(const std::vector<Expr>& fns, const std::vector<Q>& pars) const;
  /// Random polynomial element with invertible linear part at the base point.
  std::vector<Expr> random_element(std::uint64_t seed, int degree = 3) const;
  /// Target section of order N built from section(seed).
  SectionJet target(int N, std::uint64_t seed) const;
  /// Target from JSON: {"base": [...], "polynomial": ["expr in base letters", ...]}
  /// or the section schema ("series" / "jets").
  SectionJet target_from_json(const nlohmann::json& j, int N) const;
};

/// Directory holding <id>.json files: $IJETS_CATALOG_DIR or the built-in default.
std::string catalog_dir();
std::vector<std::string> catalog_ids();
CatalogEntry load_entry(const nlohmann::json& j);
CatalogEntry load_catalog(const std::string& id);
CatalogEntry load_file(const std::string& path);

/// Parse {"lhs": "rhs", ...} or [["lhs","rhs"], ...] into a system.
void add_equations(DifferentialSystem& sys, const nlohmann::json& eqs);

}  // namespace ijets
