#pragma once

#include <string>
#include <vector>

#include "segre/projective.hpp"

namespace segre {

/// Coordinate-adapted base point: each coordinate is either 0 or generic nonzero.
struct BasePoint {
  std::vector<bool> zero;

  static BasePoint origin(int n) { return BasePoint{std::vector<bool>(static_cast<std::size_t>(n), true)}; }
  static BasePoint generic(int n) { return BasePoint{std::vector<bool>(static_cast<std::size_t>(n), false)}; }
  /// All 2^n coordinate-adapted points, origin first.
  static std::vector<BasePoint> all(int n);

  bool lies_on(const CoordCycle& c) const;
  bool lies_on(const IndexSet& zero_coords) const;
  /// `origin`, `generic` or `(0,g,...)`.
  std::string render() const;
  bool operator==(const BasePoint&) const = default;
};

/// Lelong number of a base current at a coordinate-adapted point.
Rational lelong_number(const Current& t, const BasePoint& p);

struct ThetaIndependenceReport {
  bool ok = true;
  int comparisons = 0;
  std::vector<std::string> counterexamples;
};

/// Lelong numbers of s_k and c_k (1 <= k <= k_max) agree under two symbol systems at
/// every point, and every ordered Segre product of total degree <= k_max agrees off the
/// degeneracy locus.
ThetaIndependenceReport theta_independence_check(const MetricSpec& spec, const SymbolRules& a,
                                                 const SymbolRules& b, int k_max);

/// Same declarations under a fresh theta tag, with fresh formal Segre symbols of equal degree.
SymbolRules swap_theta(const SymbolRules& rules, const std::string& tag);

}  // namespace segre
