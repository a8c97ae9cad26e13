#pragma once

#include "segre/projective.hpp"

namespace segre::fixtures {

/// h = e^{-log|x|^2} Id on the trivial rank-2 bundle over C^2.
inline MetricSpec conformal_norm_c2() {
  return MetricSpec::conformal(Weight::make({WeightAtom::norm({1, 2})}, Ambient::make(2, 2, 0)), 2);
}

/// O(1)-weight log|z|^2 + log|xi_2/xi_1|^2 over C^3 with coordinates (z, zeta1, zeta2).
inline MetricSpec degenerate_rank2_c3() {
  const auto y = Ambient::make(3, 2, 1);
  return MetricSpec::explicit_o1(Weight::make({WeightAtom::monomial({1, 0, 0}), WeightAtom::section(1, 2)}, y));
}

/// Reference metric with s1 = 0, s2 = (ddc_zeta_sq)^2 and theta ^ [xi_2 = 0] = 0.
inline SymbolRules degenerate_rank2_rules(const std::string& tag = "theta") {
  SymbolRules rules;
  rules.theta_tag = tag;
  const auto base = Ambient::make(3, 2, 0);
  rules.segre_symbols.emplace(1, Current::zero(base));
  rules.segre_symbols.emplace(2, Current::factor(base, SmoothFactor::named("ddc_zeta_sq", 1), 2));
  rules.substitutions.push_back({2, Current::zero(Ambient::make(3, 2, 1))});
  return rules;
}

/// Line bundle with metric |s|^{-2}, s = x1, over C^n.
inline MetricSpec line_hyperplane(int n) {
  std::vector<int> e(static_cast<std::size_t>(n), 0);
  e[0] = 1;
  return MetricSpec::line_bundle(Weight::make({WeightAtom::monomial(e)}, Ambient::make(n, 1, 0)));
}

/// Smooth metric equal to the reference metric itself.
inline MetricSpec reference_metric_c3() {
  return MetricSpec::explicit_o1(Weight::make({WeightAtom::reference(1, "theta")}, Ambient::make(3, 2, 1)));
}

inline MetricSpec euclidean(int n, int r) {
  return MetricSpec::conformal(Weight::make({}, Ambient::make(n, r, 0)), r);
}

}  // namespace segre::fixtures
