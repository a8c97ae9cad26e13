#pragma once

#include <map>
#include <string>
#include <vector>

#include "segre/weights.hpp"

namespace segre {

/// Singular hermitian metric on the trivial rank-r bundle over C^n, given by
/// the weight it induces on O(1) over the projectivisation.
struct MetricSpec {
  enum class Form { LineBundle, ConformalDiagonal, ExplicitO1Weight };

  Form form = Form::LineBundle;
  int rank = 1;
  /// Base weight for LineBundle/ConformalDiagonal; weight on P(E) (one fiber factor) otherwise.
  Weight weight;

  static MetricSpec line_bundle(const Weight& w);
  /// h = e^{-w} Id; BadSpec if w carries fiber atoms.
  static MetricSpec conformal(const Weight& w, int rank);
  static MetricSpec explicit_o1(const Weight& w);

  Ambient base() const { return weight.ambient.base(); }
  /// Base times t copies of P(E).
  Ambient fiber_product(int t) const;
  bool is_smooth() const { return !weight.has_singular_atoms(); }
  bool operator==(const MetricSpec&) const = default;
};

/// Reference-metric symbol system: the theta tag, the declared Segre forms
/// s_k(E,g), and rewrite rules theta_j ^ [xi_a = 0] -> rhs.
struct SymbolRules {
  struct Substitution {
    int fiber_index = 1;
    /// Lives on base x one fiber factor; factor 1 is re-addressed to the matched factor.
    Current rhs;
  };

  std::string theta_tag = "theta";
  std::map<int, Current> segre_symbols;
  std::vector<Substitution> substitutions;

  /// s_k(E,g) on the base: 1 for k = 0, the declared value, or a formal symbol `s<k>(tag)`.
  Current segre_symbol(int k, const Ambient& base) const;
  SmoothFactor theta(int factor, int rank) const;
};

/// Induced O(1)-weight phi_j on the t-fold fiber product.
Weight induced_weight(const MetricSpec& spec, int factor, const Ambient& y);

/// Base projections of the unbounded-locus components of phi; a trivial cycle
/// in the result means the whole base.
std::vector<CoordCycle> degeneracy_locus(const MetricSpec& spec);

/// Applies the declared substitutions until no term matches.
Current apply_substitutions(const Current& t, const SymbolRules& rules);

/// Factorwise fiber integration to the base.
Current pushforward(const Current& t, const SymbolRules& rules);

/// (-1)^k pi_* [dd^c phi]_theta^{k+r-1}.
Current segre_current(int k, const MetricSpec& spec, const SymbolRules& rules);

/// Ordered product; ks = (k_t, ..., k_1) with factor 1 applied first.
Current segre_product(const std::vector<int>& ks, const MetricSpec& spec, const SymbolRules& rules);

/// Sum over ordered compositions (k_1..k_t) of k of (-1)^t segre_product((k_t..k_1)).
Current chern_current(int k, const MetricSpec& spec, const SymbolRules& rules);

/// pi_* (dd^c phi)^m, the pushed-forward Monge-Ampere power without theta correction.
Current pushed_ma_power(int m, const MetricSpec& spec, const SymbolRules& rules);

/// Ordered compositions of k into positive parts, in lexicographic order.
std::vector<std::vector<int>> compositions(int k);

struct CheckReport {
  bool ok = true;
  std::vector<std::string> checked;
  std::vector<std::string> failures;
};

/// sum_{i+j=k} s_i ^ c_j = 0 for 1 <= k <= max_k, plus the binomial
/// decomposition of theta-corrected products for one and two fiber factors.
CheckReport smooth_segre_check(const MetricSpec& spec, const SymbolRules& rules, int max_k);

}  // namespace segre
