#pragma once

#include <span>
#include <string>
#include <vector>

#include "segre/current.hpp"

namespace segre {

/// One summand of a model psh weight c*log|F|^2 + v.
struct WeightAtom {
  enum class Kind {
    MonomialLog,      // c*log|x^m|^2
    NormLog,          // c*log|x_I|^2, |I| >= 2
    FiberSectionLog,  // O(1)-weight of factor j singular along [xi_a = 0]
    FiberFS,          // smooth tautological O(1)-weight of factor j
    Smooth,           // bounded smooth summand with curvature NamedForm(name, 1)
    Reference,        // the smooth reference weight psi itself, curvature theta_j
  };

  Kind kind = Kind::Smooth;
  std::vector<int> exponents;  // MonomialLog, one entry per base coordinate
  IndexSet coords;             // NormLog
  Rational coeff{1};           // MonomialLog, NormLog
  int factor = 1;              // fiber atoms; Reference uses 0 on rank-1 bundles
  int index = 0;               // FiberSectionLog
  std::string name;            // Smooth name, Reference theta tag

  static WeightAtom monomial(std::vector<int> exponents, Rational c = Rational(1));
  static WeightAtom norm(IndexSet coords, Rational c = Rational(1));
  static WeightAtom section(int factor, int index);
  static WeightAtom fubini_study(int factor);
  static WeightAtom smooth(std::string name);
  static WeightAtom reference(int factor, std::string tag);

  bool is_fiber() const;
  bool is_singular() const;
  bool operator==(const WeightAtom&) const = default;
};

/// Formal sum of weight atoms over an ambient.
struct Weight {
  std::vector<WeightAtom> atoms;
  Ambient ambient;

  /// Validates coordinates, factors, coefficient signs and the one-FS-per-factor rule.
  static Weight make(std::vector<WeightAtom> atoms, const Ambient& ambient);

  bool has_fiber_atoms() const;
  bool has_singular_atoms() const;
  /// Same atoms over a larger ambient (extra fiber factors or more coordinates names kept).
  Weight lifted(const Ambient& target) const;
  Weight scaled(const Rational& c) const;

  /// `log|x1*x2^2|^2 + 2*log|x1,x2|^2 + fs`; fiber factor 1 renders without suffix.
  std::string render() const;
  bool operator==(const Weight&) const = default;
};

/// Poincare-Lelong: dd^c of a single atom.
Current ddc_atom(const WeightAtom& atom, const Ambient& ambient);

/// dd^c u as a current.
Current ddc(const Weight& u);

/// Irreducible components of the unbounded locus, maximal under inclusion.
std::vector<CoordCycle> unbounded_locus(const Weight& u);

/// Smallest codimension of a component; total_dim + 1 when the locus is empty.
int locus_codim(const std::vector<CoordCycle>& locus, const Ambient& ambient);

/// dd^c(u T) expanded atomwise; T must already avoid the unbounded locus.
Current ddc_weight_times(const Weight& u, const Current& t);

/// (dd^c u)^m via T_k = dd^c(u 1_{X\Z} T_{k-1}).
Current ma_power(const Weight& u, int m);

struct ProductFactor {
  Weight weight;
  ConstructibleSet domain;
};

/// dd^c u_m 1_{U_m} ^ ... ^ dd^c u_1 1_{U_1}; factors[0] is applied first.
Current generalized_product(std::span<const ProductFactor> factors);

/// [dd^c u]_alpha ^ T = dd^c(u 1_{X\Z} T) + alpha ^ 1_Z T.
Current bracket_apply(const Weight& u, const Current& alpha, const Current& t);

/// m-fold iteration of bracket_apply, starting from `start` (default 1).
Current bracket_power(const Weight& u, const Current& alpha, int m);
Current bracket_power(const Weight& u, const Current& alpha, int m, const Current& start);

/// (dd^c u)^m + sum_{l<m} alpha^{m-l} ^ 1_Z (dd^c u)^l.
Current bracket_expand(const Weight& u, const Current& alpha, int m);

/// alpha^k by repeated wedge; alpha^0 = 1.
Current wedge_power(const Current& alpha, int k);

}  // namespace segre
