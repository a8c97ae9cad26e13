#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "segre/rational.hpp"

namespace segre {

/// 1-based coordinate indices.
using IndexSet = std::set<int>;

/// Base manifold C^n times t copies of the projectivised rank-r bundle.
///
/// Factor j (1..t) has homogeneous fiber coordinates xi_1..xi_r and fiber
/// dimension r-1. With t = 0 the ambient is the base itself.
struct Ambient {
  int base_dim = 1;
  int rank = 1;
  int fiber_count = 0;
  std::vector<std::string> coord_names;

  /// Coordinate names default to x1..xn.
  static Ambient make(int base_dim, int rank, int fiber_count,
                      std::vector<std::string> names = {});

  int fiber_dim() const { return rank - 1; }
  int total_dim() const { return base_dim + fiber_count * fiber_dim(); }
  Ambient with_fibers(int t) const;
  Ambient base() const { return with_fibers(0); }

  bool operator==(const Ambient&) const = default;
};

/// A coordinate subvariety: the common zero set of some base coordinates and,
/// per fiber factor, some homogeneous fiber coordinates. The trivial cycle
/// (nothing vanishes) is the fundamental current 1.
struct CoordCycle {
  IndexSet base_zero;
  std::vector<IndexSet> fiber_zero;

  static CoordCycle whole(int fiber_count);
  static CoordCycle base(IndexSet zero, int fiber_count);
  static CoordCycle fiber(int fiber_count, int factor, int index);

  int codim() const;
  bool is_trivial() const { return codim() == 0; }
  /// Set inclusion of supports: every coordinate vanishing on `other` vanishes here.
  bool contained_in(const CoordCycle& other) const;

  bool operator==(const CoordCycle&) const = default;
  bool operator<(const CoordCycle& other) const;
};

/// Closed smooth (or smooth-off-a-small-set) symbols multiplying a cycle.
struct SmoothFactor {
  enum class Kind { Theta, FubiniStudy, Sigma, Named };

  Kind kind = Kind::Named;
  int factor = 0;     // Theta, FubiniStudy; Theta with factor 0 is a base form (rank 1)
  std::string name;   // Theta tag or Named symbol
  IndexSet coords;    // Sigma
  int degree = 1;     // Named; every other kind has degree 1

  static SmoothFactor theta(int factor, std::string tag);
  static SmoothFactor fubini_study(int factor);
  static SmoothFactor sigma(IndexSet coords);
  static SmoothFactor named(std::string name, int degree);

  bool operator==(const SmoothFactor&) const = default;
  bool operator<(const SmoothFactor& other) const;
};

/// Multiset of smooth factors, factor -> exponent.
using Monomial = std::map<SmoothFactor, int>;

int degree(const Monomial& m);

struct Term {
  Rational coeff{1};
  Monomial smooth;
  CoordCycle cycle;

  int degree() const { return segre::degree(smooth) + cycle.codim(); }
};

/// Normalised exact-rational sum of terms over one ambient.
///
/// Terms are kept sorted by (cycle, smooth) with like terms merged and zero
/// coefficients dropped, so equal currents compare and render identically.
class Current {
 public:
  explicit Current(Ambient ambient) : ambient_(std::move(ambient)) {}

  static Current zero(const Ambient& ambient) { return Current(ambient); }
  static Current one(const Ambient& ambient);
  static Current cycle(const Ambient& ambient, CoordCycle cycle, Rational coeff = Rational(1));
  static Current factor(const Ambient& ambient, SmoothFactor f, int power = 1,
                        Rational coeff = Rational(1));

  const Ambient& ambient() const { return ambient_; }
  const std::vector<Term>& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }

  Current operator+(const Current& other) const;
  Current operator-(const Current& other) const;
  Current operator-() const;
  Current& operator+=(const Current& other);
  Current scaled(const Rational& c) const;

  bool operator==(const Current& other) const;

  /// Canonical rendering, e.g. `2*fs_1*[x1=0,x2=0] + 1*theta_1*[x1=0,x2=0]`.
  std::string render() const;

 private:
  friend Current normalize(std::vector<Term> raw, const Ambient& ambient);

  Ambient ambient_;
  std::vector<Term> terms_;
};

/// Enforces every term invariant: zero coefficients, fiber/base/total degree
/// budgets, King reduction of saturated sigma powers, and merging.
Current normalize(std::vector<Term> raw, const Ambient& ambient);

/// King reduction of every sigma family in the term, iterated to a fixpoint.
/// Returns nullopt when the term vanishes.
std::optional<Term> king_reduce(const Term& term);

/// Bilinear product. Cycles intersect only when their zero sets are disjoint
/// per slot; a shared index throws ImproperIntersection.
Current wedge(const Current& a, const Current& b);

/// Constructible set built from coordinate subvarieties.
struct ConstructibleSet {
  enum class Polarity { Union, ComplementOfUnion };

  Polarity polarity = Polarity::Union;
  std::vector<CoordCycle> members;

  static ConstructibleSet union_of(std::vector<CoordCycle> members);
  static ConstructibleSet complement_of(std::vector<CoordCycle> members);
  static ConstructibleSet everything(int fiber_count);
  static ConstructibleSet nothing() { return union_of({}); }

  /// Whether a generic point of the irreducible cycle lies in the set.
  bool contains_generic_point(const CoordCycle& v) const;

  /// Intersection; only sets of equal polarity stay in this representation.
  std::optional<ConstructibleSet> intersect(const ConstructibleSet& other) const;
};

/// 1_S T: keeps exactly the terms whose cycle meets S in a dense subset.
Current restrict_to(const Current& t, const ConstructibleSet& s);

/// 1_{X \ Z} T for Z the union of the given supports.
Current restrict_off(const Current& t, const std::vector<CoordCycle>& z);

std::string render_cycle(const CoordCycle& c, const Ambient& ambient);
std::string render_factor(const SmoothFactor& f, const Ambient& ambient);
std::string render_term(const Term& t, const Ambient& ambient);

}  // namespace segre
