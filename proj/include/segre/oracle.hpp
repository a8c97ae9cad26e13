#pragma once

#include <complex>
#include <functional>
#include <string>
#include <vector>

#include "segre/weights.hpp"

namespace segre::oracle {

using Point = std::vector<std::complex<double>>;

/// Numeric summand of a regularized weight.
struct NumericAtom {
  enum class Kind {
    Monomial,   // c*log(|z^m|^2 + eps^2)
    Norm,       // c*log(|z_I|^2 + eps^2)
    Quadratic,  // c*|z_I|^2, unaffected by eps
  };

  Kind kind = Kind::Quadratic;
  std::vector<int> exponents;
  IndexSet coords;
  double coeff = 1.0;

  static NumericAtom monomial(std::vector<int> exponents, double c = 1.0);
  static NumericAtom norm(IndexSet coords, double c = 1.0);
  static NumericAtom quadratic(IndexSet coords, double c = 1.0);
};

/// u_eps = sum of atoms; singular atoms carry the regularization eps > 0.
class RegularizedWeight {
 public:
  RegularizedWeight(int dim, std::vector<NumericAtom> atoms, double epsilon);

  /// Base monomial and norm atoms of a symbolic weight; anything else is BadSpec.
  static RegularizedWeight from_weight(const Weight& w, double epsilon);

  int dim() const { return dim_; }
  double epsilon() const { return epsilon_; }
  const std::vector<NumericAtom>& atoms() const { return atoms_; }
  RegularizedWeight with_epsilon(double epsilon) const { return {dim_, atoms_, epsilon}; }

  double value(const Point& z) const;
  /// Complex Hessian u_{j kbar} from central finite differences in real coordinates.
  std::vector<std::complex<double>> hessian(const Point& z) const;
  /// prod over locus components C of |z_C|^2 / (|z_C|^2 + delta^2): a smooth stand-in
  /// for the indicator of the complement of the unbounded locus.
  double cutoff(const Point& z, double delta) const;

 private:
  int dim_;
  std::vector<NumericAtom> atoms_;
  double epsilon_;
};

/// Ball around a center in C^n. The grid is graded toward the center, so singular
/// loci are resolved only where they pass through it.
struct Ball {
  Point center;
  double radius = 1.0;

  static Ball origin(int n, double radius = 1.0) { return Ball{Point(static_cast<std::size_t>(n)), radius}; }
};

/// Polar midpoint rule per complex coordinate: an inner disc, rings graded in log(rho)
/// out to a quarter of the radius, then rings of equal width; each ring is split into
/// equal angular sectors. In C^2 the second
/// coordinate's range is nested inside the ball.
struct QuadratureGrid {
  int points_per_axis = 64;
  int angular_points = 4;
  long long budget = 4'000'000;

  static QuadratureGrid make(int points_per_axis = 64, int angular_points = 4, long long budget = 4'000'000);
  long long total_points(int n) const;
  std::string render() const;
};

struct Estimate {
  double value = 0.0;
  double error_estimate = 0.0;
};

/// Density of (dd^c u)^k ^ (dd^c |z|^2)^{n-k} with respect to Lebesgue measure.
double ma_density(const std::vector<std::complex<double>>& h, int n, int k);

/// Integral over the ball of the k-fold regularized Monge-Ampere density, with
/// (dd^c |z - center|^2)^{n-k} filling the remaining degree.
double numeric_ma_mass(const RegularizedWeight& u, int k, const Ball& region, const QuadratureGrid& grid);

/// Mass of dd^c u_outer ^ chi_delta dd^c u_inner on C^2, chi_delta the cutoff of u_outer.
/// Approximates dd^c(u_outer 1_{X \ Z_outer} dd^c u_inner) when
/// inner.epsilon << delta << outer.epsilon.
double numeric_product_mass(const RegularizedWeight& inner, const RegularizedWeight& outer, double delta,
                            const Ball& region, const QuadratureGrid& grid);

/// Lelong density of (dd^c u)^k at center: mass(ball rho) / rho^{2(n-k)} over the given
/// decreasing radii, with eps = eps_ratio * rho^d for d the top degree of a regularized
/// monomial. NoConvergence when the ratio sequence turns back by more than `tolerance`.
Estimate numeric_lelong(const RegularizedWeight& u, int k, const Point& center, const std::vector<double>& radii,
                        double eps_ratio, const QuadratureGrid& grid, double tolerance = 0.01);

struct OracleRow {
  std::string quantity;
  double epsilon = 0.0;
  std::string grid;
  double value = 0.0;
  double error_estimate = 0.0;
  double symbolic_value = 0.0;
  bool pass = false;
};

/// A quantity with a closed-form symbolic value and a numeric estimator.
struct OracleCase {
  std::string quantity;
  double symbolic_value = 0.0;
  double epsilon = 0.0;
  std::function<Estimate(const QuadratureGrid&)> numeric;
};

/// Runs every case; a row passes when |numeric - symbolic| <= tolerance.
std::vector<OracleRow> compare_to_symbolic(const std::vector<OracleCase>& cases, double tolerance,
                                           const QuadratureGrid& grid);

/// Six significant digits, `nan` for NaN; the number format of every oracle output.
std::string format_value(double v);

/// CSV with header quantity,epsilon,grid,value,error_estimate,symbolic_value,pass.
std::string render_csv(const std::vector<OracleRow>& rows);

}  // namespace segre::oracle
