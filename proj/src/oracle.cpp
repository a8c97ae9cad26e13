#include "segre/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numbers>
#include <set>

#include "segre/errors.hpp"

namespace segre::oracle {

namespace {

constexpr double pi = std::numbers::pi;

double norm_sq(const Point& z, const IndexSet& coords) {
  double s = 0.0;
  for (int i : coords) s += std::norm(z[static_cast<std::size_t>(i - 1)]);
  return s;
}

}  // namespace

NumericAtom NumericAtom::monomial(std::vector<int> exponents, double c) {
  NumericAtom a;
  a.kind = Kind::Monomial;
  a.exponents = std::move(exponents);
  a.coeff = c;
  return a;
}

NumericAtom NumericAtom::norm(IndexSet coords, double c) {
  NumericAtom a;
  a.kind = Kind::Norm;
  a.coords = std::move(coords);
  a.coeff = c;
  return a;
}

NumericAtom NumericAtom::quadratic(IndexSet coords, double c) {
  NumericAtom a;
  a.kind = Kind::Quadratic;
  a.coords = std::move(coords);
  a.coeff = c;
  return a;
}

RegularizedWeight::RegularizedWeight(int dim, std::vector<NumericAtom> atoms, double epsilon)
    : dim_(dim), atoms_(std::move(atoms)), epsilon_(epsilon) {
  if (!(epsilon > 0.0)) throw Error(ErrorKind::PreconditionViolated, "regularization needs epsilon > 0");
  if (dim < 1) throw Error(ErrorKind::PreconditionViolated, "dimension must be positive");
  for (const auto& a : atoms_) {
    if (a.kind == NumericAtom::Kind::Monomial && static_cast<int>(a.exponents.size()) != dim) {
      throw Error(ErrorKind::BadSpec, "monomial exponent vector has wrong length");
    }
    for (int i : a.coords) {
      if (i < 1 || i > dim) throw Error(ErrorKind::BadSpec, "coordinate out of range");
    }
  }
}

RegularizedWeight RegularizedWeight::from_weight(const Weight& w, double epsilon) {
  std::vector<NumericAtom> atoms;
  for (const auto& a : w.atoms) {
    const double c = static_cast<double>(a.coeff.numerator()) / static_cast<double>(a.coeff.denominator());
    switch (a.kind) {
      case WeightAtom::Kind::MonomialLog: atoms.push_back(NumericAtom::monomial(a.exponents, c)); break;
      case WeightAtom::Kind::NormLog: atoms.push_back(NumericAtom::norm(a.coords, c)); break;
      default:
        throw Error(ErrorKind::BadSpec, "no numeric model for weight atom in " + w.render());
    }
  }
  return RegularizedWeight(w.ambient.base_dim, std::move(atoms), epsilon);
}

double RegularizedWeight::value(const Point& z) const {
  const double eps2 = epsilon_ * epsilon_;
  double u = 0.0;
  for (const auto& a : atoms_) {
    switch (a.kind) {
      case NumericAtom::Kind::Monomial: {
        double f = 1.0;
        for (std::size_t i = 0; i < a.exponents.size(); ++i) {
          if (a.exponents[i] > 0) f *= std::pow(std::norm(z[i]), a.exponents[i]);
        }
        u += a.coeff * std::log(f + eps2);
        break;
      }
      case NumericAtom::Kind::Norm: u += a.coeff * std::log(norm_sq(z, a.coords) + eps2); break;
      case NumericAtom::Kind::Quadratic: u += a.coeff * norm_sq(z, a.coords); break;
    }
  }
  return u;
}

std::vector<std::complex<double>> RegularizedWeight::hessian(const Point& z) const {
  // fourth-order central stencils for first and second derivatives
  static constexpr int off[] = {-2, -1, 1, 2};
  static constexpr double first[] = {1.0 / 12, -2.0 / 3, 2.0 / 3, -1.0 / 12};
  static constexpr double second[] = {-1.0 / 12, 4.0 / 3, 4.0 / 3, -1.0 / 12};
  const int m = 2 * dim_;
  std::vector<double> step(static_cast<std::size_t>(m));
  for (int j = 0; j < dim_; ++j) {
    const double h = 1e-2 * (std::abs(z[static_cast<std::size_t>(j)]) + epsilon_);
    step[static_cast<std::size_t>(2 * j)] = h;
    step[static_cast<std::size_t>(2 * j + 1)] = h;
  }
  auto shifted = [&](int a, double da, int b, double db) {
    Point w = z;
    auto bump = [&](int c, double d) {
      auto& x = w[static_cast<std::size_t>(c / 2)];
      x += (c % 2 == 0) ? std::complex<double>(d, 0.0) : std::complex<double>(0.0, d);
    };
    bump(a, da);
    if (b >= 0) bump(b, db);
    return value(w);
  };
  const double center = value(z);
  std::vector<double> d(static_cast<std::size_t>(m * m));
  for (int a = 0; a < m; ++a) {
    const double ha = step[static_cast<std::size_t>(a)];
    double diag = 0.0;
    for (int i = 0; i < 4; ++i) diag += second[i] * (shifted(a, off[i] * ha, -1, 0.0) - center);
    d[static_cast<std::size_t>(a * m + a)] = diag / (ha * ha);
    for (int b = a + 1; b < m; ++b) {
      const double hb = step[static_cast<std::size_t>(b)];
      double v = 0.0;
      for (int i = 0; i < 4; ++i) {
        for (int j = 0; j < 4; ++j) v += first[i] * first[j] * (shifted(a, off[i] * ha, b, off[j] * hb) - center);
      }
      v /= ha * hb;
      d[static_cast<std::size_t>(a * m + b)] = v;
      d[static_cast<std::size_t>(b * m + a)] = v;
    }
  }
  auto at = [&](int a, int b) { return d[static_cast<std::size_t>(a * m + b)]; };
  std::vector<std::complex<double>> h(static_cast<std::size_t>(dim_ * dim_));
  for (int j = 0; j < dim_; ++j) {
    for (int k = 0; k < dim_; ++k) {
      const int xj = 2 * j, yj = 2 * j + 1, xk = 2 * k, yk = 2 * k + 1;
      h[static_cast<std::size_t>(j * dim_ + k)] =
          0.25 * std::complex<double>(at(xj, xk) + at(yj, yk), at(xj, yk) - at(yj, xk));
    }
  }
  return h;
}

double RegularizedWeight::cutoff(const Point& z, double delta) const {
  std::set<IndexSet> components;
  for (const auto& a : atoms_) {
    if (a.kind == NumericAtom::Kind::Monomial) {
      for (std::size_t i = 0; i < a.exponents.size(); ++i) {
        if (a.exponents[i] > 0) components.insert(IndexSet{static_cast<int>(i) + 1});
      }
    } else if (a.kind == NumericAtom::Kind::Norm) {
      components.insert(a.coords);
    }
  }
  double chi = 1.0;
  for (const auto& c : components) {
    const double s = norm_sq(z, c);
    chi *= s / (s + delta * delta);
  }
  return chi;
}

QuadratureGrid QuadratureGrid::make(int points_per_axis, int angular_points, long long budget) {
  if (points_per_axis < 16) throw Error(ErrorKind::PreconditionViolated, "points_per_axis must be at least 16");
  if (angular_points < 1) throw Error(ErrorKind::PreconditionViolated, "angular_points must be positive");
  return QuadratureGrid{points_per_axis, angular_points, budget};
}

long long QuadratureGrid::total_points(int n) const {
  long long per = static_cast<long long>(points_per_axis) * angular_points;
  long long total = 1;
  for (int i = 0; i < n; ++i) total *= per;
  return total;
}

std::string QuadratureGrid::render() const {
  return std::to_string(points_per_axis) + "x" + std::to_string(angular_points);
}

namespace {

struct RadialNode {
  double radius;
  double area;  // full ring area
};

// Inner disc, then rings of equal width in log(rho) up to rho_max / 4,
// then rings of equal width in rho. Log rings use the midpoint rule in log(rho^2),
// the others the midpoint rule in rho^2.
std::vector<RadialNode> radial_nodes(double rho_max, double scale, int cells) {
  std::vector<RadialNode> out;
  if (rho_max <= 0.0) return out;
  const int uniform = cells / 4;
  const int graded = cells - 1 - uniform;
  const double split = 0.25 * rho_max;
  const double inner = std::min(0.05 * scale, 1e-3 * split);
  out.push_back({std::sqrt(0.5) * inner, pi * inner * inner});
  const double step = std::log(split / inner) / graded;
  for (int i = 0; i < graded; ++i) {
    const double r = inner * std::exp((i + 0.5) * step);
    out.push_back({r, 2.0 * pi * r * r * step});
  }
  for (int i = 0; i < uniform; ++i) {
    const double a = split + (rho_max - split) * i / uniform;
    const double b = split + (rho_max - split) * (i + 1) / uniform;
    out.push_back({std::sqrt(0.5 * (a * a + b * b)), pi * (b * b - a * a)});
  }
  return out;
}

void check_budget(int n, const QuadratureGrid& grid) {
  if (n < 1 || n > 2) throw Error(ErrorKind::PreconditionViolated, "numerics are limited to n <= 2");
  if (grid.total_points(n) > grid.budget) {
    throw Error(ErrorKind::BudgetExceeded, "grid needs " + std::to_string(grid.total_points(n)) +
                                               " points, budget is " + std::to_string(grid.budget));
  }
}

// Fixed-order midpoint sum of f over the ball; `scale` sets the innermost ring.
template <class F>
double integrate_ball(int n, const Ball& region, const QuadratureGrid& grid, double scale, F&& f) {
  check_budget(n, grid);
  const int na = grid.angular_points;
  const double dtheta = 2.0 * pi / na;
  auto on_circle = [&](double r, int s) { return std::polar(r, (s + 0.5) * dtheta); };
  long double total = 0.0L;
  Point z(static_cast<std::size_t>(n));
  const auto outer = radial_nodes(region.radius, scale, grid.points_per_axis);
  for (const auto& c1 : outer) {
    for (int s1 = 0; s1 < na; ++s1) {
      z[0] = region.center[0] + on_circle(c1.radius, s1);
      const double w1 = c1.area / na;
      if (n == 1) {
        total += w1 * f(z);
        continue;
      }
      const double r2max = std::sqrt(std::max(0.0, region.radius * region.radius - c1.radius * c1.radius));
      for (const auto& c2 : radial_nodes(r2max, scale, grid.points_per_axis)) {
        for (int s2 = 0; s2 < na; ++s2) {
          z[1] = region.center[1] + on_circle(c2.radius, s2);
          total += w1 * (c2.area / na) * f(z);
        }
      }
    }
  }
  return static_cast<double>(total);
}

void check_psd(const std::vector<std::complex<double>>& h, int n, const Point& z, double epsilon) {
  double lo = 0.0;
  double hi = 0.0;
  if (n == 1) {
    lo = hi = h[0].real();
  } else {
    const double a = h[0].real();
    const double d = h[3].real();
    const double disc = std::sqrt(0.25 * (a - d) * (a - d) + std::norm(h[1]));
    lo = 0.5 * (a + d) - disc;
    hi = 0.5 * (a + d) + disc;
  }
  double r2 = 0.0;
  for (const auto& x : z) r2 += std::norm(x);
  const double slack = 1e-4 * std::abs(hi) + 1e-6 / (r2 + epsilon * epsilon);
  if (lo < -slack) {
    throw Error(ErrorKind::NonHermitianHessian,
                "finite-difference Hessian is not positive semidefinite (eigenvalue " + std::to_string(lo) + ")");
  }
}

}  // namespace

double ma_density(const std::vector<std::complex<double>>& h, int n, int k) {
  if (n == 1) return (k == 1 ? h[0].real() : 1.0) / pi;
  if (n == 2) {
    const double pi2 = pi * pi;
    if (k == 2) return 2.0 * (h[0] * h[3] - h[1] * h[2]).real() / pi2;
    if (k == 1) return (h[0].real() + h[3].real()) / pi2;
    return 2.0 / pi2;
  }
  throw Error(ErrorKind::PreconditionViolated, "numerics are limited to n <= 2");
}

double numeric_ma_mass(const RegularizedWeight& u, int k, const Ball& region, const QuadratureGrid& grid) {
  const int n = u.dim();
  if (k < 0 || k > n) throw Error(ErrorKind::PreconditionViolated, "need 0 <= k <= n");
  if (static_cast<int>(region.center.size()) != n) {
    throw Error(ErrorKind::PreconditionViolated, "ball center has wrong dimension");
  }
  return integrate_ball(n, region, grid, u.epsilon(), [&](const Point& z) {
    if (k == 0) return ma_density({}, n, 0);
    const auto h = u.hessian(z);
    check_psd(h, n, z, u.epsilon());
    return ma_density(h, n, k);
  });
}

double numeric_product_mass(const RegularizedWeight& inner, const RegularizedWeight& outer, double delta,
                            const Ball& region, const QuadratureGrid& grid) {
  if (inner.dim() != 2 || outer.dim() != 2) {
    throw Error(ErrorKind::PreconditionViolated, "numeric generalized products are implemented on C^2");
  }
  const double scale = std::min({inner.epsilon(), outer.epsilon(), delta});
  return integrate_ball(2, region, grid, scale, [&](const Point& z) {
    const auto a = outer.hessian(z);
    const auto b = inner.hessian(z);
    check_psd(a, 2, z, outer.epsilon());
    check_psd(b, 2, z, inner.epsilon());
    const double chi = outer.cutoff(z, delta);
    const double mixed = (a[0] * b[3] + a[3] * b[0] - 2.0 * a[1] * b[2]).real();
    return chi * mixed / (pi * pi);
  });
}

namespace {

// Largest degree of a regularized function |F|^2; eps must scale like rho^d to keep the
// family self-similar.
int homogeneity(const RegularizedWeight& u) {
  int d = 1;
  for (const auto& a : u.atoms()) {
    if (a.kind != NumericAtom::Kind::Monomial) continue;
    int total = 0;
    for (int e : a.exponents) total += e;
    d = std::max(d, total);
  }
  return d;
}

}  // namespace

Estimate numeric_lelong(const RegularizedWeight& u, int k, const Point& center, const std::vector<double>& radii,
                        double eps_ratio, const QuadratureGrid& grid, double tolerance) {
  if (radii.empty()) throw Error(ErrorKind::PreconditionViolated, "need at least one radius");
  const int n = u.dim();
  std::vector<double> ratios;
  for (double rho : radii) {
    const double eps = eps_ratio * std::pow(rho, homogeneity(u));
    const auto mass = numeric_ma_mass(u.with_epsilon(eps), k, Ball{center, rho}, grid);
    ratios.push_back(mass / std::pow(rho, 2 * (n - k)));
  }
  double up = 0.0;
  double down = 0.0;
  for (std::size_t i = 1; i < ratios.size(); ++i) {
    const double d = ratios[i] - ratios[i - 1];
    up = std::max(up, d);
    down = std::max(down, -d);
  }
  if (up > tolerance && down > tolerance) {
    std::string seq;
    for (double r : ratios) seq += (seq.empty() ? "" : ", ") + std::to_string(r);
    throw Error(ErrorKind::NoConvergence, "density ratios are not monotone: " + seq);
  }
  Estimate e;
  e.value = ratios.back();
  e.error_estimate = ratios.size() > 1 ? std::abs(ratios.back() - ratios[ratios.size() - 2]) : 0.0;
  return e;
}

std::vector<OracleRow> compare_to_symbolic(const std::vector<OracleCase>& cases, double tolerance,
                                           const QuadratureGrid& grid) {
  std::vector<OracleRow> rows;
  for (const auto& c : cases) {
    OracleRow row;
    row.quantity = c.quantity;
    row.epsilon = c.epsilon;
    row.grid = grid.render();
    row.symbolic_value = c.symbolic_value;
    try {
      const auto est = c.numeric(grid);
      row.value = est.value;
      row.error_estimate = est.error_estimate;
      row.pass = std::abs(est.value - c.symbolic_value) <= tolerance;
    } catch (const Error& e) {
      row.quantity += " [" + std::string(to_string(e.kind())) + "]";
      row.value = std::numeric_limits<double>::quiet_NaN();
      row.error_estimate = std::numeric_limits<double>::quiet_NaN();
      row.pass = false;
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

std::string format_value(double v) {
  if (std::isnan(v)) return "nan";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

namespace {

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

}  // namespace

std::string render_csv(const std::vector<OracleRow>& rows) {
  std::string out = "quantity,epsilon,grid,value,error_estimate,symbolic_value,pass\n";
  for (const auto& r : rows) {
    out += csv_field(r.quantity) + "," + format_value(r.epsilon) + "," + r.grid + "," + format_value(r.value) + "," +
           format_value(r.error_estimate) + "," + format_value(r.symbolic_value) + "," + (r.pass ? "true" : "false") + "\n";
  }
  return out;
}

}  // namespace segre::oracle
