#include "segre/weights.hpp"

#include <algorithm>
#include <limits>

#include "segre/errors.hpp"

namespace segre {

WeightAtom WeightAtom::monomial(std::vector<int> exponents, Rational c) {
  WeightAtom a;
  a.kind = Kind::MonomialLog;
  a.exponents = std::move(exponents);
  a.coeff = c;
  return a;
}

WeightAtom WeightAtom::norm(IndexSet coords, Rational c) {
  WeightAtom a;
  a.kind = Kind::NormLog;
  a.coords = std::move(coords);
  a.coeff = c;
  return a;
}

WeightAtom WeightAtom::section(int factor, int index) {
  WeightAtom a;
  a.kind = Kind::FiberSectionLog;
  a.factor = factor;
  a.index = index;
  return a;
}

WeightAtom WeightAtom::fubini_study(int factor) {
  WeightAtom a;
  a.kind = Kind::FiberFS;
  a.factor = factor;
  return a;
}

WeightAtom WeightAtom::smooth(std::string name) {
  WeightAtom a;
  a.kind = Kind::Smooth;
  a.name = std::move(name);
  return a;
}

WeightAtom WeightAtom::reference(int factor, std::string tag) {
  WeightAtom a;
  a.kind = Kind::Reference;
  a.factor = factor;
  a.name = std::move(tag);
  return a;
}

bool WeightAtom::is_fiber() const {
  return kind == Kind::FiberSectionLog || kind == Kind::FiberFS ||
         (kind == Kind::Reference && factor > 0);
}

bool WeightAtom::is_singular() const {
  return kind == Kind::MonomialLog || kind == Kind::NormLog || kind == Kind::FiberSectionLog;
}

Weight Weight::make(std::vector<WeightAtom> atoms, const Ambient& ambient) {
  auto bad = [](const std::string& what) { throw Error(ErrorKind::BadSpec, what); };
  std::vector<int> fs_count(static_cast<std::size_t>(ambient.fiber_count), 0);
  for (const auto& a : atoms) {
    switch (a.kind) {
      case WeightAtom::Kind::MonomialLog: {
        if (static_cast<int>(a.exponents.size()) != ambient.base_dim) {
          bad("monomial exponent vector has wrong length");
        }
        if (std::any_of(a.exponents.begin(), a.exponents.end(), [](int e) { return e < 0; }) ||
            std::all_of(a.exponents.begin(), a.exponents.end(), [](int e) { return e == 0; })) {
          bad("monomial exponents must be nonnegative and not all zero");
        }
        if (a.coeff.numerator() <= 0) bad("monomial log coefficient must be positive");
        break;
      }
      case WeightAtom::Kind::NormLog:
        if (a.coords.size() < 2) bad("norm log needs |I| >= 2; write log|x_i|^2 as a monomial");
        if (*a.coords.begin() < 1 || *a.coords.rbegin() > ambient.base_dim) {
          bad("norm log coordinate out of range");
        }
        if (a.coeff.numerator() <= 0) bad("norm log coefficient must be positive");
        break;
      case WeightAtom::Kind::FiberSectionLog:
        if (a.factor < 1 || a.factor > ambient.fiber_count) bad("section references missing factor");
        if (ambient.rank < 2) bad("fiber sections need rank >= 2");
        if (a.index < 1 || a.index > ambient.rank) bad("section index out of range");
        break;
      case WeightAtom::Kind::FiberFS:
        if (a.factor < 1 || a.factor > ambient.fiber_count) bad("fs references missing factor");
        if (++fs_count[static_cast<std::size_t>(a.factor - 1)] > 1) {
          bad("at most one fs weight per fiber factor");
        }
        break;
      case WeightAtom::Kind::Smooth:
        if (a.name.empty()) bad("smooth weight needs a name");
        break;
      case WeightAtom::Kind::Reference:
        if (a.factor < 0 || a.factor > ambient.fiber_count || (a.factor == 0) != (ambient.rank == 1)) {
          bad("reference weight references missing factor");
        }
        break;
    }
  }
  return Weight{std::move(atoms), ambient};
}

bool Weight::has_fiber_atoms() const {
  return std::any_of(atoms.begin(), atoms.end(), [](const WeightAtom& a) { return a.is_fiber(); });
}

bool Weight::has_singular_atoms() const {
  return std::any_of(atoms.begin(), atoms.end(), [](const WeightAtom& a) { return a.is_singular(); });
}

Weight Weight::lifted(const Ambient& target) const {
  if (target.base_dim != ambient.base_dim || target.rank != ambient.rank) {
    throw Error(ErrorKind::BadSpec, "cannot lift weight to an ambient with different n or r");
  }
  return make(atoms, target);
}

Weight Weight::scaled(const Rational& c) const {
  Weight w = *this;
  for (auto& a : w.atoms) {
    if (a.kind != WeightAtom::Kind::MonomialLog && a.kind != WeightAtom::Kind::NormLog) {
      throw Error(ErrorKind::BadSpec, "only log atoms carry a rescalable coefficient");
    }
    a.coeff *= c;
  }
  return w;
}

namespace {

std::string coeff_prefix(const Rational& c) {
  return c == Rational(1) ? std::string() : to_string(c) + "*";
}

std::string factor_suffix(int factor) {
  return factor == 1 ? std::string() : "_" + std::to_string(factor);
}

}  // namespace

std::string Weight::render() const {
  if (atoms.empty()) return "0";
  std::string out;
  for (std::size_t i = 0; i < atoms.size(); ++i) {
    const auto& a = atoms[i];
    if (i > 0) out += " + ";
    switch (a.kind) {
      case WeightAtom::Kind::MonomialLog: {
        out += coeff_prefix(a.coeff) + "log|";
        bool first = true;
        for (std::size_t k = 0; k < a.exponents.size(); ++k) {
          if (a.exponents[k] == 0) continue;
          out += (first ? "" : "*") + ambient.coord_names[k];
          if (a.exponents[k] > 1) out += "^" + std::to_string(a.exponents[k]);
          first = false;
        }
        out += "|^2";
        break;
      }
      case WeightAtom::Kind::NormLog: {
        out += coeff_prefix(a.coeff) + "log|";
        bool first = true;
        for (int k : a.coords) {
          out += (first ? "" : ",") + ambient.coord_names[static_cast<std::size_t>(k - 1)];
          first = false;
        }
        out += "|^2";
        break;
      }
      case WeightAtom::Kind::FiberSectionLog:
        out += "section(" + (a.factor == 1 ? std::string() : std::to_string(a.factor) + ":") + "xi_" +
               std::to_string(a.index) + ")";
        break;
      case WeightAtom::Kind::FiberFS: out += "fs" + factor_suffix(a.factor); break;
      case WeightAtom::Kind::Smooth: out += "smooth(" + a.name + ")"; break;
      case WeightAtom::Kind::Reference: out += "psi" + (a.factor > 1 ? factor_suffix(a.factor) : ""); break;
    }
  }
  return out;
}

Current ddc_atom(const WeightAtom& a, const Ambient& ambient) {
  const int t = ambient.fiber_count;
  switch (a.kind) {
    case WeightAtom::Kind::MonomialLog: {
      std::vector<Term> terms;
      for (std::size_t i = 0; i < a.exponents.size(); ++i) {
        if (a.exponents[i] == 0) continue;
        terms.push_back(Term{a.coeff * a.exponents[i], {},
                             CoordCycle::base({static_cast<int>(i) + 1}, t)});
      }
      return normalize(std::move(terms), ambient);
    }
    case WeightAtom::Kind::NormLog:
      return Current::factor(ambient, SmoothFactor::sigma(a.coords), 1, a.coeff);
    case WeightAtom::Kind::FiberSectionLog:
      return Current::cycle(ambient, CoordCycle::fiber(t, a.factor, a.index));
    case WeightAtom::Kind::FiberFS:
      return Current::factor(ambient, SmoothFactor::fubini_study(a.factor));
    case WeightAtom::Kind::Smooth:
      return Current::factor(ambient, SmoothFactor::named(a.name, 1));
    case WeightAtom::Kind::Reference:
      return Current::factor(ambient, SmoothFactor::theta(a.factor, a.name));
  }
  return Current::zero(ambient);
}

Current ddc(const Weight& u) { return ddc_weight_times(u, Current::one(u.ambient)); }

std::vector<CoordCycle> unbounded_locus(const Weight& u) {
  const int t = u.ambient.fiber_count;
  std::vector<CoordCycle> parts;
  for (const auto& a : u.atoms) {
    switch (a.kind) {
      case WeightAtom::Kind::MonomialLog:
        for (std::size_t i = 0; i < a.exponents.size(); ++i) {
          if (a.exponents[i] > 0) parts.push_back(CoordCycle::base({static_cast<int>(i) + 1}, t));
        }
        break;
      case WeightAtom::Kind::NormLog: parts.push_back(CoordCycle::base(a.coords, t)); break;
      case WeightAtom::Kind::FiberSectionLog:
        parts.push_back(CoordCycle::fiber(t, a.factor, a.index));
        break;
      default: break;
    }
  }
  std::sort(parts.begin(), parts.end());
  parts.erase(std::unique(parts.begin(), parts.end()), parts.end());
  std::vector<CoordCycle> maximal;
  for (const auto& p : parts) {
    const bool covered = std::any_of(parts.begin(), parts.end(), [&](const CoordCycle& q) {
      return !(q == p) && p.contained_in(q);
    });
    if (!covered) maximal.push_back(p);
  }
  return maximal;
}

int locus_codim(const std::vector<CoordCycle>& locus, const Ambient& ambient) {
  int best = ambient.total_dim() + 1;
  for (const auto& c : locus) best = std::min(best, c.codim());
  return best;
}

Current ddc_weight_times(const Weight& u, const Current& t) {
  if (!(u.ambient == t.ambient())) {
    throw Error(ErrorKind::MalformedTerm, "weight and current live on different ambients");
  }
  Current out = Current::zero(t.ambient());
  if (t.is_zero()) return out;
  for (const auto& a : u.atoms) out += wedge(ddc_atom(a, t.ambient()), t);
  return out;
}

Current ma_power(const Weight& u, int m) {
  const auto z = unbounded_locus(u);
  Current t = Current::one(u.ambient);
  for (int k = 1; k <= m && !t.is_zero(); ++k) t = ddc_weight_times(u, restrict_off(t, z));
  return t;
}

namespace {

void check_domain(const ProductFactor& f, std::size_t position) {
  const auto z = unbounded_locus(f.weight);
  const auto& d = f.domain;
  bool ok = true;
  if (d.polarity == ConstructibleSet::Polarity::Union) {
    // A member inside Z puts part of U on the unbounded locus.
    for (const auto& m : d.members) {
      ok = ok && std::none_of(z.begin(), z.end(), [&](const CoordCycle& c) { return m.contained_in(c); });
    }
  } else {
    // U = X \ (union of members) avoids Z iff every component of Z is covered.
    for (const auto& c : z) {
      ok = ok && std::any_of(d.members.begin(), d.members.end(),
                             [&](const CoordCycle& m) { return c.contained_in(m); });
    }
  }
  if (!ok) {
    throw Error(ErrorKind::PreconditionViolated,
                "domain of factor " + std::to_string(position + 1) + " meets the unbounded locus of " +
                    f.weight.render());
  }
}

}  // namespace

Current generalized_product(std::span<const ProductFactor> factors) {
  if (factors.empty()) throw Error(ErrorKind::PreconditionViolated, "empty product");
  const Ambient& ambient = factors.front().weight.ambient;
  Current t = Current::one(ambient);
  for (std::size_t i = 0; i < factors.size(); ++i) {
    check_domain(factors[i], i);
    t = ddc_weight_times(factors[i].weight, restrict_to(t, factors[i].domain));
  }
  return t;
}

namespace {

void require_smooth_alpha(const Current& alpha) {
  for (const auto& term : alpha.terms()) {
    const bool sigma = std::any_of(term.smooth.begin(), term.smooth.end(), [](const auto& kv) {
      return kv.first.kind == SmoothFactor::Kind::Sigma;
    });
    if (!term.cycle.is_trivial() || sigma) {
      throw Error(ErrorKind::NotSmoothAlpha,
                  "alpha term " + render_term(term, alpha.ambient()) + " is not a smooth symbol");
    }
  }
}

}  // namespace

Current bracket_apply(const Weight& u, const Current& alpha, const Current& t) {
  require_smooth_alpha(alpha);
  const auto z = unbounded_locus(u);
  return ddc_weight_times(u, restrict_off(t, z)) +
         wedge(alpha, restrict_to(t, ConstructibleSet::union_of(z)));
}

Current bracket_power(const Weight& u, const Current& alpha, int m, const Current& start) {
  require_smooth_alpha(alpha);
  Current t = start;
  for (int k = 0; k < m && !t.is_zero(); ++k) t = bracket_apply(u, alpha, t);
  return t;
}

Current bracket_power(const Weight& u, const Current& alpha, int m) {
  return bracket_power(u, alpha, m, Current::one(u.ambient));
}

Current wedge_power(const Current& alpha, int k) {
  Current out = Current::one(alpha.ambient());
  for (int i = 0; i < k; ++i) out = wedge(out, alpha);
  return out;
}

Current bracket_expand(const Weight& u, const Current& alpha, int m) {
  require_smooth_alpha(alpha);
  if (m == 0) return Current::one(u.ambient);
  const auto z = unbounded_locus(u);
  const auto on_z = ConstructibleSet::union_of(z);
  Current out = ma_power(u, m);
  for (int l = 0; l < m; ++l) {
    out += wedge(wedge_power(alpha, m - l), restrict_to(ma_power(u, l), on_z));
  }
  return out;
}

}  // namespace segre
