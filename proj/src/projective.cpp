#include "segre/projective.hpp"

#include <algorithm>

#include "segre/errors.hpp"

namespace segre {

namespace {

Rational sign(int k) { return Rational(k % 2 == 0 ? 1 : -1); }

}  // namespace

MetricSpec MetricSpec::line_bundle(const Weight& w) {
  if (w.ambient.rank != 1) throw Error(ErrorKind::RankMismatch, "line bundle metric needs rank 1");
  if (w.has_fiber_atoms()) throw Error(ErrorKind::BadSpec, "line bundle weight has fiber atoms");
  return MetricSpec{Form::LineBundle, 1, Weight::make(w.atoms, w.ambient.base())};
}

MetricSpec MetricSpec::conformal(const Weight& w, int rank) {
  if (w.has_fiber_atoms()) {
    throw Error(ErrorKind::BadSpec, "conformal metric e^{-w} Id needs a base weight, got " + w.render());
  }
  const auto base = Ambient::make(w.ambient.base_dim, rank, 0, w.ambient.coord_names);
  return MetricSpec{Form::ConformalDiagonal, rank, Weight::make(w.atoms, base)};
}

MetricSpec MetricSpec::explicit_o1(const Weight& w) {
  if (w.ambient.fiber_count != 1) {
    throw Error(ErrorKind::BadSpec, "explicit O(1) weight must live on a single projectivised bundle");
  }
  return MetricSpec{Form::ExplicitO1Weight, w.ambient.rank, w};
}

Ambient MetricSpec::fiber_product(int t) const { return weight.ambient.with_fibers(t); }

Current SymbolRules::segre_symbol(int k, const Ambient& base) const {
  if (k == 0) return Current::one(base);
  if (auto it = segre_symbols.find(k); it != segre_symbols.end()) {
    if (!(it->second.ambient() == base)) {
      throw Error(ErrorKind::MalformedTerm, "declared s" + std::to_string(k) + " lives on another ambient");
    }
    return it->second;
  }
  return Current::factor(base, SmoothFactor::named("s" + std::to_string(k) + "(" + theta_tag + ")", k));
}

SmoothFactor SymbolRules::theta(int factor, int rank) const {
  return SmoothFactor::theta(rank == 1 ? 0 : factor, theta_tag);
}

Weight induced_weight(const MetricSpec& spec, int factor, const Ambient& y) {
  if (y.base_dim != spec.base().base_dim || y.rank != spec.rank) {
    throw Error(ErrorKind::RankMismatch, "fiber product does not match the metric");
  }
  if (factor < 1 || factor > y.fiber_count) {
    throw Error(ErrorKind::MalformedTerm, "factor " + std::to_string(factor) + " outside the fiber product");
  }
  auto atoms = spec.weight.atoms;
  switch (spec.form) {
    case MetricSpec::Form::LineBundle: break;
    case MetricSpec::Form::ConformalDiagonal:
      if (spec.rank > 1) atoms.push_back(WeightAtom::fubini_study(factor));
      break;
    case MetricSpec::Form::ExplicitO1Weight:
      for (auto& a : atoms) {
        if (a.is_fiber()) a.factor = factor;
      }
      break;
  }
  return Weight::make(std::move(atoms), y);
}

std::vector<CoordCycle> degeneracy_locus(const MetricSpec& spec) {
  const auto phi = induced_weight(spec, 1, spec.fiber_product(1));
  std::vector<CoordCycle> parts;
  for (const auto& c : unbounded_locus(phi)) parts.push_back(CoordCycle::base(c.base_zero, 0));
  std::sort(parts.begin(), parts.end());
  parts.erase(std::unique(parts.begin(), parts.end()), parts.end());
  std::vector<CoordCycle> maximal;
  for (const auto& p : parts) {
    const bool covered = std::any_of(parts.begin(), parts.end(),
                                     [&](const CoordCycle& q) { return !(q == p) && p.contained_in(q); });
    if (!covered) maximal.push_back(p);
  }
  return maximal;
}

namespace {

Current readdress(const Current& rhs, int factor, const Ambient& y) {
  std::vector<Term> out;
  for (const auto& t : rhs.terms()) {
    Term m{t.coeff, {}, CoordCycle::base(t.cycle.base_zero, y.fiber_count)};
    m.cycle.fiber_zero[static_cast<std::size_t>(factor - 1)] = t.cycle.fiber_zero.at(0);
    for (const auto& [g, k] : t.smooth) {
      SmoothFactor f = g;
      if ((f.kind == SmoothFactor::Kind::Theta && f.factor == 1) || f.kind == SmoothFactor::Kind::FubiniStudy) {
        f.factor = factor;
      }
      m.smooth[f] += k;
    }
    out.push_back(std::move(m));
  }
  return normalize(std::move(out), y);
}

// Splits off theta_j ^ [xi_a = 0] when the term carries both.
std::optional<Current> substitute_once(const Term& term, const SymbolRules& rules, const Ambient& y) {
  if (y.rank == 1) return std::nullopt;
  for (int j = 1; j <= y.fiber_count; ++j) {
    const auto theta = rules.theta(j, y.rank);
    auto it = term.smooth.find(theta);
    if (it == term.smooth.end()) continue;
    const auto& slot = term.cycle.fiber_zero[static_cast<std::size_t>(j - 1)];
    for (const auto& sub : rules.substitutions) {
      if (!slot.count(sub.fiber_index)) continue;
      if (!(sub.rhs.ambient() == y.with_fibers(1))) {
        throw Error(ErrorKind::MalformedTerm, "substitution right-hand side lives on another ambient");
      }
      Term rest = term;
      if (--rest.smooth[theta] == 0) rest.smooth.erase(theta);
      rest.cycle.fiber_zero[static_cast<std::size_t>(j - 1)].erase(sub.fiber_index);
      return wedge(normalize({rest}, y), readdress(sub.rhs, j, y));
    }
  }
  return std::nullopt;
}

}  // namespace

Current apply_substitutions(const Current& t, const SymbolRules& rules) {
  if (rules.substitutions.empty()) return t;
  const Ambient& y = t.ambient();
  Current current = t;
  for (int round = 0; round < 64; ++round) {
    Current next = Current::zero(y);
    bool changed = false;
    for (const auto& term : current.terms()) {
      if (auto replaced = substitute_once(term, rules, y)) {
        next += *replaced;
        changed = true;
      } else {
        next += normalize({term}, y);
      }
    }
    if (!changed) return current;
    current = next;
  }
  throw Error(ErrorKind::UnsupportedPushforward, "substitution rules do not terminate");
}

Current pushforward(const Current& t, const SymbolRules& rules) {
  const Ambient& y = t.ambient();
  const Ambient x = y.base();
  const int r = y.rank;
  const Current reduced = apply_substitutions(t, rules);
  Current out = Current::zero(x);
  for (const auto& term : reduced.terms()) {
    Term base{term.coeff, {}, CoordCycle::base(term.cycle.base_zero, 0)};
    std::vector<int> theta(static_cast<std::size_t>(y.fiber_count), 0);
    std::vector<int> fs(static_cast<std::size_t>(y.fiber_count), 0);
    for (const auto& [f, k] : term.smooth) {
      const bool fiber_level = (f.kind == SmoothFactor::Kind::Theta && f.factor > 0) ||
                               f.kind == SmoothFactor::Kind::FubiniStudy;
      if (!fiber_level) {
        base.smooth[f] = k;
        continue;
      }
      if (f.kind == SmoothFactor::Kind::Theta && f.name != rules.theta_tag) {
        throw Error(ErrorKind::UnsupportedPushforward,
                    "no Segre law declared for reference symbol '" + f.name + "' in " + render_term(term, y));
      }
      auto& slot = f.kind == SmoothFactor::Kind::Theta ? theta : fs;
      slot[static_cast<std::size_t>(f.factor - 1)] += k;
    }
    Current value = normalize({base}, x);
    for (int j = 0; j < y.fiber_count && !value.is_zero(); ++j) {
      const int a = theta[static_cast<std::size_t>(j)];
      const int z = static_cast<int>(term.cycle.fiber_zero[static_cast<std::size_t>(j)].size());
      const int b = fs[static_cast<std::size_t>(j)];
      if (a > 0 && (b > 0 || z > 0)) {
        throw Error(ErrorKind::UnsupportedPushforward,
                    "mixed theta and fiber content in factor " + std::to_string(j + 1) + ": " +
                        render_term(term, y) + "; declare a substitution");
      }
      if (a > 0) {
        if (a < r - 1) {
          value = Current::zero(x);
        } else {
          value = wedge(value, rules.segre_symbol(a - r + 1, x).scaled(sign(a - r + 1)));
        }
      } else if (b + z != r - 1) {
        value = Current::zero(x);
      }
    }
    out += value;
  }
  return out;
}

Current segre_product(const std::vector<int>& ks, const MetricSpec& spec, const SymbolRules& rules) {
  if (ks.empty()) throw Error(ErrorKind::PreconditionViolated, "empty Segre product");
  const int t = static_cast<int>(ks.size());
  const Ambient y = spec.fiber_product(t);
  Current acc = Current::one(y);
  int total = 0;
  for (int j = 1; j <= t; ++j) {
    const int k = ks[static_cast<std::size_t>(t - j)];
    if (k < 0) throw Error(ErrorKind::PreconditionViolated, "negative Segre index");
    total += k;
    const auto phi = induced_weight(spec, j, y);
    const auto theta = Current::factor(y, rules.theta(j, spec.rank));
    acc = bracket_power(phi, theta, k + spec.rank - 1, acc);
  }
  return pushforward(acc, rules).scaled(sign(total));
}

Current segre_current(int k, const MetricSpec& spec, const SymbolRules& rules) {
  if (k < 0) throw Error(ErrorKind::PreconditionViolated, "negative Segre index");
  return segre_product({k}, spec, rules);
}

std::vector<std::vector<int>> compositions(int k) {
  std::vector<std::vector<int>> out;
  if (k <= 0) return out;
  const unsigned gaps = static_cast<unsigned>(k - 1);
  for (unsigned mask = 0; mask < (1u << gaps); ++mask) {
    std::vector<int> parts;
    int run = 1;
    for (unsigned g = 0; g < gaps; ++g) {
      if (mask & (1u << g)) {
        parts.push_back(run);
        run = 1;
      } else {
        ++run;
      }
    }
    parts.push_back(run);
    out.push_back(std::move(parts));
  }
  std::sort(out.begin(), out.end());
  return out;
}

Current chern_current(int k, const MetricSpec& spec, const SymbolRules& rules) {
  const Ambient x = spec.base();
  if (k < 0) throw Error(ErrorKind::PreconditionViolated, "negative Chern index");
  if (k == 0) return Current::one(x);
  Current out = Current::zero(x);
  for (const auto& comp : compositions(k)) {
    std::vector<int> ks(comp.rbegin(), comp.rend());
    out += segre_product(ks, spec, rules).scaled(sign(static_cast<int>(comp.size())));
  }
  return out;
}

Current pushed_ma_power(int m, const MetricSpec& spec, const SymbolRules& rules) {
  const Ambient y = spec.fiber_product(1);
  return pushforward(ma_power(induced_weight(spec, 1, y), m), rules);
}

namespace {

Rational binomial(int m, int i) {
  Rational b(1);
  for (int q = 1; q <= i; ++q) b = b * Rational(m - q + 1, q);
  return b;
}

// prod_j (theta_j + D_j)^{m_j} expanded binomially, D_j = dd^c phi_j - theta_j.
Current binomial_side(const MetricSpec& spec, const SymbolRules& rules, const std::vector<int>& ms) {
  const int t = static_cast<int>(ms.size());
  const Ambient y = spec.fiber_product(t);
  Current acc = Current::one(y);
  for (int j = 1; j <= t; ++j) {
    const auto theta = Current::factor(y, rules.theta(j, spec.rank));
    const auto d = ddc(induced_weight(spec, j, y)) - theta;
    const int m = ms[static_cast<std::size_t>(j - 1)];
    Current sum = Current::zero(y);
    for (int i = 0; i <= m; ++i) {
      sum += wedge(wedge_power(theta, m - i), wedge_power(d, i)).scaled(binomial(m, i));
    }
    acc = wedge(acc, sum);
  }
  return acc;
}

Current bracket_side(const MetricSpec& spec, const SymbolRules& rules, const std::vector<int>& ms) {
  const int t = static_cast<int>(ms.size());
  const Ambient y = spec.fiber_product(t);
  Current acc = Current::one(y);
  for (int j = 1; j <= t; ++j) {
    const auto theta = Current::factor(y, rules.theta(j, spec.rank));
    acc = bracket_power(induced_weight(spec, j, y), theta, ms[static_cast<std::size_t>(j - 1)], acc);
  }
  return acc;
}

std::string join(const std::vector<int>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + std::to_string(v[i]);
  return s;
}

}  // namespace

CheckReport smooth_segre_check(const MetricSpec& spec, const SymbolRules& rules, int max_k) {
  CheckReport report;
  auto fail = [&](std::string what) {
    report.ok = false;
    report.failures.push_back(std::move(what));
  };
  if (!spec.is_smooth()) {
    fail("metric weight " + spec.weight.render() + " has singular atoms");
    return report;
  }
  std::vector<Current> s;
  std::vector<Current> c;
  for (int k = 0; k <= max_k; ++k) {
    s.push_back(segre_current(k, spec, rules));
    c.push_back(chern_current(k, spec, rules));
  }
  for (int k = 1; k <= max_k; ++k) {
    Current sum = Current::zero(spec.base());
    for (int i = 0; i <= k; ++i) sum += wedge(s[static_cast<std::size_t>(i)], c[static_cast<std::size_t>(k - i)]);
    const std::string name = "sum_{i+j=" + std::to_string(k) + "} s_i c_j = 0";
    report.checked.push_back(name);
    if (!sum.is_zero()) fail(name + " fails: got " + sum.render());
  }
  const int top = spec.rank - 1 + max_k;
  for (int a = 0; a <= top; ++a) {
    const std::vector<int> one{a};
    if (!(bracket_side(spec, rules, one) == binomial_side(spec, rules, one))) {
      fail("theta-corrected power " + join(one) + " differs from its binomial decomposition");
    }
    for (int b = 0; b <= top; ++b) {
      const std::vector<int> two{a, b};
      if (!(bracket_side(spec, rules, two) == binomial_side(spec, rules, two))) {
        fail("theta-corrected product " + join(two) + " differs from its binomial decomposition");
      }
    }
  }
  report.checked.push_back("binomial decomposition of theta-corrected products, t <= 2, exponents <= " +
                           std::to_string(top));
  return report;
}

}  // namespace segre
