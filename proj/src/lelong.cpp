#include "segre/lelong.hpp"

#include "segre/errors.hpp"

namespace segre {

std::vector<BasePoint> BasePoint::all(int n) {
  std::vector<BasePoint> out;
  for (unsigned mask = 0; mask < (1u << n); ++mask) {
    BasePoint p = generic(n);
    for (int i = 0; i < n; ++i) p.zero[static_cast<std::size_t>(i)] = !(mask & (1u << i));
    out.push_back(std::move(p));
  }
  return out;
}

bool BasePoint::lies_on(const IndexSet& zero_coords) const {
  for (int i : zero_coords) {
    if (!zero.at(static_cast<std::size_t>(i - 1))) return false;
  }
  return true;
}

bool BasePoint::lies_on(const CoordCycle& c) const { return lies_on(c.base_zero); }

std::string BasePoint::render() const {
  bool all_zero = true;
  bool none_zero = true;
  for (bool z : zero) {
    all_zero = all_zero && z;
    none_zero = none_zero && !z;
  }
  if (all_zero) return "origin";
  if (none_zero) return "generic";
  std::string out = "(";
  for (std::size_t i = 0; i < zero.size(); ++i) out += (i ? "," : "") + std::string(zero[i] ? "0" : "g");
  return out + ")";
}

Rational lelong_number(const Current& t, const BasePoint& p) {
  const Ambient& a = t.ambient();
  if (a.fiber_count != 0) {
    throw Error(ErrorKind::MalformedTerm, "Lelong numbers are evaluated on base currents; push forward first");
  }
  if (static_cast<int>(p.zero.size()) != a.base_dim) {
    throw Error(ErrorKind::MalformedTerm, "point arity differs from the base dimension");
  }
  Rational total(0);
  for (const auto& term : t.terms()) {
    if (!p.lies_on(term.cycle)) continue;
    const SmoothFactor* family = nullptr;
    bool smooth_part = false;
    int families = 0;
    for (const auto& [f, k] : term.smooth) {
      if (f.kind == SmoothFactor::Kind::Sigma) {
        family = &f;
        ++families;
      } else {
        smooth_part = true;
      }
    }
    if (smooth_part) continue;
    if (families > 1) {
      throw Error(ErrorKind::MultipleSigmaFamilies,
                  "no density rule for " + render_term(term, a) + " (distinct sigma families)");
    }
    if (family && !p.lies_on(family->coords)) continue;
    total += term.coeff;
  }
  return total;
}

ThetaIndependenceReport theta_independence_check(const MetricSpec& spec, const SymbolRules& a,
                                                 const SymbolRules& b, int k_max) {
  ThetaIndependenceReport report;
  const auto points = BasePoint::all(spec.base().base_dim);
  for (int k = 1; k <= k_max; ++k) {
    const std::pair<std::string, Current> pairs[] = {
        {"s" + std::to_string(k), segre_current(k, spec, a)},
        {"c" + std::to_string(k), chern_current(k, spec, a)},
    };
    const Current other[] = {segre_current(k, spec, b), chern_current(k, spec, b)};
    for (std::size_t q = 0; q < 2; ++q) {
      for (const auto& p : points) {
        const auto va = lelong_number(pairs[q].second, p);
        const auto vb = lelong_number(other[q], p);
        ++report.comparisons;
        if (va != vb) {
          report.ok = false;
          report.counterexamples.push_back("nu(" + pairs[q].first + ", " + p.render() + "): " + to_string(va) +
                                           " under '" + a.theta_tag + "' vs " + to_string(vb) + " under '" +
                                           b.theta_tag + "'");
        }
      }
    }
    const auto v = degeneracy_locus(spec);
    for (const auto& comp : compositions(k)) {
      const std::vector<int> ks(comp.rbegin(), comp.rend());
      const auto pa = restrict_off(segre_product(ks, spec, a), v);
      const auto pb = restrict_off(segre_product(ks, spec, b), v);
      ++report.comparisons;
      if (!(pa == pb)) {
        std::string label;
        for (std::size_t i = 0; i < ks.size(); ++i) label += (i ? "," : "") + std::to_string(ks[i]);
        report.ok = false;
        report.counterexamples.push_back("segre_product [" + label + "] off the degeneracy locus: " + pa.render() +
                                         " vs " + pb.render());
      }
    }
  }
  return report;
}

SymbolRules swap_theta(const SymbolRules& rules, const std::string& tag) {
  SymbolRules out = rules;
  out.theta_tag = tag;
  for (auto& [k, value] : out.segre_symbols) {
    if (value.is_zero()) continue;
    value = Current::factor(value.ambient(), SmoothFactor::named("s" + std::to_string(k) + "(" + tag + ")", k));
  }
  return out;
}

}  // namespace segre
