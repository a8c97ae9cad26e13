#pragma once

#include <random>

#include "segre/current.hpp"
#include "segre/weights.hpp"

namespace segre::testing {

inline int uniform(std::mt19937& rng, int lo, int hi) {
  return std::uniform_int_distribution<int>(lo, hi)(rng);
}

inline IndexSet random_subset(std::mt19937& rng, int n, int max_size) {
  IndexSet s;
  for (int i = 1; i <= n; ++i) {
    if (static_cast<int>(s.size()) < max_size && uniform(rng, 0, 2) == 0) s.insert(i);
  }
  return s;
}

inline CoordCycle random_cycle(std::mt19937& rng, const Ambient& a) {
  CoordCycle c = CoordCycle::whole(a.fiber_count);
  c.base_zero = random_subset(rng, a.base_dim, a.base_dim);
  for (auto& f : c.fiber_zero) f = random_subset(rng, a.rank, a.fiber_dim());
  return c;
}

inline SmoothFactor random_factor(std::mt19937& rng, const Ambient& a) {
  switch (uniform(rng, 0, 3)) {
    case 0:
      if (a.fiber_count > 0) return SmoothFactor::theta(uniform(rng, 1, a.fiber_count), "theta");
      if (a.rank == 1) return SmoothFactor::theta(0, "theta");
      break;
    case 1:
      if (a.fiber_count > 0 && a.rank > 1) return SmoothFactor::fubini_study(uniform(rng, 1, a.fiber_count));
      break;
    case 2:
      if (a.base_dim >= 2) {
        IndexSet s;
        while (s.size() < 2) s = random_subset(rng, a.base_dim, a.base_dim);
        return SmoothFactor::sigma(s);
      }
      break;
    default: break;
  }
  return SmoothFactor::named(uniform(rng, 0, 1) == 0 ? "beta" : "gamma", uniform(rng, 1, 2));
}

/// Raw term that may violate budgets; never references out-of-range data.
inline Term random_term(std::mt19937& rng, const Ambient& a, bool with_cycle = true) {
  Term t;
  t.coeff = Rational(uniform(rng, -4, 4), uniform(rng, 1, 3));
  t.cycle = with_cycle ? random_cycle(rng, a) : CoordCycle::whole(a.fiber_count);
  const int factors = uniform(rng, 0, 3);
  for (int i = 0; i < factors; ++i) t.smooth[random_factor(rng, a)] += 1;
  return t;
}

inline Current random_current(std::mt19937& rng, const Ambient& a, int max_terms = 4,
                              bool with_cycle = true) {
  std::vector<Term> terms;
  const int k = uniform(rng, 0, max_terms);
  for (int i = 0; i < k; ++i) terms.push_back(random_term(rng, a, with_cycle));
  try {
    return normalize(std::move(terms), a);
  } catch (const std::exception&) {
    return Current::zero(a);
  }
}

inline Ambient random_ambient(std::mt19937& rng) {
  const int n = uniform(rng, 1, 3);
  const int r = uniform(rng, 1, 2);
  const int t = uniform(rng, 0, 2);
  return Ambient::make(n, r, t);
}

/// Base weights with monomial exponents <= 2, optional norm log, optional fs/section atoms.
inline Weight random_weight(std::mt19937& rng, const Ambient& a, bool fiber_atoms = true) {
  std::vector<WeightAtom> atoms;
  const int monomials = uniform(rng, 0, 2);
  for (int i = 0; i < monomials; ++i) {
    std::vector<int> e(static_cast<std::size_t>(a.base_dim));
    while (std::all_of(e.begin(), e.end(), [](int x) { return x == 0; })) {
      for (auto& x : e) x = uniform(rng, 0, 2);
    }
    atoms.push_back(WeightAtom::monomial(e, Rational(uniform(rng, 1, 2))));
  }
  if (a.base_dim >= 2 && uniform(rng, 0, 2) == 0) {
    IndexSet s;
    while (s.size() < 2) s = random_subset(rng, a.base_dim, a.base_dim);
    atoms.push_back(WeightAtom::norm(s));
  }
  if (fiber_atoms && a.fiber_count > 0 && a.rank > 1) {
    if (uniform(rng, 0, 1) == 0) atoms.push_back(WeightAtom::fubini_study(1));
    if (uniform(rng, 0, 2) == 0) atoms.push_back(WeightAtom::section(1, uniform(rng, 1, a.rank)));
  }
  if (atoms.empty()) atoms.push_back(WeightAtom::smooth("v"));
  return Weight::make(atoms, a);
}

}  // namespace segre::testing
