#include "segre/current.hpp"

#include <algorithm>
#include <sstream>
#include <tuple>

#include "segre/errors.hpp"

namespace segre {

// ---------------------------------------------------------------- Ambient

Ambient Ambient::make(int base_dim, int rank, int fiber_count, std::vector<std::string> names) {
  if (base_dim < 1 || rank < 1 || fiber_count < 0) {
    throw Error(ErrorKind::MalformedTerm, "ambient needs n >= 1, r >= 1, t >= 0");
  }
  if (names.empty()) {
    for (int i = 1; i <= base_dim; ++i) names.push_back("x" + std::to_string(i));
  }
  if (static_cast<int>(names.size()) != base_dim) {
    throw Error(ErrorKind::MalformedTerm, "coordinate name count differs from base dimension");
  }
  return Ambient{base_dim, rank, fiber_count, std::move(names)};
}

Ambient Ambient::with_fibers(int t) const {
  Ambient a = *this;
  a.fiber_count = t;
  return a;
}

// ---------------------------------------------------------------- CoordCycle

CoordCycle CoordCycle::whole(int fiber_count) {
  return CoordCycle{{}, std::vector<IndexSet>(static_cast<std::size_t>(fiber_count))};
}

CoordCycle CoordCycle::base(IndexSet zero, int fiber_count) {
  CoordCycle c = whole(fiber_count);
  c.base_zero = std::move(zero);
  return c;
}

CoordCycle CoordCycle::fiber(int fiber_count, int factor, int index) {
  CoordCycle c = whole(fiber_count);
  c.fiber_zero.at(static_cast<std::size_t>(factor - 1)).insert(index);
  return c;
}

int CoordCycle::codim() const {
  auto total = static_cast<int>(base_zero.size());
  for (const auto& f : fiber_zero) total += static_cast<int>(f.size());
  return total;
}

bool CoordCycle::contained_in(const CoordCycle& other) const {
  if (!std::includes(base_zero.begin(), base_zero.end(), other.base_zero.begin(),
                     other.base_zero.end())) {
    return false;
  }
  if (fiber_zero.size() != other.fiber_zero.size()) return false;
  for (std::size_t j = 0; j < fiber_zero.size(); ++j) {
    if (!std::includes(fiber_zero[j].begin(), fiber_zero[j].end(), other.fiber_zero[j].begin(),
                       other.fiber_zero[j].end())) {
      return false;
    }
  }
  return true;
}

bool CoordCycle::operator<(const CoordCycle& other) const {
  return std::tie(base_zero, fiber_zero) < std::tie(other.base_zero, other.fiber_zero);
}

// ---------------------------------------------------------------- SmoothFactor

SmoothFactor SmoothFactor::theta(int factor, std::string tag) {
  SmoothFactor f;
  f.kind = Kind::Theta;
  f.factor = factor;
  f.name = std::move(tag);
  return f;
}

SmoothFactor SmoothFactor::fubini_study(int factor) {
  SmoothFactor f;
  f.kind = Kind::FubiniStudy;
  f.factor = factor;
  return f;
}

SmoothFactor SmoothFactor::sigma(IndexSet coords) {
  SmoothFactor f;
  f.kind = Kind::Sigma;
  f.coords = std::move(coords);
  return f;
}

SmoothFactor SmoothFactor::named(std::string name, int degree) {
  SmoothFactor f;
  f.kind = Kind::Named;
  f.name = std::move(name);
  f.degree = degree;
  return f;
}

bool SmoothFactor::operator<(const SmoothFactor& o) const {
  return std::tie(kind, factor, name, coords, degree) <
         std::tie(o.kind, o.factor, o.name, o.coords, o.degree);
}

int degree(const Monomial& m) {
  int d = 0;
  for (const auto& [f, k] : m) d += f.degree * k;
  return d;
}

// ---------------------------------------------------------------- normalize

namespace {

void validate(const Term& t, const Ambient& a) {
  auto bad = [](const std::string& what) { throw Error(ErrorKind::MalformedTerm, what); };
  if (static_cast<int>(t.cycle.fiber_zero.size()) != a.fiber_count) {
    bad("cycle has " + std::to_string(t.cycle.fiber_zero.size()) + " fiber slots, ambient has " +
        std::to_string(a.fiber_count));
  }
  for (int i : t.cycle.base_zero) {
    if (i < 1 || i > a.base_dim) bad("base coordinate " + std::to_string(i) + " out of range");
  }
  for (const auto& f : t.cycle.fiber_zero) {
    for (int i : f) {
      if (i < 1 || i > a.rank) bad("fiber coordinate xi_" + std::to_string(i) + " out of range");
    }
  }
  for (const auto& [f, k] : t.smooth) {
    if (k < 1) bad("nonpositive exponent on smooth factor");
    switch (f.kind) {
      case SmoothFactor::Kind::Theta:
        if (f.factor < 0 || f.factor > a.fiber_count || (f.factor == 0 && a.rank != 1)) {
          bad("theta references fiber factor " + std::to_string(f.factor));
        }
        break;
      case SmoothFactor::Kind::FubiniStudy:
        if (f.factor < 1 || f.factor > a.fiber_count) {
          bad("fs references fiber factor " + std::to_string(f.factor));
        }
        break;
      case SmoothFactor::Kind::Sigma:
        if (f.coords.size() < 2) bad("sigma needs at least two coordinates");
        for (int i : f.coords) {
          if (i < 1 || i > a.base_dim) bad("sigma coordinate out of range");
        }
        break;
      case SmoothFactor::Kind::Named:
        if (f.degree < 1) bad("named form '" + f.name + "' needs positive degree");
        break;
    }
  }
}

// r coordinates vanishing at once is the empty set in P^{r-1}.
bool emptied_fiber(const CoordCycle& c, const Ambient& a) {
  return std::any_of(c.fiber_zero.begin(), c.fiber_zero.end(),
                     [&](const IndexSet& f) { return static_cast<int>(f.size()) > a.fiber_dim(); });
}

bool within_budgets(const Term& t, const Ambient& a) {
  if (t.degree() > a.total_dim()) return false;

  int base_load = static_cast<int>(t.cycle.base_zero.size());
  std::vector<int> fs(static_cast<std::size_t>(a.fiber_count), 0);
  std::vector<int> theta(static_cast<std::size_t>(a.fiber_count), 0);
  for (const auto& [f, k] : t.smooth) {
    switch (f.kind) {
      case SmoothFactor::Kind::FubiniStudy: fs[static_cast<std::size_t>(f.factor - 1)] += k; break;
      case SmoothFactor::Kind::Theta:
        if (f.factor == 0) {
          base_load += k;
        } else {
          theta[static_cast<std::size_t>(f.factor - 1)] += k;
        }
        break;
      case SmoothFactor::Kind::Sigma: base_load += k; break;
      case SmoothFactor::Kind::Named: base_load += f.degree * k; break;
    }
  }
  if (base_load > a.base_dim) return false;
  for (std::size_t j = 0; j < fs.size(); ++j) {
    const int fiber_load = fs[j] + static_cast<int>(t.cycle.fiber_zero[j].size());
    if (fiber_load > a.fiber_dim()) return false;
    // Everything pulled back from P(E_j) lives in dimension n + r - 1.
    if (fiber_load + theta[j] + base_load > a.base_dim + a.fiber_dim()) return false;
  }
  return true;
}

}  // namespace

std::optional<Term> king_reduce(const Term& term) {
  Term t = term;
  bool changed = true;
  while (changed) {
    changed = false;
    for (auto it = t.smooth.begin(); it != t.smooth.end(); ++it) {
      if (it->first.kind != SmoothFactor::Kind::Sigma) continue;
      IndexSet live;
      std::set_difference(it->first.coords.begin(), it->first.coords.end(),
                          t.cycle.base_zero.begin(), t.cycle.base_zero.end(),
                          std::inserter(live, live.end()));
      const int k = it->second;
      const int q = static_cast<int>(live.size());
      if (q == 0) {
        throw Error(ErrorKind::DegenerateSigma,
                    "sigma family lies inside the cycle it multiplies (weight is -inf there)");
      }
      if (k > q) return std::nullopt;
      if (k == q) {
        t.smooth.erase(it);
        t.cycle.base_zero.insert(live.begin(), live.end());
        changed = true;
        break;
      }
      if (live.size() != it->first.coords.size()) {
        // On the cycle sigma_I restricts to sigma_{I'}; re-key so equal currents merge.
        t.smooth.erase(it);
        t.smooth[SmoothFactor::sigma(live)] += k;
        changed = true;
        break;
      }
    }
  }
  return t;
}

Current normalize(std::vector<Term> raw, const Ambient& ambient) {
  std::map<std::pair<CoordCycle, Monomial>, Rational> merged;
  for (auto& t : raw) {
    validate(t, ambient);
    if (t.coeff.numerator() == 0 || emptied_fiber(t.cycle, ambient)) continue;
    auto reduced = king_reduce(t);
    if (!reduced || !within_budgets(*reduced, ambient)) continue;
    merged[{reduced->cycle, reduced->smooth}] += reduced->coeff;
  }
  Current out(ambient);
  for (auto& [key, c] : merged) {
    if (c.numerator() == 0) continue;
    out.terms_.push_back(Term{c, key.second, key.first});
  }
  return out;
}

// ---------------------------------------------------------------- Current

Current Current::one(const Ambient& ambient) {
  return cycle(ambient, CoordCycle::whole(ambient.fiber_count));
}

Current Current::cycle(const Ambient& ambient, CoordCycle c, Rational coeff) {
  return normalize({Term{coeff, {}, std::move(c)}}, ambient);
}

Current Current::factor(const Ambient& ambient, SmoothFactor f, int power, Rational coeff) {
  Term t{coeff, {}, CoordCycle::whole(ambient.fiber_count)};
  if (power > 0) t.smooth[std::move(f)] = power;
  return normalize({std::move(t)}, ambient);
}

Current Current::operator+(const Current& other) const {
  Current out = *this;
  out += other;
  return out;
}

Current& Current::operator+=(const Current& other) {
  if (!(other.ambient_ == ambient_)) {
    throw Error(ErrorKind::MalformedTerm, "adding currents over different ambients");
  }
  std::vector<Term> all = terms_;
  all.insert(all.end(), other.terms_.begin(), other.terms_.end());
  *this = normalize(std::move(all), ambient_);
  return *this;
}

Current Current::operator-() const { return scaled(Rational(-1)); }

Current Current::operator-(const Current& other) const { return *this + (-other); }

Current Current::scaled(const Rational& c) const {
  std::vector<Term> all = terms_;
  for (auto& t : all) t.coeff *= c;
  return normalize(std::move(all), ambient_);
}

bool Current::operator==(const Current& other) const {
  if (!(ambient_ == other.ambient_) || terms_.size() != other.terms_.size()) return false;
  for (std::size_t i = 0; i < terms_.size(); ++i) {
    const auto& a = terms_[i];
    const auto& b = other.terms_[i];
    if (a.coeff != b.coeff || !(a.cycle == b.cycle) || a.smooth != b.smooth) return false;
  }
  return true;
}

std::string Current::render() const {
  if (terms_.empty()) return "0";
  std::string out;
  for (std::size_t i = 0; i < terms_.size(); ++i) {
    if (i > 0) out += " + ";
    out += render_term(terms_[i], ambient_);
  }
  return out;
}

// ---------------------------------------------------------------- products

Current wedge(const Current& a, const Current& b) {
  if (!(a.ambient() == b.ambient())) {
    throw Error(ErrorKind::MalformedTerm, "wedge of currents over different ambients");
  }
  std::vector<Term> out;
  out.reserve(a.terms().size() * b.terms().size());
  for (const auto& x : a.terms()) {
    for (const auto& y : b.terms()) {
      Term t{x.coeff * y.coeff, x.smooth, x.cycle};
      for (const auto& [f, k] : y.smooth) t.smooth[f] += k;
      for (int i : y.cycle.base_zero) {
        if (!t.cycle.base_zero.insert(i).second) {
          throw Error(ErrorKind::ImproperIntersection,
                      "both cycles contain {" + a.ambient().coord_names[i - 1] + "=0}");
        }
      }
      for (std::size_t j = 0; j < y.cycle.fiber_zero.size(); ++j) {
        for (int i : y.cycle.fiber_zero[j]) {
          if (!t.cycle.fiber_zero[j].insert(i).second) {
            throw Error(ErrorKind::ImproperIntersection,
                        "both cycles contain {xi_" + std::to_string(i) + "=0} in factor " +
                            std::to_string(j + 1));
          }
        }
      }
      out.push_back(std::move(t));
    }
  }
  return normalize(std::move(out), a.ambient());
}

// ---------------------------------------------------------------- restriction

ConstructibleSet ConstructibleSet::union_of(std::vector<CoordCycle> members) {
  return ConstructibleSet{Polarity::Union, std::move(members)};
}

ConstructibleSet ConstructibleSet::complement_of(std::vector<CoordCycle> members) {
  return ConstructibleSet{Polarity::ComplementOfUnion, std::move(members)};
}

ConstructibleSet ConstructibleSet::everything(int fiber_count) {
  return union_of({CoordCycle::whole(fiber_count)});
}

bool ConstructibleSet::contains_generic_point(const CoordCycle& v) const {
  const bool inside_member =
      std::any_of(members.begin(), members.end(), [&](const CoordCycle& m) { return v.contained_in(m); });
  return polarity == Polarity::Union ? inside_member : !inside_member;
}

std::optional<ConstructibleSet> ConstructibleSet::intersect(const ConstructibleSet& other) const {
  if (polarity != other.polarity) return std::nullopt;
  if (polarity == Polarity::ComplementOfUnion) {
    auto m = members;
    m.insert(m.end(), other.members.begin(), other.members.end());
    return complement_of(std::move(m));
  }
  // (U A_i) n (U B_j) = U (A_i n B_j); intersections of coordinate subvarieties
  // are again coordinate subvarieties (possibly empty in a projective fiber).
  std::vector<CoordCycle> m;
  for (const auto& a : members) {
    for (const auto& b : other.members) {
      CoordCycle c = a;
      c.base_zero.insert(b.base_zero.begin(), b.base_zero.end());
      for (std::size_t j = 0; j < c.fiber_zero.size() && j < b.fiber_zero.size(); ++j) {
        c.fiber_zero[j].insert(b.fiber_zero[j].begin(), b.fiber_zero[j].end());
      }
      m.push_back(std::move(c));
    }
  }
  return union_of(std::move(m));
}

Current restrict_to(const Current& t, const ConstructibleSet& s) {
  std::vector<Term> kept;
  for (const auto& term : t.terms()) {
    if (s.contains_generic_point(term.cycle)) kept.push_back(term);
  }
  return normalize(std::move(kept), t.ambient());
}

Current restrict_off(const Current& t, const std::vector<CoordCycle>& z) {
  return restrict_to(t, ConstructibleSet::complement_of(z));
}

// ---------------------------------------------------------------- rendering

std::string render_cycle(const CoordCycle& c, const Ambient& a) {
  if (c.is_trivial()) return "1";
  std::ostringstream os;
  os << '[';
  bool first = true;
  for (int i : c.base_zero) {
    os << (first ? "" : ",") << a.coord_names[static_cast<std::size_t>(i - 1)] << "=0";
    first = false;
  }
  bool any_fiber = false;
  for (const auto& f : c.fiber_zero) any_fiber = any_fiber || !f.empty();
  if (any_fiber) {
    if (!c.base_zero.empty()) os << "; ";
    bool first_slot = true;
    for (std::size_t j = 0; j < c.fiber_zero.size(); ++j) {
      if (c.fiber_zero[j].empty()) continue;
      if (!first_slot) os << "; ";
      first_slot = false;
      os << (j + 1) << ':';
      bool first_idx = true;
      for (int i : c.fiber_zero[j]) {
        os << (first_idx ? "" : ",") << "xi_" << i << "=0";
        first_idx = false;
      }
    }
  }
  os << ']';
  return os.str();
}

std::string render_factor(const SmoothFactor& f, const Ambient& a) {
  switch (f.kind) {
    case SmoothFactor::Kind::Theta:
      return f.factor == 0 ? f.name : f.name + "_" + std::to_string(f.factor);
    case SmoothFactor::Kind::FubiniStudy: return "fs_" + std::to_string(f.factor);
    case SmoothFactor::Kind::Sigma: {
      std::string out = "sigma{";
      bool first = true;
      for (int i : f.coords) {
        out += (first ? "" : ",") + a.coord_names[static_cast<std::size_t>(i - 1)];
        first = false;
      }
      return out + "}";
    }
    case SmoothFactor::Kind::Named: return f.name;
  }
  return "?";
}

std::string render_term(const Term& t, const Ambient& a) {
  std::string out = to_string(t.coeff);
  for (const auto& [f, k] : t.smooth) {
    out += '*';
    out += k == 1 ? render_factor(f, a) : "(" + render_factor(f, a) + ")^" + std::to_string(k);
  }
  if (!t.cycle.is_trivial() || t.smooth.empty()) {
    out += '*';
    out += render_cycle(t.cycle, a);
  }
  return out;
}

}  // namespace segre
