#include "segre/scenario.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <set>

#include "json.hpp"
#include "segre/errors.hpp"

namespace segre {

namespace {

// ------------------------------------------------------------------ lexing

class Cursor {
 public:
  Cursor(std::string_view text, int line) : text_(text), line_(line) {}

  void ws() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }
  bool at_end() {
    ws();
    return pos_ >= text_.size();
  }
  char peek() {
    ws();
    return pos_ < text_.size() ? text_[pos_] : '\0';
  }
  bool accept(std::string_view s) {
    ws();
    if (text_.substr(pos_, s.size()) != s) return false;
    pos_ += s.size();
    return true;
  }
  void expect(std::string_view s) {
    if (!accept(s)) fail("expected '" + std::string(s) + "'");
  }
  bool peek_ident() {
    const char c = peek();
    return std::isalpha(static_cast<unsigned char>(c)) || c == '_';
  }
  std::string ident() {
    ws();
    const auto start = pos_;
    if (!peek_ident()) fail("expected a name");
    while (pos_ < text_.size() &&
           (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_')) {
      ++pos_;
    }
    return std::string(text_.substr(start, pos_ - start));
  }
  bool peek_number() {
    const char c = peek();
    return std::isdigit(static_cast<unsigned char>(c)) || c == '-';
  }
  int integer() {
    ws();
    int value = 0;
    auto [ptr, ec] = std::from_chars(text_.data() + pos_, text_.data() + text_.size(), value);
    if (ec != std::errc{} || value < 0) fail("expected a non-negative integer");
    pos_ = static_cast<std::size_t>(ptr - text_.data());
    return value;
  }
  Rational rational() {
    ws();
    const auto start = pos_;
    if (pos_ < text_.size() && text_[pos_] == '-') ++pos_;
    while (pos_ < text_.size() && (std::isdigit(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '/')) {
      ++pos_;
    }
    try {
      return parse_rational(text_.substr(start, pos_ - start));
    } catch (const std::invalid_argument& e) {
      pos_ = start;
      fail(e.what());
    }
  }
  double real() {
    ws();
    double value = 0.0;
    auto [ptr, ec] = std::from_chars(text_.data() + pos_, text_.data() + text_.size(), value);
    if (ec != std::errc{}) fail("expected a number");
    pos_ = static_cast<std::size_t>(ptr - text_.data());
    return value;
  }
  void finish() {
    if (!at_end()) fail("unexpected trailing text");
  }
  [[noreturn]] void fail(const std::string& msg, ErrorKind kind = ErrorKind::ParseError) const {
    throw Error(kind, "line " + std::to_string(line_) + ", column " + std::to_string(pos_ + 1) + ": " + msg);
  }

 private:
  std::string_view text_;
  int line_;
  std::size_t pos_ = 0;
};

std::optional<int> suffix_index(const std::string& name, const std::string& stem) {
  if (name.size() <= stem.size() + 1 || name.compare(0, stem.size(), stem) != 0 || name[stem.size()] != '_') {
    return std::nullopt;
  }
  int value = 0;
  const auto digits = std::string_view(name).substr(stem.size() + 1);
  auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), value);
  if (ec != std::errc{} || ptr != digits.data() + digits.size() || value < 1) return std::nullopt;
  return value;
}

std::string format_real(double v) {
  char buf[32];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

// ------------------------------------------------------------------ parser

class Parser {
 public:
  Scenario run(std::string_view text) {
    int line = 0;
    std::size_t start = 0;
    while (start <= text.size()) {
      auto end = text.find('\n', start);
      if (end == std::string_view::npos) end = text.size();
      ++line;
      auto body = text.substr(start, end - start);
      if (const auto hash = body.find('#'); hash != std::string_view::npos) body = body.substr(0, hash);
      Cursor c(body, line);
      if (!c.at_end()) statement(c);
      start = end + 1;
    }
    return std::move(s_);
  }

 private:
  Scenario s_;
  bool have_space_ = false;
  bool ambient_used_ = false;
  bool tag_used_ = false;

  // ---- statements

  void statement(Cursor& c) {
    const auto key = c.ident();
    if (key == "space") return space(c);
    if (key == "bundle") return bundle(c);
    if (key == "theta") return theta(c);
    if (key == "compute") return compute(c);
    need_space(c);
    if (key == "metric") return metric(c);
    if (key == "form") return form(c);
    if (key == "segre_g") return segre_symbol(c);
    if (key == "subst") return substitution(c);
    if (key == "weight") return weight(c);
    if (key == "set") return set(c);
    c.fail("unknown statement '" + key + "'");
  }

  void need_space(Cursor& c) {
    if (!have_space_) c.fail("`space` must be declared first");
    ambient_used_ = true;
  }

  void space(Cursor& c) {
    if (have_space_) c.fail("`space` declared twice");
    c.expect("=");
    if (std::isdigit(static_cast<unsigned char>(c.peek()))) {
      const int n = c.integer();
      if (n < 1) c.fail("dimension must be positive");
      for (int i = 1; i <= n; ++i) s_.coords.push_back("x" + std::to_string(i));
    } else {
      do {
        auto name = c.ident();
        if (std::find(s_.coords.begin(), s_.coords.end(), name) != s_.coords.end()) {
          c.fail("coordinate '" + name + "' listed twice");
        }
        s_.coords.push_back(std::move(name));
      } while (c.accept(","));
    }
    c.finish();
    have_space_ = true;
  }

  void bundle(Cursor& c) {
    if (ambient_used_) c.fail("`bundle` must precede declarations that use the ambient");
    c.expect("=");
    if (c.ident() != "rank") c.fail("expected `rank r`");
    const int r = c.integer();
    if (r < 1) c.fail("rank must be positive");
    c.finish();
    s_.rank = r;
  }

  void theta(Cursor& c) {
    if (tag_used_) c.fail("`theta` must precede every use of the reference form");
    c.expect("=");
    s_.theta_tag = c.ident();
    c.finish();
  }

  void form(Cursor& c) {
    const auto name = c.ident();
    if (name == s_.theta_tag || name == "fs" || name == "sigma" || name == "psi" || is_coord(name) ||
        find_form(name)) {
      c.fail("form name '" + name + "' is reserved or already declared");
    }
    c.expect("=");
    const int d = c.integer();
    if (d < 1) c.fail("form degree must be positive");
    c.finish();
    s_.forms.push_back({name, d});
  }

  void metric(Cursor& c) {
    if (s_.metric) c.fail("`metric` declared twice");
    c.expect("=");
    const auto form = c.ident();
    c.expect(":");
    const int n = static_cast<int>(s_.coords.size());
    try {
      if (form == "line") {
        if (s_.rank != 1) c.fail("line-bundle metric on a rank " + std::to_string(s_.rank) + " bundle",
                                 ErrorKind::RankMismatch);
        s_.metric = MetricSpec::line_bundle(weight_expr(c, Ambient::make(n, 1, 0, s_.coords), false));
      } else if (form == "conformal") {
        s_.metric = MetricSpec::conformal(weight_expr(c, base(), false), s_.rank);
      } else if (form == "o1weight") {
        if (s_.rank < 2) c.fail("o1weight needs rank >= 2", ErrorKind::RankMismatch);
        s_.metric = MetricSpec::explicit_o1(weight_expr(c, Ambient::make(n, s_.rank, 1, s_.coords), true));
      } else {
        c.fail("metric form must be line, conformal or o1weight");
      }
    } catch (const Error& e) {
      if (e.kind() == ErrorKind::ParseError || e.kind() == ErrorKind::RankMismatch ||
          e.kind() == ErrorKind::UndeclaredSymbol) {
        throw;
      }
      c.fail(e.what());
    }
    c.finish();
  }

  void segre_symbol(Cursor& c) {
    c.expect("[");
    const int k = c.integer();
    c.expect("]");
    if (k < 1) c.fail("declared Segre forms start at k = 1");
    if (s_.segre_symbols.count(k)) c.fail("s_" + std::to_string(k) + " declared twice");
    c.expect("=");
    auto value = current_expr(c, base());
    c.finish();
    s_.segre_symbols.emplace(k, std::move(value));
  }

  void substitution(Cursor& c) {
    tag_used_ = true;
    if (c.ident() != s_.theta_tag) c.fail("substitutions rewrite " + s_.theta_tag + "*[xi_a=0]");
    c.expect("*");
    c.expect("[");
    const int a = xi_index(c);
    c.expect("=");
    c.expect("0");
    c.expect("]");
    c.expect("=");
    auto rhs = current_expr(c, Ambient::make(static_cast<int>(s_.coords.size()), s_.rank, 1, s_.coords));
    c.finish();
    s_.substitutions.push_back({a, std::move(rhs)});
  }

  void weight(Cursor& c) {
    const auto name = c.ident();
    if (find_weight(name)) c.fail("weight '" + name + "' declared twice");
    c.expect("=");
    Weight w = weight_expr(c, base(), true);
    c.finish();
    s_.weights.push_back({name, std::move(w)});
  }

  void set(Cursor& c) {
    const auto name = c.ident();
    if (name == "off" || name == "all" || find_set(name)) c.fail("set name '" + name + "' is reserved or taken");
    c.expect("=");
    SetDecl d{name, ConstructibleSet::Polarity::Union, {}};
    const auto kind = c.ident();
    if (kind == "complement") {
      d.polarity = ConstructibleSet::Polarity::ComplementOfUnion;
    } else if (kind != "union") {
      c.fail("expected union{...} or complement{...}");
    }
    c.expect("{");
    if (!c.accept("}")) {
      do {
        c.expect("[");
        IndexSet zero;
        do {
          const auto coord = c.ident();
          const int i = coord_index(coord);
          if (i == 0) c.fail("sets are built from base coordinates; '" + coord + "' is not one", ErrorKind::UndeclaredSymbol);
          zero.insert(i);
          c.expect("=");
          c.expect("0");
        } while (c.accept(","));
        c.expect("]");
        d.members.push_back(std::move(zero));
      } while (c.accept(","));
      c.expect("}");
    }
    c.finish();
    s_.sets.push_back(std::move(d));
  }

  void compute(Cursor& c) {
    c.expect("=");
    if (c.at_end()) return;
    do {
      s_.compute.push_back(request(c));
    } while (c.accept(";"));
    c.finish();
  }

  // ---- lookups

  Ambient base() const { return Ambient::make(static_cast<int>(s_.coords.size()), s_.rank, 0, s_.coords); }
  int coord_index(const std::string& name) const {
    const auto it = std::find(s_.coords.begin(), s_.coords.end(), name);
    return it == s_.coords.end() ? 0 : static_cast<int>(it - s_.coords.begin()) + 1;
  }
  bool is_coord(const std::string& name) const { return coord_index(name) != 0; }
  const FormDecl* find_form(const std::string& name) const {
    for (const auto& f : s_.forms) {
      if (f.name == name) return &f;
    }
    return nullptr;
  }
  const WeightDecl* find_weight(const std::string& name) const {
    for (const auto& w : s_.weights) {
      if (w.name == name) return &w;
    }
    return nullptr;
  }
  const SetDecl* find_set(const std::string& name) const {
    for (const auto& d : s_.sets) {
      if (d.name == name) return &d;
    }
    return nullptr;
  }

  int xi_index(Cursor& c) {
    const auto name = c.ident();
    const auto a = suffix_index(name, "xi");
    if (!a) c.fail("expected a fiber coordinate xi_a");
    if (*a > s_.rank) c.fail(name + " on a rank " + std::to_string(s_.rank) + " bundle", ErrorKind::RankMismatch);
    return *a;
  }

  // ---- weight expressions

  /// Atoms joined by '+'; fiber atoms widen the ambient to the factors they name.
  Weight weight_expr(Cursor& c, const Ambient& ambient, bool widen) {
    std::vector<WeightAtom> atoms;
    int factors = ambient.fiber_count;
    do {
      Rational coeff(1);
      bool has_coeff = false;
      if (c.peek_number()) {
        coeff = c.rational();
        c.expect("*");
        has_coeff = true;
      }
      WeightAtom a;
      if (c.accept("log|")) {
        a = log_atom(c, coeff);
      } else {
        if (has_coeff) c.fail("only log atoms take a coefficient");
        a = named_atom(c);
        if (a.is_fiber()) {
          if (a.factor > ambient.fiber_count && !widen) {
            c.fail("fiber atom on factor " + std::to_string(a.factor) + " is not available here");
          }
          factors = std::max(factors, a.factor);
        }
      }
      atoms.push_back(std::move(a));
    } while (c.accept("+"));
    const auto target = Ambient::make(ambient.base_dim, ambient.rank, factors, s_.coords);
    try {
      return Weight::make(std::move(atoms), target);
    } catch (const Error& e) {
      if (e.kind() == ErrorKind::RankMismatch) throw;
      c.fail(e.what());
    }
  }

  WeightAtom log_atom(Cursor& c, const Rational& coeff) {
    std::vector<std::pair<int, int>> entries;
    bool norm = false;
    do {
      const auto name = c.ident();
      const int i = coord_index(name);
      if (i == 0) c.fail("unknown coordinate '" + name + "'", ErrorKind::UndeclaredSymbol);
      int e = 1;
      if (c.accept("^")) e = c.integer();
      entries.push_back({i, e});
      if (c.accept(",")) {
        norm = true;
        continue;
      }
      if (c.accept("*")) {
        if (norm) c.fail("cannot mix ',' and '*' inside one log atom");
        continue;
      }
      break;
    } while (true);
    c.expect("|^2");
    if (norm) {
      IndexSet coords;
      for (const auto& [i, e] : entries) {
        if (e != 1) c.fail("norm atoms take plain coordinates");
        if (!coords.insert(i).second) c.fail("coordinate repeated in a norm atom");
      }
      return WeightAtom::norm(std::move(coords), coeff);
    }
    std::vector<int> exps(s_.coords.size(), 0);
    for (const auto& [i, e] : entries) exps[static_cast<std::size_t>(i - 1)] += e;
    return WeightAtom::monomial(std::move(exps), coeff);
  }

  WeightAtom named_atom(Cursor& c) {
    const auto name = c.ident();
    if (name == "fs") return WeightAtom::fubini_study(1);
    if (const auto j = suffix_index(name, "fs")) return WeightAtom::fubini_study(*j);
    if (name == "psi" || suffix_index(name, "psi")) {
      tag_used_ = true;
      const int j = name == "psi" ? (s_.rank == 1 ? 0 : 1) : *suffix_index(name, "psi");
      return WeightAtom::reference(j, s_.theta_tag);
    }
    if (name == "section") {
      c.expect("(");
      int factor = 1;
      if (std::isdigit(static_cast<unsigned char>(c.peek()))) {
        factor = c.integer();
        c.expect(":");
      }
      const int a = xi_index(c);
      c.expect(")");
      return WeightAtom::section(factor, a);
    }
    if (name == "smooth") {
      c.expect("(");
      auto form = c.ident();
      c.expect(")");
      return WeightAtom::smooth(std::move(form));
    }
    c.fail("unknown weight atom '" + name + "'");
  }

  // ---- current expressions

  Current current_expr(Cursor& c, const Ambient& a) {
    Current total = current_term(c, a);
    while (true) {
      if (c.accept("+")) {
        total += current_term(c, a);
      } else if (c.accept("-")) {
        total += -current_term(c, a);
      } else {
        return total;
      }
    }
  }

  Current current_term(Cursor& c, const Ambient& a) {
    Current t = Current::one(a);
    do {
      try {
        t = wedge(t, current_factor(c, a));
      } catch (const Error& e) {
        if (e.kind() == ErrorKind::ParseError || e.kind() == ErrorKind::UndeclaredSymbol ||
            e.kind() == ErrorKind::RankMismatch) {
          throw;
        }
        c.fail(e.what());
      }
    } while (c.accept("*"));
    return t;
  }

  Current current_factor(Cursor& c, const Ambient& a) {
    if (c.peek_number()) return Current::one(a).scaled(c.rational());
    if (c.peek() == '[') return cycle(c, a);
    const bool paren = c.accept("(");
    const SmoothFactor f = smooth_symbol(c, a);
    if (paren) c.expect(")");
    int power = 1;
    if (c.accept("^")) power = c.integer();
    return Current::factor(a, f, power);
  }

  SmoothFactor smooth_symbol(Cursor& c, const Ambient& a) {
    const auto name = c.ident();
    auto need_factor = [&](int j) {
      if (j < 1 || j > a.fiber_count) c.fail("fiber factor " + std::to_string(j) + " is not available here");
      return j;
    };
    if (name == s_.theta_tag) {
      tag_used_ = true;
      return SmoothFactor::theta(a.fiber_count == 0 ? 0 : 1, s_.theta_tag);
    }
    if (const auto j = suffix_index(name, s_.theta_tag)) {
      tag_used_ = true;
      return SmoothFactor::theta(need_factor(*j), s_.theta_tag);
    }
    if (name == "fs") return SmoothFactor::fubini_study(need_factor(1));
    if (const auto j = suffix_index(name, "fs")) return SmoothFactor::fubini_study(need_factor(*j));
    if (name == "sigma") {
      c.expect("{");
      IndexSet coords;
      do {
        const auto coord = c.ident();
        const int i = coord_index(coord);
        if (i == 0) c.fail("unknown coordinate '" + coord + "'", ErrorKind::UndeclaredSymbol);
        coords.insert(i);
      } while (c.accept(","));
      c.expect("}");
      return SmoothFactor::sigma(std::move(coords));
    }
    if (const auto* f = find_form(name)) return SmoothFactor::named(f->name, f->degree);
    c.fail("undeclared symbol '" + name + "'", ErrorKind::UndeclaredSymbol);
  }

  Current cycle(Cursor& c, const Ambient& a) {
    c.expect("[");
    CoordCycle z = CoordCycle::whole(a.fiber_count);
    do {
      int slot = 0;
      if (std::isdigit(static_cast<unsigned char>(c.peek()))) {
        slot = c.integer();
        c.expect(":");
        if (slot < 1 || slot > a.fiber_count) c.fail("fiber factor " + std::to_string(slot) + " is not available here");
      }
      do {
        const auto name = c.ident();
        if (const int i = coord_index(name); i != 0 && slot == 0) {
          z.base_zero.insert(i);
        } else if (const auto xi = suffix_index(name, "xi")) {
          if (*xi > a.rank) c.fail(name + " on a rank " + std::to_string(a.rank) + " bundle", ErrorKind::RankMismatch);
          const int j = slot == 0 ? 1 : slot;
          if (j > a.fiber_count) c.fail("fiber coordinates are not available here");
          z.fiber_zero[static_cast<std::size_t>(j - 1)].insert(*xi);
        } else {
          c.fail("unknown coordinate '" + name + "'", ErrorKind::UndeclaredSymbol);
        }
        c.expect("=");
        c.expect("0");
      } while (c.accept(","));
    } while (c.accept(";"));
    c.expect("]");
    return Current::cycle(a, std::move(z));
  }

  // ---- requests

  void need_metric(Cursor& c, const char* what) {
    if (!s_.metric) c.fail(std::string(what) + " needs a declared metric", ErrorKind::UndeclaredSymbol);
  }
  const Weight& need_weight(Cursor& c, const std::string& name) {
    const auto* w = find_weight(name);
    if (!w) c.fail("undeclared weight '" + name + "'", ErrorKind::UndeclaredSymbol);
    return w->weight;
  }

  Request request(Cursor& c) {
    Request r;
    const auto key = c.ident();
    if (key == "ma_power") {
      r.kind = Request::Kind::MaPower;
      c.expect("(");
      r.weight = c.ident();
      need_weight(c, r.weight);
      c.expect(",");
      r.k = c.integer();
      c.expect(")");
    } else if (key == "gprod") {
      r.kind = Request::Kind::GeneralizedProduct;
      c.expect("[");
      do {
        Request::Factor f;
        f.weight = c.ident();
        need_weight(c, f.weight);
        c.expect(":");
        f.domain = c.ident();
        if (f.domain != "off" && f.domain != "all" && !find_set(f.domain)) {
          c.fail("undeclared set '" + f.domain + "'", ErrorKind::UndeclaredSymbol);
        }
        r.factors.push_back(std::move(f));
      } while (c.accept(","));
      c.expect("]");
    } else if (key == "bracket_power" || key == "bracket_expand") {
      r.kind = key == "bracket_power" ? Request::Kind::BracketPower : Request::Kind::BracketExpand;
      c.expect("(");
      r.weight = c.ident();
      const Weight& w = need_weight(c, r.weight);
      c.expect(",");
      r.alpha = current_expr(c, w.ambient);
      c.expect(",");
      r.k = c.integer();
      c.expect(")");
    } else if (key == "segre" || key == "chern" || key == "push_ma" || key == "smooth_check") {
      r.kind = key == "segre"     ? Request::Kind::Segre
               : key == "chern"   ? Request::Kind::Chern
               : key == "push_ma" ? Request::Kind::PushMa
                                  : Request::Kind::SmoothCheck;
      need_metric(c, key.c_str());
      r.k = c.integer();
    } else if (key == "segre_product") {
      r.kind = Request::Kind::SegreProduct;
      need_metric(c, "segre_product");
      c.expect("[");
      do {
        r.ks.push_back(c.integer());
      } while (c.accept(","));
      c.expect("]");
    } else if (key == "degeneracy") {
      r.kind = Request::Kind::Degeneracy;
      need_metric(c, "degeneracy");
    } else if (key == "theta_check") {
      r.kind = Request::Kind::ThetaCheck;
      need_metric(c, "theta_check");
      c.expect("(");
      r.tag = c.ident();
      if (r.tag == s_.theta_tag) c.fail("theta_check needs a tag different from '" + s_.theta_tag + "'");
      c.expect(",");
      r.k = c.integer();
      c.expect(")");
    } else if (key == "lelong" || key == "oracle_check") {
      r.kind = key == "lelong" ? Request::Kind::Lelong : Request::Kind::OracleCheck;
      c.expect("(");
      r.target.push_back(request(c));
      if (!yields_base_current(r.target.front())) c.fail(key + " needs a request that yields a current");
      c.expect(",");
      if (r.kind == Request::Kind::Lelong) {
        r.point = point(c);
      } else {
        r.tolerance = c.real();
        if (!(r.tolerance > 0.0)) c.fail("tolerance must be positive");
      }
      c.expect(")");
    } else {
      c.fail("unknown request '" + key + "'");
    }
    return r;
  }

  static bool yields_base_current(const Request& r) {
    switch (r.kind) {
      case Request::Kind::Lelong:
      case Request::Kind::OracleCheck:
      case Request::Kind::Degeneracy:
      case Request::Kind::SmoothCheck:
      case Request::Kind::ThetaCheck: return false;
      default: return true;
    }
  }

  BasePoint point(Cursor& c) {
    const int n = static_cast<int>(s_.coords.size());
    if (c.accept("(")) {
      BasePoint p;
      do {
        if (c.accept("0")) {
          p.zero.push_back(true);
        } else if (c.accept("g")) {
          p.zero.push_back(false);
        } else {
          c.fail("point entries are 0 or g");
        }
      } while (c.accept(","));
      c.expect(")");
      if (static_cast<int>(p.zero.size()) != n) c.fail("point has the wrong number of coordinates");
      return p;
    }
    const auto name = c.ident();
    if (name == "origin") return BasePoint::origin(n);
    if (name == "generic") return BasePoint::generic(n);
    c.fail("expected origin, generic or (0,g,...)");
  }
};

// ------------------------------------------------------------------ evaluation

const SetDecl& find_set(const Scenario& s, const std::string& name) {
  for (const auto& d : s.sets) {
    if (d.name == name) return d;
  }
  throw Error(ErrorKind::UndeclaredSymbol, "undeclared set '" + name + "'");
}

const MetricSpec& metric_of(const Scenario& s) {
  if (!s.metric) throw Error(ErrorKind::UndeclaredSymbol, "no metric declared");
  return *s.metric;
}

Current evaluate(const Request& r, const Scenario& s) {
  switch (r.kind) {
    case Request::Kind::MaPower: return ma_power(s.weight(r.weight), r.k);
    case Request::Kind::GeneralizedProduct: {
      std::vector<ProductFactor> factors;
      for (auto it = r.factors.rbegin(); it != r.factors.rend(); ++it) {
        const Weight& w = s.weight(it->weight);
        const int t = w.ambient.fiber_count;
        ConstructibleSet domain;
        if (it->domain == "off") {
          domain = ConstructibleSet::complement_of(unbounded_locus(w));
        } else if (it->domain == "all") {
          domain = ConstructibleSet::everything(t);
        } else {
          const auto& d = find_set(s, it->domain);
          std::vector<CoordCycle> members;
          for (const auto& m : d.members) members.push_back(CoordCycle::base(m, t));
          domain = ConstructibleSet{d.polarity, std::move(members)};
        }
        factors.push_back({w, std::move(domain)});
      }
      return generalized_product(factors);
    }
    case Request::Kind::BracketPower: return bracket_power(s.weight(r.weight), *r.alpha, r.k);
    case Request::Kind::BracketExpand: return bracket_expand(s.weight(r.weight), *r.alpha, r.k);
    case Request::Kind::Segre: return segre_current(r.k, metric_of(s), s.rules());
    case Request::Kind::Chern: return chern_current(r.k, metric_of(s), s.rules());
    case Request::Kind::SegreProduct: return segre_product(r.ks, metric_of(s), s.rules());
    case Request::Kind::PushMa: return pushed_ma_power(r.k, metric_of(s), s.rules());
    default: break;
  }
  throw Error(ErrorKind::PreconditionViolated, "request '" + r.render() + "' does not yield a current");
}

double to_double(const Rational& q) {
  return static_cast<double>(q.numerator()) / static_cast<double>(q.denominator());
}

double binomial(int n, int k) {
  double b = 1.0;
  for (int i = 1; i <= k; ++i) b = b * (n - k + i) / i;
  return b;
}

constexpr double oracle_eps_ratio = 1e-3;
constexpr double product_eps_inner = 1e-6;
constexpr double product_delta = 1e-4;
constexpr double product_eps_outer = 1e-2;
const std::vector<double> oracle_radii{0.5, 0.25, 0.125, 0.0625};

/// Numeric twin of a symbolic request, compared at the origin.
oracle::OracleCase oracle_case(const Request& target, const Scenario& s) {
  using namespace oracle;
  const int n = static_cast<int>(s.coords.size());
  const double symbolic = to_double(lelong_number(evaluate(target, s), BasePoint::origin(n)));
  const std::string quantity = "nu(" + target.render() + ", origin)";
  switch (target.kind) {
    case Request::Kind::MaPower: {
      const auto u = RegularizedWeight::from_weight(s.weight(target.weight), 1.0);
      const int k = target.k;
      return {quantity, symbolic, oracle_eps_ratio, [u, k, n](const QuadratureGrid& g) {
                return numeric_lelong(u, k, Point(static_cast<std::size_t>(n)), oracle_radii, oracle_eps_ratio, g);
              }};
    }
    case Request::Kind::Segre: {
      const auto& m = metric_of(s);
      if (m.form != MetricSpec::Form::ConformalDiagonal) {
        throw Error(ErrorKind::PreconditionViolated, "numeric Segre forms need a conformal metric");
      }
      // pi_* of (dd^c(w + log|xi|^2))^{k+r-1} is binom(k+r-1, k) (dd^c w)^k
      const auto u = RegularizedWeight::from_weight(m.weight, 1.0);
      const int k = target.k;
      const double c = (k % 2 ? -1.0 : 1.0) * binomial(k + m.rank - 1, k);
      return {quantity, symbolic, oracle_eps_ratio, [u, k, n, c](const QuadratureGrid& g) {
                const auto e =
                    numeric_lelong(u, k, Point(static_cast<std::size_t>(n)), oracle_radii, oracle_eps_ratio, g);
                return Estimate{c * e.value, std::abs(c) * e.error_estimate};
              }};
    }
    case Request::Kind::GeneralizedProduct: {
      if (target.factors.size() != 2 || n != 2) {
        throw Error(ErrorKind::PreconditionViolated, "numeric products take two factors on C^2");
      }
      for (const auto& f : target.factors) {
        if (f.domain != "off") throw Error(ErrorKind::PreconditionViolated, "numeric products use `off` domains");
      }
      const auto outer = RegularizedWeight::from_weight(s.weight(target.factors[0].weight), product_eps_outer);
      const auto inner = RegularizedWeight::from_weight(s.weight(target.factors[1].weight), product_eps_inner);
      return {quantity, symbolic, product_eps_inner, [inner, outer](const QuadratureGrid& g) {
                return Estimate{numeric_product_mass(inner, outer, product_delta, Ball::origin(2), g), 0.0};
              }};
    }
    default: break;
  }
  throw Error(ErrorKind::PreconditionViolated, "no numeric model for '" + target.render() + "'");
}

RequestResult execute(const Request& r, const Scenario& s) {
  RequestResult out;
  out.request = r.render();
  switch (r.kind) {
    case Request::Kind::Lelong: {
      out.kind = RequestResult::Kind::Value;
      out.value = to_string(lelong_number(evaluate(r.target.front(), s), r.point));
      break;
    }
    case Request::Kind::OracleCheck: {
      out.kind = RequestResult::Kind::Rows;
      out.rows = oracle::compare_to_symbolic({oracle_case(r.target.front(), s)}, r.tolerance,
                                             oracle::QuadratureGrid::make(48));
      for (const auto& row : out.rows) out.passed = out.passed && row.pass;
      break;
    }
    case Request::Kind::Degeneracy: {
      out.kind = RequestResult::Kind::Locus;
      const auto base = metric_of(s).base();
      for (const auto& c : degeneracy_locus(metric_of(s))) {
        out.details.push_back(c.is_trivial() ? "whole base" : render_cycle(c, base));
      }
      break;
    }
    case Request::Kind::SmoothCheck: {
      out.kind = RequestResult::Kind::Check;
      const auto report = smooth_segre_check(metric_of(s), s.rules(), r.k);
      out.passed = report.ok;
      for (const auto& line : report.checked) out.details.push_back("checked " + line);
      for (const auto& line : report.failures) out.details.push_back("failed " + line);
      break;
    }
    case Request::Kind::ThetaCheck: {
      out.kind = RequestResult::Kind::Check;
      const auto rules = s.rules();
      const auto report = theta_independence_check(metric_of(s), rules, swap_theta(rules, r.tag), r.k);
      out.passed = report.ok;
      out.details.push_back("comparisons " + std::to_string(report.comparisons));
      for (const auto& line : report.counterexamples) out.details.push_back("differs " + line);
      break;
    }
    default:
      out.kind = RequestResult::Kind::Current;
      out.value = evaluate(r, s).render();
      break;
  }
  return out;
}

std::string_view kind_name(RequestResult::Kind k) {
  switch (k) {
    case RequestResult::Kind::Current: return "current";
    case RequestResult::Kind::Value: return "lelong";
    case RequestResult::Kind::Rows: return "oracle";
    case RequestResult::Kind::Check: return "check";
    case RequestResult::Kind::Locus: return "locus";
  }
  return "?";
}

nlohmann::ordered_json number(double v) {
  if (std::isnan(v)) return nullptr;
  return std::stod(oracle::format_value(v));
}

}  // namespace

// ------------------------------------------------------------------ public API

std::string Request::render() const {
  switch (kind) {
    case Kind::MaPower: return "ma_power(" + weight + ", " + std::to_string(k) + ")";
    case Kind::GeneralizedProduct: {
      std::string out = "gprod[";
      for (std::size_t i = 0; i < factors.size(); ++i) {
        out += (i ? ", " : "") + factors[i].weight + ":" + factors[i].domain;
      }
      return out + "]";
    }
    case Kind::BracketPower:
    case Kind::BracketExpand:
      return std::string(kind == Kind::BracketPower ? "bracket_power(" : "bracket_expand(") + weight + ", " +
             alpha->render() + ", " + std::to_string(k) + ")";
    case Kind::Segre: return "segre " + std::to_string(k);
    case Kind::Chern: return "chern " + std::to_string(k);
    case Kind::PushMa: return "push_ma " + std::to_string(k);
    case Kind::SmoothCheck: return "smooth_check " + std::to_string(k);
    case Kind::SegreProduct: {
      std::string out = "segre_product [";
      for (std::size_t i = 0; i < ks.size(); ++i) out += (i ? "," : "") + std::to_string(ks[i]);
      return out + "]";
    }
    case Kind::Lelong: return "lelong(" + target.front().render() + ", " + point.render() + ")";
    case Kind::OracleCheck: return "oracle_check(" + target.front().render() + ", " + format_real(tolerance) + ")";
    case Kind::Degeneracy: return "degeneracy";
    case Kind::ThetaCheck: return "theta_check(" + tag + ", " + std::to_string(k) + ")";
  }
  return "?";
}

Ambient Scenario::base() const { return Ambient::make(static_cast<int>(coords.size()), rank, 0, coords); }

SymbolRules Scenario::rules() const {
  SymbolRules r;
  r.theta_tag = theta_tag;
  r.segre_symbols = segre_symbols;
  r.substitutions = substitutions;
  return r;
}

const Weight& Scenario::weight(const std::string& name) const {
  for (const auto& w : weights) {
    if (w.name == name) return w.weight;
  }
  throw Error(ErrorKind::UndeclaredSymbol, "undeclared weight '" + name + "'");
}

bool Scenario::operator==(const Scenario& o) const {
  if (substitutions.size() != o.substitutions.size()) return false;
  for (std::size_t i = 0; i < substitutions.size(); ++i) {
    if (substitutions[i].fiber_index != o.substitutions[i].fiber_index ||
        !(substitutions[i].rhs == o.substitutions[i].rhs)) {
      return false;
    }
  }
  return coords == o.coords && rank == o.rank && metric == o.metric && theta_tag == o.theta_tag &&
         forms == o.forms && segre_symbols == o.segre_symbols && weights == o.weights && sets == o.sets &&
         compute == o.compute;
}

Scenario parse_scenario(std::string_view text) { return Parser().run(text); }

std::string render_scenario(const Scenario& s) {
  std::string out;
  if (!s.coords.empty()) {
    out += "space = ";
    for (std::size_t i = 0; i < s.coords.size(); ++i) out += (i ? ", " : "") + s.coords[i];
    out += "\nbundle = rank " + std::to_string(s.rank) + "\n";
  }
  out += "theta = " + s.theta_tag + "\n";
  for (const auto& f : s.forms) out += "form " + f.name + " = " + std::to_string(f.degree) + "\n";
  if (s.metric) {
    static constexpr const char* names[] = {"line", "conformal", "o1weight"};
    out += std::string("metric = ") + names[static_cast<int>(s.metric->form)] + ": " + s.metric->weight.render() +
           "\n";
  }
  for (const auto& [k, v] : s.segre_symbols) out += "segre_g[" + std::to_string(k) + "] = " + v.render() + "\n";
  for (const auto& sub : s.substitutions) {
    out += "subst " + s.theta_tag + "*[xi_" + std::to_string(sub.fiber_index) + "=0] = " + sub.rhs.render() + "\n";
  }
  for (const auto& w : s.weights) out += "weight " + w.name + " = " + w.weight.render() + "\n";
  for (const auto& d : s.sets) {
    out += "set " + d.name + " = " +
           (d.polarity == ConstructibleSet::Polarity::Union ? "union{" : "complement{");
    for (std::size_t i = 0; i < d.members.size(); ++i) {
      out += i ? ", [" : "[";
      bool first = true;
      for (int c : d.members[i]) {
        out += (first ? "" : ",") + s.coords[static_cast<std::size_t>(c - 1)] + "=0";
        first = false;
      }
      out += "]";
    }
    out += "}\n";
  }
  for (const auto& r : s.compute) out += "compute = " + r.render() + "\n";
  return out;
}

bool Report::has_errors() const {
  return std::any_of(results.begin(), results.end(), [](const RequestResult& r) { return !r.ok; });
}

Report run_scenario(const Scenario& s) {
  Report report;
  report.scenario = render_scenario(s);
  for (const auto& r : s.compute) {
    try {
      report.results.push_back(execute(r, s));
    } catch (const Error& e) {
      RequestResult failed;
      failed.request = r.render();
      failed.ok = false;
      failed.error = std::string(to_string(e.kind()));
      failed.message = e.what();
      report.results.push_back(std::move(failed));
    }
  }
  return report;
}

std::string render_report(const Report& r, ReportFormat format) {
  if (format == ReportFormat::Json) {
    nlohmann::ordered_json doc;
    doc["engine"] = r.engine;
    auto lines = nlohmann::ordered_json::array();
    std::size_t start = 0;
    while (start < r.scenario.size()) {
      const auto end = r.scenario.find('\n', start);
      lines.push_back(r.scenario.substr(start, end - start));
      start = end == std::string::npos ? r.scenario.size() : end + 1;
    }
    doc["scenario"] = lines;
    auto results = nlohmann::ordered_json::array();
    for (const auto& res : r.results) {
      nlohmann::ordered_json j;
      j["request"] = res.request;
      if (!res.ok) {
        j["status"] = "error";
        j["error"] = res.error;
        j["message"] = res.message;
        results.push_back(std::move(j));
        continue;
      }
      j["status"] = "ok";
      j["kind"] = kind_name(res.kind);
      switch (res.kind) {
        case RequestResult::Kind::Current:
        case RequestResult::Kind::Value: j["value"] = res.value; break;
        case RequestResult::Kind::Rows: {
          auto rows = nlohmann::ordered_json::array();
          for (const auto& row : res.rows) {
            rows.push_back({{"quantity", row.quantity},
                            {"epsilon", number(row.epsilon)},
                            {"grid", row.grid},
                            {"value", number(row.value)},
                            {"error_estimate", number(row.error_estimate)},
                            {"symbolic_value", number(row.symbolic_value)},
                            {"pass", row.pass}});
          }
          j["passed"] = res.passed;
          j["rows"] = rows;
          break;
        }
        case RequestResult::Kind::Check:
          j["passed"] = res.passed;
          j["details"] = res.details;
          break;
        case RequestResult::Kind::Locus: j["components"] = res.details; break;
      }
      results.push_back(std::move(j));
    }
    doc["results"] = results;
    return doc.dump(2) + "\n";
  }

  std::string out = "engine: " + r.engine + "\nscenario:\n";
  std::size_t start = 0;
  while (start < r.scenario.size()) {
    const auto end = r.scenario.find('\n', start);
    out += "  " + r.scenario.substr(start, end - start) + "\n";
    start = end == std::string::npos ? r.scenario.size() : end + 1;
  }
  out += "results:\n";
  for (std::size_t i = 0; i < r.results.size(); ++i) {
    const auto& res = r.results[i];
    out += "  [" + std::to_string(i + 1) + "] " + res.request + "\n";
    const std::string pad = "      ";
    if (!res.ok) {
      out += pad + "error " + res.message + "\n";
      continue;
    }
    switch (res.kind) {
      case RequestResult::Kind::Current:
      case RequestResult::Kind::Value: out += pad + res.value + "\n"; break;
      case RequestResult::Kind::Rows: {
        out += pad + (res.passed ? "pass" : "FAIL") + "\n";
        const auto csv = oracle::render_csv(res.rows);
        std::size_t p = 0;
        while (p < csv.size()) {
          const auto e = csv.find('\n', p);
          out += pad + csv.substr(p, e - p) + "\n";
          p = e + 1;
        }
        break;
      }
      case RequestResult::Kind::Check:
        out += pad + (res.passed ? "pass" : "FAIL") + "\n";
        for (const auto& d : res.details) out += pad + d + "\n";
        break;
      case RequestResult::Kind::Locus:
        if (res.details.empty()) out += pad + "empty\n";
        for (const auto& d : res.details) out += pad + d + "\n";
        break;
    }
  }
  return out;
}

}  // namespace segre
