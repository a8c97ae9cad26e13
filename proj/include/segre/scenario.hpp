#pragma once

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "segre/lelong.hpp"
#include "segre/oracle.hpp"
#include "segre/projective.hpp"

namespace segre {

inline constexpr std::string_view engine_version = "segre-engine 0.1.0";

struct FormDecl {
  std::string name;
  int degree = 1;
  bool operator==(const FormDecl&) const = default;
};

struct WeightDecl {
  std::string name;
  Weight weight;
  bool operator==(const WeightDecl&) const = default;
};

/// Named constructible set built from base coordinate subvarieties.
struct SetDecl {
  std::string name;
  ConstructibleSet::Polarity polarity = ConstructibleSet::Polarity::Union;
  std::vector<IndexSet> members;
  bool operator==(const SetDecl&) const = default;
};

struct Request {
  enum class Kind {
    MaPower,             // ma_power(u, m)
    GeneralizedProduct,  // gprod[u_m:D_m, ..., u_1:D_1], outermost first
    BracketPower,        // bracket_power(u, alpha, m)
    BracketExpand,       // bracket_expand(u, alpha, m)
    Segre,               // segre k
    Chern,               // chern k
    SegreProduct,        // segre_product [k_t, ..., k_1]
    PushMa,              // push_ma m
    Lelong,              // lelong(target, point)
    OracleCheck,         // oracle_check(target, tolerance)
    Degeneracy,          // degeneracy
    SmoothCheck,         // smooth_check k
    ThetaCheck,          // theta_check(tag, k)
  };

  struct Factor {
    std::string weight;
    std::string domain;  // `off`, `all` or a declared set
    bool operator==(const Factor&) const = default;
  };

  Kind kind = Kind::Degeneracy;
  std::string weight;
  std::optional<Current> alpha;
  int k = 0;
  std::vector<int> ks;
  std::vector<Factor> factors;
  std::vector<Request> target;  // Lelong, OracleCheck: exactly one entry
  BasePoint point;
  double tolerance = 0.0;
  std::string tag;

  std::string render() const;
  bool operator==(const Request&) const = default;
};

struct Scenario {
  std::vector<std::string> coords;
  int rank = 1;
  std::optional<MetricSpec> metric;
  std::string theta_tag = "theta";
  std::vector<FormDecl> forms;
  std::map<int, Current> segre_symbols;
  std::vector<SymbolRules::Substitution> substitutions;
  std::vector<WeightDecl> weights;
  std::vector<SetDecl> sets;
  std::vector<Request> compute;

  Ambient base() const;
  SymbolRules rules() const;
  const Weight& weight(const std::string& name) const;

  bool operator==(const Scenario& other) const;
};

/// ParseError (with line and column), UndeclaredSymbol or RankMismatch on bad input.
Scenario parse_scenario(std::string_view text);

/// Canonical scenario text; parse_scenario(render_scenario(s)) == s.
std::string render_scenario(const Scenario& s);

struct RequestResult {
  enum class Kind { Current, Value, Rows, Check, Locus };

  std::string request;
  Kind kind = Kind::Current;
  bool ok = true;               // false when the engine refused the request
  std::string error;            // rule name
  std::string message;
  std::string value;            // Current and Value
  std::vector<oracle::OracleRow> rows;
  bool passed = true;           // Rows and Check
  std::vector<std::string> details;  // Check lines, Locus components
};

struct Report {
  std::string engine{engine_version};
  std::string scenario;
  std::vector<RequestResult> results;

  bool has_errors() const;
};

/// Runs every request in order; an engine error is recorded on its request only.
Report run_scenario(const Scenario& s);

enum class ReportFormat { Text, Json };

std::string render_report(const Report& r, ReportFormat format);

}  // namespace segre
