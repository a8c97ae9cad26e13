#include <sys/wait.h>

#include <cstdlib>
#include <fstream>
#include <random>
#include <sstream>

#include "doctest.h"
#include "fixtures.hpp"
#include "generators.hpp"
#include "segre/errors.hpp"
#include "segre/scenario.hpp"

using namespace segre;

namespace {

const char* const golden_names[] = {"conformal_norm_c2", "line_bundle_hyperplane", "degenerate_rank2_c3",
                                    "noncommuting_monomials"};

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in.good());
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string scenario_path(const std::string& name) {
  return std::string(SEGRE_SOURCE_DIR) + "/scenarios/" + name + ".scn";
}

ErrorKind parse_error_kind(const std::string& text, std::string* message = nullptr) {
  try {
    parse_scenario(text);
  } catch (const Error& e) {
    if (message) *message = e.what();
    return e.kind();
  }
  FAIL("scenario parsed: " << text);
  return ErrorKind::MalformedTerm;
}

std::vector<std::string> values(const Report& r) {
  std::vector<std::string> out;
  for (const auto& res : r.results) out.push_back(res.ok ? res.value : res.error);
  return out;
}

int cli(const std::string& args) {
  const int status = std::system((std::string(SEGRE_CLI) + " " + args + " > /dev/null 2>&1").c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

}  // namespace

TEST_CASE("metric declarations parse to the expected specs") {
  const auto conformal = parse_scenario("space = x1, x2\nbundle = rank 2\nmetric = conformal: log|x1,x2|^2\n");
  CHECK(*conformal.metric == fixtures::conformal_norm_c2());

  const auto o1 = parse_scenario("space = 3\nbundle = rank 2\nmetric = o1weight: log|x1|^2 + section(xi_2)\n");
  CHECK(*o1.metric == fixtures::degenerate_rank2_c3());

  const auto line = parse_scenario("space = 4\nmetric = line: log|x1|^2\n");
  CHECK(*line.metric == fixtures::line_hyperplane(4));
}

TEST_CASE("weight expressions") {
  const auto s = parse_scenario(
      "space = x1, x2\nbundle = rank 2\nform v = 1\n"
      "weight a = log|x1*x2^2|^2 + 2*log|x1,x2|^2 + 1/2*log|x2|^2\n"
      "weight b = fs + section(xi_2) + smooth(v)\n"
      "weight c = fs_2 + section(2:xi_1)\n");
  CHECK(s.weight("a").render() == "log|x1*x2^2|^2 + 2*log|x1,x2|^2 + 1/2*log|x2|^2");
  CHECK(s.weight("a").ambient.fiber_count == 0);
  CHECK(s.weight("b").ambient.fiber_count == 1);
  CHECK(s.weight("c").ambient.fiber_count == 2);
  CHECK(s.weight("c").render() == "fs_2 + section(2:xi_1)");
}

TEST_CASE("scenario runs reproduce the conformal example") {
  const auto s = parse_scenario(
      "space = x1, x2\nbundle = rank 2\nmetric = conformal: log|x1,x2|^2\n"
      "compute = segre 2; chern 2; lelong(segre 2, origin)\n");
  const auto r = run_scenario(s);
  CHECK(values(r) == std::vector<std::string>{"3*[x1=0,x2=0]", "1*[x1=0,x2=0]", "3"});
  CHECK_FALSE(r.has_errors());
}

TEST_CASE("scenario runs reproduce the degenerate example in both orders") {
  const auto s = parse_scenario(slurp(scenario_path("degenerate_rank2_c3")));
  const auto r = run_scenario(s);
  REQUIRE(r.results.size() >= 2);
  CHECK(r.results[0].value == "0");
  CHECK(r.results[1].value == "-1*(ddc_zeta_sq)^2*[x1=0]");
}

TEST_CASE("an empty compute list gives an empty report body") {
  const auto r = run_scenario(parse_scenario("space = 2\ncompute =\n"));
  CHECK(r.results.empty());
  const auto text = render_report(r, ReportFormat::Text);
  CHECK(text.substr(text.size() - 9) == "results:\n");
}

TEST_CASE("rendering conventions") {
  const auto s = parse_scenario(
      "space = x1, x2\nform beta = 1\n"
      "weight u = log|x1|^2\n"
      "compute = bracket_expand(u, 3*[x1=0,x2=0], 0); bracket_expand(u, -2*sigma{x1,x2}, 1)\n"
      "compute = bracket_expand(u, beta + [x2=0] - 1/2*beta, 1); bracket_expand(u, [x2=0] + 1/2*beta, 1)\n");
  CHECK(s.compute[0].alpha->render() == "3*[x1=0,x2=0]");
  CHECK(s.compute[1].alpha->render() == "-2*sigma{x1,x2}");
  CHECK(*s.compute[2].alpha == *s.compute[3].alpha);
  CHECK(s.compute[2].render() == s.compute[3].render());
}

TEST_CASE("diagnostics carry a location and a rule name") {
  std::string msg;
  CHECK(parse_error_kind("space = 2\nweight u = log|x1|^2 +\n", &msg) == ErrorKind::ParseError);
  CHECK(msg.find("line 2, column") != std::string::npos);
  CHECK(parse_error_kind("space = 2\nmetric = line: log|x1|^2\ncompute = segre_product [1,\n") == ErrorKind::ParseError);
  CHECK(parse_error_kind("weight u = log|x1|^2\n") == ErrorKind::ParseError);
  CHECK(parse_error_kind("space = 2\nbogus = 1\n") == ErrorKind::ParseError);
  CHECK(parse_error_kind("space = 2\nweight u = log|x1|^2\nbundle = rank 2\n") == ErrorKind::ParseError);
  CHECK(parse_error_kind("space = 2\nweight u = log|x1|^2\ncompute = bracket_power(u, theta, 1)\ntheta = eta\n") ==
        ErrorKind::ParseError);
  CHECK(parse_error_kind("space = 2\nweight u = -1*log|x1|^2\n") == ErrorKind::ParseError);

  CHECK(parse_error_kind("space = 2\ncompute = ma_power(w, 2)\n", &msg) == ErrorKind::UndeclaredSymbol);
  CHECK(msg.find("line 2, column") != std::string::npos);
  CHECK(parse_error_kind("space = 2\ncompute = segre 1\n") == ErrorKind::UndeclaredSymbol);
  CHECK(parse_error_kind("space = 2\nweight u = log|y|^2\n") == ErrorKind::UndeclaredSymbol);
  CHECK(parse_error_kind("space = 2\nsegre_g[1] = beta\n") == ErrorKind::UndeclaredSymbol);
  CHECK(parse_error_kind("space = 2\nweight u = log|x1|^2\ncompute = gprod[u:S]\n") == ErrorKind::UndeclaredSymbol);

  CHECK(parse_error_kind("space = 2\nbundle = rank 2\nmetric = line: log|x1|^2\n") == ErrorKind::RankMismatch);
  CHECK(parse_error_kind("space = 2\nbundle = rank 2\nmetric = o1weight: section(xi_3)\n") ==
        ErrorKind::RankMismatch);
  CHECK(parse_error_kind("space = 2\nmetric = o1weight: fs\n") == ErrorKind::RankMismatch);
}

TEST_CASE("a failing request leaves the others intact") {
  const std::string head =
      "space = 3\nbundle = rank 2\nmetric = o1weight: log|x1|^2 + section(xi_2)\n";
  const auto full = run_scenario(parse_scenario(head + "compute = segre 1; segre_product [2,1]; chern 1\n"));
  const auto clean = run_scenario(parse_scenario(head + "compute = segre 1; chern 1\n"));
  REQUIRE(full.results.size() == 3);
  CHECK_FALSE(full.results[1].ok);
  CHECK(full.results[1].error == "UnsupportedPushforward");
  CHECK(full.has_errors());
  CHECK(full.results[0].value == clean.results[0].value);
  CHECK(full.results[2].value == clean.results[1].value);
  CHECK(render_report(full, ReportFormat::Text).find("error UnsupportedPushforward") != std::string::npos);
}

TEST_CASE("golden scenarios round-trip through the renderer") {
  for (const char* name : golden_names) {
    CAPTURE(name);
    const auto s = parse_scenario(slurp(scenario_path(name)));
    const auto again = parse_scenario(render_scenario(s));
    CHECK(again == s);
    CHECK(render_scenario(again) == render_scenario(s));
  }
}

TEST_CASE("property: parse after render is the identity on generated scenarios") {
  std::mt19937 rng(31);
  const char* points[] = {"origin", "generic"};
  for (int iter = 0; iter < 200; ++iter) {
    const int n = testing::uniform(rng, 1, 3);
    const int r = testing::uniform(rng, 1, 2);
    const auto base = Ambient::make(n, r, 0);
    std::string text = "space = " + std::to_string(n) + "\nbundle = rank " + std::to_string(r) + "\n";
    const std::string tag = testing::uniform(rng, 0, 1) ? "theta" : "eta";
    text += "theta = " + tag + "\nform beta = 1\n";
    const auto metric_weight = testing::random_weight(rng, base, false);
    text += std::string(r == 1 ? "metric = line: " : "metric = conformal: ") + metric_weight.render() + "\n";
    text += "segre_g[1] = " + std::to_string(testing::uniform(rng, -3, 3)) + "/2*beta + [x1=0]\n";
    if (r == 2) text += "subst " + tag + "*[xi_2=0] = fs_1*[x1=0]\n";
    const int weights = testing::uniform(rng, 1, 3);
    for (int w = 0; w < weights; ++w) {
      const auto y = Ambient::make(n, r, testing::uniform(rng, 0, 1));
      text += "weight w" + std::to_string(w) + " = " + testing::random_weight(rng, y).render() + "\n";
    }
    text += "set S = complement{[x1=0]}\n";
    const int requests = testing::uniform(rng, 0, 5);
    for (int q = 0; q < requests; ++q) {
      const auto w = "w" + std::to_string(testing::uniform(rng, 0, weights - 1));
      const int k = testing::uniform(rng, 0, 3);
      switch (testing::uniform(rng, 0, 6)) {
        case 0: text += "compute = ma_power(" + w + ", " + std::to_string(k) + ")\n"; break;
        case 1: text += "compute = gprod[" + w + ":off, w0:S]\n"; break;
        case 2: text += "compute = segre " + std::to_string(k) + "; chern " + std::to_string(k) + "\n"; break;
        case 3: text += "compute = segre_product [" + std::to_string(k) + ",1]\n"; break;
        case 4: text += "compute = lelong(push_ma " + std::to_string(k) + ", " + points[k % 2] + ")\n"; break;
        case 5: text += "compute = oracle_check(segre " + std::to_string(k) + ", 0.125)\n"; break;
        default: text += "compute = theta_check(zeta, " + std::to_string(k) + "); degeneracy\n"; break;
      }
    }
    CAPTURE(text);
    Scenario s;
    try {
      s = parse_scenario(text);
    } catch (const Error& e) {
      FAIL(std::string(e.what()));
    }
    const auto rendered = render_scenario(s);
    const auto again = parse_scenario(rendered);
    CHECK(again == s);
    CHECK(render_scenario(again) == rendered);
  }
}

TEST_CASE("golden reports are reproduced byte for byte") {
  for (const char* name : golden_names) {
    CAPTURE(name);
    const auto s = parse_scenario(slurp(scenario_path(name)));
    const auto first = run_scenario(s);
    const auto second = run_scenario(s);
    const auto text = render_report(first, ReportFormat::Text);
    const auto json = render_report(first, ReportFormat::Json);
    CHECK(text == render_report(second, ReportFormat::Text));
    CHECK(json == render_report(second, ReportFormat::Json));
    CHECK(text == slurp(std::string(SEGRE_SOURCE_DIR) + "/tests/golden/" + name + ".txt"));
    CHECK(json == slurp(std::string(SEGRE_SOURCE_DIR) + "/tests/golden/" + name + ".json"));
    CHECK_FALSE(first.has_errors());
  }
}

TEST_CASE("command line exit codes") {
  const std::string dir = std::string(SEGRE_SOURCE_DIR) + "/scenarios/";
  CHECK(cli("run " + dir + "line_bundle_hyperplane.scn --format json") == 0);

  const std::string bad = "segre_cli_bad.scn";
  std::ofstream(bad) << "space = 2\nweight u = log|x1|^2 +\n";
  CHECK(cli("run " + bad) == 2);

  const std::string failing = "segre_cli_failing.scn";
  std::ofstream(failing) << "space = 3\nbundle = rank 2\nmetric = o1weight: log|x1|^2 + section(xi_2)\n"
                            "compute = segre_product [2,1]\n";
  CHECK(cli("run " + failing) == 3);
  CHECK(cli("run missing_file.scn") == 2);
  std::remove(bad.c_str());
  std::remove(failing.c_str());
}
