#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "segre/errors.hpp"
#include "segre/scenario.hpp"

namespace {

int run(const std::string& path, const std::string& format, const std::string& out_path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    std::cerr << "cannot read " << path << "\n";
    return 2;
  }
  std::stringstream text;
  text << in.rdbuf();

  segre::Scenario scenario;
  try {
    scenario = segre::parse_scenario(text.str());
  } catch (const segre::Error& e) {
    std::cerr << path << ": " << e.what() << "\n";
    return 2;
  }

  const auto report = segre::run_scenario(scenario);
  const auto bytes =
      segre::render_report(report, format == "json" ? segre::ReportFormat::Json : segre::ReportFormat::Text);
  if (out_path.empty()) {
    std::cout << bytes;
  } else {
    std::ofstream out(out_path, std::ios::binary);
    if (!out) {
      std::cerr << "cannot write " << out_path << "\n";
      return 3;
    }
    out << bytes;
  }
  return report.has_errors() ? 3 : 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Segre and Chern currents of singular metrics with analytic singularities"};
  app.set_version_flag("--version", std::string(segre::engine_version));
  app.require_subcommand(1);

  std::string path;
  std::string format = "text";
  std::string out_path;
  auto* cmd = app.add_subcommand("run", "Run a scenario file and print its report");
  cmd->add_option("scenario", path, "Scenario file")->required();
  cmd->add_option("--format", format, "Report format")->check(CLI::IsMember({"text", "json"}));
  cmd->add_option("--out", out_path, "Write the report here instead of stdout");

  CLI11_PARSE(app, argc, argv);
  return run(path, format, out_path);
}
