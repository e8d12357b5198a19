#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "mastrack/acceptance.hpp"
#include "mastrack/bounds.hpp"
#include "mastrack/scenario_io.hpp"
#include "mastrack/simulation.hpp"

namespace {

using namespace mastrack;

struct ConfigArgs {
  std::string config;
  std::string out;
  std::optional<double> dt;
  std::optional<double> t_end;
};

void add_config_options(CLI::App* cmd, ConfigArgs& args) {
  cmd->add_option("--config", args.config, "scenario JSON file")->required();
  cmd->add_option("--out", args.out, "output file")->required();
  cmd->add_option("--dt", args.dt, "override the integration step");
  cmd->add_option("--t-end", args.t_end, "override the horizon");
}

Scenario load(const ConfigArgs& args) {
  Scenario s = load_scenario(args.config);
  if (args.dt) s.integration.dt = *args.dt;
  if (args.t_end) s.integration.t_end = *args.t_end;
  validate(s);
  return s;
}

void write_json(const nlohmann::ordered_json& j, const std::string& path) {
  std::ofstream f(path);
  if (!f) throw std::runtime_error(path + ": cannot write file");
  f << j.dump(2) << '\n';
}

int cmd_run(const ConfigArgs& args) {
  const Scenario s = load(args);
  const SimTrace trace = run_scenario(s);
  export_trace(trace, args.out);
  const Table& tab = trace.derived;
  std::printf("%s: %zu rows, final err_pos_norm %.6g, wrote %s\n", s.name.c_str(), tab.rows(),
              tab.at(tab.rows() - 1, tab.column("err_pos_norm")), args.out.c_str());
  return 0;
}

int cmd_bounds(const ConfigArgs& args) {
  const Scenario s = load(args);
  const BoundCertificate cert = certify(s);
  write_json(certificate_to_json(cert), args.out);
  std::printf("%s: lambda_min(H) %.8g, transient %.6g, asymptotic %.6g\n", s.name.c_str(), cert.lambda_min_h,
              cert.transient_bound, cert.asymptotic_bound);
  return 0;
}

int cmd_oracle(const ConfigArgs& args) {
  const Scenario s = load(args);
  const OracleReport rep = compare_with_oracle(s);
  export_table(rep.series, args.out);
  for (std::size_t b = 0; b < rep.blocks.size(); ++b)
    std::printf("max |diff| %-6s %.3e\n", rep.blocks[b].c_str(), rep.max_diff[b]);
  return 0;
}

int cmd_verify(const std::string& suite, bool fast) {
  AcceptanceOptions opt;
  opt.suite = suite_from_string(suite);
  opt.fast = fast;
  bool ok = true;
  for (const auto& r : run_acceptance(opt)) {
    std::cout << summary_line(r) << '\n';
    for (const auto& c : r.checks) std::cout << check_line(c) << '\n';
    ok = ok && r.pass();
  }
  std::cout << (ok ? "all criteria pass" : "some criteria fail") << std::endl;
  return ok ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Leader-follower tracking simulator and bound checker"};
  app.require_subcommand(1);

  ConfigArgs run_args, bounds_args, oracle_args;
  auto* run = app.add_subcommand("run", "simulate a scenario and write the trace CSV");
  add_config_options(run, run_args);
  auto* bounds = app.add_subcommand("bounds", "certify tracking bounds and write them as JSON");
  add_config_options(bounds, bounds_args);
  auto* oracle = app.add_subcommand("oracle", "compare closed-loop errors with the integrated error dynamics");
  add_config_options(oracle, oracle_args);

  std::string suite = "all";
  bool fast = false;
  auto* verify = app.add_subcommand("verify", "run the acceptance criteria");
  verify->add_option("--suite", suite, "first, second or all")->check(CLI::IsMember({"first", "second", "all"}));
  verify->add_flag("--fast", fast, "fewer random instances");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    std::cout << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    std::cerr << e.what() << "\n\n" << app.help();
    return 2;
  }

  try {
    if (*run) return cmd_run(run_args);
    if (*bounds) return cmd_bounds(bounds_args);
    if (*oracle) return cmd_oracle(oracle_args);
    return cmd_verify(suite, fast);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
