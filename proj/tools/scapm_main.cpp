#include "cli/commands.hpp"

#include "CLI11.hpp"

#include <iostream>

int main(int argc, char** argv) {
  using namespace scapm::cli;

  CLI::App app{"Index outperformance analysis for constant-coefficient Black-Scholes markets"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(tool_version()));

  AnalyzeOptions analyze;
  auto* a = app.add_subcommand("analyze", "Risk profile, SCAPM residuals and horizon thresholds");
  a->add_option("--config", analyze.config_path, "Market JSON")->required();
  a->add_option("--epsilon", analyze.epsilons, "Failure probability budget(s)")->expected(1, -1);
  a->add_option("--delta", analyze.deltas, "Outperformance factor 1/delta; delta value(s)")->expected(1, -1);
  a->add_option("--horizon", analyze.horizons, "Investment horizon(s)")->expected(1, -1);
  std::string analyze_out;
  a->add_option("--out", analyze_out, "Write the JSON report here instead of stdout");

  SimulateOptions simulate;
  simulate.seed = default_seed();
  auto* s = app.add_subcommand("simulate", "Simulate prices and the wealth process");
  s->add_option("--config", simulate.config_path, "Market JSON")->required();
  s->add_option("--paths", simulate.paths, "Number of paths")->check(CLI::PositiveNumber);
  s->add_option("--steps", simulate.steps, "Uniform grid steps")->check(CLI::PositiveNumber);
  double horizon = 0.0;
  auto* h = s->add_option("--horizon", horizon, "Horizon T (defaults to the schedule length)");
  s->add_option("--seed", simulate.seed, "Master seed (default $SCAPM_SEED or 1)");
  std::string full_paths;
  std::string sim_out;
  s->add_option("--full-paths", full_paths, "Write every grid point of every path to this CSV");
  s->add_option("--out", sim_out, "Per-path CSV (stdout if absent; summary then goes to stderr)");
  s->add_option("--threads", simulate.threads, "Worker threads, 0 = all cores");
  s->add_option("--max-full-rows", simulate.max_full_rows, "Row cap for --full-paths");

  VerifyOptions verify;
  verify.seed = default_seed();
  auto* v = app.add_subcommand("verify", "Run the acceptance experiments against a market");
  v->add_option("--config", verify.config_path, "Market JSON")->required();
  std::string level = "quick";
  v->add_option("--level", level, "quick or full")->check(CLI::IsMember({"quick", "full"}));
  v->add_option("--threads", verify.threads, "Worker threads, 0 = all cores");
  v->add_option("--seed", verify.seed, "Master seed (default $SCAPM_SEED or 1)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitValidation;
  }

  if (*a) {
    if (!analyze_out.empty()) analyze.out = analyze_out;
    return run_analyze(analyze, std::cout, std::cerr);
  }
  if (*s) {
    if (*h) simulate.horizon = horizon;
    if (!full_paths.empty()) simulate.full_paths = full_paths;
    if (!sim_out.empty()) simulate.out = sim_out;
    return run_simulate(simulate, std::cout, std::cerr);
  }
  verify.level = level == "full" ? VerifyLevel::kFull : VerifyLevel::kQuick;
  return run_verify(verify, std::cout, std::cerr);
}
