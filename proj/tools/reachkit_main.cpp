#include <iostream>

#include "CLI11.hpp"
#include "cli/commands.hpp"

int main(int argc, char** argv) {
  using namespace reachkit::cli;

  CLI::App app{"reachkit: reachable, viable and invariant sets by value-function recursion"};
  app.require_subcommand(1);

  SolveOptions solve_opts;
  auto* solve = app.add_subcommand("solve", "Run the recursion for a config and write field + manifest");
  solve->add_option("config", solve_opts.config_path, "Run config (JSON)")->required();
  solve->add_option("--threads", solve_opts.threads, "Worker count (0: REACHKIT_THREADS or all cores)");
  solve->add_option("--output", solve_opts.output, "Output path prefix (overrides the config)");

  QueryOptions query_opts;
  auto* query = app.add_subcommand("query", "Interpolate a field at a state and report membership");
  query->add_option("field", query_opts.field_path, "Value-field file")->required();
  query->add_option("--state", query_opts.state, "State components, comma separated")
      ->required()
      ->delimiter(',')
      ->allow_extra_args();
  query->add_option("--horizon", query_opts.horizon, "Horizon T (must be < k*dt)")->required();

  ExportOptions export_opts;
  auto* exp = app.add_subcommand("export", "Write a field as VTK or a CSV slice");
  exp->add_option("field", export_opts.field_path, "Value-field file")->required();
  exp->add_option("--format", export_opts.format, "vtk or csv_slice")
      ->required()
      ->check(CLI::IsMember({"vtk", "csv_slice"}));
  exp->add_option("--axis", export_opts.axis, "Fixed axis for csv_slice");
  exp->add_option("--index", export_opts.index, "Node index along the fixed axis");
  exp->add_option("--output", export_opts.output, "Output file");

  VerifyOptions verify_opts;
  auto* verify = app.add_subcommand("verify", "Compare solver sets against exhaustive search");
  verify->add_option("config", verify_opts.config_path, "Run config (JSON)")->required();
  verify->add_option("--samples", verify_opts.samples, "Number of nodes to check")->required();
  verify->add_option("--seed", verify_opts.seed, "Sampling seed");
  verify->add_option("--threads", verify_opts.threads, "Worker count for the solve");
  verify->add_option("--output", verify_opts.output, "CSV path");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kUsage;
  }

  if (*solve) return cmd_solve(solve_opts, std::cout, std::cerr);
  if (*query) return cmd_query(query_opts, std::cout, std::cerr);
  if (*exp) return cmd_export(export_opts, std::cout, std::cerr);
  return cmd_verify(verify_opts, std::cout, std::cerr);
}
