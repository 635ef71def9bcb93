// chemlab command-line driver.
//
//   chemlab check <config> [--json]
//   chemlab simulate <config> [--verify-heat]
//   chemlab sweep <config> --axis key=start:stop:count [--axis ...]
//   chemlab inequality --q <q> --shape <N> --trials <k> [--seed <s>]

#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "chemlab/harness.hpp"

namespace {

using chemlab::harness::ExitCode;

std::string read_text(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot read config file " + path);
  std::ostringstream s;
  s << f.rdbuf();
  return s.str();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"chemlab: boundedness conditions and simulations for a consumption chemotaxis model"};
  app.require_subcommand(1);

  std::string path;
  bool as_json = false, verify_heat = false;
  std::vector<std::string> axes;
  double q = 1.0, threshold = 0.95;
  std::size_t shape = 256;
  int trials = 50;
  std::uint64_t seed = 12345;

  auto* check = app.add_subcommand("check", "classify gamma and evaluate the boundedness conditions");
  check->add_option("config", path, "experiment config")->required();
  check->add_flag("--json", as_json, "print a JSON report");

  auto* sim = app.add_subcommand("simulate", "run the solver and write diagnostics");
  sim->add_option("config", path, "experiment config")->required();
  sim->add_flag("--verify-heat", verify_heat, "zero all coupling/source terms and compare with the exact heat solution");

  auto* sweep = app.add_subcommand("sweep", "evaluate the critical condition over a parameter grid");
  sweep->add_option("config", path, "experiment config")->required();
  sweep->add_option("--axis", axes, "key=start:stop:count (one or two)")->required();

  auto* ineq = app.add_subcommand("inequality", "interpolation inequality on random cosine series");
  ineq->add_option("--q", q, "exponent q >= 1");
  ineq->add_option("--shape", shape, "cells on [0, 1]")->check(CLI::PositiveNumber);
  ineq->add_option("--trials", trials, "number of random fields")->check(CLI::PositiveNumber);
  ineq->add_option("--seed", seed, "RNG seed");
  ineq->add_option("--threshold", threshold, "minimum acceptable ratio");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : chemlab::harness::to_int(ExitCode::Usage);
  }

  try {
    if (*check) {
      const auto cfg = chemlab::config::parse_config(read_text(path));
      return chemlab::harness::to_int(chemlab::harness::cmd_check(cfg, std::cout, as_json).code);
    }
    if (*sim) {
      const auto cfg = chemlab::config::parse_config(read_text(path));
      return chemlab::harness::to_int(chemlab::harness::cmd_simulate(cfg, {verify_heat}, std::cerr).code);
    }
    if (*sweep) {
      const auto doc = chemlab::config::parse_document(read_text(path));
      std::vector<chemlab::harness::SweepAxis> parsed;
      for (const auto& a : axes) parsed.push_back(chemlab::harness::parse_axis(a));
      chemlab::harness::cmd_sweep(doc, parsed, std::cout);
      return 0;
    }
    if (*ineq) return chemlab::harness::to_int(chemlab::harness::cmd_inequality(q, shape, trials, seed, threshold, std::cout));
  } catch (const chemlab::ScopeError& e) {
    std::cerr << "scope error: " << e.what() << "\n";
    return chemlab::harness::to_int(ExitCode::Scope);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return chemlab::harness::to_int(ExitCode::Usage);
  }
  return chemlab::harness::to_int(ExitCode::Usage);
}
