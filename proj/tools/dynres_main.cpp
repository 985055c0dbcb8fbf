#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "dynres/commands.hpp"
#include "dynres/config.hpp"
#include "dynres/selftest.hpp"

namespace {

struct Options {
  std::string config;
  std::string out;
  int workers = 0;
  std::vector<std::string> sets;
};

void add_common(CLI::App* cmd, Options& o) {
  cmd->add_option("--config", o.config, "JSON run configuration")->check(CLI::ExistingFile);
  cmd->add_option("--out", o.out, "output directory (overrides output_dir)");
  cmd->add_option("--workers", o.workers, "parallel sweep points (overrides workers)")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--set", o.sets, "override a config leaf, e.g. modulation.depth=68")
      ->take_all();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"dynres: decay of an emitter into a frequency-modulated Lorentzian reservoir"};
  app.require_subcommand(1);
  Options opt;
  CLI::App* simulate = app.add_subcommand("simulate", "propagate one configuration");
  CLI::App* rates = app.add_subcommand("rates", "analytic sideband rates");
  CLI::App* sweep = app.add_subcommand("sweep", "evaluate a parameter sweep");
  CLI::App* selftest = app.add_subcommand("selftest", "run the built-in invariant checks");
  for (CLI::App* c : {simulate, rates, sweep}) add_common(c, opt);
  std::string fault;
  selftest->add_option("--inject-fault", fault, "break one component on purpose")
      ->check(CLI::IsMember({"elliptic"}))
      ->group("");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 2;
  }

  if (selftest->parsed()) {
    dynres::SelfTestOptions so;
    if (fault == "elliptic") so.elliptic_override = [](double m) { return 1.0 + 0.5 * m; };
    return dynres::print_report(std::cout, dynres::run_selftest(so)) ? 0 : 1;
  }

  dynres::RunConfig cfg;
  try {
    std::vector<std::string> sets = opt.sets;
    if (opt.workers > 0) sets.push_back("workers=" + std::to_string(opt.workers));
    if (!opt.out.empty()) {
      nlohmann::json path = opt.out;
      sets.push_back("output_dir=" + path.dump());
    }
    cfg = dynres::load_config(opt.config, sets);
    if (sweep->parsed() && !cfg.sweep) throw dynres::ConfigError("sweep: config has no sweep section");
    if (simulate->parsed()) cfg.make_sim(cfg.make_bath());
  } catch (const std::exception& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  }

  try {
    const std::filesystem::path out = cfg.output_dir;
    if (simulate->parsed()) return dynres::cmd_simulate(cfg, out, std::cerr);
    if (rates->parsed()) return dynres::cmd_rates(cfg, out, std::cerr);
    return dynres::cmd_sweep(cfg, out, std::cerr);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
