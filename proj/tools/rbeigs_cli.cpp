#include <cstdint>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "rbeigs/config.hpp"
#include "rbeigs/errors.hpp"
#include "rbeigs/experiment.hpp"

namespace {

struct CommonArgs {
  std::string config_path;
  std::string mu_text;
  std::string out_dir;
  std::string preset;
  std::uint64_t seed = 0;
  bool seed_set = false;
  bool out_set = false;
};

void add_common(CLI::App* cmd, CommonArgs& args, bool needs_mu) {
  cmd->add_option("--config", args.config_path, "experiment config file")->required();
  auto* mu = cmd->add_option("--mu", args.mu_text,
                             "parameter point(s), components comma separated, "
                             "points semicolon separated");
  if (needs_mu) mu->required();
  cmd->add_option("--out", args.out_dir, "output directory")
      ->each([&args](const std::string&) { args.out_set = true; });
  cmd->add_option("--seed", args.seed, "RNG seed")
      ->each([&args](const std::string&) { args.seed_set = true; });
  cmd->add_option("--preset", args.preset, "preset override")
      ->check(CLI::IsMember({"desk", "paper"}));
}

rbeigs::ExperimentConfig make_config(const CommonArgs& args) {
  const std::uint64_t* seed = args.seed_set ? &args.seed : nullptr;
  std::filesystem::path out;
  const std::filesystem::path* out_ptr = nullptr;
  if (args.out_set) {
    out = args.out_dir;
    out_ptr = &out;
  }
  return rbeigs::load_config(args.config_path, args.preset, seed, out_ptr);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Reduced-basis solver for parametric generalized eigenvalue problems"};
  app.require_subcommand(1);

  CommonArgs fom_args, offline_args, sweep_args, bounds_args;
  CLI::App* fom = app.add_subcommand("fom", "solve the full-order model at one parameter");
  add_common(fom, fom_args, true);
  CLI::App* offline =
      app.add_subcommand("offline", "collect snapshots and build the reduced basis");
  add_common(offline, offline_args, false);
  CLI::App* sweep =
      app.add_subcommand("sweep", "ROM vs FOM errors over the test grid");
  add_common(sweep, sweep_args, false);
  CLI::App* bounds =
      app.add_subcommand("bounds", "certify eigenvalue/eigenvector bounds");
  add_common(bounds, bounds_args, true);
  app.add_subcommand("list-problems", "list the built-in problems");

  CLI11_PARSE(app, argc, argv);

  try {
    if (app.got_subcommand("list-problems")) return rbeigs::cmd_list_problems();
    if (app.got_subcommand(fom)) {
      const auto mus = rbeigs::parse_point_list(fom_args.mu_text);
      if (mus.size() != 1) {
        std::cerr << "fom: expected exactly one parameter point\n";
        return 3;
      }
      rbeigs::ExperimentContext ctx(make_config(fom_args));
      return rbeigs::cmd_fom(ctx, mus[0]);
    }
    if (app.got_subcommand(offline)) {
      rbeigs::ExperimentContext ctx(make_config(offline_args));
      return rbeigs::cmd_offline(ctx);
    }
    if (app.got_subcommand(sweep)) {
      rbeigs::ExperimentContext ctx(make_config(sweep_args));
      return rbeigs::cmd_sweep(ctx);
    }
    if (app.got_subcommand(bounds)) {
      const auto mus = rbeigs::parse_point_list(bounds_args.mu_text);
      if (mus.empty()) {
        std::cerr << "bounds: no parameter points given\n";
        return 3;
      }
      rbeigs::ExperimentContext ctx(make_config(bounds_args));
      return rbeigs::cmd_bounds(ctx, mus);
    }
  } catch (const rbeigs::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 3;
  } catch (const rbeigs::NoConvergence& e) {
    std::cerr << "solver failure: " << e.what() << "\n";
    return 2;
  } catch (const rbeigs::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
