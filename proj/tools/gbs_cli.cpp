// gbs: Gaussian boson sampling experiment runner.
//
//   gbs simulate [flags]   pattern distributions and observables
//   gbs train [flags]      train the interferometer, write trace and before/after data
//   gbs verify             built-in oracle and invariant battery
//
// Exit codes: 0 success, 1 usage error, 2 numerical or verification failure.

#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "gbs/experiment.hpp"

namespace {

struct Flags {
  std::optional<std::string> config;
  std::optional<std::string> modes, squeeze_r, squeeze_phi, haar_seed, totals, max_per_mode, out;
  std::optional<std::string> epochs, lr, target_diff, grad_method;
  std::optional<std::uint64_t> seed;
};

void apply_flags(gbs::ExperimentConfig& cfg, const Flags& f) {
  auto set = [&](const char* section, const char* key, const std::optional<std::string>& v) {
    if (v) gbs::set_config_value(cfg, section, key, *v);
  };
  set("experiment", "modes", f.modes);
  set("experiment", "squeeze_r", f.squeeze_r);
  set("experiment", "squeeze_phi", f.squeeze_phi);
  set("experiment", "haar_seed", f.haar_seed);
  set("experiment", "pattern_totals", f.totals);
  set("experiment", "max_per_mode", f.max_per_mode);
  set("experiment", "outputs", f.out);
  set("train", "max_epochs", f.epochs);
  set("train", "learning_rate", f.lr);
  set("train", "target_diff", f.target_diff);
  set("train", "grad_method", f.grad_method);
  if (f.seed) {
    cfg.haar_seed = *f.seed;
    if (cfg.train) cfg.train->seed = *f.seed;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Gaussian boson sampling in phase space: simulate, train, verify"};
  app.require_subcommand(1);
  Flags f;
  app.add_option("--config", f.config, "Config file (INI sections [experiment] and [train])");
  app.add_option("--modes", f.modes, "Number of modes");
  app.add_option("--squeeze-r", f.squeeze_r, "Squeezing magnitude, scalar or comma list");
  app.add_option("--squeeze-phi", f.squeeze_phi, "Squeezing phase in radians, scalar or comma list");
  app.add_option("--haar-seed", f.haar_seed, "Seed of the Haar interferometer");
  app.add_option("--totals", f.totals, "Comma list of photon totals to tabulate");
  app.add_option("--max-per-mode", f.max_per_mode, "Largest photon count per mode in tabulated patterns");
  app.add_option("--epochs", f.epochs, "Maximum training epochs");
  app.add_option("--lr", f.lr, "Learning rate");
  app.add_option("--target-diff", f.target_diff, "Stop once <(n0-n1)^2> is below this");
  app.add_option("--grad-method", f.grad_method, "forward_jet or central_difference");
  app.add_option("--out", f.out, "Output directory");
  app.add_option("--seed", f.seed, "Override every seed field");

  auto* simulate = app.add_subcommand("simulate", "Write pattern distributions and observables")->fallthrough();
  auto* train = app.add_subcommand("train", "Train the interferometer on the pair loss")->fallthrough();
  auto* verify = app.add_subcommand("verify", "Run the oracle and invariant battery")->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  }

  try {
    if (verify->parsed()) return gbs::cmd_verify(std::cout) ? 0 : 2;

    gbs::ExperimentConfig cfg = f.config ? gbs::load_config(*f.config) : gbs::ExperimentConfig{};
    if (train->parsed() && !cfg.train) cfg.train = gbs::TrainingConfig{};
    apply_flags(cfg, f);
    cfg.validate();

    const auto written = simulate->parsed() ? gbs::cmd_simulate(cfg) : gbs::cmd_train(cfg);
    for (const auto& p : written) std::cout << "wrote " << p.string() << '\n';
    return 0;
  } catch (const gbs::NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
}
