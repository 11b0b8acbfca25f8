// frachh - command line front end for the campaign runner.
//
//   frachh <campaign> --config <path> --out <dir> [--seed N] [--override-admissibility]

#include <fstream>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"

#include "frachh/experiment.hpp"

int main(int argc, char** argv) {
  CLI::App app{"fractional heat equation with a singular Hardy-type nonlinearity and "
               "fractional Brownian forcing: samplers, estimate verifiers, Picard solver"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir;
  long long seed = -1;
  bool override_admissibility = false;

  for (const auto& name : frachh::campaign_names()) {
    CLI::App* sub = app.add_subcommand(name, "run the '" + name + "' campaign");
    sub->add_option("--config", config_path, "JSON config file")->required();
    sub->add_option("--out", out_dir, "output bundle directory")->required();
    sub->add_option("--seed", seed, "override the config seed");
    sub->add_flag("--override-admissibility", override_admissibility,
                  "run even when the parameter tuple fails the admissibility check");
  }

  CLI11_PARSE(app, argc, argv);
  const std::string campaign = app.get_subcommands().front()->get_name();

  try {
    std::ifstream in(config_path);
    if (!in) throw std::runtime_error("cannot open config file: " + config_path);
    nlohmann::json cfg;
    in >> cfg;
    if (!cfg.contains("campaign")) {
      cfg["campaign"] = campaign;
    } else if (cfg.at("campaign").get<std::string>() != campaign) {
      throw std::invalid_argument("config names campaign '" +
                                  cfg.at("campaign").get<std::string>() +
                                  "' but the command line asked for '" + campaign + "'");
    }
    const frachh::ExperimentResult res =
        frachh::run_experiment(cfg, out_dir, seed, override_admissibility);
    std::cout << "wrote bundle to " << res.out_dir.string() << "\n";
    return 0;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
