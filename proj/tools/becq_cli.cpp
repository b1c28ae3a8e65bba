#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "becq/types.hpp"
#include "commands.hpp"

using namespace becq::cli;

int main(int argc, char** argv) {
  CLI::App app{"Two-component BEC qubit simulations: figure data as CSV plus a summary."};
  RunConfig cfg;
  std::string config_path;
  app.add_option("command", cfg.command, "fig2a | fig2b | fig4a | fig4b | fig4c | fig4d | deutsch | rates | "
                                         "schedule | selftest")
      ->required()
      ->check(CLI::IsMember(command_names()));
  app.add_option("--config", config_path, "key = value file; flags override it");

  struct Flag {
    const char* key;
    const char* help;
    std::string value;
  };
  Flag flags[] = {
      {"out", "CSV output path, '-' for stdout (default <command>.csv)", {}},
      {"in", "schedule file (schedule)", {}},
      {"N", "boson number per site", {}},
      {"N-max", "sweep N = 1..N-max", {}},
      {"gamma", "decay rate of the command's channel", {}},
      {"omega", "two-site coupling Omega", {}},
      {"t-end", "evolution time", {}},
      {"samples", "number of output samples", {}},
      {"tol", "integrator tolerance", {}},
      {"axis", "paper-body | caption (fig4a, fig4b)", {}},
      {"g", "laser coupling (fig4c, fig4d)", {}},
      {"G", "cavity coupling (fig4d)", {}},
      {"delta", "detuning (fig4c, fig4d)", {}},
  };
  std::vector<CLI::Option*> opts;
  for (auto& f : flags) opts.push_back(app.add_option(std::string("--") + f.key, f.value, f.help));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? kExitOk : kExitArgument;
  }

  try {
    if (!config_path.empty()) cfg.params = read_config_file(config_path);
    for (size_t i = 0; i < opts.size(); ++i)
      if (opts[i]->count() > 0) cfg.params[flags[i].key] = flags[i].value;
    auto out = cfg.params.find("out");
    const bool csv_to_stdout = out != cfg.params.end() && out->second == "-";
    return run_command(cfg, csv_to_stdout ? std::cerr : std::cout);
  } catch (const becq::ArgumentError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitArgument;
  } catch (const becq::CapacityError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitArgument;
  } catch (const std::exception& e) {
    std::cerr << "numerical error: " << e.what() << "\n";
    return kExitNumerical;
  }
}
