#include <algorithm>
#include <cstdlib>
#include <cstring>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "commands.hpp"
#include "fvps/errors.hpp"
#include "fvps/io.hpp"

namespace {

// Pulls "--config PATH" / "--config=PATH" out of args; returns the path or "".
std::string take_config(std::vector<std::string>& args) {
  std::string path;
  for (std::size_t i = 1; i < args.size(); ++i) {
    if (args[i] == "--config" && i + 1 < args.size()) {
      path = args[i + 1];
      args.erase(args.begin() + static_cast<std::ptrdiff_t>(i), args.begin() + static_cast<std::ptrdiff_t>(i) + 2);
      break;
    }
    if (args[i].rfind("--config=", 0) == 0) {
      path = args[i].substr(9);
      args.erase(args.begin() + static_cast<std::ptrdiff_t>(i));
      break;
    }
  }
  return path;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Relativistic phase-space toolkit: Wigner functions, Moyal dynamics, rotators and pairs."};
  app.set_version_flag("--version", std::string(fvps::version()));
  app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast)->always_capture_default();
  app.require_subcommand(1);
  // global flags may follow the subcommand
  app.fallthrough();

  fvps::cli::Globals globals;
  app.add_option("--jobs", globals.jobs, "Worker threads for sweeps and time series")
      ->envname("FVPS_JOBS")
      ->check(CLI::Range(1u, 256u));
  app.add_option("--config", globals.config, "Flat key=value file; command-line flags override it");

  int exit_code = fvps::cli::kOk;
  fvps::cli::register_commands(app, globals, exit_code);

  std::vector<std::string> args(argv, argv + argc);
  try {
    // CLI11 drops env values that fail a check; reject them instead
    if (const char* env = std::getenv("FVPS_JOBS"); env && *env) {
      const std::string err = CLI::Range(1u, 256u)(std::string(env));
      if (!err.empty()) throw CLI::ValidationError("FVPS_JOBS", err);
    }
    const std::string config = take_config(args);
    if (!config.empty()) {
      globals.config = config;
      auto extra = fvps::cli::config_arguments(config);
      // file values go right after the subcommand so later flags win
      auto sub = std::find_if(args.begin() + 1, args.end(), [&](const std::string& a) {
        for (const auto* s : app.get_subcommands({})) if (s->get_name() == a) return true;
        return false;
      });
      const auto at = sub == args.end() ? args.end() : sub + 1;
      args.insert(at, extra.begin(), extra.end());
    }
    std::vector<char*> cargs;
    for (auto& a : args) cargs.push_back(a.data());
    app.parse(static_cast<int>(cargs.size()), cargs.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? fvps::cli::kOk : fvps::cli::kValidation;
  } catch (const fvps::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return fvps::cli::kValidation;
  } catch (const std::exception& e) {
    std::cerr << "fatal: " << e.what() << '\n';
    return 1;
  }
  return exit_code;
}
