// Command-line driver: isogeo generate|verify|spin|catalogue
//   --config <path>  flat key = value job description (required)
//   --out <dir>      output directory for artifacts (default ".")
//   --tolerance <t>  fallback tolerance for checks without an override
//
// Exit statuses: 0 ok, 1 verification failure, 2 input error.

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include "isogeo/expr.hpp"
#include "isogeo/job.hpp"
#include "isogeo/represent.hpp"
#include "isogeo/surface.hpp"

namespace {

std::string read_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw isogeo::ConfigError("cannot open config file: " + path);
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"conformal surfaces in isotropic 3-space: generation, "
               "spin transformations, and numerical verification"};
  app.require_subcommand(1);

  std::string config_path, out_dir = ".";
  double tol_value = 0;
  for (const char* name : {"generate", "verify", "spin", "catalogue"}) {
    CLI::App* sub = app.add_subcommand(name);
    sub->add_option("--config", config_path, "job configuration file")
        ->required();
    sub->add_option("--out", out_dir, "output directory");
    sub->add_option("--tolerance", tol_value,
                    "fallback tolerance for unconfigured checks");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  CLI::App* sub = app.get_subcommands().front();
  std::optional<double> fallback;
  if (sub->count("--tolerance")) fallback = tol_value;

  try {
    isogeo::JobConfig cfg =
        isogeo::parse_config(read_file(config_path), sub->get_name());
    if (fallback) cfg.tol_fallback = fallback;
    return isogeo::run_job(cfg, out_dir, std::cout);
  } catch (const isogeo::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const isogeo::PoleError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const isogeo::ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const isogeo::CompatibilityError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const isogeo::IntegrabilityError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const isogeo::NonConformalError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const isogeo::NonSpacelikeError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::logic_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::runtime_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
