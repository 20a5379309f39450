#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "crext/cli.hpp"

using namespace crext;

int main(int argc, char** argv) {
  CLI::App app{"Holomorphic extension of separately analytic functions of two variables"};
  app.require_subcommand(1);
  cli::Options opt;

  auto* gallery = app.add_subcommand("gallery", "Registered oracles");
  gallery->require_subcommand(1);
  auto* list = gallery->add_subcommand("list", "List the registered oracles");
  auto* eval = gallery->add_subcommand("eval", "Evaluate an oracle at (z1, z2)");
  std::string name, z1, z2, params = "{}";
  eval->add_option("name", name, "Oracle name")->required();
  eval->add_option("z1", z1, "First variable, e.g. 0.5 or 0.3+0.2i")->required();
  eval->add_option("z2", z2, "Second variable")->required();
  eval->add_option("--params", params, "Oracle parameters as JSON");

  auto* march = app.add_subcommand("march", "Build an extension atlas from a job config");
  std::string config;
  std::optional<std::string> out, trace;
  march->add_option("--config", config, "Job config (JSON)")->required();
  march->add_option("--out", out, "Atlas output path");
  march->add_option("--trace", trace, "Trace CSV output path");
  march->add_option("--workers", opt.workers, "Worker threads");
  march->add_option("--tolerance-scale", opt.tolerance_scale, "Scale applied to every tolerance");

  auto* verify = app.add_subcommand("verify", "Run a property suite");
  std::string suite;
  verify->add_option("suite", suite, "hartogs | cauchy | discs | probes")->required();
  verify->add_option("--seed", opt.seed, "Monte Carlo seed");
  verify->add_option("--workers", opt.workers, "Worker threads");
  verify->add_option("--tolerance-scale", opt.tolerance_scale, "Scale applied to every tolerance");
  verify->add_option("--out", out, "Also write the verdict JSON here");

  auto* report = app.add_subcommand("report", "Sample an atlas along a slice as CSV");
  std::string atlas, origin, u, v;
  cli::SliceSpec slice;
  report->add_option("atlas", atlas, "Atlas JSON")->required();
  report->add_option("--origin", origin, "z1_re,z1_im,z2_re,z2_im")->required();
  report->add_option("--u", u, "First direction, same format")->required();
  report->add_option("--v", v, "Second direction for a 2-D slice");
  report->add_option("--nu", slice.nu, "Samples along u");
  report->add_option("--nv", slice.nv, "Samples along v");
  report->add_option("--out", out, "CSV output path (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return cli::kConfigError;
  }

  return cli::guarded(std::cerr, [&]() -> int {
    if (*list) return cli::cmd_gallery_list(std::cout);
    if (*eval) {
      Json p = Json::parse(params, nullptr, false);
      if (p.is_discarded()) throw ConfigError("--params is not valid JSON");
      return cli::cmd_gallery_eval(name, z1, z2, p, std::cout);
    }
    if (*march) return cli::cmd_march(config, out, trace, opt, std::cout);
    if (*verify) {
      std::ostringstream text;
      const int rc = cli::cmd_verify(suite, opt, text);
      std::cout << text.str();
      if (out) cli::detail::write_file(*out, text.str());
      return rc;
    }
    slice.origin = cli::parse_point(origin);
    slice.u = cli::parse_point(u);
    if (!v.empty()) slice.v = cli::parse_point(v);
    if (!out) return cli::cmd_report(atlas, slice, std::cout);
    std::ostringstream text;
    const int rc = cli::cmd_report(atlas, slice, text);
    cli::detail::write_file(*out, text.str());
    return rc;
  });
}
