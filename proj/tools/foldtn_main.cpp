// foldtn: run, compare, sweep and reproduce experiments.
//
//   foldtn run --config run.json [--out DIR] [--chi N] [--t T] [--engine E] [--init I]
//   foldtn compare A/manifest.json B/manifest.json [--out diff.csv]
//   foldtn compare A/manifest.json --series ref/itebd.csv
//   foldtn sweep --config sweep.json --out DIR [--threads K]
//   foldtn reproduce FIGURE [--scale desk|full] --out DIR [--threads K]
//
// On failure the error document is printed to stdout and the exit code is 1.

#include <iostream>
#include <optional>

#include <CLI11.hpp>

#include "foldtn/blas_runtime.hpp"
#include "foldtn/cli.hpp"
#include "foldtn/errors.hpp"

using namespace foldtn::cli;

namespace {

struct Overrides {
  std::string config, out, engine, init;
  std::optional<long long> chi;
  std::optional<double> t;
};

json with_overrides(json j, const Overrides& o) {
  if (!o.out.empty()) j["out"] = o.out;
  if (!o.engine.empty()) j["engine"] = o.engine;
  if (!o.init.empty()) j["init"] = o.init;
  if (o.chi) j["chi"] = *o.chi;
  if (o.t) j["t"] = *o.t;
  return j;
}

void add_overrides(CLI::App* cmd, Overrides& o) {
  cmd->add_option("--config", o.config, "JSON run configuration");
  cmd->add_option("--out", o.out, "Output directory");
  cmd->add_option("--chi", o.chi, "Bond dimension");
  cmd->add_option("--t", o.t, "Total time");
  cmd->add_option("--engine", o.engine, "itebd | fold | hybrid | oracle-real | oracle-imag | fermion");
  cmd->add_option("--init", o.init, "x_plus | x_minus");
}

}  // namespace

int main(int argc, char** argv) {
  foldtn::select_safe_blas_kernel(argv);
  CLI::App app{"Transverse-folding and iTEBD quench dynamics for the Ising chain"};
  app.set_version_flag("--version", FOLDTN_VERSION);
  app.require_subcommand(1);

  Overrides run_o;
  auto* run_cmd = app.add_subcommand("run", "Run one configuration");
  add_overrides(run_cmd, run_o);

  std::vector<std::string> manifests;
  std::string series, diff_out;
  auto* cmp_cmd = app.add_subcommand("compare", "Compare two manifests, or one against a reference series");
  cmp_cmd->add_option("manifests", manifests, "manifest.json paths")->required()->expected(1, 2);
  cmp_cmd->add_option("--series", series, "Reference CSV with t, x_expect, z_expect");
  cmp_cmd->add_option("--out", diff_out, "Write the difference table as CSV");

  Overrides sweep_o;
  int threads = 1;
  auto* sweep_cmd = app.add_subcommand("sweep", "Expand list-valued \"sweep\" entries and run them all");
  add_overrides(sweep_cmd, sweep_o);
  sweep_cmd->add_option("--threads", threads, "Worker threads")->check(CLI::PositiveNumber);

  std::string figure, scale = "desk", repro_out = "reproduce";
  auto* repro_cmd = app.add_subcommand("reproduce", "Regenerate the data behind a figure");
  repro_cmd->add_option("figure-id", figure, "Figure id")->required();
  repro_cmd->add_option("--scale", scale, "desk (minutes) or full (reference parameters)")
      ->check(CLI::IsMember({"desk", "full"}));
  repro_cmd->add_option("--out", repro_out, "Output directory");
  repro_cmd->add_option("--threads", threads, "Worker threads")->check(CLI::PositiveNumber);
  repro_cmd->footer([] {
    std::string s = "Figure ids:";
    for (const auto& f : figure_ids()) s += " " + f;
    return s;
  }());

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    json result;
    if (*run_cmd) {
      json j = run_o.config.empty() ? json::object() : load_json(run_o.config);
      result = run(parse_config(with_overrides(j, run_o)));
    } else if (*cmp_cmd) {
      const json a = load_json(manifests[0]);
      if (!series.empty()) {
        result = compare_to_series(a, series);
      } else {
        if (manifests.size() != 2) throw foldtn::ConfigError("manifests", "compare needs two manifests or --series");
        std::optional<fs::path> out;
        if (!diff_out.empty()) out = diff_out;
        result = compare(a, load_json(manifests[1]), out);
      }
    } else if (*sweep_cmd) {
      if (sweep_o.config.empty()) throw foldtn::ConfigError("config", "sweep needs --config");
      json j = with_overrides(load_json(sweep_o.config), sweep_o);
      const fs::path out = j.value("out", std::string("sweep"));
      result = sweep(expand_sweep(j, out), threads, out);
      if (result["failed"].get<std::size_t>() > 0) {
        std::cout << result.dump(2) << '\n';
        return 1;
      }
    } else if (*repro_cmd) {
      result = reproduce(figure, scale, threads, repro_out);
    }
    std::cout << result.dump(2) << '\n';
    return 0;
  } catch (const std::exception& e) {
    std::cout << error_json(e).dump(2) << '\n';
    return 1;
  }
}
