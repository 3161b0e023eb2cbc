#include <cstdio>

#include "foldtn/cli.hpp"
#include "foldtn/errors.hpp"

namespace foldtn::cli {

namespace {

struct Recipe {
  std::vector<RunConfig> runs;
  // Index of the reference run per run (-1: none), used for error tables.
  std::vector<int> reference;
};

RunConfig make(Engine e, Index chi, double t, const char* init) {
  RunConfig c;
  c.engine = e;
  c.chi = chi;
  c.t_total = t;
  c.init = parse_init(init);
  return c;
}

Recipe recipe(const std::string& id, bool full) {
  Recipe r;
  auto add = [&](RunConfig c, int ref = -1) {
    r.runs.push_back(std::move(c));
    r.reference.push_back(ref);
    return static_cast<int>(r.runs.size()) - 1;
  };
  if (id == "itebd-xminus" || id == "itebd-xplus") {
    const char* init = id == "itebd-xminus" ? "x_minus" : "x_plus";
    for (Index chi : full ? std::vector<Index>{256, 512} : std::vector<Index>{64, 128})
      add(make(Engine::itebd, chi, full ? 14.0 : 6.0, init));
  } else if (id == "error-xminus" || id == "error-xplus") {
    const char* init = id == "error-xminus" ? "x_minus" : "x_plus";
    const std::vector<double> ts = full ? std::vector<double>{2.0, 4.0} : std::vector<double>{2.0};
    const std::vector<Index> chis = full ? std::vector<Index>{16, 32, 64} : std::vector<Index>{8, 16};
    const int ref = add(make(Engine::itebd, full ? 256 : 128, ts.back(), init));
    for (double t : ts)
      for (Index chi : chis) {
        add(make(Engine::fold, chi, t, init), ref);
        add(make(Engine::hybrid, chi, t, init), ref);
      }
  } else if (id == "long-time") {
    const std::vector<double> ts = full ? std::vector<double>{10.6, 14.0} : std::vector<double>{4.0};
    const int ref = add(make(Engine::itebd, full ? 512 : 128, ts.back(), "x_minus"));
    for (double t : ts)
      for (Index chi : full ? std::vector<Index>{180, 240} : std::vector<Index>{24, 32})
        add(make(Engine::hybrid, chi, t, "x_minus"), ref);
  } else if (id == "temporal-entropy") {
    const std::vector<double> ts = full ? std::vector<double>{2, 3, 4, 5, 6, 7, 8} : std::vector<double>{1, 2, 3};
    for (const char* init : {"x_plus", "x_minus"})
      for (double t : ts) add(make(Engine::hybrid, full ? 120 : 24, t, init));
  } else if (id == "fermion-growth") {
    RunConfig c = make(Engine::fermion, 1, 1.0, "x_plus");
    c.fermion.n_half = full ? 100 : 40;
    c.fermion.t_max = full ? 50.0 : 20.0;
    add(c);
    c.fermion.coupling_form = fermion::CouplingForm::imag_potential;
    c.fermion.variants = {fermion::Variant::nonhermitian_tilde};
    add(c);
  } else {
    std::string known;
    for (const auto& f : figure_ids()) known += (known.empty() ? "" : ", ") + f;
    throw ConfigError("figure_id", "unknown figure '" + id + "' (known: " + known + ")");
  }
  return r;
}

}  // namespace

std::vector<std::string> figure_ids() {
  return {"itebd-xminus", "itebd-xplus", "error-xminus", "error-xplus", "long-time", "temporal-entropy",
          "fermion-growth"};
}

json reproduce(const std::string& id, const std::string& scale, int threads, const fs::path& out) {
  if (scale != "desk" && scale != "full") throw ConfigError("scale", "must be desk or full");
  Recipe r = recipe(id, scale == "full");
  for (std::size_t k = 0; k < r.runs.size(); ++k) {
    char name[32];
    std::snprintf(name, sizeof name, "run_%03zu", k);
    r.runs[k].out = out / name;
  }
  const json s = sweep(r.runs, threads, out);

  // Error table from the written manifests and reference CSVs only.
  json table = json::array();
  for (std::size_t k = 0; k < r.runs.size(); ++k) {
    json row = {{"run", r.runs[k].out.filename().string()},
                {"engine", to_string(r.runs[k].engine)},
                {"chi", r.runs[k].chi},
                {"t", r.runs[k].t_total},
                {"init", r.runs[k].init.name},
                {"status", s["runs"][k]["status"]}};
    if (s["runs"][k].contains("results")) row["results"] = s["runs"][k]["results"];
    const int ref = r.reference[k];
    if (ref >= 0 && row["status"] == "complete" && s["runs"][ref]["status"] == "complete") {
      try {
        const json m = load_json(r.runs[k].out / "manifest.json");
        row["vs_reference"] = compare_to_series(m, r.runs[ref].out / "itebd.csv");
      } catch (const Error& e) {
        row["vs_reference"] = error_json(e)["error"];
      }
    }
    table.push_back(row);
  }
  json doc = {{"schema_version", kManifestSchema},
              {"figure", id},
              {"scale", scale},
              {"code_version", FOLDTN_VERSION},
              {"rows", table}};
  write_atomic(out / "figure.json", doc.dump(2));
  return doc;
}

}  // namespace foldtn::cli
