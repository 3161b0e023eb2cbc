#include <chrono>
#include <cmath>
#include <ctime>
#include <fstream>
#include <sstream>

#include "foldtn/cli.hpp"
#include "foldtn/errors.hpp"

namespace foldtn::cli {

namespace {

template <class T>
T field(const json& j, const char* key, const std::string& path, T fallback) {
  if (!j.contains(key)) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const json::exception&) {
    throw ConfigError(path + key, "has the wrong type");
  }
}

cplx parse_complex(const json& j, const std::string& path) {
  if (j.is_number()) return {j.get<double>(), 0.0};
  if (j.is_array() && j.size() == 2 && j[0].is_number() && j[1].is_number())
    return {j[0].get<double>(), j[1].get<double>()};
  throw ConfigError(path, "expected a number or [re, im]");
}

}  // namespace

const char* to_string(Engine e) {
  switch (e) {
    case Engine::itebd: return "itebd";
    case Engine::fold: return "fold";
    case Engine::hybrid: return "hybrid";
    case Engine::oracle_real: return "oracle-real";
    case Engine::oracle_imag: return "oracle-imag";
    case Engine::fermion: return "fermion";
  }
  return "?";
}

Engine parse_engine(const std::string& s) {
  for (Engine e : {Engine::itebd, Engine::fold, Engine::hybrid, Engine::oracle_real, Engine::oracle_imag,
                   Engine::fermion})
    if (s == to_string(e)) return e;
  throw ConfigError("engine", "unknown engine '" + s + "'");
}

InitSpec parse_init(const json& j) {
  InitSpec out;
  if (j.is_string()) {
    const auto s = j.get<std::string>();
    if (s == "x_plus") return out;
    if (s == "x_minus") return {"x_minus", LocalState::x_minus()};
    throw ConfigError("init", "expected x_plus, x_minus or {\"up\": .., \"down\": ..}");
  }
  if (j.is_object() && j.contains("up") && j.contains("down")) {
    out.name = "custom";
    out.state = LocalState::from_amplitudes(parse_complex(j["up"], "init.up"), parse_complex(j["down"], "init.down"));
    return out;
  }
  throw ConfigError("init", "expected x_plus, x_minus or {\"up\": .., \"down\": ..}");
}

json to_json(const InitSpec& i) {
  if (i.name != "custom") return i.name;
  const auto& a = i.state.amplitudes;
  return {{"up", {a(0).real(), a(0).imag()}}, {"down", {a(1).real(), a(1).imag()}}};
}

void RunConfig::validate() const {
  model.validate();
  switch (engine) {
    case Engine::itebd:
    case Engine::fold:
    case Engine::hybrid:
      if (chi < 1) throw ConfigError("chi", "must be >= 1");
      trotter_steps(t_total, model.dt);
      policy.validate();
      break;
    case Engine::oracle_real:
    case Engine::oracle_imag:
      if (oracle.n_spins < 1 || oracle.n_spins > 6) throw ConfigError("oracle.n_spins", "must be in [1, 6]");
      if (!(oracle.t_max > 0.0)) throw ConfigError("oracle.t_max", "must be positive");
      if (oracle.samples < 1) throw ConfigError("oracle.samples", "must be >= 1");
      break;
    case Engine::fermion:
      if (fermion.n_half < 2) throw ConfigError("fermion.n_half", "must be >= 2");
      if (!(fermion.dt > 0.0)) throw ConfigError("fermion.dt", "must be positive");
      if (!(fermion.t_max >= 0.0)) throw ConfigError("fermion.t_max", "must be >= 0");
      if (fermion.sample_every < 1) throw ConfigError("fermion.sample_every", "must be >= 1");
      if (fermion.variants.empty()) throw ConfigError("fermion.variants", "must not be empty");
      break;
  }
}

RunConfig parse_config(const json& j) {
  if (!j.is_object()) throw ConfigError("config", "must be a JSON object");
  RunConfig c;
  if (j.contains("engine")) c.engine = parse_engine(field<std::string>(j, "engine", "", ""));
  if (j.contains("model")) {
    const json& m = j["model"];
    c.model.j_coupling = field(m, "j", "model.", c.model.j_coupling);
    c.model.h_transverse = field(m, "h", "model.", c.model.h_transverse);
    c.model.g_parallel = field(m, "g", "model.", c.model.g_parallel);
    c.model.dt = field(m, "dt", "model.", c.model.dt);
  }
  if (j.contains("init")) c.init = parse_init(j["init"]);
  c.chi = field<Index>(j, "chi", "", c.chi);
  c.t_total = field(j, "t", "", c.t_total);
  if (j.contains("policy")) {
    const json& p = j["policy"];
    c.policy.observable_tol = field(p, "observable_tol", "policy.", c.policy.observable_tol);
    c.policy.overlap_tol = field(p, "overlap_tol", "policy.", c.policy.overlap_tol);
    c.policy.max_columns = field(p, "max_columns", "policy.", c.policy.max_columns);
    c.policy.min_columns = field(p, "min_columns", "policy.", c.policy.min_columns);
    c.policy.stable_streak = field(p, "stable_streak", "policy.", c.policy.stable_streak);
    c.policy.warm_start_chi = field<Index>(p, "warm_start_chi", "policy.", c.policy.warm_start_chi);
  }
  if (j.contains("fermion")) {
    const json& f = j["fermion"];
    c.fermion.n_half = field(f, "n_half", "fermion.", c.fermion.n_half);
    c.fermion.t_max = field(f, "t_max", "fermion.", c.fermion.t_max);
    c.fermion.dt = field(f, "dt", "fermion.", c.fermion.dt);
    c.fermion.sample_every = field(f, "sample_every", "fermion.", c.fermion.sample_every);
    if (f.contains("variants")) {
      c.fermion.variants.clear();
      for (const auto& v : f["variants"]) {
        if (!v.is_string()) throw ConfigError("fermion.variants", "entries must be strings");
        c.fermion.variants.push_back(fermion::parse_variant(v.get<std::string>()));
      }
    }
    if (f.contains("coupling_form"))
      c.fermion.coupling_form = fermion::parse_coupling_form(field<std::string>(f, "coupling_form", "fermion.", ""));
  }
  if (j.contains("oracle")) {
    const json& o = j["oracle"];
    c.oracle.n_spins = field(o, "n_spins", "oracle.", c.oracle.n_spins);
    c.oracle.t_max = field(o, "t_max", "oracle.", c.oracle.t_max);
    c.oracle.samples = field(o, "samples", "oracle.", c.oracle.samples);
  }
  c.out = field<std::string>(j, "out", "", c.out.string());
  c.seed = field<std::uint64_t>(j, "seed", "", c.seed);
  return c;
}

json to_json(const RunConfig& c) {
  json variants = json::array();
  for (auto v : c.fermion.variants) variants.push_back(fermion::to_string(v));
  return {
      {"engine", to_string(c.engine)},
      {"model", {{"j", c.model.j_coupling}, {"h", c.model.h_transverse}, {"g", c.model.g_parallel}, {"dt", c.model.dt}}},
      {"init", to_json(c.init)},
      {"chi", c.chi},
      {"t", c.t_total},
      {"policy",
       {{"observable_tol", c.policy.observable_tol},
        {"overlap_tol", c.policy.overlap_tol},
        {"max_columns", c.policy.max_columns},
        {"min_columns", c.policy.min_columns},
        {"stable_streak", c.policy.stable_streak},
        {"warm_start_chi", c.policy.warm_start_chi}}},
      {"fermion",
       {{"n_half", c.fermion.n_half},
        {"t_max", c.fermion.t_max},
        {"dt", c.fermion.dt},
        {"sample_every", c.fermion.sample_every},
        {"variants", variants},
        {"coupling_form", fermion::to_string(c.fermion.coupling_form)}}},
      {"oracle", {{"n_spins", c.oracle.n_spins}, {"t_max", c.oracle.t_max}, {"samples", c.oracle.samples}}},
      {"out", c.out.string()},
      {"seed", c.seed},
  };
}

json load_json(const fs::path& p) {
  std::ifstream in(p);
  if (!in) throw ConfigError(p.string(), "cannot open file");
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError(p.string(), std::string("invalid JSON: ") + e.what());
  }
}

void write_atomic(const fs::path& p, const std::string& contents) {
  if (p.has_parent_path()) fs::create_directories(p.parent_path());
  fs::path tmp = p;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw ConfigError(p.string(), "cannot open for writing");
    out << contents;
    out.flush();
    if (!out) throw ConfigError(p.string(), "write failed");
  }
  fs::rename(tmp, p);
}

std::string utc_timestamp() {
  const auto now = std::chrono::system_clock::now();
  const std::time_t tt = std::chrono::system_clock::to_time_t(now);
  std::tm tm{};
  gmtime_r(&tt, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

json error_json(const std::exception& e) {
  json err = {{"message", e.what()}};
  if (const auto* fe = dynamic_cast<const Error*>(&e)) {
    err["kind"] = fe->kind();
    if (const auto* ce = dynamic_cast<const ConfigError*>(&e)) err["field"] = ce->field();
  } else {
    err["kind"] = "internal";
  }
  return {{"error", err}};
}

}  // namespace foldtn::cli
