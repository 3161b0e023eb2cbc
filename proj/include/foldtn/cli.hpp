#pragma once

// Experiment driver: JSON run configurations, engine dispatch, CSV series and
// atomically written JSON manifests.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "foldtn/free_fermion.hpp"
#include "foldtn/spin_models.hpp"
#include "foldtn/transverse.hpp"

namespace foldtn::cli {

using json = nlohmann::json;
namespace fs = std::filesystem;

inline constexpr int kManifestSchema = 1;
inline constexpr int kCsvSchema = 1;

enum class Engine { itebd, fold, hybrid, oracle_real, oracle_imag, fermion };

const char* to_string(Engine e);
Engine parse_engine(const std::string& s);

struct InitSpec {
  std::string name = "x_plus";  // x_plus, x_minus or custom
  LocalState state = LocalState::x_plus();
};
InitSpec parse_init(const json& j);
json to_json(const InitSpec& i);

struct FermionSpec {
  int n_half = 100;
  double t_max = 50.0;
  double dt = 0.05;
  int sample_every = 10;
  std::vector<fermion::Variant> variants = {fermion::Variant::nonhermitian_tilde, fermion::Variant::uniform,
                                            fermion::Variant::sign_flipped};
  fermion::CouplingForm coupling_form = fermion::CouplingForm::imag_hopping;
};

struct OracleSpec {
  int n_spins = 3;
  double t_max = 5.0;
  int samples = 50;
};

struct RunConfig {
  Engine engine = Engine::itebd;
  IsingParams model;
  InitSpec init;
  Index chi = 64;
  double t_total = 2.0;
  FixedPointPolicy policy;
  FermionSpec fermion;
  OracleSpec oracle;
  fs::path out = "run";
  std::uint64_t seed = 0;

  /// Throws ConfigError naming the offending field.
  void validate() const;
};

RunConfig parse_config(const json& j);
json to_json(const RunConfig& c);
json load_json(const fs::path& p);

/// Writes to a sibling temporary file and renames it into place.
void write_atomic(const fs::path& p, const std::string& contents);

std::string utc_timestamp();

/// Runs one configuration, writing CSV series and manifest.json into c.out.
/// Engine failures are recorded in the manifest (status "failed") and rethrown.
json run(const RunConfig& c);

/// Difference report between two manifests. Writes `out` (CSV) when given.
json compare(const json& manifest_a, const json& manifest_b, const std::optional<fs::path>& out = std::nullopt);

/// Report of a transverse manifest against a reference time series CSV with
/// columns t, x_expect, z_expect (e.g. an iTEBD run).
json compare_to_series(const json& manifest, const fs::path& series_csv);

/// Expands list-valued "sweep" entries (chi, t, engine, init) into run
/// configurations, one output directory each.
std::vector<RunConfig> expand_sweep(const json& j, const fs::path& out);

/// Runs the configurations on `threads` workers; writes sweep.json into out.
json sweep(const std::vector<RunConfig>& runs, int threads, const fs::path& out);

/// Known figure ids and the runs behind them at the given scale ("desk" or
/// "full").
std::vector<std::string> figure_ids();
json reproduce(const std::string& figure_id, const std::string& scale, int threads, const fs::path& out);

/// Machine-readable error document.
json error_json(const std::exception& e);

}  // namespace foldtn::cli
