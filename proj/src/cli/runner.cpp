#include <cmath>
#include <iomanip>
#include <sstream>

#include "foldtn/cli.hpp"
#include "foldtn/continuum_oracle.hpp"
#include "foldtn/errors.hpp"
#include "foldtn/itebd.hpp"
#include "foldtn/mps_io.hpp"

namespace foldtn::cli {

namespace {

class Csv {
 public:
  explicit Csv(const std::vector<std::string>& header) {
    out_ << std::setprecision(17);
    row_strings(header);
  }
  template <class... T>
  void row(const T&... values) {
    std::size_t k = 0;
    ((out_ << (k++ ? "," : "") << values), ...);
    out_ << '\n';
  }
  std::string str() const { return out_.str(); }

 private:
  void row_strings(const std::vector<std::string>& v) {
    for (std::size_t k = 0; k < v.size(); ++k) out_ << (k ? "," : "") << v[k];
    out_ << '\n';
  }
  std::ostringstream out_;
};

json run_itebd_engine(const RunConfig& c, json& outputs) {
  const auto series = run_itebd(c.model, c.t_total, c.chi, c.init.state);
  Csv csv({"t", "x_expect", "z_expect", "max_entropy", "discarded_weight_cum"});
  for (const auto& s : series) csv.row(s.t, s.x_expect, s.z_expect, s.max_entropy, s.discarded_weight_cum);
  write_atomic(c.out / "itebd.csv", csv.str());
  outputs.push_back("itebd.csv");
  const auto& last = series.back();
  return {{"rows", series.size()},
          {"t", last.t},
          {"x_expect", last.x_expect},
          {"z_expect", last.z_expect},
          {"max_entropy", last.max_entropy},
          {"discarded_weight_cum", last.discarded_weight_cum}};
}

json run_transverse_engine(const RunConfig& c, json& outputs) {
  const TruncationMethod method = c.engine == Engine::hybrid ? TruncationMethod::hybrid : TruncationMethod::normal;
  const FixedPointResult r = run_to_fixed_point(c.model, c.t_total, c.chi, method, c.init.state, c.policy);

  Csv csv({"column", "identity_re", "identity_im", "identity_ratio_re", "identity_ratio_im", "x_expect", "z_expect",
           "max_entropy", "bond_dim", "discarded_weight"});
  for (const auto& d : r.diagnostics)
    csv.row(d.column, d.identity_value.real(), d.identity_value.imag(), d.identity_ratio.real(),
            d.identity_ratio.imag(), d.x_expect, d.z_expect, d.max_entropy, d.bond_dim, d.discarded_weight);
  write_atomic(c.out / "columns.csv", csv.str());
  outputs.push_back("columns.csv");
  mps_io::save(c.out / "transverse_state.mps", r.state.mps);
  outputs.push_back("transverse_state.mps");

  const auto& last = r.diagnostics.back();
  const auto ie = identity_error_per_column(r);
  return {{"method", to_string(method)},
          {"t", c.t_total},
          {"x_expect", r.x_expect},
          {"z_expect", r.z_expect},
          {"converged", r.converged},
          {"fixed_point_column", r.fixed_point_column},
          {"columns", r.diagnostics.size()},
          {"identity_error", ie ? json(*ie) : json(nullptr)},
          {"identity_error_last", std::abs(last.identity_ratio - 1.0)},
          {"fluctuation_band", r.fluctuation_band},
          {"temporal_entropy", last.max_entropy},
          {"log_scale", r.state.log_scale}};
}

json run_oracle_engine(const RunConfig& c, json& outputs) {
  using namespace continuum;
  const int n = c.oracle.n_spins;
  const DenseOperator h = build_HL(c.model, n);
  const double j = c.model.j_coupling;
  const double step = c.oracle.t_max / c.oracle.samples;
  DenseOperator lam = product_projector(c.init.state, n);
  const Index d = lam.matrix.rows();
  const bool real_time = c.engine == Engine::oracle_real;

  Csv csv({real_time ? "t" : "tau", "temporal_entropy", "trace_distance_to_mixed"});
  double entropy = 0.0, distance = 0.0;
  for (int k = 0; k <= c.oracle.samples; ++k) {
    if (k > 0) {
      lam = real_time ? evolve_lambda_real(lam, h, j, step, Contour::forward).lambda
                      : evolve_lambda_imag(lam, h, j, step).lambda;
    }
    const DenseOperator lam_t{lam.matrix.adjoint(), n};
    entropy = temporal_entropy_dense(lam, lam_t);
    const ComplexMatrix diff = linalg::hermitian_part(lam.matrix / lam.matrix.trace()) -
                               ComplexMatrix::Identity(d, d) / static_cast<double>(d);
    distance = 0.5 * linalg::eigh(diff).values.cwiseAbs().sum();
    csv.row(k * step, entropy, distance);
  }
  const std::string file = real_time ? "oracle_real.csv" : "oracle_imag.csv";
  write_atomic(c.out / file, csv.str());
  outputs.push_back(file);

  json res = {{"n_spins", n}, {"t_max", c.oracle.t_max}, {"temporal_entropy", entropy},
              {"trace_distance_to_mixed", distance}};
  if (!real_time) {
    const linalg::Spectrum e = linalg::eigh(doubled_imag_hamiltonian(h, j));
    const ComplexVector gs = e.basis->col(e.values.size() - 1);
    res["ground_state_half_chain_entropy"] = half_chain_entropy(gs, n, n);
  }
  return res;
}

json run_fermion_engine(const RunConfig& c, json& outputs) {
  const auto& f = c.fermion;
  const auto series = fermion::growth_study(f.n_half, f.t_max, f.dt, f.variants, f.coupling_form, f.sample_every);
  json finals = json::object();
  for (const auto& s : series) {
    Csv csv({"t", "entropy"});
    for (std::size_t k = 0; k < s.t.size(); ++k) csv.row(s.t[k], s.entropy[k]);
    const std::string file = std::string("fermion_") + fermion::to_string(s.variant) + ".csv";
    write_atomic(c.out / file, csv.str());
    outputs.push_back(file);
    finals[fermion::to_string(s.variant)] = s.entropy.back();
  }
  return {{"n_half", f.n_half},
          {"dt", f.dt},
          {"coupling_form", fermion::to_string(f.coupling_form)},
          {"final_entropy", finals},
          {"fermi_level_policy", "lowest eigensolver index among degenerate levels"}};
}

}  // namespace

json run(const RunConfig& c) {
  c.validate();
  fs::create_directories(c.out);
  json manifest = {{"schema_version", kManifestSchema},
                   {"csv_schema_version", kCsvSchema},
                   {"code_version", FOLDTN_VERSION},
                   {"config", to_json(c)},
                   {"started", utc_timestamp()},
                   {"status", "partial"},
                   {"outputs", json::array()}};
  const fs::path path = c.out / "manifest.json";
  write_atomic(path, manifest.dump(2));

  json outputs = json::array();
  try {
    json results;
    switch (c.engine) {
      case Engine::itebd: results = run_itebd_engine(c, outputs); break;
      case Engine::fold:
      case Engine::hybrid: results = run_transverse_engine(c, outputs); break;
      case Engine::oracle_real:
      case Engine::oracle_imag: results = run_oracle_engine(c, outputs); break;
      case Engine::fermion: results = run_fermion_engine(c, outputs); break;
    }
    manifest["results"] = results;
    manifest["status"] = "complete";
  } catch (const std::exception& e) {
    manifest["status"] = "failed";
    manifest["error"] = error_json(e)["error"];
    manifest["outputs"] = outputs;
    manifest["finished"] = utc_timestamp();
    write_atomic(path, manifest.dump(2));
    throw;
  }
  manifest["outputs"] = outputs;
  manifest["finished"] = utc_timestamp();
  write_atomic(path, manifest.dump(2));
  return manifest;
}

}  // namespace foldtn::cli
