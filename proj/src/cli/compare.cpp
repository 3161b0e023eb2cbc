#include <cmath>
#include <fstream>
#include <iomanip>
#include <map>
#include <sstream>

#include "foldtn/cli.hpp"
#include "foldtn/errors.hpp"

namespace foldtn::cli {

namespace {

const json& results_of(const json& m, const char* which) {
  if (!m.is_object() || !m.contains("results") || !m["results"].is_object())
    throw ComparisonError(std::string(which) + " manifest has no results (status " +
                          (m.contains("status") ? m["status"].dump() : std::string("missing")) + ")");
  return m["results"];
}

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) out.push_back(cell);
  return out;
}

}  // namespace

json compare(const json& a, const json& b, const std::optional<fs::path>& out) {
  const json& ra = results_of(a, "first");
  const json& rb = results_of(b, "second");
  json rows = json::array();
  double max_diff = 0.0;
  std::ostringstream csv;
  csv << std::setprecision(17) << "key,a,b,abs_diff\n";
  for (auto it = ra.begin(); it != ra.end(); ++it) {
    if (!it.value().is_number() || !rb.contains(it.key()) || !rb[it.key()].is_number()) continue;
    const double va = it.value().get<double>();
    const double vb = rb[it.key()].get<double>();
    const double d = std::abs(va - vb);
    max_diff = std::max(max_diff, d);
    rows.push_back({{"key", it.key()}, {"a", va}, {"b", vb}, {"abs_diff", d}});
    csv << it.key() << ',' << va << ',' << vb << ',' << d << '\n';
  }
  if (rows.empty()) throw ComparisonError("manifests share no numeric results");
  if (out) write_atomic(*out, csv.str());
  return {{"engines", {a["config"].value("engine", ""), b["config"].value("engine", "")}},
          {"rows", rows},
          {"max_abs_diff", max_diff}};
}

json compare_to_series(const json& manifest, const fs::path& series_csv) {
  const json& r = results_of(manifest, "transverse");
  if (!r.contains("x_expect") || !r.contains("t")) throw ComparisonError("manifest lacks x_expect or t");
  const double t = r["t"].get<double>();

  std::ifstream in(series_csv);
  if (!in) throw ComparisonError("cannot open " + series_csv.string());
  std::string line;
  if (!std::getline(in, line)) throw ComparisonError(series_csv.string() + " is empty");
  std::map<std::string, std::size_t> col;
  const auto header = split(line);
  for (std::size_t k = 0; k < header.size(); ++k) col[header[k]] = k;
  for (const char* need : {"t", "x_expect", "z_expect"})
    if (!col.count(need)) throw ComparisonError(series_csv.string() + " lacks column " + need);

  double best_gap = 1e300, x = 0.0, z = 0.0, t_ref = 0.0;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto cells = split(line);
    if (cells.size() != header.size()) throw ComparisonError("ragged row in " + series_csv.string());
    const double tr = std::stod(cells[col["t"]]);
    if (std::abs(tr - t) < best_gap) {
      best_gap = std::abs(tr - t);
      t_ref = tr;
      x = std::stod(cells[col["x_expect"]]);
      z = std::stod(cells[col["z_expect"]]);
    }
  }
  if (best_gap > 1e-9) throw ComparisonError("no row of the series at t = " + std::to_string(t));
  const double xm = r["x_expect"].get<double>(), zm = r["z_expect"].get<double>();
  return {{"t", t_ref},
          {"x_manifest", xm},
          {"x_series", x},
          {"x_abs_diff", std::abs(xm - x)},
          {"z_manifest", zm},
          {"z_series", z},
          {"z_abs_diff", std::abs(zm - z)}};
}

}  // namespace foldtn::cli
