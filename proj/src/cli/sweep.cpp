#include <algorithm>
#include <atomic>
#include <cstdio>
#include <thread>

#include "foldtn/cli.hpp"
#include "foldtn/errors.hpp"

namespace foldtn::cli {

namespace {

json list_or_single(const json& sweep, const char* key, const json& fallback) {
  if (!sweep.contains(key)) return json::array({fallback});
  const json& v = sweep[key];
  if (!v.is_array() || v.empty()) throw ConfigError(std::string("sweep.") + key, "must be a non-empty list");
  return v;
}

std::string run_name(std::size_t k, const RunConfig& c) {
  char buf[160];
  std::snprintf(buf, sizeof buf, "%03zu_%s_chi%lld_t%g_%s", k, to_string(c.engine), static_cast<long long>(c.chi),
                c.t_total, c.init.name.c_str());
  return buf;
}

}  // namespace

std::vector<RunConfig> expand_sweep(const json& j, const fs::path& out) {
  if (!j.is_object()) throw ConfigError("config", "must be a JSON object");
  json base = j;
  const json grid = base.value("sweep", json::object());
  base.erase("sweep");
  const RunConfig proto = parse_config(base);
  const json base_full = to_json(proto);

  std::vector<RunConfig> runs;
  for (const auto& engine : list_or_single(grid, "engine", base_full["engine"]))
    for (const auto& chi : list_or_single(grid, "chi", base_full["chi"]))
      for (const auto& t : list_or_single(grid, "t", base_full["t"]))
        for (const auto& init : list_or_single(grid, "init", base_full["init"])) {
          json cj = base_full;
          cj["engine"] = engine;
          cj["chi"] = chi;
          cj["t"] = t;
          cj["init"] = init;
          RunConfig c = parse_config(cj);
          c.out = out / run_name(runs.size(), c);
          c.validate();
          runs.push_back(std::move(c));
        }
  return runs;
}

json sweep(const std::vector<RunConfig>& runs, int threads, const fs::path& out) {
  if (threads < 1) throw ConfigError("threads", "must be >= 1");
  fs::create_directories(out);
  std::vector<json> entries(runs.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t k; (k = next++) < runs.size();) {
      json e = {{"out", runs[k].out.string()}, {"config", to_json(runs[k])}};
      try {
        const json m = run(runs[k]);
        e["status"] = m["status"];
        e["results"] = m["results"];
      } catch (const std::exception& ex) {
        e["status"] = "failed";
        e["error"] = error_json(ex)["error"];
      }
      entries[k] = std::move(e);
    }
  };
  const int n = std::min<int>(threads, std::max<std::size_t>(runs.size(), 1));
  std::vector<std::thread> pool;
  for (int i = 0; i + 1 < n; ++i) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();

  std::size_t failed = 0;
  for (const auto& e : entries) failed += e["status"] != "complete";
  json doc = {{"schema_version", kManifestSchema},
              {"code_version", FOLDTN_VERSION},
              {"finished", utc_timestamp()},
              {"runs", entries},
              {"failed", failed}};
  write_atomic(out / "sweep.json", doc.dump(2));
  return doc;
}

}  // namespace foldtn::cli
