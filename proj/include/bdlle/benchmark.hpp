#pragma once

#include <chrono>
#include <exception>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "bdlle/config.hpp"
#include "bdlle/datasets.hpp"
#include "bdlle/detectors.hpp"
#include "bdlle/report_io.hpp"

namespace bdlle {

/// A pipeline stage failed. `stage()` names it, e.g. "detect:vcut/brim".
class StageError : public Error {
 public:
  StageError(std::string stage, const std::string& cause)
      : Error("stage " + stage + " failed: " + cause), stage_(std::move(stage)) {}
  const std::string& stage() const noexcept { return stage_; }

 private:
  std::string stage_;
};

/// F1_max per (detector, dataset), laid out detectors x datasets.
struct ResultTable {
  std::vector<std::string> datasets;
  std::vector<std::string> detectors;
  std::map<std::pair<std::string, std::string>, double> f1;  ///< key (detector, dataset)

  std::optional<double> at(const std::string& detector, const std::string& dataset) const {
    const auto it = f1.find({detector, dataset});
    if (it == f1.end()) return std::nullopt;
    return it->second;
  }
};

namespace bench_detail {

inline std::string cell(const std::optional<double>& v) {
  if (!v) return "NA";
  std::ostringstream s;
  s << std::fixed << std::setprecision(4) << *v;
  return s.str();
}

}  // namespace bench_detail

inline void write_table_csv(std::ostream& out, const ResultTable& t) {
  out << "algorithm";
  for (const auto& d : t.datasets) out << ',' << d;
  out << '\n';
  for (const auto& a : t.detectors) {
    out << a;
    for (const auto& d : t.datasets) out << ',' << bench_detail::cell(t.at(a, d));
    out << '\n';
  }
}

/// Aligned text version of the table; the best entry per dataset is starred.
inline void write_table_text(std::ostream& out, const ResultTable& t) {
  std::size_t w0 = std::string("algorithm").size();
  for (const auto& a : t.detectors) w0 = std::max(w0, a.size());
  std::vector<std::size_t> w;
  for (const auto& d : t.datasets) w.push_back(std::max<std::size_t>(d.size(), 7));
  out << std::left << std::setw(static_cast<int>(w0)) << "algorithm";
  for (std::size_t j = 0; j < t.datasets.size(); ++j) out << "  " << std::right << std::setw(static_cast<int>(w[j])) << t.datasets[j];
  out << '\n';
  for (const auto& a : t.detectors) {
    out << std::left << std::setw(static_cast<int>(w0)) << a;
    for (std::size_t j = 0; j < t.datasets.size(); ++j) {
      const auto v = t.at(a, t.datasets[j]);
      bool best = v.has_value();
      for (const auto& b : t.detectors) {
        const auto o = t.at(b, t.datasets[j]);
        if (v && o && *o > *v) best = false;
      }
      out << "  " << std::right << std::setw(static_cast<int>(w[j])) << (bench_detail::cell(v) + (best ? "*" : " "));
    }
    out << '\n';
  }
}

struct BenchmarkResult {
  ResultTable table;
  std::map<std::pair<std::string, std::string>, F1Report> reports;  ///< key (detector, dataset)
};

/// The detector configuration a dataset entry implies for one algorithm.
inline DetectorSpec detector_spec(const RunConfig& c, const DatasetEntry& e, Algorithm a, int d) {
  DetectorSpec s;
  s.algorithm = a;
  s.d = d;
  s.regularizer = c.regularizer;
  s.threshold_frac = c.threshold_frac;
  if (a == Algorithm::kBdlle) {
    s.epsilon = e.epsilon;
    if (!e.epsilon) s.k = e.k;
  } else if (uses_epsilon(a)) {
    s.epsilon = e.epsilon;
  } else {
    s.k = e.k;
  }
  return s;
}

/// Runs every dataset through sample, optional diffusion-map embedding,
/// every detector and F1 evaluation. Writes under `c.output`:
///   config.ini                   canonical copy of the configuration
///   <id>/<detector>.json         detection and F1 report
///   <id>/<detector>.plot.csv     per-point plot data
///   <id>/embedding.json          eigenvalues, when diffusion maps ran
///   table.csv, table.txt         F1_max, detectors x datasets
///   status.json                  "complete", or the failed stage and cause
///   timings.json                 wall-clock seconds per stage
/// Everything except timings.json is a function of the configuration alone.
/// A failing stage leaves the outputs written so far, marks status.json
/// failed and rethrows as StageError.
inline BenchmarkResult run_benchmark(const RunConfig& config) {
  validate(config);
  namespace fs = std::filesystem;
  using clock = std::chrono::steady_clock;
  const fs::path root(config.output);
  fs::create_directories(root);
  {
    std::ofstream(root / "config.ini") << serialize(config);
  }

  BenchmarkResult res;
  for (const auto& e : config.datasets) res.table.datasets.push_back(e.id);
  for (Algorithm a : config.detectors) res.table.detectors.push_back(to_string(a));
  const auto grid = radius_grid(config.grid_k, config.grid_step);
  io::json timings = io::json::object();
  std::vector<std::string> done;

  const auto flush_table = [&] {
    std::ofstream csv(root / "table.csv");
    write_table_csv(csv, res.table);
    std::ofstream txt(root / "table.txt");
    write_table_text(txt, res.table);
    io::write_json((root / "timings.json").string(), timings);
  };

  std::string stage;
  const auto timed = [&](const std::string& name, auto&& fn) {
    stage = name;
    const auto t0 = clock::now();
    fn();
    timings[name] = std::chrono::duration<double>(clock::now() - t0).count();
    done.push_back(name);
  };

  try {
    for (const auto& entry : config.datasets) {
      const fs::path dir = root / entry.id;
      fs::create_directories(dir);
      DatasetSpec spec = entry.spec;
      spec.seed = config.seed;

      DatasetBundle bundle;
      timed("sample:" + entry.id, [&] { bundle = sample_dataset(spec); });

      PointCloud work = bundle.cloud;
      if (entry.dm) {
        timed("dm:" + entry.id, [&] {
          const DmEmbedding emb = dm_embed(bundle.cloud, *entry.dm);
          if (entry.dm->n_max && entry.dm->n_max < bundle.size()) bundle = bundle.prefix(entry.dm->n_max);
          work = PointCloud(emb.coords);
          io::write_json((dir / "embedding.json").string(), io::to_json(emb));
        });
      }
      std::optional<NeighborIndex> index;
      timed("index:" + entry.id, [&] { index.emplace(work); });

      for (Algorithm a : config.detectors) {
        const std::string name = to_string(a);
        Detection det;
        timed("detect:" + entry.id + "/" + name, [&] { det = run_detector(*index, detector_spec(config, entry, a, bundle.d)); });
        F1Report rep;
        timed("eval:" + entry.id + "/" + name, [&] {
          rep = score(det, bundle.dist_to_boundary, grid);
          io::json j;
          j["dataset"] = entry.id;
          j["detection"] = io::to_json(det, bundle.size());
          j["f1"] = io::to_json(rep);
          io::write_json((dir / (name + ".json")).string(), j);
          std::ofstream plot(dir / (name + ".plot.csv"));
          io::write_plot_data(plot, bundle, det);
        });
        res.table.f1[{name, entry.id}] = rep.f1_max;
        res.reports[{name, entry.id}] = std::move(rep);
      }
    }
  } catch (const std::exception& err) {
    flush_table();
    io::write_json((root / "status.json").string(),
                   {{"status", "failed"}, {"stage", stage}, {"cause", err.what()}, {"completed", done}});
    throw StageError(stage, err.what());
  }

  flush_table();
  io::write_json((root / "status.json").string(), {{"status", "complete"}, {"completed", done}});
  return res;
}

/// Rebuilds the table of a finished (or partial) benchmark directory.
inline ResultTable load_results(const std::string& dir) {
  namespace fs = std::filesystem;
  const RunConfig c = load_config((fs::path(dir) / "config.ini").string());
  ResultTable t;
  for (const auto& e : c.datasets) t.datasets.push_back(e.id);
  for (Algorithm a : c.detectors) t.detectors.push_back(to_string(a));
  for (const auto& e : c.datasets) {
    for (const auto& a : t.detectors) {
      const fs::path p = fs::path(dir) / e.id / (a + ".json");
      if (!fs::exists(p)) continue;
      t.f1[{a, e.id}] = io::read_json(p.string()).at("f1").at("f1_max").get<double>();
    }
  }
  return t;
}

}  // namespace bdlle
