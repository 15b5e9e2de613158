// bdlle: sample benchmark datasets, detect boundary points, embed by diffusion
// maps, score detections and tabulate benchmark runs.
//
// Exit status: 0 on success, 2 for invalid arguments or configuration, 3 when
// a processing stage fails.

#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "bdlle/bdlle.hpp"

namespace {

using namespace bdlle;

constexpr int kExitConfig = 2;
constexpr int kExitRuntime = 3;

struct SampleArgs {
  std::string name;
  Index n = 0;
  std::uint64_t seed = 0;
  double sigma = 0.05;
  bool nonuniform = false;
  Index gt_helpers = 0;
  std::string out;
};

struct DetectArgs {
  std::string scheme;
  std::optional<double> epsilon;
  std::optional<Index> k;
  int dim = 2;
  std::string reg = "auto";
  double threshold_frac = 0.5;
  std::string in, out;
};

struct BaselineArgs {
  std::string algo;
  std::optional<double> epsilon;
  std::optional<Index> k;
  int dim = 2;
  std::optional<double> radius;
  bool radius_grid = false;
  std::string in, out;
};

struct DmArgs {
  double epsilon_dm = 0.2;
  Index ell = 3;
  Index n_max = 0;
  bool self_affinity = false;
  std::string in, out;
};

struct PipelineArgs {
  std::string config;
  std::string name = "noisy-disk";
  std::optional<Index> n;
  std::uint64_t seed = 1;
  double sigma = 0.05;
  Index gt_helpers = 0;
  double dm_epsilon = 0.2;
  Index ell = 3;
  Index n_max = 0;
  bool no_dm = false;
  std::string detectors = "bdlle";
  std::optional<double> epsilon;
  std::optional<Index> k;
  Index grid_k = 40;
  std::string out = "pipeline-out";
};

struct EvalArgs {
  std::string detected, gt, out;
  Index grid_k = 40;
  double grid_step = 0.05;
};

struct ReportArgs {
  std::string in, out;
};

RegularizerSpec parse_regularizer(const std::string& s) {
  RegularizerSpec r;
  if (s == "auto") return r;
  if (s == "theoretical") {
    r.mode = RegularizerSpec::Mode::kTheoretical;
    return r;
  }
  r.mode = RegularizerSpec::Mode::kExplicit;
  try {
    std::size_t used = 0;
    r.value = std::stod(s, &used);
    if (used != s.size() || !(r.value > 0.0)) throw std::invalid_argument(s);
  } catch (const std::exception&) {
    throw ConfigError("--reg must be auto, theoretical or a positive number, got '" + s + "'");
  }
  return r;
}

void print_f1(const F1Report& r) {
  std::cout << r.detector << ": F1_max = " << r.f1_max << " at r = " << r.best_r;
  if (!r.skipped_r.empty()) std::cout << " (" << r.skipped_r.size() << " radii skipped: collar covers every point)";
  std::cout << '\n';
}

int run_sample(const SampleArgs& a) {
  DatasetSpec spec;
  spec.name = a.name;
  spec.n = a.n;
  spec.seed = a.seed;
  spec.sigma = a.sigma;
  spec.nonuniform = a.nonuniform;
  spec.ground_truth.helpers = a.gt_helpers;
  const DatasetBundle b = sample_dataset(spec);
  csv::write_cloud(a.out, b.cloud);
  io::write_ground_truth(io::ground_truth_path(a.out), b);
  if (b.clean) csv::write_cloud(io::clean_path(a.out), *b.clean);
  std::cout << "wrote " << b.size() << " points (" << b.name << ", p=" << b.cloud.dim() << ") to " << a.out << '\n';
  return 0;
}

int run_detect(const DetectArgs& a) {
  DetectorSpec spec;
  spec.algorithm = Algorithm::kBdlle;
  spec.d = a.dim;
  spec.regularizer = parse_regularizer(a.reg);
  spec.threshold_frac = a.threshold_frac;
  if (a.scheme == "knn") {
    if (a.epsilon) throw ConfigError("--epsilon does not apply to --scheme knn");
    spec.k = a.k;
  } else if (a.scheme == "ball") {
    if (a.k) throw ConfigError("--k does not apply to --scheme ball");
    spec.epsilon = a.epsilon;
  } else {
    spec.epsilon = a.epsilon;
    spec.k = a.k;
  }
  const PointCloud cloud = csv::read_cloud(a.in);
  if (a.scheme == "knn" && !a.k) spec.k = select_K(cloud.size(), a.dim);
  const Detection det = run_detector(cloud, spec);
  io::write_json(a.out, io::to_json(det, cloud.size()));
  std::cout << det.boundary_indices.size() << " of " << cloud.size() << " points flagged (c = " << det.bdlle->regularizer.c
            << ", " << to_string(det.bdlle->regularizer.kind) << ")\n";
  return 0;
}

int run_baseline(const BaselineArgs& a) {
  DetectorSpec spec;
  spec.algorithm = parse_algorithm(a.algo);
  if (spec.algorithm == Algorithm::kBdlle) throw ConfigError("use the detect subcommand for BD-LLE");
  spec.d = a.dim;
  if (uses_epsilon(spec.algorithm)) {
    if (a.k) throw ConfigError("--k does not apply to " + a.algo);
    spec.epsilon = a.epsilon;
  } else {
    if (a.epsilon) throw ConfigError("--epsilon does not apply to " + a.algo);
    spec.k = a.k;
  }
  if ((a.radius || a.radius_grid) && spec.algorithm != Algorithm::kCps)
    throw ConfigError("--radius and --radius-grid apply to cps only");
  spec.cps_radius = a.radius;
  const PointCloud cloud = csv::read_cloud(a.in);
  const Detection det = run_detector(cloud, spec);
  io::write_json(a.out, io::to_json(det, cloud.size()));
  if (det.cps && !a.radius)
    std::cout << "cps distance estimates written; the detected set is chosen per radius at evaluation\n";
  else
    std::cout << det.boundary_indices.size() << " of " << cloud.size() << " points flagged\n";
  return 0;
}

int run_dm(const DmArgs& a) {
  const PointCloud cloud = csv::read_cloud(a.in);
  const DmEmbedding e = dm_embed(cloud, {a.epsilon_dm, a.ell, a.n_max, a.self_affinity});
  csv::write_cloud(a.out, PointCloud(e.coords));
  io::write_json(a.out + ".json", io::to_json(e));
  std::cout << "embedded " << e.coords.rows() << " points into " << e.coords.cols() << " coordinates; eigenvalues";
  for (Eigen::Index j = 0; j < e.eigenvalues.size(); ++j) std::cout << ' ' << e.eigenvalues[j];
  std::cout << '\n';
  return 0;
}

int run_pipeline(const PipelineArgs& a) {
  RunConfig c;
  if (!a.config.empty()) {
    c = load_config(a.config);
  } else {
    c.seed = a.seed;
    c.output = a.out;
    c.grid_k = a.grid_k;
    c.detectors.clear();
    std::stringstream ss(a.detectors);
    std::string item;
    while (std::getline(ss, item, ',')) {
      try {
        c.detectors.push_back(parse_algorithm(item));
      } catch (const InvalidArgument& e) {
        throw ConfigError(std::string("--detector: ") + e.what());
      }
    }
    DatasetEntry e;
    e.id = a.name;
    e.spec.name = a.name;
    e.spec.n = a.n ? *a.n : default_size(a.name);
    e.spec.seed = a.seed;
    e.spec.sigma = a.sigma;
    e.spec.ground_truth.helpers = a.gt_helpers;
    e.epsilon = a.epsilon;
    e.k = a.k;
    if (!a.no_dm) e.dm = DmParams{a.dm_epsilon, a.ell, a.n_max};
    c.datasets.push_back(e);
    validate(c);
  }
  const BenchmarkResult r = run_benchmark(c);
  write_table_text(std::cout, r.table);
  std::cout << "outputs in " << c.output << '\n';
  return 0;
}

int run_eval(const EvalArgs& a) {
  const io::DetectedSet det = io::read_detected(a.detected);
  const std::vector<double> dist = io::read_ground_truth(a.gt);
  const auto grid = radius_grid(a.grid_k, a.grid_step);
  F1Report rep = det.cps ? f1_max_cps(*det.cps, dist, grid) : f1_max(det.indices, dist, grid, det.detector);
  if (rep.detector.empty()) rep.detector = "detector";
  if (!a.out.empty()) io::write_json(a.out, io::to_json(rep));
  print_f1(rep);
  return 0;
}

int run_report(const ReportArgs& a) {
  const ResultTable t = load_results(a.in);
  write_table_text(std::cout, t);
  if (!a.out.empty()) {
    std::ofstream csv(a.out + ".csv");
    write_table_csv(csv, t);
    std::ofstream txt(a.out + ".txt");
    write_table_text(txt, t);
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Boundary detection on point clouds (BD-LLE) with baselines and benchmarks"};
  app.require_subcommand(1);
  const std::vector<std::string> dataset_names{"disk", "ball", "vcut", "tcut", "klein", "noisy-disk"};

  SampleArgs sa;
  auto* sample = app.add_subcommand("sample", "Draw a benchmark dataset");
  sample->add_option("--name", sa.name, "Dataset")->required()->check(CLI::IsMember(dataset_names));
  sample->add_option("--n", sa.n, "Number of points (0 = dataset default)");
  sample->add_option("--seed", sa.seed, "Seed");
  sample->add_option("--sigma", sa.sigma, "Noise level (noisy-disk)")->check(CLI::NonNegativeNumber);
  sample->add_flag("--nonuniform", sa.nonuniform, "Radius-uniform disk");
  sample->add_option("--gt-helpers", sa.gt_helpers, "Helper nodes of the geodesic ground-truth graph (0 = default)");
  sample->add_option("--out", sa.out, "Output CSV")->required();

  DetectArgs da;
  auto* detect = app.add_subcommand("detect", "Run BD-LLE on a point cloud");
  detect->add_option("--scheme", da.scheme, "Neighbor scheme")->check(CLI::IsMember({"ball", "knn"}));
  detect->add_option("--epsilon", da.epsilon, "Ball radius (default: epsilon-range midpoint)")->check(CLI::PositiveNumber);
  detect->add_option("--k", da.k, "Neighbors per point (default: select_K)")->check(CLI::PositiveNumber);
  detect->add_option("--dim", da.dim, "Intrinsic dimension")->check(CLI::PositiveNumber);
  detect->add_option("--reg", da.reg, "Regularizer: auto, theoretical or a value");
  detect->add_option("--threshold-frac", da.threshold_frac, "Fraction of max B used as threshold")->check(CLI::Range(0.0, 1.0));
  detect->add_option("--in", da.in, "Input CSV")->required();
  detect->add_option("--out", da.out, "Output JSON")->required();

  BaselineArgs ba;
  auto* baseline = app.add_subcommand("baseline", "Run a baseline detector");
  baseline->add_option("--algo", ba.algo, "Detector")->required()->check(CLI::IsMember({"border", "brim", "band", "spinver", "lever", "cps"}));
  baseline->add_option("--epsilon", ba.epsilon, "Ball radius (brim, cps)")->check(CLI::PositiveNumber);
  baseline->add_option("--k", ba.k, "Neighbors per point (border, band, spinver, lever)")->check(CLI::PositiveNumber);
  baseline->add_option("--dim", ba.dim, "Intrinsic dimension (cps)")->check(CLI::PositiveNumber);
  auto* radius = baseline->add_option("--radius", ba.radius, "CPS radius r: flag d_hat < r")->check(CLI::PositiveNumber);
  baseline->add_flag("--radius-grid", ba.radius_grid, "CPS: keep d_hat and choose r per grid radius at evaluation")->excludes(radius);
  baseline->add_option("--in", ba.in, "Input CSV")->required();
  baseline->add_option("--out", ba.out, "Output JSON")->required();

  DmArgs ma;
  auto* dm = app.add_subcommand("dm", "Diffusion-map embedding");
  dm->add_option("--epsilon-dm", ma.epsilon_dm, "Kernel bandwidth")->check(CLI::PositiveNumber);
  dm->add_option("--l", ma.ell, "Embedding dimension")->check(CLI::PositiveNumber);
  dm->add_option("--n-max", ma.n_max, "Embed only the first n-max points (0 = all)");
  dm->add_flag("--self-affinity", ma.self_affinity, "Keep the kernel diagonal");
  dm->add_option("--in", ma.in, "Input CSV")->required();
  dm->add_option("--out", ma.out, "Output CSV of embedded coordinates")->required();

  PipelineArgs pa;
  auto* pipeline = app.add_subcommand("pipeline", "sample -> dm -> detect -> eval, from flags or a config file");
  auto* cfg = pipeline->add_option("--config", pa.config, "Run configuration (INI)")->check(CLI::ExistingFile);
  pipeline->add_option("--name", pa.name, "Dataset")->check(CLI::IsMember(dataset_names))->excludes(cfg);
  pipeline->add_option("--n", pa.n, "Number of points (default: dataset size)")->excludes(cfg);
  pipeline->add_option("--seed", pa.seed, "Seed")->excludes(cfg);
  pipeline->add_option("--sigma", pa.sigma, "Noise level")->check(CLI::NonNegativeNumber)->excludes(cfg);
  pipeline->add_option("--gt-helpers", pa.gt_helpers, "Helper nodes of the geodesic ground-truth graph")->excludes(cfg);
  pipeline->add_option("--dm-epsilon", pa.dm_epsilon, "Diffusion-map bandwidth")->check(CLI::PositiveNumber)->excludes(cfg);
  pipeline->add_option("--l", pa.ell, "Embedding dimension")->check(CLI::PositiveNumber)->excludes(cfg);
  pipeline->add_option("--n-max", pa.n_max, "Embed only the first n-max points")->excludes(cfg);
  pipeline->add_flag("--no-dm", pa.no_dm, "Detect on the raw cloud")->excludes(cfg);
  pipeline->add_option("--detector", pa.detectors, "Comma-separated detectors")->excludes(cfg);
  pipeline->add_option("--epsilon", pa.epsilon, "Ball radius for ball detectors")->check(CLI::PositiveNumber)->excludes(cfg);
  pipeline->add_option("--k", pa.k, "Neighbors for KNN detectors")->check(CLI::PositiveNumber)->excludes(cfg);
  pipeline->add_option("--grid-k", pa.grid_k, "Number of evaluation radii")->check(CLI::PositiveNumber)->excludes(cfg);
  pipeline->add_option("--out", pa.out, "Output directory")->excludes(cfg);

  EvalArgs ea;
  auto* eval = app.add_subcommand("eval", "Score a detection against ground truth");
  eval->add_option("--detected", ea.detected, "Detection JSON, or CSV of indices")->required()->check(CLI::ExistingFile);
  eval->add_option("--gt", ea.gt, "Ground-truth CSV (first column: distance to the boundary)")->required()->check(CLI::ExistingFile);
  eval->add_option("--grid-k", ea.grid_k, "Number of radii")->check(CLI::PositiveNumber);
  eval->add_option("--grid-step", ea.grid_step, "Radius step")->check(CLI::PositiveNumber);
  eval->add_option("--out", ea.out, "Output JSON");

  ReportArgs ra;
  auto* report = app.add_subcommand("report", "Tabulate a benchmark directory (detectors x datasets)");
  report->add_option("--in", ra.in, "Benchmark output directory")->required()->check(CLI::ExistingDirectory);
  report->add_option("--out", ra.out, "Write <out>.csv and <out>.txt");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitConfig;
  }

  try {
    if (*sample) return run_sample(sa);
    if (*detect) return run_detect(da);
    if (*baseline) return run_baseline(ba);
    if (*dm) return run_dm(ma);
    if (*pipeline) return run_pipeline(pa);
    if (*eval) return run_eval(ea);
    if (*report) return run_report(ra);
  } catch (const ConfigError& e) {
    std::cerr << "bdlle: configuration error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const StageError& e) {
    std::cerr << "bdlle: " << e.what() << '\n';
    return kExitRuntime;
  } catch (const std::exception& e) {
    std::cerr << "bdlle: " << e.what() << '\n';
    return kExitRuntime;
  }
  return kExitConfig;
}
