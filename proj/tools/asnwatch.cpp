#include <chrono>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>
#include <thread>

#include "CLI11.hpp"
#include "json.hpp"

#include "asn/error.hpp"
#include "asn/experiments.hpp"
#include "asn/persistence.hpp"

namespace {

using namespace asn;

constexpr int kExitAligned = 0;
constexpr int kExitError = 1;
constexpr int kExitDetected = 2;

int g_verbosity = 1;

void log(const std::string& msg) {
  if (g_verbosity > 0) std::cerr << msg << '\n';
}

std::vector<double> read_samples(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw Error(ErrorKind::Io, "cannot open " + path);
  std::vector<double> out;
  std::string line;
  for (int lineno = 1; std::getline(is, line); ++lineno) {
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ls(line);
    double v;
    if (!(ls >> v)) throw Error(ErrorKind::Schema, path + ":" + std::to_string(lineno) + ": not a number");
    out.push_back(v);
  }
  return out;
}

ClassVector class_vector(const std::vector<double>& v, const char* what) {
  if (v.size() != 3) throw Error(ErrorKind::Config, std::string(what) + " needs 3 values");
  return {v[0], v[1], v[2]};
}

std::string triple(const ClassVector& p) {
  std::ostringstream os;
  os << std::fixed << std::setprecision(4) << '[' << p(0) << ", " << p(1) << ", " << p(2) << ']';
  return os.str();
}

struct Options {
  std::uint64_t seed = 1;
  int jobs = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  std::string scenario, model, config, preset = "desk", out, reference = "baseline";
  std::vector<std::string> models, configs;
  std::optional<double> threshold;
  std::size_t trials = 0;
  std::vector<double> shifts;
  bool pool = false;
  std::vector<std::string> aligned_file, misaligned_file;
  std::vector<double> counts, rows, cols;
};

int cmd_train(const Options& o) {
  const auto t0 = std::chrono::steady_clock::now();
  const auto scenario = load_scenario(o.scenario);
  const auto preset = preset_by_name(o.preset);
  log("training " + preset.name + " preset, " + std::to_string(o.jobs) + " jobs");
  const auto system = train_system(scenario, preset, o.seed, o.jobs);
  save_model(system, o.out);
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  std::cout << "# seed: " << o.seed << '\n';
  std::cout << "preset: " << preset.name << '\n';
  std::cout << "n_L: " << system.train->num_labelled() << '\n';
  std::cout << "n_U: " << system.train->num_unlabelled() << '\n';
  std::cout << "epsilons:";
  for (double e : system.params.epsilons) std::cout << ' ' << std::setprecision(10) << e;
  std::cout << "\nsigma2: " << system.params.sigma2 << '\n';
  std::cout << "model_hash: " << hex64(model_hash(system)) << '\n';
  std::cout << "wall_time_s: " << std::setprecision(4) << secs << '\n';
  return kExitAligned;
}

int cmd_calibrate(const Options& o) {
  auto system = load_model(o.model);
  if (!o.scenario.empty()) {
    auto sc = load_scenario(o.scenario);
    if (sc.num_nodes() != system.scenario.num_nodes())
      throw Error(ErrorKind::Config, "scenario node count differs from the model");
    system.scenario = std::move(sc);
  }
  CalibrationOptions copt;
  if (o.trials > 0) copt.trials = o.trials;
  if (!o.shifts.empty()) copt.shifts = o.shifts;
  if (o.threshold) copt.threshold = *o.threshold;
  if (o.reference == "ground-truth") copt.reference = PriorReference::GroundTruth;
  else if (o.reference != "baseline") throw Error(ErrorKind::Config, "unknown --reference " + o.reference);
  log("calibrating on " + std::to_string(copt.trials) + " trials");
  const auto cfg = calibrate(system, copt, o.seed, o.jobs);
  save_detector(cfg, o.out);
  auto j = to_json(cfg);
  j["seed"] = o.seed;
  std::cout << "# seed: " << o.seed << '\n' << j.dump(2) << '\n';
  return kExitAligned;
}

int cmd_detect(const Options& o) {
  const auto system = load_model(o.model);
  auto cfg = load_detector(o.config);
  if (o.threshold) cfg.threshold = *o.threshold;
  const auto scenario = o.scenario.empty() ? system.scenario : load_scenario(o.scenario);
  const auto report = detect_scenario(system, cfg, scenario, o.seed);
  std::cout << "# seed: " << o.seed << '\n';
  std::cout << "# [aligned, misaligned, unreliable] per LONO sub-network (excluded node)\n";
  for (std::size_t m = 0; m < report.mrf.posteriors.size(); ++m)
    std::cout << "node " << m + 1 << ": " << triple(report.mrf.posteriors.p[m]) << "  e = " << std::setprecision(4)
              << report.error_vector.e[m] << '\n';
  std::cout << "p_failure: " << std::setprecision(6) << report.mrf.p_failure << '\n';
  std::cout << "threshold: " << cfg.threshold << '\n';
  std::cout << "movement_detected: " << (report.mrf.movement_detected ? "yes" : "no") << '\n';
  std::cout << "suspected_node: "
            << (report.mrf.suspected_node ? std::to_string(*report.mrf.suspected_node) : std::string("none")) << '\n';
  std::cout << "naive_score: " << report.naive.score << '\n';
  if (report.mrf.clamped) log("warning: some e_m exceeded e_max and were clamped");
  if (!report.mrf.converged) log("warning: belief propagation did not converge");
  return report.mrf.movement_detected ? kExitDetected : kExitAligned;
}

int cmd_evaluate(const Options& o) {
  if (o.models.size() != o.configs.size() || o.models.empty())
    throw Error(ErrorKind::Config, "give one --config per --model");
  std::vector<TrainedSystem> systems;
  std::vector<DetectorConfig> configs;
  SweepSpec spec;
  spec.t60s.clear();
  for (std::size_t i = 0; i < o.models.size(); ++i) {
    systems.push_back(load_model(o.models[i]));
    configs.push_back(load_detector(o.configs[i]));
    if (o.threshold) configs.back().threshold = *o.threshold;
    spec.t60s.push_back(systems.back().scenario.room.t60);
  }
  spec.shifts = o.shifts.empty() ? standard_shift_grid() : o.shifts;
  spec.pool_shifts = o.pool;
  spec.trials_per_cell = o.trials > 0 ? o.trials : 100;
  spec.base_seed = o.seed;
  auto lookup = [&](double t60) -> std::pair<const TrainedSystem*, const DetectorConfig*> {
    for (std::size_t i = 0; i < systems.size(); ++i)
      if (systems[i].scenario.room.t60 == t60) return {&systems[i], &configs[i]};
    return {nullptr, nullptr};
  };

  const std::filesystem::path dir(o.out);
  std::filesystem::create_directories(dir);
  std::ofstream csv(dir / "trials.csv");
  if (!csv) throw Error(ErrorKind::Io, "cannot write " + (dir / "trials.csv").string());
  csv << "# seed: " << o.seed << '\n';
  write_trial_csv_header(csv, systems.front().scenario.num_nodes());
  log("evaluating " + std::to_string(sweep_cells(spec).size() * spec.trials_per_cell) + " trials");
  const auto result = run_sweep(spec, lookup, o.jobs, [&](const TrialRecord& r) { write_trial_csv_row(csv, r); });
  for (const auto& f : result.failures) log("trial failure: " + f);

  auto summary = summarize(spec, result.records);
  summary["seed"] = o.seed;
  summary["failures"] = result.failures;
  std::ofstream js(dir / "summary.json");
  js << summary.dump(2) << '\n';
  write_plot_data((dir / "plots").string(), result.records);

  std::cout << "# seed: " << o.seed << '\n';
  std::cout << "t60\tauc_naive\tauc_mrf\n";
  for (const auto& a : summary["auc"]) {
    if (!a.contains("mrf")) continue;
    std::cout << a["t60"].get<double>() << '\t' << std::setprecision(4) << a["naive"].get<double>() << '\t'
              << a["mrf"].get<double>() << '\n';
  }
  return kExitAligned;
}

int cmd_fit_priors(const Options& o) {
  const auto aligned = read_samples(o.aligned_file.at(0));
  const auto mis = read_samples(o.misaligned_file.at(0));
  const auto p = fit_priors(aligned, mis);
  nlohmann::json j{{"sigma2_align", p.sigma2_align}, {"lambda", p.lambda}, {"e_max", p.e_max}};
  std::cout << j.dump(2) << '\n';
  return kExitAligned;
}

int cmd_fit_transition(const Options& o) {
  if (o.counts.size() != 9) throw Error(ErrorKind::Config, "--counts needs 9 values (row-major)");
  Eigen::Matrix3d c;
  for (int i = 0; i < 9; ++i) c(i / 3, i % 3) = o.counts[static_cast<std::size_t>(i)];
  const auto r = fit_transition_ipfp(c, class_vector(o.rows, "--row"), class_vector(o.cols, "--col"));
  nlohmann::json psi = nlohmann::json::array();
  for (int i = 0; i < 3; ++i) psi.push_back({r.psi.psi(i, 0), r.psi.psi(i, 1), r.psi.psi(i, 2)});
  std::cout << nlohmann::json{{"psi", psi}, {"iterations", r.iterations}}.dump(2) << '\n';
  return kExitAligned;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Acoustic sensor network node-movement detection"};
  app.require_subcommand(1);
  Options o;
  app.add_option("--seed", o.seed, "64-bit seed for every random stream")->capture_default_str();
  app.add_option("--jobs", o.jobs, "worker threads (results do not depend on it)")->check(CLI::PositiveNumber);
  auto* quiet = app.add_flag("-q,--quiet", "suppress progress logging");

  auto* train = app.add_subcommand("train", "simulate training data, tune and persist the LONO ensemble");
  train->add_option("--scenario", o.scenario)->required()->check(CLI::ExistingFile);
  train->add_option("--preset", o.preset)->check(CLI::IsMember({"desk", "paper"}))->capture_default_str();
  train->add_option("--out", o.out, "model file")->required();

  auto* cal = app.add_subcommand("calibrate", "fit priors, transition matrix and naive threshold");
  cal->add_option("--model", o.model)->required()->check(CLI::ExistingFile);
  cal->add_option("--scenario", o.scenario)->check(CLI::ExistingFile);
  cal->add_option("--trials", o.trials, "calibration trials (default 200)");
  cal->add_option("--threshold", o.threshold, "p_failure threshold stored in the config");
  cal->add_option("--reference", o.reference, "baseline or ground-truth")->capture_default_str();
  cal->add_option("--out", o.out, "detector config file")->required();

  auto* det = app.add_subcommand("detect", "one detection; exit 0 aligned, 2 movement, 1 error");
  det->add_option("--model", o.model)->required()->check(CLI::ExistingFile);
  det->add_option("--config", o.config)->required()->check(CLI::ExistingFile);
  det->add_option("--scenario", o.scenario, "scenario with test_source and displacement")->check(CLI::ExistingFile);
  det->add_option("--threshold", o.threshold)->check(CLI::Range(0.0, 1.0));

  auto* ev = app.add_subcommand("evaluate", "Monte Carlo sweep: trials.csv, summary.json, plots/");
  ev->add_option("--model", o.models, "model file (repeat per T60)")->required();
  ev->add_option("--config", o.configs, "detector config (one per model)")->required();
  ev->add_option("--trials", o.trials, "trials per cell (default 100)");
  ev->add_option("--shifts", o.shifts, "shift grid in meters (default: 0.05, 0.25..3.05)");
  ev->add_flag("--pool-shifts", o.pool, "one cell per T60 with shifts drawn from the grid");
  ev->add_option("--threshold", o.threshold)->check(CLI::Range(0.0, 1.0));
  ev->add_option("--out", o.out, "output directory")->required();

  auto* fp = app.add_subcommand("fit-priors", "fit class priors from error samples");
  fp->add_option("--aligned", o.aligned_file, "one error per line")->required()->expected(1);
  fp->add_option("--misaligned", o.misaligned_file, "one error per line")->required()->expected(1);

  auto* ft = app.add_subcommand("fit-transition", "IPFP fit of the transition matrix");
  ft->add_option("--counts", o.counts, "9 joint counts, row-major")->required();
  ft->add_option("--row", o.rows, "3 row marginals")->required();
  ft->add_option("--col", o.cols, "3 column marginals")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitError;
  }
  if (quiet->count() > 0) g_verbosity = 0;

  try {
    if (train->parsed()) return cmd_train(o);
    if (cal->parsed()) return cmd_calibrate(o);
    if (det->parsed()) return cmd_detect(o);
    if (ev->parsed()) return cmd_evaluate(o);
    if (fp->parsed()) return cmd_fit_priors(o);
    if (ft->parsed()) return cmd_fit_transition(o);
  } catch (const std::exception& e) {
    std::cerr << "asnwatch: " << e.what() << '\n';
    return kExitError;
  }
  return kExitError;
}
