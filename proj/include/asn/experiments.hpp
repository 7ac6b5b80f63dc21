#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "asn/baseline.hpp"
#include "asn/lono.hpp"
#include "asn/mrf.hpp"
#include "asn/scenario.hpp"
#include "asn/ssgp.hpp"

namespace asn {

// ---------------------------------------------------------------- training

struct Preset {
  std::string name = "desk";
  std::size_t num_unlabelled = 100;
  std::size_t num_validation = 20;
};

/// "desk" (100 unlabelled) or "paper" (300 unlabelled); both use the
/// scenario's labelled anchors.
Preset preset_by_name(const std::string& name);

/// RTFs of one source observed by every node.
NodeFeatures observe(const Scenario& scenario, const std::vector<ArrayNode>& nodes, const Vec3& source,
                     const std::vector<double>& signal, std::uint64_t noise_seed);

struct TrainingData {
  std::shared_ptr<const TrainingSet> set;
  std::vector<Vec3> positions;  // every training point, labelled first
  std::vector<ValidationPoint> validation;
};

/// Labelled anchors plus uniform RoI draws excited by white noise, and a
/// speech-like validation set for hyperparameter tuning.
TrainingData simulate_training(const Scenario& scenario, const Preset& preset, std::uint64_t seed, int jobs = 1);

/// A trained network: training data, tuned widths, the full-network model
/// and the LONO ensemble.
struct TrainedSystem {
  Scenario scenario;
  std::shared_ptr<const TrainingSet> train;
  KernelParams params;
  std::shared_ptr<const SsgpModel> full;
  LonoEnsemble ensemble;
};

TrainedSystem assemble_system(Scenario scenario, std::shared_ptr<const TrainingSet> train, KernelParams params);
TrainedSystem train_system(const Scenario& scenario, const Preset& preset, std::uint64_t seed, int jobs = 1);

// ---------------------------------------------------------------- detection

struct DetectorConfig {
  std::size_t num_nodes = 4;
  PriorParams prior;
  TransitionMatrix psi;
  double threshold = 0.5;
  BpOptions bp;
  NaiveConfig naive;
};

/// One detection on a scenario carrying a test source and an optional
/// displacement; the scenario geometry must match the trained system.
struct DetectionReport {
  ErrorVector error_vector;
  DetectionResult mrf;
  NaiveResult naive;
};

DetectionReport detect_scenario(const TrainedSystem& system, const DetectorConfig& config, const Scenario& scenario,
                                std::uint64_t seed);

// ---------------------------------------------------------------- trials

struct TrialOptions {
  /// Every trial displaces a node; otherwise odd trial ids are positive.
  bool forced_positive = false;
  bool random_rotation = true;
  /// Placement failures are retried with derived seeds this many times.
  int max_trial_resamples = 8;
};

/// Everything measured in one trial before any detector runs.
struct TrialObservation {
  std::uint64_t trial_id = 0;
  std::uint64_t seed = 0;
  double t60 = 0.0;
  double shift_size = 0.0;
  double rotation = 0.0;
  double heading = 0.0;
  int moved_node = 0;  // 0 when nothing moved
  bool true_moved = false;
  Vec3 source = Vec3::Zero();
  ErrorVector error_vector;
  /// |post-movement LONO estimate - true source| per sub-network.
  std::vector<double> truth_errors;
  double static_error = 0.0;        // full network, before movement
  double localization_error = 0.0;  // full network, after movement
  int resamples = 0;
};

struct TrialRecord : TrialObservation {
  double mrf_p_failure = 0.0;
  bool mrf_detected = false;
  double naive_score = 0.0;
  bool naive_detected = false;
  std::optional<int> identified_node_mrf;
  std::optional<int> identified_node_naive;
};

/// Seed of a trial: a pure function of the sweep seed and trial id.
std::uint64_t trial_seed(std::uint64_t base_seed, std::uint64_t trial_id);

TrialObservation observe_trial(const TrainedSystem& system, double shift_size, std::uint64_t trial_id,
                               std::uint64_t seed, const TrialOptions& options = {});
TrialRecord score_trial(const TrialObservation& obs, const DetectorConfig& config);
TrialRecord run_trial(const TrainedSystem& system, const DetectorConfig& config, double shift_size,
                      std::uint64_t trial_id, std::uint64_t seed, const TrialOptions& options = {});

// ---------------------------------------------------------------- sweeps

/// Fig. 3 shift grid: 0.05, then 0.25 to 3.05 m in 0.2 m steps.
std::vector<double> standard_shift_grid();

struct SweepSpec {
  std::vector<double> t60s{0.2};
  std::vector<double> shifts{1.05};
  /// One cell per T60 whose positive trials draw their shift uniformly from
  /// `shifts`, instead of one cell per (T60, shift).
  bool pool_shifts = false;
  std::size_t trials_per_cell = 100;
  std::uint64_t base_seed = 1;
  TrialOptions options;
  std::size_t failure_budget = 0;
};

struct SweepCell {
  double t60 = 0.0;
  double shift = 0.0;  // NaN for pooled cells
};

/// Enumerates cells in sweep order (T60 major).
std::vector<SweepCell> sweep_cells(const SweepSpec& spec);

using SystemLookup = std::function<std::pair<const TrainedSystem*, const DetectorConfig*>(double t60)>;
using RecordSink = std::function<void(const TrialRecord&)>;

struct SweepResult {
  std::vector<TrialRecord> records;  // ordered by trial id
  std::vector<std::string> failures;
};

/// Runs every trial of the sweep on `jobs` threads. Records reach `sink` in
/// trial-id order regardless of the degree of parallelism.
SweepResult run_sweep(const SweepSpec& spec, const SystemLookup& lookup, int jobs = 1, const RecordSink& sink = {});

/// Parallel map over [0, n) with results independent of `jobs`.
void parallel_for(std::size_t n, int jobs, const std::function<void(std::size_t)>& body);

// ---------------------------------------------------------------- calibration

enum class PriorReference { Baseline, GroundTruth };

struct CalibrationOptions {
  std::size_t trials = 200;
  std::vector<double> shifts = standard_shift_grid();
  PriorReference reference = PriorReference::Baseline;
  double unreliable_quantile = 0.95;
  double pseudocount = 1.0;
  double threshold = 0.5;
  BpOptions bp;
};

/// Labels each sub-network of each trial (aligned / misaligned /
/// unreliable), fits the class priors, the IPFP transition matrix and the
/// naive threshold.
DetectorConfig calibrate_from_observations(const std::vector<TrialObservation>& trials, std::size_t num_nodes,
                                           const CalibrationOptions& options = {});
DetectorConfig calibrate(const TrainedSystem& system, const CalibrationOptions& options, std::uint64_t seed,
                         int jobs = 1);

// ---------------------------------------------------------------- ROC

struct RocPoint {
  double threshold = 0.0;
  double fpr = 0.0;
  double tpr = 0.0;
};

struct RocCurve {
  std::vector<RocPoint> points;  // ascending threshold
  double auc = 0.0;
};

/// ROC of the rule score >= threshold. Empty `thresholds` sweeps every
/// distinct score. AUC by trapezoid including (0,0) and (1,1).
RocCurve roc_curve(const std::vector<double>& scores, const std::vector<bool>& positive,
                   std::vector<double> thresholds = {});
/// P(positive outranks negative), ties counted 1/2.
double rank_auc(const std::vector<double>& scores, const std::vector<bool>& positive);

enum class ScoreSelector { MrfPFailure, NaiveScore };

/// Thresholds 0, 0.05, ..., 1 for the MRF; every distinct score for the
/// naive detector (or explicit thresholds when given).
RocCurve compute_roc(const std::vector<TrialRecord>& records, ScoreSelector selector,
                     std::optional<std::vector<double>> thresholds = std::nullopt);
double compute_rank_auc(const std::vector<TrialRecord>& records, ScoreSelector selector);

std::vector<double> mrf_threshold_sweep();

/// Spearman rank correlation (average ranks for ties).
double spearman(const std::vector<double>& x, const std::vector<double>& y);

// ---------------------------------------------------------------- results

inline constexpr int kTrialCsvVersion = 1;

void write_trial_csv_header(std::ostream& os, std::size_t num_nodes);
void write_trial_csv_row(std::ostream& os, const TrialRecord& r);

/// Per-cell means, AUCs per T60, and run parameters.
nlohmann::json summarize(const SweepSpec& spec, const std::vector<TrialRecord>& records);

/// Tab-separated plot data (x, y, stderr) for Fig. 1, Fig. 3 and ROC curves.
void write_plot_data(const std::string& directory, const std::vector<TrialRecord>& records);

}  // namespace asn
