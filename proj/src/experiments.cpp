#include "asn/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <map>
#include <mutex>
#include <thread>

#include "asn/error.hpp"
#include "asn/signals.hpp"

namespace asn {
namespace {

using NodeRirs = std::array<ImpulseResponse, 2>;

std::size_t samples(double seconds, double rate) { return static_cast<std::size_t>(std::lround(seconds * rate)); }

NodeRirs rirs_for(const RoomSpec& room, const ArrayNode& node, const Vec3& source) {
  return {simulate_rir(room, source, node.mic_position(0)), simulate_rir(room, source, node.mic_position(1))};
}

NodeFeatures observe_with(const Scenario& sc, const std::vector<NodeRirs>& rirs, const Vec3& source,
                          const std::vector<double>& signal, std::uint64_t noise_seed) {
  NodeFeatures out;
  out.reserve(rirs.size());
  SourceEvent ev{source, signal, sc.snr_db};
  for (std::size_t m = 0; m < rirs.size(); ++m) {
    const auto id = static_cast<int>(m + 1);
    const auto mics = render_with_rirs(rirs[m], ev, derive_seed(noise_seed, {static_cast<std::uint64_t>(id)}));
    out.push_back(node_feature(mics, sc.features, sc.room.sample_rate, id));
  }
  return out;
}

}  // namespace

Preset preset_by_name(const std::string& name) {
  if (name == "desk") return {"desk", 100, 20};
  if (name == "paper") return {"paper", 300, 20};
  throw Error(ErrorKind::Config, "unknown preset '" + name + "' (expected desk or paper)");
}

NodeFeatures observe(const Scenario& scenario, const std::vector<ArrayNode>& nodes, const Vec3& source,
                     const std::vector<double>& signal, std::uint64_t noise_seed) {
  std::vector<NodeRirs> rirs;
  for (const auto& n : nodes) rirs.push_back(rirs_for(scenario.room, n, source));
  return observe_with(scenario, rirs, source, signal, noise_seed);
}

void parallel_for(std::size_t n, int jobs, const std::function<void(std::size_t)>& body) {
  const std::size_t workers = std::min<std::size_t>(n, static_cast<std::size_t>(std::max(jobs, 1)));
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) body(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr first_error;
  std::mutex error_mutex;
  std::vector<std::thread> pool;
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < n; i = next++) {
        try {
          body(i);
        } catch (...) {
          std::lock_guard lock(error_mutex);
          if (!first_error) first_error = std::current_exception();
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (first_error) std::rethrow_exception(first_error);
}

TrainingData simulate_training(const Scenario& scenario, const Preset& preset, std::uint64_t seed, int jobs) {
  scenario.validate();
  TrainingData data;
  data.positions = scenario.labelled_positions;
  Rng rng(derive_seed(seed, {stream::kTraining}));
  for (std::size_t i = 0; i < preset.num_unlabelled; ++i) data.positions.push_back(scenario.roi.sample(rng));

  const std::size_t n_train = samples(scenario.train_seconds, scenario.room.sample_rate);
  std::vector<NodeFeatures> points(data.positions.size());
  parallel_for(points.size(), jobs, [&](std::size_t d) {
    const auto sig = white_noise(n_train, derive_seed(seed, {stream::kTraining, stream::kSignal, d}));
    points[d] = observe(scenario, scenario.nodes, data.positions[d], sig,
                        derive_seed(seed, {stream::kTraining, stream::kNoise, d}));
  });
  std::vector<LabelledPoint> labels;
  for (std::size_t l = 0; l < scenario.labelled_positions.size(); ++l) labels.push_back({l, data.positions[l]});
  data.set = std::make_shared<const TrainingSet>(std::move(points), std::move(labels));

  Rng vrng(derive_seed(seed, {stream::kValidation}));
  std::vector<Vec3> vpos;
  for (std::size_t i = 0; i < preset.num_validation; ++i) vpos.push_back(scenario.roi.sample(vrng));
  const std::size_t n_test = samples(scenario.test_seconds, scenario.room.sample_rate);
  data.validation.resize(vpos.size());
  parallel_for(vpos.size(), jobs, [&](std::size_t v) {
    const auto sig = speech_like(n_test, scenario.room.sample_rate,
                                 derive_seed(seed, {stream::kValidation, stream::kSignal, v}));
    data.validation[v].position = vpos[v];
    data.validation[v].features =
        observe(scenario, scenario.nodes, vpos[v], sig, derive_seed(seed, {stream::kValidation, stream::kNoise, v}));
  });
  return data;
}

TrainedSystem assemble_system(Scenario scenario, std::shared_ptr<const TrainingSet> train, KernelParams params) {
  TrainedSystem sys;
  sys.scenario = std::move(scenario);
  sys.train = std::move(train);
  sys.params = std::move(params);
  if (sys.train->num_nodes() != sys.scenario.num_nodes())
    throw Error(ErrorKind::Config, "training set and scenario disagree on the node count");
  sys.full = std::make_shared<const SsgpModel>(sys.train, sys.params, all_nodes(sys.train->num_nodes()));
  sys.ensemble = build_ensemble(sys.train, sys.params);
  return sys;
}

TrainedSystem train_system(const Scenario& scenario, const Preset& preset, std::uint64_t seed, int jobs) {
  auto data = simulate_training(scenario, preset, seed, jobs);
  auto params = tune_hyperparameters(data.set, data.validation);
  return assemble_system(scenario, data.set, params);
}

std::uint64_t trial_seed(std::uint64_t base_seed, std::uint64_t trial_id) {
  return derive_seed(base_seed, {stream::kEvaluation, trial_id});
}

TrialObservation observe_trial(const TrainedSystem& system, double shift_size, std::uint64_t trial_id,
                               std::uint64_t seed, const TrialOptions& options) {
  const Scenario& sc = system.scenario;
  const std::size_t m = sc.num_nodes();
  const std::size_t n_test = samples(sc.test_seconds, sc.room.sample_rate);

  for (int attempt = 0;; ++attempt) {
    const std::uint64_t s =
        attempt == 0 ? seed : derive_seed(seed, {stream::kResample, static_cast<std::uint64_t>(attempt)});
    Rng rng(s);
    TrialObservation obs;
    obs.trial_id = trial_id;
    obs.seed = seed;
    obs.t60 = sc.room.t60;
    obs.shift_size = shift_size;
    obs.resamples = attempt;
    obs.source = sc.roi.sample(rng);
    obs.true_moved = options.forced_positive || (trial_id % 2 == 1);

    std::vector<ArrayNode> post_nodes = sc.nodes;
    if (obs.true_moved) {
      std::uniform_int_distribution<int> pick(1, static_cast<int>(m));
      obs.moved_node = pick(rng);
      const auto& node = sc.nodes[static_cast<std::size_t>(obs.moved_node - 1)];
      Displacement d;
      try {
        d = sample_displacement(sc.room, node, shift_size, rng, options.random_rotation);
      } catch (const Error& e) {
        if (e.kind() != ErrorKind::Placement || attempt >= options.max_trial_resamples) throw;
        continue;
      }
      obs.rotation = d.rotation;
      obs.heading = d.heading;
      post_nodes[static_cast<std::size_t>(obs.moved_node - 1)] = displace_node(node, d.shift, d.rotation);
    }

    std::vector<NodeRirs> pre_rirs;
    for (const auto& n : sc.nodes) pre_rirs.push_back(rirs_for(sc.room, n, obs.source));
    std::vector<NodeRirs> post_rirs = pre_rirs;
    if (obs.moved_node > 0) {
      const auto j = static_cast<std::size_t>(obs.moved_node - 1);
      post_rirs[j] = rirs_for(sc.room, post_nodes[j], obs.source);
    }

    const auto pre_sig = speech_like(n_test, sc.room.sample_rate, derive_seed(s, {stream::kSignal, 0}));
    const auto post_sig = speech_like(n_test, sc.room.sample_rate, derive_seed(s, {stream::kSignal, 1}));
    const auto pre = observe_with(sc, pre_rirs, obs.source, pre_sig, derive_seed(s, {stream::kNoise, 0}));
    const auto post = observe_with(sc, post_rirs, obs.source, post_sig, derive_seed(s, {stream::kNoise, 1}));

    const auto ensemble = record_baseline(system.ensemble, pre);
    const auto after = ensemble.estimates(post);
    obs.error_vector = error_vector(ensemble.baselines(), after);
    for (const auto& q : after) obs.truth_errors.push_back((q - obs.source).norm());
    obs.static_error = (system.full->estimate(pre) - obs.source).norm();
    obs.localization_error = (system.full->estimate(post) - obs.source).norm();
    return obs;
  }
}

TrialRecord score_trial(const TrialObservation& obs, const DetectorConfig& config) {
  if (obs.error_vector.size() != config.num_nodes)
    throw Error(ErrorKind::Config, "detector configured for " + std::to_string(config.num_nodes) +
                                       " nodes, error vector has " + std::to_string(obs.error_vector.size()));
  TrialRecord r;
  static_cast<TrialObservation&>(r) = obs;
  const auto mrf = detect(obs.error_vector, config.prior, config.psi, config.threshold, config.bp);
  r.mrf_p_failure = mrf.p_failure;
  r.mrf_detected = mrf.movement_detected;
  r.identified_node_mrf = mrf.suspected_node;
  const auto naive = naive_detect(obs.error_vector, config.naive);
  r.naive_score = naive.score;
  r.naive_detected = naive.detected;
  r.identified_node_naive = naive.suspected_node;
  return r;
}

TrialRecord run_trial(const TrainedSystem& system, const DetectorConfig& config, double shift_size,
                      std::uint64_t trial_id, std::uint64_t seed, const TrialOptions& options) {
  return score_trial(observe_trial(system, shift_size, trial_id, seed, options), config);
}

DetectionReport detect_scenario(const TrainedSystem& system, const DetectorConfig& config, const Scenario& scenario,
                                std::uint64_t seed) {
  scenario.validate();
  const std::size_t m = system.scenario.num_nodes();
  if (scenario.num_nodes() != m || config.num_nodes != m)
    throw Error(ErrorKind::Config, "model has " + std::to_string(m) + " nodes, detector config " +
                                       std::to_string(config.num_nodes) + ", scenario " +
                                       std::to_string(scenario.num_nodes()));
  if (!scenario.test_source) throw Error(ErrorKind::Config, "scenario has no test_source");
  const Vec3 source = *scenario.test_source;
  std::vector<ArrayNode> post_nodes = scenario.nodes;
  if (scenario.displacement) {
    const auto& d = *scenario.displacement;
    if (d.node < 1 || static_cast<std::size_t>(d.node) > m)
      throw Error(ErrorKind::Config, "displacement names node " + std::to_string(d.node));
    auto& node = post_nodes[static_cast<std::size_t>(d.node - 1)];
    node = displace_node(node, d.shift, d.rotation);
    if (!scenario.room.contains(node.mic_position(0)) || !scenario.room.contains(node.mic_position(1)))
      throw Error(ErrorKind::Placement, "displaced node " + std::to_string(d.node) + " leaves the room");
  }
  const std::size_t n = samples(scenario.test_seconds, scenario.room.sample_rate);
  const auto pre_sig = speech_like(n, scenario.room.sample_rate, derive_seed(seed, {stream::kDetect, stream::kSignal, 0}));
  const auto post_sig =
      speech_like(n, scenario.room.sample_rate, derive_seed(seed, {stream::kDetect, stream::kSignal, 1}));
  const auto pre = observe(scenario, scenario.nodes, source, pre_sig, derive_seed(seed, {stream::kDetect, stream::kNoise, 0}));
  const auto post = observe(scenario, post_nodes, source, post_sig, derive_seed(seed, {stream::kDetect, stream::kNoise, 1}));

  DetectionReport out;
  const auto ensemble = record_baseline(system.ensemble, pre);
  out.error_vector = compute_error_vector(ensemble, post);
  out.mrf = detect(out.error_vector, config.prior, config.psi, config.threshold, config.bp);
  out.naive = naive_detect(out.error_vector, config.naive);
  return out;
}

std::vector<double> standard_shift_grid() {
  std::vector<double> g{0.05};
  for (int i = 0; i <= 14; ++i) g.push_back(std::round((0.25 + 0.2 * i) * 100.0) / 100.0);
  return g;
}

std::vector<SweepCell> sweep_cells(const SweepSpec& spec) {
  std::vector<SweepCell> cells;
  for (double t60 : spec.t60s) {
    if (spec.pool_shifts) {
      cells.push_back({t60, std::numeric_limits<double>::quiet_NaN()});
    } else {
      for (double s : spec.shifts) cells.push_back({t60, s});
    }
  }
  return cells;
}

namespace {

double pooled_shift(const std::vector<double>& shifts, std::uint64_t seed) {
  Rng rng(derive_seed(seed, {stream::kPlacement}));
  std::uniform_int_distribution<std::size_t> pick(0, shifts.size() - 1);
  return shifts[pick(rng)];
}

}  // namespace

SweepResult run_sweep(const SweepSpec& spec, const SystemLookup& lookup, int jobs, const RecordSink& sink) {
  if (spec.t60s.empty() || spec.shifts.empty() || spec.trials_per_cell == 0)
    throw Error(ErrorKind::Config, "sweep grid is empty");
  const auto cells = sweep_cells(spec);
  const std::size_t total = cells.size() * spec.trials_per_cell;

  std::vector<std::optional<TrialRecord>> slots(total);
  std::vector<std::string> errors(total);
  std::vector<bool> done(total, false);
  std::size_t next_emit = 0;
  std::mutex emit_mutex;

  parallel_for(total, jobs, [&](std::size_t id) {
    const auto& cell = cells[id / spec.trials_per_cell];
    const std::uint64_t seed = trial_seed(spec.base_seed, id);
    try {
      const auto [system, config] = lookup(cell.t60);
      if (system == nullptr || config == nullptr)
        throw Error(ErrorKind::Config, "no trained system for t60 = " + std::to_string(cell.t60));
      const double shift = spec.pool_shifts ? pooled_shift(spec.shifts, seed) : cell.shift;
      slots[id] = run_trial(*system, *config, shift, id, seed, spec.options);
    } catch (const std::exception& e) {
      errors[id] = "trial " + std::to_string(id) + ": " + e.what();
    }
    std::lock_guard lock(emit_mutex);
    done[id] = true;
    while (next_emit < total && done[next_emit]) {
      if (sink && slots[next_emit]) sink(*slots[next_emit]);
      ++next_emit;
    }
  });

  SweepResult result;
  for (std::size_t id = 0; id < total; ++id) {
    if (slots[id]) result.records.push_back(std::move(*slots[id]));
    else result.failures.push_back(errors[id]);
  }
  if (result.failures.size() > spec.failure_budget) {
    std::string msg = std::to_string(result.failures.size()) + " trials failed (budget " +
                      std::to_string(spec.failure_budget) + "); first: " + result.failures.front();
    throw Error(ErrorKind::State, msg);
  }
  return result;
}

DetectorConfig calibrate_from_observations(const std::vector<TrialObservation>& trials, std::size_t num_nodes,
                                           const CalibrationOptions& options) {
  if (trials.empty()) throw Error(ErrorKind::Calibration, "no calibration trials");
  std::vector<double> statics;
  for (const auto& t : trials) statics.push_back(t.static_error);
  std::sort(statics.begin(), statics.end());
  const auto rank = static_cast<std::size_t>(std::ceil(options.unreliable_quantile * static_cast<double>(statics.size())));
  const double cutoff = statics[std::min(statics.size() - 1, rank == 0 ? 0 : rank - 1)];

  constexpr int kA = static_cast<int>(LatentClass::Aligned);
  constexpr int kM = static_cast<int>(LatentClass::Misaligned);
  constexpr int kU = static_cast<int>(LatentClass::Unreliable);

  std::vector<double> aligned, misaligned;
  Eigen::Matrix3d counts = Eigen::Matrix3d::Constant(options.pseudocount);
  ClassVector freq = ClassVector::Constant(options.pseudocount);
  std::vector<ErrorVector> naive_e;
  std::vector<int> naive_moved;

  for (const auto& t : trials) {
    if (t.error_vector.size() != num_nodes) throw Error(ErrorKind::Calibration, "trial node count mismatch");
    const bool unreliable = t.static_error > cutoff;
    std::vector<int> cls(num_nodes);
    for (std::size_t m = 0; m < num_nodes; ++m) {
      if (unreliable) cls[m] = kU;
      else if (t.true_moved && static_cast<int>(m + 1) != t.moved_node) cls[m] = kM;
      else cls[m] = kA;
      const double v = options.reference == PriorReference::Baseline ? t.error_vector.e[m] : t.truth_errors[m];
      if (cls[m] == kA) aligned.push_back(v);
      if (cls[m] == kM) misaligned.push_back(v);
      freq(cls[m]) += 1.0;
    }
    for (std::size_t a = 0; a < num_nodes; ++a)
      for (std::size_t b = 0; b < num_nodes; ++b)
        if (a != b) counts(cls[a], cls[b]) += 1.0;
    if (!unreliable && t.true_moved) {
      naive_e.push_back(t.error_vector);
      naive_moved.push_back(t.moved_node);
    }
  }
  if (aligned.empty()) throw Error(ErrorKind::Calibration, "class 'aligned' has no calibration samples");
  if (misaligned.empty()) throw Error(ErrorKind::Calibration, "class 'misaligned' has no calibration samples");

  DetectorConfig cfg;
  cfg.num_nodes = num_nodes;
  cfg.prior = fit_priors(aligned, misaligned);
  const ClassVector marginals = freq / freq.sum();
  cfg.psi = fit_transition_ipfp(counts, marginals, marginals).psi.symmetrized();
  cfg.threshold = options.threshold;
  cfg.bp = options.bp;
  cfg.naive = calibrate_naive_threshold(naive_e, naive_moved);
  return cfg;
}

DetectorConfig calibrate(const TrainedSystem& system, const CalibrationOptions& options, std::uint64_t seed,
                         int jobs) {
  if (options.trials == 0 || options.shifts.empty()) throw Error(ErrorKind::Calibration, "empty calibration design");
  const std::uint64_t base = derive_seed(seed, {stream::kCalibration});
  std::vector<TrialObservation> obs(options.trials);
  TrialOptions topt;
  parallel_for(options.trials, jobs, [&](std::size_t id) {
    const std::uint64_t s = trial_seed(base, id);
    obs[id] = observe_trial(system, pooled_shift(options.shifts, s), id, s, topt);
  });
  return calibrate_from_observations(obs, system.scenario.num_nodes(), options);
}

}  // namespace asn
