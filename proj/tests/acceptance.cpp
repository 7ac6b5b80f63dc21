// Acceptance run: one PASS/FAIL line per criterion. Exit status is non-zero
// when any criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <map>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <thread>

#include <Eigen/Eigenvalues>

#include "asn/acoustics.hpp"
#include "asn/experiments.hpp"
#include "asn/signals.hpp"
#include "fixtures.hpp"
#include "oracles.hpp"

using namespace asn;

namespace {

using Clock = std::chrono::steady_clock;

constexpr std::uint64_t kTrainSeed = 7;
constexpr std::uint64_t kCalibrationSeed = 7;
const std::vector<double> kT60s{0.2, 0.4, 0.6};
const std::vector<double> kReducedShifts{0.05, 0.85, 1.65, 2.45, 3.05};

int jobs() { return static_cast<int>(std::max(1u, std::thread::hardware_concurrency())); }

double seconds_since(Clock::time_point t) { return std::chrono::duration<double>(Clock::now() - t).count(); }

std::map<int, std::pair<bool, std::string>> results;

void report(int id, bool pass, const std::string& detail) {
  results[id] = {pass, detail};
  std::printf("... criterion %d %s\n", id, pass ? "passed" : "failed");
  std::fflush(stdout);
}

void info(const std::string& detail) {
  std::printf("info:         %s\n", detail.c_str());
  std::fflush(stdout);
}

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

double mean(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return v.empty() ? std::nan("") : s / static_cast<double>(v.size());
}

struct Stage {
  std::map<double, TrainedSystem> systems;
  std::map<double, DetectorConfig> configs;
  double setup_seconds = 0.0;

  SystemLookup lookup() const {
    return [this](double t60) { return std::pair{&systems.at(t60), &configs.at(t60)}; };
  }
};

Stage prepare() {
  const auto t0 = Clock::now();
  Stage s;
  for (double t60 : kT60s) {
    s.systems.emplace(t60, train_system(Scenario::standard(t60), preset_by_name("desk"), kTrainSeed, jobs()));
    s.configs.emplace(t60, calibrate(s.systems.at(t60), CalibrationOptions{}, kCalibrationSeed, jobs()));
    const auto& c = s.configs.at(t60);
    info(fmt("t60 %.1f trained and calibrated: sigma2 %.3g, lambda %.3g, e_max %.3g, naive threshold %.3g", t60,
             c.prior.sigma2_align, c.prior.lambda, c.prior.e_max, c.naive.threshold));
  }
  s.setup_seconds = seconds_since(t0);
  info(fmt("setup %.1f s", s.setup_seconds));
  return s;
}

// ------------------------------------------------------------- 1 to 3

void localization_and_detection(const Stage& st) {
  const auto t0 = Clock::now();
  SweepSpec spec;
  spec.t60s = kT60s;
  spec.shifts = kReducedShifts;
  spec.trials_per_cell = 50;
  spec.base_seed = 101;
  spec.options.forced_positive = true;
  const auto res = run_sweep(spec, st.lookup(), jobs());
  const double elapsed = seconds_since(t0) + st.setup_seconds;

  std::map<double, std::vector<double>> statics;
  std::map<std::pair<double, double>, std::vector<double>> dyn, pfail;
  for (const auto& r : res.records) {
    statics[r.t60].push_back(r.static_error);
    dyn[{r.t60, r.shift_size}].push_back(r.localization_error);
    pfail[{r.t60, r.shift_size}].push_back(r.mrf_p_failure);
  }

  std::string detail;
  bool all_small = true;
  for (double t60 : kT60s) {
    const double m = mean(statics[t60]);
    all_small = all_small && m < 0.6;
    detail += fmt("t60 %.1f: %.3f m (n=%zu); ", t60, m, statics[t60].size());
  }
  const bool ordered = mean(statics[0.2]) < mean(statics[0.6]);
  report(1, ordered && all_small && elapsed <= 900.0, detail + fmt("%.0f s", elapsed));

  int points = 0, exceeded = 0;
  detail.clear();
  for (double t60 : kT60s)
    for (double s : kReducedShifts) {
      if (s < 0.45) continue;
      ++points;
      const double d = mean(dyn[{t60, s}]);
      if (d > mean(statics[t60])) ++exceeded;
      detail += fmt("%.1f/%.2f: %.2f; ", t60, s, d);
    }
  const bool enough = exceeded >= static_cast<int>(std::ceil(0.9 * points));
  report(2, enough && elapsed <= 1800.0, fmt("%d/%d grid points above static; ", exceeded, points) + detail);

  bool monotone = true;
  detail.clear();
  for (double t60 : kT60s) {
    std::vector<double> y;
    for (double s : kReducedShifts) y.push_back(mean(pfail[{t60, s}]));
    const double rho = spearman(kReducedShifts, y);
    monotone = monotone && rho >= 0.8;
    detail += fmt("t60 %.1f rho %.2f [", t60, rho);
    for (double v : y) detail += fmt(" %.2f", v);
    detail += " ]; ";
  }
  const double far = mean(pfail[{0.2, 3.05}]);
  report(3, monotone && far >= 0.5, detail + fmt("p_failure(3.05 m, 0.2 s) %.3f", far));

  // Same design without the random rotation of the moved node.
  SweepSpec fixed = spec;
  fixed.t60s = {0.2};
  fixed.options.random_rotation = false;
  const auto nr = run_sweep(fixed, st.lookup(), jobs());
  std::map<double, std::vector<double>> nr_p;
  for (const auto& r : nr.records) nr_p[r.shift_size].push_back(r.mrf_p_failure);
  std::vector<double> y;
  detail.clear();
  for (double s : kReducedShifts) {
    y.push_back(mean(nr_p[s]));
    detail += fmt(" %.2f", y.back());
  }
  info(fmt("without rotation, t60 0.2: rho %.2f, p_failure [", spearman(kReducedShifts, y)) + detail + " ]");
}

// ------------------------------------------------------------- 4, 5

void auc_comparison(const Stage& st) {
  const auto t0 = Clock::now();
  SweepSpec spec;
  spec.t60s = kT60s;
  spec.shifts = standard_shift_grid();
  spec.pool_shifts = true;
  spec.trials_per_cell = 100;
  spec.base_seed = 202;
  const auto res = run_sweep(spec, st.lookup(), jobs());
  const double elapsed = seconds_since(t0) + st.setup_seconds;

  std::map<double, std::vector<TrialRecord>> by;
  for (const auto& r : res.records) by[r.t60].push_back(r);
  bool ok = elapsed <= 2700.0;
  std::string detail;
  for (double t60 : kT60s) {
    const auto& rs = by[t60];
    const double mrf = compute_roc(rs, ScoreSelector::MrfPFailure).auc;
    const double naive = compute_roc(rs, ScoreSelector::NaiveScore).auc;
    const double mrf_rank = compute_rank_auc(rs, ScoreSelector::MrfPFailure);
    const double naive_rank = compute_rank_auc(rs, ScoreSelector::NaiveScore);
    ok = ok && (t60 < 0.5 ? mrf - naive >= 0.05 : mrf >= naive - 0.05);
    detail += fmt("t60 %.1f mrf %.3f naive %.3f (rank %.3f / %.3f); ", t60, mrf, naive, mrf_rank, naive_rank);
  }
  report(4, ok, detail + fmt("%.0f s", elapsed));
}

void identification(const Stage& st) {
  SweepSpec spec;
  spec.t60s = {0.2};
  spec.shifts = {1.0};
  spec.trials_per_cell = 100;
  spec.base_seed = 303;
  spec.options.forced_positive = true;
  const auto res = run_sweep(spec, st.lookup(), jobs());
  int detected = 0, correct = 0, naive_correct = 0;
  for (const auto& r : res.records) {
    if (!r.mrf_detected) continue;
    ++detected;
    if (r.identified_node_mrf == r.moved_node) ++correct;
    if (r.identified_node_naive == r.moved_node) ++naive_correct;
  }
  const double rate = detected ? static_cast<double>(correct) / detected : 0.0;
  report(5, detected > 0 && rate >= 0.6,
         fmt("%d/%d detected trials identified (%.2f); naive suspect right in %d", correct, detected, rate,
             naive_correct));
}

// ------------------------------------------------------------- 6 to 11

using Raw = std::vector<std::vector<std::vector<double>>>;

Raw raw_points(const TrainingSet& t) {
  Raw out;
  for (const auto& p : t.points()) {
    std::vector<std::vector<double>> nodes;
    for (const auto& f : p) nodes.emplace_back(f.values.data(), f.values.data() + f.values.size());
    out.push_back(nodes);
  }
  return out;
}

std::vector<std::vector<double>> raw(const NodeFeatures& f) {
  std::vector<std::vector<double>> out;
  for (const auto& n : f) out.emplace_back(n.values.data(), n.values.data() + n.values.size());
  return out;
}

double oracle_cov(const Raw& pts, const std::vector<std::vector<double>>& a, const std::vector<std::vector<double>>& b,
                  const std::vector<int>& nodes, const std::vector<double>& eps) {
  double s = 0.0;
  for (const auto& d : pts) {
    const Raw pa{a, d}, pb{b, d};
    s += oracle::avg_kernel(pa, 0, 1, nodes, eps) * oracle::avg_kernel(pb, 0, 1, nodes, eps);
  }
  return s;
}

void gp_oracle() {
  std::mt19937_64 rng(606);
  std::uniform_int_distribution<int> nl(1, 8), nd(0, 12);
  std::uniform_real_distribution<double> eps(2.0, 16.0);
  double worst = 0.0;
  for (int rep = 0; rep < 100; ++rep) {
    const auto n_l = static_cast<std::size_t>(nl(rng));
    const auto n_d = n_l + static_cast<std::size_t>(nd(rng));
    const auto train = fixture::random_training(rng, n_d, n_l, 3, 4);
    KernelParams p{{eps(rng), eps(rng), eps(rng)}, 1e-3 * static_cast<double>(n_d)};
    const SsgpModel model(train, p, all_nodes(3));
    const auto test = fixture::random_point(rng, 3, 4);
    const Vec3 got = estimate_position(model, test);
    const auto pts = raw_points(*train);
    std::vector<std::vector<double>> a(n_l, std::vector<double>(n_l));
    std::vector<double> b(n_l);
    Vec3 mu = Vec3::Zero();
    for (const auto& l : train->labels()) mu += l.position / static_cast<double>(n_l);
    for (std::size_t i = 0; i < n_l; ++i) {
      for (std::size_t j = 0; j < n_l; ++j)
        a[i][j] = oracle_cov(pts, pts[i], pts[j], {1, 2, 3}, p.epsilons) + (i == j ? p.sigma2 + model.jitter() : 0.0);
      b[i] = oracle_cov(pts, pts[i], raw(test), {1, 2, 3}, p.epsilons);
    }
    const auto w = oracle::gauss_solve(a, b);
    Vec3 ref = mu;
    for (std::size_t i = 0; i < n_l; ++i) ref += w[i] * (train->labels()[i].position - mu);
    worst = std::max(worst, (got - ref).cwiseAbs().maxCoeff());
  }
  report(6, worst <= 1e-9, fmt("max deviation from dense solve %.2e over 100 instances", worst));
}

void covariance_oracle() {
  std::mt19937_64 rng(707);
  std::uniform_int_distribution<int> nl(1, 8), nd(0, 12);
  double worst = 0.0, min_eig = 1e300;
  for (int rep = 0; rep < 100; ++rep) {
    const auto n_l = static_cast<std::size_t>(nl(rng));
    const auto train = fixture::random_training(rng, n_l + static_cast<std::size_t>(nd(rng)), n_l, 4, 5);
    const KernelParams p{{5.0, 7.0, 9.0, 11.0}, 0.0};
    const std::vector<int> subset = rep % 2 ? std::vector<int>{1, 2, 3, 4} : std::vector<int>{2, 4};
    const SsgpModel model(train, p, subset);
    const auto pts = raw_points(*train);
    for (std::size_t i = 0; i < n_l; ++i)
      for (std::size_t j = 0; j < n_l; ++j)
        worst = std::max(worst, std::abs(model.sigma_l()(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) -
                                         oracle_cov(pts, pts[i], pts[j], subset, p.epsilons)));
    const auto test = fixture::random_point(rng, 4, 5);
    const auto c = test_covariance(model, test);
    for (std::size_t i = 0; i < n_l; ++i)
      worst = std::max(worst, std::abs(c(static_cast<Eigen::Index>(i)) - oracle_cov(pts, pts[i], raw(test), subset, p.epsilons)));
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(model.sigma_l(), Eigen::EigenvaluesOnly);
    min_eig = std::min(min_eig, eig.eigenvalues().minCoeff());
  }
  report(7, worst <= 1e-12 && min_eig >= -1e-10,
         fmt("max deviation %.2e, smallest eigenvalue %.2e", worst, min_eig));
}

std::vector<std::array<double, 3>> arr(const std::vector<ClassVector>& l) {
  std::vector<std::array<double, 3>> out;
  for (const auto& v : l) out.push_back({v(0), v(1), v(2)});
  return out;
}

std::array<std::array<double, 3>, 3> arr(const Eigen::Matrix3d& m) {
  std::array<std::array<double, 3>, 3> a{};
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) a[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = m(i, j);
  return a;
}

void bp_oracle(const Stage& st) {
  std::mt19937_64 rng(808);
  std::uniform_real_distribution<double> u(0.01, 2.0);
  double worst2 = 0.0;
  for (int rep = 0; rep < 200; ++rep) {
    Eigen::Matrix3d psi;
    for (int r = 0; r < 3; ++r)
      for (int c = r; c < 3; ++c) psi(r, c) = psi(c, r) = u(rng);
    std::vector<ClassVector> l{ClassVector(u(rng), u(rng), u(rng)), ClassVector(u(rng), u(rng), u(rng))};
    const auto bp = run_belief_propagation(l, {psi});
    const auto ref = oracle::enumerate_marginals(arr(l), arr(psi));
    for (std::size_t m = 0; m < 2; ++m)
      for (int c = 0; c < 3; ++c)
        worst2 = std::max(worst2, std::abs(bp.posteriors.p[m](c) - ref[m][static_cast<std::size_t>(c)]));
  }

  // Parameters drawn around the calibrated detectors; errors drawn from a
  // random class per sub-network.
  std::uniform_int_distribution<int> pick(0, static_cast<int>(kT60s.size()) - 1);
  std::uniform_real_distribution<double> jitter(0.5, 2.0);
  std::uniform_int_distribution<int> cls(0, 2);
  int close = 0;
  for (int rep = 0; rep < 1000; ++rep) {
    const auto& base = st.configs.at(kT60s[static_cast<std::size_t>(pick(rng))]);
    PriorParams prior = base.prior;
    prior.sigma2_align *= jitter(rng);
    prior.lambda *= jitter(rng);
    Eigen::Matrix3d psi = base.psi.psi;
    for (int r = 0; r < 3; ++r)
      for (int c = r; c < 3; ++c) psi(r, c) = psi(c, r) = psi(r, c) * jitter(rng);
    std::normal_distribution<double> n(0.0, std::sqrt(prior.sigma2_align));
    std::exponential_distribution<double> ex(prior.lambda);
    std::uniform_real_distribution<double> un(0.0, prior.e_max);
    ErrorVector e;
    for (int m = 0; m < 4; ++m) {
      const int k = cls(rng);
      const double v = k == 0 ? std::abs(n(rng)) : k == 1 ? ex(rng) : un(rng);
      e.e.push_back(std::min(v, prior.e_max));
    }
    std::vector<ClassVector> l;
    for (double v : e.e) l.push_back(likelihood_vector(v, prior));
    const auto bp = run_belief_propagation(e, prior, {psi});
    const auto ref = oracle::enumerate_marginals(arr(l), arr(psi));
    double tv = 0.0;
    for (std::size_t m = 0; m < 4; ++m) {
      double d = 0.0;
      for (int c = 0; c < 3; ++c) d += std::abs(bp.posteriors.p[m](c) - ref[m][static_cast<std::size_t>(c)]);
      tv = std::max(tv, 0.5 * d);
    }
    if (tv <= 0.05) ++close;
  }
  report(8, worst2 <= 1e-10 && close >= 950,
         fmt("M=2 max deviation %.2e; M=4 within TV 0.05 on %d/1000", worst2, close));
}

void prior_normalization() {
  double worst = 0.0, closed = 0.0;
  for (const PriorParams p : {PriorParams{0.01, 1.0, 3.0}, PriorParams{0.0037, 1.15, 2.6}, PriorParams{0.1, 3.0, 1.5}}) {
    const double s = std::sqrt(p.sigma2_align);
    const double a =
        oracle::simpson([&](double e) { return prior_density(e, LatentClass::Aligned, p); }, 0.0, 40.0 * s, 20000);
    const double m =
        oracle::simpson([&](double e) { return prior_density(e, LatentClass::Misaligned, p); }, 0.0, p.e_max, 20000);
    const double u =
        oracle::simpson([&](double e) { return prior_density(e, LatentClass::Unreliable, p); }, 0.0, p.e_max, 20000);
    worst = std::max({worst, std::abs(a - 1.0), std::abs(m - 1.0), std::abs(u - 1.0)});
    for (double e : {0.0, p.e_max / 2.0, p.e_max}) {
      const auto l = likelihood_vector(e, p);
      const double ca = 2.0 / std::sqrt(2.0 * std::numbers::pi * p.sigma2_align) * std::exp(-e * e / (2.0 * p.sigma2_align));
      const double cm = p.lambda * std::exp(-p.lambda * e) / (1.0 - std::exp(-p.lambda * p.e_max));
      const double cu = 1.0 / p.e_max;
      closed = std::max({closed, std::abs(l(0) - ca) / std::max(ca, 1e-300), std::abs(l(1) - cm) / cm,
                         std::abs(l(2) - cu) / cu});
    }
  }
  report(9, worst <= 1e-6 && closed <= 1e-12,
         fmt("max |mass - 1| %.2e; max relative closed-form deviation %.2e", worst, closed));
}

void ipfp_oracle() {
  std::mt19937_64 rng(909);
  std::uniform_real_distribution<double> u(0.05, 5.0);
  double worst = 0.0;
  for (int rep = 0; rep < 100; ++rep) {
    Eigen::Matrix3d seed;
    ClassVector row, col;
    for (int r = 0; r < 3; ++r) {
      row(r) = u(rng);
      col(r) = u(rng);
      for (int c = 0; c < 3; ++c) seed(r, c) = u(rng);
    }
    row /= row.sum();
    col /= col.sum();
    const auto p = fit_transition_ipfp(seed, row, col).psi.psi;
    worst = std::max({worst, (p.rowwise().sum() - row).cwiseAbs().maxCoeff(),
                      (p.colwise().sum().transpose() - col).cwiseAbs().maxCoeff()});
  }
  Eigen::Matrix3d q;
  q << 0.2, 0.05, 0.05, 0.05, 0.3, 0.05, 0.05, 0.05, 0.2;
  const auto fixed = fit_transition_ipfp(q, q.rowwise().sum(), q.colwise().sum().transpose());
  const double drift = (fixed.psi.psi - q).cwiseAbs().maxCoeff();
  report(10, worst <= 1e-8 && drift <= 1e-15 && fixed.iterations <= 1,
         fmt("max marginal residual %.2e; fixed point moved by %.1e in %d iteration(s)", worst, drift, fixed.iterations));
}

void auc_oracle() {
  std::mt19937_64 rng(1010);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  double worst = 0.0;
  for (int rep = 0; rep < 100; ++rep) {
    std::vector<double> s(60);
    std::vector<bool> p(60);
    for (std::size_t i = 0; i < s.size(); ++i) {
      p[i] = i % 3 == 0;
      s[i] = u(rng) + (p[i] ? 0.3 : 0.0);
    }
    worst = std::max(worst, std::abs(roc_curve(s, p).auc - oracle::pair_auc(s, p)));
  }
  report(11, worst <= 1e-9, fmt("max |trapezoid - pair count| %.2e", worst));
}

// ------------------------------------------------------------- 12 to 14

void rir_physics() {
  std::mt19937_64 rng(1212);
  std::uniform_real_distribution<double> ux(0.5, 5.5), uz(0.5, 2.5);
  int delays_ok = 0, delays = 0;
  for (int rep = 0; rep < 20; ++rep) {
    RoomSpec room;
    room.t60 = rep % 2 ? 0.0 : 0.4;
    const Vec3 s(ux(rng), ux(rng), uz(rng)), m(ux(rng), ux(rng), uz(rng));
    const auto h = simulate_rir(room, s, m).taps;
    std::size_t peak = 0;
    for (std::size_t i = 1; i < h.size(); ++i)
      if (std::abs(h[i]) > std::abs(h[peak])) peak = i;
    const double expected = (s - m).norm() / room.speed_of_sound * room.sample_rate;
    ++delays;
    if (std::abs(static_cast<double>(peak) - expected) <= 1.0) ++delays_ok;
  }
  bool decay_ok = true;
  std::string detail;
  const std::array<std::pair<Vec3, Vec3>, 3> geometry{{{Vec3(2.5, 3.2, 1.4), Vec3(1.0, 1.0, 1.5)},
                                                       {Vec3(3.0, 3.0, 1.5), Vec3(5.0, 5.0, 1.5)},
                                                       {Vec3(4.1, 2.2, 1.2), Vec3(1.0, 5.0, 1.5)}}};
  for (double t60 : kT60s) {
    detail += fmt("t60 %.1f:", t60);
    for (const auto& [s, m] : geometry) {
      RoomSpec room;
      room.t60 = t60;
      const double measured = oracle::schroeder_t60(simulate_rir(room, s, m).taps, room.sample_rate);
      decay_ok = decay_ok && std::abs(measured - t60) <= 0.1 * t60;
      detail += fmt(" %.3f", measured);
    }
    detail += "; ";
  }
  report(12, delays_ok == delays && decay_ok, fmt("direct path within 1 sample %d/%d; Schroeder ", delays_ok, delays) + detail);
}

void exclusion_soundness(const Stage& st) {
  const auto& sys = st.systems.at(0.2);
  const auto& sc = sys.scenario;
  const auto n = static_cast<std::size_t>(sc.test_seconds * sc.room.sample_rate);
  int exact = 0, total = 0;
  for (int j = 1; j <= 4; ++j) {
    const Vec3 src(2.6 + 0.2 * j, 3.3 - 0.1 * j, 1.5);
    const auto sig = speech_like(n, sc.room.sample_rate, static_cast<std::uint64_t>(j));
    const auto pre = observe(sc, sc.nodes, src, sig, 40 + static_cast<std::uint64_t>(j));
    auto moved_nodes = sc.nodes;
    auto& node = moved_nodes[static_cast<std::size_t>(j - 1)];
    node = displace_node(node, Vec3(j % 2 ? 0.5 : -0.5, 0.3, 0.0), 1.0);
    const auto moved = observe(sc, moved_nodes, src, sig, 40 + static_cast<std::uint64_t>(j));
    auto post = pre;
    post[static_cast<std::size_t>(j - 1)] = moved[static_cast<std::size_t>(j - 1)];
    const auto e = compute_error_vector(record_baseline(sys.ensemble, pre), post);
    ++total;
    if (e.e[static_cast<std::size_t>(j - 1)] == 0.0) ++exact;
  }
  report(13, exact == total, fmt("e_j == 0 exactly in %d/%d displacements", exact, total));
}

void determinism(const Stage& st) {
  SweepSpec spec;
  spec.t60s = kT60s;
  spec.shifts = standard_shift_grid();
  spec.trials_per_cell = 2;
  spec.base_seed = 1414;
  auto csv = [&](int j) {
    std::ostringstream os;
    write_trial_csv_header(os, 4);
    run_sweep(spec, st.lookup(), j, [&](const TrialRecord& r) { write_trial_csv_row(os, r); });
    return os.str();
  };
  const auto a = csv(1);
  const auto b = csv(1);
  const auto c = csv(std::max(2, jobs()));
  const auto d = csv(3);
  report(14, a == b && a == c && a == d,
         fmt("%zu-byte CSV, %zu records: repeat %s, jobs %d %s, jobs 3 %s", a.size(),
             static_cast<std::size_t>(std::count(a.begin(), a.end(), '\n') - 1), a == b ? "identical" : "differs",
             std::max(2, jobs()), a == c ? "identical" : "differs", a == d ? "identical" : "differs"));
}

}  // namespace

int main() {
  const auto t0 = Clock::now();
  info(fmt("desk preset, %d worker thread(s)", jobs()));
  gp_oracle();
  covariance_oracle();
  prior_normalization();
  ipfp_oracle();
  auc_oracle();
  rir_physics();

  const auto st = prepare();
  bp_oracle(st);
  exclusion_soundness(st);
  localization_and_detection(st);
  auc_comparison(st);
  identification(st);
  determinism(st);
  int failures = 0;
  for (const auto& [id, r] : results) {
    std::printf("criterion %2d: %s  %s\n", id, r.first ? "PASS" : "FAIL", r.second.c_str());
    if (!r.first) ++failures;
  }
  info(fmt("total %.0f s, %d criterion failure(s)", seconds_since(t0), failures));
  return failures == 0 ? 0 : 1;
}
