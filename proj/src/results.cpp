#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <ostream>
#include <sstream>

#include "asn/error.hpp"
#include "asn/experiments.hpp"

namespace asn {
namespace {

std::string num(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

std::string opt(const std::optional<int>& v) { return v ? std::to_string(*v) : std::string(); }

struct Stat {
  double sum = 0.0, sq = 0.0;
  std::size_t n = 0;
  void add(double v) {
    sum += v;
    sq += v * v;
    ++n;
  }
  double mean() const { return n ? sum / static_cast<double>(n) : std::nan(""); }
  double stderr_() const {
    if (n < 2) return 0.0;
    const double m = mean();
    const double var = std::max(0.0, (sq - static_cast<double>(n) * m * m) / static_cast<double>(n - 1));
    return std::sqrt(var / static_cast<double>(n));
  }
};

std::string t60_tag(double t60) {
  std::ostringstream os;
  os.precision(3);
  os << std::fixed << t60;
  return os.str();
}

void write_tsv(const std::filesystem::path& path, const std::map<double, Stat>& series) {
  std::ofstream os(path);
  if (!os) throw Error(ErrorKind::Io, "cannot write " + path.string());
  os << "# x\ty\tstderr\n";
  for (const auto& [x, s] : series) os << num(x) << '\t' << num(s.mean()) << '\t' << num(s.stderr_()) << '\n';
}

}  // namespace

void write_trial_csv_header(std::ostream& os, std::size_t num_nodes) {
  os << "# asn-trials v" << kTrialCsvVersion << '\n';
  os << "trial_id,seed,t60,shift_size,rotation,heading,moved_node,true_moved,source_x,source_y,source_z";
  for (std::size_t m = 1; m <= num_nodes; ++m) os << ",e_" << m;
  os << ",mrf_p_failure,mrf_detected,identified_node_mrf,naive_score,naive_detected,identified_node_naive,"
        "static_error,localization_error,resamples\n";
}

void write_trial_csv_row(std::ostream& os, const TrialRecord& r) {
  os << r.trial_id << ',' << r.seed << ',' << num(r.t60) << ',' << num(r.shift_size) << ',' << num(r.rotation) << ','
     << num(r.heading) << ',' << r.moved_node << ',' << (r.true_moved ? 1 : 0) << ',' << num(r.source.x()) << ','
     << num(r.source.y()) << ',' << num(r.source.z());
  for (double e : r.error_vector.e) os << ',' << num(e);
  os << ',' << num(r.mrf_p_failure) << ',' << (r.mrf_detected ? 1 : 0) << ',' << opt(r.identified_node_mrf) << ','
     << num(r.naive_score) << ',' << (r.naive_detected ? 1 : 0) << ',' << opt(r.identified_node_naive) << ','
     << num(r.static_error) << ',' << num(r.localization_error) << ',' << r.resamples << '\n';
}

nlohmann::json summarize(const SweepSpec& spec, const std::vector<TrialRecord>& records) {
  nlohmann::json j;
  j["schema"] = "asn-summary";
  j["version"] = 1;
  j["base_seed"] = spec.base_seed;
  j["trials_per_cell"] = spec.trials_per_cell;
  j["t60s"] = spec.t60s;
  j["shifts"] = spec.shifts;
  j["pool_shifts"] = spec.pool_shifts;
  j["records"] = records.size();

  std::map<std::pair<double, double>, std::array<Stat, 4>> cells;  // p_failure, loc error (positives), static, correct id
  std::map<double, std::vector<TrialRecord>> by_t60;
  for (const auto& r : records) {
    by_t60[r.t60].push_back(r);
    auto& c = cells[{r.t60, spec.pool_shifts ? -1.0 : r.shift_size}];
    c[2].add(r.static_error);
    if (!r.true_moved) continue;
    c[0].add(r.mrf_p_failure);
    c[1].add(r.localization_error);
    if (r.mrf_detected) c[3].add(r.identified_node_mrf == r.moved_node ? 1.0 : 0.0);
  }
  j["cells"] = nlohmann::json::array();
  for (const auto& [key, c] : cells) {
    nlohmann::json cell{{"t60", key.first},
                        {"positives", c[0].n},
                        {"mean_p_failure", c[0].n ? nlohmann::json(c[0].mean()) : nlohmann::json()},
                        {"mean_localization_error", c[1].n ? nlohmann::json(c[1].mean()) : nlohmann::json()},
                        {"mean_static_error", c[2].mean()},
                        {"identification_rate", c[3].n ? nlohmann::json(c[3].mean()) : nlohmann::json()}};
    cell["shift"] = spec.pool_shifts ? nlohmann::json() : nlohmann::json(key.second);
    j["cells"].push_back(cell);
  }
  j["auc"] = nlohmann::json::array();
  for (const auto& [t60, recs] : by_t60) {
    nlohmann::json a{{"t60", t60}};
    try {
      a["mrf"] = compute_roc(recs, ScoreSelector::MrfPFailure).auc;
      a["mrf_rank"] = compute_rank_auc(recs, ScoreSelector::MrfPFailure);
      a["naive"] = compute_roc(recs, ScoreSelector::NaiveScore).auc;
      a["naive_rank"] = compute_rank_auc(recs, ScoreSelector::NaiveScore);
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::UndefinedAuc) throw;
      a["error"] = e.what();
    }
    j["auc"].push_back(a);
  }
  return j;
}

void write_plot_data(const std::string& directory, const std::vector<TrialRecord>& records) {
  const std::filesystem::path dir(directory);
  std::filesystem::create_directories(dir);
  std::map<double, std::map<double, Stat>> stat_err, dyn_err, pfail;
  std::map<double, std::vector<TrialRecord>> by_t60;
  for (const auto& r : records) {
    by_t60[r.t60].push_back(r);
    stat_err[r.t60][r.shift_size].add(r.static_error);
    if (!r.true_moved) continue;
    dyn_err[r.t60][r.shift_size].add(r.localization_error);
    pfail[r.t60][r.shift_size].add(r.mrf_p_failure);
  }
  for (const auto& [t60, recs] : by_t60) {
    const auto tag = t60_tag(t60);
    write_tsv(dir / ("fig1_static_t60_" + tag + ".tsv"), stat_err[t60]);
    write_tsv(dir / ("fig1_dynamic_t60_" + tag + ".tsv"), dyn_err[t60]);
    write_tsv(dir / ("fig3_pfailure_t60_" + tag + ".tsv"), pfail[t60]);
    for (auto sel : {ScoreSelector::MrfPFailure, ScoreSelector::NaiveScore}) {
      RocCurve roc;
      try {
        roc = compute_roc(recs, sel);
      } catch (const Error& e) {
        if (e.kind() != ErrorKind::UndefinedAuc) throw;
        continue;
      }
      const auto name = std::string(sel == ScoreSelector::MrfPFailure ? "roc_mrf" : "roc_naive") + "_t60_" + tag;
      std::ofstream os(dir / (name + ".tsv"));
      if (!os) throw Error(ErrorKind::Io, "cannot write ROC data to " + dir.string());
      os << "# fpr\ttpr\tthreshold\n";
      for (const auto& p : roc.points) os << num(p.fpr) << '\t' << num(p.tpr) << '\t' << num(p.threshold) << '\n';
    }
  }
}

}  // namespace asn
