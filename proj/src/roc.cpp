#include <algorithm>
#include <cmath>
#include <numeric>

#include "asn/error.hpp"
#include "asn/experiments.hpp"

namespace asn {
namespace {

void check_classes(const std::vector<double>& scores, const std::vector<bool>& positive) {
  if (scores.size() != positive.size()) throw Error(ErrorKind::Dimension, "scores and labels differ in length");
  const auto pos = std::count(positive.begin(), positive.end(), true);
  if (pos == 0 || pos == static_cast<std::ptrdiff_t>(positive.size()))
    throw Error(ErrorKind::UndefinedAuc, "AUC needs both positive and negative trials");
  for (double s : scores)
    if (std::isnan(s)) throw Error(ErrorKind::Domain, "score is NaN");
}

std::vector<double> average_ranks(const std::vector<double>& x) {
  std::vector<std::size_t> order(x.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return x[a] < x[b]; });
  std::vector<double> rank(x.size());
  for (std::size_t i = 0; i < order.size();) {
    std::size_t j = i;
    while (j + 1 < order.size() && x[order[j + 1]] == x[order[i]]) ++j;
    const double r = 0.5 * static_cast<double>(i + j) + 1.0;
    for (std::size_t k = i; k <= j; ++k) rank[order[k]] = r;
    i = j + 1;
  }
  return rank;
}

double score_of(const TrialRecord& r, ScoreSelector s) {
  return s == ScoreSelector::MrfPFailure ? r.mrf_p_failure : r.naive_score;
}

}  // namespace

std::vector<double> mrf_threshold_sweep() {
  std::vector<double> t;
  for (int i = 0; i <= 20; ++i) t.push_back(i * 0.05);
  return t;
}

RocCurve roc_curve(const std::vector<double>& scores, const std::vector<bool>& positive,
                   std::vector<double> thresholds) {
  check_classes(scores, positive);
  if (thresholds.empty()) thresholds = scores;
  std::sort(thresholds.begin(), thresholds.end());
  thresholds.erase(std::unique(thresholds.begin(), thresholds.end()), thresholds.end());

  const double n_pos = static_cast<double>(std::count(positive.begin(), positive.end(), true));
  const double n_neg = static_cast<double>(positive.size()) - n_pos;
  RocCurve curve;
  for (double t : thresholds) {
    double tp = 0.0, fp = 0.0;
    for (std::size_t i = 0; i < scores.size(); ++i) {
      if (scores[i] < t) continue;
      (positive[i] ? tp : fp) += 1.0;
    }
    curve.points.push_back({t, fp / n_neg, tp / n_pos});
  }

  std::vector<std::pair<double, double>> xy{{0.0, 0.0}, {1.0, 1.0}};
  for (const auto& p : curve.points) xy.emplace_back(p.fpr, p.tpr);
  std::sort(xy.begin(), xy.end());
  for (std::size_t i = 1; i < xy.size(); ++i)
    curve.auc += (xy[i].first - xy[i - 1].first) * 0.5 * (xy[i].second + xy[i - 1].second);
  return curve;
}

double rank_auc(const std::vector<double>& scores, const std::vector<bool>& positive) {
  check_classes(scores, positive);
  const auto rank = average_ranks(scores);
  double n_pos = 0.0, sum = 0.0;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    if (!positive[i]) continue;
    n_pos += 1.0;
    sum += rank[i];
  }
  const double n_neg = static_cast<double>(scores.size()) - n_pos;
  return (sum - n_pos * (n_pos + 1.0) / 2.0) / (n_pos * n_neg);
}

RocCurve compute_roc(const std::vector<TrialRecord>& records, ScoreSelector selector,
                     std::optional<std::vector<double>> thresholds) {
  std::vector<double> s;
  std::vector<bool> p;
  for (const auto& r : records) {
    s.push_back(score_of(r, selector));
    p.push_back(r.true_moved);
  }
  if (!thresholds) thresholds = selector == ScoreSelector::MrfPFailure ? mrf_threshold_sweep() : std::vector<double>{};
  return roc_curve(s, p, *thresholds);
}

double compute_rank_auc(const std::vector<TrialRecord>& records, ScoreSelector selector) {
  std::vector<double> s;
  std::vector<bool> p;
  for (const auto& r : records) {
    s.push_back(score_of(r, selector));
    p.push_back(r.true_moved);
  }
  return rank_auc(s, p);
}

double spearman(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) throw Error(ErrorKind::Dimension, "spearman needs two equal series");
  const auto rx = average_ranks(x);
  const auto ry = average_ranks(y);
  const double mx = std::accumulate(rx.begin(), rx.end(), 0.0) / static_cast<double>(rx.size());
  const double my = std::accumulate(ry.begin(), ry.end(), 0.0) / static_cast<double>(ry.size());
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < rx.size(); ++i) {
    sxy += (rx[i] - mx) * (ry[i] - my);
    sxx += (rx[i] - mx) * (rx[i] - mx);
    syy += (ry[i] - my) * (ry[i] - my);
  }
  if (sxx == 0.0 || syy == 0.0) return 0.0;
  return sxy / std::sqrt(sxx * syy);
}

}  // namespace asn
