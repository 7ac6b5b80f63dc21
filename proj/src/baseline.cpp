#include "asn/baseline.hpp"

#include <algorithm>
#include <cmath>

#include "asn/error.hpp"

namespace asn {
namespace {

double mean_of_others(const std::vector<double>& e, std::size_t skip, double total) {
  return (total - e[skip]) / static_cast<double>(e.size() - 1);
}

}  // namespace

void NaiveConfig::validate() const {
  if (!(threshold > 0.0) || !std::isfinite(threshold))
    throw Error(ErrorKind::Domain, "naive threshold must be > 0");
}

NaiveResult naive_detect(const ErrorVector& e, const NaiveConfig& config) {
  config.validate();
  if (e.size() < 2) throw Error(ErrorKind::Dimension, "naive detector needs at least two sub-networks");
  double total = 0.0;
  for (double v : e.e) total += v;
  NaiveResult out;
  out.deviations.resize(e.size());
  for (std::size_t m = 0; m < e.size(); ++m) out.deviations[m] = e.e[m] - mean_of_others(e.e, m, total);
  out.score = *std::max_element(out.deviations.begin(), out.deviations.end());
  out.detected = out.score > config.threshold;
  if (out.detected) {
    const auto it = std::min_element(out.deviations.begin(), out.deviations.end());
    out.suspected_node = static_cast<int>(it - out.deviations.begin()) + 1;
  }
  return out;
}

NaiveConfig calibrate_naive_threshold(const std::vector<ErrorVector>& positives, const std::vector<int>& moved_nodes) {
  if (positives.empty() || positives.size() != moved_nodes.size())
    throw Error(ErrorKind::InsufficientData, "naive calibration needs positive trials with known moved nodes");
  double sum = 0.0;
  for (std::size_t t = 0; t < positives.size(); ++t) {
    const auto& e = positives[t].e;
    const auto j = static_cast<std::size_t>(moved_nodes[t] - 1);
    if (j >= e.size()) throw Error(ErrorKind::Dimension, "moved node id out of range");
    double total = 0.0;
    for (double v : e) total += v;
    sum += std::abs(mean_of_others(e, j, total) - e[j]);
  }
  NaiveConfig cfg;
  cfg.threshold = std::max(sum / static_cast<double>(positives.size()), 1e-9);
  return cfg;
}

}  // namespace asn
