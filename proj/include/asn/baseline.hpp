#pragma once

#include <optional>
#include <vector>

#include "asn/lono.hpp"

namespace asn {

struct NaiveConfig {
  double threshold = 0.1;  // meters
  void validate() const;
};

struct NaiveResult {
  bool detected = false;
  std::optional<int> suspected_node;
  double score = 0.0;
  std::vector<double> deviations;  // e_m minus mean of the others
};

/// Flags movement when some sub-network deviates from the mean of the
/// others by more than the threshold. The suspect is the node excluded by
/// the least-deviating sub-network.
NaiveResult naive_detect(const ErrorVector& e, const NaiveConfig& config);

/// Threshold = mean over positive trials of how far the sub-network that
/// excludes the moved node sits below the mean of the others.
/// `moved_nodes` holds 1-based node ids.
NaiveConfig calibrate_naive_threshold(const std::vector<ErrorVector>& positives, const std::vector<int>& moved_nodes);

}  // namespace asn
