#pragma once

#include <memory>
#include <optional>
#include <vector>

#include "asn/ssgp.hpp"

namespace asn {

inline constexpr std::size_t kMinLonoNodes = 3;

/// Discrepancies between pre- and post-movement estimates; entry i belongs
/// to the sub-network that excludes node id i + 1.
struct ErrorVector {
  std::vector<double> e;
  std::size_t size() const { return e.size(); }
};

/// One SSGP model per leave-one-node-out sub-network, plus the estimates
/// each recorded before any movement.
class LonoEnsemble {
 public:
  LonoEnsemble() = default;
  explicit LonoEnsemble(std::vector<std::shared_ptr<const SsgpModel>> models);

  std::size_t size() const { return models_.size(); }
  /// Model of the sub-network that excludes `node` (1-based).
  const SsgpModel& excluding(int node) const { return *models_[static_cast<std::size_t>(node - 1)]; }
  const std::vector<std::shared_ptr<const SsgpModel>>& models() const { return models_; }

  bool has_baselines() const { return baselines_.has_value(); }
  const std::vector<Vec3>& baselines() const;

  /// Estimates of every sub-network on one observation.
  std::vector<Vec3> estimates(const NodeFeatures& features) const;

  LonoEnsemble with_baselines(std::vector<Vec3> baselines) const;

 private:
  std::vector<std::shared_ptr<const SsgpModel>> models_;
  std::optional<std::vector<Vec3>> baselines_;
};

LonoEnsemble build_ensemble(std::shared_ptr<const TrainingSet> train, const KernelParams& params,
                            SsgpOptions options = {});

LonoEnsemble record_baseline(const LonoEnsemble& ensemble, const NodeFeatures& features);

ErrorVector compute_error_vector(const LonoEnsemble& ensemble, const NodeFeatures& post);

/// Error vector from explicit pre/post estimates.
ErrorVector error_vector(const std::vector<Vec3>& before, const std::vector<Vec3>& after);

}  // namespace asn
