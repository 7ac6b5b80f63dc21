#include "asn/lono.hpp"

#include "asn/error.hpp"

namespace asn {

LonoEnsemble::LonoEnsemble(std::vector<std::shared_ptr<const SsgpModel>> models) : models_(std::move(models)) {}

const std::vector<Vec3>& LonoEnsemble::baselines() const {
  if (!baselines_) throw Error(ErrorKind::State, "no baseline estimates recorded");
  return *baselines_;
}

std::vector<Vec3> LonoEnsemble::estimates(const NodeFeatures& features) const {
  std::vector<Vec3> out;
  out.reserve(models_.size());
  for (std::size_t m = 0; m < models_.size(); ++m) {
    try {
      out.push_back(models_[m]->estimate(features));
    } catch (const Error& e) {
      throw Error(e.kind(), "sub-network " + std::to_string(m + 1) + ": " + e.what());
    }
  }
  return out;
}

LonoEnsemble LonoEnsemble::with_baselines(std::vector<Vec3> baselines) const {
  if (baselines.size() != models_.size()) throw Error(ErrorKind::Dimension, "one baseline per sub-network required");
  for (const auto& b : baselines)
    if (!b.allFinite()) throw Error(ErrorKind::NumericalConditioning, "baseline estimate is not finite");
  LonoEnsemble out = *this;
  out.baselines_ = std::move(baselines);
  return out;
}

LonoEnsemble build_ensemble(std::shared_ptr<const TrainingSet> train, const KernelParams& params,
                            SsgpOptions options) {
  const std::size_t m = train->num_nodes();
  if (m < kMinLonoNodes)
    throw Error(ErrorKind::Config, "LONO detection needs at least 3 nodes, got " + std::to_string(m));
  std::vector<std::shared_ptr<const SsgpModel>> models;
  for (std::size_t excluded = 1; excluded <= m; ++excluded) {
    NodeSubset subset;
    for (std::size_t node = 1; node <= m; ++node)
      if (node != excluded) subset.push_back(static_cast<int>(node));
    try {
      models.push_back(std::make_shared<const SsgpModel>(train, params, subset, options));
    } catch (const Error& e) {
      throw Error(e.kind(), "sub-network " + std::to_string(excluded) + ": " + e.what());
    }
  }
  return LonoEnsemble(std::move(models));
}

LonoEnsemble record_baseline(const LonoEnsemble& ensemble, const NodeFeatures& features) {
  return ensemble.with_baselines(ensemble.estimates(features));
}

ErrorVector error_vector(const std::vector<Vec3>& before, const std::vector<Vec3>& after) {
  if (before.size() != after.size()) throw Error(ErrorKind::Dimension, "estimate counts differ");
  ErrorVector out;
  out.e.reserve(before.size());
  for (std::size_t m = 0; m < before.size(); ++m) out.e.push_back((before[m] - after[m]).norm());
  return out;
}

ErrorVector compute_error_vector(const LonoEnsemble& ensemble, const NodeFeatures& post) {
  return error_vector(ensemble.baselines(), ensemble.estimates(post));
}

}  // namespace asn
