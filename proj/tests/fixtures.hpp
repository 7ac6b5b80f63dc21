#pragma once

#include <memory>
#include <random>
#include <vector>

#include "asn/experiments.hpp"
#include "asn/ssgp.hpp"

namespace fixture {

/// Small system on the standard scenario, trained once per process.
inline const asn::TrainedSystem& tiny_system() {
  static const asn::TrainedSystem sys = asn::train_system(asn::Scenario::standard(0.2), {"tiny", 30, 8}, 11);
  return sys;
}

inline asn::RtfFeature random_feature(std::mt19937_64& rng, int node, std::size_t dim) {
  std::normal_distribution<double> n(0.0, 1.0);
  asn::RtfFeature f;
  f.node_id = node;
  f.values.resize(static_cast<Eigen::Index>(dim));
  for (auto& v : f.values) v = n(rng);
  return f;
}

inline asn::NodeFeatures random_point(std::mt19937_64& rng, std::size_t nodes, std::size_t dim) {
  asn::NodeFeatures p;
  for (std::size_t m = 1; m <= nodes; ++m) p.push_back(random_feature(rng, static_cast<int>(m), dim));
  return p;
}

/// Random training set with the first n_l points labelled.
inline std::shared_ptr<const asn::TrainingSet> random_training(std::mt19937_64& rng, std::size_t n_d, std::size_t n_l,
                                                               std::size_t nodes, std::size_t dim) {
  std::uniform_real_distribution<double> u(0.0, 5.0);
  std::vector<asn::NodeFeatures> pts;
  for (std::size_t d = 0; d < n_d; ++d) pts.push_back(random_point(rng, nodes, dim));
  std::vector<asn::LabelledPoint> labels;
  for (std::size_t l = 0; l < n_l; ++l) labels.push_back({l, asn::Vec3(u(rng), u(rng), u(rng))});
  return std::make_shared<asn::TrainingSet>(std::move(pts), std::move(labels));
}

}  // namespace fixture
