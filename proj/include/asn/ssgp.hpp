#pragma once

#include <compare>
#include <memory>
#include <utility>
#include <vector>

#include <Eigen/Cholesky>
#include <Eigen/Core>

#include "asn/acoustics.hpp"
#include "asn/features.hpp"

namespace asn {

/// Features of one observation at every node; entry i belongs to node id
/// i + 1. An entry with empty values counts as missing.
using NodeFeatures = std::vector<RtfFeature>;

/// Sorted node ids (1-based).
using NodeSubset = std::vector<int>;

NodeSubset all_nodes(std::size_t num_nodes);

struct LabelledPoint {
  std::size_t index = 0;  // into TrainingSet::points
  Vec3 position = Vec3::Zero();
};

/// Labelled and unlabelled training RTFs. Immutable once built; per-node
/// feature matrices are cached for kernel evaluation.
class TrainingSet {
 public:
  TrainingSet(std::vector<NodeFeatures> points, std::vector<LabelledPoint> labels);

  std::size_t num_points() const { return points_.size(); }
  std::size_t num_labelled() const { return labels_.size(); }
  std::size_t num_unlabelled() const { return points_.size() - labels_.size(); }
  std::size_t num_nodes() const { return node_matrices_.size(); }

  const std::vector<NodeFeatures>& points() const { return points_; }
  const std::vector<LabelledPoint>& labels() const { return labels_; }

  /// Rows are training points, columns feature dimensions, for node id `node`.
  const Eigen::MatrixXd& node_matrix(int node) const {
    return node_matrices_[static_cast<std::size_t>(node - 1)];
  }

 private:
  std::vector<NodeFeatures> points_;
  std::vector<LabelledPoint> labels_;
  std::vector<Eigen::MatrixXd> node_matrices_;
};

struct KernelParams {
  std::vector<double> epsilons;  // per node id, index = id - 1
  double sigma2 = 0.0;

  void validate(std::size_t num_nodes) const;
  auto operator<=>(const KernelParams&) const = default;
};

/// Gaussian kernel exp(-|a - b|^2 / epsilon).
double kernel(const RtfFeature& a, const RtfFeature& b, double epsilon);
double kernel(const Eigen::VectorXd& a, const Eigen::VectorXd& b, double epsilon);

struct SsgpOptions {
  /// Solve against mean-centred labels and add the mean back.
  bool center_labels = true;
};

/// Conditional-mean GP localizer restricted to a node subset.
class SsgpModel {
 public:
  SsgpModel(std::shared_ptr<const TrainingSet> train, KernelParams params, NodeSubset subset,
            SsgpOptions options = {});

  const NodeSubset& node_subset() const { return subset_; }
  const KernelParams& params() const { return params_; }
  const TrainingSet& training() const { return *train_; }
  std::shared_ptr<const TrainingSet> training_ptr() const { return train_; }
  const SsgpOptions& options() const { return options_; }

  /// Labelled covariance (without the sigma2 ridge).
  const Eigen::MatrixXd& sigma_l() const { return sigma_l_; }
  /// Node-averaged affinities between labelled points (rows) and all
  /// training points (columns); sigma_l() == affinity() * affinity()^T.
  const Eigen::MatrixXd& affinity() const { return affinity_; }
  const Eigen::MatrixXd& labelled_positions() const { return labels_; }
  /// Diagonal jitter added on top of sigma2 to make the factorization succeed.
  double jitter() const { return jitter_; }

  /// Node-averaged affinities between a test observation and all training points.
  Eigen::VectorXd test_affinity(const NodeFeatures& test) const;
  Eigen::VectorXd test_covariance(const NodeFeatures& test) const;
  /// (sigma_L + sigma2 I)^-1 applied to a test covariance vector.
  Eigen::VectorXd solve_weights(const Eigen::VectorXd& test_cov) const;
  Vec3 estimate(const NodeFeatures& test) const;
  Vec3 estimate_from_covariance(const Eigen::VectorXd& test_cov) const;

 private:
  std::shared_ptr<const TrainingSet> train_;
  KernelParams params_;
  NodeSubset subset_;
  SsgpOptions options_;
  Eigen::MatrixXd affinity_;
  Eigen::MatrixXd sigma_l_;
  Eigen::LLT<Eigen::MatrixXd> llt_;
  Eigen::MatrixXd labels_;  // n_L x 3
  Vec3 label_mean_ = Vec3::Zero();
  double jitter_ = 0.0;
};

SsgpModel build_covariance(std::shared_ptr<const TrainingSet> train, const KernelParams& params,
                           const NodeSubset& subset, SsgpOptions options = {});
Eigen::VectorXd test_covariance(const SsgpModel& model, const NodeFeatures& test);
Vec3 estimate_position(const SsgpModel& model, const NodeFeatures& test);

struct ValidationPoint {
  NodeFeatures features;
  Vec3 position = Vec3::Zero();
};

/// Per-node median of pairwise squared feature distances over the training set.
std::vector<double> median_heuristic(const TrainingSet& train);

inline constexpr double kEpsilonMultipliers[] = {0.5, 1.0, 2.0, 4.0, 8.0, 16.0, 32.0};
inline constexpr double kSigma2Multipliers[] = {1e-12, 1e-9, 1e-6, 1e-4, 1e-2};

/// Median-heuristic widths scaled by a shared multiplier, crossed with
/// sigma2 as a fraction of the mean diagonal of sigma_L.
std::vector<KernelParams> default_grid(std::shared_ptr<const TrainingSet> train);

double mean_localization_error(const SsgpModel& model, const std::vector<ValidationPoint>& validation);

/// Grid point with the smallest mean validation error over the full node
/// set; ties resolve to the lexicographically smaller candidate.
KernelParams tune_hyperparameters(std::shared_ptr<const TrainingSet> train,
                                  const std::vector<ValidationPoint>& validation,
                                  std::vector<KernelParams> grid, SsgpOptions options = {});
KernelParams tune_hyperparameters(std::shared_ptr<const TrainingSet> train,
                                  const std::vector<ValidationPoint>& validation,
                                  SsgpOptions options = {});

}  // namespace asn
