#include "asn/ssgp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include <Eigen/Eigenvalues>

#include "asn/error.hpp"

namespace asn {
namespace {

bool missing(const NodeFeatures& f, int node) {
  const auto i = static_cast<std::size_t>(node - 1);
  return i >= f.size() || f[i].values.size() == 0;
}

const Eigen::VectorXd& feature_of(const NodeFeatures& f, int node) {
  return f[static_cast<std::size_t>(node - 1)].values;
}

// Kernel row between one feature vector and every training point of a node.
Eigen::VectorXd kernel_row(const Eigen::MatrixXd& train, const Eigen::VectorXd& h, double eps) {
  if (h.size() != train.cols()) throw Error(ErrorKind::Dimension, "feature length differs from training set");
  return (-(train.rowwise() - h.transpose()).rowwise().squaredNorm().array() / eps).exp().matrix();
}

}  // namespace

NodeSubset all_nodes(std::size_t num_nodes) {
  NodeSubset s(num_nodes);
  std::iota(s.begin(), s.end(), 1);
  return s;
}

TrainingSet::TrainingSet(std::vector<NodeFeatures> points, std::vector<LabelledPoint> labels)
    : points_(std::move(points)), labels_(std::move(labels)) {
  if (labels_.empty()) throw Error(ErrorKind::InsufficientData, "training set needs at least one labelled point");
  if (points_.size() < labels_.size())
    throw Error(ErrorKind::InsufficientData, "more labels than training points");
  std::vector<bool> seen(points_.size(), false);
  for (const auto& l : labels_) {
    if (l.index >= points_.size()) throw Error(ErrorKind::Dimension, "label index out of range");
    if (seen[l.index]) throw Error(ErrorKind::Dimension, "duplicate labelled index");
    seen[l.index] = true;
  }
  const std::size_t m = points_.front().size();
  if (m == 0) throw Error(ErrorKind::InsufficientData, "training points carry no node features");
  node_matrices_.resize(m);
  for (std::size_t node = 0; node < m; ++node) {
    const auto dim = points_.front()[node].values.size();
    auto& mat = node_matrices_[node];
    mat.resize(static_cast<Eigen::Index>(points_.size()), dim);
    for (std::size_t d = 0; d < points_.size(); ++d) {
      if (points_[d].size() != m)
        throw Error(ErrorKind::IncompleteObservation, "training point " + std::to_string(d) + " lacks node features");
      const auto& v = points_[d][node].values;
      if (v.size() != dim) throw Error(ErrorKind::Dimension, "feature length differs across training points");
      mat.row(static_cast<Eigen::Index>(d)) = v.transpose();
    }
  }
}

void KernelParams::validate(std::size_t num_nodes) const {
  if (epsilons.size() != num_nodes)
    throw Error(ErrorKind::Dimension, "kernel widths do not match the node count");
  for (double e : epsilons)
    if (!(e > 0.0) || !std::isfinite(e)) throw Error(ErrorKind::Domain, "kernel width must be > 0");
  if (!(sigma2 >= 0.0) || !std::isfinite(sigma2)) throw Error(ErrorKind::Domain, "sigma2 must be >= 0");
}

double kernel(const Eigen::VectorXd& a, const Eigen::VectorXd& b, double epsilon) {
  if (a.size() != b.size()) throw Error(ErrorKind::Dimension, "kernel arguments differ in length");
  if (!(epsilon > 0.0)) throw Error(ErrorKind::Domain, "kernel width must be > 0");
  return std::exp(-(a - b).squaredNorm() / epsilon);
}

double kernel(const RtfFeature& a, const RtfFeature& b, double epsilon) {
  return kernel(a.values, b.values, epsilon);
}

SsgpModel::SsgpModel(std::shared_ptr<const TrainingSet> train, KernelParams params, NodeSubset subset,
                     SsgpOptions options)
    : train_(std::move(train)), params_(std::move(params)), subset_(std::move(subset)), options_(options) {
  params_.validate(train_->num_nodes());
  std::sort(subset_.begin(), subset_.end());
  subset_.erase(std::unique(subset_.begin(), subset_.end()), subset_.end());
  if (subset_.empty()) throw Error(ErrorKind::Config, "node subset is empty");
  for (int node : subset_)
    if (node < 1 || static_cast<std::size_t>(node) > train_->num_nodes())
      throw Error(ErrorKind::Config, "node id " + std::to_string(node) + " not in training set");

  const auto n_l = static_cast<Eigen::Index>(train_->num_labelled());
  const auto n_d = static_cast<Eigen::Index>(train_->num_points());
  const double inv_subset = 1.0 / static_cast<double>(subset_.size());

  affinity_ = Eigen::MatrixXd::Zero(n_l, n_d);
  labels_.resize(n_l, 3);
  for (Eigen::Index l = 0; l < n_l; ++l) {
    const auto& lp = train_->labels()[static_cast<std::size_t>(l)];
    labels_.row(l) = lp.position.transpose();
    for (int node : subset_) {
      const auto& mat = train_->node_matrix(node);
      const Eigen::VectorXd h = mat.row(static_cast<Eigen::Index>(lp.index)).transpose();
      affinity_.row(l) += kernel_row(mat, h, params_.epsilons[static_cast<std::size_t>(node - 1)]).transpose();
    }
  }
  affinity_ *= inv_subset;
  sigma_l_ = affinity_ * affinity_.transpose();
  if (!sigma_l_.allFinite()) throw Error(ErrorKind::NumericalConditioning, "labelled covariance is not finite");
  label_mean_ = options_.center_labels ? Vec3(labels_.colwise().mean().transpose()) : Vec3::Zero();

  Eigen::MatrixXd system = sigma_l_;
  system.diagonal().array() += params_.sigma2;
  llt_.compute(system);
  const double scale = std::max(sigma_l_.diagonal().mean(), std::numeric_limits<double>::min());
  for (double j = 1e-10; llt_.info() != Eigen::Success && j <= 1e-6 * (1 + 1e-9); j *= 10.0) {
    jitter_ = j * scale;
    Eigen::MatrixXd jittered = system;
    jittered.diagonal().array() += jitter_;
    llt_.compute(jittered);
  }
  if (llt_.info() != Eigen::Success) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(system, Eigen::EigenvaluesOnly);
    std::ostringstream os;
    os << "factorization of sigma_L + sigma2 I failed; smallest eigenvalue " << eig.eigenvalues().minCoeff();
    throw Error(ErrorKind::NumericalConditioning, os.str());
  }
}

Eigen::VectorXd SsgpModel::test_affinity(const NodeFeatures& test) const {
  Eigen::VectorXd g = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(train_->num_points()));
  for (int node : subset_) {
    if (missing(test, node))
      throw Error(ErrorKind::IncompleteObservation, "no test feature for node " + std::to_string(node));
    g += kernel_row(train_->node_matrix(node), feature_of(test, node),
                    params_.epsilons[static_cast<std::size_t>(node - 1)]);
  }
  return g / static_cast<double>(subset_.size());
}

Eigen::VectorXd SsgpModel::test_covariance(const NodeFeatures& test) const {
  return affinity_ * test_affinity(test);
}

Eigen::VectorXd SsgpModel::solve_weights(const Eigen::VectorXd& test_cov) const {
  return llt_.solve(test_cov);
}

Vec3 SsgpModel::estimate_from_covariance(const Eigen::VectorXd& test_cov) const {
  const Eigen::VectorXd w = solve_weights(test_cov);
  const Eigen::MatrixXd centred = labels_.rowwise() - label_mean_.transpose();
  return label_mean_ + centred.transpose() * w;
}

Vec3 SsgpModel::estimate(const NodeFeatures& test) const {
  return estimate_from_covariance(test_covariance(test));
}

SsgpModel build_covariance(std::shared_ptr<const TrainingSet> train, const KernelParams& params,
                           const NodeSubset& subset, SsgpOptions options) {
  return SsgpModel(std::move(train), params, subset, options);
}

Eigen::VectorXd test_covariance(const SsgpModel& model, const NodeFeatures& test) {
  return model.test_covariance(test);
}

Vec3 estimate_position(const SsgpModel& model, const NodeFeatures& test) { return model.estimate(test); }

std::vector<double> median_heuristic(const TrainingSet& train) {
  std::vector<double> out;
  for (std::size_t node = 1; node <= train.num_nodes(); ++node) {
    const auto& mat = train.node_matrix(static_cast<int>(node));
    std::vector<double> d2;
    d2.reserve(static_cast<std::size_t>(mat.rows() * (mat.rows() - 1) / 2));
    for (Eigen::Index i = 0; i < mat.rows(); ++i)
      for (Eigen::Index j = i + 1; j < mat.rows(); ++j) d2.push_back((mat.row(i) - mat.row(j)).squaredNorm());
    if (d2.empty()) {
      out.push_back(1.0);
      continue;
    }
    auto mid = d2.begin() + static_cast<std::ptrdiff_t>(d2.size() / 2);
    std::nth_element(d2.begin(), mid, d2.end());
    out.push_back(*mid > 0.0 ? *mid : 1.0);
  }
  return out;
}

std::vector<KernelParams> default_grid(std::shared_ptr<const TrainingSet> train) {
  const auto median = median_heuristic(*train);
  const auto nodes = all_nodes(train->num_nodes());
  std::vector<KernelParams> grid;
  for (double em : kEpsilonMultipliers) {
    KernelParams base;
    for (double m : median) base.epsilons.push_back(em * m);
    base.sigma2 = 1.0;  // placeholder; only sigma_L is read below
    const SsgpModel probe(train, base, nodes);
    const double diag = probe.sigma_l().diagonal().mean();
    for (double sm : kSigma2Multipliers) {
      KernelParams p = base;
      p.sigma2 = sm * diag;
      grid.push_back(std::move(p));
    }
  }
  return grid;
}

double mean_localization_error(const SsgpModel& model, const std::vector<ValidationPoint>& validation) {
  double total = 0.0;
  for (const auto& v : validation) total += (model.estimate(v.features) - v.position).norm();
  return total / static_cast<double>(validation.size());
}

KernelParams tune_hyperparameters(std::shared_ptr<const TrainingSet> train,
                                  const std::vector<ValidationPoint>& validation,
                                  std::vector<KernelParams> grid, SsgpOptions options) {
  if (validation.empty()) throw Error(ErrorKind::InsufficientData, "validation set is empty");
  if (grid.empty()) throw Error(ErrorKind::TuningFailure, "empty hyperparameter grid");
  std::sort(grid.begin(), grid.end());
  const auto nodes = all_nodes(train->num_nodes());
  const KernelParams* best = nullptr;
  double best_error = std::numeric_limits<double>::infinity();
  for (const auto& candidate : grid) {
    double err;
    try {
      const SsgpModel model(train, candidate, nodes, options);
      err = mean_localization_error(model, validation);
    } catch (const Error& e) {
      if (e.kind() == ErrorKind::NumericalConditioning) continue;
      throw;
    }
    if (std::isfinite(err) && err < best_error) {
      best_error = err;
      best = &candidate;
    }
  }
  if (best == nullptr) throw Error(ErrorKind::TuningFailure, "every grid point failed to factorize");
  return *best;
}

KernelParams tune_hyperparameters(std::shared_ptr<const TrainingSet> train,
                                  const std::vector<ValidationPoint>& validation, SsgpOptions options) {
  return tune_hyperparameters(train, validation, default_grid(train), options);
}

}  // namespace asn
