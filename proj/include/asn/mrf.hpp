#pragma once

#include <optional>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "asn/lono.hpp"

namespace asn {

enum class LatentClass { Aligned = 0, Misaligned = 1, Unreliable = 2 };
inline constexpr int kNumClasses = 3;

using ClassVector = Eigen::Vector3d;

struct PriorParams {
  double sigma2_align = 0.01;  // m^2
  double lambda = 1.0;         // 1/m
  double e_max = 3.0;          // m

  void validate() const;
};

/// Pairwise potential; rows index the sender's class, columns the recipient's.
struct TransitionMatrix {
  Eigen::Matrix3d psi = Eigen::Matrix3d::Ones();

  void validate() const;
  TransitionMatrix symmetrized() const;
  static TransitionMatrix ones() { return {}; }
};

struct LatentPosterior {
  std::vector<ClassVector> p;  // entry i: sub-network excluding node i + 1
  std::size_t size() const { return p.size(); }
};

struct BpOptions {
  int max_iters = 100;
  double tol = 1e-8;
};

struct BpResult {
  LatentPosterior posteriors;
  int iterations = 0;
  bool converged = false;
};

struct DetectionResult {
  LatentPosterior posteriors;
  double p_failure = 0.0;
  bool movement_detected = false;
  std::optional<int> suspected_node;
  int iterations = 0;
  bool converged = false;
  /// Some e_m exceeded e_max and was clamped.
  bool clamped = false;
};

/// Class-conditional density of a LONO discrepancy: half-normal (aligned),
/// exponential truncated to [0, e_max] (misaligned), uniform on [0, e_max]
/// (unreliable).
double prior_density(double e, LatentClass cls, const PriorParams& params);

ClassVector likelihood_vector(double e, const PriorParams& params);

/// Sum-product message psi^T (l_sender .* incoming), normalized to sum 1.
ClassVector message(const TransitionMatrix& psi, const ClassVector& l_sender, const ClassVector& incoming);

/// Loopy sum-product on the fully connected graph with synchronous updates.
/// Non-convergence is reported through BpResult::converged.
BpResult run_belief_propagation(std::span<const ClassVector> likelihoods, const TransitionMatrix& psi,
                                BpOptions options = {});
BpResult run_belief_propagation(const ErrorVector& e, const PriorParams& params, const TransitionMatrix& psi,
                                BpOptions options = {});

inline constexpr std::size_t kMaxExactNodes = 10;

/// Exact marginals of prod_m l_m(z_m) prod_{m<m'} psi(z_m, z_m') by
/// enumerating all 3^M joint states.
LatentPosterior exact_posterior(std::span<const ClassVector> likelihoods, const TransitionMatrix& psi);
LatentPosterior exact_posterior(const ErrorVector& e, const PriorParams& params, const TransitionMatrix& psi);

/// Mean posterior probability of the misaligned class.
double failure_probability(const LatentPosterior& posteriors);

DetectionResult detect(const ErrorVector& e, const PriorParams& params, const TransitionMatrix& psi,
                       double threshold, BpOptions options = {});

inline constexpr double kSigma2Floor = 1e-6;
inline constexpr double kEmaxMargin = 1.1;

PriorParams fit_priors(std::span<const double> aligned_errors, std::span<const double> misaligned_errors);

struct IpfpResult {
  TransitionMatrix psi;
  int iterations = 0;
  /// Max marginal residual after each iteration.
  std::vector<double> residuals;
};

/// Iterative proportional fitting of a 3x3 seed to target row/column
/// marginals (each summing to 1). The result sums to 1.
IpfpResult fit_transition_ipfp(const Eigen::Matrix3d& joint_counts, const ClassVector& row_marginals,
                               const ClassVector& col_marginals, double tol = 1e-10, int max_iters = 10000);

}  // namespace asn
