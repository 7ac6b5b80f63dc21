#include "asn/mrf.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "asn/error.hpp"

namespace asn {
namespace {

ClassVector normalized(const ClassVector& v, const char* what) {
  const double s = v.sum();
  if (!(s > 0.0) || !std::isfinite(s)) throw Error(ErrorKind::DegenerateMessage, std::string(what) + " is all zero");
  return v / s;
}

void check_nonnegative(const ClassVector& v, const char* what) {
  if (!v.allFinite() || (v.array() < 0.0).any())
    throw Error(ErrorKind::Domain, std::string(what) + " must be finite and non-negative");
}

}  // namespace

void PriorParams::validate() const {
  if (!(sigma2_align > 0.0) || !(lambda > 0.0) || !(e_max > 0.0) || !std::isfinite(sigma2_align) ||
      !std::isfinite(lambda) || !std::isfinite(e_max))
    throw Error(ErrorKind::Domain, "prior parameters must be positive and finite");
}

void TransitionMatrix::validate() const {
  if (!psi.allFinite() || (psi.array() < 0.0).any())
    throw Error(ErrorKind::Domain, "transition matrix entries must be finite and >= 0");
  for (int i = 0; i < 3; ++i)
    if (psi.row(i).sum() <= 0.0 || psi.col(i).sum() <= 0.0)
      throw Error(ErrorKind::Domain, "transition matrix has an all-zero row or column");
}

TransitionMatrix TransitionMatrix::symmetrized() const { return {0.5 * (psi + psi.transpose())}; }

double prior_density(double e, LatentClass cls, const PriorParams& params) {
  if (!(e >= 0.0)) throw Error(ErrorKind::Domain, "localization discrepancy must be >= 0");
  switch (cls) {
    case LatentClass::Aligned:
      return 2.0 / std::sqrt(2.0 * std::numbers::pi * params.sigma2_align) *
             std::exp(-e * e / (2.0 * params.sigma2_align));
    case LatentClass::Misaligned:
      if (e > params.e_max) return 0.0;
      return params.lambda * std::exp(-params.lambda * e) / -std::expm1(-params.lambda * params.e_max);
    case LatentClass::Unreliable:
      return e > params.e_max ? 0.0 : 1.0 / params.e_max;
  }
  return 0.0;
}

ClassVector likelihood_vector(double e, const PriorParams& params) {
  return {prior_density(e, LatentClass::Aligned, params), prior_density(e, LatentClass::Misaligned, params),
          prior_density(e, LatentClass::Unreliable, params)};
}

ClassVector message(const TransitionMatrix& psi, const ClassVector& l_sender, const ClassVector& incoming) {
  check_nonnegative(l_sender, "likelihood");
  check_nonnegative(incoming, "incoming product");
  const ClassVector belief = l_sender.cwiseProduct(incoming);
  return normalized(psi.psi.transpose() * belief, "message");
}

BpResult run_belief_propagation(std::span<const ClassVector> likelihoods, const TransitionMatrix& psi,
                                BpOptions options) {
  const std::size_t m = likelihoods.size();
  if (m < 2) throw Error(ErrorKind::Dimension, "belief propagation needs at least two sub-networks");
  psi.validate();
  for (const auto& l : likelihoods) {
    check_nonnegative(l, "likelihood");
    normalized(l, "likelihood vector");
  }

  // msgs[s * m + r]: message from s to r.
  std::vector<ClassVector> msgs(m * m, ClassVector::Ones());
  std::vector<ClassVector> next(m * m, ClassVector::Ones());

  // Product of messages into `target`, skipping `skip`, rescaled to avoid
  // underflow on large graphs.
  auto incoming = [&](const std::vector<ClassVector>& from, std::size_t target, std::size_t skip) {
    ClassVector prod = ClassVector::Ones();
    for (std::size_t k = 0; k < m; ++k) {
      if (k == target || k == skip) continue;
      prod = prod.cwiseProduct(from[k * m + target]);
      const double mx = prod.maxCoeff();
      if (mx > 0.0) prod /= mx;
    }
    return prod;
  };

  BpResult result;
  result.posteriors.p.resize(m);
  for (std::size_t i = 0; i < m; ++i) result.posteriors.p[i] = normalized(likelihoods[i], "posterior");

  for (int it = 1; it <= options.max_iters; ++it) {
    for (std::size_t s = 0; s < m; ++s)
      for (std::size_t r = 0; r < m; ++r)
        if (s != r) next[s * m + r] = message(psi, likelihoods[s], incoming(msgs, s, r));
    std::swap(msgs, next);

    double delta = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
      const ClassVector post =
          normalized(likelihoods[i].cwiseProduct(incoming(msgs, i, m)), "posterior");
      delta = std::max(delta, (post - result.posteriors.p[i]).cwiseAbs().maxCoeff());
      result.posteriors.p[i] = post;
    }
    result.iterations = it;
    if (delta < options.tol) {
      result.converged = true;
      break;
    }
  }
  return result;
}

BpResult run_belief_propagation(const ErrorVector& e, const PriorParams& params, const TransitionMatrix& psi,
                                BpOptions options) {
  params.validate();
  std::vector<ClassVector> l;
  l.reserve(e.size());
  for (double v : e.e) l.push_back(likelihood_vector(v, params));
  return run_belief_propagation(l, psi, options);
}

LatentPosterior exact_posterior(std::span<const ClassVector> likelihoods, const TransitionMatrix& psi) {
  const std::size_t m = likelihoods.size();
  if (m == 0) throw Error(ErrorKind::Dimension, "no sub-networks");
  if (m > kMaxExactNodes)
    throw Error(ErrorKind::Capacity, "exact enumeration limited to " + std::to_string(kMaxExactNodes) + " nodes");
  psi.validate();

  std::size_t states = 1;
  for (std::size_t i = 0; i < m; ++i) states *= kNumClasses;

  // Log-domain weights; zero potentials map to -inf.
  std::vector<double> logw(states);
  std::vector<int> z(m);
  double max_logw = -std::numeric_limits<double>::infinity();
  for (std::size_t s = 0; s < states; ++s) {
    std::size_t code = s;
    for (std::size_t i = 0; i < m; ++i) {
      z[i] = static_cast<int>(code % kNumClasses);
      code /= kNumClasses;
    }
    double lw = 0.0;
    for (std::size_t i = 0; i < m; ++i) lw += std::log(likelihoods[i](z[i]));
    for (std::size_t i = 0; i < m; ++i)
      for (std::size_t j = i + 1; j < m; ++j) lw += std::log(psi.psi(z[i], z[j]));
    logw[s] = lw;
    max_logw = std::max(max_logw, lw);
  }
  if (!std::isfinite(max_logw)) throw Error(ErrorKind::DegenerateMessage, "joint distribution is all zero");

  LatentPosterior out;
  out.p.assign(m, ClassVector::Zero());
  for (std::size_t s = 0; s < states; ++s) {
    const double w = std::exp(logw[s] - max_logw);
    std::size_t code = s;
    for (std::size_t i = 0; i < m; ++i) {
      out.p[i](static_cast<int>(code % kNumClasses)) += w;
      code /= kNumClasses;
    }
  }
  for (auto& p : out.p) p /= p.sum();
  return out;
}

LatentPosterior exact_posterior(const ErrorVector& e, const PriorParams& params, const TransitionMatrix& psi) {
  params.validate();
  std::vector<ClassVector> l;
  for (double v : e.e) l.push_back(likelihood_vector(v, params));
  return exact_posterior(l, psi);
}

double failure_probability(const LatentPosterior& posteriors) {
  if (posteriors.p.empty()) return 0.0;
  double total = 0.0;
  for (const auto& p : posteriors.p) total += p(static_cast<int>(LatentClass::Misaligned));
  return total / static_cast<double>(posteriors.p.size());
}

DetectionResult detect(const ErrorVector& e, const PriorParams& params, const TransitionMatrix& psi,
                       double threshold, BpOptions options) {
  if (!(threshold >= 0.0 && threshold <= 1.0)) throw Error(ErrorKind::Domain, "threshold must lie in [0, 1]");
  params.validate();
  DetectionResult out;
  ErrorVector clamped = e;
  for (auto& v : clamped.e) {
    if (!(v >= 0.0)) throw Error(ErrorKind::Domain, "error vector entries must be >= 0");
    if (v > params.e_max) {
      v = params.e_max;
      out.clamped = true;
    }
  }
  auto bp = run_belief_propagation(clamped, params, psi, options);
  out.posteriors = std::move(bp.posteriors);
  out.iterations = bp.iterations;
  out.converged = bp.converged;
  out.p_failure = failure_probability(out.posteriors);
  out.movement_detected = out.p_failure >= threshold;
  if (out.movement_detected) {
    std::size_t best = 0;
    for (std::size_t i = 1; i < out.posteriors.size(); ++i)
      if (out.posteriors.p[i](0) > out.posteriors.p[best](0)) best = i;
    out.suspected_node = static_cast<int>(best + 1);
  }
  return out;
}

PriorParams fit_priors(std::span<const double> aligned_errors, std::span<const double> misaligned_errors) {
  if (aligned_errors.empty()) throw Error(ErrorKind::InsufficientData, "no aligned error samples");
  if (misaligned_errors.empty()) throw Error(ErrorKind::InsufficientData, "no misaligned error samples");
  double sq = 0.0;
  double mx = 0.0;
  for (double v : aligned_errors) {
    if (!(v >= 0.0)) throw Error(ErrorKind::Domain, "error samples must be >= 0");
    sq += v * v;
    mx = std::max(mx, v);
  }
  double sum = 0.0;
  for (double v : misaligned_errors) {
    if (!(v >= 0.0)) throw Error(ErrorKind::Domain, "error samples must be >= 0");
    sum += v;
    mx = std::max(mx, v);
  }
  PriorParams p;
  p.sigma2_align = std::max(sq / static_cast<double>(aligned_errors.size()), kSigma2Floor);
  const double mean = sum / static_cast<double>(misaligned_errors.size());
  p.lambda = 1.0 / std::max(mean, 1e-6);
  p.e_max = std::max(kEmaxMargin * mx, 1e-6);
  return p;
}

IpfpResult fit_transition_ipfp(const Eigen::Matrix3d& joint_counts, const ClassVector& row_marginals,
                               const ClassVector& col_marginals, double tol, int max_iters) {
  if (!joint_counts.allFinite() || (joint_counts.array() < 0.0).any())
    throw Error(ErrorKind::Domain, "joint counts must be finite and >= 0");
  for (int i = 0; i < 3; ++i)
    if (joint_counts.row(i).sum() <= 0.0 || joint_counts.col(i).sum() <= 0.0)
      throw Error(ErrorKind::Domain, "joint counts have an all-zero row or column");
  if ((row_marginals.array() <= 0.0).any() || (col_marginals.array() <= 0.0).any() ||
      std::abs(row_marginals.sum() - 1.0) > 1e-9 || std::abs(col_marginals.sum() - 1.0) > 1e-9)
    throw Error(ErrorKind::Domain, "target marginals must be positive and sum to 1");

  Eigen::Matrix3d p = joint_counts / joint_counts.sum();
  auto residual = [&] {
    const double r = (p.rowwise().sum() - row_marginals).cwiseAbs().maxCoeff();
    const double c = (p.colwise().sum().transpose() - col_marginals).cwiseAbs().maxCoeff();
    return std::max(r, c);
  };

  IpfpResult out;
  double res = residual();
  for (int it = 1; res > tol && it <= max_iters; ++it) {
    const ClassVector rows = p.rowwise().sum();
    for (int i = 0; i < 3; ++i) p.row(i) *= row_marginals(i) / rows(i);
    const ClassVector cols = p.colwise().sum().transpose();
    for (int j = 0; j < 3; ++j) p.col(j) *= col_marginals(j) / cols(j);
    res = residual();
    out.residuals.push_back(res);
    out.iterations = it;
  }
  if (res > tol) {
    std::ostringstream os;
    os << "IPFP did not converge in " << max_iters << " iterations; marginal residual " << res;
    throw Error(ErrorKind::Fitting, os.str());
  }
  out.psi.psi = p;
  return out;
}

}  // namespace asn
