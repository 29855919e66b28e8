#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "irbm/data_io.hpp"
#include "irbm/energy.hpp"
#include "irbm/gradients.hpp"
#include "irbm/model.hpp"

namespace irbm {

/// Mean of F(v_n) + ln Z with ln Z by enumeration.
double exact_nll(const ModelParams& params, const Dataset& data);

enum class AisBase {
  TargetVisible,  // zero weights and hidden biases, b_v fixed at the target value
  ZeroVisible,    // fully zero base model
  DataMarginals,  // b_v set from data marginals (AisConfig::base_visible_bias)
};

struct AisConfig {
  std::size_t num_intermediate = 100000;
  std::size_t num_chains = 5000;
  std::uint64_t seed = 0;
  AisBase base = AisBase::TargetVisible;
  RealVector base_visible_bias;
  std::size_t threads = 1;

  void validate() const;
};

struct AisResult {
  double ln_z_hat = 0.0;
  double ln_z_lo3sigma = 0.0;
  double ln_z_hi3sigma = 0.0;
  double ess = 0.0;
  double ln_z_base = 0.0;
  RealVector log_weights;
};

/// Smoothed logit of the per-pixel marginals, (count + 1) / (N + 2).
RealVector data_marginal_visible_bias(const Dataset& data);

/// ln Z of the zero-weight model with visible biases `bv`, for any variant.
double base_log_partition(Variant variant, std::size_t hidden, double beta, std::span<const double> bv);

/// Annealed importance sampling from the zero-weight base model to `params`
/// along the linear schedule t_k = k / num_intermediate. Intermediate models
/// scale W and b_h by t_k and interpolate b_v from the base to the target.
/// The interval is ln(mean(w) +- 3 stderr(w)) + ln Z_base.
/// Throws std::runtime_error("AIS diverged") on a non-finite weight.
AisResult ais_log_partition(const ModelParams& params, const AisConfig& config);

struct NllEstimate {
  double mean = 0.0;
  double ci95 = 0.0;
};

/// Mean of F(v) + ln_z over the data; ci95 = 1.96 * stddev / sqrt(N), with
/// stddev normalized by N.
NllEstimate estimate_nll(const ModelParams& params, const Dataset& data, double ln_z);

struct GradcheckBlock {
  std::string name;
  double max_abs_error = 0.0;
  double max_rel_error = 0.0;
  /// max |a - n| / max(rel_tol * max(|a|, |n|), abs_tol); the block passes iff <= 1.
  double max_scaled_error = 0.0;
  std::size_t worst_index = 0;
  bool pass = true;
};

struct GradcheckReport {
  std::array<GradcheckBlock, 3> blocks;  // W, b_v, b_h
  bool pass() const;
};

/// Central finite differences of the variant free energy against `analytic`.
GradcheckReport gradcheck(const ModelParams& params, std::span<const std::uint8_t> v, const GradientSet& analytic,
                          double rel_tol = 1e-6, double abs_tol = 1e-8, double h = 1e-5);

/// Same, checking free_energy_grads.
GradcheckReport gradcheck(const ModelParams& params, std::span<const std::uint8_t> v, double rel_tol = 1e-6,
                          double abs_tol = 1e-8, double h = 1e-5);

struct IntervalRanking {
  std::size_t a = 0;
  std::size_t b = 0;
  /// (example index, P(a <= z < b | v)), best first.
  std::vector<std::pair<std::size_t, double>> top;
};

struct ZInspection {
  std::vector<ZDistribution> distributions;
  std::vector<IntervalRanking> rankings;
};

/// P(z|v) for every example and the top_k examples per interval [a, b).
ZInspection inspect_z(const ModelParams& params, const Dataset& examples,
                      std::span<const std::pair<std::size_t, std::size_t>> intervals, std::size_t top_k = 10);

}  // namespace irbm
