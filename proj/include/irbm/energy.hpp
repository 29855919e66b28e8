#pragma once

#include <cstddef>
#include <cstdint>
#include <limits>
#include <span>

#include "irbm/model.hpp"
#include "irbm/numeric.hpp"

namespace irbm {

/// P(z|v) for the ordered variants.
///
/// For the oRBM, `probs` covers z = 1..K and `tail_mass` is 0. For the iRBM,
/// `probs` covers the l trained units and `tail_mass` aggregates every z > l;
/// inside the tail, P(z = l + j | v) = tail_mass * (1 - r) * r^(j-1) with
/// r = `tail_ratio`.
struct ZDistribution {
  RealVector probs;
  /// survival[i-1] = P(z >= i | v), tail included. survival[0] is exactly 1.
  RealVector survival;
  double tail_mass = 0.0;
  double tail_ratio = 0.0;
  bool has_tail = false;

  /// Number of explicit buckets: K for the oRBM, l + 1 for the iRBM.
  std::size_t support_max() const { return probs.size() + (has_tail ? 1 : 0); }

  /// cdf[i-1] = P(z < i | v) for i = 1..probs.size().
  RealVector cdf() const;

  /// P(a <= z < b | v), 1-based, b exclusive. Pass b = npos for an open interval.
  double interval(std::size_t a, std::size_t b) const;

  static constexpr std::size_t npos = std::numeric_limits<std::size_t>::max();
};

/// Per-unit energy penalty beta * soft+(b_h_i).
double unit_penalty(const ModelParams& params, std::size_t i);

/// r = exp((1 - beta) soft+(0)) = 2^(1 - beta), the ratio of the iRBM tail.
double tail_ratio(double beta);

/// ln(r / (1 - r)), the log of the geometric series sum_{z>=1} r^z.
/// Throws std::invalid_argument("divergent geometric tail") when beta <= 1.
double log_geometric_tail(double beta);

double rbm_energy(const ModelParams& params, std::span<const std::uint8_t> v,
                  std::span<const std::uint8_t> h);

double rbm_free_energy(const ModelParams& params, std::span<const std::uint8_t> v);

/// Energy of (v, h, z) for the ordered variants; h must lie in H_z.
double orbm_energy(const ModelParams& params, std::span<const std::uint8_t> v,
                   std::span<const std::uint8_t> h, std::size_t z);

/// F(v, z) for 0 <= z <= K, where F(v, 0) = -v.b_v.
double orbm_free_energy_vz(const ModelParams& params, std::span<const std::uint8_t> v, std::size_t z);

/// All of F(v, 0..K) in one pass.
RealVector free_energy_prefix(const ModelParams& params, std::span<const std::uint8_t> v);

/// Same, from precomputed pre-activations W_i.v + b_h_i and penalties.
void free_energy_prefix(double visible_term, std::span<const double> preact,
                        std::span<const double> penalties, std::span<double> out);

double orbm_free_energy(const ModelParams& params, std::span<const std::uint8_t> v);

/// ln Z(v) = ln sum_{z >= 1} exp(-F(v, z)) for the iRBM, using the closed-form tail.
double irbm_zv_log_partition(const ModelParams& params, std::span<const std::uint8_t> v);

/// -ln sum_z exp(-F(v, z)) given F(v, 0..K). Irbm adds the geometric tail.
double ordered_free_energy_from_prefix(Variant variant, double beta, std::span<const double> prefix);

/// Variant dispatch: RBM free energy, oRBM F(v), or -ln Z(v) for the iRBM.
double free_energy(const ModelParams& params, std::span<const std::uint8_t> v);

ZDistribution p_z_given_v(const ModelParams& params, std::span<const std::uint8_t> v);
ZDistribution z_distribution_from_prefix(Variant variant, double beta, std::span<const double> prefix);

inline constexpr std::size_t kEnumerationBudget = 20;

/// ln Z by enumerating all 2^D visible vectors.
/// Throws std::invalid_argument("enumeration too large") past the budget.
double exact_log_partition_small(const ModelParams& params, std::size_t budget = kEnumerationBudget);

/// RBM only: ln Z by enumerating the 2^K hidden vectors instead.
double rbm_log_partition_by_hidden(const ModelParams& params, std::size_t budget = kEnumerationBudget);

}  // namespace irbm
