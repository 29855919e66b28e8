#pragma once

#include <cstddef>
#include <cstdint>
#include <span>

#include "irbm/energy.hpp"
#include "irbm/model.hpp"

namespace irbm {

/// Gradient of a scalar w.r.t. every parameter, shaped like ModelParams.
struct GradientSet {
  RealMatrix dW;
  RealVector dbv;
  RealVector dbh;

  static GradientSet zeros_like(const ModelParams& params);

  void add_scaled(const GradientSet& other, double scale);
  bool same_shape(const ModelParams& params) const;

  bool operator==(const GradientSet&) const = default;
};

/// dF/dtheta for the RBM: dW = -h_hat v^T, db_h = -h_hat, db_v = -v.
GradientSet rbm_free_energy_grads(const ModelParams& params, std::span<const std::uint8_t> v);

/// dF/dtheta for the oRBM, with each unit weighted by P(z >= i | v).
GradientSet orbm_free_energy_grads(const ModelParams& params, std::span<const std::uint8_t> v);

/// iRBM gradient: the exact F(v) gradient for the l trained units (tail mass
/// included in P(z >= i | v)), and nothing for the untrained units past l.
GradientSet irbm_hybrid_grads(const ModelParams& params, std::span<const std::uint8_t> v);

/// dF(v, z)/dtheta. Rows and hidden biases past z are exactly zero. For the
/// iRBM, z = l + 1 stands for the tail bucket and selects every trained unit.
GradientSet orbm_free_energy_vz_grads(const ModelParams& params, std::span<const std::uint8_t> v,
                                      std::size_t z);

/// Variant dispatch over the three gradients above.
GradientSet free_energy_grads(const ModelParams& params, std::span<const std::uint8_t> v);

/// acc += weight * dF(v)/dtheta, without allocating a fresh GradientSet.
void accumulate_free_energy_grads(const ModelParams& params, std::span<const std::uint8_t> v,
                                  double weight, GradientSet& acc);

/// Positive phase mean minus negative phase mean of the free-energy gradients.
GradientSet nll_gradient_estimate(const ModelParams& params, std::span<const BinaryVector> positive,
                                  std::span<const BinaryVector> negative);

}  // namespace irbm
