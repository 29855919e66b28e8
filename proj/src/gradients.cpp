#include "irbm/gradients.hpp"

#include <stdexcept>

namespace irbm {
namespace {

void check_visible(const ModelParams& params, std::span<const std::uint8_t> v) {
  if (v.size() != params.visible()) throw std::invalid_argument("visible vector has wrong length");
}

// acc += weight * gradient where hidden unit i carries multiplier mult[i]
// (1 for the RBM, P(z >= i | v) or a Heaviside mask for the ordered variants).
void accumulate_weighted(const ModelParams& params, std::span<const std::uint8_t> v,
                         std::span<const double> mult, bool penalized, double weight, GradientSet& acc) {
  const std::size_t d = params.visible();
  for (std::size_t i = 0; i < mult.size(); ++i) {
    if (mult[i] == 0.0) continue;
    const double h_hat = sigmoid(dot(params.W.row(i), v) + params.bh[i]);
    const double unit = h_hat * mult[i] * weight;
    auto row = acc.dW.row(i);
    for (std::size_t j = 0; j < d; ++j)
      if (v[j]) row[j] -= unit;
    const double bias_term = penalized ? h_hat - params.beta * sigmoid(params.bh[i]) : h_hat;
    acc.dbh[i] -= bias_term * mult[i] * weight;
  }
  for (std::size_t j = 0; j < d; ++j)
    if (v[j]) acc.dbv[j] -= weight;
}

}  // namespace

GradientSet GradientSet::zeros_like(const ModelParams& params) {
  return {RealMatrix(params.hidden(), params.visible()), RealVector(params.visible(), 0.0),
          RealVector(params.hidden(), 0.0)};
}

void GradientSet::add_scaled(const GradientSet& other, double scale) {
  if (other.dW.values().size() != dW.values().size() || other.dbv.size() != dbv.size() ||
      other.dbh.size() != dbh.size())
    throw std::invalid_argument("gradient shape mismatch");
  for (std::size_t i = 0; i < dW.values().size(); ++i) dW.values()[i] += scale * other.dW.values()[i];
  for (std::size_t i = 0; i < dbv.size(); ++i) dbv[i] += scale * other.dbv[i];
  for (std::size_t i = 0; i < dbh.size(); ++i) dbh[i] += scale * other.dbh[i];
}

bool GradientSet::same_shape(const ModelParams& params) const {
  return dW.rows() == params.hidden() && dW.values().size() == params.hidden() * params.visible() &&
         dbv.size() == params.visible() && dbh.size() == params.hidden();
}

GradientSet rbm_free_energy_grads(const ModelParams& params, std::span<const std::uint8_t> v) {
  check_visible(params, v);
  GradientSet g = GradientSet::zeros_like(params);
  const RealVector ones(params.hidden(), 1.0);
  accumulate_weighted(params, v, ones, false, 1.0, g);
  return g;
}

GradientSet orbm_free_energy_grads(const ModelParams& params, std::span<const std::uint8_t> v) {
  check_visible(params, v);
  GradientSet g = GradientSet::zeros_like(params);
  const ZDistribution dist =
      z_distribution_from_prefix(Variant::Orbm, params.beta, free_energy_prefix(params, v));
  accumulate_weighted(params, v, dist.survival, true, 1.0, g);
  return g;
}

GradientSet irbm_hybrid_grads(const ModelParams& params, std::span<const std::uint8_t> v) {
  check_visible(params, v);
  GradientSet g = GradientSet::zeros_like(params);
  const ZDistribution dist =
      z_distribution_from_prefix(Variant::Irbm, params.beta, free_energy_prefix(params, v));
  accumulate_weighted(params, v, dist.survival, true, 1.0, g);
  return g;
}

GradientSet orbm_free_energy_vz_grads(const ModelParams& params, std::span<const std::uint8_t> v,
                                      std::size_t z) {
  check_visible(params, v);
  const std::size_t limit = params.hidden() + (params.variant == Variant::Irbm ? 1 : 0);
  if (z < 1 || z > limit) throw std::invalid_argument("z out of range");
  GradientSet g = GradientSet::zeros_like(params);
  RealVector mask(params.hidden(), 0.0);
  for (std::size_t i = 0; i < params.hidden() && i < z; ++i) mask[i] = 1.0;
  accumulate_weighted(params, v, mask, true, 1.0, g);
  return g;
}

void accumulate_free_energy_grads(const ModelParams& params, std::span<const std::uint8_t> v,
                                  double weight, GradientSet& acc) {
  check_visible(params, v);
  if (!acc.same_shape(params)) throw std::invalid_argument("gradient shape mismatch");
  if (params.variant == Variant::Rbm) {
    const RealVector ones(params.hidden(), 1.0);
    accumulate_weighted(params, v, ones, false, weight, acc);
    return;
  }
  const ZDistribution dist =
      z_distribution_from_prefix(params.variant, params.beta, free_energy_prefix(params, v));
  accumulate_weighted(params, v, dist.survival, true, weight, acc);
}

GradientSet free_energy_grads(const ModelParams& params, std::span<const std::uint8_t> v) {
  switch (params.variant) {
    case Variant::Rbm: return rbm_free_energy_grads(params, v);
    case Variant::Orbm: return orbm_free_energy_grads(params, v);
    case Variant::Irbm: return irbm_hybrid_grads(params, v);
  }
  throw std::logic_error("unreachable");
}

GradientSet nll_gradient_estimate(const ModelParams& params, std::span<const BinaryVector> positive,
                                  std::span<const BinaryVector> negative) {
  if (positive.empty() || negative.empty()) throw std::invalid_argument("empty batch");
  GradientSet pos = GradientSet::zeros_like(params);
  GradientSet neg = GradientSet::zeros_like(params);
  const double wp = 1.0 / static_cast<double>(positive.size());
  const double wn = 1.0 / static_cast<double>(negative.size());
  for (const auto& v : positive) accumulate_free_energy_grads(params, v, wp, pos);
  for (const auto& v : negative) accumulate_free_energy_grads(params, v, wn, neg);
  pos.add_scaled(neg, -1.0);
  return pos;
}

}  // namespace irbm
