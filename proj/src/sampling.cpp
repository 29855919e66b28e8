#include "irbm/sampling.hpp"

#include <algorithm>
#include <stdexcept>

namespace irbm {
namespace {

std::size_t z_limit(const ModelParams& params) {
  return params.hidden() + (params.variant == Variant::Irbm ? 1 : 0);
}

// sum_{i < rows} W_ij h_i + b_v_j, row-major accumulation order.
RealVector visible_logits(const ModelParams& params, std::span<const std::uint8_t> h, std::size_t rows) {
  RealVector logits(params.bv);
  for (std::size_t i = 0; i < rows; ++i) {
    if (!h[i]) continue;
    const auto row = params.W.row(i);
    for (std::size_t j = 0; j < logits.size(); ++j) logits[j] += row[j];
  }
  return logits;
}

}  // namespace

void sample_bernoulli_logits(std::span<const double> logits, std::span<std::uint8_t> out, RngStream& rng) {
  for (std::size_t i = 0; i < logits.size(); ++i) out[i] = rng.uniform() < sigmoid(logits[i]) ? 1 : 0;
}

BinaryVector sample_h_given_v(const ModelParams& params, std::span<const std::uint8_t> v, RngStream& rng) {
  if (v.size() != params.visible()) throw std::invalid_argument("visible vector has wrong length");
  RealVector logits = matvec(params.W, v);
  for (std::size_t i = 0; i < logits.size(); ++i) logits[i] += params.bh[i];
  BinaryVector h(params.hidden());
  sample_bernoulli_logits(logits, h, rng);
  return h;
}

BinaryVector sample_v_given_h(const ModelParams& params, std::span<const std::uint8_t> h, RngStream& rng) {
  if (h.size() != params.hidden()) throw std::invalid_argument("hidden vector has wrong length");
  const RealVector logits = visible_logits(params, h, params.hidden());
  BinaryVector v(params.visible());
  sample_bernoulli_logits(logits, v, rng);
  return v;
}

BinaryVector sample_v_given_hz(const ModelParams& params, std::span<const std::uint8_t> h, std::size_t z,
                               RngStream& rng) {
  if (h.size() != params.hidden()) throw std::invalid_argument("hidden vector has wrong length");
  if (z < 1 || z > z_limit(params)) throw std::invalid_argument("z out of range");
  if (!in_legal_set(h, z)) throw std::invalid_argument("hidden state outside legal set");
  const RealVector logits = visible_logits(params, h, std::min(z, params.hidden()));
  BinaryVector v(params.visible());
  sample_bernoulli_logits(logits, v, rng);
  return v;
}

std::size_t sample_z(const ZDistribution& dist, RngStream& rng) {
  const double u = rng.uniform();
  const std::size_t k = dist.probs.size();
  std::size_t z = 1;
  while (z < k && u < dist.survival[z]) ++z;
  if (dist.has_tail && z >= k && u < dist.tail_mass) return k + 1;
  return z;
}

std::size_t sample_z_given_v(const ModelParams& params, std::span<const std::uint8_t> v, RngStream& rng) {
  return sample_z(p_z_given_v(params, v), rng);
}

BinaryVector sample_h_given_vz(const ModelParams& params, std::span<const std::uint8_t> v, std::size_t z,
                               RngStream& rng) {
  if (v.size() != params.visible()) throw std::invalid_argument("visible vector has wrong length");
  if (z < 1 || z > z_limit(params)) throw std::invalid_argument("z out of range");
  BinaryVector h(params.hidden(), 0);
  const std::size_t active = std::min(z, params.hidden());
  for (std::size_t i = 0; i < active; ++i) {
    const double p = sigmoid(dot(params.W.row(i), v) + params.bh[i]);
    h[i] = rng.uniform() < p ? 1 : 0;
  }
  return h;
}

void gibbs_update(const ModelParams& params, ChainState& state, RngStream& rng) {
  if (state.v.size() != params.visible()) throw std::invalid_argument("chain state has wrong length");
  if (params.variant == Variant::Rbm) {
    state.h = sample_h_given_v(params, state.v, rng);
    state.v = sample_v_given_h(params, state.h, rng);
    state.z = 0;
    state.grew = false;
    return;
  }
  std::size_t z = state.z;
  if (!state.hold_z || z < 1 || z > z_limit(params)) z = sample_z_given_v(params, state.v, rng);
  state.hold_z = false;
  state.z = z;
  state.grew = params.variant == Variant::Irbm && z == params.hidden() + 1;
  state.h = sample_h_given_vz(params, state.v, z, rng);
  state.v = sample_v_given_hz(params, state.h, z, rng);
}

ChainState gibbs_step(const ModelParams& params, ChainState state, RngStream& rng) {
  gibbs_update(params, state, rng);
  return state;
}

ChainState run_chain(const ModelParams& params, ChainState init, std::size_t steps, RngStream& rng) {
  for (std::size_t s = 0; s < steps; ++s) gibbs_update(params, init, rng);
  return init;
}

ChainState init_chain(const ModelParams& params, ChainInit mode, RngStream& rng,
                      std::span<const std::uint8_t> example) {
  ChainState state;
  state.h.assign(params.hidden(), 0);
  if (mode == ChainInit::FromExample || (mode == ChainInit::ZEqualsK && !example.empty())) {
    if (example.size() != params.visible()) throw std::invalid_argument("example has wrong length");
    state.v.assign(example.begin(), example.end());
  } else {
    state.v.resize(params.visible());
    for (auto& x : state.v) x = rng.uniform() < 0.5 ? 1 : 0;
  }
  if (mode == ChainInit::ZEqualsK && is_ordered(params.variant) && params.hidden() > 0) {
    state.z = params.hidden();
    state.hold_z = true;
  }
  return state;
}

}  // namespace irbm
