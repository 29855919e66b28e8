#pragma once

#include <cstddef>
#include <cstdint>
#include <span>

#include "irbm/energy.hpp"
#include "irbm/model.hpp"
#include "irbm/rng.hpp"

namespace irbm {

/// State of one Gibbs chain. For the iRBM, z may transiently equal l + 1,
/// meaning the z draw landed in the untrained tail; `grew` records that.
struct ChainState {
  BinaryVector v;
  BinaryVector h;
  std::size_t z = 0;
  bool grew = false;
  /// Use the stored z for the next step instead of drawing it from P(z|v).
  bool hold_z = false;

  bool operator==(const ChainState&) const = default;
};

enum class ChainInit { FromExample, RandomUniform, ZEqualsK };

/// One Bernoulli(sigmoid(logit)) draw per entry.
void sample_bernoulli_logits(std::span<const double> logits, std::span<std::uint8_t> out, RngStream& rng);

BinaryVector sample_h_given_v(const ModelParams& params, std::span<const std::uint8_t> v, RngStream& rng);
BinaryVector sample_v_given_h(const ModelParams& params, std::span<const std::uint8_t> h, RngStream& rng);

/// v ~ P(v | h, z): only the first z hidden rows contribute. h must lie in H_z.
BinaryVector sample_v_given_hz(const ModelParams& params, std::span<const std::uint8_t> h, std::size_t z,
                               RngStream& rng);

/// Inverse-cdf draw with one uniform: z >= i iff u < P(z >= i | v). An iRBM
/// draw that lands in the tail returns l + 1.
std::size_t sample_z(const ZDistribution& dist, RngStream& rng);
std::size_t sample_z_given_v(const ModelParams& params, std::span<const std::uint8_t> v, RngStream& rng);

/// h ~ P(h | v, z); units past z are exactly 0. z = l + 1 is accepted for the iRBM.
BinaryVector sample_h_given_vz(const ModelParams& params, std::span<const std::uint8_t> v, std::size_t z,
                               RngStream& rng);

/// One block Gibbs sweep in place: h then v for the RBM, z then h then v otherwise.
void gibbs_update(const ModelParams& params, ChainState& state, RngStream& rng);

ChainState gibbs_step(const ModelParams& params, ChainState state, RngStream& rng);

ChainState run_chain(const ModelParams& params, ChainState init, std::size_t steps, RngStream& rng);

/// FromExample copies `example`; RandomUniform draws v uniformly; ZEqualsK
/// also pins z = K for the first sweep (v taken from `example` if given).
ChainState init_chain(const ModelParams& params, ChainInit mode, RngStream& rng,
                      std::span<const std::uint8_t> example = {});

}  // namespace irbm
