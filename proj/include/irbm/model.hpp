#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>

#include "irbm/numeric.hpp"

namespace irbm {

enum class Variant { Rbm, Orbm, Irbm };

std::string_view to_string(Variant v);
/// Accepts "rbm", "orbm", "irbm". Throws std::invalid_argument otherwise.
Variant parse_variant(std::string_view name);

inline bool is_ordered(Variant v) { return v != Variant::Rbm; }

inline constexpr double kDefaultBeta = 1.01;
inline constexpr double kDefaultInitScale = 0.01;

/// Parameters shared by all three variants. For the iRBM, hidden() is the
/// number of trained units l; every unit past l is implicitly all-zero.
struct ModelParams {
  Variant variant = Variant::Rbm;
  RealMatrix W;  // hidden x visible
  RealVector bv;
  RealVector bh;
  double beta = kDefaultBeta;

  std::size_t visible() const { return bv.size(); }
  std::size_t hidden() const { return bh.size(); }

  bool operator==(const ModelParams&) const = default;
};

/// Throws std::invalid_argument if the shapes or beta are inconsistent.
void validate(const ModelParams& params);

/// Binary hidden vector plus the number of selected units z (ordered variants).
struct HiddenState {
  BinaryVector h;
  std::size_t z = 0;
};

/// True iff h_k = 0 for every k > z (1-based).
bool in_legal_set(std::span<const std::uint8_t> h, std::size_t z);

ModelParams init_model(Variant variant, std::size_t visible, std::size_t hidden,
                       double beta = kDefaultBeta, double init_scale = kDefaultInitScale,
                       std::uint64_t seed = 0);

/// Appends one all-zero hidden unit. iRBM only.
ModelParams grow_hidden_unit(ModelParams params);

/// Number of trailing units whose weight row and hidden bias are exactly zero.
std::size_t trailing_zero_units(const ModelParams& params);

/// Removes the trailing block of all-zero units. iRBM only.
ModelParams shrink_trailing_zero_units(ModelParams params);

}  // namespace irbm
