#include "irbm/model.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

#include "irbm/rng.hpp"

namespace irbm {

std::string_view to_string(Variant v) {
  switch (v) {
    case Variant::Rbm: return "rbm";
    case Variant::Orbm: return "orbm";
    case Variant::Irbm: return "irbm";
  }
  return "unknown";
}

Variant parse_variant(std::string_view name) {
  if (name == "rbm") return Variant::Rbm;
  if (name == "orbm") return Variant::Orbm;
  if (name == "irbm") return Variant::Irbm;
  throw std::invalid_argument("unknown model variant '" + std::string(name) + "'");
}

void validate(const ModelParams& params) {
  if (params.visible() == 0) throw std::invalid_argument("model needs at least one visible unit");
  if (params.W.rows() != params.hidden())
    throw std::invalid_argument("weight rows do not match hidden bias length");
  if (params.hidden() > 0 && params.W.cols() != params.visible())
    throw std::invalid_argument("weight columns do not match visible bias length");
  if (params.variant != Variant::Irbm && params.hidden() == 0)
    throw std::invalid_argument("rbm/orbm need at least one hidden unit");
  if (is_ordered(params.variant) && !(params.beta > 1.0))
    throw std::invalid_argument("beta must exceed 1");
}

bool in_legal_set(std::span<const std::uint8_t> h, std::size_t z) {
  for (std::size_t k = z; k < h.size(); ++k)
    if (h[k] != 0) return false;
  return true;
}

ModelParams init_model(Variant variant, std::size_t visible, std::size_t hidden, double beta,
                       double init_scale, std::uint64_t seed) {
  if (visible == 0) throw std::invalid_argument("model needs at least one visible unit");
  if (variant != Variant::Irbm && hidden == 0)
    throw std::invalid_argument("rbm/orbm need at least one hidden unit");
  if (is_ordered(variant) && !(beta > 1.0)) throw std::invalid_argument("beta must exceed 1");
  if (init_scale < 0.0) throw std::invalid_argument("init_scale must be non-negative");

  ModelParams p;
  p.variant = variant;
  p.beta = beta;
  p.W = RealMatrix(hidden, visible);
  p.bv.assign(visible, 0.0);
  p.bh.assign(hidden, 0.0);
  // iRBM units start at zero, the same state a freshly grown unit has.
  if (variant != Variant::Irbm && init_scale > 0.0) {
    RngStream rng(seed, 0);
    for (double& w : p.W.values()) w = rng.uniform(-init_scale, init_scale);
  }
  return p;
}

ModelParams grow_hidden_unit(ModelParams params) {
  if (params.variant != Variant::Irbm)
    throw std::invalid_argument("only the irbm can grow hidden units");
  const RealVector zeros(params.visible(), 0.0);
  if (params.hidden() == 0) params.W = RealMatrix(0, params.visible());
  params.W.append_row(zeros);
  params.bh.push_back(0.0);
  return params;
}

std::size_t trailing_zero_units(const ModelParams& params) {
  std::size_t count = 0;
  for (std::size_t i = params.hidden(); i-- > 0;) {
    const auto row = params.W.row(i);
    const bool zero = params.bh[i] == 0.0 &&
                      std::all_of(row.begin(), row.end(), [](double w) { return w == 0.0; });
    if (!zero) break;
    ++count;
  }
  return count;
}

ModelParams shrink_trailing_zero_units(ModelParams params) {
  if (params.variant != Variant::Irbm)
    throw std::invalid_argument("only the irbm can shrink hidden units");
  const std::size_t keep = params.hidden() - trailing_zero_units(params);
  params.W.truncate_rows(keep);
  params.bh.resize(keep);
  return params;
}

}  // namespace irbm
