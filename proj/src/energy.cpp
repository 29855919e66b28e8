#include "irbm/energy.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace irbm {
namespace {

void check_visible(const ModelParams& params, std::span<const std::uint8_t> v) {
  if (v.size() != params.visible()) throw std::invalid_argument("visible vector has wrong length");
}

void check_hidden(const ModelParams& params, std::span<const std::uint8_t> h) {
  if (h.size() != params.hidden()) throw std::invalid_argument("hidden vector has wrong length");
}

double preactivation(const ModelParams& params, std::size_t i, std::span<const std::uint8_t> v) {
  return dot(params.W.row(i), v) + params.bh[i];
}

// Fills `v` with the bits of `code`, bit j -> v[j].
void decode_bits(std::uint64_t code, std::span<std::uint8_t> v) {
  for (std::size_t j = 0; j < v.size(); ++j) v[j] = static_cast<std::uint8_t>((code >> j) & 1U);
}

}  // namespace

RealVector ZDistribution::cdf() const {
  RealVector out(survival.size());
  for (std::size_t i = 0; i < survival.size(); ++i) out[i] = 1.0 - survival[i];
  return out;
}

double ZDistribution::interval(std::size_t a, std::size_t b) const {
  if (a < 1) a = 1;
  if (b <= a) return 0.0;
  const std::size_t l = probs.size();
  double total = 0.0;
  for (std::size_t z = a; z < b && z <= l; ++z) total += probs[z - 1];
  if (has_tail && b > l + 1) {
    // Tail offsets j = z - l, j >= 1: sum_{j=j1}^{j2-1} (1-r) r^(j-1) = r^(j1-1) - r^(j2-1).
    const std::size_t j1 = std::max(a, l + 1) - l;
    const double upper = std::pow(tail_ratio, static_cast<double>(j1 - 1));
    const double lower = b == npos ? 0.0 : std::pow(tail_ratio, static_cast<double>(b - l - 1));
    total += tail_mass * (upper - lower);
  }
  return total;
}

double unit_penalty(const ModelParams& params, std::size_t i) {
  return params.beta * softplus(params.bh[i]);
}

double tail_ratio(double beta) { return std::exp((1.0 - beta) * std::numbers::ln2); }

double log_geometric_tail(double beta) {
  if (!(beta > 1.0)) throw std::invalid_argument("divergent geometric tail");
  const double log_r = (1.0 - beta) * std::numbers::ln2;
  // 1 - r = -expm1(log r) stays accurate when beta is close to 1.
  return log_r - std::log(-std::expm1(log_r));
}

double rbm_energy(const ModelParams& params, std::span<const std::uint8_t> v,
                  std::span<const std::uint8_t> h) {
  check_visible(params, v);
  check_hidden(params, h);
  double e = -dot(params.bv, v);
  for (std::size_t i = 0; i < params.hidden(); ++i)
    if (h[i]) e -= preactivation(params, i, v);
  return e;
}

double rbm_free_energy(const ModelParams& params, std::span<const std::uint8_t> v) {
  check_visible(params, v);
  double f = -dot(params.bv, v);
  for (std::size_t i = 0; i < params.hidden(); ++i) f -= softplus(preactivation(params, i, v));
  return f;
}

double orbm_energy(const ModelParams& params, std::span<const std::uint8_t> v,
                   std::span<const std::uint8_t> h, std::size_t z) {
  check_visible(params, v);
  check_hidden(params, h);
  if (z < 1 || z > params.hidden()) throw std::invalid_argument("z out of range");
  if (!in_legal_set(h, z)) throw std::invalid_argument("hidden state outside legal set");
  double e = -dot(params.bv, v);
  for (std::size_t i = 0; i < z; ++i) {
    const double active = h[i] ? preactivation(params, i, v) : 0.0;
    e -= active - unit_penalty(params, i);
  }
  return e;
}

void free_energy_prefix(double visible_term, std::span<const double> preact,
                        std::span<const double> penalties, std::span<double> out) {
  out[0] = -visible_term;
  for (std::size_t i = 0; i < preact.size(); ++i)
    out[i + 1] = out[i] - (softplus(preact[i]) - penalties[i]);
}

RealVector free_energy_prefix(const ModelParams& params, std::span<const std::uint8_t> v) {
  check_visible(params, v);
  const std::size_t k = params.hidden();
  RealVector preact(k), penalties(k), out(k + 1);
  for (std::size_t i = 0; i < k; ++i) {
    preact[i] = preactivation(params, i, v);
    penalties[i] = unit_penalty(params, i);
  }
  free_energy_prefix(dot(params.bv, v), preact, penalties, out);
  return out;
}

double orbm_free_energy_vz(const ModelParams& params, std::span<const std::uint8_t> v, std::size_t z) {
  check_visible(params, v);
  if (z > params.hidden()) throw std::invalid_argument("z out of range");
  double f = -dot(params.bv, v);
  for (std::size_t i = 0; i < z; ++i)
    f -= softplus(preactivation(params, i, v)) - unit_penalty(params, i);
  return f;
}

double ordered_free_energy_from_prefix(Variant variant, double beta, std::span<const double> prefix) {
  const std::size_t k = prefix.size() - 1;
  RealVector terms;
  terms.reserve(k + 1);
  for (std::size_t z = 1; z <= k; ++z) terms.push_back(-prefix[z]);
  if (variant == Variant::Irbm) terms.push_back(-prefix[k] + log_geometric_tail(beta));
  return -log_sum_exp(terms);
}

double orbm_free_energy(const ModelParams& params, std::span<const std::uint8_t> v) {
  if (params.hidden() == 0) throw std::invalid_argument("orbm needs at least one hidden unit");
  return ordered_free_energy_from_prefix(Variant::Orbm, params.beta, free_energy_prefix(params, v));
}

double irbm_zv_log_partition(const ModelParams& params, std::span<const std::uint8_t> v) {
  return -ordered_free_energy_from_prefix(Variant::Irbm, params.beta, free_energy_prefix(params, v));
}

double free_energy(const ModelParams& params, std::span<const std::uint8_t> v) {
  switch (params.variant) {
    case Variant::Rbm: return rbm_free_energy(params, v);
    case Variant::Orbm: return orbm_free_energy(params, v);
    case Variant::Irbm: return -irbm_zv_log_partition(params, v);
  }
  throw std::logic_error("unreachable");
}

ZDistribution z_distribution_from_prefix(Variant variant, double beta, std::span<const double> prefix) {
  const std::size_t k = prefix.size() - 1;
  const bool tail = variant == Variant::Irbm;
  ZDistribution dist;
  dist.has_tail = tail;

  // log weights for z = 1..k, then the aggregated tail.
  RealVector logw(k + (tail ? 1 : 0));
  for (std::size_t z = 1; z <= k; ++z) logw[z - 1] = -prefix[z];
  if (tail) {
    logw[k] = -prefix[k] + log_geometric_tail(beta);
    dist.tail_ratio = tail_ratio(beta);
  }
  const double shift = *std::max_element(logw.begin(), logw.end());
  for (double& x : logw) x = std::exp(x - shift);

  // Suffix sums so that survival is monotone and survival[0] is exactly 1.
  RealVector suffix(k + 1, 0.0);
  suffix[k] = tail ? logw[k] : 0.0;
  for (std::size_t i = k; i-- > 0;) suffix[i] = suffix[i + 1] + logw[i];
  const double total = suffix[0];

  dist.probs.resize(k);
  dist.survival.resize(k);
  for (std::size_t i = 0; i < k; ++i) {
    dist.probs[i] = logw[i] / total;
    dist.survival[i] = suffix[i] / total;
  }
  dist.tail_mass = tail ? logw[k] / total : 0.0;
  return dist;
}

ZDistribution p_z_given_v(const ModelParams& params, std::span<const std::uint8_t> v) {
  if (!is_ordered(params.variant)) throw std::invalid_argument("P(z|v) needs an ordered variant");
  if (params.variant == Variant::Orbm && params.hidden() == 0)
    throw std::invalid_argument("orbm needs at least one hidden unit");
  return z_distribution_from_prefix(params.variant, params.beta, free_energy_prefix(params, v));
}

double exact_log_partition_small(const ModelParams& params, std::size_t budget) {
  const std::size_t d = params.visible();
  if (d > budget || d >= 63) throw std::invalid_argument("enumeration too large");
  const std::uint64_t count = std::uint64_t{1} << d;
  BinaryVector v(d);
  RealVector terms(count);
  for (std::uint64_t code = 0; code < count; ++code) {
    decode_bits(code, v);
    terms[code] = -free_energy(params, v);
  }
  return log_sum_exp(terms);
}

double rbm_log_partition_by_hidden(const ModelParams& params, std::size_t budget) {
  const std::size_t k = params.hidden();
  if (k > budget || k >= 63) throw std::invalid_argument("enumeration too large");
  const std::size_t d = params.visible();
  const std::uint64_t count = std::uint64_t{1} << k;
  BinaryVector h(k);
  RealVector terms(count);
  for (std::uint64_t code = 0; code < count; ++code) {
    decode_bits(code, h);
    // -F(h) = h.b_h + sum_j soft+(h^T W_.j + b_v_j)
    double t = dot(params.bh, h);
    for (std::size_t j = 0; j < d; ++j) {
      double a = params.bv[j];
      for (std::size_t i = 0; i < k; ++i)
        if (h[i]) a += params.W(i, j);
      t += softplus(a);
    }
    terms[code] = t;
  }
  return log_sum_exp(terms);
}

}  // namespace irbm
