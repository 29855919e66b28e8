#include "irbm/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <thread>

#include "irbm/rng.hpp"
#include "irbm/sampling.hpp"

namespace irbm {
namespace {

// Quantities of one intermediate distribution shared by every chain.
struct Tempered {
  double t = 0.0;
  RealVector bv;
  RealVector penalties;
};

Tempered make_tempered(const ModelParams& params, std::span<const double> base_bv, double t) {
  Tempered tp;
  tp.t = t;
  tp.bv.resize(params.visible());
  for (std::size_t j = 0; j < tp.bv.size(); ++j) tp.bv[j] = (1.0 - t) * base_bv[j] + t * params.bv[j];
  if (is_ordered(params.variant)) {
    tp.penalties.resize(params.hidden());
    for (std::size_t i = 0; i < params.hidden(); ++i) tp.penalties[i] = params.beta * softplus(t * params.bh[i]);
  }
  return tp;
}

// Scratch buffers of one worker.
struct AisScratch {
  RealVector x;
  RealVector scaled;
  RealVector prefix_prev;
  RealVector prefix_cur;
  RealVector logits;
  BinaryVector h;
};

double ordered_tempered_free_energy(const ModelParams& params, const Tempered& tp, std::span<const std::uint8_t> v,
                                    std::span<const double> x, RealVector& scaled, RealVector& prefix) {
  for (std::size_t i = 0; i < x.size(); ++i) scaled[i] = tp.t * x[i];
  free_energy_prefix(dot(tp.bv, v), scaled, tp.penalties, prefix);
  return ordered_free_energy_from_prefix(params.variant, params.beta, prefix);
}

// Advances one chain from distribution k-1 to k: accumulates the weight
// increment at the current v, then applies one Gibbs sweep that leaves p_k invariant.
double ais_step(const ModelParams& params, const Tempered& prev, const Tempered& cur, BinaryVector& v,
                RngStream& rng, AisScratch& s) {
  const std::size_t k = params.hidden();
  const std::size_t d = params.visible();
  for (std::size_t i = 0; i < k; ++i) s.x[i] = dot(params.W.row(i), v) + params.bh[i];

  double increment = 0.0;
  std::size_t active = k;
  if (params.variant == Variant::Rbm) {
    double f_prev = -dot(prev.bv, v);
    double f_cur = -dot(cur.bv, v);
    for (std::size_t i = 0; i < k; ++i) {
      f_prev -= softplus(prev.t * s.x[i]);
      const double y = cur.t * s.x[i];
      const double e = std::exp(-std::abs(y));
      f_cur -= std::max(y, 0.0) + std::log1p(e);
      const double p = y >= 0.0 ? 1.0 / (1.0 + e) : e / (1.0 + e);
      s.h[i] = rng.uniform() < p ? 1 : 0;
    }
    increment = f_prev - f_cur;
  } else {
    const double f_prev = ordered_tempered_free_energy(params, prev, v, s.x, s.scaled, s.prefix_prev);
    const double f_cur = ordered_tempered_free_energy(params, cur, v, s.x, s.scaled, s.prefix_cur);
    increment = f_prev - f_cur;
    const ZDistribution dist = z_distribution_from_prefix(params.variant, params.beta, s.prefix_cur);
    active = std::min(sample_z(dist, rng), k);
    for (std::size_t i = 0; i < k; ++i)
      s.h[i] = i < active && rng.uniform() < sigmoid(cur.t * s.x[i]) ? 1 : 0;
  }

  for (std::size_t j = 0; j < d; ++j) s.logits[j] = 0.0;
  for (std::size_t i = 0; i < active; ++i) {
    if (!s.h[i]) continue;
    const auto row = params.W.row(i);
    for (std::size_t j = 0; j < d; ++j) s.logits[j] += row[j];
  }
  for (std::size_t j = 0; j < d; ++j) v[j] = rng.uniform() < sigmoid(cur.t * s.logits[j] + cur.bv[j]) ? 1 : 0;
  return increment;
}

void run_ais_block(const ModelParams& params, const AisConfig& config, std::span<const double> base_bv,
                   std::size_t first, std::size_t last, std::span<double> log_weights) {
  const std::size_t n = config.num_intermediate;
  const std::size_t chains = last - first;
  std::vector<RngStream> rngs;
  std::vector<BinaryVector> states(chains, BinaryVector(params.visible()));
  rngs.reserve(chains);
  for (std::size_t c = 0; c < chains; ++c) {
    rngs.emplace_back(config.seed, first + c);
    for (std::size_t j = 0; j < params.visible(); ++j)
      states[c][j] = rngs[c].uniform() < sigmoid(base_bv[j]) ? 1 : 0;
    log_weights[first + c] = 0.0;
  }

  AisScratch s;
  s.x.resize(params.hidden());
  s.scaled.resize(params.hidden());
  s.prefix_prev.resize(params.hidden() + 1);
  s.prefix_cur.resize(params.hidden() + 1);
  s.logits.resize(params.visible());
  s.h.resize(params.hidden());

  Tempered prev = make_tempered(params, base_bv, 0.0);
  for (std::size_t step = 1; step <= n; ++step) {
    Tempered cur = make_tempered(params, base_bv, static_cast<double>(step) / static_cast<double>(n));
    for (std::size_t c = 0; c < chains; ++c)
      log_weights[first + c] += ais_step(params, prev, cur, states[c], rngs[c], s);
    prev = std::move(cur);
  }
}

}  // namespace

double exact_nll(const ModelParams& params, const Dataset& data) {
  if (data.size() == 0) throw std::invalid_argument("empty dataset");
  const double ln_z = exact_log_partition_small(params);
  double total = 0.0;
  for (std::size_t n = 0; n < data.size(); ++n) total += free_energy(params, data.row(n)) + ln_z;
  return total / static_cast<double>(data.size());
}

void AisConfig::validate() const {
  if (num_intermediate < 1) throw std::invalid_argument("AIS needs at least one intermediate distribution");
  if (num_chains < 2) throw std::invalid_argument("AIS needs at least two chains");
}

RealVector data_marginal_visible_bias(const Dataset& data) {
  RealVector out(data.dim());
  for (std::size_t j = 0; j < data.dim(); ++j) {
    double count = 0.0;
    for (std::size_t n = 0; n < data.size(); ++n) count += data.row(n)[j];
    const double p = (count + 1.0) / (static_cast<double>(data.size()) + 2.0);
    out[j] = std::log(p) - std::log1p(-p);
  }
  return out;
}

double base_log_partition(Variant variant, std::size_t hidden, double beta, std::span<const double> bv) {
  double ln_z = 0.0;
  for (double b : bv) ln_z += softplus(b);
  switch (variant) {
    case Variant::Rbm: return ln_z + static_cast<double>(hidden) * std::numbers::ln2;
    case Variant::Orbm: {
      // sum_{z=1}^{K} r^z with ln r = (1 - beta) ln 2.
      const double log_r = (1.0 - beta) * std::numbers::ln2;
      RealVector terms(hidden);
      for (std::size_t z = 1; z <= hidden; ++z) terms[z - 1] = static_cast<double>(z) * log_r;
      return ln_z + log_sum_exp(terms);
    }
    case Variant::Irbm: return ln_z + log_geometric_tail(beta);
  }
  throw std::logic_error("unreachable");
}

AisResult ais_log_partition(const ModelParams& params, const AisConfig& config) {
  validate(params);
  config.validate();

  RealVector base_bv(params.visible(), 0.0);
  switch (config.base) {
    case AisBase::TargetVisible: base_bv = params.bv; break;
    case AisBase::ZeroVisible: break;
    case AisBase::DataMarginals:
      if (config.base_visible_bias.size() != params.visible())
        throw std::invalid_argument("AIS base visible bias has wrong length");
      base_bv = config.base_visible_bias;
      break;
  }

  AisResult result;
  result.ln_z_base = base_log_partition(params.variant, params.hidden(), params.beta, base_bv);
  result.log_weights.assign(config.num_chains, 0.0);

  const std::size_t workers = std::clamp<std::size_t>(config.threads, 1, config.num_chains);
  if (workers == 1) {
    run_ais_block(params, config, base_bv, 0, config.num_chains, result.log_weights);
  } else {
    std::vector<std::thread> pool;
    const std::size_t per = (config.num_chains + workers - 1) / workers;
    for (std::size_t w = 0; w < workers; ++w) {
      const std::size_t first = w * per;
      const std::size_t last = std::min(config.num_chains, first + per);
      if (first >= last) break;
      pool.emplace_back([&, first, last] { run_ais_block(params, config, base_bv, first, last, result.log_weights); });
    }
    for (auto& t : pool) t.join();
  }

  for (double lw : result.log_weights)
    if (!std::isfinite(lw)) throw std::runtime_error("AIS diverged");

  const double m = static_cast<double>(config.num_chains);
  const double shift = *std::max_element(result.log_weights.begin(), result.log_weights.end());
  double sum = 0.0, sum_sq = 0.0;
  for (double lw : result.log_weights) {
    const double w = std::exp(lw - shift);
    sum += w;
    sum_sq += w * w;
  }
  const double mean = sum / m;
  double var = 0.0;
  for (double lw : result.log_weights) {
    const double dw = std::exp(lw - shift) - mean;
    var += dw * dw;
  }
  var /= m - 1.0;
  const double stderr_mean = std::sqrt(var / m);

  const double offset = result.ln_z_base + shift;
  result.ln_z_hat = offset + std::log(mean);
  const double lo = mean - 3.0 * stderr_mean;
  result.ln_z_lo3sigma = lo > 0.0 ? offset + std::log(lo) : -std::numeric_limits<double>::infinity();
  result.ln_z_hi3sigma = offset + std::log(mean + 3.0 * stderr_mean);
  result.ess = sum * sum / sum_sq;
  return result;
}

NllEstimate estimate_nll(const ModelParams& params, const Dataset& data, double ln_z) {
  if (data.size() == 0) throw std::invalid_argument("empty dataset");
  const double n = static_cast<double>(data.size());
  RealVector nll(data.size());
  double total = 0.0;
  for (std::size_t i = 0; i < data.size(); ++i) {
    nll[i] = free_energy(params, data.row(i)) + ln_z;
    total += nll[i];
  }
  const double mean = total / n;
  double var = 0.0;
  for (double x : nll) var += (x - mean) * (x - mean);
  var /= n;
  return {mean, 1.96 * std::sqrt(var) / std::sqrt(n)};
}

bool GradcheckReport::pass() const {
  return std::all_of(blocks.begin(), blocks.end(), [](const GradcheckBlock& b) { return b.pass; });
}

GradcheckReport gradcheck(const ModelParams& params, std::span<const std::uint8_t> v, const GradientSet& analytic,
                          double rel_tol, double abs_tol, double h) {
  if (!analytic.same_shape(params)) throw std::invalid_argument("gradient shape mismatch");
  GradcheckReport report;
  report.blocks[0].name = "W";
  report.blocks[1].name = "bv";
  report.blocks[2].name = "bh";

  ModelParams probe = params;
  auto check = [&](GradcheckBlock& block, double& slot, double a, std::size_t index) {
    const double saved = slot;
    slot = saved + h;
    const double up = free_energy(probe, v);
    slot = saved - h;
    const double down = free_energy(probe, v);
    slot = saved;
    const double numeric = (up - down) / (2.0 * h);
    const double err = std::abs(a - numeric);
    const double mag = std::max(std::abs(a), std::abs(numeric));
    const double rel = mag > 0.0 ? err / mag : 0.0;
    const double scaled = err / std::max(rel_tol * mag, abs_tol);
    block.max_abs_error = std::max(block.max_abs_error, err);
    block.max_rel_error = std::max(block.max_rel_error, rel);
    if (scaled > block.max_scaled_error) {
      block.max_scaled_error = scaled;
      block.worst_index = index;
    }
  };
  for (std::size_t i = 0; i < probe.W.values().size(); ++i)
    check(report.blocks[0], probe.W.values()[i], analytic.dW.values()[i], i);
  for (std::size_t j = 0; j < probe.bv.size(); ++j) check(report.blocks[1], probe.bv[j], analytic.dbv[j], j);
  for (std::size_t i = 0; i < probe.bh.size(); ++i) check(report.blocks[2], probe.bh[i], analytic.dbh[i], i);
  for (auto& b : report.blocks) b.pass = b.max_scaled_error <= 1.0;
  return report;
}

GradcheckReport gradcheck(const ModelParams& params, std::span<const std::uint8_t> v, double rel_tol,
                          double abs_tol, double h) {
  return gradcheck(params, v, free_energy_grads(params, v), rel_tol, abs_tol, h);
}

ZInspection inspect_z(const ModelParams& params, const Dataset& examples,
                      std::span<const std::pair<std::size_t, std::size_t>> intervals, std::size_t top_k) {
  if (!is_ordered(params.variant)) throw std::invalid_argument("z inspection needs an ordered variant");
  ZInspection out;
  out.distributions.reserve(examples.size());
  for (std::size_t n = 0; n < examples.size(); ++n) out.distributions.push_back(p_z_given_v(params, examples.row(n)));

  for (const auto& [a, b] : intervals) {
    IntervalRanking ranking{a, b, {}};
    for (std::size_t n = 0; n < out.distributions.size(); ++n)
      ranking.top.emplace_back(n, out.distributions[n].interval(a, b));
    std::stable_sort(ranking.top.begin(), ranking.top.end(),
                     [](const auto& x, const auto& y) { return x.second > y.second; });
    if (ranking.top.size() > top_k) ranking.top.resize(top_k);
    out.rankings.push_back(std::move(ranking));
  }
  return out;
}

}  // namespace irbm
