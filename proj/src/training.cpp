#include "irbm/training.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "irbm/energy.hpp"

namespace irbm {
namespace {

double soft_threshold(double x, double t) {
  if (x > t) return x - t;
  if (x < -t) return x + t;
  return 0.0;
}

double decay(double x, RegKind kind, double step) {
  switch (kind) {
    case RegKind::None: return x;
    case RegKind::L2: return x * std::max(0.0, 1.0 - step);
    case RegKind::L1: return soft_threshold(x, step);
  }
  return x;
}

GradientSet sampled_z_positive_phase(const ModelParams& params, std::span<const BinaryVector> batch,
                                     RngStream& rng) {
  GradientSet g = GradientSet::zeros_like(params);
  const double w = 1.0 / static_cast<double>(batch.size());
  for (const auto& v : batch) {
    const std::size_t z = sample_z_given_v(params, v, rng);
    g.add_scaled(orbm_free_energy_vz_grads(params, v, z), w);
  }
  return g;
}

}  // namespace

void TrainConfig::validate() const {
  if (!(lr >= 0.0)) throw std::invalid_argument("lr must be non-negative");
  if (!(adagrad_eps > 0.0)) throw std::invalid_argument("adagrad epsilon must be positive");
  if (!(lambda >= 0.0)) throw std::invalid_argument("lambda must be non-negative");
  if (batch_size == 0) throw std::invalid_argument("batch size must be positive");
  if (gibbs_steps == 0) throw std::invalid_argument("gibbs steps must be positive");
}

AdagradState AdagradState::zeros_like(const ModelParams& params) {
  return {RealMatrix(params.hidden(), params.visible()), RealVector(params.visible(), 0.0),
          RealVector(params.hidden(), 0.0)};
}

TrainerState make_trainer(ModelParams params, const TrainConfig& config) {
  validate(params);
  config.validate();
  TrainerState state{std::move(params), {}, {}, RngStream(config.seed, 1), RngStream(config.seed, 2), 0, {}};
  state.adagrad = AdagradState::zeros_like(state.params);
  return state;
}

void adagrad_update(ModelParams& params, const GradientSet& grads, AdagradState& state, double lr, double eps) {
  if (!grads.same_shape(params) || state.W.values().size() != params.W.values().size() ||
      state.bv.size() != params.visible() || state.bh.size() != params.hidden())
    throw std::invalid_argument("adagrad: shape mismatch");
  auto step = [lr, eps](double& theta, double& acc, double g) {
    if (g == 0.0) return;
    acc += g * g;
    theta -= lr * g / (eps + std::sqrt(acc));
  };
  for (std::size_t i = 0; i < params.W.values().size(); ++i)
    step(params.W.values()[i], state.W.values()[i], grads.dW.values()[i]);
  for (std::size_t j = 0; j < params.bv.size(); ++j) step(params.bv[j], state.bv[j], grads.dbv[j]);
  for (std::size_t i = 0; i < params.bh.size(); ++i) step(params.bh[i], state.bh[i], grads.dbh[i]);
}

void apply_regularization(ModelParams& params, RegKind kind, double lambda, double lr_effective) {
  if (lambda < 0.0) throw std::invalid_argument("lambda must be non-negative");
  if (kind == RegKind::None || lambda == 0.0) return;
  const double step = lr_effective * lambda;
  for (double& w : params.W.values()) w = decay(w, kind, step);
  for (double& b : params.bh) b = decay(b, kind, step);
}

void apply_regularization(ModelParams& params, RegKind kind, double lambda, const AdagradState& state,
                          double lr, double eps) {
  if (lambda < 0.0) throw std::invalid_argument("lambda must be non-negative");
  if (kind == RegKind::None || lambda == 0.0) return;
  auto rate = [lr, eps](double acc) { return lr / (eps + std::sqrt(acc)); };
  for (std::size_t i = 0; i < params.W.values().size(); ++i) {
    double& w = params.W.values()[i];
    w = decay(w, kind, rate(state.W.values()[i]) * lambda);
  }
  for (std::size_t i = 0; i < params.bh.size(); ++i)
    params.bh[i] = decay(params.bh[i], kind, rate(state.bh[i]) * lambda);
}

void resize_adagrad(AdagradState& state, std::size_t hidden) {
  const std::size_t d = state.bv.size();
  if (state.W.rows() == 0 && state.W.cols() != d) state.W = RealMatrix(0, d);
  const RealVector zeros(d, 0.0);
  while (state.W.rows() < hidden) state.W.append_row(zeros);
  state.W.truncate_rows(hidden);
  state.bh.resize(hidden, 0.0);
}

UpdateMetrics train_update(ModelParams& params, std::span<const BinaryVector> minibatch, PcdState& pcd,
                           AdagradState& adagrad, const TrainConfig& config, RngStream& rng) {
  if (minibatch.empty()) throw std::invalid_argument("empty minibatch");
  UpdateMetrics metrics;

  double fsum = 0.0;
  for (const auto& v : minibatch) fsum += free_energy(params, v);
  metrics.mean_free_energy = fsum / static_cast<double>(minibatch.size());

  // Negative phase.
  std::vector<ChainState> cd_chains;
  std::vector<ChainState>* chains = &pcd.chains;
  if (config.method == NegativePhase::Cd || pcd.chains.empty()) {
    std::vector<ChainState> fresh;
    fresh.reserve(minibatch.size());
    for (const auto& v : minibatch) fresh.push_back(init_chain(params, ChainInit::FromExample, rng, v));
    if (config.method == NegativePhase::Cd) {
      cd_chains = std::move(fresh);
      chains = &cd_chains;
    } else {
      pcd.chains = std::move(fresh);
    }
  }
  bool tail_hit = false;
  for (auto& chain : *chains) {
    for (std::size_t s = 0; s < config.gibbs_steps; ++s) {
      gibbs_update(params, chain, rng);
      tail_hit = tail_hit || chain.grew;
    }
  }
  std::vector<BinaryVector> negatives;
  negatives.reserve(chains->size());
  for (const auto& chain : *chains) negatives.push_back(chain.v);

  GradientSet grads;
  if (config.positive == PositivePhase::SampledZ && is_ordered(params.variant)) {
    grads = sampled_z_positive_phase(params, minibatch, rng);
    GradientSet neg = GradientSet::zeros_like(params);
    const double w = 1.0 / static_cast<double>(negatives.size());
    for (const auto& v : negatives) accumulate_free_energy_grads(params, v, w, neg);
    grads.add_scaled(neg, -1.0);
  } else {
    grads = nll_gradient_estimate(params, minibatch, negatives);
  }

  adagrad_update(params, grads, adagrad, config.lr, config.adagrad_eps);
  apply_regularization(params, config.reg, config.lambda, adagrad, config.lr, config.adagrad_eps);

  if (params.variant == Variant::Irbm) {
    // Shrink before growing: a freshly grown unit is all-zero and would
    // otherwise be removed in the same update.
    if (config.reg == RegKind::L1) {
      metrics.shrunk = trailing_zero_units(params);
      if (metrics.shrunk > 0) {
        params = shrink_trailing_zero_units(std::move(params));
        resize_adagrad(adagrad, params.hidden());
      }
    }
    if (tail_hit) {
      if (params.hidden() < config.hidden_cap(params.visible())) {
        params = grow_hidden_unit(std::move(params));
        resize_adagrad(adagrad, params.hidden());
        metrics.grew = true;
      } else {
        metrics.cap_reached = true;
      }
    }
    const std::size_t zmax = metrics.cap_reached ? params.hidden() : params.hidden() + 1;
    for (auto& chain : *chains) {
      if (chain.z > zmax) chain.z = zmax;
      if (metrics.cap_reached) chain.grew = false;
    }
  }
  metrics.hidden = params.hidden();
  return metrics;
}

void train(TrainerState& state, const Dataset& data, const TrainConfig& config, const EpochCallback& on_epoch) {
  config.validate();
  if (data.size() == 0) throw std::invalid_argument("empty dataset");
  if (data.dim() != state.params.visible()) throw std::invalid_argument("dataset dimension does not match model");

  std::vector<std::size_t> order(data.size());
  std::vector<BinaryVector> batch;
  for (std::size_t e = 0; e < config.epochs; ++e) {
    const auto start = std::chrono::steady_clock::now();
    std::iota(order.begin(), order.end(), std::size_t{0});
    for (std::size_t i = order.size(); i > 1; --i) std::swap(order[i - 1], order[state.shuffle_rng.below(i)]);

    double fsum = 0.0;
    for (std::size_t begin = 0; begin < order.size(); begin += config.batch_size) {
      const std::size_t end = std::min(order.size(), begin + config.batch_size);
      batch.clear();
      for (std::size_t i = begin; i < end; ++i) batch.push_back(data.example(order[i]));
      const UpdateMetrics m =
          train_update(state.params, batch, state.pcd, state.adagrad, config, state.sample_rng);
      fsum += m.mean_free_energy * static_cast<double>(batch.size());
    }
    ++state.epoch;
    const std::chrono::duration<double> wall = std::chrono::steady_clock::now() - start;
    EpochRecord rec{state.epoch, fsum / static_cast<double>(data.size()), state.params.hidden(), wall.count()};
    state.history.push_back(rec);
    if (on_epoch) on_epoch(state, rec);
  }
}

}  // namespace irbm
