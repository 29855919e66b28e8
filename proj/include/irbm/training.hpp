#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "irbm/data_io.hpp"
#include "irbm/gradients.hpp"
#include "irbm/model.hpp"
#include "irbm/rng.hpp"
#include "irbm/sampling.hpp"

namespace irbm {

enum class RegKind { None, L1, L2 };
enum class NegativePhase { Cd, Pcd };

/// How the positive phase of the ordered variants treats z. Expected uses the
/// exact F(v) gradient; SampledZ draws z ~ P(z|v) and uses the F(v, z) gradient.
enum class PositivePhase { Expected, SampledZ };

struct TrainConfig {
  double lr = 0.05;
  double adagrad_eps = 1e-6;
  RegKind reg = RegKind::None;
  double lambda = 0.0;
  std::size_t batch_size = 64;
  std::size_t gibbs_steps = 10;
  std::size_t epochs = 5000;
  NegativePhase method = NegativePhase::Pcd;
  PositivePhase positive = PositivePhase::Expected;
  std::uint64_t seed = 1234;
  /// Upper bound on the iRBM size; 0 means 10 * D.
  std::size_t max_hidden_cap = 0;

  /// Throws std::invalid_argument on lr < 0, lambda < 0 or zero steps/batch.
  void validate() const;
  std::size_t hidden_cap(std::size_t visible) const { return max_hidden_cap ? max_hidden_cap : 10 * visible; }
};

/// Running sum of squared gradients, one entry per parameter.
struct AdagradState {
  RealMatrix W;
  RealVector bv;
  RealVector bh;

  static AdagradState zeros_like(const ModelParams& params);
  bool operator==(const AdagradState&) const = default;
};

struct PcdState {
  std::vector<ChainState> chains;
  bool operator==(const PcdState&) const = default;
};

struct UpdateMetrics {
  double mean_free_energy = 0.0;
  std::size_t hidden = 0;
  bool grew = false;
  std::size_t shrunk = 0;
  bool cap_reached = false;
};

struct EpochRecord {
  std::size_t epoch = 0;
  double mean_free_energy = 0.0;
  std::size_t hidden = 0;
  double wall_seconds = 0.0;
};

/// Everything a run carries between updates.
struct TrainerState {
  ModelParams params;
  AdagradState adagrad;
  PcdState pcd;
  RngStream shuffle_rng;
  RngStream sample_rng;
  std::size_t epoch = 0;
  std::vector<EpochRecord> history;
};

TrainerState make_trainer(ModelParams params, const TrainConfig& config);

/// accumulator += g^2; theta -= lr * g / (eps + sqrt(accumulator)).
void adagrad_update(ModelParams& params, const GradientSet& grads, AdagradState& state, double lr, double eps);

/// Weight decay on W and b_h (never b_v) with one step size for every entry.
/// L2: theta *= max(0, 1 - lr_eff * lambda). L1: soft-threshold at lr_eff * lambda.
void apply_regularization(ModelParams& params, RegKind kind, double lambda, double lr_effective);

/// Same, with the per-entry ADAGRAD step size lr / (eps + sqrt(accumulator)).
void apply_regularization(ModelParams& params, RegKind kind, double lambda, const AdagradState& state,
                          double lr, double eps);

/// Keeps the ADAGRAD rows in lockstep with an iRBM that grew or shrank.
void resize_adagrad(AdagradState& state, std::size_t hidden);

/// One stochastic gradient step: negative phase (CD or PCD), gradient, ADAGRAD,
/// regularization, then the iRBM shrink/grow lifecycle.
UpdateMetrics train_update(ModelParams& params, std::span<const BinaryVector> minibatch, PcdState& pcd,
                           AdagradState& adagrad, const TrainConfig& config, RngStream& rng);

using EpochCallback = std::function<void(const TrainerState&, const EpochRecord&)>;

/// Runs config.epochs epochs over seeded shuffles of `data`.
void train(TrainerState& state, const Dataset& data, const TrainConfig& config,
           const EpochCallback& on_epoch = {});

}  // namespace irbm
