#pragma once

#include <filesystem>
#include <vector>

#include "irbm/model.hpp"
#include "irbm/training.hpp"

namespace irbm {

/// Checkpoint directory layout:
///   meta.json      variant, D, K, beta, seed, epoch, generator states, chain count
///   W.f64 bv.f64 bh.f64                        parameters, raw little-endian doubles (W row-major)
///   adagrad_W.f64 adagrad_bv.f64 adagrad_bh.f64 ADAGRAD accumulators
///   pcd_v.u8       persistent chain visibles, one byte per unit, chain-major
///   pcd_z.i64      persistent chain z values, little-endian int64
///   history.csv    epoch,mean_free_energy,K,wall_seconds
/// Chain hidden vectors and flags are not stored: every Gibbs sweep redraws
/// them from v, so a restored run continues identically.
void write_checkpoint(const std::filesystem::path& dir, const TrainerState& state);

/// Restores everything write_checkpoint stored. Throws std::runtime_error on a
/// missing or malformed checkpoint.
TrainerState read_checkpoint(const std::filesystem::path& dir);

/// Parameters only.
ModelParams read_checkpoint_model(const std::filesystem::path& dir);

void write_history_csv(const std::filesystem::path& path, const std::vector<EpochRecord>& history);

}  // namespace irbm
