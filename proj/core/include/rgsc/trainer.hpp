#pragma once

#include <filesystem>
#include <optional>

#include "rgsc/checkpoint.hpp"
#include "rgsc/config.hpp"
#include "rgsc/net.hpp"

namespace rgsc {

struct TrainOutcome {
  std::filesystem::path run_dir;
  int final_iteration = 0;
};

// Fresh run into run_dir: ckpt_<i>.bin per iteration (ckpt_0 before any
// training), metrics.csv, games/iter_<i>.jsonl, buffers/iter_<i>_w<w>.json.
// When initial_params is set they seed the network (continued training);
// otherwise parameters are initialized from cfg.seed.
TrainOutcome run_training(const RunConfig& cfg, const std::filesystem::path& run_dir,
                          std::optional<NetParams> initial_params = std::nullopt,
                          bool regret_heads_pretrained = false);

// Continue an interrupted run in place from one of its checkpoints. The
// config must match the run's stored config exactly.
TrainOutcome resume_training(const RunConfig& cfg, const std::filesystem::path& run_dir,
                             const std::filesystem::path& checkpoint_path);

struct FreezeOutcome {
  NetParams params;
  double rank_loss_before = 0.0;
  double rank_loss_after = 0.0;
  double regret_loss_before = 0.0;
  double regret_loss_after = 0.0;
};

// Trains only the regret-value and ranking heads on freshly generated
// self-play games; every other parameter is bit-identical afterwards.
FreezeOutcome freeze_heads_phase(const RunConfig& cfg, const NetParams& base, uint64_t seed);

}  // namespace rgsc
