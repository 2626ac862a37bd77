#pragma once

#include <filesystem>
#include <string>

#include "rgsc/config.hpp"
#include "rgsc/net.hpp"

namespace rgsc {

// Self-describing snapshot of a training run at one iteration. Parameters
// and optimizer velocity round-trip bit-exactly.
struct Checkpoint {
  int iteration = 0;
  Method method = Method::AlphaZero;
  bool regret_heads_trained = false;
  uint64_t config_hash = 0;
  // Enough to rebuild the Net without the run config.
  GameKind game = GameKind::Hex;
  int board_size = 5;
  TorsoKind torso = TorsoKind::Conv;
  int blocks = 1;
  int filters = 32;
  int hidden = 32;
  ActivationKind activation = ActivationKind::Relu;

  NetParams params;
  SgdState opt;

  NetConfig net_config() const;
  GameState initial_state() const { return GameState::initial(game, board_size); }
};

Checkpoint make_checkpoint(const RunConfig& cfg, int iteration, bool regret_heads_trained,
                           NetParams params, SgdState opt);

void save_checkpoint(const std::filesystem::path& path, const Checkpoint& ckpt);
Checkpoint load_checkpoint(const std::filesystem::path& path);
// Refuses (ConfigError) when the stored hash differs from expected_hash.
Checkpoint load_checkpoint(const std::filesystem::path& path, uint64_t expected_hash);

}  // namespace rgsc
