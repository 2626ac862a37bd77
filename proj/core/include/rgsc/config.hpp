#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "rgsc/game.hpp"
#include "rgsc/mcts.hpp"
#include "rgsc/net.hpp"

namespace rgsc {

enum class Method : int8_t { AlphaZero, Gevc, Gesc, Rgsc };

std::string to_string(Method m);
Method method_from_string(const std::string& name);

// Every tunable of a training run. Defaults are the desk-scale profile:
// 5x5 Hex, one 32-filter residual block, 50 simulations, 4000 states and
// 50 optimization steps of batch 256 per iteration, 40 iterations.
struct RunConfig {
  GameKind game = GameKind::Hex;
  int board_size = 5;
  Method method = Method::Rgsc;
  uint64_t seed = 1;

  int iterations = 40;
  int states_per_iteration = 4000;
  int optimization_steps = 50;
  int batch_size = 256;
  int replay_window = 20;  // iterations retained
  int workers = 0;         // 0 = hardware concurrency

  // Network.
  TorsoKind torso = TorsoKind::Conv;
  int blocks = 1;
  int filters = 32;
  int hidden = 32;
  ActivationKind activation = ActivationKind::Relu;

  // Search.
  int simulations = 50;
  double c_puct = 1.5;
  double dirichlet_ratio = 0.25;
  double dirichlet_alpha = 0.0;  // <= 0 selects 10 / cells

  // Optimizer.
  double learning_rate = 0.02;
  double momentum = 0.9;
  double weight_decay = 0.0001;

  // Loss weights (regret heads are switched off for non-rgsc methods).
  double w_policy = 1.0;
  double w_value = 1.0;
  double w_regret = 1.0;
  double w_ranking = 1.0;

  // Restart policy.
  double lambda = 0.5;
  double tau = 0.1;
  double ema_alpha = 0.5;
  int prb_capacity = 100;
  int archive_capacity = 2000;

  // Self-play.
  double temperature = 1.0;
  double regret_clip = 4.0;
  int warmup_games = 0;  // buffer warm-up games excluded from training data

  // Regret-head bootstrap when continuing from a model without trained
  // regret heads.
  int freeze_games = 100;
  int freeze_steps = 200;

  GameState initial_state() const { return GameState::initial(game, board_size); }
  NetConfig net_config() const;
  MctsConfig mcts_config(bool selfplay) const;
  LossWeights loss_weights() const;
  int resolved_workers() const;

  // Hash over the fields a checkpoint must agree on (game + network shape).
  uint64_t config_hash() const;

  // Throws ConfigError naming the offending field; returns warnings about
  // fields the chosen method ignores.
  std::vector<std::string> validate() const;
};

RunConfig run_config_from_json(const std::string& text);
RunConfig run_config_from_file(const std::filesystem::path& path);
std::string run_config_to_json(const RunConfig& cfg);

}  // namespace rgsc
