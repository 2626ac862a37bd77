#pragma once

#include <deque>
#include <vector>

#include "rgsc/net.hpp"
#include "rgsc/rng.hpp"
#include "rgsc/selfplay.hpp"

namespace rgsc {

// Ring of the most recent training iterations' game records.
class ReplayBuffer {
 public:
  explicit ReplayBuffer(int window_iterations);

  void push_iteration(std::vector<GameRecord> games);
  int window() const { return window_; }
  size_t iteration_count() const { return iterations_.size(); }
  size_t game_count() const;
  size_t state_count() const { return flat_.size(); }

  struct StateRef {
    const GameRecord* game;
    size_t index;  // record index within the game
  };
  const std::vector<StateRef>& states() const { return flat_; }

 private:
  void rebuild_flat();

  int window_;
  std::deque<std::vector<GameRecord>> iterations_;
  std::vector<StateRef> flat_;
};

// Uniform sample of states across the retained window, without replacement
// inside one batch (the whole population when batch_size exceeds it).
// Ranking groups collect the sampled states by source game; singletons are
// left out. Regret targets are clipped to [0, regret_clip].
TrainBatch make_batch(const ReplayBuffer& replay, size_t batch_size, double regret_clip,
                      Rng& rng);

}  // namespace rgsc
