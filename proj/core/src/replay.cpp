#include "rgsc/replay.hpp"

#include <algorithm>
#include <unordered_map>

#include "rgsc/error.hpp"

namespace rgsc {

ReplayBuffer::ReplayBuffer(int window_iterations) : window_(window_iterations) {
  if (window_iterations < 1) throw ConfigError("replay window must be >= 1 iteration");
}

void ReplayBuffer::push_iteration(std::vector<GameRecord> games) {
  iterations_.push_back(std::move(games));
  while (iterations_.size() > size_t(window_)) iterations_.pop_front();
  rebuild_flat();
}

size_t ReplayBuffer::game_count() const {
  size_t n = 0;
  for (const auto& it : iterations_) n += it.size();
  return n;
}

void ReplayBuffer::rebuild_flat() {
  flat_.clear();
  for (const auto& iteration : iterations_) {
    for (const auto& game : iteration) {
      for (size_t i = 0; i < game.trajectory.records.size(); ++i) {
        flat_.push_back({&game, i});
      }
    }
  }
}

TrainBatch make_batch(const ReplayBuffer& replay, size_t batch_size, double regret_clip,
                      Rng& rng) {
  const auto& pool = replay.states();
  if (pool.empty()) throw ContractViolation("make_batch on an empty replay buffer");
  if (batch_size == 0) throw ConfigError("batch_size must be >= 1");

  std::vector<size_t> picks;
  if (batch_size >= pool.size()) {
    picks.resize(pool.size());
    for (size_t i = 0; i < pool.size(); ++i) picks[i] = i;
  } else {
    // Partial Fisher-Yates over an index array.
    std::vector<size_t> idx(pool.size());
    for (size_t i = 0; i < idx.size(); ++i) idx[i] = i;
    picks.reserve(batch_size);
    for (size_t i = 0; i < batch_size; ++i) {
      const size_t j = i + rng.uniform_index(idx.size() - i);
      std::swap(idx[i], idx[j]);
      picks.push_back(idx[i]);
    }
  }

  TrainBatch batch;
  batch.inputs.reserve(picks.size());
  std::unordered_map<const GameRecord*, std::vector<int>> by_game;
  for (const size_t p : picks) {
    const auto& ref = pool[p];
    const auto& rec = ref.game->trajectory.records[ref.index];
    batch.inputs.push_back(rec.state.encode());
    batch.policy_targets.push_back(rec.policy_target);
    batch.value_targets.push_back(ref.game->trajectory.outcome->from(rec.state.to_move()));
    const double r = ref.game->regrets[ref.index];
    batch.regret_targets.push_back(std::clamp(r, 0.0, regret_clip));
    by_game[ref.game].push_back(int(batch.inputs.size()) - 1);
  }
  for (auto& [game, members] : by_game) {
    if (members.size() >= 2) batch.ranking_groups.push_back(std::move(members));
  }
  // Deterministic group order regardless of hash-map iteration.
  std::sort(batch.ranking_groups.begin(), batch.ranking_groups.end());
  return batch;
}

}  // namespace rgsc
