#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "rgsc/game.hpp"

namespace rgsc {

enum class OpeningKind : int8_t { InitialState, Buffer, Archive };

struct Provenance {
  OpeningKind kind = OpeningKind::InitialState;
  uint64_t entry_id = 0;  // meaningful for Buffer openings

  bool operator==(const Provenance&) const = default;
};

// One decision point of a self-play game. v_selected is the post-search mean
// value of the chosen action from the perspective of the player to move at
// this state; gamma is the ranking score from this state's root evaluation.
struct MoveRecord {
  GameState state;
  Action action = -1;
  double v_selected = 0.0;
  double gamma = 0.0;
  std::vector<double> policy_target;  // visit distribution over the full action space
};

struct Trajectory {
  std::vector<MoveRecord> records;
  std::optional<Outcome> outcome;  // set once the game is finished
  Provenance opening;
  int opening_move_count = 0;

  bool finished() const { return outcome.has_value(); }
};

// A state evaluated during tree search, with the network outputs cached at
// expansion time.
struct ScoredState {
  GameState state;
  double gamma = 0.0;
  double regret_value = 0.0;
};

}  // namespace rgsc
