#pragma once

#include "rgsc/game.hpp"

namespace rgsc {

// Internal move logic; GameState dispatches here on kind().

struct HexRules {
  static std::vector<Action> legal_actions(const GameState& s);
  static bool is_legal(const GameState& s, Action a);
  // Mutates a fresh copy made by GameState::apply.
  static void apply(GameState& s, Action a);
  static GameState::Status full_status(const GameState& s);
};

struct OthelloRules {
  static std::vector<Action> legal_actions(const GameState& s);
  static bool is_legal(const GameState& s, Action a);
  static void apply(GameState& s, Action a);
  static GameState::Status full_status(const GameState& s);
  static bool mover_has_flip(const GameState& s, Player p);
  static GameState::Status count_discs(const GameState& s);
};

}  // namespace rgsc
