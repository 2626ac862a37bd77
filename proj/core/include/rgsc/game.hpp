#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace rgsc {

enum class Player : int8_t { First = 0, Second = 1 };

inline Player opponent(Player p) {
  return p == Player::First ? Player::Second : Player::First;
}

enum class GameKind : int8_t { Hex, Othello };

std::string to_string(GameKind kind);
GameKind game_kind_from_string(const std::string& name);

// Action identifiers are cell indices row * size + col; Othello additionally
// has size*size as the explicit pass action.
using Action = int;

// Game result from the fixed reference perspective (the first player).
struct Outcome {
  int z = 0;  // -1, 0, +1

  double from(Player perspective) const {
    return perspective == Player::First ? double(z) : -double(z);
  }
  bool operator==(const Outcome&) const = default;
};

// Immutable position in Hex or Othello. All mutators return a new state;
// instances are safe to share across threads.
class GameState {
 public:
  static GameState initial(GameKind kind, int board_size);

  GameKind kind() const { return kind_; }
  int board_size() const { return size_; }
  int cell_count() const { return int(size_) * int(size_); }
  // Full action space, including the Othello pass slot.
  int action_count() const;
  Player to_move() const { return to_move_; }
  int move_count() const { return move_count_; }

  bool is_terminal() const { return status_ != Status::Ongoing; }
  std::optional<Outcome> terminal_value() const;

  // Nonempty list of playable actions; throws ContractViolation on a
  // terminal state. Othello yields the singleton pass when no flip exists.
  std::vector<Action> legal_actions() const;
  bool is_legal(Action a) const;

  GameState apply(Action a) const;

  // Feature planes for the network: mover stones, opponent stones, and a
  // constant plane that is 1 when the first player is to move.
  static constexpr int kEncodeChannels = 3;
  std::vector<double> encode() const;

  // One-line text form: "<kind><size>:<cells>:<mover>:<move_count>".
  std::string serialize() const;
  static GameState deserialize(const std::string& text);

  bool operator==(const GameState& other) const = default;

  // 0 empty, 1 first player, 2 second player.
  int8_t cell(int idx) const { return cells_[size_t(idx)]; }
  int pass_action() const { return cell_count(); }

 private:
  enum class Status : int8_t { Ongoing, FirstWins, SecondWins, Draw };

  GameState() = default;
  void refresh_status_full();

  friend struct HexRules;
  friend struct OthelloRules;

  GameKind kind_ = GameKind::Hex;
  int8_t size_ = 0;
  Player to_move_ = Player::First;
  int16_t move_count_ = 0;
  Status status_ = Status::Ongoing;
  std::vector<int8_t> cells_;
};

}  // namespace rgsc
