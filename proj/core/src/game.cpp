#include "rgsc/game.hpp"

#include <charconv>

#include "rgsc/error.hpp"
#include "rules.hpp"

namespace rgsc {
namespace {

char cell_char(int8_t v) { return v == 0 ? '.' : (v == 1 ? 'x' : 'o'); }

int8_t cell_value(char ch) {
  switch (ch) {
    case '.': return 0;
    case 'x': return 1;
    case 'o': return 2;
    default: throw ConfigError(std::string("bad cell character '") + ch + "' in game state");
  }
}

}  // namespace

std::string to_string(GameKind kind) {
  return kind == GameKind::Hex ? "hex" : "othello";
}

GameKind game_kind_from_string(const std::string& name) {
  if (name == "hex") return GameKind::Hex;
  if (name == "othello") return GameKind::Othello;
  throw ConfigError("unknown game '" + name + "' (expected hex or othello)");
}

GameState GameState::initial(GameKind kind, int board_size) {
  if (board_size < 2 || board_size > 19) {
    throw ConfigError("board_size must be in [2, 19], got " + std::to_string(board_size));
  }
  if (kind == GameKind::Othello && board_size % 2 != 0) {
    throw ConfigError("othello board_size must be even, got " + std::to_string(board_size));
  }
  GameState s;
  s.kind_ = kind;
  s.size_ = int8_t(board_size);
  s.cells_.assign(size_t(board_size) * size_t(board_size), 0);
  if (kind == GameKind::Othello) {
    const int h = board_size / 2, n = board_size;
    s.cells_[size_t((h - 1) * n + (h - 1))] = 2;
    s.cells_[size_t(h * n + h)] = 2;
    s.cells_[size_t((h - 1) * n + h)] = 1;
    s.cells_[size_t(h * n + (h - 1))] = 1;
  }
  return s;
}

int GameState::action_count() const {
  return kind_ == GameKind::Othello ? cell_count() + 1 : cell_count();
}

std::optional<Outcome> GameState::terminal_value() const {
  switch (status_) {
    case Status::Ongoing: return std::nullopt;
    case Status::FirstWins: return Outcome{+1};
    case Status::SecondWins: return Outcome{-1};
    case Status::Draw: return Outcome{0};
  }
  return std::nullopt;
}

std::vector<Action> GameState::legal_actions() const {
  if (is_terminal()) throw ContractViolation("legal_actions called on a terminal state");
  return kind_ == GameKind::Hex ? HexRules::legal_actions(*this)
                                : OthelloRules::legal_actions(*this);
}

bool GameState::is_legal(Action a) const {
  if (is_terminal()) return false;
  return kind_ == GameKind::Hex ? HexRules::is_legal(*this, a) : OthelloRules::is_legal(*this, a);
}

GameState GameState::apply(Action a) const {
  if (is_terminal()) throw ContractViolation("apply called on a terminal state");
  if (!is_legal(a)) {
    throw ContractViolation("illegal action " + std::to_string(a) + " in position " + serialize());
  }
  GameState next = *this;
  if (kind_ == GameKind::Hex) {
    HexRules::apply(next, a);
  } else {
    OthelloRules::apply(next, a);
  }
  return next;
}

std::vector<double> GameState::encode() const {
  const size_t cells = size_t(cell_count());
  std::vector<double> planes(3 * cells, 0.0);
  const int8_t own = to_move_ == Player::First ? int8_t(1) : int8_t(2);
  for (size_t i = 0; i < cells; ++i) {
    if (cells_[i] == 0) continue;
    planes[(cells_[i] == own ? 0 : cells) + i] = 1.0;
  }
  if (to_move_ == Player::First) {
    for (size_t i = 0; i < cells; ++i) planes[2 * cells + i] = 1.0;
  }
  return planes;
}

std::string GameState::serialize() const {
  std::string out;
  out += kind_ == GameKind::Hex ? 'h' : 'o';
  out += std::to_string(int(size_));
  out += ':';
  for (int8_t v : cells_) out += cell_char(v);
  out += ':';
  out += to_move_ == Player::First ? 'x' : 'o';
  out += ':';
  out += std::to_string(int(move_count_));
  return out;
}

GameState GameState::deserialize(const std::string& text) {
  if (text.size() < 2) throw ConfigError("game state string too short: '" + text + "'");
  GameKind kind;
  if (text[0] == 'h') {
    kind = GameKind::Hex;
  } else if (text[0] == 'o') {
    kind = GameKind::Othello;
  } else {
    throw ConfigError("game state must start with 'h' or 'o': '" + text + "'");
  }
  const size_t sep1 = text.find(':');
  if (sep1 == std::string::npos) throw ConfigError("malformed game state: '" + text + "'");
  int size = 0;
  const auto [ptr, ec] = std::from_chars(text.data() + 1, text.data() + sep1, size);
  if (ec != std::errc{} || ptr != text.data() + sep1) {
    throw ConfigError("bad board size in game state: '" + text + "'");
  }
  GameState s = initial(kind, size);
  const size_t cells = size_t(size) * size_t(size);
  const size_t sep2 = sep1 + 1 + cells;
  if (text.size() <= sep2 || text[sep2] != ':') {
    throw ConfigError("cell block has wrong length in game state: '" + text + "'");
  }
  for (size_t i = 0; i < cells; ++i) s.cells_[i] = cell_value(text[sep1 + 1 + i]);
  const size_t sep3 = sep2 + 2;
  if (text.size() <= sep3 || text[sep3] != ':') {
    throw ConfigError("malformed mover field in game state: '" + text + "'");
  }
  const char mover = text[sep2 + 1];
  if (mover != 'x' && mover != 'o') {
    throw ConfigError(std::string("bad mover '") + mover + "' in game state");
  }
  s.to_move_ = mover == 'x' ? Player::First : Player::Second;
  int moves = 0;
  const auto [mp, mec] = std::from_chars(text.data() + sep3 + 1, text.data() + text.size(), moves);
  if (mec != std::errc{} || mp != text.data() + text.size() || moves < 0) {
    throw ConfigError("bad move count in game state: '" + text + "'");
  }
  s.move_count_ = int16_t(moves);
  s.refresh_status_full();
  return s;
}

void GameState::refresh_status_full() {
  status_ = kind_ == GameKind::Hex ? HexRules::full_status(*this) : OthelloRules::full_status(*this);
}

}  // namespace rgsc
