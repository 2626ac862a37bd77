#include <array>
#include <vector>

#include "rgsc/error.hpp"
#include "rules.hpp"

namespace rgsc {
namespace {

constexpr std::array<std::array<int, 2>, 8> kDirs = {
    {{-1, -1}, {-1, 0}, {-1, 1}, {0, -1}, {0, 1}, {1, -1}, {1, 0}, {1, 1}}};

int8_t stone_of(Player p) { return p == Player::First ? int8_t(1) : int8_t(2); }

// Number of opponent discs bracketed from `idx` in direction `d`, 0 if the
// ray is not closed by an own disc.
int captured_in_dir(const GameState& s, int idx, const std::array<int, 2>& d, int8_t own,
                    int8_t opp) {
  const int n = s.board_size();
  int r = idx / n + d[0], c = idx % n + d[1];
  int count = 0;
  while (r >= 0 && r < n && c >= 0 && c < n && s.cell(r * n + c) == opp) {
    ++count;
    r += d[0];
    c += d[1];
  }
  if (count == 0) return 0;
  if (r < 0 || r >= n || c < 0 || c >= n) return 0;
  return s.cell(r * n + c) == own ? count : 0;
}

bool is_flip_move(const GameState& s, int idx, Player p) {
  if (s.cell(idx) != 0) return false;
  const int8_t own = stone_of(p), opp = stone_of(opponent(p));
  for (const auto& d : kDirs) {
    if (captured_in_dir(s, idx, d, own, opp) > 0) return true;
  }
  return false;
}

}  // namespace

bool OthelloRules::mover_has_flip(const GameState& s, Player p) {
  for (int i = 0; i < s.cell_count(); ++i) {
    if (is_flip_move(s, i, p)) return true;
  }
  return false;
}

GameState::Status OthelloRules::count_discs(const GameState& s) {
  int first = 0, second = 0;
  for (int i = 0; i < s.cell_count(); ++i) {
    if (s.cell(i) == 1) ++first;
    if (s.cell(i) == 2) ++second;
  }
  if (first > second) return GameState::Status::FirstWins;
  if (second > first) return GameState::Status::SecondWins;
  return GameState::Status::Draw;
}

std::vector<Action> OthelloRules::legal_actions(const GameState& s) {
  std::vector<Action> out;
  for (int i = 0; i < s.cell_count(); ++i) {
    if (is_flip_move(s, i, s.to_move())) out.push_back(i);
  }
  if (out.empty()) out.push_back(s.pass_action());
  return out;
}

bool OthelloRules::is_legal(const GameState& s, Action a) {
  if (a == s.pass_action()) return !mover_has_flip(s, s.to_move());
  if (a < 0 || a >= s.cell_count()) return false;
  return is_flip_move(s, a, s.to_move());
}

void OthelloRules::apply(GameState& s, Action a) {
  if (a != s.pass_action()) {
    const int n = s.board_size();
    const int8_t own = stone_of(s.to_move_), opp = stone_of(opponent(s.to_move_));
    s.cells_[size_t(a)] = own;
    for (const auto& d : kDirs) {
      const int count = captured_in_dir(s, a, d, own, opp);
      int r = a / n + d[0], c = a % n + d[1];
      for (int k = 0; k < count; ++k) {
        s.cells_[size_t(r * n + c)] = own;
        r += d[0];
        c += d[1];
      }
    }
  }
  s.to_move_ = opponent(s.to_move_);
  s.move_count_ = int16_t(s.move_count_ + 1);
  if (!mover_has_flip(s, s.to_move_) && !mover_has_flip(s, opponent(s.to_move_))) {
    s.status_ = count_discs(s);
  }
}

GameState::Status OthelloRules::full_status(const GameState& s) {
  if (mover_has_flip(s, Player::First) || mover_has_flip(s, Player::Second)) {
    return GameState::Status::Ongoing;
  }
  return count_discs(s);
}

}  // namespace rgsc
