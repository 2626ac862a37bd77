#include <array>
#include <vector>

#include "rgsc/error.hpp"
#include "rules.hpp"

namespace rgsc {
namespace {

// Rhombus board with hexagonal adjacency. First connects top row to bottom
// row, second connects left column to right column.
constexpr std::array<std::array<int, 2>, 6> kNeighbors = {
    {{-1, 0}, {-1, 1}, {0, -1}, {0, 1}, {1, -1}, {1, 0}}};

bool group_connects(const GameState& s, int start, int8_t stone) {
  const int n = s.board_size();
  const bool first = stone == 1;
  std::vector<int> stack{start};
  std::vector<char> seen(size_t(n) * size_t(n), 0);
  seen[size_t(start)] = 1;
  bool lo = false, hi = false;
  while (!stack.empty()) {
    const int idx = stack.back();
    stack.pop_back();
    const int r = idx / n, c = idx % n;
    const int coord = first ? r : c;
    lo = lo || coord == 0;
    hi = hi || coord == n - 1;
    if (lo && hi) return true;
    for (const auto& d : kNeighbors) {
      const int rr = r + d[0], cc = c + d[1];
      if (rr < 0 || rr >= n || cc < 0 || cc >= n) continue;
      const int nidx = rr * n + cc;
      if (!seen[size_t(nidx)] && s.cell(nidx) == stone) {
        seen[size_t(nidx)] = 1;
        stack.push_back(nidx);
      }
    }
  }
  return false;
}

}  // namespace

std::vector<Action> HexRules::legal_actions(const GameState& s) {
  std::vector<Action> out;
  out.reserve(size_t(s.cell_count()));
  for (int i = 0; i < s.cell_count(); ++i) {
    if (s.cell(i) == 0) out.push_back(i);
  }
  return out;
}

bool HexRules::is_legal(const GameState& s, Action a) {
  return a >= 0 && a < s.cell_count() && s.cell(a) == 0;
}

void HexRules::apply(GameState& s, Action a) {
  const int8_t stone = s.to_move_ == Player::First ? int8_t(1) : int8_t(2);
  s.cells_[size_t(a)] = stone;
  if (group_connects(s, a, stone)) {
    s.status_ = stone == 1 ? GameState::Status::FirstWins : GameState::Status::SecondWins;
  }
  s.to_move_ = opponent(s.to_move_);
  s.move_count_ = int16_t(s.move_count_ + 1);
}

GameState::Status HexRules::full_status(const GameState& s) {
  const int n = s.board_size();
  // A winning chain must touch the low edge, so scanning it finds every win.
  for (int c = 0; c < n; ++c) {
    if (s.cell(c) == 1 && group_connects(s, c, 1)) return GameState::Status::FirstWins;
  }
  for (int r = 0; r < n; ++r) {
    if (s.cell(r * n) == 2 && group_connects(s, r * n, 2)) return GameState::Status::SecondWins;
  }
  return GameState::Status::Ongoing;
}

}  // namespace rgsc
