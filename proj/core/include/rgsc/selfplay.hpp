#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "rgsc/archives.hpp"
#include "rgsc/mcts.hpp"
#include "rgsc/net.hpp"
#include "rgsc/regret.hpp"

namespace rgsc {

struct SelfplayConfig {
  MctsConfig mcts;             // noise is enabled by the caller for self-play
  double temperature = 1.0;    // move sampling, all moves
  int max_game_moves = 0;      // 0 selects 2 * board cells
};

struct GameRecord {
  Trajectory trajectory;
  std::vector<double> regrets;  // per record, computed at game end
  Candidate candidate;          // restart candidate for this game
  int iteration = 0;
  int worker = 0;
  int game_index = 0;

  size_t states() const { return trajectory.records.size(); }
};

// Plays one full game: draws the opening from the store, searches every
// move, computes per-state regrets and the restart candidate, then performs
// the store's bookkeeping (EMA update or offer for the regret buffer,
// pushes for the circular archives).
GameRecord play_game(const Net& net, const NetParams& params, RestartStore& store,
                     const SelfplayConfig& cfg, Rng& rng);

// One-line JSON form used for the per-iteration game log.
std::string game_record_to_json(const GameRecord& rec);
GameRecord game_record_from_json(const std::string& line);

void write_game_log(const std::filesystem::path& path, const std::vector<GameRecord>& games);
std::vector<GameRecord> read_game_log(const std::filesystem::path& path);

}  // namespace rgsc
