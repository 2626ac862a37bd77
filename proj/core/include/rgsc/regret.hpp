#pragma once

#include <span>
#include <vector>

#include "rgsc/trajectory.hpp"

namespace rgsc {

// Mean squared discrepancy between the search values of the remaining
// decisions and the game outcome, both taken in the first-player frame.
// Requires a finished trajectory and 0 <= t < records.size().
double compute_regret(const Trajectory& traj, size_t t);

// All suffix regrets in one O(T) pass; element t equals compute_regret(traj, t).
std::vector<double> compute_all_regrets(const Trajectory& traj);

// Softmax over ranking scores with max subtraction.
std::vector<double> ranking_distribution(std::span<const double> scores);

// -log sum_s exp(log softmax(score_s) + regret_s), computed via log-sum-exp.
double ranking_loss(std::span<const double> scores, std::span<const double> regrets);

// Same value, plus d(loss)/d(score) written into dscores.
double ranking_loss_grad(std::span<const double> scores, std::span<const double> regrets,
                         std::span<double> dscores);

enum class CandidateSource : int8_t { TrajectoryState, TreeNode };

struct Candidate {
  GameState state;
  double gamma = 0.0;
  double regret = 0.0;
  CandidateSource source = CandidateSource::TrajectoryState;
};

// Single restart candidate for a finished game: the globally maximal ranking
// score across tree-only nodes (scanned first, in encounter order) and
// trajectory states, with strict-> replacement. Trajectory winners carry
// their computed regret, tree-only winners the cached regret-value estimate.
// States that appear in the trajectory are skipped during the tree scan so
// they always resolve with their computed regret.
Candidate select_candidate(const Trajectory& traj, std::span<const ScoredState> tree_candidates);

}  // namespace rgsc
