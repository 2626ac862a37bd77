#include "rgsc/regret.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_set>

#include "rgsc/error.hpp"

namespace rgsc {
namespace {

double squared_error(const MoveRecord& rec, int z) {
  const double v_ref = rec.state.to_move() == Player::First ? rec.v_selected : -rec.v_selected;
  const double d = v_ref - double(z);
  return d * d;
}

}  // namespace

double compute_regret(const Trajectory& traj, size_t t) {
  if (!traj.finished()) throw ContractViolation("compute_regret on an unfinished trajectory");
  if (traj.records.empty()) throw ContractViolation("compute_regret on an empty trajectory");
  if (t >= traj.records.size()) {
    throw ContractViolation("compute_regret index " + std::to_string(t) + " out of range");
  }
  const int z = traj.outcome->z;
  double sum = 0.0;
  for (size_t i = t; i < traj.records.size(); ++i) sum += squared_error(traj.records[i], z);
  return sum / double(traj.records.size() - t);
}

std::vector<double> compute_all_regrets(const Trajectory& traj) {
  if (!traj.finished()) throw ContractViolation("compute_all_regrets on an unfinished trajectory");
  const size_t n = traj.records.size();
  std::vector<double> out(n, 0.0);
  const int z = traj.outcome->z;
  double suffix = 0.0;
  for (size_t t = n; t-- > 0;) {
    suffix += squared_error(traj.records[t], z);
    out[t] = suffix / double(n - t);
  }
  return out;
}

std::vector<double> ranking_distribution(std::span<const double> scores) {
  if (scores.empty()) throw ContractViolation("ranking_distribution on an empty score list");
  double mx = scores[0];
  for (double s : scores) mx = std::max(mx, s);
  std::vector<double> out(scores.size());
  double sum = 0.0;
  for (size_t i = 0; i < scores.size(); ++i) {
    out[i] = std::exp(scores[i] - mx);
    sum += out[i];
  }
  for (auto& v : out) v /= sum;
  return out;
}

double ranking_loss(std::span<const double> scores, std::span<const double> regrets) {
  return ranking_loss_grad(scores, regrets, {});
}

double ranking_loss_grad(std::span<const double> scores, std::span<const double> regrets,
                         std::span<double> dscores) {
  if (scores.empty()) throw ContractViolation("ranking_loss on an empty score list");
  if (scores.size() != regrets.size()) {
    throw ContractViolation("ranking_loss score/regret length mismatch");
  }
  const size_t n = scores.size();
  double smax = scores[0];
  for (double s : scores) smax = std::max(smax, s);
  double ssum = 0.0;
  for (size_t i = 0; i < n; ++i) ssum += std::exp(scores[i] - smax);
  const double lse = smax + std::log(ssum);

  // Biased log-softmax terms, reduced with their own log-sum-exp.
  double bmax = -1e300;
  std::vector<double> biased(n);
  for (size_t i = 0; i < n; ++i) {
    biased[i] = scores[i] - lse + regrets[i];
    bmax = std::max(bmax, biased[i]);
  }
  double bsum = 0.0;
  for (size_t i = 0; i < n; ++i) bsum += std::exp(biased[i] - bmax);
  const double loss = -(bmax + std::log(bsum));

  if (!dscores.empty()) {
    if (dscores.size() != n) throw ContractViolation("ranking_loss_grad output length mismatch");
    for (size_t i = 0; i < n; ++i) {
      const double p = std::exp(scores[i] - lse);
      const double w = std::exp(biased[i] - bmax) / bsum;
      dscores[i] = p - w;
    }
  }
  return loss;
}

Candidate select_candidate(const Trajectory& traj, std::span<const ScoredState> tree_candidates) {
  if (!traj.finished()) throw ContractViolation("select_candidate on an unfinished trajectory");
  if (traj.records.empty()) throw ContractViolation("select_candidate on an empty trajectory");

  std::unordered_set<std::string> on_trajectory;
  on_trajectory.reserve(traj.records.size() * 2);
  for (const auto& rec : traj.records) on_trajectory.insert(rec.state.serialize());

  Candidate best;
  double best_gamma = -1e300;
  bool found = false;
  for (const auto& node : tree_candidates) {
    if (node.gamma > best_gamma && !on_trajectory.contains(node.state.serialize())) {
      best_gamma = node.gamma;
      best = Candidate{node.state, node.gamma, node.regret_value, CandidateSource::TreeNode};
      found = true;
    }
  }
  const std::vector<double> regrets = compute_all_regrets(traj);
  for (size_t t = 0; t < traj.records.size(); ++t) {
    const auto& rec = traj.records[t];
    if (rec.gamma > best_gamma) {
      best_gamma = rec.gamma;
      best = Candidate{rec.state, rec.gamma, regrets[t], CandidateSource::TrajectoryState};
      found = true;
    }
  }
  if (!found) {
    // Every score tied at -inf cannot happen with real heads; fall back to the
    // opening record so callers always receive a candidate.
    best = Candidate{traj.records[0].state, traj.records[0].gamma, regrets[0],
                     CandidateSource::TrajectoryState};
  }
  return best;
}

}  // namespace rgsc
