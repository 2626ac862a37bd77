#pragma once

#include <string>
#include <vector>

#include "rgsc/net.hpp"
#include "rgsc/rng.hpp"
#include "rgsc/trajectory.hpp"

namespace rgsc {

struct MctsConfig {
  int simulations = 50;
  double c_puct = 1.5;
  bool add_noise = false;  // Dirichlet noise at the root (self-play only)
  double dirichlet_ratio = 0.25;
  double dirichlet_alpha = 0.0;  // <= 0 selects 10 / board cells
};

struct SearchResult {
  int action_count = 0;
  int simulations = 0;
  std::vector<double> visits;  // raw visit counts per action
  std::vector<double> q;       // mean value per action, root-mover perspective
  // Every node expanded by the network during this search, root first, in
  // expansion order, with gamma / regret-value cached at expansion time.
  std::vector<ScoredState> expanded;

  std::vector<double> visit_distribution() const;
  double value_of(Action a) const { return q[size_t(a)]; }
};

SearchResult search(const GameState& root, const Net& net, const NetParams& params,
                    const MctsConfig& cfg, Rng& rng);

// Sample proportionally to visits^(1/temperature); temperature 0 plays the
// most-visited action with lowest-index tie-break.
Action select_action(const SearchResult& result, double temperature, Rng& rng);

// All nodes expanded during the search (the root included).
inline const std::vector<ScoredState>& harvest_candidates(const SearchResult& result) {
  return result.expanded;
}

// JSON with root visits, q values, and the simulation count.
std::string debug_dump(const SearchResult& result);

}  // namespace rgsc
