#include "rgsc/mcts.hpp"

#include <algorithm>
#include <cmath>

#include <nlohmann/json.hpp>

#include "rgsc/error.hpp"

namespace rgsc {
namespace {

struct Edge {
  Action action = -1;
  double prior = 0.0;
  int child = -1;  // index into the node arena
  int n = 0;
  double w = 0.0;  // total value from the perspective of the mover at the parent
};

struct Node {
  GameState state;
  bool terminal = false;
  double terminal_value = 0.0;  // from this node's mover perspective
  std::vector<Edge> edges;
  int visit_total = 0;  // sum of edge visits
};

class Tree {
 public:
  Tree(const Net& net, const NetParams& params, const MctsConfig& cfg, Rng& rng,
       SearchResult& result)
      : net_(net), params_(params), cfg_(cfg), rng_(rng), result_(result) {}

  int make_node(GameState state) {
    nodes_.push_back(Node{std::move(state)});
    Node& node = nodes_.back();
    const int idx = int(nodes_.size()) - 1;
    if (auto outcome = node.state.terminal_value()) {
      node.terminal = true;
      node.terminal_value = outcome->from(node.state.to_move());
      return idx;
    }
    const NetOutput out = net_.forward_one(params_, node.state.encode(), &cache_);
    const std::vector<Action> actions = node.state.legal_actions();
    node.edges.reserve(actions.size());
    double prior_sum = 0.0;
    for (Action a : actions) {
      Edge e;
      e.action = a;
      e.prior = out.policy[size_t(a)];
      prior_sum += e.prior;
      node.edges.push_back(e);
    }
    for (auto& e : node.edges) {
      e.prior = prior_sum > 0.0 ? e.prior / prior_sum : 1.0 / double(node.edges.size());
    }
    result_.expanded.push_back({node.state, out.ranking_score, out.regret_value});
    value_ = out.value;
    return idx;
  }

  void add_root_noise() {
    Node& root = nodes_[0];
    std::vector<double> noise(root.edges.size());
    double alpha = cfg_.dirichlet_alpha;
    if (alpha <= 0.0) alpha = 10.0 / double(root.state.cell_count());
    double sum = 0.0;
    for (auto& v : noise) {
      v = rng_.gamma(alpha);
      sum += v;
    }
    if (sum <= 0.0) return;
    for (size_t i = 0; i < noise.size(); ++i) {
      root.edges[i].prior =
          (1.0 - cfg_.dirichlet_ratio) * root.edges[i].prior + cfg_.dirichlet_ratio * noise[i] / sum;
    }
  }

  // One selection / expansion / backup pass from the root.
  void simulate() {
    struct Step {
      int node;
      size_t edge;
    };
    std::vector<Step> path;
    int cur = 0;
    double leaf_value = 0.0;
    for (;;) {
      Node& node = nodes_[size_t(cur)];
      const size_t pick = best_edge(node);
      path.push_back({cur, pick});
      Edge& edge = node.edges[pick];
      if (edge.child < 0) {
        const int child = make_node(node.state.apply(edge.action));
        edge.child = child;
        leaf_value = nodes_[size_t(child)].terminal ? nodes_[size_t(child)].terminal_value
                                                    : value_;
        break;
      }
      if (nodes_[size_t(edge.child)].terminal) {
        leaf_value = nodes_[size_t(edge.child)].terminal_value;
        break;
      }
      cur = edge.child;
    }
    // leaf_value is from the leaf mover's perspective; one sign flip per ply.
    double v = leaf_value;
    for (size_t i = path.size(); i-- > 0;) {
      v = -v;
      Node& node = nodes_[size_t(path[i].node)];
      Edge& edge = node.edges[path[i].edge];
      edge.n += 1;
      edge.w += v;
      node.visit_total += 1;
    }
  }

  size_t best_edge(const Node& node) const {
    const double sqrt_total = std::sqrt(double(node.visit_total));
    size_t best = 0;
    double best_score = -1e300;
    for (size_t i = 0; i < node.edges.size(); ++i) {
      const Edge& e = node.edges[i];
      const double q = e.n > 0 ? e.w / double(e.n) : 0.0;
      const double u = cfg_.c_puct * e.prior * sqrt_total / double(1 + e.n);
      const double score = q + u;
      if (score > best_score) {
        best_score = score;
        best = i;
      }
    }
    return best;
  }

  const Node& root() const { return nodes_[0]; }

 private:
  const Net& net_;
  const NetParams& params_;
  const MctsConfig& cfg_;
  Rng& rng_;
  SearchResult& result_;
  std::vector<Node> nodes_;
  Net::Cache cache_;
  double value_ = 0.0;  // network value of the most recently expanded node
};

}  // namespace

std::vector<double> SearchResult::visit_distribution() const {
  std::vector<double> out(visits.size(), 0.0);
  if (simulations <= 0) return out;
  for (size_t i = 0; i < visits.size(); ++i) out[i] = visits[i] / double(simulations);
  return out;
}

SearchResult search(const GameState& root, const Net& net, const NetParams& params,
                    const MctsConfig& cfg, Rng& rng) {
  if (root.is_terminal()) throw ContractViolation("search called on a terminal state");
  if (cfg.simulations < 1) throw ConfigError("mcts simulations must be >= 1");

  SearchResult result;
  result.action_count = root.action_count();
  result.simulations = cfg.simulations;
  result.visits.assign(size_t(root.action_count()), 0.0);
  result.q.assign(size_t(root.action_count()), 0.0);

  Tree tree(net, params, cfg, rng, result);
  tree.make_node(root);
  if (cfg.add_noise) tree.add_root_noise();
  for (int s = 0; s < cfg.simulations; ++s) tree.simulate();

  for (const Edge& e : tree.root().edges) {
    result.visits[size_t(e.action)] = double(e.n);
    if (e.n > 0) result.q[size_t(e.action)] = e.w / double(e.n);
  }
  return result;
}

Action select_action(const SearchResult& result, double temperature, Rng& rng) {
  if (temperature < 0.0) throw ConfigError("temperature must be >= 0");
  int best = -1;
  double best_visits = -1.0;
  for (int a = 0; a < result.action_count; ++a) {
    if (result.visits[size_t(a)] > best_visits) {
      best_visits = result.visits[size_t(a)];
      best = a;
    }
  }
  if (best_visits <= 0.0) throw ContractViolation("select_action on a result with no visits");
  if (temperature == 0.0) return best;

  // Normalized in log space so extreme temperatures stay finite.
  const double log_max = std::log(best_visits);
  std::vector<double> weights(size_t(result.action_count), 0.0);
  for (int a = 0; a < result.action_count; ++a) {
    const double n = result.visits[size_t(a)];
    if (n > 0.0) weights[size_t(a)] = std::exp((std::log(n) - log_max) / temperature);
  }
  return int(rng.weighted_index(weights));
}

std::string debug_dump(const SearchResult& result) {
  nlohmann::json j;
  j["simulations"] = result.simulations;
  j["visits"] = result.visits;
  j["q"] = result.q;
  j["expanded_nodes"] = result.expanded.size();
  return j.dump();
}

}  // namespace rgsc
