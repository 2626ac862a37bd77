#include "rgsc/config.hpp"

#include <fstream>
#include <sstream>
#include <thread>

#include <nlohmann/json.hpp>

#include "rgsc/error.hpp"
#include "rgsc/rng.hpp"

namespace rgsc {
namespace {

using ordered_json = nlohmann::ordered_json;

void check_keys(const ordered_json& obj, const char* where,
                std::initializer_list<const char*> known) {
  for (const auto& [key, value] : obj.items()) {
    bool ok = false;
    for (const char* k : known) {
      if (key == k) {
        ok = true;
        break;
      }
    }
    if (!ok) {
      throw ConfigError(std::string("unknown config field '") + where + "." + key + "'");
    }
  }
}

template <typename T>
void read(const ordered_json& obj, const char* key, T& out) {
  if (!obj.contains(key)) return;
  try {
    out = obj.at(key).get<T>();
  } catch (const nlohmann::json::exception&) {
    throw ConfigError(std::string("config field '") + key + "' has the wrong type");
  }
}

}  // namespace

std::string to_string(Method m) {
  switch (m) {
    case Method::AlphaZero: return "alphazero";
    case Method::Gevc: return "gevc";
    case Method::Gesc: return "gesc";
    case Method::Rgsc: return "rgsc";
  }
  return "?";
}

Method method_from_string(const std::string& name) {
  if (name == "alphazero") return Method::AlphaZero;
  if (name == "gevc") return Method::Gevc;
  if (name == "gesc") return Method::Gesc;
  if (name == "rgsc") return Method::Rgsc;
  throw ConfigError("unknown method '" + name + "' (expected alphazero|gevc|gesc|rgsc)");
}

NetConfig RunConfig::net_config() const {
  NetConfig nc;
  nc.torso = torso;
  nc.blocks = blocks;
  nc.filters = filters;
  nc.hidden = hidden;
  nc.activation = activation;
  nc.channels = GameState::kEncodeChannels;
  nc.height = board_size;
  nc.width = board_size;
  nc.actions = initial_state().action_count();
  return nc;
}

MctsConfig RunConfig::mcts_config(bool selfplay) const {
  MctsConfig mc;
  mc.simulations = simulations;
  mc.c_puct = c_puct;
  mc.add_noise = selfplay;
  mc.dirichlet_ratio = dirichlet_ratio;
  mc.dirichlet_alpha = dirichlet_alpha;
  return mc;
}

LossWeights RunConfig::loss_weights() const {
  LossWeights w{w_policy, w_value, w_regret, w_ranking};
  if (method != Method::Rgsc) {
    w.regret = 0.0;
    w.ranking = 0.0;
  }
  return w;
}

int RunConfig::resolved_workers() const {
  if (workers > 0) return workers;
  const unsigned hw = std::thread::hardware_concurrency();
  return hw > 0 ? int(hw) : 1;
}

uint64_t RunConfig::config_hash() const {
  return splitmix64(net_config().shape_hash() ^ splitmix64(uint64_t(game) * 31 + uint64_t(board_size)));
}

std::vector<std::string> RunConfig::validate() const {
  auto fail = [](const std::string& field, const std::string& why) {
    throw ConfigError("config field '" + field + "' " + why);
  };
  if (board_size < 2 || board_size > 19) fail("game.board_size", "must be in [2, 19]");
  if (game == GameKind::Othello && board_size % 2 != 0) fail("game.board_size", "must be even for othello");
  if (iterations < 0) fail("iterations", "must be >= 0");
  if (states_per_iteration < 1) fail("states_per_iteration", "must be >= 1");
  if (optimization_steps < 0) fail("optimization_steps", "must be >= 0");
  if (batch_size < 1) fail("batch_size", "must be >= 1");
  if (replay_window < 1) fail("replay_window", "must be >= 1");
  if (workers < 0) fail("workers", "must be >= 0");
  if (blocks < 0) fail("net.blocks", "must be >= 0");
  if (filters < 1) fail("net.filters", "must be >= 1");
  if (hidden < 1) fail("net.hidden", "must be >= 1");
  if (simulations < 1) fail("mcts.simulations", "must be >= 1");
  if (c_puct < 0.0) fail("mcts.c_puct", "must be >= 0");
  if (dirichlet_ratio < 0.0 || dirichlet_ratio > 1.0) fail("mcts.dirichlet_ratio", "must be in [0, 1]");
  if (learning_rate <= 0.0) fail("optimizer.learning_rate", "must be > 0");
  if (momentum < 0.0 || momentum >= 1.0) fail("optimizer.momentum", "must be in [0, 1)");
  if (weight_decay < 0.0) fail("optimizer.weight_decay", "must be >= 0");
  if (w_policy < 0.0) fail("loss_weights.policy", "must be >= 0");
  if (w_value < 0.0) fail("loss_weights.value", "must be >= 0");
  if (w_regret < 0.0) fail("loss_weights.regret", "must be >= 0");
  if (w_ranking < 0.0) fail("loss_weights.ranking", "must be >= 0");
  if (lambda < 0.0 || lambda > 1.0) fail("restart.lambda", "must be in [0, 1]");
  if (tau <= 0.0) fail("restart.tau", "must be > 0");
  if (ema_alpha <= 0.0 || ema_alpha > 1.0) fail("restart.ema_alpha", "must be in (0, 1]");
  if (prb_capacity < 1) fail("restart.prb_capacity", "must be >= 1");
  if (archive_capacity < 1) fail("restart.archive_capacity", "must be >= 1");
  if (temperature < 0.0) fail("selfplay.temperature", "must be >= 0");
  if (regret_clip <= 0.0) fail("selfplay.regret_clip", "must be > 0");
  if (warmup_games < 0) fail("selfplay.warmup_games", "must be >= 0");
  if (freeze_games < 1) fail("freeze.games", "must be >= 1");
  if (freeze_steps < 0) fail("freeze.steps", "must be >= 0");

  std::vector<std::string> warnings;
  if (method == Method::AlphaZero) {
    warnings.push_back("method alphazero ignores the restart.* block");
  } else if (method != Method::Rgsc) {
    warnings.push_back("method " + to_string(method) + " ignores restart.tau, restart.ema_alpha and restart.prb_capacity");
  }
  if (method != Method::Rgsc && warmup_games > 0) {
    warnings.push_back("selfplay.warmup_games only applies to method rgsc");
  }
  return warnings;
}

RunConfig run_config_from_json(const std::string& text) {
  ordered_json j = ordered_json::parse(text, nullptr, false);
  if (j.is_discarded()) throw ConfigError("config is not valid JSON");
  if (!j.is_object()) throw ConfigError("config root must be a JSON object");
  check_keys(j, "",
             {"game", "method", "seed", "iterations", "states_per_iteration",
              "optimization_steps", "batch_size", "replay_window", "workers", "net", "mcts",
              "optimizer", "loss_weights", "restart", "selfplay", "freeze"});

  RunConfig cfg;
  if (j.contains("game")) {
    const auto& g = j["game"];
    check_keys(g, "game", {"name", "board_size"});
    std::string name = to_string(cfg.game);
    read(g, "name", name);
    cfg.game = game_kind_from_string(name);
    read(g, "board_size", cfg.board_size);
  }
  if (j.contains("method")) cfg.method = method_from_string(j["method"].get<std::string>());
  read(j, "seed", cfg.seed);
  read(j, "iterations", cfg.iterations);
  read(j, "states_per_iteration", cfg.states_per_iteration);
  read(j, "optimization_steps", cfg.optimization_steps);
  read(j, "batch_size", cfg.batch_size);
  read(j, "replay_window", cfg.replay_window);
  read(j, "workers", cfg.workers);
  if (j.contains("net")) {
    const auto& n = j["net"];
    check_keys(n, "net", {"torso", "blocks", "filters", "hidden", "activation"});
    if (n.contains("torso")) {
      const std::string t = n["torso"].get<std::string>();
      if (t == "conv") {
        cfg.torso = TorsoKind::Conv;
      } else if (t == "mlp") {
        cfg.torso = TorsoKind::Mlp;
      } else {
        throw ConfigError("config field 'net.torso' must be conv or mlp");
      }
    }
    read(n, "blocks", cfg.blocks);
    read(n, "filters", cfg.filters);
    read(n, "hidden", cfg.hidden);
    if (n.contains("activation")) {
      const std::string a = n["activation"].get<std::string>();
      if (a == "relu") {
        cfg.activation = ActivationKind::Relu;
      } else if (a == "tanh") {
        cfg.activation = ActivationKind::Tanh;
      } else {
        throw ConfigError("config field 'net.activation' must be relu or tanh");
      }
    }
  }
  if (j.contains("mcts")) {
    const auto& m = j["mcts"];
    check_keys(m, "mcts", {"simulations", "c_puct", "dirichlet_ratio", "dirichlet_alpha"});
    read(m, "simulations", cfg.simulations);
    read(m, "c_puct", cfg.c_puct);
    read(m, "dirichlet_ratio", cfg.dirichlet_ratio);
    read(m, "dirichlet_alpha", cfg.dirichlet_alpha);
  }
  if (j.contains("optimizer")) {
    const auto& o = j["optimizer"];
    check_keys(o, "optimizer", {"learning_rate", "momentum", "weight_decay"});
    read(o, "learning_rate", cfg.learning_rate);
    read(o, "momentum", cfg.momentum);
    read(o, "weight_decay", cfg.weight_decay);
  }
  if (j.contains("loss_weights")) {
    const auto& w = j["loss_weights"];
    check_keys(w, "loss_weights", {"policy", "value", "regret", "ranking"});
    read(w, "policy", cfg.w_policy);
    read(w, "value", cfg.w_value);
    read(w, "regret", cfg.w_regret);
    read(w, "ranking", cfg.w_ranking);
  }
  if (j.contains("restart")) {
    const auto& r = j["restart"];
    check_keys(r, "restart", {"lambda", "tau", "ema_alpha", "prb_capacity", "archive_capacity"});
    read(r, "lambda", cfg.lambda);
    read(r, "tau", cfg.tau);
    read(r, "ema_alpha", cfg.ema_alpha);
    read(r, "prb_capacity", cfg.prb_capacity);
    read(r, "archive_capacity", cfg.archive_capacity);
  }
  if (j.contains("selfplay")) {
    const auto& s = j["selfplay"];
    check_keys(s, "selfplay", {"temperature", "regret_clip", "warmup_games"});
    read(s, "temperature", cfg.temperature);
    read(s, "regret_clip", cfg.regret_clip);
    read(s, "warmup_games", cfg.warmup_games);
  }
  if (j.contains("freeze")) {
    const auto& f = j["freeze"];
    check_keys(f, "freeze", {"games", "steps"});
    read(f, "games", cfg.freeze_games);
    read(f, "steps", cfg.freeze_steps);
  }
  return cfg;
}

RunConfig run_config_from_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return run_config_from_json(ss.str());
}

std::string run_config_to_json(const RunConfig& cfg) {
  ordered_json j;
  j["game"] = {{"name", to_string(cfg.game)}, {"board_size", cfg.board_size}};
  j["method"] = to_string(cfg.method);
  j["seed"] = cfg.seed;
  j["iterations"] = cfg.iterations;
  j["states_per_iteration"] = cfg.states_per_iteration;
  j["optimization_steps"] = cfg.optimization_steps;
  j["batch_size"] = cfg.batch_size;
  j["replay_window"] = cfg.replay_window;
  j["workers"] = cfg.workers;
  j["net"] = {{"torso", cfg.torso == TorsoKind::Conv ? "conv" : "mlp"},
              {"blocks", cfg.blocks},
              {"filters", cfg.filters},
              {"hidden", cfg.hidden},
              {"activation", cfg.activation == ActivationKind::Relu ? "relu" : "tanh"}};
  j["mcts"] = {{"simulations", cfg.simulations},
               {"c_puct", cfg.c_puct},
               {"dirichlet_ratio", cfg.dirichlet_ratio},
               {"dirichlet_alpha", cfg.dirichlet_alpha}};
  j["optimizer"] = {{"learning_rate", cfg.learning_rate},
                    {"momentum", cfg.momentum},
                    {"weight_decay", cfg.weight_decay}};
  j["loss_weights"] = {{"policy", cfg.w_policy},
                       {"value", cfg.w_value},
                       {"regret", cfg.w_regret},
                       {"ranking", cfg.w_ranking}};
  j["restart"] = {{"lambda", cfg.lambda},
                  {"tau", cfg.tau},
                  {"ema_alpha", cfg.ema_alpha},
                  {"prb_capacity", cfg.prb_capacity},
                  {"archive_capacity", cfg.archive_capacity}};
  j["selfplay"] = {{"temperature", cfg.temperature},
                   {"regret_clip", cfg.regret_clip},
                   {"warmup_games", cfg.warmup_games}};
  j["freeze"] = {{"games", cfg.freeze_games}, {"steps", cfg.freeze_steps}};
  return j.dump(2);
}

}  // namespace rgsc
