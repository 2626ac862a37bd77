#include "rgsc/selfplay.hpp"

#include <fstream>

#include <nlohmann/json.hpp>

#include "rgsc/error.hpp"

namespace rgsc {

GameRecord play_game(const Net& net, const NetParams& params, RestartStore& store,
                     const SelfplayConfig& cfg, Rng& rng) {
  const Opening opening = store.draw_opening(rng);
  const int move_limit =
      cfg.max_game_moves > 0 ? cfg.max_game_moves : 2 * opening.state.cell_count();

  GameRecord rec;
  rec.trajectory.opening = opening.provenance;
  rec.trajectory.opening_move_count = opening.state.move_count();

  std::vector<ScoredState> tree_candidates;
  std::vector<GameState> gesc_samples;

  GameState state = opening.state;
  while (!state.is_terminal()) {
    if (state.move_count() > move_limit) {
      throw std::runtime_error("runaway game: " + std::to_string(state.move_count()) +
                               " moves in position " + state.serialize());
    }
    const SearchResult result = search(state, net, params, cfg.mcts, rng);
    const Action action = select_action(result, cfg.temperature, rng);

    MoveRecord mv;
    mv.state = state;
    mv.action = action;
    mv.v_selected = result.value_of(action);
    mv.gamma = result.expanded.front().gamma;  // the root's own evaluation
    mv.policy_target = result.visit_distribution();
    rec.trajectory.records.push_back(std::move(mv));

    const auto& harvest = harvest_candidates(result);
    tree_candidates.insert(tree_candidates.end(), harvest.begin(), harvest.end());
    if (store.kind() == RestartStore::Kind::Gesc) {
      gesc_samples.push_back(harvest[rng.uniform_index(harvest.size())].state);
    }
    state = state.apply(action);
  }
  rec.trajectory.outcome = state.terminal_value();

  rec.regrets = compute_all_regrets(rec.trajectory);
  rec.candidate = select_candidate(rec.trajectory, tree_candidates);

  switch (store.kind()) {
    case RestartStore::Kind::InitialOnly:
      break;
    case RestartStore::Kind::Prb: {
      auto& prb = static_cast<PrioritizedRegretBuffer&>(store);
      if (opening.provenance.kind == OpeningKind::Buffer) {
        prb.ema_update(opening.provenance.entry_id, rec.regrets.front());
      } else {
        prb.offer(rec.candidate);
      }
      break;
    }
    case RestartStore::Kind::Gevc: {
      std::vector<GameState> visited;
      visited.reserve(rec.trajectory.records.size());
      for (const auto& r : rec.trajectory.records) visited.push_back(r.state);
      static_cast<CircularArchive&>(store).push(visited);
      break;
    }
    case RestartStore::Kind::Gesc:
      static_cast<CircularArchive&>(store).push(gesc_samples);
      break;
  }
  return rec;
}

std::string game_record_to_json(const GameRecord& rec) {
  nlohmann::json j;
  j["iteration"] = rec.iteration;
  j["worker"] = rec.worker;
  j["game_index"] = rec.game_index;
  const char* prov = rec.trajectory.opening.kind == OpeningKind::InitialState ? "initial"
                     : rec.trajectory.opening.kind == OpeningKind::Buffer     ? "buffer"
                                                                              : "archive";
  j["opening"] = {{"provenance", prov},
                  {"entry_id", rec.trajectory.opening.entry_id},
                  {"state", rec.trajectory.records.empty()
                                ? std::string()
                                : rec.trajectory.records.front().state.serialize()},
                  {"move_count", rec.trajectory.opening_move_count}};
  j["z"] = rec.trajectory.outcome ? rec.trajectory.outcome->z : 0;
  nlohmann::json moves = nlohmann::json::array();
  nlohmann::json vsel = nlohmann::json::array();
  nlohmann::json gammas = nlohmann::json::array();
  nlohmann::json policies = nlohmann::json::array();
  for (const auto& r : rec.trajectory.records) {
    moves.push_back(r.action);
    vsel.push_back(r.v_selected);
    gammas.push_back(r.gamma);
    policies.push_back(r.policy_target);
  }
  j["moves"] = std::move(moves);
  j["v_selected"] = std::move(vsel);
  j["gamma"] = std::move(gammas);
  j["policy_targets"] = std::move(policies);
  j["regrets"] = rec.regrets;
  j["candidate"] = {
      {"source", rec.candidate.source == CandidateSource::TrajectoryState ? "trajectory" : "tree"},
      {"gamma", rec.candidate.gamma},
      {"regret", rec.candidate.regret},
      {"state", rec.candidate.state.serialize()}};
  return j.dump();
}

GameRecord game_record_from_json(const std::string& line) {
  nlohmann::json j = nlohmann::json::parse(line, nullptr, false);
  if (j.is_discarded()) throw ConfigError("game log line is not valid JSON");
  GameRecord rec;
  rec.iteration = j.at("iteration").get<int>();
  rec.worker = j.at("worker").get<int>();
  rec.game_index = j.at("game_index").get<int>();
  const auto& op = j.at("opening");
  const std::string prov = op.at("provenance").get<std::string>();
  rec.trajectory.opening.kind = prov == "initial"  ? OpeningKind::InitialState
                                : prov == "buffer" ? OpeningKind::Buffer
                                                   : OpeningKind::Archive;
  rec.trajectory.opening.entry_id = op.at("entry_id").get<uint64_t>();
  rec.trajectory.opening_move_count = op.at("move_count").get<int>();
  rec.trajectory.outcome = Outcome{j.at("z").get<int>()};

  GameState state = GameState::deserialize(op.at("state").get<std::string>());
  const auto& moves = j.at("moves");
  const auto& vsel = j.at("v_selected");
  const auto& gammas = j.at("gamma");
  const auto& policies = j.at("policy_targets");
  for (size_t t = 0; t < moves.size(); ++t) {
    MoveRecord mv;
    mv.state = state;
    mv.action = moves[t].get<int>();
    mv.v_selected = vsel.at(t).get<double>();
    mv.gamma = gammas.at(t).get<double>();
    mv.policy_target = policies.at(t).get<std::vector<double>>();
    state = state.apply(mv.action);
    rec.trajectory.records.push_back(std::move(mv));
  }
  rec.regrets = j.at("regrets").get<std::vector<double>>();
  const auto& cand = j.at("candidate");
  rec.candidate.source = cand.at("source").get<std::string>() == "trajectory"
                             ? CandidateSource::TrajectoryState
                             : CandidateSource::TreeNode;
  rec.candidate.gamma = cand.at("gamma").get<double>();
  rec.candidate.regret = cand.at("regret").get<double>();
  rec.candidate.state = GameState::deserialize(cand.at("state").get<std::string>());
  return rec;
}

void write_game_log(const std::filesystem::path& path, const std::vector<GameRecord>& games) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open game log for writing: " + path.string());
  for (const auto& g : games) out << game_record_to_json(g) << '\n';
  if (!out) throw std::runtime_error("failed writing game log " + path.string());
}

std::vector<GameRecord> read_game_log(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open game log " + path.string());
  std::vector<GameRecord> games;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty()) games.push_back(game_record_from_json(line));
  }
  return games;
}

}  // namespace rgsc
