#include "rgsc/archives.hpp"

#include <algorithm>
#include <cmath>

#include <nlohmann/json.hpp>

#include "rgsc/error.hpp"

namespace rgsc {
namespace {

constexpr int kSnapshotVersion = 1;

using nlohmann::json;

json base_snapshot(const char* kind, const GameState& initial) {
  json j;
  j["version"] = kSnapshotVersion;
  j["kind"] = kind;
  j["initial"] = initial.serialize();
  return j;
}

json require_version(const std::string& text) {
  json j = json::parse(text, nullptr, false);
  if (j.is_discarded()) throw ConfigError("store snapshot is not valid JSON");
  if (!j.contains("version") || j["version"].get<int>() != kSnapshotVersion) {
    throw ConfigError("unsupported store snapshot version");
  }
  return j;
}

}  // namespace

std::string InitialOnlyStore::to_snapshot() const {
  return base_snapshot("initial_only", initial_).dump();
}

CircularArchive::CircularArchive(Kind kind, GameState initial, size_t capacity, double lambda)
    : kind_(kind), initial_(std::move(initial)), capacity_(capacity), lambda_(lambda) {
  if (kind != Kind::Gevc && kind != Kind::Gesc) {
    throw ConfigError("circular archive kind must be gevc or gesc");
  }
  if (capacity < 1) throw ConfigError("archive capacity must be >= 1");
  if (lambda < 0.0 || lambda > 1.0) throw ConfigError("lambda must be in [0, 1]");
  ring_.reserve(capacity);
}

Opening CircularArchive::draw_opening(Rng& rng) const {
  const double p = rng.uniform();
  if (p >= lambda_ || count_ == 0) return {initial_, {OpeningKind::InitialState, 0}};
  return {ring_[rng.uniform_index(count_)], {OpeningKind::Archive, 0}};
}

void CircularArchive::push(std::span<const GameState> states) {
  for (const auto& s : states) {
    if (count_ < capacity_) {
      ring_.push_back(s);
      ++count_;
    } else {
      ring_[write_pos_] = s;
    }
    write_pos_ = (write_pos_ + 1) % capacity_;
    ++total_pushed_;
  }
}

const GameState& CircularArchive::at(size_t i) const {
  if (i >= count_) throw ContractViolation("archive index out of range");
  return ring_[i];
}

std::string CircularArchive::to_snapshot() const {
  json j = base_snapshot(kind_ == Kind::Gevc ? "gevc" : "gesc", initial_);
  j["capacity"] = capacity_;
  j["lambda"] = lambda_;
  j["write_pos"] = write_pos_;
  j["total_pushed"] = total_pushed_;
  json ring = json::array();
  for (size_t i = 0; i < count_; ++i) ring.push_back(ring_[i].serialize());
  j["ring"] = std::move(ring);
  return j.dump();
}

std::unique_ptr<CircularArchive> CircularArchive::from_snapshot(const std::string& snapshot) {
  json j = require_version(snapshot);
  const std::string kind = j.at("kind").get<std::string>();
  if (kind != "gevc" && kind != "gesc") throw ConfigError("snapshot is not a circular archive");
  auto store = std::make_unique<CircularArchive>(
      kind == "gevc" ? Kind::Gevc : Kind::Gesc,
      GameState::deserialize(j.at("initial").get<std::string>()), j.at("capacity").get<size_t>(),
      j.at("lambda").get<double>());
  for (const auto& s : j.at("ring")) {
    store->ring_.push_back(GameState::deserialize(s.get<std::string>()));
  }
  store->count_ = store->ring_.size();
  store->write_pos_ = j.at("write_pos").get<size_t>();
  store->total_pushed_ = j.at("total_pushed").get<uint64_t>();
  return store;
}

PrioritizedRegretBuffer::PrioritizedRegretBuffer(GameState initial, size_t capacity,
                                                 double lambda, double tau, double alpha)
    : initial_(std::move(initial)), capacity_(capacity), lambda_(lambda), tau_(tau),
      alpha_(alpha) {
  if (capacity < 1) throw ConfigError("prb capacity must be >= 1");
  if (lambda < 0.0 || lambda > 1.0) throw ConfigError("lambda must be in [0, 1]");
  if (tau <= 0.0) throw ConfigError("tau must be > 0");
  if (alpha <= 0.0 || alpha > 1.0) throw ConfigError("alpha must be in (0, 1]");
  entries_.reserve(capacity);
}

Opening PrioritizedRegretBuffer::draw_opening(Rng& rng) const {
  const double p = rng.uniform();
  if (p >= lambda_ || entries_.empty()) return {initial_, {OpeningKind::InitialState, 0}};

  // regret^(1/tau) through log space; all-zero regrets fall back to uniform.
  std::vector<double> weights(entries_.size(), 0.0);
  double max_log = -1e300;
  bool any = false;
  for (size_t i = 0; i < entries_.size(); ++i) {
    if (entries_[i].regret > 0.0) {
      max_log = std::max(max_log, std::log(entries_[i].regret));
      any = true;
    }
  }
  if (!any) {
    std::fill(weights.begin(), weights.end(), 1.0);
  } else {
    for (size_t i = 0; i < entries_.size(); ++i) {
      if (entries_[i].regret > 0.0) {
        weights[i] = std::exp((std::log(entries_[i].regret) - max_log) / tau_);
      }
    }
  }
  const size_t pick = rng.weighted_index(weights);
  return {entries_[pick].state, {OpeningKind::Buffer, entries_[pick].id}};
}

bool PrioritizedRegretBuffer::offer(const Candidate& candidate) {
  if (candidate.regret < 0.0) throw ContractViolation("candidate regret must be >= 0");
  if (entries_.size() >= capacity_) {
    size_t min_idx = 0;
    for (size_t i = 1; i < entries_.size(); ++i) {
      if (entries_[i].regret < entries_[min_idx].regret) min_idx = i;
    }
    if (!(candidate.regret > entries_[min_idx].regret)) return false;
    const BufferEntry& out = entries_[min_idx];
    evictions_.push_back(
        {out.id, out.first_regret, out.regret, out.updates, out.opening_move_count});
    entries_.erase(entries_.begin() + long(min_idx));
  }
  BufferEntry entry;
  entry.id = next_id_++;
  entry.state = candidate.state;
  entry.regret = candidate.regret;
  entry.first_regret = candidate.regret;
  entry.updates = 0;
  entry.opening_move_count = candidate.state.move_count();
  entry.history = {candidate.regret};
  entries_.push_back(std::move(entry));
  return true;
}

double PrioritizedRegretBuffer::ema_update(uint64_t entry_id, double new_regret) {
  if (new_regret < 0.0) throw ContractViolation("ema_update regret must be >= 0");
  for (auto& entry : entries_) {
    if (entry.id == entry_id) {
      entry.regret = (1.0 - alpha_) * entry.regret + alpha_ * new_regret;
      entry.updates += 1;
      entry.history.push_back(entry.regret);
      ++total_updates_;
      return entry.regret;
    }
  }
  throw ContractViolation("ema_update: unknown buffer entry " + std::to_string(entry_id));
}

const BufferEntry* PrioritizedRegretBuffer::find(uint64_t entry_id) const {
  for (const auto& entry : entries_) {
    if (entry.id == entry_id) return &entry;
  }
  return nullptr;
}

std::string PrioritizedRegretBuffer::to_snapshot() const {
  json j = base_snapshot("prb", initial_);
  j["capacity"] = capacity_;
  j["lambda"] = lambda_;
  j["tau"] = tau_;
  j["alpha"] = alpha_;
  j["next_id"] = next_id_;
  j["total_updates"] = total_updates_;
  json entries = json::array();
  for (const auto& e : entries_) {
    entries.push_back({{"id", e.id},
                       {"state", e.state.serialize()},
                       {"regret", e.regret},
                       {"first_regret", e.first_regret},
                       {"updates", e.updates},
                       {"opening_move_count", e.opening_move_count},
                       {"history", e.history}});
  }
  j["entries"] = std::move(entries);
  json evictions = json::array();
  for (const auto& e : evictions_) {
    evictions.push_back({{"id", e.id},
                         {"first_regret", e.first_regret},
                         {"final_regret", e.final_regret},
                         {"updates", e.updates},
                         {"opening_move_count", e.opening_move_count}});
  }
  j["evictions"] = std::move(evictions);
  return j.dump();
}

std::unique_ptr<PrioritizedRegretBuffer> PrioritizedRegretBuffer::from_snapshot(
    const std::string& snapshot) {
  json j = require_version(snapshot);
  if (j.at("kind").get<std::string>() != "prb") {
    throw ConfigError("snapshot is not a prioritized regret buffer");
  }
  auto store = std::make_unique<PrioritizedRegretBuffer>(
      GameState::deserialize(j.at("initial").get<std::string>()), j.at("capacity").get<size_t>(),
      j.at("lambda").get<double>(), j.at("tau").get<double>(), j.at("alpha").get<double>());
  store->next_id_ = j.at("next_id").get<uint64_t>();
  store->total_updates_ = j.at("total_updates").get<uint64_t>();
  for (const auto& e : j.at("entries")) {
    BufferEntry entry;
    entry.id = e.at("id").get<uint64_t>();
    entry.state = GameState::deserialize(e.at("state").get<std::string>());
    entry.regret = e.at("regret").get<double>();
    entry.first_regret = e.at("first_regret").get<double>();
    entry.updates = e.at("updates").get<int>();
    entry.opening_move_count = e.at("opening_move_count").get<int>();
    entry.history = e.at("history").get<std::vector<double>>();
    store->entries_.push_back(std::move(entry));
  }
  for (const auto& e : j.at("evictions")) {
    store->evictions_.push_back({e.at("id").get<uint64_t>(), e.at("first_regret").get<double>(),
                                 e.at("final_regret").get<double>(), e.at("updates").get<int>(),
                                 e.at("opening_move_count").get<int>()});
  }
  return store;
}

std::unique_ptr<RestartStore> restore_store(const std::string& snapshot) {
  json j = require_version(snapshot);
  const std::string kind = j.at("kind").get<std::string>();
  if (kind == "initial_only") {
    return std::make_unique<InitialOnlyStore>(
        GameState::deserialize(j.at("initial").get<std::string>()));
  }
  if (kind == "gevc" || kind == "gesc") return CircularArchive::from_snapshot(snapshot);
  if (kind == "prb") return PrioritizedRegretBuffer::from_snapshot(snapshot);
  throw ConfigError("unknown store kind '" + kind + "' in snapshot");
}

}  // namespace rgsc
