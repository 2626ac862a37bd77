#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "rgsc/regret.hpp"
#include "rgsc/rng.hpp"
#include "rgsc/trajectory.hpp"

namespace rgsc {

struct Opening {
  GameState state;
  Provenance provenance;
};

// Where a self-play game starts from. Each store is owned by a single worker;
// none of these types synchronize.
class RestartStore {
 public:
  enum class Kind : int8_t { InitialOnly, Gevc, Gesc, Prb };

  virtual ~RestartStore() = default;
  virtual Kind kind() const = 0;
  virtual Opening draw_opening(Rng& rng) const = 0;
  virtual size_t size() const = 0;
  // Versioned JSON snapshot; restore with restore_store().
  virtual std::string to_snapshot() const = 0;
};

std::unique_ptr<RestartStore> restore_store(const std::string& snapshot);

class InitialOnlyStore final : public RestartStore {
 public:
  explicit InitialOnlyStore(GameState initial) : initial_(std::move(initial)) {}
  Kind kind() const override { return Kind::InitialOnly; }
  Opening draw_opening(Rng&) const override {
    return {initial_, {OpeningKind::InitialState, 0}};
  }
  size_t size() const override { return 0; }
  std::string to_snapshot() const override;

 private:
  GameState initial_;
};

// Fixed-capacity ring of past states, drawn uniformly with probability
// lambda. Gevc is fed trajectory states, Gesc one sampled tree node per move.
class CircularArchive final : public RestartStore {
 public:
  CircularArchive(Kind kind, GameState initial, size_t capacity, double lambda);

  Kind kind() const override { return kind_; }
  Opening draw_opening(Rng& rng) const override;
  size_t size() const override { return count_; }
  std::string to_snapshot() const override;
  static std::unique_ptr<CircularArchive> from_snapshot(const std::string& snapshot);

  void push(std::span<const GameState> states);
  const GameState& at(size_t i) const;  // storage order, i < size()
  size_t capacity() const { return capacity_; }
  double lambda() const { return lambda_; }
  uint64_t total_pushed() const { return total_pushed_; }

 private:
  friend std::unique_ptr<RestartStore> restore_store(const std::string&);
  Kind kind_;
  GameState initial_;
  size_t capacity_;
  double lambda_;
  std::vector<GameState> ring_;
  size_t write_pos_ = 0;
  size_t count_ = 0;
  uint64_t total_pushed_ = 0;
};

struct BufferEntry {
  uint64_t id = 0;
  GameState state;
  double regret = 0.0;
  double first_regret = 0.0;  // frozen at insertion
  int updates = 0;
  int opening_move_count = 0;
  std::vector<double> history;  // regret after each update, first entry included
};

// Fixed-capacity store of high-regret states. Insertions must beat the
// current minimum, draws follow regret^(1/tau), stored values decay by EMA.
class PrioritizedRegretBuffer final : public RestartStore {
 public:
  PrioritizedRegretBuffer(GameState initial, size_t capacity, double lambda, double tau,
                          double alpha);

  Kind kind() const override { return Kind::Prb; }
  Opening draw_opening(Rng& rng) const override;
  size_t size() const override { return entries_.size(); }
  std::string to_snapshot() const override;
  static std::unique_ptr<PrioritizedRegretBuffer> from_snapshot(const std::string& snapshot);

  // True if the candidate entered the buffer (empty slot or beat the minimum).
  bool offer(const Candidate& candidate);
  // EMA update for an opened entry; returns the new stored regret. The entry
  // is never evicted here, only by losing an offer() competition.
  double ema_update(uint64_t entry_id, double new_regret);

  const std::vector<BufferEntry>& entries() const { return entries_; }
  const BufferEntry* find(uint64_t entry_id) const;

  struct Eviction {
    uint64_t id = 0;
    double first_regret = 0.0;
    double final_regret = 0.0;
    int updates = 0;
    int opening_move_count = 0;
  };
  const std::vector<Eviction>& eviction_log() const { return evictions_; }
  uint64_t total_updates() const { return total_updates_; }

  size_t capacity() const { return capacity_; }
  double lambda() const { return lambda_; }
  double tau() const { return tau_; }
  double alpha() const { return alpha_; }

 private:
  GameState initial_;
  size_t capacity_;
  double lambda_;
  double tau_;
  double alpha_;
  uint64_t next_id_ = 1;
  uint64_t total_updates_ = 0;
  std::vector<BufferEntry> entries_;
  std::vector<Eviction> evictions_;
};

}  // namespace rgsc
