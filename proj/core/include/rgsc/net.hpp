#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace rgsc {

enum class TorsoKind : int8_t { Mlp, Conv };
enum class ActivationKind : int8_t { Relu, Tanh };

struct NetConfig {
  TorsoKind torso = TorsoKind::Conv;
  int blocks = 1;    // residual blocks (conv torso)
  int filters = 32;  // conv filters
  int hidden = 32;   // mlp torso width and per-head hidden width
  ActivationKind activation = ActivationKind::Relu;
  // Input/output shape, fixed by the game.
  int channels = 3;
  int height = 5;
  int width = 5;
  int actions = 25;

  int input_size() const { return channels * height * width; }
  // Stable across processes; checkpoints are only loadable when it matches.
  uint64_t shape_hash() const;
  std::string describe() const;
};

// Evaluation of a single state: normalized policy over the full action
// space, value in [-1, 1] from the mover's perspective, a nonnegative
// regret estimate, and the unnormalized ranking score.
struct NetOutput {
  std::vector<double> policy;
  double value = 0.0;
  double regret_value = 0.0;
  double ranking_score = 0.0;
};

struct NetParams {
  std::vector<double> values;
};

struct ParamSegment {
  std::string name;
  size_t offset = 0;
  size_t size = 0;
};

struct TrainBatch {
  std::vector<std::vector<double>> inputs;
  std::vector<std::vector<double>> policy_targets;  // full action space, sums to 1
  std::vector<double> value_targets;                // mover-perspective outcome
  std::vector<double> regret_targets;               // clipped, >= 0
  // Disjoint index sets; each group holds >= 2 items from one source game.
  std::vector<std::vector<int>> ranking_groups;

  size_t size() const { return inputs.size(); }
};

struct LossWeights {
  double policy = 1.0;
  double value = 1.0;
  double regret = 1.0;
  double ranking = 1.0;
};

struct HeadLosses {
  double policy = 0.0;   // mean cross-entropy
  double value = 0.0;    // mean squared error
  double regret = 0.0;   // mean squared error
  double ranking = 0.0;  // summed over ranking groups
  double total = 0.0;    // weighted combination
};

class Net {
 public:
  explicit Net(const NetConfig& cfg);

  const NetConfig& config() const { return cfg_; }
  size_t param_count() const { return param_count_; }
  const std::vector<ParamSegment>& layout() const { return layout_; }

  NetParams init_params(uint64_t seed) const;

  // Per-item activations kept for the backward pass.
  struct Cache {
    std::vector<double> input;
    std::vector<double> torso_pre, torso_post;        // conv_in or mlp dense
    std::vector<std::vector<double>> block_pre1, block_post1, block_pre2, block_post2;
    std::vector<double> policy_logits;
    std::vector<double> value_hpre, value_hpost;
    std::vector<double> regret_hpre, regret_hpost;
    std::vector<double> rank_hpre, rank_hpost;
    double value_pre = 0, value_out = 0;
    double regret_pre = 0, regret_out = 0;
    double rank_out = 0;
    double min_act_margin = 1e30;  // smallest |pre-activation| seen at a relu
  };

  NetOutput forward_one(const NetParams& params, std::span<const double> input,
                        Cache* cache = nullptr) const;
  std::vector<NetOutput> forward(const NetParams& params,
                                 const std::vector<std::vector<double>>& inputs) const;

  // Losses and the gradient over the flat parameter vector. Heads with a
  // zero weight contribute neither loss nor gradient. Throws on a non-finite
  // loss, naming the head. When `min_act_margin` is non-null it receives the
  // smallest |relu pre-activation| encountered (used by the gradient checker
  // to reject draws that straddle a kink).
  HeadLosses loss_and_grads(const NetParams& params, const TrainBatch& batch,
                            const LossWeights& weights, std::vector<double>* grad_out,
                            double* min_act_margin = nullptr) const;

  // 1.0 for parameters inside segments matching any prefix, 0.0 elsewhere.
  std::vector<double> segment_mask(std::span<const std::string> prefixes) const;

 private:
  struct HeadOffsets {
    size_t hw = 0, hb = 0, ow = 0, ob = 0;
  };
  struct BlockOffsets {
    size_t w1 = 0, b1 = 0, w2 = 0, b2 = 0;
  };
  struct Offsets {
    size_t torso_w = 0, torso_b = 0;
    std::vector<BlockOffsets> blocks;
    size_t policy_w = 0, policy_b = 0;
    HeadOffsets value, regret, rank;
  };

  void backward_one(const NetParams& params, const Cache& cache,
                    std::span<const double> dlogits, double dvalue_pre, double dregret_pre,
                    double drank_pre, std::span<double> grad) const;

  NetConfig cfg_;
  std::vector<ParamSegment> layout_;
  Offsets off_;
  size_t param_count_ = 0;
  size_t trunk_size_ = 0;
};

struct SgdState {
  std::vector<double> velocity;
};

// Classical momentum SGD; weight decay enters through the gradient. When a
// mask is given, masked-out (0.0) parameters are left untouched.
void sgd_step(NetParams& params, std::span<const double> grad, double learning_rate,
              double momentum, double weight_decay, SgdState& state,
              const std::vector<double>* mask = nullptr);

}  // namespace rgsc
