#include "rgsc/net.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "rgsc/error.hpp"
#include "rgsc/rng.hpp"

namespace rgsc {
namespace {

double stable_softplus(double x) { return x > 30.0 ? x : std::log1p(std::exp(x)); }
double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

void act_forward(std::span<const double> pre, std::span<double> post, ActivationKind k,
                 double& margin) {
  if (k == ActivationKind::Relu) {
    for (size_t i = 0; i < pre.size(); ++i) {
      margin = std::min(margin, std::abs(pre[i]));
      post[i] = pre[i] > 0.0 ? pre[i] : 0.0;
    }
  } else {
    for (size_t i = 0; i < pre.size(); ++i) post[i] = std::tanh(pre[i]);
  }
}

// d(post)/d(pre) applied to an upstream gradient, in place.
void act_backward(std::span<const double> pre, std::span<const double> post,
                  std::span<double> grad, ActivationKind k) {
  if (k == ActivationKind::Relu) {
    for (size_t i = 0; i < grad.size(); ++i) {
      if (pre[i] <= 0.0) grad[i] = 0.0;
    }
  } else {
    for (size_t i = 0; i < grad.size(); ++i) grad[i] *= 1.0 - post[i] * post[i];
  }
}

// 3x3 convolution, stride 1, zero padding 1. Weights are [out][in][3][3].
void conv3x3_forward(const double* in, int chans, int height, int width, const double* w,
                     const double* b, double* out, int filters) {
  const int hw = height * width;
  for (int oc = 0; oc < filters; ++oc) {
    double* o = out + size_t(oc) * hw;
    std::fill(o, o + hw, b[oc]);
    const double* wf = w + size_t(oc) * chans * 9;
    for (int ic = 0; ic < chans; ++ic) {
      const double* x = in + size_t(ic) * hw;
      const double* wk = wf + size_t(ic) * 9;
      for (int dr = -1; dr <= 1; ++dr) {
        const int r0 = std::max(0, -dr), r1 = std::min(height, height - dr);
        for (int dc = -1; dc <= 1; ++dc) {
          const double wv = wk[(dr + 1) * 3 + (dc + 1)];
          const int c0 = std::max(0, -dc), c1 = std::min(width, width - dc);
          for (int r = r0; r < r1; ++r) {
            double* orow = o + r * width;
            const double* xrow = x + (r + dr) * width + dc;
            for (int c = c0; c < c1; ++c) orow[c] += wv * xrow[c];
          }
        }
      }
    }
  }
}

void conv3x3_backward(const double* in, const double* dout, int chans, int height, int width,
                      int filters, const double* w, double* dw, double* db, double* din) {
  const int hw = height * width;
  for (int oc = 0; oc < filters; ++oc) {
    const double* go = dout + size_t(oc) * hw;
    double acc = 0.0;
    for (int i = 0; i < hw; ++i) acc += go[i];
    db[oc] += acc;
    const double* wf = w + size_t(oc) * chans * 9;
    double* dwf = dw + size_t(oc) * chans * 9;
    for (int ic = 0; ic < chans; ++ic) {
      const double* x = in + size_t(ic) * hw;
      double* dx = din ? din + size_t(ic) * hw : nullptr;
      const double* wk = wf + size_t(ic) * 9;
      double* dwk = dwf + size_t(ic) * 9;
      for (int dr = -1; dr <= 1; ++dr) {
        const int r0 = std::max(0, -dr), r1 = std::min(height, height - dr);
        for (int dc = -1; dc <= 1; ++dc) {
          const int c0 = std::max(0, -dc), c1 = std::min(width, width - dc);
          const double wv = wk[(dr + 1) * 3 + (dc + 1)];
          double wacc = 0.0;
          for (int r = r0; r < r1; ++r) {
            const double* grow = go + r * width;
            const double* xrow = x + (r + dr) * width + dc;
            for (int c = c0; c < c1; ++c) wacc += grow[c] * xrow[c];
          }
          dwk[(dr + 1) * 3 + (dc + 1)] += wacc;
          if (dx) {
            for (int r = r0; r < r1; ++r) {
              const double* grow = go + r * width;
              double* dxrow = dx + (r + dr) * width + dc;
              for (int c = c0; c < c1; ++c) dxrow[c] += wv * grow[c];
            }
          }
        }
      }
    }
  }
}

void dense_forward(const double* x, int in, const double* w, const double* b, double* y,
                   int out) {
  for (int o = 0; o < out; ++o) {
    const double* row = w + size_t(o) * in;
    double acc = b[o];
    for (int i = 0; i < in; ++i) acc += row[i] * x[i];
    y[o] = acc;
  }
}

void dense_backward(const double* x, const double* dy, int in, int out, const double* w,
                    double* dw, double* db, double* dx) {
  for (int o = 0; o < out; ++o) {
    const double g = dy[o];
    db[o] += g;
    const double* row = w + size_t(o) * in;
    double* drow = dw + size_t(o) * in;
    for (int i = 0; i < in; ++i) drow[i] += g * x[i];
    if (dx) {
      for (int i = 0; i < in; ++i) dx[i] += row[i] * g;
    }
  }
}

void check_finite(double loss, const char* head) {
  if (!std::isfinite(loss)) {
    throw std::runtime_error(std::string("non-finite loss in head '") + head + "'");
  }
}

}  // namespace

uint64_t NetConfig::shape_hash() const {
  uint64_t h = 0x52475343ULL;  // arbitrary base
  for (uint64_t v :
       {uint64_t(torso), uint64_t(blocks), uint64_t(filters), uint64_t(hidden),
        uint64_t(activation), uint64_t(channels), uint64_t(height), uint64_t(width),
        uint64_t(actions)}) {
    h = splitmix64(h ^ v);
  }
  return h;
}

std::string NetConfig::describe() const {
  char buf[128];
  std::snprintf(buf, sizeof buf, "%s blocks=%d filters=%d hidden=%d %s in=%dx%dx%d actions=%d",
                torso == TorsoKind::Conv ? "conv" : "mlp", blocks, filters, hidden,
                activation == ActivationKind::Relu ? "relu" : "tanh", channels, height, width,
                actions);
  return buf;
}

Net::Net(const NetConfig& cfg) : cfg_(cfg) {
  if (cfg.channels < 1 || cfg.height < 1 || cfg.width < 1 || cfg.actions < 1 ||
      cfg.hidden < 1 || (cfg.torso == TorsoKind::Conv && (cfg.blocks < 0 || cfg.filters < 1))) {
    throw ConfigError("invalid net config: " + cfg.describe());
  }
  auto add = [&](std::string name, size_t size) -> size_t {
    const size_t offset = param_count_;
    layout_.push_back({std::move(name), offset, size});
    param_count_ += size;
    return offset;
  };
  const size_t in = size_t(cfg.input_size());
  const size_t hw = size_t(cfg.height) * size_t(cfg.width);
  if (cfg_.torso == TorsoKind::Conv) {
    const size_t f = size_t(cfg.filters);
    off_.torso_w = add("torso.conv_in.w", f * size_t(cfg.channels) * 9);
    off_.torso_b = add("torso.conv_in.b", f);
    for (int b = 0; b < cfg.blocks; ++b) {
      const std::string base = "torso.block" + std::to_string(b);
      BlockOffsets bo;
      bo.w1 = add(base + ".conv1.w", f * f * 9);
      bo.b1 = add(base + ".conv1.b", f);
      bo.w2 = add(base + ".conv2.w", f * f * 9);
      bo.b2 = add(base + ".conv2.b", f);
      off_.blocks.push_back(bo);
    }
    trunk_size_ = f * hw;
  } else {
    off_.torso_w = add("torso.dense.w", size_t(cfg.hidden) * in);
    off_.torso_b = add("torso.dense.b", size_t(cfg.hidden));
    trunk_size_ = size_t(cfg.hidden);
  }
  off_.policy_w = add("head.policy.w", size_t(cfg.actions) * trunk_size_);
  off_.policy_b = add("head.policy.b", size_t(cfg.actions));
  auto add_head = [&](const char* name, HeadOffsets& ho) {
    const std::string base = std::string("head.") + name;
    ho.hw = add(base + ".h.w", size_t(cfg_.hidden) * trunk_size_);
    ho.hb = add(base + ".h.b", size_t(cfg_.hidden));
    ho.ow = add(base + ".out.w", size_t(cfg_.hidden));
    ho.ob = add(base + ".out.b", 1);
  };
  add_head("value", off_.value);
  add_head("regret", off_.regret);
  add_head("rank", off_.rank);
}

NetParams Net::init_params(uint64_t seed) const {
  NetParams p;
  p.values.assign(param_count_, 0.0);
  Rng rng(mix_seed(seed, 0x4e457450ULL));
  for (const auto& segm : layout_) {
    if (segm.name.ends_with(".b")) continue;  // biases start at zero
    size_t fan_in = 0;
    if (segm.name.ends_with("conv_in.w")) {
      fan_in = size_t(cfg_.channels) * 9;
    } else if (segm.name.find(".conv") != std::string::npos) {
      fan_in = size_t(cfg_.filters) * 9;
    } else if (segm.name == "torso.dense.w") {
      fan_in = size_t(cfg_.input_size());
    } else if (segm.name.ends_with(".out.w")) {
      fan_in = size_t(cfg_.hidden);
    } else {
      fan_in = trunk_size_;
    }
    const double scale = cfg_.activation == ActivationKind::Relu
                             ? std::sqrt(2.0 / double(fan_in))
                             : std::sqrt(1.0 / double(fan_in));
    for (size_t i = 0; i < segm.size; ++i) p.values[segm.offset + i] = scale * rng.normal();
  }
  return p;
}

NetOutput Net::forward_one(const NetParams& params, std::span<const double> input,
                           Cache* cache) const {
  if (input.size() != size_t(cfg_.input_size())) {
    throw ConfigError("net input size " + std::to_string(input.size()) + " != expected " +
                      std::to_string(cfg_.input_size()));
  }
  if (params.values.size() != param_count_) {
    throw ConfigError("parameter vector size " + std::to_string(params.values.size()) +
                      " != expected " + std::to_string(param_count_));
  }
  Cache local;
  Cache& c = cache ? *cache : local;
  const double* pv = params.values.data();
  c.min_act_margin = 1e30;
  c.input.assign(input.begin(), input.end());
  c.torso_pre.resize(trunk_size_);
  c.torso_post.resize(trunk_size_);

  if (cfg_.torso == TorsoKind::Conv) {
    conv3x3_forward(c.input.data(), cfg_.channels, cfg_.height, cfg_.width, pv + off_.torso_w,
                    pv + off_.torso_b, c.torso_pre.data(), cfg_.filters);
  } else {
    dense_forward(c.input.data(), cfg_.input_size(), pv + off_.torso_w, pv + off_.torso_b,
                  c.torso_pre.data(), cfg_.hidden);
  }
  act_forward(c.torso_pre, c.torso_post, cfg_.activation, c.min_act_margin);

  const size_t nblocks = off_.blocks.size();
  c.block_pre1.resize(nblocks);
  c.block_post1.resize(nblocks);
  c.block_pre2.resize(nblocks);
  c.block_post2.resize(nblocks);
  const std::vector<double>* trunk = &c.torso_post;
  for (size_t b = 0; b < nblocks; ++b) {
    const auto& bo = off_.blocks[b];
    c.block_pre1[b].resize(trunk_size_);
    c.block_post1[b].resize(trunk_size_);
    c.block_pre2[b].resize(trunk_size_);
    c.block_post2[b].resize(trunk_size_);
    conv3x3_forward(trunk->data(), cfg_.filters, cfg_.height, cfg_.width, pv + bo.w1, pv + bo.b1,
                    c.block_pre1[b].data(), cfg_.filters);
    act_forward(c.block_pre1[b], c.block_post1[b], cfg_.activation, c.min_act_margin);
    conv3x3_forward(c.block_post1[b].data(), cfg_.filters, cfg_.height, cfg_.width, pv + bo.w2,
                    pv + bo.b2, c.block_pre2[b].data(), cfg_.filters);
    for (size_t i = 0; i < trunk_size_; ++i) c.block_pre2[b][i] += (*trunk)[i];  // skip path
    act_forward(c.block_pre2[b], c.block_post2[b], cfg_.activation, c.min_act_margin);
    trunk = &c.block_post2[b];
  }
  const double* t = trunk->data();

  c.policy_logits.resize(size_t(cfg_.actions));
  dense_forward(t, int(trunk_size_), pv + off_.policy_w, pv + off_.policy_b,
                c.policy_logits.data(), cfg_.actions);

  auto run_head = [&](const HeadOffsets& ho, std::vector<double>& hpre,
                      std::vector<double>& hpost) {
    hpre.resize(size_t(cfg_.hidden));
    hpost.resize(size_t(cfg_.hidden));
    dense_forward(t, int(trunk_size_), pv + ho.hw, pv + ho.hb, hpre.data(), cfg_.hidden);
    act_forward(hpre, hpost, cfg_.activation, c.min_act_margin);
    double y = pv[ho.ob];
    const double* ow = pv + ho.ow;
    for (int i = 0; i < cfg_.hidden; ++i) y += ow[i] * hpost[i];
    return y;
  };
  c.value_pre = run_head(off_.value, c.value_hpre, c.value_hpost);
  c.value_out = std::tanh(c.value_pre);
  c.regret_pre = run_head(off_.regret, c.regret_hpre, c.regret_hpost);
  c.regret_out = stable_softplus(c.regret_pre);
  c.rank_out = run_head(off_.rank, c.rank_hpre, c.rank_hpost);

  NetOutput out;
  out.policy.resize(size_t(cfg_.actions));
  double mx = c.policy_logits[0];
  for (double v : c.policy_logits) mx = std::max(mx, v);
  double sum = 0.0;
  for (int a = 0; a < cfg_.actions; ++a) {
    out.policy[size_t(a)] = std::exp(c.policy_logits[size_t(a)] - mx);
    sum += out.policy[size_t(a)];
  }
  for (auto& v : out.policy) v /= sum;
  out.value = c.value_out;
  out.regret_value = c.regret_out;
  out.ranking_score = c.rank_out;
  return out;
}

std::vector<NetOutput> Net::forward(const NetParams& params,
                                    const std::vector<std::vector<double>>& inputs) const {
  std::vector<NetOutput> out;
  out.reserve(inputs.size());
  for (const auto& in : inputs) out.push_back(forward_one(params, in));
  return out;
}

void Net::backward_one(const NetParams& params, const Cache& c, std::span<const double> dlogits,
                       double dvalue_pre, double dregret_pre, double drank_pre,
                       std::span<double> grad) const {
  const double* pv = params.values.data();
  double* gv = grad.data();
  const size_t nblocks = off_.blocks.size();
  const std::vector<double>& trunk = nblocks ? c.block_post2[nblocks - 1] : c.torso_post;
  std::vector<double> dtrunk(trunk_size_, 0.0);

  dense_backward(trunk.data(), dlogits.data(), int(trunk_size_), cfg_.actions,
                 pv + off_.policy_w, gv + off_.policy_w, gv + off_.policy_b, dtrunk.data());

  auto head_backward = [&](const HeadOffsets& ho, const std::vector<double>& hpre,
                           const std::vector<double>& hpost, double dout) {
    if (dout == 0.0) return;
    gv[ho.ob] += dout;
    const double* ow = pv + ho.ow;
    double* gow = gv + ho.ow;
    std::vector<double> dh(size_t(cfg_.hidden));
    for (int i = 0; i < cfg_.hidden; ++i) {
      gow[i] += dout * hpost[size_t(i)];
      dh[size_t(i)] = dout * ow[i];
    }
    act_backward(hpre, hpost, dh, cfg_.activation);
    dense_backward(trunk.data(), dh.data(), int(trunk_size_), cfg_.hidden, pv + ho.hw,
                   gv + ho.hw, gv + ho.hb, dtrunk.data());
  };
  head_backward(off_.value, c.value_hpre, c.value_hpost, dvalue_pre);
  head_backward(off_.regret, c.regret_hpre, c.regret_hpost, dregret_pre);
  head_backward(off_.rank, c.rank_hpre, c.rank_hpost, drank_pre);

  std::vector<double> dcur = std::move(dtrunk);
  std::vector<double> dnext(trunk_size_);
  for (size_t b = nblocks; b-- > 0;) {
    const auto& bo = off_.blocks[b];
    const std::vector<double>& block_in = b == 0 ? c.torso_post : c.block_post2[b - 1];
    act_backward(c.block_pre2[b], c.block_post2[b], dcur, cfg_.activation);
    // dcur is now the gradient at the conv2-output + skip sum.
    std::fill(dnext.begin(), dnext.end(), 0.0);
    std::vector<double> dpost1(trunk_size_, 0.0);
    conv3x3_backward(c.block_post1[b].data(), dcur.data(), cfg_.filters, cfg_.height, cfg_.width,
                     cfg_.filters, pv + bo.w2, gv + bo.w2, gv + bo.b2, dpost1.data());
    act_backward(c.block_pre1[b], c.block_post1[b], dpost1, cfg_.activation);
    conv3x3_backward(block_in.data(), dpost1.data(), cfg_.filters, cfg_.height, cfg_.width,
                     cfg_.filters, pv + bo.w1, gv + bo.w1, gv + bo.b1, dnext.data());
    for (size_t i = 0; i < trunk_size_; ++i) dnext[i] += dcur[i];  // skip path
    std::swap(dcur, dnext);
  }
  act_backward(c.torso_pre, c.torso_post, dcur, cfg_.activation);
  if (cfg_.torso == TorsoKind::Conv) {
    conv3x3_backward(c.input.data(), dcur.data(), cfg_.channels, cfg_.height, cfg_.width,
                     cfg_.filters, pv + off_.torso_w, gv + off_.torso_w, gv + off_.torso_b,
                     nullptr);
  } else {
    dense_backward(c.input.data(), dcur.data(), cfg_.input_size(), cfg_.hidden,
                   pv + off_.torso_w, gv + off_.torso_w, gv + off_.torso_b, nullptr);
  }
}

HeadLosses Net::loss_and_grads(const NetParams& params, const TrainBatch& batch,
                               const LossWeights& weights, std::vector<double>* grad_out,
                               double* min_act_margin) const {
  const size_t n = batch.size();
  if (n == 0) throw ContractViolation("loss_and_grads called with an empty batch");
  if (batch.policy_targets.size() != n || batch.value_targets.size() != n ||
      batch.regret_targets.size() != n) {
    throw ConfigError("train batch target lengths do not match input count");
  }

  std::vector<Cache> caches(n);
  double margin = 1e30;
  for (size_t i = 0; i < n; ++i) {
    forward_one(params, batch.inputs[i], &caches[i]);
    margin = std::min(margin, caches[i].min_act_margin);
  }
  if (min_act_margin) *min_act_margin = margin;

  HeadLosses losses;
  const double inv_n = 1.0 / double(n);
  const size_t actions = size_t(cfg_.actions);

  // Per-item gradient seeds at the head outputs.
  std::vector<std::vector<double>> dlogits(n, std::vector<double>(actions, 0.0));
  std::vector<double> dvalue(n, 0.0), dregret(n, 0.0), drank(n, 0.0);

  std::vector<double> softmax(actions), logsoft(actions);
  for (size_t i = 0; i < n; ++i) {
    const auto& logits = caches[i].policy_logits;
    const auto& target = batch.policy_targets[i];
    if (target.size() != actions) throw ConfigError("policy target has wrong action count");
    double mx = logits[0];
    for (double v : logits) mx = std::max(mx, v);
    double sum = 0.0;
    for (size_t a = 0; a < actions; ++a) sum += std::exp(logits[a] - mx);
    const double lse = mx + std::log(sum);
    double ce = 0.0;
    for (size_t a = 0; a < actions; ++a) {
      logsoft[a] = logits[a] - lse;
      softmax[a] = std::exp(logsoft[a]);
      ce -= target[a] * logsoft[a];
    }
    losses.policy += ce * inv_n;
    if (grad_out && weights.policy != 0.0) {
      const double s = weights.policy * inv_n;
      for (size_t a = 0; a < actions; ++a) dlogits[i][a] = s * (softmax[a] - target[a]);
    }

    const double v = caches[i].value_out;
    const double ev = v - batch.value_targets[i];
    losses.value += ev * ev * inv_n;
    if (grad_out && weights.value != 0.0) {
      dvalue[i] = weights.value * inv_n * 2.0 * ev * (1.0 - v * v);
    }

    const double r = caches[i].regret_out;
    const double er = r - batch.regret_targets[i];
    losses.regret += er * er * inv_n;
    if (grad_out && weights.regret != 0.0) {
      dregret[i] = weights.regret * inv_n * 2.0 * er * sigmoid(caches[i].regret_pre);
    }
  }
  check_finite(losses.policy, "policy");
  check_finite(losses.value, "value");
  check_finite(losses.regret, "regret");

  for (const auto& group : batch.ranking_groups) {
    if (group.size() < 2) {
      throw ContractViolation("ranking group must contain at least two states");
    }
    const size_t g = group.size();
    std::vector<double> gamma(g), ls(g);
    for (size_t j = 0; j < g; ++j) {
      const int idx = group[j];
      if (idx < 0 || size_t(idx) >= n) throw ConfigError("ranking group index out of range");
      gamma[j] = caches[size_t(idx)].rank_out;
    }
    double gmax = gamma[0];
    for (double v : gamma) gmax = std::max(gmax, v);
    double gsum = 0.0;
    for (size_t j = 0; j < g; ++j) gsum += std::exp(gamma[j] - gmax);
    const double glse = gmax + std::log(gsum);
    double bmax = -1e300;
    for (size_t j = 0; j < g; ++j) {
      ls[j] = gamma[j] - glse + batch.regret_targets[size_t(group[j])];
      bmax = std::max(bmax, ls[j]);
    }
    double bsum = 0.0;
    for (size_t j = 0; j < g; ++j) bsum += std::exp(ls[j] - bmax);
    losses.ranking += -(bmax + std::log(bsum));
    if (grad_out && weights.ranking != 0.0) {
      for (size_t j = 0; j < g; ++j) {
        const double p = std::exp(gamma[j] - glse);
        const double w = std::exp(ls[j] - bmax) / bsum;
        drank[size_t(group[j])] += weights.ranking * (p - w);
      }
    }
  }
  check_finite(losses.ranking, "ranking");

  losses.total = weights.policy * losses.policy + weights.value * losses.value +
                 weights.regret * losses.regret + weights.ranking * losses.ranking;

  if (grad_out) {
    grad_out->assign(param_count_, 0.0);
    std::span<double> grad(*grad_out);
    std::vector<double> zero(actions, 0.0);
    for (size_t i = 0; i < n; ++i) {
      backward_one(params, caches[i], weights.policy != 0.0 ? dlogits[i] : zero, dvalue[i],
                   dregret[i], drank[i], grad);
    }
  }
  return losses;
}

std::vector<double> Net::segment_mask(std::span<const std::string> prefixes) const {
  std::vector<double> mask(param_count_, 0.0);
  for (const auto& segm : layout_) {
    for (const auto& prefix : prefixes) {
      if (segm.name.starts_with(prefix)) {
        std::fill(mask.begin() + long(segm.offset), mask.begin() + long(segm.offset + segm.size),
                  1.0);
        break;
      }
    }
  }
  return mask;
}

void sgd_step(NetParams& params, std::span<const double> grad, double learning_rate,
              double momentum, double weight_decay, SgdState& state,
              const std::vector<double>* mask) {
  const size_t n = params.values.size();
  if (grad.size() != n) throw ConfigError("gradient size does not match parameter count");
  if (state.velocity.size() != n) state.velocity.assign(n, 0.0);
  if (mask && mask->size() != n) throw ConfigError("mask size does not match parameter count");
  for (size_t i = 0; i < n; ++i) {
    if (mask && (*mask)[i] == 0.0) continue;
    const double g = grad[i] + weight_decay * params.values[i];
    const double v = momentum * state.velocity[i] + g;
    state.velocity[i] = v;
    params.values[i] -= learning_rate * v;
    if (!std::isfinite(params.values[i])) {
      throw std::runtime_error("non-finite parameter after sgd step at index " +
                               std::to_string(i));
    }
  }
}

}  // namespace rgsc
