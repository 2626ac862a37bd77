#include "rgsc/checkpoint.hpp"

#include <fstream>

#include <nlohmann/json.hpp>

#include "rgsc/error.hpp"

namespace rgsc {
namespace {

constexpr char kMagic[] = "RGSCCKPT1";

void write_doubles(std::ofstream& out, const std::vector<double>& v) {
  const uint64_t n = v.size();
  out.write(reinterpret_cast<const char*>(&n), sizeof n);
  out.write(reinterpret_cast<const char*>(v.data()), std::streamsize(n * sizeof(double)));
}

std::vector<double> read_doubles(std::ifstream& in) {
  uint64_t n = 0;
  in.read(reinterpret_cast<char*>(&n), sizeof n);
  if (!in) throw ConfigError("checkpoint truncated while reading a length field");
  std::vector<double> v(n);
  in.read(reinterpret_cast<char*>(v.data()), std::streamsize(n * sizeof(double)));
  if (!in) throw ConfigError("checkpoint truncated while reading parameter data");
  return v;
}

}  // namespace

NetConfig Checkpoint::net_config() const {
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

Checkpoint make_checkpoint(const RunConfig& cfg, int iteration, bool regret_heads_trained,
                           NetParams params, SgdState opt) {
  Checkpoint c;
  c.iteration = iteration;
  c.method = cfg.method;
  c.regret_heads_trained = regret_heads_trained;
  c.config_hash = cfg.config_hash();
  c.game = cfg.game;
  c.board_size = cfg.board_size;
  c.torso = cfg.torso;
  c.blocks = cfg.blocks;
  c.filters = cfg.filters;
  c.hidden = cfg.hidden;
  c.activation = cfg.activation;
  c.params = std::move(params);
  c.opt = std::move(opt);
  return c;
}

void save_checkpoint(const std::filesystem::path& path, const Checkpoint& ckpt) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open checkpoint for writing: " + path.string());

  nlohmann::json header;
  header["iteration"] = ckpt.iteration;
  header["method"] = to_string(ckpt.method);
  header["regret_heads_trained"] = ckpt.regret_heads_trained;
  header["config_hash"] = ckpt.config_hash;
  header["game"] = to_string(ckpt.game);
  header["board_size"] = ckpt.board_size;
  header["torso"] = ckpt.torso == TorsoKind::Conv ? "conv" : "mlp";
  header["blocks"] = ckpt.blocks;
  header["filters"] = ckpt.filters;
  header["hidden"] = ckpt.hidden;
  header["activation"] = ckpt.activation == ActivationKind::Relu ? "relu" : "tanh";
  const std::string head = header.dump();

  out.write(kMagic, sizeof(kMagic) - 1);
  const uint32_t head_len = uint32_t(head.size());
  out.write(reinterpret_cast<const char*>(&head_len), sizeof head_len);
  out.write(head.data(), std::streamsize(head.size()));
  write_doubles(out, ckpt.params.values);
  write_doubles(out, ckpt.opt.velocity);
  if (!out) throw std::runtime_error("failed writing checkpoint " + path.string());
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open checkpoint " + path.string());
  char magic[sizeof(kMagic) - 1];
  in.read(magic, sizeof magic);
  if (!in || std::string_view(magic, sizeof magic) != kMagic) {
    throw ConfigError(path.string() + " is not a checkpoint file");
  }
  uint32_t head_len = 0;
  in.read(reinterpret_cast<char*>(&head_len), sizeof head_len);
  std::string head(head_len, '\0');
  in.read(head.data(), head_len);
  if (!in) throw ConfigError("checkpoint header truncated in " + path.string());
  nlohmann::json header = nlohmann::json::parse(head, nullptr, false);
  if (header.is_discarded()) throw ConfigError("checkpoint header is not valid JSON");

  Checkpoint c;
  c.iteration = header.at("iteration").get<int>();
  c.method = method_from_string(header.at("method").get<std::string>());
  c.regret_heads_trained = header.at("regret_heads_trained").get<bool>();
  c.config_hash = header.at("config_hash").get<uint64_t>();
  c.game = game_kind_from_string(header.at("game").get<std::string>());
  c.board_size = header.at("board_size").get<int>();
  c.torso = header.at("torso").get<std::string>() == "conv" ? TorsoKind::Conv : TorsoKind::Mlp;
  c.blocks = header.at("blocks").get<int>();
  c.filters = header.at("filters").get<int>();
  c.hidden = header.at("hidden").get<int>();
  c.activation = header.at("activation").get<std::string>() == "relu" ? ActivationKind::Relu
                                                                      : ActivationKind::Tanh;
  c.params.values = read_doubles(in);
  c.opt.velocity = read_doubles(in);
  return c;
}

Checkpoint load_checkpoint(const std::filesystem::path& path, uint64_t expected_hash) {
  Checkpoint c = load_checkpoint(path);
  if (c.config_hash != expected_hash) {
    throw ConfigError("checkpoint " + path.string() + " was trained under config hash " +
                      std::to_string(c.config_hash) + ", expected " +
                      std::to_string(expected_hash));
  }
  return c;
}

}  // namespace rgsc
