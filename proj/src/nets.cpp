#include "renalparse/nets.hpp"

#include <cstring>
#include <fstream>

namespace renalparse {

void to_json(nlohmann::json& j, const NetConfig& c) {
  j = nlohmann::json{{"arch", arch_name(c.arch)},
                     {"in_channels", c.in_channels},
                     {"n_classes", c.n_classes},
                     {"base_channels", c.base_channels},
                     {"depth", c.depth},
                     {"vae_branch", c.vae_branch},
                     {"vae_weight", c.vae_weight},
                     {"vae_latent_channels", c.vae_latent_channels}};
}

void from_json(const nlohmann::json& j, NetConfig& c) {
  c.arch = arch_from_name(j.value("arch", "unet3d"));
  c.in_channels = j.value("in_channels", 1);
  c.n_classes = j.value("n_classes", 5);
  c.base_channels = j.value("base_channels", 8);
  c.depth = j.value("depth", 3);
  c.vae_branch = j.value("vae_branch", true);
  c.vae_weight = j.value("vae_weight", 0.1);
  c.vae_latent_channels = j.value("vae_latent_channels", 8);
}

namespace {
constexpr char kMagic[8] = {'R', 'N', 'P', 'C', 'K', 'P', 'T', '1'};
constexpr int kFormatVersion = 1;
}  // namespace

void save_checkpoint(Network<float>& net, const nlohmann::json& metadata,
                     const std::string& path) {
  auto params = net.params();
  nlohmann::json header;
  header["format_version"] = kFormatVersion;
  header["config"] = net.config();
  header["metadata"] = metadata;
  auto& manifest = header["params"] = nlohmann::json::array();
  for (const auto& p : params)
    manifest.push_back({{"name", p.name}, {"count", p.value->size()}});

  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("checkpoint: cannot write " + path);
  const std::string hs = header.dump();
  const std::uint32_t len = std::uint32_t(hs.size());
  out.write(kMagic, 8);
  out.write(reinterpret_cast<const char*>(&len), 4);
  out.write(hs.data(), std::streamsize(hs.size()));
  for (const auto& p : params)
    out.write(reinterpret_cast<const char*>(p.value->data()),
              std::streamsize(p.value->size() * sizeof(float)));
  if (!out) throw std::runtime_error("checkpoint: write failed: " + path);
}

Checkpoint load_checkpoint(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("checkpoint: cannot open " + path);
  char magic[8];
  in.read(magic, 8);
  if (!in || std::memcmp(magic, kMagic, 8) != 0)
    throw std::runtime_error("checkpoint: bad magic in " + path);
  std::uint32_t len = 0;
  in.read(reinterpret_cast<char*>(&len), 4);
  std::string hs(len, '\0');
  in.read(hs.data(), len);
  if (!in) throw std::runtime_error("checkpoint: truncated header in " + path);
  const nlohmann::json header = nlohmann::json::parse(hs);
  if (header.value("format_version", -1) != kFormatVersion)
    throw std::runtime_error("checkpoint: unsupported format version in " +
                             path);

  Checkpoint ckpt;
  ckpt.config = header.at("config").get<NetConfig>();
  ckpt.metadata = header.value("metadata", nlohmann::json::object());
  ckpt.net = build_network<float>(ckpt.config, 0);

  auto params = ckpt.net->params();
  const auto& manifest = header.at("params");
  if (manifest.size() != params.size())
    throw std::runtime_error("checkpoint: parameter manifest mismatch in " +
                             path);
  for (std::size_t i = 0; i < params.size(); ++i) {
    if (manifest[i].at("name") != params[i].name ||
        manifest[i].at("count") != params[i].value->size())
      throw std::runtime_error("checkpoint: parameter " + params[i].name +
                               " does not match manifest in " + path);
    in.read(reinterpret_cast<char*>(params[i].value->data()),
            std::streamsize(params[i].value->size() * sizeof(float)));
  }
  if (!in) throw std::runtime_error("checkpoint: truncated data in " + path);
  return ckpt;
}

}  // namespace renalparse
