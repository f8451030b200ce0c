#include "oac/params_io.hpp"

#include <bit>
#include <fstream>
#include <stdexcept>
#include <vector>

#include <json.hpp>

namespace oac {

static_assert(std::endian::native == std::endian::little,
              "parameter dump assumes a little-endian host");

namespace {

using nlohmann::json;

struct NamedNet {
  const char* name;
  const MlpParams* params;
};

std::vector<NamedNet> net_list(const Agent& agent) {
  return {{"policy", &agent.policy.trunk},
          {"q1", &agent.critic.online1},
          {"q2", &agent.critic.online2},
          {"q1_target", &agent.critic.target1},
          {"q2_target", &agent.critic.target2}};
}

}  // namespace

void save_agent(const Agent& agent, const std::string& bin_path,
                const std::string& manifest_path) {
  std::vector<double> flat;
  json tensors = json::array();
  for (const NamedNet& net : net_list(agent)) {
    for (std::size_t k = 0; k < net.params->layers.size(); ++k) {
      const auto& l = net.params->layers[k];
      const std::string base =
          std::string(net.name) + ".l" + std::to_string(k);
      tensors.push_back({{"name", base + ".W"},
                         {"rows", l.W.rows()},
                         {"cols", l.W.cols()},
                         {"offset", flat.size()}});
      for (Eigen::Index r = 0; r < l.W.rows(); ++r)
        for (Eigen::Index c = 0; c < l.W.cols(); ++c)
          flat.push_back(l.W(r, c));
      tensors.push_back({{"name", base + ".b"},
                         {"rows", l.b.size()},
                         {"cols", 1},
                         {"offset", flat.size()}});
      for (Eigen::Index r = 0; r < l.b.size(); ++r) flat.push_back(l.b(r));
    }
  }

  json manifest;
  manifest["format"] = "oac-params-v1";
  manifest["dtype"] = "float64";
  manifest["byte_order"] = "little";
  manifest["layout"] = "row-major";
  manifest["obs_dim"] = agent.policy.obs_dim;
  manifest["act_dim"] = agent.policy.act_dim;
  manifest["hidden_units"] =
      static_cast<int>(agent.policy.trunk.layers.front().W.rows());
  manifest["total_values"] = flat.size();
  manifest["tensors"] = tensors;

  std::ofstream bin(bin_path, std::ios::binary);
  if (!bin) throw std::runtime_error("cannot write " + bin_path);
  bin.write(reinterpret_cast<const char*>(flat.data()),
            static_cast<std::streamsize>(flat.size() * sizeof(double)));
  if (!bin) throw std::runtime_error("short write to " + bin_path);

  std::ofstream mf(manifest_path, std::ios::binary);
  if (!mf) throw std::runtime_error("cannot write " + manifest_path);
  mf << manifest.dump(2) << "\n";
}

Agent load_agent(const std::string& bin_path,
                 const std::string& manifest_path) {
  std::ifstream mf(manifest_path, std::ios::binary);
  if (!mf) throw std::runtime_error("cannot open " + manifest_path);
  json manifest;
  try {
    mf >> manifest;
  } catch (const json::exception& e) {
    throw std::runtime_error(manifest_path + ": " + e.what());
  }
  if (manifest.value("format", "") != "oac-params-v1")
    throw std::runtime_error(manifest_path + ": unknown format");

  const int obs_dim = manifest.at("obs_dim").get<int>();
  const int act_dim = manifest.at("act_dim").get<int>();
  const int hidden = manifest.at("hidden_units").get<int>();
  const std::size_t total = manifest.at("total_values").get<std::size_t>();

  std::ifstream bin(bin_path, std::ios::binary | std::ios::ate);
  if (!bin) throw std::runtime_error("cannot open " + bin_path);
  const std::streamsize bytes = bin.tellg();
  if (static_cast<std::size_t>(bytes) != total * sizeof(double))
    throw std::runtime_error(bin_path + ": size does not match manifest");
  std::vector<double> flat(total);
  bin.seekg(0);
  bin.read(reinterpret_cast<char*>(flat.data()), bytes);
  if (!bin) throw std::runtime_error("short read from " + bin_path);

  // Rebuild the standard shapes and overwrite every value from the dump.
  Rng scratch(0);
  Agent agent;
  agent.policy = make_policy(obs_dim, act_dim, hidden, scratch);
  agent.policy_adam = make_adam_state(agent.policy.trunk);
  agent.critic = make_twin_critic(obs_dim, act_dim, hidden, scratch);

  std::size_t offset = 0;
  for (const NamedNet& net : net_list(agent)) {
    MlpParams* p = const_cast<MlpParams*>(net.params);
    const std::size_t count = p->param_count();
    if (offset + count > flat.size())
      throw std::runtime_error(bin_path + ": dump shorter than shapes imply");
    load_flat(*p, flat.data() + offset, count);
    offset += count;
  }
  if (offset != flat.size())
    throw std::runtime_error(bin_path + ": dump longer than shapes imply");
  return agent;
}

}  // namespace oac
