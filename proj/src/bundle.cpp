#include "hrc/bundle.hpp"

#include <fstream>
#include <iomanip>
#include <sstream>

#include <openssl/evp.h>

#include "hrc/errors.hpp"

namespace hrc {

namespace {

constexpr const char* kFiles[] = {"domain.json", "model.json", "rewards.json", "momdp.json", "policy.json"};

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw NotFound("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string dump(const nlohmann::json& j) { return j.dump(2) + "\n"; }

}  // namespace

std::string sha256_hex(const std::string& data) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), digest, &len, EVP_sha256(), nullptr) != 1)
    throw Error("SHA-256 computation failed");
  std::ostringstream out;
  for (unsigned int i = 0; i < len; ++i) out << std::hex << std::setw(2) << std::setfill('0') << static_cast<int>(digest[i]);
  return out.str();
}

void write_json(const std::filesystem::path& path, const nlohmann::json& j) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  out << dump(j);
}

nlohmann::json read_json(const std::filesystem::path& path) {
  try {
    return nlohmann::json::parse(read_file(path));
  } catch (const nlohmann::json::parse_error& ex) {
    throw ParseError(path.string(), ex.what());
  }
}

void save_bundle(const TrainedBundle& b, const std::filesystem::path& dir, const std::string& timestamp) {
  std::filesystem::create_directories(dir);
  const nlohmann::json docs[] = {to_json(b.domain), model_file_json(b.demos, b.model), rewards_to_json(b.rewards),
                                 to_json(b.momdp), to_json(b.policy)};
  nlohmann::json hashes = nlohmann::json::object();
  for (std::size_t i = 0; i < std::size(kFiles); ++i) {
    const auto text = dump(docs[i]);
    std::ofstream out(dir / kFiles[i], std::ios::binary);
    if (!out) throw Error("cannot write " + (dir / kFiles[i]).string());
    out << text;
    hashes[kFiles[i]] = sha256_hex(text);
  }
  nlohmann::json manifest{{"protocol_version", kProtocolVersion}, {"files", hashes}, {"metadata", b.metadata}};
  if (!timestamp.empty()) manifest["created"] = timestamp;
  write_json(dir / "manifest.json", manifest);
}

TrainedBundle load_bundle(const std::filesystem::path& dir) {
  if (!std::filesystem::is_directory(dir)) throw NotFound("bundle directory " + dir.string() + " does not exist");
  const auto manifest = read_json(dir / "manifest.json");
  std::map<std::string, std::string> text;
  for (const char* name : kFiles) {
    text[name] = read_file(dir / name);
    const auto expected = manifest.at("files").value(name, std::string{});
    if (sha256_hex(text[name]) != expected) throw ValidationError("bundle file " + std::string(name) + " does not match its manifest hash");
  }
  auto parse = [&](const char* name) {
    try {
      return nlohmann::json::parse(text[name]);
    } catch (const nlohmann::json::parse_error& ex) {
      throw ParseError(name, ex.what());
    }
  };
  TrainedBundle b;
  b.domain = domain_from_json(parse("domain.json"), "domain.json");
  std::tie(b.demos, b.model) = model_file_from_json(parse("model.json"));
  b.rewards = rewards_from_json(parse("rewards.json"));
  b.momdp = momdp_from_json(parse("momdp.json"));
  b.policy = policy_value_from_json(parse("policy.json"));
  b.metadata = manifest.value("metadata", nlohmann::json::object());
  if (static_cast<int>(b.rewards.size()) != b.model.k || b.momdp.num_y != b.model.k)
    throw ValidationError("bundle members disagree on the number of types");
  if (static_cast<int>(b.policy.alphas.size()) != b.momdp.num_x)
    throw ValidationError("policy does not cover every task-step");
  return b;
}

}  // namespace hrc
