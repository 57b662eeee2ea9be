#pragma once

#include <filesystem>
#include <string>

#include "hrc/pipeline.hpp"

namespace hrc {

/// Version of the execution service's JSON protocol, recorded in manifests.
inline constexpr int kProtocolVersion = 1;

std::string sha256_hex(const std::string& data);

/// Writes domain.json, model.json, rewards.json, momdp.json, policy.json and
/// manifest.json (file hashes, protocol version, training metadata). Output
/// is byte-identical for identical bundles unless `timestamp` is non-empty.
void save_bundle(const TrainedBundle& bundle, const std::filesystem::path& dir, const std::string& timestamp = {});

/// Loads a bundle and verifies every hash in its manifest.
TrainedBundle load_bundle(const std::filesystem::path& dir);

/// Writes `j` with two-space indentation and a trailing newline.
void write_json(const std::filesystem::path& path, const nlohmann::json& j);
nlohmann::json read_json(const std::filesystem::path& path);

}  // namespace hrc
