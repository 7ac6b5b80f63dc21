#pragma once

#include <cstdint>
#include <filesystem>
#include <string>

#include "json.hpp"

#include "asn/experiments.hpp"

namespace asn {

inline constexpr std::uint32_t kModelVersion = 1;
inline constexpr int kDetectorVersion = 1;

/// Binary model file: scenario, kernel widths and every training RTF. The
/// LONO models are rebuilt on load.
std::string serialize_model(const TrainedSystem& system);
TrainedSystem deserialize_model(const std::string& bytes);
void save_model(const TrainedSystem& system, const std::filesystem::path& path);
TrainedSystem load_model(const std::filesystem::path& path);

/// FNV-1a over the serialized model.
std::uint64_t model_hash(const TrainedSystem& system);
std::string hex64(std::uint64_t v);

nlohmann::json to_json(const DetectorConfig& config);
DetectorConfig detector_from_json(const nlohmann::json& j);
void save_detector(const DetectorConfig& config, const std::filesystem::path& path);
DetectorConfig load_detector(const std::filesystem::path& path);

}  // namespace asn
