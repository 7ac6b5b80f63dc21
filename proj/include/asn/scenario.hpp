#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "asn/acoustics.hpp"
#include "asn/features.hpp"

namespace asn {

struct RegionOfInterest {
  Vec3 center{3.0, 3.0, 1.5};
  double radius = 2.0;

  /// Uniform draw from the horizontal disc at the center height.
  Vec3 sample(Rng& rng) const;
};

/// Optional one-shot displacement used by the `detect` command.
struct DisplacementSpec {
  int node = 1;
  Vec3 shift = Vec3::Zero();
  double rotation = 0.0;
};

struct Scenario {
  RoomSpec room;
  std::vector<ArrayNode> nodes;
  RegionOfInterest roi;
  double snr_db = 20.0;
  FeatureConfig features;
  double train_seconds = 1.0;
  double test_seconds = 1.0;
  std::vector<Vec3> labelled_positions;
  std::optional<Vec3> test_source;
  std::optional<DisplacementSpec> displacement;

  void validate() const;
  std::size_t num_nodes() const { return nodes.size(); }

  /// 6 x 6 x 3 m room, four two-mic nodes on a square around a 2 m RoI,
  /// five labelled anchors (centre plus four at 1.5 m).
  static Scenario standard(double t60 = 0.2);
};

inline constexpr int kScenarioVersion = 1;

nlohmann::json to_json(const Scenario& s);
Scenario scenario_from_json(const nlohmann::json& j);
/// Parses scenario text; syntax errors report line and column.
Scenario parse_scenario(const std::string& text);
Scenario load_scenario(const std::filesystem::path& path);
void save_scenario(const Scenario& s, const std::filesystem::path& path);

/// Parse error location helper shared by the JSON readers.
std::string json_error_location(const std::string& text, std::size_t byte);

}  // namespace asn
