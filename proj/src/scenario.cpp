#include "asn/scenario.hpp"

#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

#include "asn/error.hpp"

namespace asn {
namespace {

using nlohmann::json;

json vec_json(const Vec3& v) { return json::array({v.x(), v.y(), v.z()}); }

Vec3 vec_from(const json& j, const std::string& where) {
  if (!j.is_array() || j.size() != 3)
    throw Error(ErrorKind::Schema, where + ": expected an array of 3 numbers");
  Vec3 v;
  for (int i = 0; i < 3; ++i) {
    if (!j[static_cast<std::size_t>(i)].is_number()) throw Error(ErrorKind::Schema, where + ": expected numbers");
    v[i] = j[static_cast<std::size_t>(i)].get<double>();
  }
  return v;
}

template <typename T>
T get_or(const json& j, const char* key, T fallback, const std::string& where) {
  if (!j.contains(key)) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const json::exception&) {
    throw Error(ErrorKind::Schema, where + "/" + key + ": wrong type");
  }
}

}  // namespace

Vec3 RegionOfInterest::sample(Rng& rng) const {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const double r = radius * std::sqrt(unit(rng));
  const double phi = 2.0 * std::numbers::pi * unit(rng);
  return center + Vec3(r * std::cos(phi), r * std::sin(phi), 0.0);
}

void Scenario::validate() const {
  room.validate();
  if (nodes.empty()) throw Error(ErrorKind::Config, "scenario has no nodes");
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    if (nodes[i].id != static_cast<int>(i + 1))
      throw Error(ErrorKind::Config, "node ids must be 1..M in order");
    for (int mic = 0; mic < 2; ++mic)
      if (!room.contains(nodes[i].mic_position(mic)))
        throw Error(ErrorKind::InvalidGeometry, "node " + std::to_string(nodes[i].id) + " microphone outside room");
  }
  if (!(roi.radius > 0.0)) throw Error(ErrorKind::Config, "RoI radius must be > 0");
  for (double dx : {-roi.radius, roi.radius})
    for (int axis = 0; axis < 2; ++axis) {
      Vec3 p = roi.center;
      p[axis] += dx;
      if (!room.contains(p)) throw Error(ErrorKind::InvalidGeometry, "RoI extends outside the room");
    }
  if (labelled_positions.empty()) throw Error(ErrorKind::Config, "scenario needs labelled positions");
  for (const auto& p : labelled_positions)
    if (!room.contains(p)) throw Error(ErrorKind::InvalidGeometry, "labelled position outside room");
  if (std::isnan(snr_db)) throw Error(ErrorKind::Config, "snr_db must be a number");
  const double min_seconds = static_cast<double>(features.frame_len) / room.sample_rate;
  if (train_seconds < min_seconds || test_seconds < min_seconds)
    throw Error(ErrorKind::Config, "signal duration shorter than one STFT frame");
  features.band(room.sample_rate);
}

Scenario Scenario::standard(double t60) {
  Scenario s;
  s.room.t60 = t60;
  const Vec3 centre(3.0, 3.0, 1.5);
  const std::array<Vec3, 4> corners{Vec3(1.0, 1.0, 1.5), Vec3(5.0, 1.0, 1.5), Vec3(5.0, 5.0, 1.5),
                                    Vec3(1.0, 5.0, 1.5)};
  for (std::size_t i = 0; i < corners.size(); ++i) {
    const Vec3 to_centre = centre - corners[i];
    // Mic axis broadside to the room centre.
    const double orientation = std::atan2(to_centre.y(), to_centre.x()) + std::numbers::pi / 2.0;
    s.nodes.push_back(ArrayNode::make(static_cast<int>(i + 1), corners[i], orientation));
  }
  s.roi.center = centre;
  s.roi.radius = 2.0;
  s.labelled_positions = {centre, centre + Vec3(1.5, 0, 0), centre + Vec3(0, 1.5, 0), centre + Vec3(-1.5, 0, 0),
                          centre + Vec3(0, -1.5, 0)};
  return s;
}

json to_json(const Scenario& s) {
  json j;
  j["schema"] = "asn-scenario";
  j["version"] = kScenarioVersion;
  j["room"] = {{"dimensions", vec_json(s.room.dimensions)},
               {"t60", s.room.t60},
               {"speed_of_sound", s.room.speed_of_sound},
               {"sample_rate", s.room.sample_rate}};
  j["nodes"] = json::array();
  for (const auto& n : s.nodes)
    j["nodes"].push_back({{"id", n.id},
                          {"center", vec_json(n.center)},
                          {"orientation", n.orientation},
                          {"mic_offsets", json::array({vec_json(n.mic_offsets[0]), vec_json(n.mic_offsets[1])})}});
  j["roi"] = {{"center", vec_json(s.roi.center)}, {"radius", s.roi.radius}};
  j["snr_db"] = std::isinf(s.snr_db) ? json("inf") : json(s.snr_db);
  j["features"] = {{"frame_len", s.features.frame_len},
                   {"hop", s.features.hop},
                   {"band_hz", json::array({s.features.band_low_hz, s.features.band_high_hz})}};
  j["signals"] = {{"train_seconds", s.train_seconds}, {"test_seconds", s.test_seconds}};
  j["labelled_positions"] = json::array();
  for (const auto& p : s.labelled_positions) j["labelled_positions"].push_back(vec_json(p));
  if (s.test_source) j["test_source"] = vec_json(*s.test_source);
  if (s.displacement)
    j["displacement"] = {{"node", s.displacement->node},
                         {"shift", vec_json(s.displacement->shift)},
                         {"rotation", s.displacement->rotation}};
  return j;
}

Scenario scenario_from_json(const json& j) {
  if (!j.is_object()) throw Error(ErrorKind::Schema, "scenario: top level must be an object");
  if (j.value("schema", std::string()) != "asn-scenario")
    throw Error(ErrorKind::Schema, "scenario: missing or wrong \"schema\" (expected \"asn-scenario\")");
  const int version = get_or<int>(j, "version", -1, "");
  if (version != kScenarioVersion)
    throw Error(ErrorKind::Schema, "scenario: unsupported version " + std::to_string(version));

  Scenario s;
  if (!j.contains("room")) throw Error(ErrorKind::Schema, "scenario: missing /room");
  const auto& room = j.at("room");
  s.room.dimensions = vec_from(room.at("dimensions"), "/room/dimensions");
  s.room.t60 = get_or<double>(room, "t60", s.room.t60, "/room");
  s.room.speed_of_sound = get_or<double>(room, "speed_of_sound", s.room.speed_of_sound, "/room");
  s.room.sample_rate = get_or<double>(room, "sample_rate", s.room.sample_rate, "/room");

  if (!j.contains("nodes") || !j.at("nodes").is_array()) throw Error(ErrorKind::Schema, "scenario: missing /nodes array");
  for (std::size_t i = 0; i < j.at("nodes").size(); ++i) {
    const auto& n = j.at("nodes")[i];
    const std::string where = "/nodes/" + std::to_string(i);
    ArrayNode node;
    node.id = get_or<int>(n, "id", static_cast<int>(i + 1), where);
    if (!n.contains("center")) throw Error(ErrorKind::Schema, where + ": missing center");
    node.center = vec_from(n.at("center"), where + "/center");
    node.orientation = get_or<double>(n, "orientation", 0.0, where);
    if (n.contains("mic_offsets")) {
      const auto& off = n.at("mic_offsets");
      if (!off.is_array() || off.size() != 2)
        throw Error(ErrorKind::Schema, where + "/mic_offsets: exactly 2 microphones per node");
      node.mic_offsets = {vec_from(off[0], where + "/mic_offsets/0"), vec_from(off[1], where + "/mic_offsets/1")};
    } else {
      node = ArrayNode::make(node.id, node.center, node.orientation);
    }
    s.nodes.push_back(node);
  }
  if (j.contains("roi")) {
    s.roi.center = vec_from(j.at("roi").at("center"), "/roi/center");
    s.roi.radius = get_or<double>(j.at("roi"), "radius", s.roi.radius, "/roi");
  }
  if (j.contains("snr_db")) {
    const auto& v = j.at("snr_db");
    if (v.is_string() && v.get<std::string>() == "inf") s.snr_db = std::numeric_limits<double>::infinity();
    else if (v.is_number()) s.snr_db = v.get<double>();
    else throw Error(ErrorKind::Schema, "/snr_db: expected a number or \"inf\"");
  }
  if (j.contains("features")) {
    const auto& f = j.at("features");
    s.features.frame_len = get_or<std::size_t>(f, "frame_len", s.features.frame_len, "/features");
    s.features.hop = get_or<std::size_t>(f, "hop", s.features.hop, "/features");
    if (f.contains("band_hz")) {
      const auto& b = f.at("band_hz");
      if (!b.is_array() || b.size() != 2) throw Error(ErrorKind::Schema, "/features/band_hz: expected [low, high]");
      s.features.band_low_hz = b[0].get<double>();
      s.features.band_high_hz = b[1].get<double>();
    }
  }
  if (j.contains("signals")) {
    s.train_seconds = get_or<double>(j.at("signals"), "train_seconds", s.train_seconds, "/signals");
    s.test_seconds = get_or<double>(j.at("signals"), "test_seconds", s.test_seconds, "/signals");
  }
  if (j.contains("labelled_positions")) {
    const auto& lp = j.at("labelled_positions");
    for (std::size_t i = 0; i < lp.size(); ++i)
      s.labelled_positions.push_back(vec_from(lp[i], "/labelled_positions/" + std::to_string(i)));
  } else {
    s.labelled_positions = Scenario::standard().labelled_positions;
  }
  if (j.contains("test_source")) s.test_source = vec_from(j.at("test_source"), "/test_source");
  if (j.contains("displacement")) {
    const auto& d = j.at("displacement");
    DisplacementSpec spec;
    spec.node = get_or<int>(d, "node", 1, "/displacement");
    if (d.contains("shift")) spec.shift = vec_from(d.at("shift"), "/displacement/shift");
    spec.rotation = get_or<double>(d, "rotation", 0.0, "/displacement");
    if (spec.node < 1 || static_cast<std::size_t>(spec.node) > s.nodes.size())
      throw Error(ErrorKind::Schema, "/displacement/node: no such node");
    s.displacement = spec;
  }
  s.validate();
  return s;
}

std::string json_error_location(const std::string& text, std::size_t byte) {
  std::size_t line = 1;
  std::size_t col = 1;
  for (std::size_t i = 0; i < text.size() && i + 1 < byte; ++i) {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return "line " + std::to_string(line) + ", column " + std::to_string(col);
}

Scenario parse_scenario(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw Error(ErrorKind::Schema, "scenario: syntax error at " + json_error_location(text, e.byte));
  }
  try {
    return scenario_from_json(j);
  } catch (const json::exception& e) {
    throw Error(ErrorKind::Schema, std::string("scenario: ") + e.what());
  }
}

Scenario load_scenario(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::Io, "cannot read scenario " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_scenario(ss.str());
}

void save_scenario(const Scenario& s, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorKind::Io, "cannot write " + path.string());
  out << to_json(s).dump(2) << '\n';
}

}  // namespace asn
