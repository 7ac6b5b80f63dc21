#include "asn/persistence.hpp"

#include <cstring>
#include <fstream>
#include <sstream>

#include "asn/error.hpp"

namespace asn {
namespace {

constexpr char kMagic[8] = {'A', 'S', 'N', 'M', 'O', 'D', 'E', 'L'};

class Writer {
 public:
  template <typename T>
  void put(T v) {
    char buf[sizeof(T)];
    std::memcpy(buf, &v, sizeof(T));
    out_.append(buf, sizeof(T));
  }
  void put_string(const std::string& s) {
    put<std::uint64_t>(s.size());
    out_ += s;
  }
  void raw(const char* p, std::size_t n) { out_.append(p, n); }
  std::string take() { return std::move(out_); }

 private:
  std::string out_;
};

class Reader {
 public:
  explicit Reader(const std::string& in) : in_(in) {}
  template <typename T>
  T get() {
    need(sizeof(T));
    T v;
    std::memcpy(&v, in_.data() + pos_, sizeof(T));
    pos_ += sizeof(T);
    return v;
  }
  std::string get_string() {
    const auto n = get<std::uint64_t>();
    need(n);
    std::string s = in_.substr(pos_, n);
    pos_ += n;
    return s;
  }
  std::string raw(std::size_t n) {
    need(n);
    std::string s = in_.substr(pos_, n);
    pos_ += n;
    return s;
  }
  bool done() const { return pos_ == in_.size(); }

 private:
  void need(std::size_t n) const {
    if (in_.size() - pos_ < n) throw Error(ErrorKind::Schema, "model file is truncated");
  }
  const std::string& in_;
  std::size_t pos_ = 0;
};

std::string read_file(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw Error(ErrorKind::Io, "cannot open " + path.string());
  std::ostringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

void write_file(const std::filesystem::path& path, const std::string& bytes) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw Error(ErrorKind::Io, "cannot write " + path.string());
  os.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!os) throw Error(ErrorKind::Io, "write failed for " + path.string());
}

}  // namespace

std::string serialize_model(const TrainedSystem& system) {
  Writer w;
  w.raw(kMagic, sizeof kMagic);
  w.put<std::uint32_t>(kModelVersion);
  w.put_string(to_json(system.scenario).dump());
  const auto& p = system.params;
  w.put<std::uint64_t>(p.epsilons.size());
  for (double e : p.epsilons) w.put(e);
  w.put(p.sigma2);
  const auto& t = *system.train;
  w.put<std::uint64_t>(t.num_points());
  w.put<std::uint64_t>(t.num_nodes());
  for (const auto& pt : t.points())
    for (const auto& f : pt) {
      w.put<std::int32_t>(f.node_id);
      w.put<std::uint64_t>(f.band.k_min);
      w.put<std::uint64_t>(f.band.k_max);
      w.put<std::uint64_t>(static_cast<std::uint64_t>(f.values.size()));
      for (Eigen::Index i = 0; i < f.values.size(); ++i) w.put(f.values(i));
    }
  w.put<std::uint64_t>(t.num_labelled());
  for (const auto& l : t.labels()) {
    w.put<std::uint64_t>(l.index);
    for (int k = 0; k < 3; ++k) w.put(l.position(k));
  }
  return w.take();
}

TrainedSystem deserialize_model(const std::string& bytes) {
  Reader r(bytes);
  if (r.raw(sizeof kMagic) != std::string(kMagic, sizeof kMagic))
    throw Error(ErrorKind::Schema, "not an asn model file (bad magic)");
  const auto version = r.get<std::uint32_t>();
  if (version != kModelVersion)
    throw Error(ErrorKind::Schema, "unsupported model version " + std::to_string(version));
  Scenario sc = parse_scenario(r.get_string());
  KernelParams p;
  p.epsilons.resize(r.get<std::uint64_t>());
  for (auto& e : p.epsilons) e = r.get<double>();
  p.sigma2 = r.get<double>();
  const auto n_points = r.get<std::uint64_t>();
  const auto n_nodes = r.get<std::uint64_t>();
  std::vector<NodeFeatures> points(n_points);
  for (auto& pt : points) {
    pt.resize(n_nodes);
    for (auto& f : pt) {
      f.node_id = r.get<std::int32_t>();
      f.band.k_min = r.get<std::uint64_t>();
      f.band.k_max = r.get<std::uint64_t>();
      f.values.resize(static_cast<Eigen::Index>(r.get<std::uint64_t>()));
      for (Eigen::Index i = 0; i < f.values.size(); ++i) f.values(i) = r.get<double>();
    }
  }
  std::vector<LabelledPoint> labels(r.get<std::uint64_t>());
  for (auto& l : labels) {
    l.index = r.get<std::uint64_t>();
    for (int k = 0; k < 3; ++k) l.position(k) = r.get<double>();
  }
  if (!r.done()) throw Error(ErrorKind::Schema, "trailing bytes in model file");
  auto train = std::make_shared<const TrainingSet>(std::move(points), std::move(labels));
  return assemble_system(std::move(sc), std::move(train), std::move(p));
}

void save_model(const TrainedSystem& system, const std::filesystem::path& path) {
  write_file(path, serialize_model(system));
}

TrainedSystem load_model(const std::filesystem::path& path) { return deserialize_model(read_file(path)); }

std::uint64_t model_hash(const TrainedSystem& system) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : serialize_model(system)) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string hex64(std::uint64_t v) {
  std::ostringstream os;
  os << std::hex;
  os.width(16);
  os.fill('0');
  os << v;
  return os.str();
}

nlohmann::json to_json(const DetectorConfig& c) {
  nlohmann::json psi = nlohmann::json::array();
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) psi.push_back(c.psi.psi(i, j));
  return {{"schema", "asn-detector"},
          {"version", kDetectorVersion},
          {"num_nodes", c.num_nodes},
          {"prior", {{"sigma2_align", c.prior.sigma2_align}, {"lambda", c.prior.lambda}, {"e_max", c.prior.e_max}}},
          {"psi", psi},
          {"threshold", c.threshold},
          {"bp", {{"tol", c.bp.tol}, {"max_iters", c.bp.max_iters}}},
          {"naive_threshold", c.naive.threshold}};
}

DetectorConfig detector_from_json(const nlohmann::json& j) {
  try {
    if (j.at("schema") != "asn-detector") throw Error(ErrorKind::Schema, "not an asn-detector document");
    if (j.at("version").get<int>() != kDetectorVersion)
      throw Error(ErrorKind::Schema, "unsupported detector version " + j.at("version").dump());
    DetectorConfig c;
    c.num_nodes = j.at("num_nodes").get<std::size_t>();
    const auto& pr = j.at("prior");
    c.prior.sigma2_align = pr.at("sigma2_align").get<double>();
    c.prior.lambda = pr.at("lambda").get<double>();
    c.prior.e_max = pr.at("e_max").get<double>();
    const auto& psi = j.at("psi");
    if (!psi.is_array() || psi.size() != 9) throw Error(ErrorKind::Schema, "psi must hold 9 values");
    for (int i = 0; i < 9; ++i) c.psi.psi(i / 3, i % 3) = psi.at(static_cast<std::size_t>(i)).get<double>();
    c.threshold = j.at("threshold").get<double>();
    c.bp.tol = j.at("bp").at("tol").get<double>();
    c.bp.max_iters = j.at("bp").at("max_iters").get<int>();
    c.naive.threshold = j.at("naive_threshold").get<double>();
    c.prior.validate();
    c.psi.validate();
    c.naive.validate();
    if (!(c.threshold >= 0.0 && c.threshold <= 1.0)) throw Error(ErrorKind::Schema, "threshold outside [0, 1]");
    return c;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::Schema, std::string("detector config: ") + e.what());
  }
}

void save_detector(const DetectorConfig& config, const std::filesystem::path& path) {
  write_file(path, to_json(config).dump(2) + "\n");
}

DetectorConfig load_detector(const std::filesystem::path& path) {
  const auto text = read_file(path);
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(ErrorKind::Schema, path.string() + ": " + json_error_location(text, e.byte) + ": " + e.what());
  }
  return detector_from_json(j);
}

}  // namespace asn
