#include "asn/acoustics.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include <Eigen/Geometry>

#include "asn/error.hpp"
#include "asn/fft.hpp"

namespace asn {
namespace {

constexpr double kPi = std::numbers::pi;
constexpr int kSincTaps = 8;
constexpr double kHighPassHz = 100.0;

std::string fmt_vec(const Vec3& v) {
  std::ostringstream os;
  os << "(" << v.x() << ", " << v.y() << ", " << v.z() << ")";
  return os.str();
}

Vec3 rotate_z(const Vec3& v, double angle) {
  return Eigen::AngleAxisd(angle, Vec3::UnitZ()) * v;
}

// One axis of the image lattice: offset (in samples) and reflection count
// for every (m, q) pair.
struct AxisImage {
  double offset;
  int reflections;
};

std::vector<AxisImage> axis_images(double s, double r, double len, int n) {
  std::vector<AxisImage> out;
  out.reserve(static_cast<std::size_t>(2 * (2 * n + 1)));
  for (int m = -n; m <= n; ++m) {
    for (int q = 0; q <= 1; ++q) {
      out.push_back({(1 - 2 * q) * s - r + 2.0 * m * len, std::abs(m - q) + std::abs(m)});
    }
  }
  return out;
}

// Adds a Hann-windowed sinc centred at fractional sample `t`.
void add_fractional_impulse(std::vector<double>& h, double t, double gain) {
  const double base = std::floor(t);
  const double frac = t - base;
  const auto n0 = static_cast<long>(base);
  const double sin_pf = std::sin(kPi * frac);
  const double cos_q = std::cos(kPi * frac / 4.0);
  const double sin_q = std::sin(kPi * frac / 4.0);
  const long size = static_cast<long>(h.size());
  for (int k = -kSincTaps / 2 + 1; k <= kSincTaps / 2; ++k) {
    const long n = n0 + k;
    if (n < 0 || n >= size) continue;
    const double x = k - frac;
    double sinc;
    if (std::abs(x) < 1e-12) {
      sinc = 1.0;
    } else {
      const double sign = (k % 2 == 0) ? -1.0 : 1.0;
      sinc = sign * sin_pf / (kPi * x);
    }
    const double ck = std::cos(kPi * k / 4.0);
    const double sk = std::sin(kPi * k / 4.0);
    const double window = 0.5 * (1.0 + ck * cos_q + sk * sin_q);
    h[static_cast<std::size_t>(n)] += gain * window * sinc;
  }
}

// Allen-Berkley 100 Hz high-pass; removes the DC build-up of the all-positive
// image train.
void high_pass(std::vector<double>& h, double sample_rate) {
  const double w = 2.0 * kPi * kHighPassHz / sample_rate;
  const double r1 = std::exp(-w);
  const double b1 = 2.0 * r1 * std::cos(w);
  const double b2 = -r1 * r1;
  const double a1 = -(1.0 + r1);
  double y0 = 0.0, y1 = 0.0, y2 = 0.0;
  for (double& x : h) {
    y2 = y1;
    y1 = y0;
    y0 = b1 * y1 + b2 * y2 + x;
    x = y0 + a1 * y1 + r1 * y2;
  }
}

}  // namespace

void RoomSpec::validate() const {
  if ((dimensions.array() <= 0.0).any() || !dimensions.allFinite())
    throw Error(ErrorKind::InvalidGeometry, "room dimensions must be positive, got " + fmt_vec(dimensions));
  if (!(t60 >= 0.0) || !std::isfinite(t60))
    throw Error(ErrorKind::InvalidGeometry, "t60 must be >= 0");
  if (!(sample_rate > 0.0)) throw Error(ErrorKind::InvalidGeometry, "sample rate must be > 0");
  if (!(speed_of_sound > 0.0)) throw Error(ErrorKind::InvalidGeometry, "speed of sound must be > 0");
}

bool RoomSpec::contains(const Vec3& p, double margin) const {
  return (p.array() > margin).all() && (p.array() < dimensions.array() - margin).all();
}

double RoomSpec::surface() const {
  const auto& d = dimensions;
  return 2.0 * (d.x() * d.y() + d.x() * d.z() + d.y() * d.z());
}

ArrayNode ArrayNode::make(int id, const Vec3& center, double orientation, double spacing) {
  ArrayNode node;
  node.id = id;
  node.center = center;
  node.orientation = orientation;
  node.mic_offsets = {rotate_z(Vec3(-spacing / 2.0, 0.0, 0.0), orientation),
                      rotate_z(Vec3(spacing / 2.0, 0.0, 0.0), orientation)};
  return node;
}

double reflection_coefficient(const RoomSpec& room) {
  room.validate();
  if (room.t60 == 0.0) return 0.0;
  const double alpha =
      24.0 * std::log(10.0) * room.volume() / (room.speed_of_sound * room.surface() * room.t60);
  if (alpha > 1.0) {
    std::ostringstream os;
    os << "t60 = " << room.t60 << " s needs Sabine absorption " << alpha << " > 1";
    throw Error(ErrorKind::InfeasibleReverberation, os.str());
  }
  return std::sqrt(1.0 - alpha);
}

std::size_t rir_length(const RoomSpec& room, double direct_delay_samples) {
  const double span = std::max(room.t60, 0.05) * room.sample_rate + direct_delay_samples;
  return fft::next_pow2(static_cast<std::size_t>(std::ceil(span)));
}

ImpulseResponse simulate_rir(const RoomSpec& room, const Vec3& source_pos, const Vec3& mic_pos) {
  room.validate();
  if (!room.contains(source_pos))
    throw Error(ErrorKind::InvalidGeometry, "source " + fmt_vec(source_pos) + " outside room");
  if (!room.contains(mic_pos))
    throw Error(ErrorKind::InvalidGeometry, "microphone " + fmt_vec(mic_pos) + " outside room");
  const double beta = reflection_coefficient(room);

  const double samples_per_meter = room.sample_rate / room.speed_of_sound;
  const Vec3 s = source_pos * samples_per_meter;
  const Vec3 r = mic_pos * samples_per_meter;
  const Vec3 len = room.dimensions * samples_per_meter;
  const double direct = (s - r).norm();

  ImpulseResponse out;
  out.sample_rate = room.sample_rate;
  out.taps.assign(rir_length(room, direct), 0.0);

  // Images arriving after the active span are dropped; the rest of the
  // power-of-two buffer only holds the sinc spill-over.
  const double horizon =
      beta == 0.0 ? direct + 0.5 : std::max(room.t60, 0.05) * room.sample_rate + direct;
  const double horizon2 = horizon * horizon;

  std::array<std::vector<AxisImage>, 3> axes;
  for (int a = 0; a < 3; ++a) {
    const int n = beta == 0.0 ? 0 : static_cast<int>(std::ceil(horizon / (2.0 * len[a]))) + 1;
    axes[static_cast<std::size_t>(a)] = axis_images(s[a], r[a], len[a], n);
  }

  std::vector<double> beta_pow(1, 1.0);
  auto power = [&](int n) {
    while (static_cast<int>(beta_pow.size()) <= n) beta_pow.push_back(beta_pow.back() * beta);
    return beta_pow[static_cast<std::size_t>(n)];
  };

  const double meters_per_sample = 1.0 / samples_per_meter;
  for (const auto& ix : axes[0]) {
    const double dx2 = ix.offset * ix.offset;
    if (dx2 > horizon2) continue;
    for (const auto& iy : axes[1]) {
      const double dxy2 = dx2 + iy.offset * iy.offset;
      if (dxy2 > horizon2) continue;
      for (const auto& iz : axes[2]) {
        const double d2 = dxy2 + iz.offset * iz.offset;
        if (d2 > horizon2) continue;
        const int refl = ix.reflections + iy.reflections + iz.reflections;
        if (beta == 0.0 && refl > 0) continue;
        const double dist = std::sqrt(d2);
        const double gain = power(refl) / (4.0 * kPi * dist * meters_per_sample);
        add_fractional_impulse(out.taps, dist, gain);
      }
    }
  }
  if (beta > 0.0) high_pass(out.taps, room.sample_rate);
  return out;
}

std::vector<double> convolve(std::span<const double> a, std::span<const double> b) {
  if (a.empty() || b.empty()) return {};
  const std::size_t out_len = a.size() + b.size() - 1;
  if (std::min(a.size(), b.size()) <= 64) {
    std::vector<double> out(out_len, 0.0);
    for (std::size_t i = 0; i < a.size(); ++i) {
      if (a[i] == 0.0) continue;
      for (std::size_t j = 0; j < b.size(); ++j) out[i + j] += a[i] * b[j];
    }
    return out;
  }
  const std::size_t n = fft::next_pow2(out_len);
  auto fa = fft::rfft(a, n);
  const auto fb = fft::rfft(b, n);
  for (std::size_t k = 0; k < fa.size(); ++k) fa[k] *= fb[k];
  auto out = fft::irfft(fa, n);
  out.resize(out_len);
  return out;
}

MicSignals render_with_rirs(const std::array<ImpulseResponse, 2>& rirs, const SourceEvent& event,
                            std::uint64_t noise_seed) {
  if (!std::isfinite(event.snr_db) && event.snr_db < 0)
    throw Error(ErrorKind::Domain, "snr_db must be finite or +inf");
  MicSignals out;
  for (std::size_t i = 0; i < 2; ++i) {
    out[i] = convolve(rirs[i].taps, event.signal);
    if (std::isinf(event.snr_db)) continue;
    double signal_power = 0.0;
    for (double v : out[i]) signal_power += v * v;
    signal_power /= static_cast<double>(out[i].size());
    if (!(signal_power > 0.0)) throw Error(ErrorKind::Domain, "source signal is silent at the microphone");

    Rng rng(derive_seed(noise_seed, {stream::kNoise, i}));
    std::normal_distribution<double> normal(0.0, 1.0);
    std::vector<double> noise(out[i].size());
    double noise_power = 0.0;
    for (auto& v : noise) {
      v = normal(rng);
      noise_power += v * v;
    }
    noise_power /= static_cast<double>(noise.size());
    // Scale the realized noise (not its nominal variance) so the measured
    // SNR equals the target.
    const double target = signal_power / std::pow(10.0, event.snr_db / 10.0);
    const double scale = std::sqrt(target / noise_power);
    for (std::size_t n = 0; n < noise.size(); ++n) out[i][n] += scale * noise[n];
  }
  return out;
}

MicSignals render_node_signals(const RoomSpec& room, const ArrayNode& node, const SourceEvent& event,
                               std::uint64_t noise_seed) {
  std::array<ImpulseResponse, 2> rirs{simulate_rir(room, event.position, node.mic_position(0)),
                                      simulate_rir(room, event.position, node.mic_position(1))};
  return render_with_rirs(rirs, event, noise_seed);
}

ArrayNode displace_node(const ArrayNode& node, const Vec3& shift, double rotation) {
  ArrayNode out = node;
  out.center = node.center + shift;
  out.orientation = node.orientation + rotation;
  for (auto& off : out.mic_offsets) off = rotate_z(off, rotation);
  return out;
}

Displacement sample_displacement(const RoomSpec& room, const ArrayNode& node, double shift_size,
                                 Rng& rng, bool random_rotation) {
  std::uniform_real_distribution<double> angle(0.0, 2.0 * kPi);
  Displacement d;
  d.rotation = random_rotation ? angle(rng) : 0.0;
  for (int attempt = 0; attempt <= kMaxPlacementAttempts; ++attempt) {
    d.heading = angle(rng);
    d.shift = Vec3(std::cos(d.heading), std::sin(d.heading), 0.0) * shift_size;
    d.resamples = attempt;
    const ArrayNode moved = displace_node(node, d.shift, d.rotation);
    if (room.contains(moved.mic_position(0), kPlacementMargin) &&
        room.contains(moved.mic_position(1), kPlacementMargin))
      return d;
  }
  std::ostringstream os;
  os << "node " << node.id << " cannot be shifted by " << shift_size << " m inside the room after "
     << kMaxPlacementAttempts << " heading resamples";
  throw Error(ErrorKind::Placement, os.str());
}

}  // namespace asn
