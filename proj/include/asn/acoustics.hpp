#pragma once

#include <array>
#include <cstdint>
#include <limits>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "asn/random.hpp"

namespace asn {

using Vec3 = Eigen::Vector3d;

struct RoomSpec {
  Vec3 dimensions{6.0, 6.0, 3.0};
  double t60 = 0.2;
  double speed_of_sound = 343.0;
  double sample_rate = 16000.0;

  void validate() const;
  bool contains(const Vec3& p, double margin = 0.0) const;
  double volume() const { return dimensions.prod(); }
  double surface() const;
};

/// Two-microphone node. Offsets are relative to the center and already
/// include the node orientation.
struct ArrayNode {
  int id = 1;
  Vec3 center = Vec3::Zero();
  double orientation = 0.0;
  std::array<Vec3, 2> mic_offsets{Vec3(-0.025, 0.0, 0.0), Vec3(0.025, 0.0, 0.0)};

  Vec3 mic_position(int i) const { return center + mic_offsets[static_cast<std::size_t>(i)]; }

  /// Node with a mic pair of the given spacing, rotated by `orientation`
  /// about the vertical axis.
  static ArrayNode make(int id, const Vec3& center, double orientation, double spacing = 0.05);
};

struct ImpulseResponse {
  std::vector<double> taps;
  double sample_rate = 16000.0;
};

struct SourceEvent {
  Vec3 position = Vec3::Zero();
  std::vector<double> signal;
  /// +infinity disables the additive noise.
  double snr_db = 20.0;
};

/// Wall reflection coefficient for a target reverberation time (Sabine).
/// Throws InfeasibleReverberation when the required absorption exceeds 1.
double reflection_coefficient(const RoomSpec& room);

/// Shoebox image-source impulse response from `source_pos` to `mic_pos`.
ImpulseResponse simulate_rir(const RoomSpec& room, const Vec3& source_pos, const Vec3& mic_pos);

/// Tap count used by simulate_rir for a given direct-path delay (samples).
std::size_t rir_length(const RoomSpec& room, double direct_delay_samples);

/// Full linear convolution (length a.size() + b.size() - 1).
std::vector<double> convolve(std::span<const double> a, std::span<const double> b);

using MicSignals = std::array<std::vector<double>, 2>;

/// Convolves the event signal with both microphone RIRs and adds white
/// Gaussian noise at the requested per-microphone SNR.
MicSignals render_node_signals(const RoomSpec& room, const ArrayNode& node, const SourceEvent& event,
                               std::uint64_t noise_seed);

/// Same as render_node_signals with caller-supplied RIRs (one per mic).
MicSignals render_with_rirs(const std::array<ImpulseResponse, 2>& rirs, const SourceEvent& event,
                            std::uint64_t noise_seed);

/// Translate by `shift`, rotate the mic pair by `rotation` about the
/// vertical axis through the new center.
ArrayNode displace_node(const ArrayNode& node, const Vec3& shift, double rotation);

struct Displacement {
  Vec3 shift = Vec3::Zero();
  double heading = 0.0;
  double rotation = 0.0;
  int resamples = 0;
};

inline constexpr int kMaxPlacementAttempts = 32;
inline constexpr double kPlacementMargin = 0.1;

/// Samples a planar displacement of `shift_size` meters at a uniform heading
/// plus (optionally) a uniform rotation. Headings are redrawn up to
/// kMaxPlacementAttempts times until every mic stays kPlacementMargin inside
/// the room; otherwise throws Placement.
Displacement sample_displacement(const RoomSpec& room, const ArrayNode& node, double shift_size,
                                 Rng& rng, bool random_rotation = true);

}  // namespace asn
