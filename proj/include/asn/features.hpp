#pragma once

#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "asn/acoustics.hpp"

namespace asn {

struct StftGrid {
  Eigen::MatrixXcd frames;  // (frame, bin)
  std::size_t frame_len = 0;
  std::size_t hop = 0;
  std::string window = "hann";

  std::size_t num_frames() const { return static_cast<std::size_t>(frames.rows()); }
  std::size_t num_bins() const { return static_cast<std::size_t>(frames.cols()); }
};

/// Inclusive bin range.
struct BinRange {
  std::size_t k_min = 0;
  std::size_t k_max = 0;
  std::size_t size() const { return k_max - k_min + 1; }
  bool operator==(const BinRange&) const = default;
};

struct RtfFeature {
  int node_id = 0;
  Eigen::VectorXd values;  // [Re(k_min..k_max); Im(k_min..k_max)]
  BinRange band;
};

struct FeatureConfig {
  std::size_t frame_len = 64;
  std::size_t hop = 32;
  double band_low_hz = 300.0;
  double band_high_hz = 3500.0;

  BinRange band(double sample_rate) const;
};

/// Periodic Hann window (sums to a constant at 50% overlap).
std::vector<double> hann_window(std::size_t n);

StftGrid stft(std::span<const double> signal, std::size_t frame_len, std::size_t hop);

/// Energy of the windowed frames recovered from the one-sided grid.
double stft_energy(const StftGrid& grid);

/// Welch-averaged RTF of mic_b relative to the reference mic_a.
RtfFeature estimate_rtf(const StftGrid& mic_a, const StftGrid& mic_b, BinRange band, int node_id = 0);

RtfFeature node_feature(const MicSignals& mics, const FeatureConfig& config, double sample_rate,
                        int node_id);

/// One row of the feature dump: a node's RTF for one training source.
struct FeatureRow {
  int node_id = 0;
  int source_id = 0;
  bool labelled = false;
  std::optional<Vec3> position;
  Eigen::VectorXd values;
};

void write_feature_csv(std::ostream& os, const std::vector<FeatureRow>& rows);
std::vector<FeatureRow> read_feature_csv(std::istream& is);

}  // namespace asn
