#include "asn/features.hpp"

#include <cmath>
#include <complex>
#include <iomanip>
#include <istream>
#include <numbers>
#include <ostream>
#include <sstream>

#include "asn/error.hpp"
#include "asn/fft.hpp"

namespace asn {

BinRange FeatureConfig::band(double sample_rate) const {
  const double n = static_cast<double>(frame_len);
  BinRange r;
  r.k_min = static_cast<std::size_t>(std::ceil(band_low_hz * n / sample_rate));
  r.k_max = static_cast<std::size_t>(std::floor(band_high_hz * n / sample_rate));
  if (r.k_max > frame_len / 2) r.k_max = frame_len / 2;
  if (r.k_min > r.k_max) throw Error(ErrorKind::Config, "empty feature band");
  return r;
}

std::vector<double> hann_window(std::size_t n) {
  std::vector<double> w(n);
  for (std::size_t i = 0; i < n; ++i)
    w[i] = 0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * static_cast<double>(i) / static_cast<double>(n));
  return w;
}

StftGrid stft(std::span<const double> signal, std::size_t frame_len, std::size_t hop) {
  if (frame_len == 0 || hop == 0 || hop > frame_len)
    throw Error(ErrorKind::Config, "STFT needs 0 < hop <= frame_len");
  if (signal.size() < frame_len) {
    std::ostringstream os;
    os << "signal of " << signal.size() << " samples shorter than frame length " << frame_len;
    throw Error(ErrorKind::InsufficientData, os.str());
  }
  const auto window = hann_window(frame_len);
  const std::size_t frames = 1 + (signal.size() - frame_len) / hop;
  StftGrid grid;
  grid.frame_len = frame_len;
  grid.hop = hop;
  grid.frames.resize(static_cast<Eigen::Index>(frames), static_cast<Eigen::Index>(frame_len / 2 + 1));
  std::vector<double> buf(frame_len);
  for (std::size_t t = 0; t < frames; ++t) {
    for (std::size_t n = 0; n < frame_len; ++n) buf[n] = window[n] * signal[t * hop + n];
    const auto spec = fft::rfft(buf, frame_len);
    for (std::size_t k = 0; k < spec.size(); ++k)
      grid.frames(static_cast<Eigen::Index>(t), static_cast<Eigen::Index>(k)) = spec[k];
  }
  return grid;
}

double stft_energy(const StftGrid& grid) {
  const auto bins = grid.frames.cols();
  const bool even = grid.frame_len % 2 == 0;
  double total = 0.0;
  for (Eigen::Index k = 0; k < bins; ++k) {
    const bool edge = k == 0 || (even && k == bins - 1);
    total += (edge ? 1.0 : 2.0) * grid.frames.col(k).squaredNorm();
  }
  return total / static_cast<double>(grid.frame_len);
}

RtfFeature estimate_rtf(const StftGrid& mic_a, const StftGrid& mic_b, BinRange band, int node_id) {
  if (mic_a.frames.rows() != mic_b.frames.rows() || mic_a.frames.cols() != mic_b.frames.cols())
    throw Error(ErrorKind::Dimension, "STFT grids of the two microphones differ in shape");
  if (band.k_min > band.k_max || band.k_max >= mic_a.num_bins())
    throw Error(ErrorKind::Dimension, "feature band outside the STFT bin range");

  const std::size_t nb = band.size();
  Eigen::VectorXd apsd(static_cast<Eigen::Index>(nb));
  Eigen::VectorXcd cpsd(static_cast<Eigen::Index>(nb));
  for (std::size_t i = 0; i < nb; ++i) {
    const auto k = static_cast<Eigen::Index>(band.k_min + i);
    const auto a = mic_a.frames.col(k);
    const auto b = mic_b.frames.col(k);
    apsd(static_cast<Eigen::Index>(i)) = a.squaredNorm();
    cpsd(static_cast<Eigen::Index>(i)) = (b.array() * a.array().conjugate()).sum();
  }
  const double floor = 1e-12 * mic_a.frames.cwiseAbs2().sum() / static_cast<double>(mic_a.frames.cols());
  RtfFeature out;
  out.node_id = node_id;
  out.band = band;
  out.values.resize(static_cast<Eigen::Index>(2 * nb));
  for (std::size_t i = 0; i < nb; ++i) {
    const auto ii = static_cast<Eigen::Index>(i);
    if (!(apsd(ii) > floor)) {
      std::ostringstream os;
      os << "auto-PSD at bin " << band.k_min + i << " below floor; source did not excite the band";
      throw Error(ErrorKind::DegenerateExcitation, os.str());
    }
    const std::complex<double> h = cpsd(ii) / apsd(ii);
    out.values(ii) = h.real();
    out.values(ii + static_cast<Eigen::Index>(nb)) = h.imag();
  }
  return out;
}

RtfFeature node_feature(const MicSignals& mics, const FeatureConfig& config, double sample_rate,
                        int node_id) {
  const auto a = stft(mics[0], config.frame_len, config.hop);
  const auto b = stft(mics[1], config.frame_len, config.hop);
  return estimate_rtf(a, b, config.band(sample_rate), node_id);
}

void write_feature_csv(std::ostream& os, const std::vector<FeatureRow>& rows) {
  const Eigen::Index width = rows.empty() ? 0 : rows.front().values.size();
  os << "node_id,source_id,labelled_flag,x,y,z";
  for (Eigen::Index i = 0; i < width; ++i) os << ",v_" << i + 1;
  os << '\n';
  os << std::setprecision(17);
  for (const auto& r : rows) {
    if (r.values.size() != width) throw Error(ErrorKind::Dimension, "feature rows differ in length");
    os << r.node_id << ',' << r.source_id << ',' << (r.labelled ? 1 : 0);
    for (int a = 0; a < 3; ++a) {
      os << ',';
      if (r.position) os << (*r.position)[a];
    }
    for (Eigen::Index i = 0; i < width; ++i) os << ',' << r.values(i);
    os << '\n';
  }
}

std::vector<FeatureRow> read_feature_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line)) throw Error(ErrorKind::Schema, "feature CSV: missing header");
  if (line.rfind("node_id,source_id,labelled_flag,x,y,z", 0) != 0)
    throw Error(ErrorKind::Schema, "feature CSV: unexpected header");
  std::vector<FeatureRow> rows;
  std::size_t line_no = 1;
  while (std::getline(is, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (!line.empty() && line.back() == ',') cells.emplace_back();
    if (cells.size() < 6)
      throw Error(ErrorKind::Schema, "feature CSV line " + std::to_string(line_no) + ": too few columns");
    try {
      FeatureRow r;
      r.node_id = std::stoi(cells[0]);
      r.source_id = std::stoi(cells[1]);
      r.labelled = cells[2] == "1";
      if (!cells[3].empty()) r.position = Vec3(std::stod(cells[3]), std::stod(cells[4]), std::stod(cells[5]));
      r.values.resize(static_cast<Eigen::Index>(cells.size() - 6));
      for (std::size_t i = 6; i < cells.size(); ++i) r.values(static_cast<Eigen::Index>(i - 6)) = std::stod(cells[i]);
      rows.push_back(std::move(r));
    } catch (const std::logic_error&) {
      throw Error(ErrorKind::Schema, "feature CSV line " + std::to_string(line_no) + ": malformed number");
    }
  }
  return rows;
}

}  // namespace asn
