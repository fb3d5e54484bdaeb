// Edge weights of the vehicle/subchannel bipartite graph: the achievable
// rate of every vehicle in every (subframe, subchannel) cell, in Mbit/s.

#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "sidealloc/grid.hpp"

namespace sidealloc {

/// Dense N×L×K tensor of nonnegative rates, row-major in (vehicle, subframe,
/// subchannel).
class CostTensor {
 public:
  CostTensor() = default;
  CostTensor(std::size_t vehicles, std::size_t subframes, std::size_t subchannels,
             double bandwidth_mhz = 1.26);
  /// Throws std::invalid_argument on a size mismatch or a negative/non-finite entry.
  CostTensor(std::size_t vehicles, std::size_t subframes, std::size_t subchannels,
             std::vector<double> values, double bandwidth_mhz = 1.26);

  std::size_t vehicles() const { return vehicles_; }
  std::size_t subframes() const { return subframes_; }
  std::size_t subchannels() const { return subchannels_; }
  double bandwidth_mhz() const { return bandwidth_mhz_; }

  double operator()(std::size_t i, std::size_t l, std::size_t k) const {
    return values_[(i * subframes_ + l) * subchannels_ + k];
  }
  double& operator()(std::size_t i, std::size_t l, std::size_t k) {
    return values_[(i * subframes_ + l) * subchannels_ + k];
  }
  double at(VehicleId i, Grant g) const;

  /// The K rates of vehicle i in subframe l.
  std::span<const double> cell_row(std::size_t i, std::size_t l) const {
    return {values_.data() + (i * subframes_ + l) * subchannels_, subchannels_};
  }
  std::span<const double> values() const { return values_; }

  bool matches(const Scenario& s) const;

  /// Sub-tensor holding the listed vehicles' rows, in list order.
  CostTensor rows(std::span<const VehicleId> vehicles) const;

  friend bool operator==(const CostTensor&, const CostTensor&) = default;

 private:
  std::size_t vehicles_ = 0;
  std::size_t subframes_ = 0;
  std::size_t subchannels_ = 0;
  double bandwidth_mhz_ = 1.26;
  std::vector<double> values_;
};

/// Synthetic channel: SINR in dB is normal per (vehicle, subframe,
/// subchannel), i.e. log-normal in linear scale. Within one (vehicle,
/// subframe) the K draws share a common component weighted by
/// frequency_correlation (1 makes all K equal).
struct ChannelConfig {
  double bandwidth_mhz = 1.26;
  double sinr_db_mean = 18.0;
  double sinr_db_stddev = 8.0;
  double frequency_correlation = 0.0;
  std::uint64_t seed = 1;
};

void validate_channel_config(const ChannelConfig& cfg);

/// Shannon rate B·log2(1 + sinr), B in MHz giving Mbit/s. Throws
/// std::domain_error for negative sinr or non-positive bandwidth.
double capacity_from_sinr(double sinr, double bandwidth_mhz);

double db_to_linear(double db);

/// Deterministic in (scenario shape, cfg); the same seed yields a
/// bit-identical tensor on every platform.
CostTensor sample_cost_tensor(const Scenario& s, const ChannelConfig& cfg);

/// Parse/shape failure while reading a cost tensor. line and column are
/// 1-based positions in the file; 0 when not applicable.
class LoadError : public std::runtime_error {
 public:
  LoadError(const std::string& what, std::size_t line, std::size_t column)
      : std::runtime_error(what), line_(line), column_(column) {}
  std::size_t line() const { return line_; }
  std::size_t column() const { return column_; }

 private:
  std::size_t line_;
  std::size_t column_;
};

// Cost tensor text format:
//   line 1: "N L K"
//   then N·L rows, row (i·L + l) holding the K rates of vehicle i in
//   subframe l, whitespace separated. Lines starting with '#' are comments.
// Values are written in shortest round-trip form, so a load after save
// reproduces the doubles exactly.
std::string cost_tensor_to_text(const CostTensor& c);
CostTensor cost_tensor_from_text(const std::string& text, double bandwidth_mhz = 1.26);
void save_cost_tensor(const std::string& path, const CostTensor& c);
CostTensor load_cost_tensor(const std::string& path, double bandwidth_mhz = 1.26);
/// Loads and checks the N L K header against the scenario.
CostTensor load_cost_tensor(const std::string& path, const Scenario& s);

}  // namespace sidealloc
