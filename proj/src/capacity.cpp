#include "sidealloc/capacity.hpp"

#include <charconv>
#include <cmath>
#include <stdexcept>
#include <string_view>

#include <fmt/core.h>

#include "sidealloc/rng.hpp"
#include "text_io.hpp"

namespace sidealloc {

CostTensor::CostTensor(std::size_t vehicles, std::size_t subframes, std::size_t subchannels,
                       double bandwidth_mhz)
    : vehicles_(vehicles), subframes_(subframes), subchannels_(subchannels),
      bandwidth_mhz_(bandwidth_mhz), values_(vehicles * subframes * subchannels, 0.0) {}

CostTensor::CostTensor(std::size_t vehicles, std::size_t subframes, std::size_t subchannels,
                       std::vector<double> values, double bandwidth_mhz)
    : vehicles_(vehicles), subframes_(subframes), subchannels_(subchannels),
      bandwidth_mhz_(bandwidth_mhz), values_(std::move(values)) {
  if (values_.size() != vehicles * subframes * subchannels) {
    throw std::invalid_argument(fmt::format("cost tensor {}x{}x{} given {} values", vehicles,
                                            subframes, subchannels, values_.size()));
  }
  for (std::size_t p = 0; p < values_.size(); ++p) {
    if (!std::isfinite(values_[p]) || values_[p] < 0.0) {
      throw std::invalid_argument(fmt::format("cost entry {} = {} is not a finite rate >= 0", p,
                                              values_[p]));
    }
  }
}

double CostTensor::at(VehicleId i, Grant g) const {
  if (i >= vehicles_ || g.subframe >= subframes_ || g.subchannel >= subchannels_) {
    throw std::domain_error(fmt::format("cell ({}, {}, {}) outside {}x{}x{} tensor", i,
                                        g.subframe, g.subchannel, vehicles_, subframes_,
                                        subchannels_));
  }
  return (*this)(i, g.subframe, g.subchannel);
}

bool CostTensor::matches(const Scenario& s) const {
  return vehicles_ == s.vehicle_count() && subframes_ == s.grid().subframes &&
         subchannels_ == s.grid().subchannels;
}

CostTensor CostTensor::rows(std::span<const VehicleId> vehicles) const {
  CostTensor out(vehicles.size(), subframes_, subchannels_, bandwidth_mhz_);
  const std::size_t row = subframes_ * subchannels_;
  for (std::size_t r = 0; r < vehicles.size(); ++r) {
    if (vehicles[r] >= vehicles_) {
      throw std::domain_error(fmt::format("vehicle {} outside tensor of {}", vehicles[r], vehicles_));
    }
    std::copy_n(values_.begin() + static_cast<std::ptrdiff_t>(vehicles[r] * row), row,
                out.values_.begin() + static_cast<std::ptrdiff_t>(r * row));
  }
  return out;
}

void validate_channel_config(const ChannelConfig& cfg) {
  if (!(cfg.bandwidth_mhz > 0.0)) throw std::invalid_argument("channel bandwidth must be > 0");
  if (!(cfg.sinr_db_stddev >= 0.0)) throw std::invalid_argument("SINR stddev must be >= 0");
  if (!(cfg.frequency_correlation >= 0.0 && cfg.frequency_correlation <= 1.0)) {
    throw std::invalid_argument("frequency correlation must lie in [0, 1]");
  }
  if (!std::isfinite(cfg.sinr_db_mean)) throw std::invalid_argument("SINR mean must be finite");
}

double capacity_from_sinr(double sinr, double bandwidth_mhz) {
  if (!(sinr >= 0.0)) throw std::domain_error(fmt::format("negative SINR {}", sinr));
  if (!(bandwidth_mhz > 0.0)) throw std::domain_error("bandwidth must be positive");
  return bandwidth_mhz * std::log2(1.0 + sinr);
}

double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }

CostTensor sample_cost_tensor(const Scenario& s, const ChannelConfig& cfg) {
  validate_channel_config(cfg);
  const std::size_t n = s.vehicle_count();
  const std::size_t subframes = s.grid().subframes;
  const std::size_t subchannels = s.grid().subchannels;
  CostTensor c(n, subframes, subchannels, cfg.bandwidth_mhz);

  Engine rng(cfg.seed);
  const double shared = std::sqrt(cfg.frequency_correlation);
  const double own = std::sqrt(1.0 - cfg.frequency_correlation);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t l = 0; l < subframes; ++l) {
      // Draw order is fixed: one common draw, then K independent ones.
      const double common = standard_normal(rng);
      for (std::size_t k = 0; k < subchannels; ++k) {
        const double z = standard_normal(rng);
        const double mixed = cfg.frequency_correlation == 1.0 ? common
                                                              : shared * common + own * z;
        const double sinr_db = cfg.sinr_db_mean + cfg.sinr_db_stddev * mixed;
        c(i, l, k) = capacity_from_sinr(db_to_linear(sinr_db), cfg.bandwidth_mhz);
      }
    }
  }
  return c;
}

std::string cost_tensor_to_text(const CostTensor& c) {
  std::string out = fmt::format("{} {} {}\n", c.vehicles(), c.subframes(), c.subchannels());
  for (std::size_t i = 0; i < c.vehicles(); ++i) {
    for (std::size_t l = 0; l < c.subframes(); ++l) {
      const auto row = c.cell_row(i, l);
      for (std::size_t k = 0; k < row.size(); ++k) {
        // "{}" is the shortest representation that round-trips.
        if (k > 0) out += ' ';
        out += fmt::format("{}", row[k]);
      }
      out += '\n';
    }
  }
  return out;
}

namespace {

struct LineCursor {
  std::string_view text;
  std::size_t pos = 0;
  std::size_t line_no = 0;

  // Next non-blank, non-comment line; false at end of input.
  bool next(std::string_view& line) {
    while (pos < text.size()) {
      const std::size_t end = std::min(text.find('\n', pos), text.size());
      line = text.substr(pos, end - pos);
      pos = end + 1;
      ++line_no;
      if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
      const auto first = line.find_first_not_of(" \t");
      if (first == std::string_view::npos || line[first] == '#') continue;
      return true;
    }
    return false;
  }
};

template <typename T>
std::vector<T> parse_fields(std::string_view line, std::size_t line_no) {
  std::vector<T> out;
  std::size_t p = 0;
  std::size_t column = 0;
  while (true) {
    p = line.find_first_not_of(" \t", p);
    if (p == std::string_view::npos) break;
    const std::size_t end = std::min(line.find_first_of(" \t", p), line.size());
    ++column;
    T value{};
    const auto* first = line.data() + p;
    const auto* last = line.data() + end;
    const auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec != std::errc{} || ptr != last) {
      throw LoadError(fmt::format("line {}, column {}: cannot parse '{}'", line_no, column,
                                  std::string_view(first, static_cast<std::size_t>(last - first))),
                      line_no, column);
    }
    out.push_back(value);
    p = end;
  }
  return out;
}

}  // namespace

CostTensor cost_tensor_from_text(const std::string& text, double bandwidth_mhz) {
  LineCursor cursor{text};
  std::string_view line;
  if (!cursor.next(line)) throw LoadError("empty cost tensor file", 0, 0);
  const auto header = parse_fields<std::size_t>(line, cursor.line_no);
  if (header.size() != 3) {
    throw LoadError(fmt::format("line {}: header must be 'N L K', got {} fields",
                                cursor.line_no, header.size()),
                    cursor.line_no, 0);
  }
  const std::size_t n = header[0], subframes = header[1], subchannels = header[2];
  if (n == 0 || subframes == 0 || subchannels == 0) {
    throw LoadError(fmt::format("line {}: zero dimension in header", cursor.line_no),
                    cursor.line_no, 0);
  }

  std::vector<double> values;
  values.reserve(n * subframes * subchannels);
  for (std::size_t row = 0; row < n * subframes; ++row) {
    if (!cursor.next(line)) {
      throw LoadError(fmt::format("expected {} rows, file ends after {}", n * subframes, row),
                      cursor.line_no, 0);
    }
    const auto fields = parse_fields<double>(line, cursor.line_no);
    if (fields.size() != subchannels) {
      throw LoadError(fmt::format("line {} (vehicle {}, subframe {}): expected {} values, got {}",
                                  cursor.line_no, row / subframes, row % subframes, subchannels,
                                  fields.size()),
                      cursor.line_no, 0);
    }
    for (std::size_t k = 0; k < fields.size(); ++k) {
      if (!std::isfinite(fields[k]) || fields[k] < 0.0) {
        throw LoadError(fmt::format("line {}, column {} (vehicle {}, subframe {}, subchannel {}): "
                                    "rate {} must be finite and >= 0",
                                    cursor.line_no, k + 1, row / subframes, row % subframes, k,
                                    fields[k]),
                        cursor.line_no, k + 1);
      }
      values.push_back(fields[k]);
    }
  }
  if (cursor.next(line)) {
    throw LoadError(fmt::format("line {}: trailing data after {} rows", cursor.line_no,
                                n * subframes),
                    cursor.line_no, 0);
  }
  return CostTensor(n, subframes, subchannels, std::move(values), bandwidth_mhz);
}

void save_cost_tensor(const std::string& path, const CostTensor& c) {
  detail::write_file(path, cost_tensor_to_text(c));
}

CostTensor load_cost_tensor(const std::string& path, double bandwidth_mhz) {
  return cost_tensor_from_text(detail::read_file(path), bandwidth_mhz);
}

CostTensor load_cost_tensor(const std::string& path, const Scenario& s) {
  auto c = load_cost_tensor(path, s.grid().subchannel_bandwidth_mhz);
  if (!c.matches(s)) {
    throw LoadError(fmt::format("{}: tensor shape {}x{}x{} does not match scenario {}x{}x{}", path,
                                c.vehicles(), c.subframes(), c.subchannels(), s.vehicle_count(),
                                s.grid().subframes, s.grid().subchannels),
                    1, 0);
  }
  return c;
}

}  // namespace sidealloc
