#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace adaptivefog {

enum class Server : std::uint8_t { Fog = 0, Cloud = 1 };

std::string_view to_string(Server server) noexcept;
/// Parses "fog" / "cloud"; returns nullopt for anything else.
std::optional<Server> parse_server(std::string_view text) noexcept;

using NetworkId = std::uint32_t;

/// One timestamped RTT measurement.
struct RttSample {
  std::int64_t timestamp_ms = 0;
  double latitude = 0.0;
  double longitude = 0.0;
  double speed_mps = 0.0;
  NetworkId network_id = 0;
  Server server = Server::Fog;
  double rtt_ms = 0.0;

  friend bool operator==(const RttSample&, const RttSample&) = default;
};

/// True when every field satisfies the RttSample invariants.
bool is_valid(const RttSample& sample) noexcept;

/// A service type with tolerable latency r_i and weight w_i.
struct ServiceClass {
  int id = 0;
  double max_latency_ms = 0.0;
  double weight = 0.0;

  friend bool operator==(const ServiceClass&, const ServiceClass&) = default;
};

/// Nonempty set of services with positive total weight. Weights may be read
/// either as request probabilities or as priorities; nothing forces them to
/// sum to one.
class ServiceSet {
 public:
  ServiceSet() = default;
  /// Throws DomainError when empty, when any r_i <= 0 or w_i < 0, or when
  /// the weights sum to zero.
  explicit ServiceSet(std::vector<ServiceClass> services);

  std::span<const ServiceClass> items() const noexcept { return services_; }
  std::size_t size() const noexcept { return services_.size(); }
  bool empty() const noexcept { return services_.empty(); }
  double total_weight() const noexcept { return total_weight_; }

  auto begin() const noexcept { return services_.begin(); }
  auto end() const noexcept { return services_.end(); }

  /// Thresholds 100/120/150 ms with equal weights 1/3.
  static ServiceSet defaults();

 private:
  std::vector<ServiceClass> services_;
  double total_weight_ = 0.0;
};

/// Square location grid on a local equirectangular projection plus speed bins.
struct GridSpec {
  double origin_lat = 0.0;
  double origin_lon = 0.0;
  double cell_size_m = 100.0;
  std::vector<double> speed_bin_edges{0.0, 2.5, 7.5, 12.5, 17.5};
  /// Samples farther than this (degrees, per axis) from the origin are rejected.
  double max_offset_deg = 0.5;

  /// Throws ConfigError when the invariants do not hold.
  void validate() const;

  friend bool operator==(const GridSpec&, const GridSpec&) = default;
};

struct Cell {
  std::int32_t x = 0;
  std::int32_t y = 0;

  friend auto operator<=>(const Cell&, const Cell&) = default;
};

/// Location and speed interval; the part of the state driven by the vehicle.
struct MobilityKey {
  Cell cell;
  std::int32_t speed_bin = 0;

  friend auto operator<=>(const MobilityKey&, const MobilityKey&) = default;
};

/// Full MDP state <speed, location, network>.
struct DiscreteState {
  Cell cell;
  std::int32_t speed_bin = 0;
  NetworkId network = 0;

  MobilityKey mobility() const noexcept { return {cell, speed_bin}; }

  friend auto operator<=>(const DiscreteState&, const DiscreteState&) = default;
};

/// Local metric offsets (east, north) of a point from the grid origin.
struct LocalOffset {
  double east_m = 0.0;
  double north_m = 0.0;
};

inline constexpr double kEarthRadiusM = 6371000.0;

LocalOffset project(const GridSpec& grid, double latitude, double longitude) noexcept;
/// Inverse of project(); returns {latitude, longitude}.
std::pair<double, double> unproject(const GridSpec& grid, LocalOffset offset) noexcept;

/// Index of the half-open bin [edge_k, edge_{k+1}) holding `speed`; speeds at
/// or above the last edge land in the last bin.
std::int32_t speed_bin_of(const GridSpec& grid, double speed_mps);

/// Maps a sample to its discrete state. Throws OutOfRangeError when the sample
/// is farther than grid.max_offset_deg from the origin.
DiscreteState discretize(const RttSample& sample, const GridSpec& grid);

inline constexpr std::string_view kTraceHeader =
    "timestamp_ms,lat,lon,speed_mps,network_id,server,rtt_ms";

struct ParseResult {
  std::vector<RttSample> samples;
  std::size_t skipped_rows = 0;
};

/// Reads a trace CSV. Malformed rows are skipped and counted; a wrong header
/// throws FormatError and a failing stream throws IoError.
ParseResult parse_trace(std::istream& in);
ParseResult read_trace_file(const std::filesystem::path& path);

/// Writes the header and one row per sample using shortest round-trip
/// decimal formatting, so parse_trace(serialize_trace(xs)) == xs.
void serialize_trace(std::ostream& out, std::span<const RttSample> samples);
void write_trace_file(const std::filesystem::path& path, std::span<const RttSample> samples);

/// Consecutive runs of samples (sorted by timestamp) separated by gaps
/// larger than `max_gap_ms`.
struct Session {
  std::size_t begin = 0;
  std::size_t end = 0;  // one past last
};

/// Sorts by timestamp (stable) in place and returns the session boundaries.
std::vector<Session> split_sessions(std::vector<RttSample>& samples, std::int64_t max_gap_ms);

/// Keeps samples whose UTC hour-of-day is in [start_hour, end_hour); wraps
/// around midnight when start_hour > end_hour.
std::vector<RttSample> filter_time_of_day(std::span<const RttSample> samples, int start_hour,
                                          int end_hour);

}  // namespace adaptivefog
