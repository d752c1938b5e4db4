#include "adaptivefog/trace_model.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <numbers>
#include <ostream>

#include "adaptivefog/errors.hpp"

namespace adaptivefog {

std::string_view to_string(Server server) noexcept {
  return server == Server::Fog ? "fog" : "cloud";
}

std::optional<Server> parse_server(std::string_view text) noexcept {
  if (text == "fog") return Server::Fog;
  if (text == "cloud") return Server::Cloud;
  return std::nullopt;
}

bool is_valid(const RttSample& s) noexcept {
  return std::isfinite(s.rtt_ms) && s.rtt_ms > 0.0 && std::isfinite(s.speed_mps) &&
         s.speed_mps >= 0.0 && s.latitude >= -90.0 && s.latitude <= 90.0 &&
         s.longitude >= -180.0 && s.longitude <= 180.0;
}

ServiceSet::ServiceSet(std::vector<ServiceClass> services) : services_(std::move(services)) {
  if (services_.empty()) throw DomainError("service set is empty");
  for (const auto& s : services_) {
    if (!(s.max_latency_ms > 0.0) || !std::isfinite(s.max_latency_ms)) {
      throw DomainError("service " + std::to_string(s.id) + ": max latency must be > 0");
    }
    if (!(s.weight >= 0.0) || !std::isfinite(s.weight)) {
      throw DomainError("service " + std::to_string(s.id) + ": weight must be >= 0");
    }
    total_weight_ += s.weight;
  }
  if (!(total_weight_ > 0.0)) throw DomainError("service weights sum to zero");
}

ServiceSet ServiceSet::defaults() {
  return ServiceSet({{0, 100.0, 1.0 / 3.0}, {1, 120.0, 1.0 / 3.0}, {2, 150.0, 1.0 / 3.0}});
}

void GridSpec::validate() const {
  if (!(cell_size_m > 0.0)) throw ConfigError("grid: cell_size_m must be > 0");
  if (speed_bin_edges.empty() || speed_bin_edges.front() != 0.0) {
    throw ConfigError("grid: speed_bin_edges must start at 0");
  }
  for (std::size_t i = 1; i < speed_bin_edges.size(); ++i) {
    if (!(speed_bin_edges[i] > speed_bin_edges[i - 1])) {
      throw ConfigError("grid: speed_bin_edges must be strictly increasing");
    }
  }
  if (!(max_offset_deg > 0.0)) throw ConfigError("grid: max_offset_deg must be > 0");
  if (origin_lat < -90.0 || origin_lat > 90.0 || origin_lon < -180.0 || origin_lon > 180.0) {
    throw ConfigError("grid: origin outside WGS84 range");
  }
}

namespace {

constexpr double kDegToRad = std::numbers::pi / 180.0;

double metres_per_degree_lat() noexcept { return kEarthRadiusM * kDegToRad; }

double metres_per_degree_lon(const GridSpec& grid) noexcept {
  return kEarthRadiusM * kDegToRad * std::cos(grid.origin_lat * kDegToRad);
}

}  // namespace

LocalOffset project(const GridSpec& grid, double latitude, double longitude) noexcept {
  return {(longitude - grid.origin_lon) * metres_per_degree_lon(grid),
          (latitude - grid.origin_lat) * metres_per_degree_lat()};
}

std::pair<double, double> unproject(const GridSpec& grid, LocalOffset offset) noexcept {
  return {grid.origin_lat + offset.north_m / metres_per_degree_lat(),
          grid.origin_lon + offset.east_m / metres_per_degree_lon(grid)};
}

std::int32_t speed_bin_of(const GridSpec& grid, double speed_mps) {
  const auto& edges = grid.speed_bin_edges;
  // upper_bound gives the first edge strictly greater than speed, so a speed
  // equal to edge k falls in bin k.
  auto it = std::upper_bound(edges.begin(), edges.end(), speed_mps);
  auto bin = static_cast<std::int32_t>(it - edges.begin()) - 1;
  return std::max<std::int32_t>(bin, 0);
}

DiscreteState discretize(const RttSample& sample, const GridSpec& grid) {
  if (std::abs(sample.latitude - grid.origin_lat) > grid.max_offset_deg ||
      std::abs(sample.longitude - grid.origin_lon) > grid.max_offset_deg) {
    throw OutOfRangeError("sample at (" + std::to_string(sample.latitude) + ", " +
                          std::to_string(sample.longitude) + ") is outside the grid bound");
  }
  const LocalOffset off = project(grid, sample.latitude, sample.longitude);
  DiscreteState state;
  state.cell.x = static_cast<std::int32_t>(std::floor(off.east_m / grid.cell_size_m));
  state.cell.y = static_cast<std::int32_t>(std::floor(off.north_m / grid.cell_size_m));
  state.speed_bin = speed_bin_of(grid, sample.speed_mps);
  state.network = sample.network_id;
  return state;
}

namespace {

template <typename T>
bool parse_number(std::string_view field, T& out) {
  if (field.empty()) return false;
  const char* first = field.data();
  const char* last = first + field.size();
  if (*first == '+') return false;
  auto [ptr, ec] = std::from_chars(first, last, out);
  return ec == std::errc{} && ptr == last;
}

std::optional<RttSample> parse_row(std::string_view line) {
  std::string_view fields[7];
  std::size_t n = 0;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    if (n == 7) return std::nullopt;
    fields[n++] = line.substr(start, comma == std::string_view::npos ? line.npos : comma - start);
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  if (n != 7) return std::nullopt;

  RttSample s;
  if (!parse_number(fields[0], s.timestamp_ms)) return std::nullopt;
  if (!parse_number(fields[1], s.latitude)) return std::nullopt;
  if (!parse_number(fields[2], s.longitude)) return std::nullopt;
  if (!parse_number(fields[3], s.speed_mps)) return std::nullopt;
  if (!parse_number(fields[4], s.network_id)) return std::nullopt;
  auto server = parse_server(fields[5]);
  if (!server) return std::nullopt;
  s.server = *server;
  if (!parse_number(fields[6], s.rtt_ms)) return std::nullopt;
  if (!is_valid(s)) return std::nullopt;
  return s;
}

std::string_view strip_cr(std::string_view line) {
  if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
  return line;
}

template <typename T>
void append_number(std::string& out, T value) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, value);
  out.append(buf, ptr);
}

}  // namespace

ParseResult parse_trace(std::istream& in) {
  if (!in) throw IoError("trace stream is not readable");
  ParseResult result;
  std::string line;
  if (!std::getline(in, line)) {
    if (in.bad()) throw IoError("failed reading trace header");
    throw FormatError("trace is empty; expected header '" + std::string(kTraceHeader) + "'");
  }
  std::string_view header = strip_cr(line);
  if (header.starts_with("\xEF\xBB\xBF")) header.remove_prefix(3);
  if (header != kTraceHeader) {
    throw FormatError("unexpected trace header '" + std::string(header) + "'");
  }
  while (std::getline(in, line)) {
    const std::string_view row = strip_cr(line);
    if (row.empty()) continue;
    if (auto sample = parse_row(row)) {
      result.samples.push_back(*sample);
    } else {
      ++result.skipped_rows;
    }
  }
  if (in.bad()) throw IoError("failed reading trace rows");
  return result;
}

ParseResult read_trace_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open trace file " + path.string());
  return parse_trace(in);
}

void serialize_trace(std::ostream& out, std::span<const RttSample> samples) {
  std::string buf;
  buf.reserve(96);
  out << kTraceHeader << '\n';
  for (const auto& s : samples) {
    buf.clear();
    append_number(buf, s.timestamp_ms);
    buf += ',';
    append_number(buf, s.latitude);
    buf += ',';
    append_number(buf, s.longitude);
    buf += ',';
    append_number(buf, s.speed_mps);
    buf += ',';
    append_number(buf, s.network_id);
    buf += ',';
    buf += to_string(s.server);
    buf += ',';
    append_number(buf, s.rtt_ms);
    buf += '\n';
    out << buf;
  }
  if (!out) throw IoError("failed writing trace");
}

void write_trace_file(const std::filesystem::path& path, std::span<const RttSample> samples) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  serialize_trace(out, samples);
}

std::vector<Session> split_sessions(std::vector<RttSample>& samples, std::int64_t max_gap_ms) {
  std::stable_sort(samples.begin(), samples.end(), [](const auto& a, const auto& b) {
    return a.timestamp_ms < b.timestamp_ms;
  });
  std::vector<Session> sessions;
  if (samples.empty()) return sessions;
  Session current{0, 1};
  for (std::size_t i = 1; i < samples.size(); ++i) {
    if (samples[i].timestamp_ms - samples[i - 1].timestamp_ms > max_gap_ms) {
      sessions.push_back(current);
      current.begin = i;
    }
    current.end = i + 1;
  }
  sessions.push_back(current);
  return sessions;
}

std::vector<RttSample> filter_time_of_day(std::span<const RttSample> samples, int start_hour,
                                          int end_hour) {
  if (start_hour < 0 || start_hour > 23 || end_hour < 0 || end_hour > 24) {
    throw ConfigError("time-of-day filter hours out of range");
  }
  constexpr std::int64_t kDayMs = 24LL * 3600 * 1000;
  std::vector<RttSample> kept;
  for (const auto& s : samples) {
    std::int64_t ms_of_day = s.timestamp_ms % kDayMs;
    if (ms_of_day < 0) ms_of_day += kDayMs;
    const int hour = static_cast<int>(ms_of_day / (3600 * 1000));
    const bool inside = start_hour <= end_hour ? (hour >= start_hour && hour < end_hour)
                                               : (hour >= start_hour || hour < end_hour);
    if (inside) kept.push_back(s);
  }
  return kept;
}

}  // namespace adaptivefog
