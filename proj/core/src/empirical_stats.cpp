#include "adaptivefog/empirical_stats.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "adaptivefog/errors.hpp"

namespace adaptivefog {

EmpiricalCdf::EmpiricalCdf(std::vector<double> values) {
  if (values.empty()) throw DomainError("empirical CDF needs at least one sample");
  for (double v : values) {
    if (!std::isfinite(v)) throw DomainError("empirical CDF sample is not finite");
  }
  std::sort(values.begin(), values.end());
  values_ = std::make_shared<const std::vector<double>>(std::move(values));
}

std::size_t EmpiricalCdf::count_at_most(double t) const noexcept {
  if (!values_) return 0;
  return static_cast<std::size_t>(std::upper_bound(values_->begin(), values_->end(), t) -
                                  values_->begin());
}

double EmpiricalCdf::evaluate(double t) const noexcept {
  if (!values_) return 0.0;
  return static_cast<double>(count_at_most(t)) / static_cast<double>(values_->size());
}

double EmpiricalCdf::quantile(double p) const noexcept {
  const auto& v = *values_;
  if (p <= 0.0) return v.front();
  if (p >= 1.0) return v.back();
  auto rank = static_cast<std::size_t>(std::ceil(p * static_cast<double>(v.size())));
  rank = std::clamp<std::size_t>(rank, 1, v.size());
  return v[rank - 1];
}

std::span<const double> EmpiricalCdf::values() const noexcept {
  if (!values_) return {};
  return *values_;
}

bool operator==(const EmpiricalCdf& a, const EmpiricalCdf& b) noexcept {
  if (a.values_ == b.values_) return true;
  if (!a.values_ || !b.values_) return false;
  return *a.values_ == *b.values_;
}

double confidence(const EmpiricalCdf& cdf, double max_latency_ms) {
  if (!(max_latency_ms > 0.0)) throw DomainError("tolerable latency must be > 0");
  if (cdf.empty()) throw DomainError("confidence of an empty CDF");
  return cdf.evaluate(max_latency_ms);
}

double weighted_confidence(std::span<const EmpiricalCdf> per_service, const ServiceSet& services) {
  if (services.empty()) throw DomainError("weighted confidence over an empty service set");
  if (per_service.size() != services.size()) {
    throw DomainError("weighted confidence: one CDF per service required");
  }
  double total = 0.0;
  std::size_t i = 0;
  for (const auto& s : services) {
    total += s.weight * confidence(per_service[i++], s.max_latency_ms);
  }
  return total;
}

double weighted_confidence(const EmpiricalCdf& cdf, const ServiceSet& services) {
  if (services.empty()) throw DomainError("weighted confidence over an empty service set");
  double total = 0.0;
  for (const auto& s : services) total += s.weight * confidence(cdf, s.max_latency_ms);
  return total;
}

double kr_distance(const EmpiricalCdf& f, const EmpiricalCdf& g, const ServiceSet& services) {
  if (services.empty()) throw DomainError("K-R distance over an empty service set");
  double total = 0.0;
  for (const auto& s : services) {
    total += s.weight * (confidence(f, s.max_latency_ms) - confidence(g, s.max_latency_ms));
  }
  return total;
}

double switching_penalty(const EmpiricalCdf& target, const ServiceSet& services,
                         const SwitchCost& cost) {
  if (!(cost.value >= 0.0)) throw DomainError("switching cost must be >= 0");
  if (cost.mode == SwitchCost::Mode::Scalar) return cost.value;
  if (services.empty()) throw DomainError("switching penalty over an empty service set");
  if (cost.value == 0.0) return 0.0;
  // A switch inflates the target's latency by c, so its CDF at r reads as the
  // unshifted CDF at r - c.
  double total = 0.0;
  for (const auto& s : services) {
    total += s.weight * (target.evaluate(s.max_latency_ms) -
                         target.evaluate(s.max_latency_ms - cost.value));
  }
  return total;
}

double interpolated_quantile(std::span<const double> sorted, double p) {
  if (sorted.empty()) throw DomainError("quantile of an empty sample");
  const double pos = std::clamp(p, 0.0, 1.0) * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const auto hi = std::min(lo + 1, sorted.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
}

LatencyStats summarize(std::span<const double> values) {
  if (values.empty()) throw DomainError("summary of an empty sample");
  std::vector<double> sorted(values.begin(), values.end());
  std::sort(sorted.begin(), sorted.end());
  LatencyStats out;
  out.count = sorted.size();
  const double n = static_cast<double>(sorted.size());
  out.mean = std::accumulate(sorted.begin(), sorted.end(), 0.0) / n;
  double ss = 0.0;
  for (double v : sorted) ss += (v - out.mean) * (v - out.mean);
  out.stddev = sorted.size() > 1 ? std::sqrt(ss / (n - 1.0)) : 0.0;
  out.median = interpolated_quantile(sorted, 0.5);
  out.p90 = interpolated_quantile(sorted, 0.9);
  return out;
}

}  // namespace adaptivefog
