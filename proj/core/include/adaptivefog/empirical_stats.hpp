#pragma once

#include <cstddef>
#include <memory>
#include <span>
#include <vector>

#include "adaptivefog/trace_model.hpp"

namespace adaptivefog {

/// Right-continuous step CDF over a nonempty sample of latencies (ms).
///
/// The sorted sample is held behind a shared immutable buffer, so copies are
/// cheap and instances can be shared freely across threads.
class EmpiricalCdf {
 public:
  /// Placeholder with no samples; only assignment and sample_count() are
  /// meaningful on it.
  EmpiricalCdf() = default;
  /// Sorts `values`. Throws DomainError when empty or when a value is not finite.
  explicit EmpiricalCdf(std::vector<double> values);

  /// Fraction of samples <= t.
  double evaluate(double t) const noexcept;
  double operator()(double t) const noexcept { return evaluate(t); }
  /// Number of samples <= t.
  std::size_t count_at_most(double t) const noexcept;

  /// Smallest sample x with evaluate(x) >= p, for p in (0, 1]; p <= 0 gives
  /// the minimum.
  double quantile(double p) const noexcept;

  std::span<const double> values() const noexcept;
  std::size_t sample_count() const noexcept { return values_ ? values_->size() : 0; }
  bool empty() const noexcept { return sample_count() == 0; }
  double min() const noexcept { return values_->front(); }
  double max() const noexcept { return values_->back(); }

  friend bool operator==(const EmpiricalCdf& a, const EmpiricalCdf& b) noexcept;

 private:
  std::shared_ptr<const std::vector<double>> values_;
};

/// Empirical Pr(x <= r). Throws DomainError when r <= 0 or the CDF is empty.
double confidence(const EmpiricalCdf& cdf, double max_latency_ms);

/// Sum_i w_i * confidence(cdf_i, r_i); `per_service[i]` pairs with the i-th
/// service of `services`. Throws DomainError on an empty service set or a
/// size mismatch.
double weighted_confidence(std::span<const EmpiricalCdf> per_service, const ServiceSet& services);
/// Same CDF for every service.
double weighted_confidence(const EmpiricalCdf& cdf, const ServiceSet& services);

/// Weighted Kantorovich-Rubinstein distance Sum_i w_i (F(r_i) - G(r_i)).
/// Positive when F (the current network) offers the higher confidence.
double kr_distance(const EmpiricalCdf& f, const EmpiricalCdf& g, const ServiceSet& services);

/// Switching cost. Scalar charges `value` directly as lost confidence;
/// CdfShift treats `value` as extra latency (ms) added on the target network.
struct SwitchCost {
  enum class Mode { Scalar, CdfShift };

  Mode mode = Mode::Scalar;
  double value = 0.0;

  static SwitchCost scalar(double penalty) { return {Mode::Scalar, penalty}; }
  static SwitchCost cdf_shift(double extra_latency_ms) { return {Mode::CdfShift, extra_latency_ms}; }

  friend bool operator==(const SwitchCost&, const SwitchCost&) = default;
};

/// Confidence lost by a switch onto `target`. Throws DomainError for a
/// negative cost value.
double switching_penalty(const EmpiricalCdf& target, const ServiceSet& services,
                         const SwitchCost& cost);

/// Table-style summary of a latency sample.
struct LatencyStats {
  std::size_t count = 0;
  double mean = 0.0;
  double stddev = 0.0;  // sample standard deviation (n - 1)
  double median = 0.0;
  double p90 = 0.0;

  friend bool operator==(const LatencyStats&, const LatencyStats&) = default;
};

/// Linear-interpolation quantile (numpy's default) of an ascending sample.
double interpolated_quantile(std::span<const double> sorted, double p);

/// Throws DomainError on an empty sample.
LatencyStats summarize(std::span<const double> values);

}  // namespace adaptivefog
