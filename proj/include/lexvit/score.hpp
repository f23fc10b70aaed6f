#pragma once

#include <cmath>
#include <compare>
#include <cstdint>
#include <limits>
#include <stdexcept>

namespace lexvit {

// Natural-log probability stored in fixed point (2^-40 nat resolution).
//
// Max-plus accumulation over integers is exactly associative, so two paths
// whose log-probabilities are mathematically equal always compare equal,
// regardless of the order their terms were summed in.  The smallest raw value
// is reserved as the -infinity sentinel for zero probability and absorbs
// under addition.
class LogScore {
 public:
  using raw_type = std::int64_t;

  static constexpr int kFractionBits = 40;
  static constexpr double kScale = static_cast<double>(raw_type{1} << kFractionBits);
  // |log p| above this is rejected when converting; doubles underflow to 0
  // long before (log of the smallest subnormal is about -745).
  static constexpr double kMaxMagnitude = 4096.0;

  constexpr LogScore() = default;

  static constexpr LogScore impossible() { return LogScore(kImpossibleRaw); }
  static constexpr LogScore certain() { return LogScore(0); }
  static constexpr LogScore from_raw(raw_type raw) { return LogScore(raw); }

  static LogScore from_log(double log_value) {
    if (std::isnan(log_value)) throw std::domain_error("LogScore: NaN log value");
    if (log_value == -std::numeric_limits<double>::infinity()) return impossible();
    if (!(std::fabs(log_value) < kMaxMagnitude))
      throw std::domain_error("LogScore: log value out of representable range");
    return LogScore(static_cast<raw_type>(std::llround(log_value * kScale)));
  }

  static LogScore from_prob(double p) {
    if (!(p >= 0.0 && p <= 1.0)) throw std::domain_error("LogScore: probability outside [0,1]");
    return p == 0.0 ? impossible() : from_log(std::log(p));
  }

  constexpr raw_type raw() const { return raw_; }
  constexpr bool is_impossible() const { return raw_ == kImpossibleRaw; }
  constexpr bool is_finite() const { return raw_ != kImpossibleRaw; }

  double to_double() const {
    return is_impossible() ? -std::numeric_limits<double>::infinity()
                           : static_cast<double>(raw_) / kScale;
  }

  // Largest |raw| over finite values; used for overflow headroom checks.
  constexpr raw_type magnitude() const { return is_impossible() ? 0 : (raw_ < 0 ? -raw_ : raw_); }

  friend constexpr LogScore operator+(LogScore a, LogScore b) {
    if (a.is_impossible() || b.is_impossible()) return impossible();
    return LogScore(a.raw_ + b.raw_);
  }
  constexpr LogScore& operator+=(LogScore other) { return *this = *this + other; }

  friend constexpr bool operator==(LogScore, LogScore) = default;
  friend constexpr auto operator<=>(LogScore a, LogScore b) { return a.raw_ <=> b.raw_; }

 private:
  static constexpr raw_type kImpossibleRaw = std::numeric_limits<raw_type>::min();
  constexpr explicit LogScore(raw_type raw) : raw_(raw) {}

  raw_type raw_ = kImpossibleRaw;
};

constexpr LogScore max(LogScore a, LogScore b) { return a < b ? b : a; }

// Throws unless `steps` additions of terms bounded by `step_magnitude` fit the
// raw range with a factor-of-two margin.
inline void check_accumulation_headroom(LogScore::raw_type step_magnitude, std::uint64_t steps) {
  constexpr auto limit = static_cast<std::uint64_t>(std::numeric_limits<LogScore::raw_type>::max() / 2);
  if (step_magnitude == 0) return;
  if (steps > limit / static_cast<std::uint64_t>(step_magnitude))
    throw std::overflow_error("observation sequence too long for fixed-point score accumulation");
}

}  // namespace lexvit
