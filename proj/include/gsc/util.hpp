#pragma once

#include <cstdint>
#include <string>
#include <string_view>

namespace gsc {

std::string sha256_hex(std::string_view data);

/// Round-trippable decimal form of a double (17 significant digits).
std::string format_double(double x);

/// Compensated (Neumaier) accumulator; order-dependent but reproducible.
class CompensatedSum {
 public:
  void add(double x) noexcept {
    const double t = sum_ + x;
    if ((sum_ >= 0 ? sum_ : -sum_) >= (x >= 0 ? x : -x))
      comp_ += (sum_ - t) + x;
    else
      comp_ += (x - t) + sum_;
    sum_ = t;
  }
  double value() const noexcept { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

/// Counter-based generator: the i-th draw for a seed is splitmix64(seed, i),
/// so streams are reproducible regardless of call order.
std::uint64_t counter_hash(std::uint64_t seed, std::uint64_t counter) noexcept;
/// Uniform double in [0, 1) from the counter-based stream.
double counter_uniform(std::uint64_t seed, std::uint64_t counter) noexcept;

}  // namespace gsc
