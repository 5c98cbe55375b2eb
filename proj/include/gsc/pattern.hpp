#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

namespace gsc {

/// Generator of a generalized Sierpinski carpet: ambient dimension, length
/// scale and the mask of retained level-1 sub-cubes.
///
/// The mask is stored row-major over level-1 indices (i_0, ..., i_{d-1}),
/// i.e. the last index varies fastest.
class GscPattern {
 public:
  GscPattern(int dim, int scale, std::vector<std::uint8_t> keep);

  static GscPattern standard_carpet();
  static GscPattern full_cube(int dim, int scale);
  static GscPattern menger_sponge();
  /// Builds a pattern from the complement list (level-1 indices to remove).
  static GscPattern from_removed(int dim, int scale,
                                 const std::vector<std::vector<int>>& removed);

  int dim() const noexcept { return dim_; }
  int scale() const noexcept { return scale_; }
  /// Number of retained level-1 cubes (m_F).
  int mass() const noexcept { return mass_; }
  std::size_t cell_count() const noexcept { return keep_.size(); }

  bool kept(std::size_t linear) const { return keep_[linear] != 0; }
  bool kept(std::span<const int> digits) const { return kept(linear_index(digits)); }

  std::size_t linear_index(std::span<const int> digits) const;
  std::vector<int> digits_of(std::size_t linear) const;

  const std::vector<std::uint8_t>& mask() const noexcept { return keep_; }
  std::vector<std::vector<int>> removed() const;

  /// SHA-256 (hex) over [d, L_F] followed by the mask packed one bit per
  /// cell, most significant bit first, row-major.
  std::string hash() const;

  friend bool operator==(const GscPattern&, const GscPattern&) = default;

 private:
  int dim_;
  int scale_;
  int mass_;
  std::vector<std::uint8_t> keep_;
};

/// Parses the key-value pattern format (`d`, `L_F`, `removed`).
GscPattern parse_pattern(const std::string& text);
GscPattern load_pattern(const std::filesystem::path& path);
std::string format_pattern(const GscPattern& pattern);

/// Integer power with overflow check.
std::int64_t ipow(std::int64_t base, int exp);

}  // namespace gsc
