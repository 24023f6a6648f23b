#pragma once

#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "cohlab/linflat.hpp"
#include "cohlab/rng.hpp"

namespace cohlab {

/// The set of observed coordinates of a Bernoulli(rho) sample, without
/// repetition. Indices are strictly increasing and lie in [0, ambient_dim).
class SampleMask {
 public:
  SampleMask(int ambient_dim, std::vector<int> indices);
  static SampleMask full(int ambient_dim);

  [[nodiscard]] int ambient_dim() const { return ambient_dim_; }
  [[nodiscard]] const std::vector<int>& indices() const { return indices_; }
  [[nodiscard]] int size() const { return static_cast<int>(indices_.size()); }
  /// The Bernoulli indicators epsilon_i, one per coordinate.
  [[nodiscard]] std::vector<bool> indicators() const;

  friend bool operator==(const SampleMask&, const SampleMask&) = default;

 private:
  int ambient_dim_;
  std::vector<int> indices_;
};

/// One uniform draw per coordinate; masks for several rates built from the
/// same draws are nested.
std::vector<double> coordinate_uniforms(int n, Rng& rng);
/// Coordinates whose uniform is below rho.
SampleMask mask_from_uniforms(std::span<const double> uniforms, double rho);
/// Each coordinate independently with probability rho. Throws
/// std::invalid_argument for rho outside [0, 1].
SampleMask draw_mask(int n, double rho, Rng& rng);

/// Entries of v at the mask's indices, in index order.
Vector project(const SampleMask& mask, const Vector& v);
/// Rows of m at the mask's indices.
Matrix project_rows(const SampleMask& mask, const Matrix& m);

/// "0,3,7" <-> mask. Parsing rejects duplicates and out-of-range indices.
SampleMask parse_mask(std::string_view text, int ambient_dim);
std::string format_mask(const SampleMask& mask);

struct LinearMeasurement {
  Matrix matrix;  // m x n
  [[nodiscard]] Vector apply(const Vector& v) const;
};

/// i.i.d. standard normal m x n matrix.
LinearMeasurement generic_linear_map(int n, int m, Rng& rng);

}  // namespace cohlab
