#include "cohlab/sampling.hpp"

#include <algorithm>
#include <charconv>
#include <numeric>

#include "cohlab/error.hpp"

namespace cohlab {

SampleMask::SampleMask(int ambient_dim, std::vector<int> indices)
    : ambient_dim_(ambient_dim), indices_(std::move(indices)) {
  if (ambient_dim_ < 0) throw std::invalid_argument("SampleMask: negative ambient dimension");
  for (std::size_t i = 0; i < indices_.size(); ++i) {
    if (indices_[i] < 0 || indices_[i] >= ambient_dim_)
      throw std::invalid_argument("SampleMask: index " + std::to_string(indices_[i]) + " out of range");
    if (i > 0 && indices_[i] <= indices_[i - 1])
      throw std::invalid_argument("SampleMask: indices must be strictly increasing");
  }
}

SampleMask SampleMask::full(int ambient_dim) {
  std::vector<int> all(static_cast<std::size_t>(ambient_dim));
  std::iota(all.begin(), all.end(), 0);
  return SampleMask(ambient_dim, std::move(all));
}

std::vector<bool> SampleMask::indicators() const {
  std::vector<bool> eps(static_cast<std::size_t>(ambient_dim_), false);
  for (int i : indices_) eps[static_cast<std::size_t>(i)] = true;
  return eps;
}

std::vector<double> coordinate_uniforms(int n, Rng& rng) {
  std::vector<double> u(static_cast<std::size_t>(n));
  for (double& x : u) x = rng.uniform();
  return u;
}

SampleMask mask_from_uniforms(std::span<const double> uniforms, double rho) {
  if (!(rho >= 0.0 && rho <= 1.0)) throw std::invalid_argument("sampling rate must lie in [0, 1]");
  std::vector<int> idx;
  for (std::size_t i = 0; i < uniforms.size(); ++i)
    if (uniforms[i] < rho) idx.push_back(static_cast<int>(i));
  return SampleMask(static_cast<int>(uniforms.size()), std::move(idx));
}

SampleMask draw_mask(int n, double rho, Rng& rng) {
  if (!(rho >= 0.0 && rho <= 1.0)) throw std::invalid_argument("sampling rate must lie in [0, 1]");
  const std::vector<double> u = coordinate_uniforms(n, rng);
  return mask_from_uniforms(u, rho);
}

Vector project(const SampleMask& mask, const Vector& v) {
  if (v.size() != mask.ambient_dim()) throw std::invalid_argument("project: dimension mismatch");
  Vector out(mask.size());
  for (int i = 0; i < mask.size(); ++i) out[i] = v[mask.indices()[static_cast<std::size_t>(i)]];
  return out;
}

Matrix project_rows(const SampleMask& mask, const Matrix& m) {
  if (m.rows() != mask.ambient_dim()) throw std::invalid_argument("project_rows: dimension mismatch");
  Matrix out(mask.size(), m.cols());
  for (int i = 0; i < mask.size(); ++i) out.row(i) = m.row(mask.indices()[static_cast<std::size_t>(i)]);
  return out;
}

SampleMask parse_mask(std::string_view text, int ambient_dim) {
  std::vector<int> idx;
  std::size_t pos = 0;
  while (pos < text.size()) {
    const std::size_t comma = std::min(text.find(',', pos), text.size());
    const std::string_view tok = text.substr(pos, comma - pos);
    int value = 0;
    auto [end, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), value);
    if (tok.empty() || ec != std::errc() || end != tok.data() + tok.size())
      throw ParseError("mask: bad index \"" + std::string(tok) + "\"");
    idx.push_back(value);
    pos = comma + 1;
  }
  std::sort(idx.begin(), idx.end());
  if (std::adjacent_find(idx.begin(), idx.end()) != idx.end()) throw ParseError("mask: duplicate index");
  if (!idx.empty() && (idx.front() < 0 || idx.back() >= ambient_dim))
    throw ParseError("mask: index out of range for ambient dimension " + std::to_string(ambient_dim));
  return SampleMask(ambient_dim, std::move(idx));
}

std::string format_mask(const SampleMask& mask) {
  std::string out;
  for (std::size_t i = 0; i < mask.indices().size(); ++i) {
    if (i) out += ',';
    out += std::to_string(mask.indices()[i]);
  }
  return out;
}

Vector LinearMeasurement::apply(const Vector& v) const {
  if (v.size() != matrix.cols()) throw std::invalid_argument("LinearMeasurement: dimension mismatch");
  return matrix * v;
}

LinearMeasurement generic_linear_map(int n, int m, Rng& rng) {
  if (n < 1 || m < 1) throw std::invalid_argument("generic_linear_map: need m, n >= 1");
  Matrix a(m, n);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < n; ++j) a(i, j) = rng.normal();
  return LinearMeasurement{std::move(a)};
}

}  // namespace cohlab
