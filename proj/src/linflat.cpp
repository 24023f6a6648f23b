#include "cohlab/linflat.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <istream>
#include <limits>
#include <numbers>
#include <ostream>
#include <sstream>

#include "cohlab/error.hpp"

namespace cohlab {

namespace {

bool is_orthonormal(const Matrix& basis, double tol) {
  const Matrix gram = basis.transpose() * basis;
  return (gram - Matrix::Identity(gram.rows(), gram.cols())).cwiseAbs().maxCoeff() <= tol;
}

}  // namespace

Flat::Flat(Matrix basis, Vector offset) : basis_(std::move(basis)), offset_(std::move(offset)) {
  if (basis_.cols() < 1 || basis_.cols() > basis_.rows())
    throw std::invalid_argument("Flat: need 1 <= k <= n");
  if (offset_.size() != basis_.rows())
    throw std::invalid_argument("Flat: offset length differs from ambient dimension");
  if (!is_orthonormal(basis_, 1e-10))
    throw std::invalid_argument("Flat: basis columns are not orthonormal");
}

Vector Flat::project(const Vector& v) const {
  if (v.size() != offset_.size()) throw std::invalid_argument("Flat::project: dimension mismatch");
  return offset_ + basis_ * (basis_.transpose() * (v - offset_));
}

Flat Flat::translated(Vector offset) const { return Flat(basis_, std::move(offset)); }

Flat make_flat(const Matrix& columns, const Vector& offset) {
  if (columns.cols() == 0 || columns.rows() == 0)
    throw std::invalid_argument("make_flat: empty spanning set");
  if (offset.size() != columns.rows())
    throw std::invalid_argument("make_flat: offset length differs from vector length");
  if (columns.cwiseAbs().maxCoeff() == 0.0)
    throw std::invalid_argument("make_flat: spanning set is all zero");

  Eigen::ColPivHouseholderQR<Matrix> qr(columns);
  const double max_dim = static_cast<double>(std::max(columns.rows(), columns.cols()));
  qr.setThreshold(max_dim * std::numeric_limits<double>::epsilon());
  const Eigen::Index rank = qr.rank();
  if (rank == 0) throw std::invalid_argument("make_flat: spanning set is numerically zero");
  Matrix q = qr.householderQ() * Matrix::Identity(columns.rows(), rank);
  return Flat(std::move(q), offset);
}

Flat make_flat(std::span<const Vector> spanning, const Vector& offset) {
  if (spanning.empty()) throw std::invalid_argument("make_flat: no spanning vectors");
  const Eigen::Index n = spanning.front().size();
  Matrix columns(n, static_cast<Eigen::Index>(spanning.size()));
  for (std::size_t j = 0; j < spanning.size(); ++j) {
    if (spanning[j].size() != n) throw std::invalid_argument("make_flat: vectors differ in length");
    columns.col(static_cast<Eigen::Index>(j)) = spanning[j];
  }
  return make_flat(columns, offset);
}

Vector leverage_scores(const Flat& flat) {
  const Matrix& b = flat.basis();
  const Eigen::Index n = b.rows();
  Vector scores(n);
#pragma omp parallel for schedule(static)
  for (Eigen::Index i = 0; i < n; ++i) scores[i] = b.row(i).squaredNorm();
  return scores;
}

namespace serial {
Vector leverage_scores(const Flat& flat) {
  const Matrix& b = flat.basis();
  Vector scores = Vector::Zero(b.rows());
  for (Eigen::Index j = 0; j < b.cols(); ++j)
    for (Eigen::Index i = 0; i < b.rows(); ++i) scores[i] += b(i, j) * b(i, j);
  return scores;
}
}  // namespace serial

double coherence_of_flat(const Flat& flat) { return leverage_scores(flat).maxCoeff(); }

Flat block_flat(int n, int k) {
  if (k < 1 || k > n || n % k != 0) throw std::invalid_argument("block_flat: need k | n");
  const int block = n / k;
  const double value = std::sqrt(static_cast<double>(k) / n);
  Matrix basis = Matrix::Zero(n, k);
  for (int j = 0; j < k; ++j) basis.block(j * block, j, block, 1).setConstant(value);
  return Flat(std::move(basis), Vector::Zero(n));
}

Flat harmonic_frame_flat(int n, int k) {
  if (k < 1 || k > n) throw std::invalid_argument("harmonic_frame_flat: need 1 <= k <= n");
  if (k == n) return Flat(Matrix::Identity(n, n), Vector::Zero(n));
  Matrix basis(n, k);
  int col = 0;
  if (k % 2 == 1) basis.col(col++).setConstant(1.0 / std::sqrt(static_cast<double>(n)));
  const double scale = std::sqrt(2.0 / n);
  // Frequencies stay strictly below n/2, so cos and sin columns never alias.
  for (int freq = 1; col < k; ++freq) {
    for (int t = 0; t < n; ++t) {
      const double angle = 2.0 * std::numbers::pi * freq * t / n;
      basis(t, col) = scale * std::cos(angle);
      basis(t, col + 1) = scale * std::sin(angle);
    }
    col += 2;
  }
  return Flat(std::move(basis), Vector::Zero(n));
}

Flat max_incoherent_flat(int n, int k) {
  if (k < 1 || k > n) throw std::invalid_argument("max_incoherent_flat: need 1 <= k <= n");
  return n % k == 0 ? block_flat(n, k) : harmonic_frame_flat(n, k);
}

bool contains_directions(const Flat& outer, const Flat& inner, double tol) {
  if (outer.ambient_dim() != inner.ambient_dim()) return false;
  const Matrix& o = outer.basis();
  const Matrix residual = inner.basis() - o * (o.transpose() * inner.basis());
  return residual.colwise().norm().maxCoeff() <= tol;
}

Vector principal_angles(const Matrix& a, const Matrix& b) {
  if (a.rows() != b.rows()) throw std::invalid_argument("principal_angles: ambient mismatch");
  Eigen::JacobiSVD<Matrix> svd(a.transpose() * b);
  Vector cosines = svd.singularValues();
  Vector angles(cosines.size());
  for (Eigen::Index i = 0; i < cosines.size(); ++i)
    angles[i] = std::acos(std::clamp(cosines[i], -1.0, 1.0));
  std::sort(angles.begin(), angles.end());
  return angles;
}

double grassmann_distance(const Flat& a, const Flat& b) {
  if (a.dim() != b.dim()) throw std::invalid_argument("grassmann_distance: flats differ in dimension");
  return principal_angles(a.basis(), b.basis()).norm();
}

void write_flat(std::ostream& os, const Flat& flat) {
  const int n = flat.ambient_dim();
  os << n << ' ' << flat.dim() << '\n' << std::setprecision(17);
  auto write_row = [&](const auto& v) {
    for (int i = 0; i < n; ++i) os << (i ? " " : "") << v[i];
    os << '\n';
  };
  for (int j = 0; j < flat.dim(); ++j) write_row(flat.basis().col(j));
  write_row(flat.offset());
}

Flat read_flat(std::istream& is) {
  long n = 0, k = 0;
  if (!(is >> n >> k) || n < 1 || k < 1 || k > n) throw ParseError("flat file: bad header, expected \"n k\"");
  Matrix columns(n, k);
  Vector offset(n);
  for (long j = 0; j < k; ++j)
    for (long i = 0; i < n; ++i)
      if (!(is >> columns(i, j))) throw ParseError("flat file: truncated basis column " + std::to_string(j));
  for (long i = 0; i < n; ++i)
    if (!(is >> offset[i])) throw ParseError("flat file: truncated offset line");
  std::string trailing;
  if (is >> trailing) throw ParseError("flat file: trailing data after offset line");

  if (is_orthonormal(columns, 1e-10)) return Flat(std::move(columns), std::move(offset));
  Flat flat = make_flat(columns, offset);
  if (flat.dim() != k) throw ParseError("flat file: basis columns are linearly dependent");
  return flat;
}

void save_flat(const std::string& path, const Flat& flat) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot open " + path + " for writing");
  write_flat(os, flat);
}

Flat load_flat(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw ParseError("cannot open flat file " + path);
  return read_flat(is);
}

}  // namespace cohlab
