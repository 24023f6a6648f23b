#pragma once

#include <Eigen/Dense>
#include <iosfwd>
#include <span>
#include <string>

namespace cohlab {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// An affine k-flat in R^n, stored as an orthonormal n x k basis and an offset.
///
/// The orthogonal projection onto the flat is P(v) = o + B B^T (v - o); its
/// linear part B B^T is what coherence and leverage scores are built from.
/// All computation is over the reals. Coherence of a real flat equals that of
/// its complex closure, so nothing is lost by this.
class Flat {
 public:
  /// Throws std::invalid_argument unless basis^T basis = I within 1e-10,
  /// 1 <= k <= n and offset has length n.
  Flat(Matrix basis, Vector offset);

  [[nodiscard]] int ambient_dim() const { return static_cast<int>(basis_.rows()); }
  [[nodiscard]] int dim() const { return static_cast<int>(basis_.cols()); }
  [[nodiscard]] const Matrix& basis() const { return basis_; }
  [[nodiscard]] const Vector& offset() const { return offset_; }

  /// Orthogonal projection of v onto the flat.
  [[nodiscard]] Vector project(const Vector& v) const;
  [[nodiscard]] Flat translated(Vector offset) const;

 private:
  Matrix basis_;
  Vector offset_;
};

/// Orthonormalizes the span of the given vectors by column-pivoted QR.
/// Columns whose pivot falls below max(n, count) * eps * (largest pivot) are
/// treated as dependent and dropped, so the returned k is the numerical rank.
/// Throws std::invalid_argument for an empty or all-zero spanning set.
Flat make_flat(std::span<const Vector> spanning, const Vector& offset);
Flat make_flat(const Matrix& columns, const Vector& offset);

/// Squared row norms of the basis, i.e. ||P(e_i) - P(0)||^2. Entries lie in
/// [0, 1] and sum to k. Rows are processed in parallel.
Vector leverage_scores(const Flat& flat);

/// Max leverage score. Always within [k/n, 1].
double coherence_of_flat(const Flat& flat);

/// k disjoint blocks of n/k coordinates, each spanned by a vector with entries
/// sqrt(k/n) on its block. Requires k | n. Every leverage score is k/n.
Flat block_flat(int n, int k);

/// Real harmonic frame: columns cos(2 pi j t / n), sin(2 pi j t / n) for
/// j = 1..floor(k/2), scaled by sqrt(2/n), plus the constant column 1/sqrt(n)
/// when k is odd. Columns are orthonormal and every row has squared norm k/n.
Flat harmonic_frame_flat(int n, int k);

/// A linear flat of coherence exactly k/n: block construction when k | n,
/// harmonic frame otherwise.
Flat max_incoherent_flat(int n, int k);

/// True when every basis direction of `inner` lies in the linear part of
/// `outer`, up to `tol` in residual norm.
bool contains_directions(const Flat& outer, const Flat& inner, double tol = 1e-8);

/// Principal angles (radians, ascending) between the column spans of two
/// orthonormal bases, from the singular values of a^T b clamped to [-1, 1].
Vector principal_angles(const Matrix& a, const Matrix& b);

/// sqrt(sum of squared principal angles) between the linear parts.
double grassmann_distance(const Flat& a, const Flat& b);

/// Plain-text flat format:
///   line 1: "n k"
///   next k lines: one basis column each, n whitespace-separated reals
///   last line: the offset, n reals
void write_flat(std::ostream& os, const Flat& flat);
Flat read_flat(std::istream& is);
void save_flat(const std::string& path, const Flat& flat);
Flat load_flat(const std::string& path);

namespace serial {
/// Single-threaded reference for cohlab::leverage_scores.
Vector leverage_scores(const Flat& flat);
}  // namespace serial

}  // namespace cohlab
