#pragma once

#include <memory>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "cohlab/linflat.hpp"
#include "cohlab/rng.hpp"

namespace cohlab {

class VarietyModel;

/// Coordinates of a model's ambient space.
///
/// Matrix models use row-major order: entry (i, j) of an m x n matrix is
/// coordinate i * n + j. Symmetric models list the upper triangle
/// lexicographically, (0,0), (0,1), ..., (0,n-1), (1,1), ...; models with a
/// constant or zero diagonal (unit Gram, distance matrices) drop it and list
/// pairs i < j in the same order.

struct LinearKind {
  std::shared_ptr<const Flat> flat;
};
/// m x n matrices of rank <= r. Parameters: U (m x r) then V (n x r), both
/// column-major; the point is U V^T.
struct LowRankKind {
  int rows, cols, rank;
};
/// Symmetric n x n matrices of rank <= r, parameterized as U U^T with U (n x r)
/// column-major. `isometric` scales off-diagonal coordinates by sqrt(2) so the
/// embedding preserves the Frobenius norm.
struct SymLowRankKind {
  int n, rank;
  bool isometric = false;
};
/// Gram matrices of n unit vectors in R^rank (unit diagonal dropped).
/// Parameters: n raw vectors, point-major; each is normalized before use.
struct UnitGramKind {
  int n, rank;
};
/// Squared Euclidean distance matrices of n points in R^d. Parameters: the
/// n points, point-major.
struct CayleyMengerKind {
  int n, d;
};
/// {x + y : x in left, y in right}. Parameters: left's then right's.
struct MinkowskiSumKind {
  std::shared_ptr<const VarietyModel> left, right;
};

class VarietyModel {
 public:
  using Kind = std::variant<LinearKind, LowRankKind, SymLowRankKind, UnitGramKind, CayleyMengerKind,
                            MinkowskiSumKind>;

  static VarietyModel linear(Flat flat);
  static VarietyModel low_rank(int rows, int cols, int rank);
  static VarietyModel sym_low_rank(int n, int rank, bool isometric = false);
  static VarietyModel unit_gram(int n, int rank);
  static VarietyModel cayley_menger(int n, int d);
  static VarietyModel minkowski_sum(VarietyModel left, VarietyModel right);

  [[nodiscard]] const Kind& kind() const { return kind_; }
  [[nodiscard]] int ambient_dim() const { return ambient_dim_; }
  [[nodiscard]] int param_dim() const { return param_dim_; }
  /// Compact descriptor, e.g. "lowrank:m=20,n=30,r=2".
  [[nodiscard]] std::string describe() const;

 private:
  VarietyModel(Kind kind, int ambient_dim, int param_dim);

  Kind kind_;
  int ambient_dim_;
  int param_dim_;
};

/// A point on a model together with the parameters that produced it.
struct Point {
  VarietyModel model;
  Vector params;
  Vector ambient;
};

/// Coordinate index of the unordered pair {i, j}, i != j, among n items.
int pair_index(int n, int i, int j);
/// Inverse of pair_index.
std::pair<int, int> pair_from_index(int n, int index);
/// Coordinate index of (i, j), i <= j, in the upper triangle with diagonal.
int upper_index(int n, int i, int j);

/// The parameterization map. Throws std::invalid_argument on a shape mismatch.
Vector embed(const VarietyModel& model, const Vector& params);
/// Analytic Jacobian of `embed` (ambient_dim x param_dim).
Matrix jacobian(const VarietyModel& model, const Vector& params);
Point make_point(const VarietyModel& model, Vector params);

/// Dimension of the variety. Closed forms for every kind except Minkowski
/// sums, whose dimension is the numerical rank of the joint Jacobian at a
/// fixed generic point.
int dimension(const VarietyModel& model);

/// Relative singular-value cutoff used to decide tangent rank.
inline constexpr double kTangentRankTol = 1e-9;

struct TangentSpace {
  /// Spanned by the leading singular vectors of the Jacobian; has dimension
  /// `expected_dim` when full rank, `numerical_rank` otherwise.
  Flat flat;
  int expected_dim;
  int numerical_rank;
  [[nodiscard]] bool full_rank() const { return numerical_rank >= expected_dim; }
};

TangentSpace tangent_space(const Point& point);

/// Parameters i.i.d. standard normal. Re-draws up to 3 times if the tangent
/// is rank deficient, then throws NumericalError.
Point sample_generic_point(const VarietyModel& model, Rng& rng);

struct GenericSample {
  Point point;
  TangentSpace tangent;
};
/// sample_generic_point that also hands back the tangent it checked.
GenericSample sample_generic_tangent(const VarietyModel& model, Rng& rng);

/// Coherence of the tangent flat. Throws NumericalError at non-generic points.
double coherence_at(const Point& point);

/// 1 - (1 - coh(column span)) (1 - coh(row span)), or 1 - (1 - coh(span))^2
/// when `symmetric`. Throws std::invalid_argument if rank(A) > r.
double matrix_coherence(const Matrix& a, int r, bool symmetric = false);

struct CoherenceValue {
  double value;
  bool exact;
  /// Number of generic points behind a Monte Carlo estimate; 0 when exact or
  /// when the value is an envelope rather than an estimate.
  long samples = 0;
};

/// Placeholder constant for the distance/Gram envelope C * d / n. It is a
/// reporting convention, not a proven constant.
inline constexpr double kDistanceCoherenceConstant = 3.0;

/// Closed-form global coherence where known:
///   low rank            r (m + n - r) / (m n)   exact
///   symmetric low rank  r (2n - r) / n^2        exact
///   linear              coherence of the flat   exact
///   Cayley-Menger(n,d)  3 d / n                 envelope, not exact
///   unit Gram(n,r)      3 (r - 1) / n           envelope, not exact
/// Throws std::invalid_argument for Minkowski sums.
CoherenceValue coherence_formula(const VarietyModel& model);

/// Exact value when a closed form exists; otherwise the minimum of
/// coherence_at over `samples` generic points.
CoherenceValue global_coherence(const VarietyModel& model, long samples, Rng& rng);

/// Low-rank point whose row and column spans are maximally incoherent flats,
/// so its coherence is r (m + n - r) / (m n).
Point incoherent_low_rank_point(const VarietyModel& model);

/// (x, h) / sqrt(x^T x + h^2). Throws std::invalid_argument for x = 0, h = 0.
Vector nu_h(const Vector& x, double h);

/// Grassmann distance between the Cayley-Menger tangent at the configuration
/// (rows of `config` are the n points in R^d) and the unit Gram tangent at the
/// lifted points nu_h(x_i), for each h. Throws NumericalError when either
/// tangent is rank deficient.
std::vector<double> tangent_limit_probe(const Matrix& config, const std::vector<double>& h_values);

}  // namespace cohlab
