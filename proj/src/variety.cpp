#include "cohlab/variety.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "cohlab/error.hpp"

namespace cohlab {

namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

int choose2(int n) { return n * (n - 1) / 2; }

void check_params(const VarietyModel& model, const Vector& params) {
  if (params.size() != model.param_dim())
    throw std::invalid_argument("parameter vector has length " + std::to_string(params.size()) +
                                ", model " + model.describe() + " expects " +
                                std::to_string(model.param_dim()));
}

// Point-major view of n points in R^d.
Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>> points_view(
    const Vector& params, int n, int d) {
  return {params.data(), n, d};
}

}  // namespace

// ---------------------------------------------------------------------------
// Model construction

VarietyModel::VarietyModel(Kind kind, int ambient_dim, int param_dim)
    : kind_(std::move(kind)), ambient_dim_(ambient_dim), param_dim_(param_dim) {}

VarietyModel VarietyModel::linear(Flat flat) {
  const int n = flat.ambient_dim(), k = flat.dim();
  return {LinearKind{std::make_shared<const Flat>(std::move(flat))}, n, k};
}

VarietyModel VarietyModel::low_rank(int rows, int cols, int rank) {
  if (rows < 1 || cols < 1 || rank < 1 || rank > std::min(rows, cols))
    throw std::invalid_argument("lowrank: need 1 <= r <= min(m, n)");
  return {LowRankKind{rows, cols, rank}, rows * cols, (rows + cols) * rank};
}

VarietyModel VarietyModel::sym_low_rank(int n, int rank, bool isometric) {
  if (n < 1 || rank < 1 || rank > n) throw std::invalid_argument("symlowrank: need 1 <= r <= n");
  return {SymLowRankKind{n, rank, isometric}, n * (n + 1) / 2, n * rank};
}

VarietyModel VarietyModel::unit_gram(int n, int rank) {
  if (n < 2 || rank < 2 || rank > n) throw std::invalid_argument("unitgram: need 2 <= r <= n");
  return {UnitGramKind{n, rank}, choose2(n), n * rank};
}

VarietyModel VarietyModel::cayley_menger(int n, int d) {
  if (n < 2 || d < 1 || d > n) throw std::invalid_argument("cayley: need 1 <= d <= n");
  return {CayleyMengerKind{n, d}, choose2(n), n * d};
}

VarietyModel VarietyModel::minkowski_sum(VarietyModel left, VarietyModel right) {
  if (left.ambient_dim() != right.ambient_dim())
    throw std::invalid_argument("sum: summands live in different ambient dimensions");
  const int ambient = left.ambient_dim();
  const int params = left.param_dim() + right.param_dim();
  return {MinkowskiSumKind{std::make_shared<const VarietyModel>(std::move(left)),
                           std::make_shared<const VarietyModel>(std::move(right))},
          ambient, params};
}

std::string VarietyModel::describe() const {
  std::ostringstream os;
  std::visit(Overloaded{
                 [&](const LinearKind& k) {
                   os << "linear:n=" << k.flat->ambient_dim() << ",k=" << k.flat->dim();
                 },
                 [&](const LowRankKind& k) { os << "lowrank:m=" << k.rows << ",n=" << k.cols << ",r=" << k.rank; },
                 [&](const SymLowRankKind& k) {
                   os << "symlowrank:n=" << k.n << ",r=" << k.rank << (k.isometric ? ",isometric=1" : "");
                 },
                 [&](const UnitGramKind& k) { os << "unitgram:n=" << k.n << ",r=" << k.rank; },
                 [&](const CayleyMengerKind& k) { os << "cayley:n=" << k.n << ",d=" << k.d; },
                 [&](const MinkowskiSumKind& k) {
                   os << "sum(" << k.left->describe() << ";" << k.right->describe() << ")";
                 },
             },
             kind_);
  return os.str();
}

// ---------------------------------------------------------------------------
// Coordinates

int pair_index(int n, int i, int j) {
  if (i > j) std::swap(i, j);
  if (i < 0 || j >= n || i == j) throw std::out_of_range("pair_index: need 0 <= i < j < n");
  return i * n - i * (i + 1) / 2 + (j - i - 1);
}

std::pair<int, int> pair_from_index(int n, int index) {
  if (index < 0 || index >= choose2(n)) throw std::out_of_range("pair_from_index: index out of range");
  int i = 0;
  while (index >= n - 1 - i) {
    index -= n - 1 - i;
    ++i;
  }
  return {i, i + 1 + index};
}

int upper_index(int n, int i, int j) {
  if (i > j) std::swap(i, j);
  if (i < 0 || j >= n) throw std::out_of_range("upper_index: need 0 <= i <= j < n");
  return i * n - i * (i - 1) / 2 + (j - i);
}

// ---------------------------------------------------------------------------
// Parameterizations

Vector embed(const VarietyModel& model, const Vector& params) {
  check_params(model, params);
  return std::visit(
      Overloaded{
          [&](const LinearKind& k) -> Vector { return k.flat->offset() + k.flat->basis() * params; },
          [&](const LowRankKind& k) -> Vector {
            Eigen::Map<const Matrix> u(params.data(), k.rows, k.rank);
            Eigen::Map<const Matrix> v(params.data() + k.rows * k.rank, k.cols, k.rank);
            const Matrix a = u * v.transpose();
            Vector out(model.ambient_dim());
            for (int i = 0; i < k.rows; ++i)
              for (int j = 0; j < k.cols; ++j) out[i * k.cols + j] = a(i, j);
            return out;
          },
          [&](const SymLowRankKind& k) -> Vector {
            Eigen::Map<const Matrix> u(params.data(), k.n, k.rank);
            const Matrix a = u * u.transpose();
            const double off = k.isometric ? std::numbers::sqrt2 : 1.0;
            Vector out(model.ambient_dim());
            for (int i = 0; i < k.n; ++i)
              for (int j = i; j < k.n; ++j) out[upper_index(k.n, i, j)] = (i == j ? 1.0 : off) * a(i, j);
            return out;
          },
          [&](const UnitGramKind& k) -> Vector {
            auto raw = points_view(params, k.n, k.rank);
            Matrix x = raw;
            for (int i = 0; i < k.n; ++i) {
              const double norm = x.row(i).norm();
              if (norm == 0.0) throw std::invalid_argument("unitgram: zero vector cannot be normalized");
              x.row(i) /= norm;
            }
            Vector out(model.ambient_dim());
            for (int i = 0; i < k.n; ++i)
              for (int j = i + 1; j < k.n; ++j) out[pair_index(k.n, i, j)] = x.row(i).dot(x.row(j));
            return out;
          },
          [&](const CayleyMengerKind& k) -> Vector {
            auto x = points_view(params, k.n, k.d);
            Vector out(model.ambient_dim());
            for (int i = 0; i < k.n; ++i)
              for (int j = i + 1; j < k.n; ++j) out[pair_index(k.n, i, j)] = (x.row(i) - x.row(j)).squaredNorm();
            return out;
          },
          [&](const MinkowskiSumKind& k) -> Vector {
            const int split = k.left->param_dim();
            return embed(*k.left, params.head(split)) + embed(*k.right, params.tail(params.size() - split));
          },
      },
      model.kind());
}

Matrix jacobian(const VarietyModel& model, const Vector& params) {
  check_params(model, params);
  Matrix jac = Matrix::Zero(model.ambient_dim(), model.param_dim());
  std::visit(
      Overloaded{
          [&](const LinearKind& k) { jac = k.flat->basis(); },
          [&](const LowRankKind& k) {
            Eigen::Map<const Matrix> u(params.data(), k.rows, k.rank);
            Eigen::Map<const Matrix> v(params.data() + k.rows * k.rank, k.cols, k.rank);
            for (int a = 0; a < k.rank; ++a) {
              // d(UV^T)/dU_ia puts V(:, a) in row i.
              for (int i = 0; i < k.rows; ++i)
                for (int j = 0; j < k.cols; ++j) jac(i * k.cols + j, a * k.rows + i) = v(j, a);
              // d(UV^T)/dV_ja puts U(:, a) in column j.
              const int base = k.rows * k.rank + a * k.cols;
              for (int j = 0; j < k.cols; ++j)
                for (int i = 0; i < k.rows; ++i) jac(i * k.cols + j, base + j) = u(i, a);
            }
          },
          [&](const SymLowRankKind& k) {
            Eigen::Map<const Matrix> u(params.data(), k.n, k.rank);
            const double off = k.isometric ? std::numbers::sqrt2 : 1.0;
            // dA_ij/dU_ka = delta_ki U_ja + delta_kj U_ia
            for (int a = 0; a < k.rank; ++a)
              for (int p = 0; p < k.n; ++p) {
                const int col = a * k.n + p;
                for (int q = 0; q < k.n; ++q) {
                  if (q == p) {
                    jac(upper_index(k.n, p, p), col) = 2.0 * u(p, a);
                  } else {
                    jac(upper_index(k.n, p, q), col) = off * u(q, a);
                  }
                }
              }
          },
          [&](const UnitGramKind& k) {
            auto raw = points_view(params, k.n, k.rank);
            Matrix x = raw;
            Vector norms(k.n);
            for (int i = 0; i < k.n; ++i) {
              norms[i] = x.row(i).norm();
              if (norms[i] == 0.0) throw std::invalid_argument("unitgram: zero vector cannot be normalized");
              x.row(i) /= norms[i];
            }
            // d<x_p, x_q>/dy_p = (I - x_p x_p^T) x_q / |y_p|, with x = y / |y|.
            for (int p = 0; p < k.n; ++p)
              for (int q = 0; q < k.n; ++q) {
                if (p == q) continue;
                const double along = x.row(p).dot(x.row(q));
                const int row = pair_index(k.n, p, q);
                for (int c = 0; c < k.rank; ++c)
                  jac(row, p * k.rank + c) = (x(q, c) - along * x(p, c)) / norms[p];
              }
          },
          [&](const CayleyMengerKind& k) {
            auto x = points_view(params, k.n, k.d);
            // (dD/dx_p)_pq = 2 (x_p - x_q)
            for (int p = 0; p < k.n; ++p)
              for (int q = 0; q < k.n; ++q) {
                if (p == q) continue;
                const int row = pair_index(k.n, p, q);
                for (int c = 0; c < k.d; ++c) jac(row, p * k.d + c) = 2.0 * (x(p, c) - x(q, c));
              }
          },
          [&](const MinkowskiSumKind& k) {
            const int split = k.left->param_dim();
            jac.leftCols(split) = jacobian(*k.left, params.head(split));
            jac.rightCols(params.size() - split) = jacobian(*k.right, params.tail(params.size() - split));
          },
      },
      model.kind());
  return jac;
}

Point make_point(const VarietyModel& model, Vector params) {
  Vector ambient = embed(model, params);
  return Point{model, std::move(params), std::move(ambient)};
}

// ---------------------------------------------------------------------------
// Tangent spaces

namespace {

Vector gaussian_params(const VarietyModel& model, Rng& rng) {
  Vector params(model.param_dim());
  for (Eigen::Index i = 0; i < params.size(); ++i) params[i] = rng.normal();
  return params;
}

void normalize_sphere_params(const VarietyModel& model, Vector& params) {
  std::visit(Overloaded{
                 [&](const UnitGramKind& k) {
                   for (int i = 0; i < k.n; ++i) {
                     auto seg = params.segment(i * k.rank, k.rank);
                     seg /= seg.norm();
                   }
                 },
                 [&](const MinkowskiSumKind& k) {
                   const int split = k.left->param_dim();
                   Vector left = params.head(split), right = params.tail(params.size() - split);
                   normalize_sphere_params(*k.left, left);
                   normalize_sphere_params(*k.right, right);
                   params << left, right;
                 },
                 [](const auto&) {},
             },
             model.kind());
}

struct JacobianSpectrum {
  Matrix left_vectors;
  Vector singular_values;
};

JacobianSpectrum jacobian_spectrum(const Matrix& jac) {
  Eigen::JacobiSVD<Matrix> svd(jac, Eigen::ComputeThinU);
  return {svd.matrixU(), svd.singularValues()};
}

int numerical_rank(const Vector& singular_values, double rel_tol) {
  if (singular_values.size() == 0 || singular_values[0] <= 0.0) return 0;
  const double cutoff = rel_tol * singular_values[0];
  return static_cast<int>((singular_values.array() > cutoff).count());
}

int sum_dimension(const VarietyModel& model) {
  Rng rng(derive_seed({0x5u, 0x4du}));  // fixed generic point for the rank probe
  Vector params = gaussian_params(model, rng);
  normalize_sphere_params(model, params);
  return numerical_rank(jacobian_spectrum(jacobian(model, params)).singular_values, kTangentRankTol);
}

}  // namespace

int dimension(const VarietyModel& model) {
  return std::visit(Overloaded{
                        [](const LinearKind& k) { return k.flat->dim(); },
                        [](const LowRankKind& k) { return k.rank * (k.rows + k.cols - k.rank); },
                        [](const SymLowRankKind& k) { return k.rank * k.n - k.rank * (k.rank - 1) / 2; },
                        // Gram of unit vectors in R^r has the dimension of C(n, r-1).
                        [](const UnitGramKind& k) { return (k.rank - 1) * k.n - k.rank * (k.rank - 1) / 2; },
                        [](const CayleyMengerKind& k) { return k.d * k.n - k.d * (k.d + 1) / 2; },
                        [&](const MinkowskiSumKind&) { return sum_dimension(model); },
                    },
                    model.kind());
}

TangentSpace tangent_space(const Point& point) {
  const VarietyModel& model = point.model;
  if (const auto* lin = std::get_if<LinearKind>(&model.kind()))
    return TangentSpace{lin->flat->translated(point.ambient), lin->flat->dim(), lin->flat->dim()};

  const int expected = dimension(model);
  const JacobianSpectrum js = jacobian_spectrum(jacobian(model, point.params));
  const int rank = numerical_rank(js.singular_values, kTangentRankTol);
  const int keep = std::max(1, std::min(rank, expected));
  return TangentSpace{Flat(js.left_vectors.leftCols(keep), point.ambient), expected, rank};
}

GenericSample sample_generic_tangent(const VarietyModel& model, Rng& rng) {
  constexpr int kAttempts = 4;  // the first draw plus three re-draws
  for (int attempt = 0; attempt < kAttempts; ++attempt) {
    Vector params = gaussian_params(model, rng);
    normalize_sphere_params(model, params);
    Point point = make_point(model, std::move(params));
    TangentSpace tangent = tangent_space(point);
    if (tangent.full_rank()) return GenericSample{std::move(point), std::move(tangent)};
  }
  throw NumericalError("could not draw a generic point on " + model.describe() +
                       ": tangent rank stays below the variety dimension");
}

Point sample_generic_point(const VarietyModel& model, Rng& rng) {
  return sample_generic_tangent(model, rng).point;
}

double coherence_at(const Point& point) {
  const TangentSpace tangent = tangent_space(point);
  if (!tangent.full_rank())
    throw NumericalError("tangent space at this point has rank " + std::to_string(tangent.numerical_rank) +
                         " < dimension " + std::to_string(tangent.expected_dim));
  return coherence_of_flat(tangent.flat);
}

// ---------------------------------------------------------------------------
// Coherence

double matrix_coherence(const Matrix& a, int r, bool symmetric) {
  if (a.size() == 0) throw std::invalid_argument("matrix_coherence: empty matrix");
  if (symmetric && (a.rows() != a.cols() || (a - a.transpose()).cwiseAbs().maxCoeff() > 1e-12 * a.cwiseAbs().maxCoeff()))
    throw std::invalid_argument("matrix_coherence: symmetric flag set on a non-symmetric matrix");
  Eigen::JacobiSVD<Matrix> svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const int rank = numerical_rank(svd.singularValues(), 1e-10);
  if (rank == 0) throw std::invalid_argument("matrix_coherence: zero matrix has no row or column span");
  if (rank > r)
    throw std::invalid_argument("matrix_coherence: numerical rank " + std::to_string(rank) + " exceeds r = " +
                                std::to_string(r));
  const Flat col_span(svd.matrixU().leftCols(rank), Vector::Zero(a.rows()));
  const double col_coh = coherence_of_flat(col_span);
  if (symmetric) return 1.0 - (1.0 - col_coh) * (1.0 - col_coh);
  const Flat row_span(svd.matrixV().leftCols(rank), Vector::Zero(a.cols()));
  return 1.0 - (1.0 - col_coh) * (1.0 - coherence_of_flat(row_span));
}

CoherenceValue coherence_formula(const VarietyModel& model) {
  return std::visit(
      Overloaded{
          [](const LinearKind& k) { return CoherenceValue{coherence_of_flat(*k.flat), true}; },
          [](const LowRankKind& k) {
            const double mn = static_cast<double>(k.rows) * k.cols;
            return CoherenceValue{k.rank * static_cast<double>(k.rows + k.cols - k.rank) / mn, true};
          },
          [](const SymLowRankKind& k) {
            const double n = k.n;
            return CoherenceValue{k.rank * (2.0 * n - k.rank) / (n * n), true};
          },
          [](const UnitGramKind& k) {
            return CoherenceValue{std::min(1.0, kDistanceCoherenceConstant * (k.rank - 1) / k.n), false};
          },
          [](const CayleyMengerKind& k) {
            return CoherenceValue{std::min(1.0, kDistanceCoherenceConstant * k.d / k.n), false};
          },
          [](const MinkowskiSumKind&) -> CoherenceValue {
            throw std::invalid_argument("coherence_formula: no closed form for Minkowski sums");
          },
      },
      model.kind());
}

CoherenceValue global_coherence(const VarietyModel& model, long samples, Rng& rng) {
  if (!std::holds_alternative<MinkowskiSumKind>(model.kind())) {
    const CoherenceValue formula = coherence_formula(model);
    if (formula.exact) return formula;
  }
  if (samples < 1) throw std::invalid_argument("global_coherence: need at least one sample");
  double best = std::numeric_limits<double>::infinity();
  for (long s = 0; s < samples; ++s) {
    const GenericSample g = sample_generic_tangent(model, rng);
    best = std::min(best, coherence_of_flat(g.tangent.flat));
  }
  return CoherenceValue{best, false, samples};
}

Point incoherent_low_rank_point(const VarietyModel& model) {
  const auto* k = std::get_if<LowRankKind>(&model.kind());
  if (k == nullptr) throw std::invalid_argument("incoherent_low_rank_point: model is not low rank");
  const Flat cols = max_incoherent_flat(k->rows, k->rank);
  const Flat rows = max_incoherent_flat(k->cols, k->rank);
  Vector params(model.param_dim());
  params << cols.basis().reshaped(), rows.basis().reshaped();
  return make_point(model, std::move(params));
}

// ---------------------------------------------------------------------------
// Distance matrices as limits of unit Gram matrices

Vector nu_h(const Vector& x, double h) {
  const double norm2 = x.squaredNorm() + h * h;
  if (norm2 == 0.0) throw std::invalid_argument("nu_h: x = 0 and h = 0 has no projection to the sphere");
  Vector out(x.size() + 1);
  out << x, h;
  return out / std::sqrt(norm2);
}

std::vector<double> tangent_limit_probe(const Matrix& config, const std::vector<double>& h_values) {
  const int n = static_cast<int>(config.rows()), d = static_cast<int>(config.cols());
  const VarietyModel distances = VarietyModel::cayley_menger(n, d);
  const VarietyModel grams = VarietyModel::unit_gram(n, d + 1);

  Vector flat_config(n * d);
  for (int i = 0; i < n; ++i) flat_config.segment(i * d, d) = config.row(i).transpose();
  const TangentSpace t_d = tangent_space(make_point(distances, flat_config));
  if (!t_d.full_rank()) throw NumericalError("tangent_limit_probe: configuration is not generic");

  std::vector<double> out;
  out.reserve(h_values.size());
  for (double h : h_values) {
    if (!(h > 0.0)) throw std::invalid_argument("tangent_limit_probe: h values must be positive");
    Vector lifted(n * (d + 1));
    for (int i = 0; i < n; ++i) lifted.segment(i * (d + 1), d + 1) = nu_h(config.row(i).transpose(), h);
    const TangentSpace t_a = tangent_space(make_point(grams, lifted));
    if (!t_a.full_rank()) throw NumericalError("tangent_limit_probe: Gram tangent rank deficient at h = " + std::to_string(h));
    out.push_back(grassmann_distance(t_a.flat, t_d.flat));
  }
  return out;
}

}  // namespace cohlab
