#include "cohlab/identify.hpp"

#include <Eigen/Eigenvalues>

#include "cohlab/error.hpp"

namespace cohlab {

namespace {

const TangentSpace& require_full_rank(const TangentSpace& tangent) {
  if (!tangent.full_rank())
    throw NumericalError("tangent space is rank deficient (rank " + std::to_string(tangent.numerical_rank) +
                         " < dimension " + std::to_string(tangent.expected_dim) + "); point is not generic");
  return tangent;
}

TangentSpace checked_tangent(const Point& point) {
  TangentSpace t = tangent_space(point);
  require_full_rank(t);
  return t;
}

}  // namespace

IdentifyVerdict rank_verdict(const Matrix& projected, int tangent_dim, double tol) {
  if (!(tol > 0.0)) throw std::invalid_argument("rank tolerance must be positive");
  IdentifyVerdict v{false, tangent_dim, 0, 0.0, 0.0};
  if (projected.rows() == 0 || projected.cols() == 0) return v;
  const Vector sv = Eigen::JacobiSVD<Matrix>(projected).singularValues();
  v.tolerance_used = tol * sv[0];
  int rank = 0;
  while (rank < sv.size() && sv[rank] > v.tolerance_used) ++rank;
  v.projected_rank = rank;
  v.smallest_retained_singular_value = rank > 0 ? sv[rank - 1] : 0.0;
  v.identifiable = rank == tangent_dim;
  return v;
}

IdentifyVerdict identifiable_mask(const TangentSpace& tangent, const SampleMask& mask, double tol) {
  require_full_rank(tangent);
  if (mask.ambient_dim() != tangent.flat.ambient_dim())
    throw std::invalid_argument("identifiable_mask: mask ambient dimension differs from the model's");
  return rank_verdict(project_rows(mask, tangent.flat.basis()), tangent.expected_dim, tol);
}

IdentifyVerdict identifiable_mask(const Point& point, const SampleMask& mask, double tol) {
  return identifiable_mask(checked_tangent(point), mask, tol);
}

IdentifyVerdict identifiable_linear(const TangentSpace& tangent, const LinearMeasurement& meas, double tol) {
  require_full_rank(tangent);
  if (meas.matrix.cols() != tangent.flat.ambient_dim())
    throw std::invalid_argument("identifiable_linear: measurement width differs from ambient dimension");
  return rank_verdict(meas.matrix * tangent.flat.basis(), tangent.expected_dim, tol);
}

IdentifyVerdict identifiable_linear(const Point& point, const LinearMeasurement& meas, double tol) {
  return identifiable_linear(checked_tangent(point), meas, tol);
}

double contraction_norm(const Flat& tangent, const SampleMask& mask, double rho) {
  if (!(rho > 0.0 && rho <= 1.0)) throw std::invalid_argument("contraction_norm: need 0 < rho <= 1");
  if (mask.ambient_dim() != tangent.ambient_dim())
    throw std::invalid_argument("contraction_norm: mask ambient dimension differs from the flat's");
  const Matrix sampled = project_rows(mask, tangent.basis());
  Matrix op = (sampled.transpose() * sampled) / rho;
  op -= Matrix::Identity(tangent.dim(), tangent.dim());
  const Vector eig = Eigen::SelfAdjointEigenSolver<Matrix>(op, Eigen::EigenvaluesOnly).eigenvalues();
  return eig.cwiseAbs().maxCoeff();
}

double contraction_norm(const Point& point, const SampleMask& mask, double rho) {
  return contraction_norm(checked_tangent(point).flat, mask, rho);
}

}  // namespace cohlab
