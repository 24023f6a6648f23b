#pragma once

#include "cohlab/sampling.hpp"
#include "cohlab/variety.hpp"

namespace cohlab {

/// Outcome of a generic finite-identifiability test: the measurement's
/// differential restricted to the tangent space is injective exactly when
/// `projected_rank == tangent_dim`. This decides whether the fiber through a
/// generic point is finite, not whether it is a single point.
struct IdentifyVerdict {
  bool identifiable;
  int tangent_dim;
  int projected_rank;
  /// Smallest singular value counted in projected_rank (0 when the rank is 0).
  double smallest_retained_singular_value;
  /// Absolute cutoff applied, tol * sigma_max of the projected basis.
  double tolerance_used;
};

inline constexpr double kDefaultRankTol = 1e-8;

/// Numerical rank of `projected` (rows = measurements, cols = tangent
/// directions) against tol * sigma_max.
IdentifyVerdict rank_verdict(const Matrix& projected, int tangent_dim, double tol);

/// Restricts the orthonormal tangent basis to the observed coordinates.
/// Throws NumericalError when the tangent is rank deficient.
IdentifyVerdict identifiable_mask(const TangentSpace& tangent, const SampleMask& mask,
                                  double tol = kDefaultRankTol);
IdentifyVerdict identifiable_mask(const Point& point, const SampleMask& mask, double tol = kDefaultRankTol);

/// Rank of meas.matrix * tangent basis.
IdentifyVerdict identifiable_linear(const TangentSpace& tangent, const LinearMeasurement& meas,
                                    double tol = kDefaultRankTol);
IdentifyVerdict identifiable_linear(const Point& point, const LinearMeasurement& meas,
                                    double tol = kDefaultRankTol);

/// Spectral norm of sum_i (eps_i / rho - 1) b_i b_i^T in tangent coordinates,
/// where b_i are the rows of the orthonormal tangent basis. Below 1 the
/// rescaled sampling operator is a contraction away from the identity, which
/// forces the restricted tangent map to be injective.
double contraction_norm(const Flat& tangent, const SampleMask& mask, double rho);
double contraction_norm(const Point& point, const SampleMask& mask, double rho);

}  // namespace cohlab
