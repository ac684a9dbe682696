#pragma once

#include "nlch/potential.hpp"

namespace nlch {

/// Node-local convex energy of one implicit step,
///
///   e(phi) = (m / eps) psi1(phi) + d phi^2 / 2 + c phi,   phi >= 0,
///
/// with d = eps J1_i and c = (m / eps) psi2'(phi_prev_i) - eps (J2 phi_prev)_i.
/// With lambda > 0 the regularised psi1_lambda replaces psi1.
class PointwiseEnergy {
public:
    explicit PointwiseEnergy(const PotentialParams& pot, double lambda = 0.0);

    bool regularized() const noexcept { return lambda_ > 0.0; }
    double lambda() const noexcept { return lambda_; }

    double value(double phi, double m, double d, double c) const;
    double slope(double phi, double m, double d, double c) const;
    double curvature(double phi, double m, double d) const;

    /// argmin over phi >= 0 of e(phi) - s phi. Strictly below 1 for the
    /// unregularised energy. Closed form.
    double minimizer(double s, double m, double d, double c) const;

private:
    PotentialParams pot_;
    double lambda_;
};

}  // namespace nlch
