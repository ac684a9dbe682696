#include "nlch/pointwise.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace nlch {

PointwiseEnergy::PointwiseEnergy(const PotentialParams& pot, double lambda) : pot_(pot), lambda_(lambda) {
    if (lambda < 0.0 || lambda >= 1.0) throw std::invalid_argument("PointwiseEnergy: lambda must lie in [0, 1)");
}

double PointwiseEnergy::value(double phi, double m, double d, double c) const {
    const double convex = regularized() ? psi1_lambda(phi, lambda_, pot_).value : psi1(phi, pot_);
    return m / pot_.epsilon * convex + 0.5 * d * phi * phi + c * phi;
}

double PointwiseEnergy::slope(double phi, double m, double d, double c) const {
    const double convex = regularized() ? psi1_lambda(phi, lambda_, pot_).slope : psi1_prime(phi, pot_);
    return m / pot_.epsilon * convex + d * phi + c;
}

double PointwiseEnergy::curvature(double phi, double m, double d) const {
    const double convex = regularized() ? psi1_lambda_second(phi, lambda_, pot_) : psi1_second(phi, pot_);
    return m / pot_.epsilon * convex + d;
}

double PointwiseEnergy::minimizer(double s, double m, double d, double c) const {
    // Solve a / (1 - phi) + d phi = r on the logarithmic branch, where
    // a = m (1 - phibar) / eps is the slope of the convex part at zero.
    const double a = m * (1.0 - pot_.phibar) / pot_.epsilon;
    const double r = s - c;
    if (r <= a) return 0.0;

    if (regularized()) {
        const double knee = 1.0 - lambda_;
        const double slope_at_knee = a / lambda_ + d * knee;
        if (r >= slope_at_knee) {
            const double l2 = lambda_ * lambda_;
            return (r - a * (2.0 / lambda_ - 1.0 / l2)) / (a / l2 + d);
        }
    }

    // Smaller root of d phi^2 - (d + r) phi + (r - a) = 0, written without
    // cancellation.
    const double disc = std::sqrt((r - d) * (r - d) + 4.0 * a * d);
    double phi = 2.0 * (r - a) / ((d + r) + disc);
    if (!regularized() && phi >= 1.0) phi = std::nextafter(1.0, 0.0);
    return phi;
}

}  // namespace nlch
