#pragma once

// Single-well Lennard-Jones-type potential psi = psi1 + psi2, its convex
// (singular) / concave splitting, the lambda-regularised convex part, and the
// degenerate mobility.

namespace nlch {

struct PotentialParams {
    double phibar = 0.6;    // equilibrium fraction, in (0, 1)
    double epsilon = 0.014; // interface width
    void validate() const;
};

struct MobilityParams {
    double alpha = 1.0;     // degeneracy exponent, >= 0
    double friction = 1.0;  // M > 0
    void validate() const;
};

// Convex part -(1 - phibar) log(1 - r). Throws std::domain_error for r >= 1.
double psi1(double r, const PotentialParams& p);
double psi1_prime(double r, const PotentialParams& p);
double psi1_second(double r, const PotentialParams& p);

// Concave part -r^3/3 - (1 - phibar)(r^2/2 + r), continued for r >= 1 by its
// second-order Taylor polynomial about r = 1.
double psi2(double r, const PotentialParams& p);
double psi2_prime(double r, const PotentialParams& p);
double psi2_second(double r, const PotentialParams& p);

/// psi1 + psi2.
double psi(double r, const PotentialParams& p);

struct ValueAndSlope {
    double value = 0.0;
    double slope = 0.0;
};

/// psi1 for r < 1 - lambda, quadratic continuation (matching value, slope and
/// curvature at 1 - lambda) above. Defined on all of R.
ValueAndSlope psi1_lambda(double r, double lambda, const PotentialParams& p);
double psi1_lambda_second(double r, double lambda, const PotentialParams& p);

/// r^alpha (1 - r)^2 / M with r clamped to [0, 1].
double mobility(double r, const MobilityParams& m);

/// Lower bound that eps * inf (J*1) must exceed for the mixing entropy to be
/// strictly convex: (2 + (1 - phibar) - 3 (1 - phibar)^(1/3)) / eps.
double convexity_margin(const PotentialParams& p);

/// (1 - phibar) / eps, the bound behind strict separation.
double separation_threshold(const PotentialParams& p);

}  // namespace nlch
