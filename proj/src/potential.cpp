#include "nlch/potential.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace nlch {

void PotentialParams::validate() const {
    if (!(phibar > 0.0 && phibar < 1.0)) throw std::invalid_argument("phibar must lie in (0, 1)");
    if (!(epsilon > 0.0)) throw std::invalid_argument("epsilon must be positive");
}

void MobilityParams::validate() const {
    if (!(alpha >= 0.0)) throw std::invalid_argument("alpha must be >= 0");
    if (!(friction > 0.0)) throw std::invalid_argument("friction M must be positive");
}

namespace {

void require_below_one(double r, const char* fn) {
    if (!(r < 1.0)) {
        throw std::domain_error(std::string(fn) + ": argument " + std::to_string(r) + " >= 1");
    }
}

}  // namespace

double psi1(double r, const PotentialParams& p) {
    require_below_one(r, "psi1");
    return -(1.0 - p.phibar) * std::log1p(-r);
}

double psi1_prime(double r, const PotentialParams& p) {
    require_below_one(r, "psi1_prime");
    return (1.0 - p.phibar) / (1.0 - r);
}

double psi1_second(double r, const PotentialParams& p) {
    require_below_one(r, "psi1_second");
    const double u = 1.0 - r;
    return (1.0 - p.phibar) / (u * u);
}

namespace {

double psi2_cubic(double r, double c) { return -r * r * r / 3.0 - c * (0.5 * r * r + r); }
double psi2_cubic_prime(double r, double c) { return -r * r - c * r - c; }
double psi2_cubic_second(double r, double c) { return -2.0 * r - c; }

}  // namespace

double psi2(double r, const PotentialParams& p) {
    const double c = 1.0 - p.phibar;
    if (r < 1.0) return psi2_cubic(r, c);
    const double d = r - 1.0;
    return psi2_cubic(1.0, c) + psi2_cubic_prime(1.0, c) * d + 0.5 * psi2_cubic_second(1.0, c) * d * d;
}

double psi2_prime(double r, const PotentialParams& p) {
    const double c = 1.0 - p.phibar;
    if (r < 1.0) return psi2_cubic_prime(r, c);
    return psi2_cubic_prime(1.0, c) + psi2_cubic_second(1.0, c) * (r - 1.0);
}

double psi2_second(double r, const PotentialParams& p) {
    const double c = 1.0 - p.phibar;
    return psi2_cubic_second(std::min(r, 1.0), c);
}

double psi(double r, const PotentialParams& p) { return psi1(r, p) + psi2(r, p); }

ValueAndSlope psi1_lambda(double r, double lambda, const PotentialParams& p) {
    if (!(lambda > 0.0 && lambda < 1.0)) throw std::invalid_argument("lambda must lie in (0, 1)");
    if (r < 1.0 - lambda) return {psi1(r, p), psi1_prime(r, p)};
    const double c = 1.0 - p.phibar;
    const double u = 1.0 - r;
    const double value = -c * std::log(lambda) + 1.5 * c - 2.0 / lambda * c * u + c / (2.0 * lambda * lambda) * u * u;
    const double slope = 2.0 / lambda * c - c / (lambda * lambda) * u;
    return {value, slope};
}

double psi1_lambda_second(double r, double lambda, const PotentialParams& p) {
    if (r < 1.0 - lambda) return psi1_second(r, p);
    return (1.0 - p.phibar) / (lambda * lambda);
}

double mobility(double r, const MobilityParams& m) {
    const double x = std::clamp(r, 0.0, 1.0);
    const double u = 1.0 - x;
    return std::pow(x, m.alpha) * u * u / m.friction;
}

double convexity_margin(const PotentialParams& p) {
    const double c = 1.0 - p.phibar;
    return (2.0 + c - 3.0 * std::cbrt(c)) / p.epsilon;
}

double separation_threshold(const PotentialParams& p) { return (1.0 - p.phibar) / p.epsilon; }

}  // namespace nlch
