#pragma once

#include <cmath>
#include <stdexcept>

#include "selfsim/errors.hpp"

namespace selfsim {

/// The two linear regimes of the switching nonlinearity beta(r) = 2r - r+.
/// Where the solution is positive the diffusion runs at unit speed
/// (lambda = 1); where it is negative the time derivative carries the
/// factor 2 (lambda = 2).
enum class Branch { PositiveRegion, NegativeRegion };

/// Sign of a profile at the origin (or of the tail at infinity).
enum class Sign { Plus, Minus };

constexpr double lambda_of(Branch b) noexcept {
    return b == Branch::PositiveRegion ? 1.0 : 2.0;
}

/// Diffusion multiplier gamma = 1/lambda for the quasilinear form.
constexpr double gamma_of(Branch b) noexcept {
    return b == Branch::PositiveRegion ? 1.0 : 0.5;
}

constexpr Branch opposite(Branch b) noexcept {
    return b == Branch::PositiveRegion ? Branch::NegativeRegion
                                       : Branch::PositiveRegion;
}

constexpr Branch branch_of_sign(Sign s) noexcept {
    return s == Sign::Plus ? Branch::PositiveRegion : Branch::NegativeRegion;
}

constexpr Sign sign_of_branch(Branch b) noexcept {
    return b == Branch::PositiveRegion ? Sign::Plus : Sign::Minus;
}

constexpr Sign flip(Sign s) noexcept {
    return s == Sign::Plus ? Sign::Minus : Sign::Plus;
}

constexpr double signed_unit(Sign s) noexcept {
    return s == Sign::Plus ? 1.0 : -1.0;
}

/// Branch selected by the sign of a value. Exact zeros are not a region and
/// must be handled by the caller (they are the switching points).
inline Branch branch_of(double value) {
    if (value == 0.0)
        throw std::invalid_argument("branch_of: value is exactly zero");
    return value > 0.0 ? Branch::PositiveRegion : Branch::NegativeRegion;
}

constexpr const char* to_string(Branch b) noexcept {
    return b == Branch::PositiveRegion ? "positive" : "negative";
}

constexpr const char* to_string(Sign s) noexcept {
    return s == Sign::Plus ? "plus" : "minus";
}

/// Problem data shared by every operation: space dimension and homogeneity
/// exponent alpha (self-similar scaling w = (-t)^{alpha/2} f(|x|/sqrt(-t))).
struct ProblemParams {
    int dimension = 1;
    double alpha = 2.0;

    void validate() const {
        if (dimension < 1)
            throw std::invalid_argument("ProblemParams: dimension must be >= 1");
        if (!(alpha > 0.0) || !std::isfinite(alpha))
            throw std::invalid_argument("ProblemParams: alpha must be positive and finite");
    }
};

} // namespace selfsim
