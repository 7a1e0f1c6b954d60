#pragma once

#include <span>

#include "vexmax/exponent.hpp"
#include "vexmax/space.hpp"

namespace vexmax {

inline constexpr double kDefaultNormTol = 1e-12;

/// rho_p(f) = sum_{x not in X_inf} |f(x)|^{p(x)} mu(x) + max_{X_inf} |f|.
double modular(const QuasiMetricSpace& space, const Exponent& p, std::span<const double> f);

/// Luxemburg norm inf{lambda > 0 : rho_p(f/lambda) <= 1}, relative tolerance `tol`.
double luxemburg_norm(const QuasiMetricSpace& space, const Exponent& p, std::span<const double> f,
                      double tol = kDefaultNormTol);

/// ||w f||_p. Throws DomainError on a nonpositive weight.
double weighted_norm(const QuasiMetricSpace& space, const Exponent& p, std::span<const double> w,
                     std::span<const double> f, double tol = kDefaultNormTol);

/// sup_{t>0} t ||w chi_{g>t}||_q, evaluated at each distinct positive value v
/// of g with the superlevel set {g >= v}. Requires g >= 0.
double weak_norm(const QuasiMetricSpace& space, const Exponent& q, std::span<const double> w,
                 std::span<const double> g, double tol = kDefaultNormTol);

/// ||w chi_S||_p for a subset S (the workhorse of the weight sweeps).
double set_norm(const QuasiMetricSpace& space, const Exponent& p, std::span<const double> w,
                std::span<const PointId> subset, double tol = kDefaultNormTol);

namespace detail {

/// Solves sum_i (|f_i|/lambda)^{p_i} m_i + max_{p_j = inf} |f_j| / lambda = level
/// for lambda over gathered terms. Returns 0 when every f_i is 0.
///
/// In L = log(lambda) the left side is a convex, strictly decreasing sum of
/// exponentials, so Newton steps taken from the left of the root never
/// overshoot; each step is kept inside a bisection bracket.
double solve_modular_level(std::span<const double> mass, std::span<const double> p,
                           std::span<const double> f, double level, double tol);

}  // namespace detail

}  // namespace vexmax
