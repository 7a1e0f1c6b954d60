#pragma once

#include <span>
#include <vector>

#include "vexmax/dyadic.hpp"
#include "vexmax/exponent.hpp"
#include "vexmax/space.hpp"

namespace vexmax {

enum class WitnessKind { Ball, Cube };

/// Per-point maximal values with the ball (index into space.balls()) or cube
/// (CubeId) attaining each one.
struct MaximalResult {
    std::vector<double> values;
    std::vector<std::size_t> witness;
    WitnessKind kind = WitnessKind::Ball;
};

/// M_eta f(x) = max over balls B containing x of mu(B)^{eta-1} sum_B |f| mu.
/// Every average is computed as pow(mu(B), eta-1) * S(B) where S(B) is the
/// correctly rounded sum of |f(y)| mu(y), so values are reproducible exactly.
MaximalResult fractional_maximal(const QuasiMetricSpace& space, double eta, std::span<const double> f);

/// sigma(Q)^{eta-1} sum_Q |f| sigma mu for every cube, indexed by CubeId.
std::vector<double> cube_averages(const DyadicGrid& grid, const QuasiMetricSpace& space, double eta,
                                  std::span<const double> sigma, std::span<const double> f);

MaximalResult dyadic_fractional_maximal(const DyadicGrid& grid, const QuasiMetricSpace& space, double eta,
                                        std::span<const double> f);

/// M^D_{eta,sigma}; throws DomainError for a nonpositive sigma.
MaximalResult weighted_dyadic_maximal(const DyadicGrid& grid, const QuasiMetricSpace& space, double eta,
                                      std::span<const double> sigma, std::span<const double> f);

/// {x : values(x) > lambda}.
PointSet superlevel_set(const MaximalResult& result, double lambda);

struct OperatorRatios {
    double strong_ratio = 0.0;
    double weak_ratio = 0.0;
    std::size_t strong_witness = 0;  // index into the test family
    std::size_t weak_witness = 0;
};

/// max over test functions of ||w M_eta f||_q / ||w f||_p and the weak analogue.
/// Zero functions are skipped; throws PreconditionError if nothing is left or
/// if eta disagrees with the (p, q) relation.
OperatorRatios operator_norm_estimate(const QuasiMetricSpace& space, const Exponent& p, const Exponent& q,
                                      std::span<const double> w, double eta,
                                      const std::vector<PointFn>& test_family, double tol = 1e-12);

/// Pointwise c_low, c_high with c_low M f <= sum_i M^{D_i} f <= c_high N M f
/// over the given functions.
struct DominationConstants {
    double c_low = 0.0;
    double c_high = 0.0;
};
DominationConstants domination_constants(const QuasiMetricSpace& space, const std::vector<DyadicGrid>& family,
                                         double eta, const std::vector<PointFn>& functions);

}  // namespace vexmax
