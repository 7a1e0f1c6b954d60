#pragma once

#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "vexmax/dyadic.hpp"
#include "vexmax/space.hpp"

namespace vexmax {

/// Maximal cubes Q with sigma(Q)^{eta-1} sum_Q |f| sigma mu > lambda.
struct CZDecomposition {
    double lambda = 0.0;
    double eta = 0.0;
    double c_cz = 1.0;
    bool root_selected = false;
    std::vector<CubeId> cubes;     // ascending
    std::vector<double> averages;  // one per selected cube
    PointFn sigma;
    PointFn f;
};

struct CZLevel {
    int k = 0;
    double height = 0.0;
    bool root_selected = false;
    std::vector<CubeId> cubes;
    std::vector<double> averages;
    std::vector<PointSet> cores;  // Q \ X_{k+1}, aligned with cubes
};

struct CZStack {
    double a = 0.0;
    double eta = 0.0;
    double c_cz = 1.0;
    double lambda0 = 0.0;  // sigma(X)^{eta-1} sum_X |f| sigma mu
    int k0 = 0;            // smallest k with a^k >= lambda0
    std::vector<CZLevel> levels;
    PointFn sigma;
    PointFn f;
};

/// max over parent-child pairs of (mu(parent)/mu(child))^{1-eta}.
double cz_constant(const DyadicGrid& grid, const QuasiMetricSpace& space, double eta);
/// Same with sigma-weighted atoms sigma * mu.
double cz_constant(const DyadicGrid& grid, const QuasiMetricSpace& space, double eta,
                   std::span<const double> sigma);
/// (C d0^{log2 C_mu})^{1-eta} with C = 1/eps_child, for comparison.
double cz_generic_bound(const DyadicGrid& grid, const QuasiMetricSpace& space, double eta);

/// Top-down selection. Throws DomainError for lambda <= 0. When the root
/// itself exceeds lambda the result is the root alone with root_selected set.
CZDecomposition cz_decompose(const DyadicGrid& grid, const QuasiMetricSpace& space, double eta,
                             std::span<const double> sigma, std::span<const double> f, double lambda);

/// Decompositions at heights a^k for k in k_range (default: k0 up to the
/// last nonempty level). Throws PreconditionError unless a > C_CZ.
/// f = 0 gives an empty stack.
CZStack cz_stack(const DyadicGrid& grid, const QuasiMetricSpace& space, double eta, std::span<const double> sigma,
                 std::span<const double> f, std::optional<double> a = std::nullopt,
                 std::optional<std::pair<int, int>> k_range = std::nullopt);

struct CZReport {
    bool pass = true;
    std::size_t checks = 0;
    std::vector<std::string> failures;
};

/// Recomputes every average from raw data and re-checks disjointness,
/// maximality, both stopping inequalities and the cover identity.
CZReport cz_verify(const DyadicGrid& grid, const QuasiMetricSpace& space, const CZDecomposition& d);

/// Per-level checks plus pairwise core disjointness and
/// (1 - (C_CZ/a)^{1/(1-eta)}) sigma(Q) <= sigma(E) <= sigma(Q).
CZReport cz_verify(const DyadicGrid& grid, const QuasiMetricSpace& space, const CZStack& s);

}  // namespace vexmax
