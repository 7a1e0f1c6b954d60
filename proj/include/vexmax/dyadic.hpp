#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "vexmax/space.hpp"

namespace vexmax {

using CubeId = std::size_t;

struct DyadicCube {
    CubeId id = 0;
    int generation = 0;
    PointId center = 0;
    PointSet members;
    std::optional<CubeId> parent;
    std::vector<CubeId> children;
    double measure = 0.0;
};

/// Nested partitions of a finite space. Generation 0 is the single cube X;
/// generation k has scale base_scale * d0^{-k}; the finest generation is all
/// singletons. The stored constants are claims that verify_grid re-checks:
///
///   B(center, c_inner * s_k) subset Q subset B(center, c_d * s_k)
///   mu(child) >= eps_child * mu(parent)
class DyadicGrid {
public:
    /// Assembles a grid from explicit generations of (center, members) and
    /// computes realized constants. Parents are assigned by containment of the
    /// center; the result may violate the grid properties (verify_grid
    /// reports which).
    struct CubeSpec {
        PointId center;
        PointSet members;
    };
    DyadicGrid(const QuasiMetricSpace& space, double d0, double base_scale,
               std::vector<std::vector<CubeSpec>> generations);

    [[nodiscard]] double d0() const { return d0_; }
    [[nodiscard]] double base_scale() const { return base_scale_; }
    [[nodiscard]] double scale(int k) const;
    [[nodiscard]] int k_min() const { return 0; }
    [[nodiscard]] int k_max() const { return static_cast<int>(by_generation_.size()) - 1; }
    [[nodiscard]] std::size_t num_points() const { return num_points_; }

    [[nodiscard]] const std::vector<DyadicCube>& cubes() const { return cubes_; }
    [[nodiscard]] const DyadicCube& cube(CubeId id) const { return cubes_.at(id); }
    [[nodiscard]] const std::vector<CubeId>& generation(int k) const;
    [[nodiscard]] CubeId root() const { return by_generation_.front().front(); }

    /// Unique generation-k cube containing x. Throws PreconditionError for k
    /// out of range.
    [[nodiscard]] CubeId cube_at(PointId x, int k) const;

    [[nodiscard]] double c_d() const { return c_d_; }
    [[nodiscard]] double c_inner() const { return c_inner_; }
    [[nodiscard]] double eps_child() const { return eps_child_; }
    /// Overrides the claimed constants (used to build deliberately bad grids).
    void set_claims(double c_d, double c_inner, double eps_child);

private:
    double d0_ = 2.0;
    double base_scale_ = 1.0;
    std::size_t num_points_ = 0;
    std::vector<DyadicCube> cubes_;
    std::vector<std::vector<CubeId>> by_generation_;
    std::vector<std::vector<CubeId>> cube_of_;  // [generation][point]
    double c_d_ = 1.0;
    double c_inner_ = 1.0;
    double eps_child_ = 1.0;
};

/// Greedy nested nets: N_0 is one point, N_k extends N_{k-1} to a maximal
/// s_k-separated set scanning points in priority order. Clusters are built
/// bottom-up: each generation-(k+1) cube joins the generation-k center
/// nearest to its own center (ties: lower priority rank).
///
/// Without a seed the priority order is the point index order (the
/// "aligned" grid); with a seed it is a seeded shuffle.
DyadicGrid build_grid(const QuasiMetricSpace& space, double d0 = 2.0,
                      std::optional<std::uint64_t> seed = std::nullopt);

struct PropertyCheck {
    bool pass = true;
    std::string witness;
};

struct GridReport {
    PropertyCheck nesting;        // (1) any two cubes are disjoint or nested
    PropertyCheck partition;      // (2) each generation partitions X
    PropertyCheck parent_child;   // (3) unique parent above, some child below
    PropertyCheck child_mass;     // (4) mu(child) >= eps * mu(parent)
    PropertyCheck sandwich;       // (5) inner and outer ball inclusions
    double c_d = 0.0;
    double c_inner = 0.0;
    double eps_child = 0.0;
    [[nodiscard]] bool all_pass() const {
        return nesting.pass && partition.pass && parent_child.pass && child_mass.pass && sandwich.pass;
    }
};

GridReport verify_grid(const DyadicGrid& grid, const QuasiMetricSpace& space);

inline constexpr std::size_t kDefaultGridCount = 6;

/// n_grids grids with independent seeds derived from `seed`.
std::vector<DyadicGrid> build_grid_family(const QuasiMetricSpace& space, std::size_t n_grids,
                                          std::uint64_t seed, double d0 = 2.0);

/// K = max over balls B of min over grids and cubes Q containing B of mu(Q)/mu(B).
double family_cover_constant(const QuasiMetricSpace& space, const std::vector<DyadicGrid>& family);

/// max over parent-child pairs of (atoms(parent)/atoms(child))^{1-eta}.
double parent_child_jump(const DyadicGrid& grid, std::span<const double> atoms, double eta);

}  // namespace vexmax
