#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace vexmax {

using PointId = std::size_t;
using PointSet = std::vector<PointId>;   // sorted ascending, no duplicates
using PointFn = std::vector<double>;     // one value per point

/// B(center, radius) = {y : d(center, y) < radius}.
struct Ball {
    PointId center = 0;
    double radius = 0.0;
    PointSet members;
    double measure = 0.0;
};

/// Compact handle for a ball: the first `count` points of the center's
/// distance order. Every ball of a finite space has this form.
struct BallRef {
    PointId center = 0;
    std::size_t count = 0;
    double radius = 0.0;
    double measure = 0.0;
};

/// Finite quasi-metric measure space with certified homogeneous-type
/// constants. Immutable after construction.
///
/// The constructor also enumerates the distinct balls: for each center the
/// candidate radii are the distinct positive distances from it plus one value
/// above the diameter, and balls are deduplicated by member set.
class QuasiMetricSpace {
public:
    /// `dist` is row-major n x n. Throws ValidationError on asymmetric or
    /// non-positive off-diagonal entries, nonzero diagonal, or mass <= 0.
    QuasiMetricSpace(std::vector<double> dist, std::vector<double> mass);

    [[nodiscard]] std::size_t size() const { return n_; }
    [[nodiscard]] double dist(PointId x, PointId y) const { return dist_[x * n_ + y]; }
    [[nodiscard]] std::span<const double> dist_row(PointId x) const {
        return {dist_.data() + x * n_, n_};
    }
    [[nodiscard]] std::span<const double> mass() const { return mass_; }
    [[nodiscard]] double mass(PointId x) const { return mass_[x]; }
    [[nodiscard]] double total_mass() const { return total_mass_; }
    [[nodiscard]] double a0() const { return a0_; }
    [[nodiscard]] double c_mu() const { return c_mu_; }
    [[nodiscard]] double diameter() const { return diameter_; }
    [[nodiscard]] double min_distance() const { return min_distance_; }
    /// Radius strictly above the diameter; every ball of this radius is X.
    [[nodiscard]] double super_radius() const { return super_radius_; }

    /// Points ordered by (distance from c, id).
    [[nodiscard]] std::span<const PointId> order(PointId c) const {
        return {order_.data() + c * n_, n_};
    }
    /// Position of y in order(c).
    [[nodiscard]] std::size_t rank(PointId c, PointId y) const { return rank_[c * n_ + y]; }

    /// Candidate radii for center c (ascending) and the matching prefix
    /// lengths of order(c).
    [[nodiscard]] std::span<const double> candidate_radii(PointId c) const {
        return {radii_.data() + radii_offset_[c], radii_offset_[c + 1] - radii_offset_[c]};
    }
    [[nodiscard]] std::span<const std::size_t> candidate_counts(PointId c) const {
        return {counts_.data() + radii_offset_[c], radii_offset_[c + 1] - radii_offset_[c]};
    }
    /// Canonical ball index for (center c, j-th candidate radius).
    [[nodiscard]] std::size_t ball_index(PointId c, std::size_t j) const {
        return ball_index_[radii_offset_[c] + j];
    }

    /// Distinct balls in deterministic order (center index, then radius).
    [[nodiscard]] std::span<const BallRef> balls() const { return balls_; }
    [[nodiscard]] bool contains(const BallRef& b, PointId y) const {
        return rank(b.center, y) < b.count;
    }
    [[nodiscard]] PointSet members(const BallRef& b) const;
    [[nodiscard]] Ball materialize(const BallRef& b) const;

private:
    std::size_t n_ = 0;
    std::vector<double> dist_;
    std::vector<double> mass_;
    double total_mass_ = 0.0;
    double a0_ = 1.0;
    double c_mu_ = 1.0;
    double diameter_ = 0.0;
    double min_distance_ = 0.0;
    double super_radius_ = 1.0;
    std::vector<PointId> order_;
    std::vector<std::size_t> rank_;
    std::vector<std::size_t> radii_offset_;
    std::vector<double> radii_;
    std::vector<std::size_t> counts_;
    std::vector<std::size_t> ball_index_;
    std::vector<BallRef> balls_;
};

QuasiMetricSpace build_space(std::vector<double> dist, std::vector<double> mass);

/// Space from points in R^d with the Euclidean metric; `coords` is row-major.
QuasiMetricSpace euclidean_space(std::span<const double> coords, std::size_t dim,
                                 std::vector<double> mass);

/// Throws ValidationError for an unknown center or negative radius.
Ball ball(const QuasiMetricSpace& space, PointId center, double radius);

std::vector<Ball> enumerate_balls(const QuasiMetricSpace& space);

/// max over centers and candidate radii of mu(B(x,2r)) / mu(B(x,r)), rounded
/// up so that mu(B(x,2r)) <= c * mu(B(x,r)) holds in floating point.
double doubling_constant(const QuasiMetricSpace& space);

/// Doubling constant of the measure with the given atoms on the same metric.
double doubling_constant(const QuasiMetricSpace& space, std::span<const double> atoms);

/// Smallest a0 >= 1 with d(x,y) <= a0 (d(x,z) + d(z,y)) over all triples.
double quasi_triangle_constant(std::span<const double> dist, std::size_t n);

/// Largest C with mu(B(y,r)) / mu(B(x,R)) >= C (r/R)^{log2 C_mu} over
/// y in B(x,R) and candidate radii r < R (r from y's set, R from x's set).
/// Returns 1 when there is no such quadruple.
double lower_mass_bound_report(const QuasiMetricSpace& space);

/// Measure of a set of points under the given atoms, correctly rounded.
double set_measure(std::span<const double> atoms, std::span<const PointId> set);

}  // namespace vexmax
