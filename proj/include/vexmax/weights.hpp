#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "vexmax/dyadic.hpp"
#include "vexmax/exponent.hpp"
#include "vexmax/norm.hpp"
#include "vexmax/space.hpp"

namespace vexmax {

struct ApqResult {
    double value = 0.0;
    std::size_t witness = 0;  // ball index, or CubeId for the dyadic version
};

/// mu(S)^{eta-1} ||w1 chi_S||_{e1} ||w2 chi_S||_{e2}. When both exponents are
/// constant on S the averaged closed form
///   (avg_S w1^{e1})^{1/e1} (avg_S w2^{e2})^{1/e2} mu(S)^{eta-1+1/e1+1/e2}
/// is used, with the last exponent snapped to 0 below 1e-12.
double ball_factor(const QuasiMetricSpace& space, double eta, const Exponent& e1, std::span<const double> w1,
                   const Exponent& e2, std::span<const double> w2, std::span<const PointId> members,
                   double measure, double tol = kDefaultNormTol);

/// [w]_{A_{p,q}} over the enumerated balls, with the argmax ball.
ApqResult apq_constant(const QuasiMetricSpace& space, const Exponent& p, const Exponent& q,
                       std::span<const double> w, double tol = kDefaultNormTol);

/// Same supremum over the cubes of a grid.
ApqResult apq_dyadic_constant(const DyadicGrid& grid, const QuasiMetricSpace& space, const Exponent& p,
                              const Exponent& q, std::span<const double> w, double tol = kDefaultNormTol);

/// ([w]_{A_{p,q}}, [w^{-1}]_{A_{q',p'}}). Both p and q must be >= 1.
std::pair<double, double> dual_constants(const QuasiMetricSpace& space, const Exponent& p, const Exponent& q,
                                         std::span<const double> w, double tol = kDefaultNormTol);

struct SpecializedConstants {
    double apq = 0.0;             // [w]_{A_{p,q}}
    double a_q = 0.0;             // [w]_{A_{q}}, the eta = 0 pair (q, q)
    double a_pprime_dual = 0.0;   // [w^{-1}]_{A_{p'}}
    std::optional<double> classical_apq;  // sup (avg w^q)^{1/q} (avg w^{-p'})^{1/p'} mu^{eta-1+1/q+1/p'}
    std::optional<double> classical_aq;   // sup (avg w^q)(avg w^{-q'})^{q-1}
};
SpecializedConstants specialized_constants(const QuasiMetricSpace& space, const Exponent& p, const Exponent& q,
                                           std::span<const double> w, double tol = kDefaultNormTol);

/// One fitted pair: the smallest constant making the condition hold with the
/// given exponent over the sampled (E, B).
struct AInftyFit {
    double exponent = 0.0;
    double constant = 0.0;
};

struct AInftyReport {
    double epsilon = 0.0, c2 = 0.0;  // mu(E)/mu(B) <= c2 (nu(E)/nu(B))^epsilon
    double delta = 0.0, c1 = 0.0;    // nu(E)/nu(B) <= c1 (mu(E)/mu(B))^delta
    double doubling_of_weight = 0.0;
    std::vector<AInftyFit> cond2;    // one entry per epsilon in {1, 1/2, 1/4, 1/8}
    std::vector<AInftyFit> cond3;    // one entry per delta
    std::size_t subsets_checked = 0;
    [[nodiscard]] bool finite() const;
};

inline constexpr std::size_t kExhaustiveSubsetLimit = 12;
inline constexpr std::size_t kSampledSubsets = 256;

/// A_infty fits for the measure with the given atoms against mu. Subsets of a
/// ball are exhaustive up to 12 members, else 256 seeded random subsets.
/// The best pair per condition is the smallest constant (ties: larger exponent).
AInftyReport a_infty_diagnostics(const QuasiMetricSpace& space, std::span<const double> atoms,
                                 std::uint64_t seed = 0);

/// Worst ratio (mu(E)/mu(B))^{1-eta} / ([w] ||w chi_E||_q / ||w chi_B||_q)
/// over balls B and nonempty E in B; the bound is 16. Subsets are exhaustive
/// up to `exhaustive_limit` members, else `samples` seeded random subsets.
struct SubsetBoundReport {
    double apq = 0.0;
    double worst_ratio = 0.0;
    std::size_t checked = 0;
    std::size_t violations = 0;  // ratio > 16
    std::size_t ball = 0;
    PointSet subset;
};
inline constexpr double kSubsetBound = 16.0;
SubsetBoundReport subset_bound_check(const QuasiMetricSpace& space, const Exponent& p, const Exponent& q,
                                     std::span<const double> w, std::uint64_t seed = 0,
                                     std::size_t exhaustive_limit = kExhaustiveSubsetLimit,
                                     std::size_t samples = kSampledSubsets, double tol = kDefaultNormTol);

struct WeightRecord {
    PointFn w;
    PointFn W_measure;      // w^q mass
    PointFn sigma_measure;  // w^{-p'} mass, w^{-1} mass where p' = inf
};

/// Throws DomainError naming the first atom that is zero or not finite.
WeightRecord derived_measures(const QuasiMetricSpace& space, const Exponent& p, const Exponent& q,
                              std::span<const double> w);

/// Necessity test functions on a ball: for R in {4, 16, inf} the function
/// w^{-p'} lambda^{1-p'} on B_R = {x in B : p'(x) < R} with lambda solving
/// sum_{B_R} (w^{-1}/lambda)^{p'} mu = 1/3; then indicators of B, of the
/// atoms with least and largest w, and of {x in B : w(x) <= median}.
/// Duplicates are dropped.
std::vector<PointFn> extremal_test_functions(const QuasiMetricSpace& space, const Exponent& p,
                                             std::span<const double> w, std::span<const PointId> ball_members);

}  // namespace vexmax
