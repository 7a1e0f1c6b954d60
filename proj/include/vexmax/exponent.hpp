#pragma once

#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "vexmax/space.hpp"

namespace vexmax {

/// Exponent classes: P (1 < p_- <= p_+ < inf), P1 (1 <= p_-), P0 (0 < p_-).
enum class ExponentClass { P, P1, P0 };

/// Per-point exponent p(.) with values in (0, inf]. The value +inf marks the
/// set X_inf and only arises as a conjugate of p = 1.
///
/// The conjugate p' is computed once at construction and stored alongside,
/// so conjugate() swaps the two arrays and is exactly involutive.
class Exponent {
public:
    /// Validates every value is > 0 (inf allowed). `p_inf` defaults to the
    /// value at point 0.
    explicit Exponent(std::vector<double> values, std::optional<double> p_inf = std::nullopt);

    /// Finite-valued exponent that must belong to `cls`.
    static Exponent primal(std::vector<double> values, ExponentClass cls = ExponentClass::P1,
                           std::optional<double> p_inf = std::nullopt);
    static Exponent constant(std::size_t n, double value);

    [[nodiscard]] std::size_t size() const { return values_.size(); }
    [[nodiscard]] double operator[](PointId x) const { return values_[x]; }
    [[nodiscard]] std::span<const double> values() const { return values_; }
    [[nodiscard]] double p_minus() const { return p_minus_; }
    [[nodiscard]] double p_plus() const { return p_plus_; }
    [[nodiscard]] double p_inf() const { return p_inf_; }
    [[nodiscard]] const PointSet& inf_set() const { return inf_set_; }
    [[nodiscard]] bool is_finite() const { return inf_set_.empty(); }
    [[nodiscard]] bool is_constant() const;
    [[nodiscard]] bool in_class(ExponentClass cls) const;

    /// p'(x) = p(x)/(p(x)-1), with 1 <-> inf. Throws DomainError if some
    /// value is below 1.
    [[nodiscard]] Exponent conjugate() const;

private:
    Exponent() = default;
    void finish();

    std::vector<double> values_;
    std::vector<double> conj_;    // empty when some value < 1
    double p_minus_ = 0.0;
    double p_plus_ = 0.0;
    double p_inf_ = 0.0;
    PointSet inf_set_;
};

Exponent conjugate(const Exponent& p);

/// (min, max) of p over a nonempty subset; inf participates as the max.
std::pair<double, double> range_on(const Exponent& p, std::span<const PointId> subset);

struct LHReport {
    double c0 = 0.0;
    double c_inf = 0.0;
    PointId base_point = 0;
};

/// c0  = max over pairs with 0 < d(x,y) < 1/2 of |p(x)-p(y)| log(e + 1/d(x,y)),
/// c_inf = max over x of |p(x) - p_inf| log(e + d(base, x)).
LHReport lh_constants(const Exponent& p, const QuasiMetricSpace& space, PointId base_point);

/// Returns eta when 1/p - 1/q is constant to 1e-12 and lies in [0,1);
/// throws DomainError carrying the max deviation otherwise.
double check_eta_relation(const Exponent& p, const Exponent& q);

/// q with 1/q = 1/p - eta; requires p < 1/eta pointwise.
Exponent exponent_from_eta(const Exponent& p, double eta);

}  // namespace vexmax
