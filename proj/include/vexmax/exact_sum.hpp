#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

namespace vexmax {

/// Correctly rounded floating-point summation (Shewchuk partials, as in
/// CPython's math.fsum). The rounded result does not depend on the order in
/// which terms were added, so every measure and integral in the library is
/// bit-identical no matter which traversal produced it.
///
/// Inputs must be finite.
class ExactSum {
public:
    void add(double x) {
        std::size_t i = 0;
        for (double y : partials_) {
            if (std::fabs(x) < std::fabs(y)) std::swap(x, y);
            const double hi = x + y;
            const double lo = y - (hi - x);
            if (lo != 0.0) partials_[i++] = lo;
            x = hi;
        }
        partials_.resize(i);
        partials_.push_back(x);
    }

    [[nodiscard]] double value() const {
        std::size_t n = partials_.size();
        if (n == 0) return 0.0;
        double hi = partials_[--n];
        double lo = 0.0;
        while (n > 0) {
            const double x = hi;
            const double y = partials_[--n];
            hi = x + y;
            const double yr = hi - x;
            lo = y - yr;
            if (lo != 0.0) break;
        }
        // Round-half-even correction when the remaining partials push the
        // exact sum past the halfway point.
        if (n > 0 && ((lo < 0.0 && partials_[n - 1] < 0.0) ||
                      (lo > 0.0 && partials_[n - 1] > 0.0))) {
            const double y = lo * 2.0;
            const double x = hi + y;
            const double yr = x - hi;
            if (y == yr) hi = x;
        }
        return hi;
    }

    void clear() { partials_.clear(); }

private:
    std::vector<double> partials_;
};

inline double exact_sum(std::span<const double> xs) {
    ExactSum s;
    for (double x : xs) s.add(x);
    return s.value();
}

}  // namespace vexmax
