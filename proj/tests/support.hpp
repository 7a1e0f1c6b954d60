#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "vexmax/exponent.hpp"
#include "vexmax/space.hpp"

namespace vt {

using vexmax::PointFn;
using vexmax::PointSet;
using vexmax::QuasiMetricSpace;

// ---- independent oracles ----

/// Correctly rounded sum via MPFR.
double mpfr_sum(const std::vector<double>& xs);

/// Brute-force M_eta f: closed balls {z : d(c,z) <= d(c,y)} re-enumerated
/// from the distance matrix, sums in MPFR, value pow(mu, eta-1) * S.
std::vector<double> brute_maximal(const QuasiMetricSpace& space, double eta, const PointFn& f);

/// Distinct member sets of all balls, enumerated from scratch.
std::vector<PointSet> brute_ball_sets(const QuasiMetricSpace& space);

/// Root of g(t) = 0 for decreasing g on (lo, hi) by plain bisection to
/// machine resolution.
template <typename G>
double bisect_root(G g, double lo, double hi) {
    for (int i = 0; i < 2000; ++i) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        (g(mid) > 0.0 ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

// ---- generators ----

inline QuasiMetricSpace line(std::size_t n) {
    std::vector<double> coords(n), mass(n, 1.0 / static_cast<double>(n));
    for (std::size_t i = 0; i < n; ++i) coords[i] = static_cast<double>(i) / static_cast<double>(n);
    return vexmax::euclidean_space(coords, 1, mass);
}

/// Random points in the unit square with random masses; with `power` != 1
/// distances are raised to that power (a quasi-metric for power > 1).
inline QuasiMetricSpace random_space(std::mt19937_64& rng, std::size_t n, double power = 1.0) {
    std::uniform_real_distribution<double> u(0.0, 1.0), m(0.5, 2.0);
    std::vector<double> xy(2 * n);
    for (auto& v : xy) v = u(rng);
    std::vector<double> dist(n * n, 0.0), mass(n);
    for (std::size_t i = 0; i < n; ++i) {
        mass[i] = m(rng) / static_cast<double>(n);
        for (std::size_t j = 0; j < n; ++j) {
            if (i == j) continue;
            const double d = std::hypot(xy[2 * i] - xy[2 * j], xy[2 * i + 1] - xy[2 * j + 1]);
            dist[i * n + j] = power == 1.0 ? d : std::pow(d, power);
        }
    }
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < i; ++j) dist[i * n + j] = dist[j * n + i];
    }
    return QuasiMetricSpace(std::move(dist), std::move(mass));
}

inline PointFn random_fn(std::mt19937_64& rng, std::size_t n, double zero_prob = 0.3) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    PointFn f(n);
    for (auto& v : f) v = u(rng) < zero_prob ? 0.0 : std::exp(4.0 * u(rng) - 2.0);
    return f;
}

inline PointFn random_weight(std::mt19937_64& rng, std::size_t n, double spread = 2.0) {
    std::uniform_real_distribution<double> u(-spread, spread);
    PointFn w(n);
    for (auto& v : w) v = std::exp(u(rng));
    return w;
}

/// p(x) = p_inf + amp / log(e + 1/max(d(x0,x), d_min)).
inline vexmax::Exponent lh_exponent(const QuasiMetricSpace& s, double p_inf, double amp, vexmax::PointId x0 = 0) {
    std::vector<double> v(s.size());
    for (std::size_t x = 0; x < s.size(); ++x) {
        const double d = std::max(s.dist(x0, x), s.min_distance());
        v[x] = p_inf + amp / std::log(std::exp(1.0) + 1.0 / d);
    }
    return vexmax::Exponent(v, p_inf);
}

/// Random exponent with values in [lo, hi].
inline vexmax::Exponent random_exponent(std::mt19937_64& rng, std::size_t n, double lo, double hi) {
    std::uniform_real_distribution<double> u(lo, hi);
    std::vector<double> v(n);
    for (auto& x : v) x = u(rng);
    return vexmax::Exponent(v);
}

}  // namespace vt
