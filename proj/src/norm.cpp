#include "vexmax/norm.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <vector>

#include "vexmax/error.hpp"
#include "vexmax/exact_sum.hpp"

namespace vexmax {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr int kMaxIterations = 100;

void check_size(const QuasiMetricSpace& space, std::size_t m, const char* what) {
    if (m != space.size()) {
        throw ValidationError(std::string(what) + " has " + std::to_string(m) + " values, space has " +
                              std::to_string(space.size()));
    }
}

}  // namespace

namespace detail {

double solve_modular_level(std::span<const double> mass, std::span<const double> p,
                           std::span<const double> f, double level, double tol) {
    if (!(tol > 0.0)) throw DomainError("norm tolerance must be positive");
    if (!(level > 0.0)) throw DomainError("modular level must be positive");

    std::vector<double> c, e;
    double sup_part = 0.0;
    double pmin = kInf, pmax = 0.0;
    bool constant = true;
    for (std::size_t i = 0; i < f.size(); ++i) {
        const double a = std::fabs(f[i]);
        if (a == 0.0) continue;
        if (p[i] == kInf) {
            sup_part = std::max(sup_part, a);
            continue;
        }
        if (!e.empty() && p[i] != e.front()) constant = false;
        c.push_back(p[i] * std::log(a) + std::log(mass[i]));
        e.push_back(p[i]);
        pmin = std::min(pmin, p[i]);
        pmax = std::max(pmax, p[i]);
    }
    if (e.empty()) return sup_part / level;

    if (constant && sup_part == 0.0) {
        const double p0 = e.front();
        double top = 0.0;
        for (double v : f) top = std::max(top, std::fabs(v));
        ExactSum acc;
        for (std::size_t i = 0; i < f.size(); ++i) {
            if (f[i] != 0.0) acc.add(std::pow(std::fabs(f[i]) / top, p0) * mass[i]);
        }
        return top * std::pow(acc.value() / level, 1.0 / p0);
    }
    if (sup_part > 0.0) {
        pmin = std::min(pmin, 1.0);
        pmax = std::max(pmax, 1.0);
    }

    auto phi = [&](double L) {
        double s = sup_part > 0.0 ? sup_part * std::exp(-L) : 0.0;
        for (std::size_t i = 0; i < e.size(); ++i) s += std::exp(c[i] - e[i] * L);
        return s - level;
    };
    auto dphi = [&](double L) {
        double s = sup_part > 0.0 ? sup_part * std::exp(-L) : 0.0;
        for (std::size_t i = 0; i < e.size(); ++i) s += e[i] * std::exp(c[i] - e[i] * L);
        return -s;
    };

    // Bracket from the norm-modular comparison at lambda = 1, with the
    // modular evaluated as a log-sum-exp so extreme scales stay finite.
    double cmax = sup_part > 0.0 ? std::log(sup_part) : -kInf;
    for (double v : c) cmax = std::max(cmax, v);
    double scaled = sup_part > 0.0 ? std::exp(std::log(sup_part) - cmax) : 0.0;
    for (double v : c) scaled += std::exp(v - cmax);
    const double log_ratio = cmax + std::log(scaled) - std::log(level);
    double lo = std::min(log_ratio / pmax, log_ratio / pmin);
    double hi = std::max(log_ratio / pmax, log_ratio / pmin);
    double width = 1.0;
    while (phi(lo) < 0.0) {
        lo -= width;
        width *= 2.0;
    }
    width = 1.0;
    while (phi(hi) > 0.0) {
        hi += width;
        width *= 2.0;
    }

    const double tol_log = std::log1p(tol);
    double phi_lo = phi(lo);
    for (int it = 0; it < kMaxIterations; ++it) {
        if (phi_lo == 0.0) return std::exp(lo);
        if (hi - lo <= tol_log) break;
        double next = lo - phi_lo / dphi(lo);
        const bool newton_ok = next > lo && next < hi;
        if (!newton_ok) next = 0.5 * (lo + hi);
        if (newton_ok && next - lo <= 0.25 * tol_log) return std::exp(next);
        const double v = phi(next);
        if (v >= 0.0) {
            lo = next;
            phi_lo = v;
        } else {
            hi = next;
        }
    }
    return std::exp(0.5 * (lo + hi));
}

}  // namespace detail

double modular(const QuasiMetricSpace& space, const Exponent& p, std::span<const double> f) {
    check_size(space, f.size(), "function");
    check_size(space, p.size(), "exponent");
    ExactSum acc;
    double sup_part = 0.0;
    for (PointId x = 0; x < space.size(); ++x) {
        const double a = std::fabs(f[x]);
        if (p[x] == kInf) {
            sup_part = std::max(sup_part, a);
        } else if (a != 0.0) {
            acc.add(std::pow(a, p[x]) * space.mass(x));
        }
    }
    return acc.value() + sup_part;
}

double luxemburg_norm(const QuasiMetricSpace& space, const Exponent& p, std::span<const double> f,
                      double tol) {
    check_size(space, f.size(), "function");
    check_size(space, p.size(), "exponent");
    return detail::solve_modular_level(space.mass(), p.values(), f, 1.0, tol);
}

double weighted_norm(const QuasiMetricSpace& space, const Exponent& p, std::span<const double> w,
                     std::span<const double> f, double tol) {
    check_size(space, w.size(), "weight");
    check_size(space, f.size(), "function");
    std::vector<double> wf(f.size());
    for (std::size_t i = 0; i < f.size(); ++i) {
        if (!(w[i] > 0.0) || !std::isfinite(w[i])) {
            throw DomainError("weight at point " + std::to_string(i) + " must be positive and finite");
        }
        wf[i] = w[i] * f[i];
    }
    return luxemburg_norm(space, p, wf, tol);
}

double set_norm(const QuasiMetricSpace& space, const Exponent& p, std::span<const double> w,
                std::span<const PointId> subset, double tol) {
    std::vector<double> m, e, v;
    m.reserve(subset.size());
    e.reserve(subset.size());
    v.reserve(subset.size());
    for (PointId x : subset) {
        m.push_back(space.mass(x));
        e.push_back(p[x]);
        v.push_back(w[x]);
    }
    return detail::solve_modular_level(m, e, v, 1.0, tol);
}

double weak_norm(const QuasiMetricSpace& space, const Exponent& q, std::span<const double> w,
                 std::span<const double> g, double tol) {
    check_size(space, g.size(), "function");
    check_size(space, w.size(), "weight");
    check_size(space, q.size(), "exponent");
    for (std::size_t i = 0; i < g.size(); ++i) {
        if (!(g[i] >= 0.0)) throw DomainError("weak norm needs a nonnegative function");
    }
    std::vector<PointId> idx(g.size());
    std::iota(idx.begin(), idx.end(), PointId{0});
    std::stable_sort(idx.begin(), idx.end(), [&](PointId a, PointId b) { return g[a] > g[b]; });

    double best = 0.0;
    std::vector<PointId> level_set;
    std::size_t k = 0;
    while (k < idx.size() && g[idx[k]] > 0.0) {
        const double v = g[idx[k]];
        while (k < idx.size() && g[idx[k]] == v) level_set.push_back(idx[k++]);
        best = std::max(best, v * set_norm(space, q, w, level_set, tol));
    }
    return best;
}

}  // namespace vexmax
