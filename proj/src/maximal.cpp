#include "vexmax/maximal.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "vexmax/error.hpp"
#include "vexmax/exact_sum.hpp"
#include "vexmax/norm.hpp"

namespace vexmax {
namespace {

void check_eta(double eta) {
    if (!(eta >= 0.0 && eta < 1.0)) throw DomainError("eta must lie in [0,1)");
}

void check_size(std::size_t have, std::size_t want, const char* what) {
    if (have != want) throw ValidationError(std::string(what) + " size does not match the space");
}

}  // namespace

MaximalResult fractional_maximal(const QuasiMetricSpace& space, double eta, std::span<const double> f) {
    check_eta(eta);
    const std::size_t n = space.size();
    check_size(f.size(), n, "function");
    MaximalResult out;
    out.kind = WitnessKind::Ball;
    out.values.assign(n, -1.0);
    out.witness.assign(n, 0);

    const auto balls = space.balls();
    std::vector<double> value;
    std::vector<std::size_t> which;
    for (PointId c = 0; c < n; ++c) {
        auto ord = space.order(c);
        auto counts = space.candidate_counts(c);
        const std::size_t m = counts.size();
        value.assign(m, 0.0);
        which.assign(m, 0);
        ExactSum acc;
        std::size_t filled = 0;
        for (std::size_t j = 0; j < m; ++j) {
            for (; filled < counts[j]; ++filled) {
                const PointId y = ord[filled];
                if (f[y] != 0.0) acc.add(std::fabs(f[y]) * space.mass(y));
            }
            const std::size_t b = space.ball_index(c, j);
            value[j] = std::pow(balls[b].measure, eta - 1.0) * acc.value();
            which[j] = b;
        }
        // Suffix maxima: the point at position i of ord(c) lies in every ball
        // whose prefix length exceeds i.
        for (std::size_t j = m - 1; j-- > 0;) {
            if (value[j + 1] > value[j]) {
                value[j] = value[j + 1];
                which[j] = which[j + 1];
            }
        }
        std::size_t j = 0;
        for (std::size_t i = 0; i < n; ++i) {
            while (counts[j] <= i) ++j;
            const PointId x = ord[i];
            if (value[j] > out.values[x]) {
                out.values[x] = value[j];
                out.witness[x] = which[j];
            }
        }
    }
    return out;
}

std::vector<double> cube_averages(const DyadicGrid& grid, const QuasiMetricSpace& space, double eta,
                                  std::span<const double> sigma, std::span<const double> f) {
    check_eta(eta);
    check_size(f.size(), space.size(), "function");
    check_size(sigma.size(), space.size(), "sigma");
    std::vector<double> atoms(space.size());
    for (PointId x = 0; x < space.size(); ++x) {
        if (!(sigma[x] > 0.0) || !std::isfinite(sigma[x])) {
            throw DomainError("sigma at point " + std::to_string(x) + " must be positive and finite");
        }
        atoms[x] = sigma[x] * space.mass(x);
    }
    std::vector<double> avg(grid.cubes().size());
    for (const auto& q : grid.cubes()) {
        ExactSum measure, integral;
        for (PointId y : q.members) {
            measure.add(atoms[y]);
            if (f[y] != 0.0) integral.add(std::fabs(f[y]) * atoms[y]);
        }
        avg[q.id] = std::pow(measure.value(), eta - 1.0) * integral.value();
    }
    return avg;
}

MaximalResult weighted_dyadic_maximal(const DyadicGrid& grid, const QuasiMetricSpace& space, double eta,
                                      std::span<const double> sigma, std::span<const double> f) {
    const auto avg = cube_averages(grid, space, eta, sigma, f);
    MaximalResult out;
    out.kind = WitnessKind::Cube;
    out.values.assign(space.size(), -1.0);
    out.witness.assign(space.size(), 0);
    for (const auto& q : grid.cubes()) {
        for (PointId x : q.members) {
            if (avg[q.id] > out.values[x]) {
                out.values[x] = avg[q.id];
                out.witness[x] = q.id;
            }
        }
    }
    return out;
}

MaximalResult dyadic_fractional_maximal(const DyadicGrid& grid, const QuasiMetricSpace& space, double eta,
                                        std::span<const double> f) {
    const std::vector<double> ones(space.size(), 1.0);
    return weighted_dyadic_maximal(grid, space, eta, ones, f);
}

PointSet superlevel_set(const MaximalResult& result, double lambda) {
    if (!(lambda >= 0.0)) throw DomainError("superlevel height must be nonnegative");
    PointSet out;
    for (PointId x = 0; x < result.values.size(); ++x) {
        if (result.values[x] > lambda) out.push_back(x);
    }
    return out;
}

OperatorRatios operator_norm_estimate(const QuasiMetricSpace& space, const Exponent& p, const Exponent& q,
                                      std::span<const double> w, double eta,
                                      const std::vector<PointFn>& test_family, double tol) {
    const double rel = check_eta_relation(p, q);
    if (std::fabs(rel - eta) > 1e-12) throw PreconditionError("eta does not match 1/p - 1/q");
    OperatorRatios out;
    bool any = false;
    for (std::size_t i = 0; i < test_family.size(); ++i) {
        const auto& f = test_family[i];
        const double den = weighted_norm(space, p, w, f, tol);
        if (!(den > 0.0)) continue;
        any = true;
        const auto mf = fractional_maximal(space, eta, f);
        const double strong = weighted_norm(space, q, w, mf.values, tol) / den;
        const double weak = weak_norm(space, q, w, mf.values, tol) / den;
        if (strong > out.strong_ratio) {
            out.strong_ratio = strong;
            out.strong_witness = i;
        }
        if (weak > out.weak_ratio) {
            out.weak_ratio = weak;
            out.weak_witness = i;
        }
    }
    if (!any) throw PreconditionError("test family has no nonzero function");
    return out;
}

DominationConstants domination_constants(const QuasiMetricSpace& space, const std::vector<DyadicGrid>& family,
                                         double eta, const std::vector<PointFn>& functions) {
    if (family.empty()) throw PreconditionError("empty grid family");
    DominationConstants out{std::numeric_limits<double>::infinity(), 0.0};
    const double n_grids = static_cast<double>(family.size());
    for (const auto& f : functions) {
        const auto m = fractional_maximal(space, eta, f);
        std::vector<double> sum(space.size(), 0.0);
        for (const auto& grid : family) {
            const auto md = dyadic_fractional_maximal(grid, space, eta, f);
            for (PointId x = 0; x < space.size(); ++x) sum[x] += md.values[x];
        }
        for (PointId x = 0; x < space.size(); ++x) {
            if (!(m.values[x] > 0.0)) continue;
            const double r = sum[x] / m.values[x];
            out.c_low = std::min(out.c_low, r);
            out.c_high = std::max(out.c_high, r / n_grids);
        }
    }
    if (!std::isfinite(out.c_low)) out.c_low = 0.0;
    return out;
}

}  // namespace vexmax
