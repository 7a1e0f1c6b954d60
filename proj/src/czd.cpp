#include "vexmax/czd.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "vexmax/error.hpp"
#include "vexmax/exact_sum.hpp"
#include "vexmax/maximal.hpp"

namespace vexmax {
namespace {

constexpr double kRelTol = 1e-12;

std::vector<double> sigma_atoms(const QuasiMetricSpace& space, std::span<const double> sigma) {
    if (sigma.size() != space.size()) throw ValidationError("sigma size does not match the space");
    std::vector<double> atoms(space.size());
    for (PointId x = 0; x < space.size(); ++x) {
        if (!(sigma[x] > 0.0) || !std::isfinite(sigma[x])) {
            throw DomainError("sigma at point " + std::to_string(x) + " must be positive and finite");
        }
        atoms[x] = sigma[x] * space.mass(x);
    }
    return atoms;
}

std::vector<CubeId> select(const DyadicGrid& grid, const std::vector<double>& avg, double lambda) {
    std::vector<CubeId> out;
    std::vector<CubeId> stack{grid.root()};
    while (!stack.empty()) {
        const CubeId c = stack.back();
        stack.pop_back();
        if (avg[c] > lambda) {
            out.push_back(c);
        } else {
            for (CubeId ch : grid.cube(c).children) stack.push_back(ch);
        }
    }
    std::sort(out.begin(), out.end());
    return out;
}

template <typename... Args>
std::string msg(Args&&... args) {
    std::ostringstream os;
    os.precision(17);
    (os << ... << args);
    return os.str();
}

// Raw recomputation used by the verifier.
std::vector<double> raw_averages(const DyadicGrid& grid, std::span<const double> atoms, std::span<const double> f,
                                 double eta) {
    std::vector<double> avg(grid.cubes().size());
    for (const auto& q : grid.cubes()) {
        ExactSum integral;
        for (PointId y : q.members) {
            if (f[y] != 0.0) integral.add(std::fabs(f[y]) * atoms[y]);
        }
        avg[q.id] = std::pow(set_measure(atoms, q.members), eta - 1.0) * integral.value();
    }
    return avg;
}

struct LevelView {
    double lambda;
    bool root_selected;
    const std::vector<CubeId>& cubes;
    const std::vector<double>& averages;
};

void verify_level(const DyadicGrid& grid, const std::vector<double>& avg, double c_cz, const LevelView& lv,
                  CZReport& rep, const std::string& tag) {
    auto fail = [&](std::string s) {
        rep.pass = false;
        rep.failures.push_back(tag + s);
    };
    const std::size_t n = grid.num_points();
    std::vector<char> covered(n, 0);
    if (lv.averages.size() != lv.cubes.size()) fail("average list does not match cube list");
    for (std::size_t i = 0; i < lv.cubes.size(); ++i) {
        const CubeId c = lv.cubes[i];
        if (c >= grid.cubes().size()) {
            fail(msg("unknown cube ", c));
            continue;
        }
        const auto& q = grid.cube(c);
        for (PointId x : q.members) {
            ++rep.checks;
            if (covered[x]) fail(msg("cube ", c, " overlaps another selected cube at point ", x));
            covered[x] = 1;
        }
        ++rep.checks;
        if (i < lv.averages.size() && lv.averages[i] != avg[c]) {
            fail(msg("cube ", c, " stored average ", lv.averages[i], " differs from recomputed ", avg[c]));
        }
        ++rep.checks;
        if (!(lv.lambda < avg[c])) fail(msg("cube ", c, " average ", avg[c], " not above lambda ", lv.lambda));
        const bool is_root = c == grid.root();
        if (!(is_root && lv.root_selected)) {
            ++rep.checks;
            if (avg[c] > c_cz * lv.lambda * (1.0 + kRelTol)) {
                fail(msg("cube ", c, " average ", avg[c], " exceeds C_CZ * lambda = ", c_cz * lv.lambda));
            }
        }
        if (q.parent) {
            ++rep.checks;
            if (avg[*q.parent] > lv.lambda) {
                fail(msg("cube ", c, " is not maximal: parent ", *q.parent, " average ", avg[*q.parent]));
            }
        }
    }
    if (lv.root_selected && (lv.cubes.size() != 1 || lv.cubes.front() != grid.root())) {
        fail("root_selected set but selection is not the root alone");
    }
    // Cover identity against an independent evaluation of the maximal function.
    for (PointId x = 0; x < n; ++x) {
        double m = 0.0;
        for (int k = grid.k_min(); k <= grid.k_max(); ++k) m = std::max(m, avg[grid.cube_at(x, k)]);
        ++rep.checks;
        if ((m > lv.lambda) != static_cast<bool>(covered[x])) {
            fail(msg("point ", x, " maximal value ", m, (covered[x] ? " covered" : " uncovered"),
                     " against lambda ", lv.lambda));
        }
    }
}

}  // namespace

double cz_constant(const DyadicGrid& grid, const QuasiMetricSpace& space, double eta) {
    return parent_child_jump(grid, space.mass(), eta);
}

double cz_constant(const DyadicGrid& grid, const QuasiMetricSpace& space, double eta,
                   std::span<const double> sigma) {
    return parent_child_jump(grid, sigma_atoms(space, sigma), eta);
}

double cz_generic_bound(const DyadicGrid& grid, const QuasiMetricSpace& space, double eta) {
    const double c = 1.0 / grid.eps_child();
    return std::pow(c * std::pow(grid.d0(), std::log2(space.c_mu())), 1.0 - eta);
}

CZDecomposition cz_decompose(const DyadicGrid& grid, const QuasiMetricSpace& space, double eta,
                             std::span<const double> sigma, std::span<const double> f, double lambda) {
    if (!(lambda > 0.0) || !std::isfinite(lambda)) throw DomainError("CZ height must be positive");
    CZDecomposition d;
    d.lambda = lambda;
    d.eta = eta;
    d.c_cz = cz_constant(grid, space, eta, sigma);
    d.sigma.assign(sigma.begin(), sigma.end());
    d.f.assign(f.begin(), f.end());
    const auto avg = cube_averages(grid, space, eta, sigma, f);
    d.cubes = select(grid, avg, lambda);
    for (CubeId c : d.cubes) d.averages.push_back(avg[c]);
    d.root_selected = d.cubes.size() == 1 && d.cubes.front() == grid.root();
    return d;
}

CZStack cz_stack(const DyadicGrid& grid, const QuasiMetricSpace& space, double eta, std::span<const double> sigma,
                 std::span<const double> f, std::optional<double> a, std::optional<std::pair<int, int>> k_range) {
    CZStack s;
    s.eta = eta;
    s.c_cz = cz_constant(grid, space, eta, sigma);
    s.a = a.value_or(2.0 * s.c_cz);
    if (!(s.a > s.c_cz) || !std::isfinite(s.a)) {
        throw PreconditionError(msg("stack base a = ", s.a, " must exceed C_CZ = ", s.c_cz));
    }
    s.sigma.assign(sigma.begin(), sigma.end());
    s.f.assign(f.begin(), f.end());
    const auto avg = cube_averages(grid, space, eta, sigma, f);
    s.lambda0 = avg[grid.root()];
    if (s.lambda0 == 0.0) return s;

    int k0 = static_cast<int>(std::ceil(std::log(s.lambda0) / std::log(s.a)));
    while (std::pow(s.a, k0) < s.lambda0) ++k0;
    while (std::pow(s.a, k0 - 1) >= s.lambda0) --k0;
    s.k0 = k0;

    int lo = k0, hi;
    if (k_range) {
        if (k_range->first < k0) {
            throw PreconditionError(msg("stack levels must start at k0 = ", k0, " or later"));
        }
        lo = k_range->first;
        hi = k_range->second;
    } else {
        const double top = *std::max_element(avg.begin(), avg.end());
        hi = k0;
        while (std::pow(s.a, hi + 1) < top) ++hi;
        if (!(std::pow(s.a, hi) < top)) hi = k0 - 1;
    }

    std::vector<CubeId> next;
    for (int k = lo; k <= hi; ++k) {
        CZLevel lvl;
        lvl.k = k;
        lvl.height = std::pow(s.a, k);
        lvl.cubes = k == lo ? select(grid, avg, lvl.height) : next;
        next = select(grid, avg, std::pow(s.a, k + 1));
        std::vector<char> above(space.size(), 0);
        for (CubeId c : next) {
            for (PointId x : grid.cube(c).members) above[x] = 1;
        }
        for (CubeId c : lvl.cubes) {
            lvl.averages.push_back(avg[c]);
            PointSet core;
            for (PointId x : grid.cube(c).members) {
                if (!above[x]) core.push_back(x);
            }
            lvl.cores.push_back(std::move(core));
        }
        lvl.root_selected = lvl.cubes.size() == 1 && lvl.cubes.front() == grid.root();
        s.levels.push_back(std::move(lvl));
    }
    return s;
}

CZReport cz_verify(const DyadicGrid& grid, const QuasiMetricSpace& space, const CZDecomposition& d) {
    CZReport rep;
    const auto atoms = sigma_atoms(space, d.sigma);
    const auto avg = raw_averages(grid, atoms, d.f, d.eta);
    const double jump = parent_child_jump(grid, atoms, d.eta);
    ++rep.checks;
    if (d.c_cz < jump) {
        rep.pass = false;
        rep.failures.push_back(msg("claimed C_CZ ", d.c_cz, " below realized jump ", jump));
    }
    verify_level(grid, avg, d.c_cz, {d.lambda, d.root_selected, d.cubes, d.averages}, rep, "");
    return rep;
}

CZReport cz_verify(const DyadicGrid& grid, const QuasiMetricSpace& space, const CZStack& s) {
    CZReport rep;
    if (s.levels.empty()) return rep;
    const auto atoms = sigma_atoms(space, s.sigma);
    const auto avg = raw_averages(grid, atoms, s.f, s.eta);
    const double jump = parent_child_jump(grid, atoms, s.eta);
    auto fail = [&](std::string m) {
        rep.pass = false;
        rep.failures.push_back(std::move(m));
    };
    ++rep.checks;
    if (s.c_cz < jump) fail(msg("claimed C_CZ ", s.c_cz, " below realized jump ", jump));
    ++rep.checks;
    if (!(s.a > s.c_cz)) fail(msg("base a = ", s.a, " does not exceed C_CZ = ", s.c_cz));

    const double shrink = 1.0 - std::pow(s.c_cz / s.a, 1.0 / (1.0 - s.eta));
    std::vector<long> owner(space.size(), -1);
    for (std::size_t li = 0; li < s.levels.size(); ++li) {
        const auto& lvl = s.levels[li];
        const std::string tag = msg("level k=", lvl.k, ": ");
        verify_level(grid, avg, s.c_cz, {lvl.height, lvl.root_selected, lvl.cubes, lvl.averages}, rep, tag);
        if (lvl.cores.size() != lvl.cubes.size()) {
            fail(tag + "core list does not match cube list");
            continue;
        }
        const double next_height = lvl.height * s.a;
        for (std::size_t i = 0; i < lvl.cubes.size(); ++i) {
            const auto& q = grid.cube(lvl.cubes[i]);
            const auto& core = lvl.cores[i];
            PointSet expect;
            for (PointId x : q.members) {
                double m = 0.0;
                for (int k = grid.k_min(); k <= grid.k_max(); ++k) m = std::max(m, avg[grid.cube_at(x, k)]);
                if (!(m > next_height)) expect.push_back(x);
            }
            ++rep.checks;
            if (core != expect) fail(tag + msg("core of cube ", q.id, " differs from Q minus the next level"));
            for (PointId x : core) {
                ++rep.checks;
                if (owner[x] >= 0) {
                    fail(tag + msg("point ", x, " lies in two cores (cube ", q.id, " and an earlier one)"));
                }
                owner[x] = static_cast<long>(q.id);
            }
            const double sq = set_measure(atoms, q.members);
            const double se = set_measure(atoms, core);
            ++rep.checks;
            if (se < shrink * sq * (1.0 - kRelTol) || se > sq) {
                fail(tag + msg("core mass ", se, " outside [", shrink * sq, ", ", sq, "] for cube ", q.id));
            }
        }
    }
    return rep;
}

}  // namespace vexmax
