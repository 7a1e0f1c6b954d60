#include "vexmax/weights.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <limits>
#include <random>

#include "vexmax/error.hpp"
#include "vexmax/exact_sum.hpp"

namespace vexmax {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kSnap = 1e-12;
constexpr std::array<double, 4> kFitGrid{1.0, 0.5, 0.25, 0.125};

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

PointFn reciprocal(std::span<const double> w) {
    PointFn out(w.size());
    for (std::size_t i = 0; i < w.size(); ++i) {
        if (!(w[i] > 0.0) || !std::isfinite(w[i])) {
            throw DomainError("weight at point " + std::to_string(i) + " must be positive and finite");
        }
        out[i] = 1.0 / w[i];
    }
    return out;
}

void check_sizes(const QuasiMetricSpace& space, const Exponent& p, const Exponent& q, std::span<const double> w) {
    if (p.size() != space.size() || q.size() != space.size() || w.size() != space.size()) {
        throw ValidationError("exponent or weight size does not match the space");
    }
}

// Exponent value if constant on S, nullopt otherwise.
std::optional<double> constant_on(const Exponent& e, std::span<const PointId> members) {
    const double v = e[members.front()];
    for (PointId x : members) {
        if (e[x] != v) return std::nullopt;
    }
    return v;
}

// (avg_S w^e)^{1/e} and 1/e; for e = inf the sup part max w and 0.
std::pair<double, double> averaged_part(double e, std::span<const double> w, const QuasiMetricSpace& space,
                                        std::span<const PointId> members, double measure) {
    if (e == kInf) {
        double m = 0.0;
        for (PointId x : members) m = std::max(m, w[x]);
        return {m, 0.0};
    }
    ExactSum acc;
    for (PointId x : members) acc.add(std::pow(w[x], e) * space.mass(x));
    return {std::pow(acc.value() / measure, 1.0 / e), 1.0 / e};
}

template <typename Sets>
ApqResult sweep(const QuasiMetricSpace& space, double eta, const Exponent& e1, std::span<const double> w1,
                const Exponent& e2, std::span<const double> w2, const Sets& sets, double tol) {
    ApqResult best{-1.0, 0};
    for (std::size_t i = 0; i < sets.size(); ++i) {
        const auto& [members, measure] = sets[i];
        const double v = ball_factor(space, eta, e1, w1, e2, w2, members, measure, tol);
        if (v > best.value) best = {v, i};
    }
    return best;
}

std::vector<std::pair<PointSet, double>> ball_sets(const QuasiMetricSpace& space) {
    std::vector<std::pair<PointSet, double>> out;
    out.reserve(space.balls().size());
    for (const auto& b : space.balls()) out.emplace_back(space.members(b), b.measure);
    return out;
}

}  // namespace

double ball_factor(const QuasiMetricSpace& space, double eta, const Exponent& e1, std::span<const double> w1,
                   const Exponent& e2, std::span<const double> w2, std::span<const PointId> members,
                   double measure, double tol) {
    if (members.empty()) throw PreconditionError("empty set in weight factor");
    const auto c1 = constant_on(e1, members);
    const auto c2 = constant_on(e2, members);
    if (c1 && c2) {
        const auto [a, r1] = averaged_part(*c1, w1, space, members, measure);
        const auto [b, r2] = averaged_part(*c2, w2, space, members, measure);
        double e = eta - 1.0 + r1 + r2;
        if (std::fabs(e) < kSnap) e = 0.0;
        return e == 0.0 ? a * b : a * b * std::pow(measure, e);
    }
    return std::pow(measure, eta - 1.0) * set_norm(space, e1, w1, members, tol) *
           set_norm(space, e2, w2, members, tol);
}

ApqResult apq_constant(const QuasiMetricSpace& space, const Exponent& p, const Exponent& q,
                       std::span<const double> w, double tol) {
    check_sizes(space, p, q, w);
    const double eta = check_eta_relation(p, q);
    const auto winv = reciprocal(w);
    return sweep(space, eta, q, w, p.conjugate(), winv, ball_sets(space), tol);
}

ApqResult apq_dyadic_constant(const DyadicGrid& grid, const QuasiMetricSpace& space, const Exponent& p,
                              const Exponent& q, std::span<const double> w, double tol) {
    check_sizes(space, p, q, w);
    const double eta = check_eta_relation(p, q);
    const auto winv = reciprocal(w);
    std::vector<std::pair<PointSet, double>> sets;
    sets.reserve(grid.cubes().size());
    for (const auto& c : grid.cubes()) sets.emplace_back(c.members, c.measure);
    return sweep(space, eta, q, w, p.conjugate(), winv, sets, tol);
}

std::pair<double, double> dual_constants(const QuasiMetricSpace& space, const Exponent& p, const Exponent& q,
                                         std::span<const double> w, double tol) {
    check_sizes(space, p, q, w);
    const double eta = check_eta_relation(p, q);
    const auto winv = reciprocal(w);
    const auto sets = ball_sets(space);
    const Exponent pc = p.conjugate();
    const double primal = sweep(space, eta, q, w, pc, winv, sets, tol).value;
    const auto back = reciprocal(winv);
    const double dual = sweep(space, eta, pc, winv, q.conjugate().conjugate(), back, sets, tol).value;
    return {primal, dual};
}

SpecializedConstants specialized_constants(const QuasiMetricSpace& space, const Exponent& p, const Exponent& q,
                                           std::span<const double> w, double tol) {
    check_sizes(space, p, q, w);
    const double eta = check_eta_relation(p, q);
    const auto winv = reciprocal(w);
    const auto sets = ball_sets(space);
    const Exponent pc = p.conjugate();
    const Exponent qc = q.conjugate();
    SpecializedConstants out;
    out.apq = sweep(space, eta, q, w, pc, winv, sets, tol).value;
    out.a_q = sweep(space, 0.0, q, w, qc, winv, sets, tol).value;
    out.a_pprime_dual = sweep(space, 0.0, pc, winv, p, w, sets, tol).value;
    if (p.is_constant() && q.is_constant()) {
        out.classical_apq = out.apq;
        const double qv = q[0];
        const double qcv = qc[0];
        double best = 0.0;
        for (const auto& [members, measure] : sets) {
            const auto [a, ra] = averaged_part(qv, w, space, members, measure);
            const auto [b, rb] = averaged_part(qcv, winv, space, members, measure);
            (void)ra;
            (void)rb;
            // (avg w^q)(avg w^{-q'})^{q-1}; for q = 1 the second factor is max w^{-1}.
            const double v = std::pow(a, qv) * (qcv == kInf ? b : std::pow(b, qv));
            best = std::max(best, v);
        }
        out.classical_aq = best;
    }
    return out;
}

bool AInftyReport::finite() const {
    auto ok = [](double v) { return std::isfinite(v) && v > 0.0; };
    return ok(c1) && ok(c2) && ok(delta) && ok(epsilon) && ok(doubling_of_weight);
}

AInftyReport a_infty_diagnostics(const QuasiMetricSpace& space, std::span<const double> atoms,
                                 std::uint64_t seed) {
    if (atoms.size() != space.size()) throw ValidationError("atom count does not match the space");
    for (std::size_t i = 0; i < atoms.size(); ++i) {
        if (!(atoms[i] > 0.0) || !std::isfinite(atoms[i])) {
            throw DomainError("measure atom " + std::to_string(i) + " must be positive and finite");
        }
    }
    AInftyReport rep;
    std::array<double, 4> c2{}, c1{};
    auto record = [&](double rmu, double rnu) {
        for (std::size_t g = 0; g < kFitGrid.size(); ++g) {
            c2[g] = std::max(c2[g], rmu / std::pow(rnu, kFitGrid[g]));
            c1[g] = std::max(c1[g], rnu / std::pow(rmu, kFitGrid[g]));
        }
        ++rep.subsets_checked;
    };

    std::vector<double> smu, snu;
    const auto balls = space.balls();
    for (std::size_t bi = 0; bi < balls.size(); ++bi) {
        const auto members = space.members(balls[bi]);
        const std::size_t k = members.size();
        double mu_b = 0.0, nu_b = 0.0;
        for (PointId x : members) {
            mu_b += space.mass(x);
            nu_b += atoms[x];
        }
        if (k <= kExhaustiveSubsetLimit) {
            const std::size_t full = std::size_t{1} << k;
            smu.assign(full, 0.0);
            snu.assign(full, 0.0);
            for (std::size_t mask = 1; mask < full; ++mask) {
                const std::size_t low = static_cast<std::size_t>(std::countr_zero(mask));
                const std::size_t rest = mask & (mask - 1);
                smu[mask] = smu[rest] + space.mass(members[low]);
                snu[mask] = snu[rest] + atoms[members[low]];
                record(smu[mask] / mu_b, snu[mask] / nu_b);
            }
        } else {
            std::mt19937_64 rng(splitmix64(seed ^ splitmix64(bi + 1)));
            record(1.0, 1.0);
            for (std::size_t s = 0; s < kSampledSubsets; ++s) {
                double em = 0.0, en = 0.0;
                for (PointId x : members) {
                    if (rng() & 1ULL) {
                        em += space.mass(x);
                        en += atoms[x];
                    }
                }
                if (em > 0.0) record(em / mu_b, en / nu_b);
            }
        }
    }

    for (std::size_t g = 0; g < kFitGrid.size(); ++g) {
        rep.cond2.push_back({kFitGrid[g], c2[g]});
        rep.cond3.push_back({kFitGrid[g], c1[g]});
    }
    auto best = [](const std::vector<AInftyFit>& fits) {
        AInftyFit b = fits.front();
        for (const auto& f : fits) {
            if (f.constant < b.constant || (f.constant == b.constant && f.exponent > b.exponent)) b = f;
        }
        return b;
    };
    const auto b2 = best(rep.cond2);
    const auto b3 = best(rep.cond3);
    rep.epsilon = b2.exponent;
    rep.c2 = b2.constant;
    rep.delta = b3.exponent;
    rep.c1 = b3.constant;
    rep.doubling_of_weight = doubling_constant(space, atoms);
    return rep;
}

SubsetBoundReport subset_bound_check(const QuasiMetricSpace& space, const Exponent& p, const Exponent& q,
                                     std::span<const double> w, std::uint64_t seed, std::size_t exhaustive_limit,
                                     std::size_t samples, double tol) {
    SubsetBoundReport rep;
    const double eta = check_eta_relation(p, q);
    rep.apq = apq_constant(space, p, q, w, tol).value;
    const auto balls = space.balls();
    // Atoms of the modular of w chi_E at lambda = 1.
    std::vector<double> wq(space.size());
    for (PointId x = 0; x < space.size(); ++x) {
        wq[x] = q[x] == kInf ? kInf : std::pow(w[x], q[x]) * space.mass(x);
    }
    PointSet e;
    auto check = [&](std::size_t bi, double mu_b, double norm_b) {
        const double mu_e = set_measure(space.mass(), e);
        const double lhs = std::pow(mu_e / mu_b, 1.0 - eta);
        ++rep.checked;
        // Lower bound on ||w chi_E||_q from rho: rho^{1/q-} when rho <= 1,
        // else rho^{1/q+}. Skip the solve when the implied ratio bound can
        // neither raise the worst ratio nor exceed 16.
        double rho = 0.0, qlo = kInf, qhi = 0.0;
        for (PointId x : e) {
            rho += wq[x];
            qlo = std::min(qlo, q[x]);
            qhi = std::max(qhi, q[x]);
        }
        if (std::isfinite(rho) && rho > 0.0) {
            const double lb = std::pow(rho, 1.0 / (rho <= 1.0 ? qlo : qhi));
            const double bound = lhs / (rep.apq * lb / norm_b) * (1.0 + 1e-9);
            if (bound <= rep.worst_ratio && bound <= kSubsetBound) return;
        }
        const double rhs = rep.apq * set_norm(space, q, w, e, tol) / norm_b;
        const double r = lhs / rhs;
        if (r > kSubsetBound) ++rep.violations;
        if (r > rep.worst_ratio) {
            rep.worst_ratio = r;
            rep.ball = bi;
            rep.subset = e;
        }
    };
    for (std::size_t bi = 0; bi < balls.size(); ++bi) {
        const auto members = space.members(balls[bi]);
        const double norm_b = set_norm(space, q, w, members, tol);
        const std::size_t k = members.size();
        if (k <= exhaustive_limit && k < 63) {
            for (std::uint64_t mask = 1; mask < (std::uint64_t{1} << k); ++mask) {
                e.clear();
                for (std::size_t i = 0; i < k; ++i) {
                    if (mask >> i & 1ULL) e.push_back(members[i]);
                }
                check(bi, balls[bi].measure, norm_b);
            }
        } else {
            std::mt19937_64 rng(splitmix64(seed ^ splitmix64(bi + 1)));
            for (std::size_t s = 0; s < samples; ++s) {
                e.clear();
                for (PointId x : members) {
                    if (rng() & 1ULL) e.push_back(x);
                }
                if (!e.empty()) check(bi, balls[bi].measure, norm_b);
            }
        }
    }
    return rep;
}

WeightRecord derived_measures(const QuasiMetricSpace& space, const Exponent& p, const Exponent& q,
                              std::span<const double> w) {
    check_sizes(space, p, q, w);
    const Exponent pc = p.conjugate();
    WeightRecord rec;
    rec.w.assign(w.begin(), w.end());
    rec.W_measure.resize(space.size());
    rec.sigma_measure.resize(space.size());
    for (PointId x = 0; x < space.size(); ++x) {
        if (!(w[x] > 0.0) || !std::isfinite(w[x])) {
            throw DomainError("weight at point " + std::to_string(x) + " must be positive and finite");
        }
        const double W = std::pow(w[x], q[x]) * space.mass(x);
        const double s = pc[x] == kInf ? space.mass(x) / w[x] : std::pow(w[x], -pc[x]) * space.mass(x);
        if (!(W > 0.0) || !std::isfinite(W)) {
            throw DomainError("W atom at point " + std::to_string(x) + " overflows or vanishes");
        }
        if (!(s > 0.0) || !std::isfinite(s)) {
            throw DomainError("sigma atom at point " + std::to_string(x) + " overflows or vanishes");
        }
        rec.W_measure[x] = W;
        rec.sigma_measure[x] = s;
    }
    return rec;
}

std::vector<PointFn> extremal_test_functions(const QuasiMetricSpace& space, const Exponent& p,
                                             std::span<const double> w, std::span<const PointId> ball_members) {
    if (ball_members.empty()) throw PreconditionError("extremal functions need a nonempty ball");
    const Exponent pc = p.conjugate();
    const std::size_t n = space.size();
    std::vector<PointFn> out;
    auto push = [&](PointFn f) {
        if (std::find(out.begin(), out.end(), f) == out.end()) out.push_back(std::move(f));
    };

    PointSet last;
    for (double R : {4.0, 16.0, kInf}) {
        PointSet br;
        for (PointId x : ball_members) {
            if (pc[x] < R) br.push_back(x);
        }
        if (br.empty() || br == last) continue;
        last = br;
        std::vector<double> m, e, v;
        for (PointId x : br) {
            m.push_back(space.mass(x));
            e.push_back(pc[x]);
            v.push_back(1.0 / w[x]);
        }
        const double lambda = detail::solve_modular_level(m, e, v, 1.0 / 3.0, kDefaultNormTol);
        PointFn f(n, 0.0);
        for (PointId x : br) f[x] = std::pow(w[x], -pc[x]) * std::pow(lambda, 1.0 - pc[x]);
        push(std::move(f));
    }

    auto indicator = [&](auto&& pred) {
        PointFn f(n, 0.0);
        for (PointId x : ball_members) {
            if (pred(x)) f[x] = 1.0;
        }
        return f;
    };
    push(indicator([](PointId) { return true; }));
    PointId lo = ball_members.front(), hi = ball_members.front();
    for (PointId x : ball_members) {
        if (w[x] < w[lo]) lo = x;
        if (w[x] > w[hi]) hi = x;
    }
    push(indicator([&](PointId x) { return x == lo; }));
    push(indicator([&](PointId x) { return x == hi; }));
    std::vector<double> ws;
    for (PointId x : ball_members) ws.push_back(w[x]);
    std::sort(ws.begin(), ws.end());
    const double median = ws[(ws.size() - 1) / 2];
    push(indicator([&](PointId x) { return w[x] <= median; }));
    return out;
}

}  // namespace vexmax
