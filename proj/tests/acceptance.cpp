// Acceptance run: eight criteria, one PASS/FAIL line each. Exit status 1 if
// any criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>
#include <string>

#include "support.hpp"
#include "vexmax/czd.hpp"
#include "vexmax/experiment.hpp"
#include "vexmax/maximal.hpp"
#include "vexmax/norm.hpp"
#include "vexmax/weights.hpp"

using namespace vexmax;

namespace {

struct Outcome {
    bool pass = true;
    std::string detail;
};

template <typename... Args>
std::string str(Args&&... args) {
    std::ostringstream os;
    os.precision(6);
    (os << ... << args);
    return os.str();
}

PointSet cube_union(const DyadicGrid& g, const std::vector<CubeId>& cubes) {
    PointSet out;
    for (auto c : cubes) out.insert(out.end(), g.cube(c).members.begin(), g.cube(c).members.end());
    std::sort(out.begin(), out.end());
    return out;
}

// ---- 1: Hoelder with constant 4 and the subset bound with constant 16 ----
Outcome exact_constants() {
    std::mt19937_64 rng(101);
    std::size_t hoelder_bad = 0;
    double hoelder_worst = 0.0;
    for (int t = 0; t < 1000; ++t) {
        const auto s = vt::random_space(rng, 2 + t % 63);
        const auto base = vt::random_exponent(rng, s.size(), 1.0, 5.0);
        std::vector<double> pv(base.values().begin(), base.values().end());
        if (t % 3 == 0) pv[0] = 1.0;
        const Exponent p(pv);
        const auto f = vt::random_fn(rng, s.size());
        const auto g = vt::random_fn(rng, s.size());
        std::vector<double> terms;
        for (std::size_t x = 0; x < s.size(); ++x) terms.push_back(std::fabs(f[x] * g[x]) * s.mass(x));
        const double lhs = vt::mpfr_sum(terms);
        const double rhs = luxemburg_norm(s, p, f) * luxemburg_norm(s, conjugate(p), g);
        if (lhs > 4 * rhs) ++hoelder_bad;
        if (rhs > 0) hoelder_worst = std::max(hoelder_worst, lhs / rhs);
    }

    std::size_t subset_bad = 0, pairs = 0;
    double subset_worst = 0.0;
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int t = 0; t < 1000; ++t) {
        const std::size_t n = 2 + static_cast<std::size_t>(t) % 63;
        const auto s = t % 2 ? vt::line(n) : vt::random_space(rng, n, t % 4 ? 1.0 : 1.5);
        const auto p = t % 5 == 0 ? vt::lh_exponent(s, 1.2 + u(rng), u(rng), t % n)
                                  : vt::random_exponent(rng, n, 1.1, 3.0);
        const auto q = exponent_from_eta(p, t % 3 ? 0.0 : 0.2 * u(rng));
        const auto w = vt::random_weight(rng, n, 2.0);
        const auto rep = subset_bound_check(s, p, q, w, static_cast<std::uint64_t>(t), 8, 32);
        subset_bad += rep.violations;
        pairs += rep.checked;
        subset_worst = std::max(subset_worst, rep.worst_ratio);
    }
    return {hoelder_bad == 0 && subset_bad == 0,
            str("Hoelder violations ", hoelder_bad, "/1000 (worst ratio ", hoelder_worst, " vs 4); subset violations ",
                subset_bad, " over ", pairs, " (E,B) pairs (worst ratio ", subset_worst, " vs 16)")};
}

// ---- 2: Luxemburg norm against independent oracles ----
Outcome norm_oracles() {
    std::mt19937_64 rng(102);
    std::uniform_real_distribution<double> pu(1.0, 8.0);
    double closed_err = 0.0;
    for (int t = 0; t < 1000; ++t) {
        const auto s = t % 2 ? vt::random_space(rng, 2 + t % 30) : vt::line(2 + t % 40);
        const double p = t % 7 == 0 ? 1.0 : pu(rng);
        const auto f = vt::random_fn(rng, s.size());
        std::vector<double> terms;
        for (std::size_t x = 0; x < s.size(); ++x) terms.push_back(std::pow(f[x], p) * s.mass(x));
        const double ref = std::pow(vt::mpfr_sum(terms), 1.0 / p);
        const double v = luxemburg_norm(s, Exponent::constant(s.size(), p), f);
        closed_err = std::max(closed_err, ref == 0.0 ? std::fabs(v) : std::fabs(v - ref) / ref);
    }

    const auto two = build_space({0, 1, 1, 0}, {1, 1});
    const double golden = vt::bisect_root([](double t) { return 1 / t + 1 / (t * t) - 1; }, 1.0, 3.0);
    const double golden_err =
        std::fabs(luxemburg_norm(two, Exponent({1.0, 2.0}), PointFn{1, 1}) - golden) / golden;

    double unit_err = 0.0;
    for (int t = 0; t < 1000; ++t) {
        const auto s = vt::random_space(rng, 2 + t % 40);
        const auto p = vt::random_exponent(rng, s.size(), 1.0, 1.0 + 5.0 * (t % 5 + 1) / 5.0);
        auto f = vt::random_fn(rng, s.size());
        f[0] += 0.5;
        const double nf = luxemburg_norm(s, p, f);
        for (auto& v : f) v /= nf;
        unit_err = std::max(unit_err, std::fabs(modular(s, p, f) - 1.0));
    }
    return {closed_err <= 1e-9 && golden_err <= 1e-10 && unit_err <= 1e-9,
            str("closed form max rel err ", closed_err, " (1e-9); golden ratio rel err ", golden_err,
                " (1e-10); unit ball max |rho-1| ", unit_err, " (1e-9)")};
}

// ---- 3: dyadic grid properties ----
Outcome grid_certification() {
    std::size_t grids = 0, bad = 0;
    std::string first;
    for (std::size_t n : {8, 32, 64, 128}) {
        for (std::uint64_t seed = 1; seed <= 5; ++seed) {
            for (const auto& s : {generate_line(n).build(), generate_random_metric(n, seed).build()}) {
                const auto rep = verify_grid(build_grid(s, 2.0, seed), s);
                ++grids;
                if (!rep.all_pass()) {
                    ++bad;
                    if (first.empty()) first = str(" first failure n=", n, " seed=", seed);
                }
            }
        }
    }
    return {bad == 0, str(grids - bad, "/", grids, " grids pass properties (1)-(5)", first)};
}

// ---- 4: CZ certificates ----
Outcome cz_certificates() {
    std::mt19937_64 rng(104);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::size_t bad_d = 0, bad_s = 0, levels = 0, decomps = 0;
    std::string first;
    while (decomps < 200) {
        const std::size_t n = 4 + decomps % 125;
        const auto s = decomps % 2 ? vt::line(n) : vt::random_space(rng, n);
        const auto g = build_grid(s, 2.0, decomps);
        const auto sigma = vt::random_weight(rng, n, 1.0);
        const auto f = vt::random_fn(rng, n);
        const double eta = decomps % 3 ? 0.0 : 0.5 * u(rng);
        const auto mf = weighted_dyadic_maximal(g, s, eta, sigma, f);
        const double top = *std::max_element(mf.values.begin(), mf.values.end());
        if (top == 0.0) continue;
        const double lambda = top * (0.05 + 0.9 * u(rng));
        const auto d = cz_decompose(g, s, eta, sigma, f, lambda);
        const auto rep = cz_verify(g, s, d);
        const bool cover = cube_union(g, d.cubes) == superlevel_set(mf, lambda);
        if (!rep.pass || !cover) {
            ++bad_d;
            if (first.empty()) first = str(" first failure: decomposition ", decomps);
        }
        ++decomps;
    }
    for (std::size_t t = 0; t < 50; ++t) {
        const std::size_t n = 8 + t * 2;
        const auto s = t % 2 ? vt::line(n) : vt::random_space(rng, n);
        const auto g = build_grid(s, 2.0, t);
        const auto sigma = vt::random_weight(rng, n, 1.0);
        auto f = vt::random_fn(rng, n);
        f[rng() % n] += static_cast<double>(n) * n;
        const double eta = t % 3 ? 0.0 : 0.4 * u(rng);
        const auto st = cz_stack(g, s, eta, sigma, f);
        levels += st.levels.size();
        if (st.a != 2 * cz_constant(g, s, eta, sigma) || !cz_verify(g, s, st).pass) {
            ++bad_s;
            if (first.empty()) first = str(" first failure: stack ", t);
        }
    }
    return {bad_d == 0 && bad_s == 0,
            str("decomposition violations ", bad_d, "/200; stack violations ", bad_s, "/50 (", levels,
                " levels, a = 2 C_CZ)", first)};
}

// ---- 5: maximal operator oracle and domination ----
Outcome maximal_oracle() {
    std::mt19937_64 rng(105);
    std::uniform_real_distribution<double> eu(0.0, 0.9);
    std::size_t mismatches = 0;
    for (int t = 0; t < 100; ++t) {
        const std::size_t n = 2 + static_cast<std::size_t>(t % 63);
        const auto s = t % 3 == 0 ? vt::line(n) : vt::random_space(rng, n, t % 3 == 1 ? 1.0 : 1.6);
        const auto f = vt::random_fn(rng, n);
        const double eta = t % 4 == 0 ? 0.0 : eu(rng);
        const auto r = fractional_maximal(s, eta, f);
        const auto ref = vt::brute_maximal(s, eta, f);
        for (std::size_t x = 0; x < n; ++x) mismatches += r.values[x] != ref[x];
    }

    std::vector<DominationConstants> cs;
    bool finite = true;
    for (std::size_t n : {32, 64, 128}) {
        const auto s = vt::line(n);
        const auto fam = build_grid_family(s, kDefaultGridCount, 1);
        std::mt19937_64 frng(56);
        std::vector<PointFn> fs;
        for (int k = 0; k < 10; ++k) fs.push_back(vt::random_fn(frng, n));
        for (std::size_t i = 0; i < n; ++i) {
            PointFn d(n, 0.0);
            d[i] = 1.0;
            fs.push_back(d);
        }
        cs.push_back(domination_constants(s, fam, 0.0, fs));
        finite = finite && cs.back().c_low > 0 && std::isfinite(cs.back().c_high);
    }
    auto spread = [&](auto get) {
        double lo = get(cs[0]), hi = lo;
        for (const auto& c : cs) {
            lo = std::min(lo, get(c));
            hi = std::max(hi, get(c));
        }
        return hi / lo;
    };
    const double sl = spread([](const DominationConstants& c) { return c.c_low; });
    const double sh = spread([](const DominationConstants& c) { return c.c_high; });
    return {mismatches == 0 && finite && sl <= 2.0 && sh <= 2.0,
            str("brute-force mismatches ", mismatches, " over 100 functions; c_low ", cs[0].c_low, "/", cs[1].c_low,
                "/", cs[2].c_low, " (spread ", sl, "), c_high ", cs[0].c_high, "/", cs[1].c_high, "/",
                cs[2].c_high, " (spread ", sh, ") for n=32/64/128")};
}

// ---- 6: weight identities ----
Outcome weight_identities() {
    std::mt19937_64 rng(106);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    double dual_err = 0.0;
    for (int t = 0; t < 500; ++t) {
        const std::size_t n = 4 + static_cast<std::size_t>(t) % 29;
        const auto s = t % 2 ? vt::line(n) : vt::random_space(rng, n, t % 4 ? 1.0 : 1.5);
        const auto p = t % 3 ? vt::lh_exponent(s, 1.3 + u(rng), u(rng), t % n) : vt::random_exponent(rng, n, 1.2, 3.0);
        const auto q = exponent_from_eta(p, t % 2 ? 0.0 : 0.2 * u(rng));
        const auto w = vt::random_weight(rng, n, 1.5);
        const auto [a, b] = dual_constants(s, p, q, w);
        dual_err = std::max(dual_err, std::fabs(a - b) / a);
    }

    std::size_t unit_cases = 0, unit_bad = 0;
    for (std::size_t n : {1, 2, 7, 16, 33}) {
        for (int k = 0; k < 2; ++k) {
            const auto s = k ? vt::line(n) : vt::random_space(rng, n);
            for (double p : {1.0, 1.5, 2.0, 3.0, 8.0}) {
                for (double eta : {0.0, 0.1, 0.1 / p}) {
                    const auto pe = Exponent::constant(n, p);
                    const auto q = exponent_from_eta(pe, eta);
                    ++unit_cases;
                    unit_bad += apq_constant(s, pe, q, PointFn(n, 1.0)).value != 1.0;
                }
            }
        }
    }

    std::size_t weights = 0, infinite = 0;
    for (const auto& cc : default_corpus()) {
        const auto s = corpus_space(cc).build();
        const auto p = exponent_from_json(cc.p, s);
        const auto q = resolve_q(p, cc.q, cc.eta, s);
        const auto w = weight_from_json(cc.weight, s);
        if (!std::isfinite(apq_constant(s, p, q, w).value)) continue;
        const auto rec = derived_measures(s, p, q, w);
        ++weights;
        infinite += !a_infty_diagnostics(s, rec.W_measure, 1).finite();
        infinite += !a_infty_diagnostics(s, rec.sigma_measure, 2).finite();
    }
    return {dual_err <= 1e-9 && unit_bad == 0 && infinite == 0 && weights > 0,
            str("duality max rel err ", dual_err, " over 500 (1e-9); [1] != 1 in ", unit_bad, "/", unit_cases,
                " constant-exponent cases; A_infty non-finite in ", infinite, " of ", 2 * weights,
                " W/sigma measures")};
}

// ---- 7: strong, weak and necessity sweeps on the line ----
Outcome sweeps() {
    const Json p2 = {{"type", "constant"}, {"value", 2.0}};
    const Json lh = {{"type", "log-holder"}, {"p_inf", 1.6}, {"amplitude", 0.5}, {"base_point", 0}};
    const Json unit = {{"type", "constant"}};
    const Json mild = {{"type", "power"}, {"a", 0.3}, {"base_point", 0}};
    const Json failing = {{"type", "power"}, {"a", -1.5}, {"base_point", 0}};
    auto config = [](const Json& p, std::optional<double> eta, const Json& w) {
        ExperimentConfig c;
        c.sizes = {32, 64, 128, 256};
        c.p = p;
        c.eta = eta;
        c.weight = w;
        return c;
    };
    struct Case {
        const char* name;
        ExperimentConfig cfg;
        bool growing;
    };
    const std::vector<Case> cases{
        {"p=2 w=1", config(p2, std::nullopt, unit), false},
        {"p=2 w=|x|^0.3", config(p2, std::nullopt, mild), false},
        {"p=LH eta=0.1 w=1", config(lh, 0.1, unit), false},
        {"p=LH eta=0.1 w=|x|^0.3", config(lh, 0.1, mild), false},
        {"p=2 w=|x|^-1.5", config(p2, std::nullopt, failing), true},
        {"p=LH eta=0.1 w=|x|^-1.5", config(lh, 0.1, failing), true},
    };
    bool pass = true;
    std::ostringstream detail;
    detail.precision(4);
    for (const auto& c : cases) {
        auto cfg = c.cfg;
        cfg.expect = c.growing ? "growing" : "bounded";
        const auto strong = cmd_strong(cfg);
        bool ok = strong.pass;
        if (c.growing) {
            ok = ok && strong.report["trend"]["apq"] == "growing";
        } else {
            ok = ok && cmd_weak(cfg).pass;
        }
        cfg.expect.reset();
        const auto nec = cmd_necessity(cfg);
        ok = ok && nec.pass;
        pass = pass && ok;
        const auto& rows = strong.report["rows"];
        detail << "\n    " << c.name << ": " << (ok ? "ok" : "FAIL") << " apq "
               << rows.front()["apq"].get<double>() << "->" << rows.back()["apq"].get<double>() << ", strong "
               << rows.front()["strong_ratio"].get<double>() << "->" << rows.back()["strong_ratio"].get<double>()
               << " (" << strong.report["trend"]["strong_ratio"].get<std::string>() << "), C_nec "
               << nec.report["necessity"]["c_nec_fitted"].get<double>() << " spread "
               << nec.report["necessity"]["c_nec_spread"].get<double>();
    }
    return {pass, str("n=32..256 on the line", detail.str())};
}

// ---- 8: determinism of verify-all ----
Outcome determinism() {
    const auto cases = default_corpus();
    const auto a = cmd_verify_all(cases, {});
    const auto b = cmd_verify_all(cases, {});
    const bool same = a.report.dump(2) == b.report.dump(2) && a.csv == b.csv;
    return {same && a.pass,
            str("reports ", same ? "byte-identical" : "DIFFER", "; default corpus ", a.pass ? "passes" : "fails", " (",
                a.report.dump(2).size(), " bytes)")};
}

}  // namespace

int main() {
    struct Criterion {
        const char* name;
        double limit_seconds;
        std::function<Outcome()> run;
    };
    const std::vector<Criterion> criteria{
        {"exact-constant lemmas", 60, exact_constants},
        {"Luxemburg norm oracles", 10, norm_oracles},
        {"dyadic grid certification", 30, grid_certification},
        {"CZ certificates", 60, cz_certificates},
        {"maximal operator oracle", 120, maximal_oracle},
        {"weight identities", 120, weight_identities},
        {"strong/weak/necessity sweeps", 600, sweeps},
        {"verify-all determinism", 600, determinism},
    };
    int failed = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        const auto& c = criteria[i];
        const auto t0 = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = c.run();
        } catch (const std::exception& e) {
            o = {false, str("exception: ", e.what())};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        const bool pass = o.pass && secs < c.limit_seconds;
        failed += !pass;
        std::printf("criterion %zu %s: %s  %s [%.2f s, limit %.0f s]\n", i + 1, c.name, pass ? "PASS" : "FAIL",
                    o.detail.c_str(), secs, c.limit_seconds);
        std::fflush(stdout);
    }
    std::printf("%d/%zu criteria pass\n", static_cast<int>(criteria.size()) - failed, criteria.size());
    return failed ? 1 : 0;
}
