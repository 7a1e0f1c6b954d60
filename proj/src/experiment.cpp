#include "vexmax/experiment.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <random>
#include <sstream>

#include "vexmax/czd.hpp"
#include "vexmax/error.hpp"
#include "vexmax/exact_sum.hpp"
#include "vexmax/maximal.hpp"
#include "vexmax/norm.hpp"
#include "vexmax/weights.hpp"

namespace vexmax {
namespace {

std::uint64_t mix(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

std::uint64_t mix(std::uint64_t a, std::uint64_t b) { return mix(a ^ mix(b + 0x632be59bd9b4e019ULL)); }

class Stopwatch {
public:
    Stopwatch(Timings* t, std::string key) : t_(t), key_(std::move(key)), start_(std::chrono::steady_clock::now()) {}
    ~Stopwatch() {
        if (t_) {
            (*t_)[key_] += std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
        }
    }

private:
    Timings* t_;
    std::string key_;
    std::chrono::steady_clock::time_point start_;
};

PointFn random_function(std::mt19937_64& rng, std::size_t n) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    PointFn f(n);
    for (auto& v : f) v = u(rng) < 0.3 ? 0.0 : std::exp(4.0 * u(rng) - 2.0);
    return f;
}

SpaceSpec spec_from_case_json(const Json& j) {
    if (j.is_object() && j.contains("generator")) {
        const auto& g = j.at("generator");
        if (!g.is_string()) throw ValidationError("'generator' must be a string");
        if (!j.contains("n") || !j.at("n").is_number_integer() || j.at("n").get<long long>() <= 0) {
            throw ValidationError("generator needs a positive integer 'n'");
        }
        const std::uint64_t seed = j.value("seed", std::uint64_t{1});
        return generate_space(g.get<std::string>(), static_cast<std::size_t>(j.at("n").get<long long>()), seed);
    }
    return space_spec_from_json(j);
}

Json ball_summary(const QuasiMetricSpace& s, std::size_t index) {
    const auto& b = s.balls()[index];
    return {{"index", index}, {"center", b.center}, {"radius", b.radius}, {"measure", b.measure}, {"size", b.count}};
}

Json config_json(const ExperimentConfig& cfg) {
    Json j;
    if (cfg.space) {
        j["space"] = "file";
    } else {
        j["generator"] = cfg.generator;
        j["sizes"] = cfg.sizes;
    }
    j["p"] = cfg.p;
    if (cfg.q) j["q"] = *cfg.q;
    if (cfg.eta) j["eta"] = *cfg.eta;
    j["weight"] = cfg.weight;
    j["grids"] = cfg.grids;
    j["seed"] = cfg.seed;
    j["tol"] = cfg.tol;
    j["random_functions"] = cfg.random_functions;
    j["ball_indicators"] = cfg.ball_indicators;
    if (cfg.expect) j["expect"] = *cfg.expect;
    return j;
}

Json calibration_json() {
    return {{"growth_threshold_per_doubling", kGrowthThreshold},
            {"min_doublings_for_growth", kMinDoublings},
            {"label", "artifact-level calibration, not a constant of the theory"}};
}

Json base_report(const char* command, const ExperimentConfig& cfg, const std::vector<SweepRow>& rows) {
    Json r;
    r["command"] = command;
    r["config"] = config_json(cfg);
    r["inputs"] = cfg.inputs;
    r["calibration"] = calibration_json();
    Json arr = Json::array();
    for (const auto& row : rows) {
        arr.push_back({{"n", row.n},
                       {"apq", row.apq},
                       {"apq_ball", row.apq_ball},
                       {"strong_ratio", row.strong_ratio},
                       {"weak_ratio", row.weak_ratio},
                       {"strong_witness", row.strong_witness},
                       {"weak_witness", row.weak_witness},
                       {"family_size", row.family_size},
                       {"extremal_weak_ratio", row.extremal_weak},
                       {"c_nec", row.c_nec}});
    }
    r["rows"] = arr;
    return r;
}

std::string rows_csv(const std::vector<SweepRow>& rows) {
    std::ostringstream os;
    os.precision(17);
    os << "n,apq,strong_ratio,weak_ratio,extremal_weak_ratio,c_nec\n";
    for (const auto& r : rows) {
        os << r.n << ',' << r.apq << ',' << r.strong_ratio << ',' << r.weak_ratio << ',' << r.extremal_weak << ','
           << r.c_nec << '\n';
    }
    return os.str();
}

std::vector<std::size_t> row_sizes(const std::vector<SweepRow>& rows) {
    std::vector<std::size_t> out;
    for (const auto& r : rows) out.push_back(r.n);
    return out;
}

template <typename F>
std::vector<double> column(const std::vector<SweepRow>& rows, F get) {
    std::vector<double> out;
    for (const auto& r : rows) out.push_back(get(r));
    return out;
}

// Shared verdict for strong and weak: the ratio trend must not contradict the
// apq trend and must match --expect when given.
CommandReport trend_report(const char* command, const ExperimentConfig& cfg, const std::vector<SweepRow>& rows,
                           const std::vector<double>& ratios, const char* ratio_key) {
    CommandReport out;
    out.report = base_report(command, cfg, rows);
    out.csv = rows_csv(rows);
    const auto sizes = row_sizes(rows);
    const Trend ta = classify_trend(sizes, column(rows, [](const SweepRow& r) { return r.apq; }));
    const Trend tr = classify_trend(sizes, ratios);
    out.report["trend"] = {{"apq", trend_name(ta)}, {ratio_key, trend_name(tr)}};
    Json reasons = Json::array();
    if ((ta == Trend::Bounded && tr == Trend::Growing) || (ta == Trend::Growing && tr == Trend::Bounded)) {
        reasons.push_back(std::string("apq trend is ") + trend_name(ta) + " but " + ratio_key + " trend is " +
                          trend_name(tr));
    }
    if (cfg.expect && *cfg.expect != trend_name(tr)) {
        reasons.push_back(std::string(ratio_key) + " trend is " + trend_name(tr) + ", expected " + *cfg.expect);
    }
    out.pass = reasons.empty();
    out.report["verdict"] = {{"pass", out.pass}, {"reasons", reasons}};
    return out;
}

// ---- verify-all helpers ----

struct CheckLog {
    Json checks = Json::array();
    bool pass = true;
    void add(const std::string& name, bool ok, std::size_t count, const std::string& detail) {
        checks.push_back({{"check", name}, {"pass", ok}, {"count", count}, {"detail", detail}});
        pass = pass && ok;
    }
};

template <typename... Args>
std::string str(Args&&... args) {
    std::ostringstream os;
    os.precision(17);
    (os << ... << args);
    return os.str();
}

void check_space(const QuasiMetricSpace& s, std::mt19937_64& rng, CheckLog& log) {
    const std::size_t n = s.size();
    std::size_t count = 0;
    std::string bad;
    for (PointId x = 0; x < n && bad.empty(); ++x) {
        for (PointId y = 0; y < n && bad.empty(); ++y) {
            for (PointId z = 0; z < n; ++z) {
                ++count;
                if (x != y && s.dist(x, y) > s.a0() * (s.dist(x, z) + s.dist(z, y))) {
                    bad = str("triple (", x, ",", y, ",", z, ")");
                    break;
                }
            }
        }
    }
    log.add("space.quasi_triangle", bad.empty(), count, bad.empty() ? str("a0=", s.a0()) : bad);

    count = 0;
    bad.clear();
    for (PointId x = 0; x < n && bad.empty(); ++x) {
        for (double r : s.candidate_radii(x)) {
            ++count;
            const double small = ball(s, x, r).measure;
            const double big = ball(s, x, 2 * r).measure;
            if (big > s.c_mu() * small) {
                bad = str("center ", x, " radius ", r);
                break;
            }
        }
    }
    log.add("space.doubling", bad.empty(), count, bad.empty() ? str("c_mu=", s.c_mu()) : bad);

    const double c = lower_mass_bound_report(s);
    const double power = std::log2(s.c_mu());
    std::uniform_int_distribution<std::size_t> pick(0, n - 1);
    count = 0;
    bad.clear();
    for (int t = 0; t < 2000 && bad.empty(); ++t) {
        const PointId x = pick(rng);
        const auto rx = s.candidate_radii(x);
        const double R = rx[rng() % rx.size()];
        const auto big = ball(s, x, R);
        const PointId y = big.members[rng() % big.members.size()];
        const auto ry = s.candidate_radii(y);
        const double r = ry[rng() % ry.size()];
        if (!(r < R)) continue;
        ++count;
        const double lhs = ball(s, y, r).measure / big.measure;
        if (lhs < c * std::pow(r / R, power) * (1 - 1e-12)) bad = str("x=", x, " R=", R, " y=", y, " r=", r);
    }
    log.add("space.lower_mass_bound", c > 0.0 && bad.empty(), count, bad.empty() ? str("C=", c) : bad);
}

}  // namespace

SpaceSpec corpus_space(const CorpusCase& c) { return spec_from_case_json(c.space); }

// ---- generators ----

SpaceSpec generate_line(std::size_t n) {
    if (n == 0) throw ValidationError("line needs n >= 1");
    SpaceSpec s;
    s.dim = 1;
    for (std::size_t i = 0; i < n; ++i) {
        s.points.push_back(i);
        s.coords.push_back(static_cast<double>(i) / static_cast<double>(n));
        s.mass.push_back(1.0 / static_cast<double>(n));
    }
    return s;
}

SpaceSpec generate_torus_grid(std::size_t n) {
    const auto m = static_cast<std::size_t>(std::llround(std::sqrt(static_cast<double>(n))));
    if (n == 0 || m * m != n) throw ValidationError("torus-grid needs n to be a perfect square");
    SpaceSpec s;
    s.dist.assign(n * n, 0.0);
    auto wrap = [&](std::size_t a, std::size_t b) {
        const std::size_t d = a > b ? a - b : b - a;
        return static_cast<double>(std::min(d, m - d)) / static_cast<double>(m);
    };
    for (std::size_t i = 0; i < n; ++i) {
        s.points.push_back(i);
        s.mass.push_back(1.0 / static_cast<double>(n));
        for (std::size_t j = 0; j < n; ++j) {
            s.dist[i * n + j] = std::hypot(wrap(i / m, j / m), wrap(i % m, j % m));
        }
    }
    return s;
}

SpaceSpec generate_cantor_like(std::size_t n) {
    if (n == 0 || (n & (n - 1)) != 0) throw ValidationError("cantor-like needs n to be a power of two");
    std::size_t level = 0;
    while ((std::size_t{1} << level) < n) ++level;
    SpaceSpec s;
    s.dim = 1;
    for (std::size_t i = 0; i < n; ++i) {
        double x = 0.0, scale = 1.0;
        for (std::size_t b = level; b-- > 0;) {
            scale /= 3.0;
            if (i >> b & 1U) x += 2.0 * scale;
        }
        s.points.push_back(i);
        s.coords.push_back(x);
        s.mass.push_back(1.0 / static_cast<double>(n));
    }
    return s;
}

SpaceSpec generate_random_metric(std::size_t n, std::uint64_t seed) {
    if (n == 0) throw ValidationError("random-metric needs n >= 1");
    std::mt19937_64 rng(mix(seed, n));
    std::uniform_real_distribution<double> u(0.0, 1.0), m(0.5, 2.0);
    std::vector<double> xy(2 * n);
    for (auto& v : xy) v = u(rng);
    SpaceSpec s;
    s.dist.assign(n * n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        s.points.push_back(i);
        s.mass.push_back(m(rng) / static_cast<double>(n));
        for (std::size_t j = i + 1; j < n; ++j) {
            const double d = std::pow(std::hypot(xy[2 * i] - xy[2 * j], xy[2 * i + 1] - xy[2 * j + 1]), 1.5);
            const double v = std::max(d, 1e-6) * std::exp2(2.0 * u(rng) - 1.0);
            s.dist[i * n + j] = s.dist[j * n + i] = v;
        }
    }
    // Snap quasi-triangle violations; values only decrease, so this terminates.
    for (bool changed = true; changed;) {
        changed = false;
        for (std::size_t z = 0; z < n; ++z) {
            for (std::size_t i = 0; i < n; ++i) {
                for (std::size_t j = i + 1; j < n; ++j) {
                    if (i == z || j == z) continue;
                    const double cap = 2.0 * (s.dist[i * n + z] + s.dist[z * n + j]);
                    if (s.dist[i * n + j] > cap) {
                        s.dist[i * n + j] = s.dist[j * n + i] = cap;
                        changed = true;
                    }
                }
            }
        }
    }
    const auto space = s.build();
    if (space.a0() > 2.0) throw ConstructionError(str("random-metric snapping left a0 = ", space.a0()));
    return s;
}

SpaceSpec generate_space(const std::string& kind, std::size_t n, std::uint64_t seed) {
    if (kind == "line") return generate_line(n);
    if (kind == "torus-grid") return generate_torus_grid(n);
    if (kind == "cantor-like") return generate_cantor_like(n);
    if (kind == "random-metric") return generate_random_metric(n, seed);
    throw ValidationError("unknown generator '" + kind + "'");
}

Exponent resolve_q(const Exponent& p, const std::optional<Json>& q_spec, std::optional<double> eta,
                   const QuasiMetricSpace& space) {
    if (q_spec && eta) throw ValidationError("give either q or eta, not both");
    if (q_spec) return exponent_from_json(*q_spec, space);
    return exponent_from_eta(p, eta.value_or(0.0));
}

// ---- sweeps ----

const char* trend_name(Trend t) {
    switch (t) {
        case Trend::Bounded: return "bounded";
        case Trend::Growing: return "growing";
        default: return "inconclusive";
    }
}

Trend classify_trend(const std::vector<std::size_t>& sizes, const std::vector<double>& values) {
    if (sizes.size() != values.size() || sizes.size() < 2) return Trend::Inconclusive;
    bool all_small = true, all_large = true;
    double doublings = 0.0;
    for (std::size_t i = 1; i < sizes.size(); ++i) {
        const double steps = std::log2(static_cast<double>(sizes[i]) / static_cast<double>(sizes[i - 1]));
        if (!(steps > 0.0) || !(values[i - 1] > 0.0) || !std::isfinite(values[i])) return Trend::Inconclusive;
        const double per = std::pow(values[i] / values[i - 1], 1.0 / steps);
        all_small = all_small && per < kGrowthThreshold;
        all_large = all_large && per >= kGrowthThreshold;
        doublings += steps;
    }
    if (all_small) return Trend::Bounded;
    if (all_large && doublings >= static_cast<double>(kMinDoublings) - 1e-9) return Trend::Growing;
    return Trend::Inconclusive;
}

std::vector<SweepRow> run_sweep(const ExperimentConfig& cfg, Timings* timings) {
    std::vector<SpaceSpec> specs;
    if (cfg.space) {
        specs.push_back(space_spec_from_json(*cfg.space));
    } else {
        if (cfg.sizes.empty()) throw ValidationError("no sizes to sweep");
        for (std::size_t n : cfg.sizes) specs.push_back(generate_space(cfg.generator, n, cfg.seed));
    }
    std::vector<SweepRow> rows;
    for (const auto& spec : specs) {
        const auto space = spec.build();
        const std::size_t n = space.size();
        const std::string tag = str("n=", n, ".");
        const auto p = exponent_from_json(cfg.p, space);
        const auto q = resolve_q(p, cfg.q, cfg.eta, space);
        const double eta = check_eta_relation(p, q);
        const auto w = weight_from_json(cfg.weight, space);

        SweepRow row;
        row.n = n;
        ApqResult apq;
        {
            Stopwatch sw(timings, tag + "apq");
            apq = apq_constant(space, p, q, w, cfg.tol);
        }
        row.apq = apq.value;
        row.apq_ball = ball_summary(space, apq.witness);

        std::vector<PointFn> family;
        std::vector<std::string> labels;
        const auto extremal = extremal_test_functions(space, p, w, space.members(space.balls()[apq.witness]));
        for (std::size_t i = 0; i < extremal.size(); ++i) {
            family.push_back(extremal[i]);
            labels.push_back(str("extremal[", i, "]"));
        }
        std::mt19937_64 rng(mix(cfg.seed, n));
        std::vector<std::size_t> picked;
        for (std::size_t i = 0; i < cfg.ball_indicators; ++i) {
            const std::size_t b = rng() % space.balls().size();
            if (std::find(picked.begin(), picked.end(), b) != picked.end()) continue;
            picked.push_back(b);
            PointFn f(n, 0.0);
            for (PointId x : space.members(space.balls()[b])) f[x] = 1.0;
            family.push_back(std::move(f));
            labels.push_back(str("ball[", b, "]"));
        }
        for (std::size_t i = 0; i < cfg.random_functions; ++i) {
            family.push_back(random_function(rng, n));
            labels.push_back(str("random[", i, "]"));
        }
        row.family_size = family.size();
        {
            Stopwatch sw(timings, tag + "operator");
            const auto r = operator_norm_estimate(space, p, q, w, eta, family, cfg.tol);
            row.strong_ratio = r.strong_ratio;
            row.weak_ratio = r.weak_ratio;
            row.strong_witness = labels[r.strong_witness];
            row.weak_witness = labels[r.weak_witness];
            const auto e = operator_norm_estimate(space, p, q, w, eta, extremal, cfg.tol);
            row.extremal_weak = e.weak_ratio;
            row.c_nec = row.apq / row.extremal_weak;
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

CommandReport cmd_strong(const ExperimentConfig& cfg, Timings* timings) {
    const auto rows = run_sweep(cfg, timings);
    return trend_report("strong", cfg, rows, column(rows, [](const SweepRow& r) { return r.strong_ratio; }),
                        "strong_ratio");
}

CommandReport cmd_weak(const ExperimentConfig& cfg, Timings* timings) {
    const auto rows = run_sweep(cfg, timings);
    auto out = trend_report("weak", cfg, rows, column(rows, [](const SweepRow& r) { return r.weak_ratio; }),
                            "weak_ratio");
    for (const auto& r : rows) {
        if (r.weak_ratio > r.strong_ratio * (1 + 1e-12)) {
            out.pass = false;
            out.report["verdict"]["pass"] = false;
            out.report["verdict"]["reasons"].push_back(str("weak ratio above strong ratio at n=", r.n));
        }
    }
    return out;
}

CommandReport cmd_necessity(const ExperimentConfig& cfg, Timings* timings) {
    const auto rows = run_sweep(cfg, timings);
    CommandReport out;
    out.report = base_report("necessity", cfg, rows);
    out.csv = rows_csv(rows);
    double lo = 1e300, hi = 0.0;
    bool finite = true;
    for (const auto& r : rows) {
        finite = finite && std::isfinite(r.c_nec) && r.c_nec > 0.0;
        lo = std::min(lo, r.c_nec);
        hi = std::max(hi, r.c_nec);
    }
    const double spread = hi / lo;
    out.pass = finite && spread <= 2.0;
    Json reasons = Json::array();
    if (!finite) reasons.push_back("C_nec is not finite on some row");
    if (finite && spread > 2.0) reasons.push_back(str("C_nec spread ", spread, " exceeds 2 across rows"));
    out.report["necessity"] = {{"c_nec_fitted", hi}, {"c_nec_spread", spread}};
    out.report["verdict"] = {{"pass", out.pass}, {"reasons", reasons}};
    return out;
}

// ---- invariant suite ----

std::vector<CorpusCase> default_corpus() {
    auto c = [](const char* type, double value) { return Json{{"type", type}, {"value", value}}; };
    auto lh = [](double p_inf, double amp) {
        return Json{{"type", "log-holder"}, {"p_inf", p_inf}, {"amplitude", amp}, {"base_point", 0}};
    };
    auto power = [](double a) { return Json{{"type", "power"}, {"a", a}, {"base_point", 0}}; };
    const Json one = {{"type", "constant"}};
    std::vector<CorpusCase> out;
    out.push_back({"line-16-unit", {{"generator", "line"}, {"n", 16}}, c("constant", 2.0), std::nullopt, 0.0, one});
    out.push_back({"line-32-lh-power", {{"generator", "line"}, {"n", 32}}, lh(1.6, 0.5), std::nullopt, 0.1,
                   power(0.3)});
    out.push_back({"torus-36-const", {{"generator", "torus-grid"}, {"n", 36}}, c("constant", 1.5), std::nullopt,
                   0.2, power(-0.2)});
    out.push_back({"cantor-16-lh", {{"generator", "cantor-like"}, {"n", 16}}, lh(2.0, 0.8), std::nullopt, 0.0,
                   power(0.2)});
    out.push_back({"random-metric-24", {{"generator", "random-metric"}, {"n", 24}, {"seed", 3}}, lh(1.8, 0.4),
                   std::nullopt, 0.15, one});
    return out;
}

std::vector<CorpusCase> corpus_from_json(const Json& j) {
    if (!j.is_array()) throw ValidationError("corpus must be a JSON array of cases");
    if (j.empty()) throw ValidationError("no cases");
    std::vector<CorpusCase> out;
    for (std::size_t i = 0; i < j.size(); ++i) {
        const auto& e = j[i];
        if (!e.is_object() || !e.contains("space") || !e.contains("p")) {
            throw ValidationError(str("corpus case ", i, " needs 'space' and 'p'"));
        }
        CorpusCase c;
        c.name = e.value("name", str("case-", i));
        c.space = e.at("space");
        c.p = e.at("p");
        if (e.contains("q")) c.q = e.at("q");
        if (e.contains("eta")) c.eta = e.at("eta").get<double>();
        if (e.contains("weight")) c.weight = e.at("weight");
        out.push_back(std::move(c));
    }
    return out;
}

Json corpus_to_json(const std::vector<CorpusCase>& cases) {
    Json arr = Json::array();
    for (const auto& c : cases) {
        Json e = {{"name", c.name}, {"space", c.space}, {"p", c.p}, {"weight", c.weight}};
        if (c.q) e["q"] = *c.q;
        if (c.eta) e["eta"] = *c.eta;
        arr.push_back(std::move(e));
    }
    return arr;
}

CommandReport cmd_verify_all(const std::vector<CorpusCase>& cases, const VerifyOptions& opt, Timings* timings) {
    if (cases.empty()) throw ValidationError("no cases");
    CommandReport out;
    Json results = Json::array();
    std::ostringstream csv;
    csv << "case,check,pass,count\n";
    for (std::size_t ci = 0; ci < cases.size(); ++ci) {
        const auto& cc = cases[ci];
        Stopwatch sw(timings, cc.name);
        CheckLog log;
        std::mt19937_64 rng(mix(opt.seed, ci));
        const auto space = spec_from_case_json(cc.space).build();
        const std::size_t n = space.size();
        const auto p = exponent_from_json(cc.p, space);
        const auto q = resolve_q(p, cc.q, cc.eta, space);
        const double eta = check_eta_relation(p, q);
        const auto w = weight_from_json(cc.weight, space);

        check_space(space, rng, log);

        // Grid properties (1)-(5) on every grid of the family.
        auto family = build_grid_family(space, opt.grids, mix(opt.seed, ci + 1000));
        if (opt.inject_bad_grid && ci == 0) {
            auto& g = family.front();
            g.set_claims(g.c_d() * 0.5, g.c_inner(), g.eps_child());
        }
        {
            std::string bad;
            for (std::size_t gi = 0; gi < family.size() && bad.empty(); ++gi) {
                const auto rep = verify_grid(family[gi], space);
                if (!rep.all_pass()) {
                    for (const auto* pc : {&rep.nesting, &rep.partition, &rep.parent_child, &rep.child_mass,
                                           &rep.sandwich}) {
                        if (!pc->pass) {
                            bad = str("grid ", gi, ": ", pc->witness);
                            break;
                        }
                    }
                }
            }
            log.add("grid.properties", bad.empty(), family.size(), bad);
        }

        // Norm lemmas.
        {
            std::size_t bad = 0;
            double worst = 0.0;
            const Exponent pc = p.conjugate();
            for (int t = 0; t < 20; ++t) {
                auto f = random_function(rng, n);
                f[t % n] += 1.0;
                const double nf = luxemburg_norm(space, p, f, opt.tol);
                PointFn g(f);
                for (auto& v : g) v /= nf;
                if (std::fabs(modular(space, p, g) - 1.0) > 1e-9) ++bad;
                const auto h = random_function(rng, n);
                ExactSum lhs;
                for (PointId x = 0; x < n; ++x) lhs.add(f[x] * h[x] * space.mass(x));
                const double rhs = nf * luxemburg_norm(space, pc, h, opt.tol);
                if (rhs > 0.0) worst = std::max(worst, lhs.value() / rhs);
                if (lhs.value() > 4.0 * rhs) ++bad;
            }
            log.add("norm.unit_ball_and_hoelder", bad == 0, 40, str("worst Hoelder ratio ", worst));
        }

        // Maximal operator: every value re-derived from its witness ball.
        {
            std::size_t bad = 0;
            for (int t = 0; t < 5; ++t) {
                const auto f = random_function(rng, n);
                const double e = t % 2 ? eta : 0.0;
                const auto r = fractional_maximal(space, e, f);
                for (PointId x = 0; x < n; ++x) {
                    const auto& b = space.balls()[r.witness[x]];
                    ExactSum s;
                    for (PointId y : space.members(b)) s.add(std::fabs(f[y]) * space.mass(y));
                    if (!space.contains(b, x) || std::pow(b.measure, e - 1.0) * s.value() != r.values[x]) ++bad;
                }
            }
            log.add("maximal.witnesses", bad == 0, 5 * n, str(bad, " mismatches"));
            std::vector<PointFn> fs;
            for (int t = 0; t < 5; ++t) fs.push_back(random_function(rng, n));
            const auto dc = domination_constants(space, family, eta, fs);
            log.add("maximal.domination", dc.c_low > 0.0 && std::isfinite(dc.c_high), fs.size(),
                    str("c_low=", dc.c_low, " c_high=", dc.c_high));
        }

        // CZ certificates with sigma = w^{-p'}.
        const auto rec = derived_measures(space, p, q, w);
        PointFn sigma(n);
        for (PointId x = 0; x < n; ++x) sigma[x] = rec.sigma_measure[x] / space.mass(x);
        {
            std::string bad;
            std::size_t count = 0;
            const auto& grid = family.back();
            std::uniform_real_distribution<double> u(0.05, 0.95);
            for (int t = 0; t < 5; ++t) {
                const auto f = random_function(rng, n);
                const auto m = weighted_dyadic_maximal(grid, space, eta, sigma, f);
                const double top = *std::max_element(m.values.begin(), m.values.end());
                if (top == 0.0) continue;
                const auto rep = cz_verify(grid, space, cz_decompose(grid, space, eta, sigma, f, top * u(rng)));
                count += rep.checks;
                if (!rep.pass && bad.empty()) bad = rep.failures.front();
            }
            for (int t = 0; t < 3; ++t) {
                auto f = random_function(rng, n);
                f[rng() % n] += static_cast<double>(n);
                const auto rep = cz_verify(grid, space, cz_stack(grid, space, eta, sigma, f));
                count += rep.checks;
                if (!rep.pass && bad.empty()) bad = rep.failures.front();
            }
            log.add("czd.certificates", bad.empty(), count, bad);
        }

        // Weight lemmas.
        {
            const auto [primal, dual] = dual_constants(space, p, q, w, opt.tol);
            const double rel = std::fabs(primal - dual) / primal;
            log.add("weights.duality", rel <= 1e-9, 1, str("apq=", primal, " dual=", dual, " rel=", rel));
            const auto sb = subset_bound_check(space, p, q, w, mix(opt.seed, ci + 2000), 8, 64, opt.tol);
            log.add("weights.subset_bound_16", sb.violations == 0, sb.checked, str("worst ratio ", sb.worst_ratio));
            if (std::isfinite(primal)) {
                const auto aw = a_infty_diagnostics(space, rec.W_measure, mix(opt.seed, ci + 3000));
                const auto as = a_infty_diagnostics(space, rec.sigma_measure, mix(opt.seed, ci + 4000));
                log.add("weights.a_infty", aw.finite() && as.finite(), aw.subsets_checked + as.subsets_checked,
                        str("W: c1=", aw.c1, " c2=", aw.c2, "; sigma: c1=", as.c1, " c2=", as.c2));
            }
            const PointFn ones(n, 1.0);
            const double unit = apq_constant(space, p, q, ones, opt.tol).value;
            const bool exact = !(p.is_constant() && q.is_constant()) || unit == 1.0;
            log.add("weights.unit_weight", std::isfinite(unit) && exact, 1, str("[1]=", unit));
        }

        for (const auto& c : log.checks) {
            csv << cc.name << ',' << c["check"].get<std::string>() << ',' << (c["pass"].get<bool>() ? "pass" : "fail")
                << ',' << c["count"].get<std::size_t>() << '\n';
        }
        results.push_back({{"case", cc.name}, {"n", n}, {"pass", log.pass}, {"checks", log.checks}});
        out.pass = out.pass && log.pass;
    }
    out.report = {{"command", "verify-all"},
                  {"config", {{"grids", opt.grids}, {"seed", opt.seed}, {"tol", opt.tol}}},
                  {"corpus", corpus_to_json(cases)},
                  {"cases", results},
                  {"pass", out.pass}};
    out.csv = csv.str();
    return out;
}

}  // namespace vexmax
