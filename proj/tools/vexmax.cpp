// vexmax command-line driver. Exit codes: 0 pass, 1 verdict failure, 2 input error.

#include <filesystem>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "vexmax/czd.hpp"
#include "vexmax/error.hpp"
#include "vexmax/experiment.hpp"
#include "vexmax/io.hpp"
#include "vexmax/maximal.hpp"
#include "vexmax/norm.hpp"
#include "vexmax/weights.hpp"

namespace fs = std::filesystem;
using namespace vexmax;

namespace {

struct Common {
    std::string space, p, q, weight, out, format = "json";
    std::optional<double> eta;
    std::size_t grids = kDefaultGridCount;
    std::uint64_t seed = 1;
    double tol = 1e-12;
};

void add_common(CLI::App* cmd, Common& c, bool needs_space) {
    auto* s = cmd->add_option("--space", c.space, "space JSON file");
    if (needs_space) s->required();
    cmd->add_option("--p", c.p, "exponent JSON file for p");
    auto* q = cmd->add_option("--q", c.q, "exponent JSON file for q");
    cmd->add_option("--eta", c.eta, "fractional order; q is derived from 1/q = 1/p - eta")->excludes(q);
    cmd->add_option("--weight", c.weight, "weight JSON file");
    cmd->add_option("--grids", c.grids, "number of dyadic grids")->capture_default_str();
    cmd->add_option("--seed", c.seed, "random seed")->capture_default_str();
    cmd->add_option("--tol", c.tol, "relative tolerance of norm solves")->capture_default_str();
    cmd->add_option("--out", c.out, "output directory (default: stdout)");
    cmd->add_option("--format", c.format, "csv or json")->check(CLI::IsMember({"csv", "json"}))->capture_default_str();
}

struct Inputs {
    std::map<std::string, Json> record;
    Json load(const std::string& role, const std::string& path) {
        const std::string text = read_text_file(path);
        record[role] = {{"source", path}, {"fnv1a", fnv1a_hex(text)}};
        try {
            return Json::parse(text);
        } catch (const Json::parse_error& e) {
            throw ValidationError("'" + path + "' is not valid JSON: " + e.what());
        }
    }
};

struct Loaded {
    SpaceSpec spec;
    QuasiMetricSpace space;
    Exponent p;
    Exponent q;
    PointFn w;
};

Loaded load_all(const Common& c, Inputs& in) {
    auto spec = space_spec_from_json(in.load("space", c.space));
    auto space = spec.build();
    Exponent p = c.p.empty() ? Exponent::constant(space.size(), 2.0) : exponent_from_json(in.load("p", c.p), space);
    std::optional<Json> qj;
    if (!c.q.empty()) qj = in.load("q", c.q);
    Exponent q = resolve_q(p, qj, c.eta, space);
    PointFn w = c.weight.empty() ? PointFn(space.size(), 1.0) : weight_from_json(in.load("weight", c.weight), space);
    return {std::move(spec), std::move(space), std::move(p), std::move(q), std::move(w)};
}

void emit(const Common& c, const std::string& stem, const Json& report, const std::string& csv) {
    const std::string body = c.format == "json" ? report.dump(2) + "\n" : csv;
    if (c.out.empty()) {
        std::cout << body;
        return;
    }
    fs::create_directories(c.out);
    write_text_file((fs::path(c.out) / (stem + "." + c.format)).string(), body);
}

void emit_timings(const Common& c, const Timings& t) {
    if (c.out.empty()) return;
    write_text_file((fs::path(c.out) / "timings.json").string(), Json(t).dump(2) + "\n");
}

std::vector<std::size_t> parse_sizes(const std::string& s) {
    std::vector<std::size_t> out;
    std::stringstream ss(s);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        try {
            const long long v = std::stoll(tok);
            if (v <= 0) throw ValidationError("sizes must be positive");
            out.push_back(static_cast<std::size_t>(v));
        } catch (const std::logic_error&) {
            throw ValidationError("bad size list '" + s + "'");
        }
    }
    if (out.empty()) throw ValidationError("empty size list");
    return out;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Fractional maximal operators on weighted variable Lebesgue spaces over finite quasi-metric spaces"};
    app.require_subcommand(1);
    Common c;

    // generate
    auto* gen = app.add_subcommand("generate", "write space, exponent and weight files");
    std::string kind = "line", p_type = "constant", w_type = "constant";
    std::size_t gen_n = 8;
    double p_value = 2.0, amplitude = 0.5, weight_a = 0.0;
    std::size_t base_point = 0;
    gen->add_option("--kind", kind, "line, torus-grid, cantor-like or random-metric")
        ->check(CLI::IsMember({"line", "torus-grid", "cantor-like", "random-metric"}))
        ->capture_default_str();
    gen->add_option("--n", gen_n, "number of points")->capture_default_str();
    gen->add_option("--seed", c.seed, "random seed")->capture_default_str();
    gen->add_option("--out", c.out, "output directory")->required();
    gen->add_option("--p-type", p_type, "constant or log-holder")
        ->check(CLI::IsMember({"constant", "log-holder"}))
        ->capture_default_str();
    gen->add_option("--p-value", p_value, "constant value, or p_inf for log-holder")->capture_default_str();
    gen->add_option("--amplitude", amplitude, "log-holder amplitude")->capture_default_str();
    gen->add_option("--base-point", base_point, "base point for log-holder and power")->capture_default_str();
    gen->add_option("--weight-type", w_type, "constant or power")
        ->check(CLI::IsMember({"constant", "power"}))
        ->capture_default_str();
    gen->add_option("--weight-a", weight_a, "power weight exponent")->capture_default_str();

    // norm
    auto* norm = app.add_subcommand("norm", "modular, Luxemburg, weighted and weak norms of a function");
    add_common(norm, c, true);
    std::string f_path;
    norm->add_option("--f", f_path, "function JSON file")->required();

    // maximal
    auto* maxi = app.add_subcommand("maximal", "fractional maximal function and its dyadic versions");
    add_common(maxi, c, true);
    maxi->add_option("--f", f_path, "function JSON file")->required();

    // weights
    auto* wts = app.add_subcommand("weights", "A_{p,q} constants, duality, specializations, A_infty");
    add_common(wts, c, true);

    // czd
    auto* czd = app.add_subcommand("czd", "Calderon-Zygmund decomposition at one height or stacked heights");
    add_common(czd, c, true);
    std::string sigma_path;
    std::optional<double> lambda, a;
    bool stack = false;
    czd->add_option("--f", f_path, "function JSON file")->required();
    czd->add_option("--sigma", sigma_path, "sigma JSON file (default: w^{-p'} when --weight is given, else 1)");
    czd->add_option("--lambda", lambda, "height for a single decomposition");
    czd->add_flag("--stack", stack, "stacked heights a^k from k0");
    czd->add_option("--a", a, "stack base (default 2 C_CZ)");

    // sweeps
    ExperimentConfig cfg;
    std::string sizes = "32,64,128", expect;
    std::size_t rand_fns = cfg.random_functions, balls = cfg.ball_indicators;
    auto add_sweep = [&](CLI::App* cmd) {
        add_common(cmd, c, false);
        cmd->add_option("--generator", cfg.generator, "space generator when --space is absent")
            ->check(CLI::IsMember({"line", "torus-grid", "cantor-like", "random-metric"}))
            ->capture_default_str();
        cmd->add_option("--sizes", sizes, "comma-separated refinement sizes")->capture_default_str();
        cmd->add_option("--random-functions", rand_fns, "seeded random test functions")->capture_default_str();
        cmd->add_option("--ball-indicators", balls, "seeded ball indicators")->capture_default_str();
        cmd->add_option("--expect", expect, "expected ratio trend")->check(CLI::IsMember({"bounded", "growing"}));
    };
    auto* strong = app.add_subcommand("strong", "strong-type ratio sweep");
    add_sweep(strong);
    auto* weak = app.add_subcommand("weak", "weak-type ratio sweep");
    add_sweep(weak);
    auto* nec = app.add_subcommand("necessity", "extremal-family lower bound against the A_{p,q} constant");
    add_sweep(nec);

    // verify-all
    auto* ver = app.add_subcommand("verify-all", "run every invariant suite on a corpus");
    std::string corpus_path;
    bool inject = false;
    ver->add_option("--corpus", corpus_path, "corpus JSON file (default: built-in corpus)");
    ver->add_option("--grids", c.grids, "number of dyadic grids")->capture_default_str();
    ver->add_option("--seed", c.seed, "random seed")->capture_default_str();
    ver->add_option("--tol", c.tol, "relative tolerance of norm solves")->capture_default_str();
    ver->add_option("--out", c.out, "output directory (default: stdout)");
    ver->add_option("--format", c.format, "csv or json")->check(CLI::IsMember({"csv", "json"}))->capture_default_str();
    ver->add_flag("--inject-bad-grid", inject)->group("");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        Inputs in;
        if (gen->parsed()) {
            const auto spec = generate_space(kind, gen_n, c.seed);
            fs::create_directories(c.out);
            write_text_file((fs::path(c.out) / "space.json").string(), space_spec_to_json(spec).dump(2) + "\n");
            Json pj = p_type == "constant"
                          ? Json{{"type", "constant"}, {"value", p_value}}
                          : Json{{"type", "log-holder"}, {"p_inf", p_value}, {"amplitude", amplitude},
                                 {"base_point", base_point}};
            Json wj = w_type == "constant" || weight_a == 0.0
                          ? Json{{"type", "constant"}}
                          : Json{{"type", "power"}, {"a", weight_a}, {"base_point", base_point}};
            const auto space = spec.build();
            exponent_from_json(pj, space);
            weight_from_json(wj, space);
            write_text_file((fs::path(c.out) / "p.json").string(), pj.dump(2) + "\n");
            write_text_file((fs::path(c.out) / "weight.json").string(), wj.dump(2) + "\n");
            std::cout << "wrote " << space.size() << "-point " << kind << " space (a0=" << space.a0()
                      << ", c_mu=" << space.c_mu() << ") to " << c.out << "\n";
            return 0;
        }
        if (norm->parsed()) {
            auto L = load_all(c, in);
            const auto f = function_from_json(in.load("f", f_path), L.space.size());
            PointFn g(f.size());
            for (std::size_t x = 0; x < f.size(); ++x) g[x] = std::fabs(f[x]);
            Json r = {{"modular_p", modular(L.space, L.p, f)},
                      {"norm_p", luxemburg_norm(L.space, L.p, f, c.tol)},
                      {"weighted_norm_p", weighted_norm(L.space, L.p, L.w, f, c.tol)},
                      {"weighted_norm_q", weighted_norm(L.space, L.q, L.w, f, c.tol)},
                      {"weak_norm_q", weak_norm(L.space, L.q, L.w, g, c.tol)},
                      {"inputs", in.record}};
            std::ostringstream csv;
            csv.precision(17);
            csv << "modular_p,norm_p,weighted_norm_p,weighted_norm_q,weak_norm_q\n"
                << r["modular_p"].get<double>() << ',' << r["norm_p"].get<double>() << ','
                << r["weighted_norm_p"].get<double>() << ',' << r["weighted_norm_q"].get<double>() << ','
                << r["weak_norm_q"].get<double>() << '\n';
            emit(c, "norm", r, csv.str());
            return 0;
        }
        if (maxi->parsed()) {
            auto L = load_all(c, in);
            const double eta = check_eta_relation(L.p, L.q);
            const auto f = function_from_json(in.load("f", f_path), L.space.size());
            const auto m = fractional_maximal(L.space, eta, f);
            const auto family = build_grid_family(L.space, c.grids, c.seed);
            Json dy = Json::array();
            for (const auto& g : family) dy.push_back(maximal_to_json(dyadic_fractional_maximal(g, L.space, eta, f)));
            Json r = {{"eta", eta}, {"maximal", maximal_to_json(m)}, {"dyadic", dy}, {"inputs", in.record}};
            emit(c, "maximal", r, maximal_to_csv(m));
            return 0;
        }
        if (wts->parsed()) {
            auto L = load_all(c, in);
            const auto apq = apq_constant(L.space, L.p, L.q, L.w, c.tol);
            const auto [primal, dual] = dual_constants(L.space, L.p, L.q, L.w, c.tol);
            const auto sp = specialized_constants(L.space, L.p, L.q, L.w, c.tol);
            const auto rec = derived_measures(L.space, L.p, L.q, L.w);
            auto ainf = [](const AInftyReport& a) {
                return Json{{"epsilon", a.epsilon}, {"c2", a.c2}, {"delta", a.delta}, {"c1", a.c1},
                            {"doubling_of_weight", a.doubling_of_weight}, {"finite", a.finite()},
                            {"subsets_checked", a.subsets_checked}};
            };
            const auto family = build_grid_family(L.space, c.grids, c.seed);
            Json dyadic = Json::array();
            for (const auto& g : family) dyadic.push_back(apq_dyadic_constant(g, L.space, L.p, L.q, L.w, c.tol).value);
            Json r = {{"eta", check_eta_relation(L.p, L.q)},
                      {"apq", apq.value},
                      {"apq_ball", ball_to_json(L.space, apq.witness)},
                      {"dual", dual},
                      {"duality_rel_error", std::fabs(primal - dual) / primal},
                      {"a_q", sp.a_q},
                      {"a_pprime_dual", sp.a_pprime_dual},
                      {"dyadic_apq", dyadic},
                      {"a_infty_W", ainf(a_infty_diagnostics(L.space, rec.W_measure, c.seed))},
                      {"a_infty_sigma", ainf(a_infty_diagnostics(L.space, rec.sigma_measure, c.seed))},
                      {"inputs", in.record}};
            if (sp.classical_apq) r["classical_apq"] = *sp.classical_apq;
            if (sp.classical_aq) r["classical_aq"] = *sp.classical_aq;
            std::ostringstream csv;
            csv.precision(17);
            csv << "apq,dual,a_q,a_pprime_dual\n" << apq.value << ',' << dual << ',' << sp.a_q << ','
                << sp.a_pprime_dual << '\n';
            emit(c, "weights", r, csv.str());
            return 0;
        }
        if (czd->parsed()) {
            auto L = load_all(c, in);
            const double eta = check_eta_relation(L.p, L.q);
            const auto f = function_from_json(in.load("f", f_path), L.space.size());
            PointFn sigma(L.space.size(), 1.0);
            if (!sigma_path.empty()) {
                sigma = function_from_json(in.load("sigma", sigma_path), L.space.size());
            } else if (!c.weight.empty()) {
                const auto rec = derived_measures(L.space, L.p, L.q, L.w);
                for (std::size_t x = 0; x < sigma.size(); ++x) sigma[x] = rec.sigma_measure[x] / L.space.mass(x);
            }
            if (stack == lambda.has_value()) throw ValidationError("give exactly one of --lambda or --stack");
            const auto grid = build_grid(L.space, 2.0, c.seed);
            Json r;
            CZReport rep;
            if (lambda) {
                const auto d = cz_decompose(grid, L.space, eta, sigma, f, *lambda);
                rep = cz_verify(grid, L.space, d);
                r["decomposition"] = decomposition_to_json(grid, d);
            } else {
                const auto s = cz_stack(grid, L.space, eta, sigma, f, a);
                rep = cz_verify(grid, L.space, s);
                r["stack"] = stack_to_json(grid, s);
            }
            r["verify"] = {{"pass", rep.pass}, {"checks", rep.checks}, {"failures", rep.failures}};
            r["generic_bound"] = cz_generic_bound(grid, L.space, eta);
            r["inputs"] = in.record;
            std::ostringstream csv;
            csv << "pass,checks\n" << (rep.pass ? "pass" : "fail") << ',' << rep.checks << '\n';
            emit(c, "czd", r, csv.str());
            return rep.pass ? 0 : 1;
        }
        for (auto* cmd : {strong, weak, nec}) {
            if (!cmd->parsed()) continue;
            if (!c.space.empty()) cfg.space = in.load("space", c.space);
            if (!c.p.empty()) cfg.p = in.load("p", c.p);
            if (!c.q.empty()) cfg.q = in.load("q", c.q);
            if (!c.weight.empty()) cfg.weight = in.load("weight", c.weight);
            cfg.eta = c.eta;
            cfg.sizes = parse_sizes(sizes);
            cfg.grids = c.grids;
            cfg.seed = c.seed;
            cfg.tol = c.tol;
            cfg.random_functions = rand_fns;
            cfg.ball_indicators = balls;
            if (!expect.empty()) cfg.expect = expect;
            cfg.inputs = in.record;
            Timings t;
            const auto rep = cmd == strong ? cmd_strong(cfg, &t) : cmd == weak ? cmd_weak(cfg, &t) : cmd_necessity(cfg, &t);
            emit(c, cmd->get_name(), rep.report, rep.csv);
            emit_timings(c, t);
            return rep.pass ? 0 : 1;
        }
        if (ver->parsed()) {
            const auto cases = corpus_path.empty() ? default_corpus() : corpus_from_json(read_json_file(corpus_path));
            Timings t;
            const auto rep = cmd_verify_all(cases, {c.grids, c.seed, c.tol, inject}, &t);
            emit(c, "verify-all", rep.report, rep.csv);
            emit_timings(c, t);
            if (!rep.pass) std::cerr << "verify-all: failures recorded in the report\n";
            return rep.pass ? 0 : 1;
        }
    } catch (const ValidationError& e) {
        std::cerr << "input error: " << e.what() << "\n";
        return 2;
    } catch (const DomainError& e) {
        std::cerr << "input error: " << e.what() << "\n";
        return 2;
    } catch (const PreconditionError& e) {
        std::cerr << "input error: " << e.what() << "\n";
        return 2;
    } catch (const Json::exception& e) {
        std::cerr << "input error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
