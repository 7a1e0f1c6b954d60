#include "vexmax/io.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "vexmax/error.hpp"

namespace vexmax {
namespace {

const Json& field(const Json& j, const char* key) {
    if (!j.is_object() || !j.contains(key)) throw ValidationError(std::string("missing field '") + key + "'");
    return j.at(key);
}

double number(const Json& j, const std::string& what) {
    if (!j.is_number()) throw ValidationError(what + " must be a number");
    return j.get<double>();
}

std::vector<double> numbers(const Json& j, const std::string& what) {
    if (!j.is_array()) throw ValidationError(what + " must be an array");
    std::vector<double> out;
    out.reserve(j.size());
    for (std::size_t i = 0; i < j.size(); ++i) out.push_back(number(j[i], what + "[" + std::to_string(i) + "]"));
    return out;
}

PointId point_index(const Json& j, const QuasiMetricSpace& space, const char* key) {
    if (!j.contains(key)) return 0;
    const auto& v = j.at(key);
    if (!v.is_number_integer() || v.get<long long>() < 0 ||
        static_cast<std::size_t>(v.get<long long>()) >= space.size()) {
        throw ValidationError(std::string("'") + key + "' must be a point index below " +
                              std::to_string(space.size()));
    }
    return static_cast<PointId>(v.get<long long>());
}

double d_min(const Json& j, const QuasiMetricSpace& space) {
    if (!j.contains("d_min")) return space.min_distance();
    const double v = number(j.at("d_min"), "d_min");
    if (!(v > 0.0)) throw ValidationError("d_min must be positive");
    return v;
}

std::string type_of(const Json& j) {
    const auto& t = field(j, "type");
    if (!t.is_string()) throw ValidationError("'type' must be a string");
    return t.get<std::string>();
}

Json cube_list(const DyadicGrid& grid, const std::vector<CubeId>& cubes, const std::vector<double>& averages) {
    Json out = Json::array();
    for (std::size_t i = 0; i < cubes.size(); ++i) {
        const auto& q = grid.cube(cubes[i]);
        out.push_back({{"id", q.id},
                       {"generation", q.generation},
                       {"center", q.center},
                       {"members", q.members},
                       {"average", averages.at(i)}});
    }
    return out;
}

}  // namespace

QuasiMetricSpace SpaceSpec::build() const {
    if (dim > 0) return euclidean_space(coords, dim, mass);
    return build_space(dist, mass);
}

SpaceSpec space_spec_from_json(const Json& j) {
    SpaceSpec s;
    s.mass = numbers(field(j, "mass"), "mass");
    const std::size_t n = s.mass.size();
    if (n == 0) throw ValidationError("space has no points");
    if (j.contains("points")) {
        s.points = j.at("points");
        if (!s.points.is_array() || s.points.size() != n) {
            throw ValidationError("'points' must list one id per mass entry");
        }
    } else {
        for (std::size_t i = 0; i < n; ++i) s.points.push_back(i);
    }
    if (j.contains("coords")) {
        const std::string metric = j.value("metric", std::string("euclidean"));
        if (metric != "euclidean") throw ValidationError("unsupported metric '" + metric + "'");
        const auto& c = j.at("coords");
        if (!c.is_array() || c.size() != n) throw ValidationError("'coords' must have one entry per point");
        s.dim = c[0].is_array() ? c[0].size() : 1;
        if (s.dim == 0) throw ValidationError("coordinates must have at least one component");
        for (std::size_t i = 0; i < n; ++i) {
            const std::string what = "coords[" + std::to_string(i) + "]";
            if (c[i].is_array()) {
                if (c[i].size() != s.dim) throw ValidationError(what + " has the wrong dimension");
                for (const auto& v : c[i]) s.coords.push_back(number(v, what));
            } else {
                if (s.dim != 1) throw ValidationError(what + " has the wrong dimension");
                s.coords.push_back(number(c[i], what));
            }
        }
    } else if (j.contains("dist")) {
        const auto& d = j.at("dist");
        if (!d.is_array() || d.size() != n) throw ValidationError("'dist' must be an n x n matrix");
        for (std::size_t i = 0; i < n; ++i) {
            const auto row = numbers(d[i], "dist[" + std::to_string(i) + "]");
            if (row.size() != n) throw ValidationError("'dist' must be an n x n matrix");
            s.dist.insert(s.dist.end(), row.begin(), row.end());
        }
    } else {
        throw ValidationError("space needs 'coords' or 'dist'");
    }
    return s;
}

Json space_spec_to_json(const SpaceSpec& s) {
    Json j;
    j["points"] = s.points;
    j["mass"] = s.mass;
    const std::size_t n = s.mass.size();
    if (s.dim > 0) {
        j["metric"] = "euclidean";
        Json c = Json::array();
        for (std::size_t i = 0; i < n; ++i) {
            c.push_back(std::vector<double>(s.coords.begin() + static_cast<long>(i * s.dim),
                                            s.coords.begin() + static_cast<long>((i + 1) * s.dim)));
        }
        j["coords"] = c;
    } else {
        Json d = Json::array();
        for (std::size_t i = 0; i < n; ++i) {
            d.push_back(std::vector<double>(s.dist.begin() + static_cast<long>(i * n),
                                            s.dist.begin() + static_cast<long>((i + 1) * n)));
        }
        j["dist"] = d;
    }
    return j;
}

Exponent exponent_from_json(const Json& j, const QuasiMetricSpace& space) {
    const std::string t = type_of(j);
    const std::size_t n = space.size();
    if (t == "constant") return Exponent::constant(n, number(field(j, "value"), "value"));
    if (t == "values") {
        auto v = numbers(field(j, "values"), "values");
        if (v.size() != n) throw ValidationError("exponent has " + std::to_string(v.size()) + " values for " +
                                                 std::to_string(n) + " points");
        std::optional<double> p_inf;
        if (j.contains("p_inf")) p_inf = number(j.at("p_inf"), "p_inf");
        return Exponent(std::move(v), p_inf);
    }
    if (t == "log-holder") {
        const double p_inf = number(field(j, "p_inf"), "p_inf");
        const double amp = number(field(j, "amplitude"), "amplitude");
        const PointId x0 = point_index(j, space, "base_point");
        const double dm = d_min(j, space);
        std::vector<double> v(n);
        for (PointId x = 0; x < n; ++x) {
            v[x] = p_inf + amp / std::log(std::exp(1.0) + 1.0 / std::max(space.dist(x0, x), dm));
        }
        return Exponent(std::move(v), p_inf);
    }
    throw ValidationError("unknown exponent type '" + t + "'");
}

PointFn weight_from_json(const Json& j, const QuasiMetricSpace& space) {
    const std::string t = type_of(j);
    const std::size_t n = space.size();
    PointFn w;
    if (t == "constant") {
        w.assign(n, j.contains("value") ? number(j.at("value"), "value") : 1.0);
    } else if (t == "values") {
        w = numbers(field(j, "values"), "values");
        if (w.size() != n) throw ValidationError("weight has " + std::to_string(w.size()) + " values for " +
                                                 std::to_string(n) + " points");
    } else if (t == "power") {
        const double a = number(field(j, "a"), "a");
        const PointId x0 = point_index(j, space, "base_point");
        const double dm = d_min(j, space);
        w.resize(n);
        for (PointId x = 0; x < n; ++x) w[x] = a == 0.0 ? 1.0 : std::pow(std::max(space.dist(x0, x), dm), a);
    } else {
        throw ValidationError("unknown weight type '" + t + "'");
    }
    for (std::size_t x = 0; x < n; ++x) {
        if (!(w[x] > 0.0) || !std::isfinite(w[x])) {
            throw ValidationError("weight at point " + std::to_string(x) + " must be positive and finite");
        }
    }
    return w;
}

PointFn function_from_json(const Json& j, std::size_t n) {
    const Json& arr = j.is_object() ? field(j, "values") : j;
    auto f = numbers(arr, "function values");
    if (f.size() != n) {
        throw ValidationError("function has " + std::to_string(f.size()) + " values for " + std::to_string(n) +
                              " points");
    }
    for (std::size_t x = 0; x < n; ++x) {
        if (!std::isfinite(f[x])) throw ValidationError("function value at point " + std::to_string(x) + " is not finite");
    }
    return f;
}

std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ValidationError("cannot open '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

Json read_json_file(const std::string& path) {
    const std::string text = read_text_file(path);
    try {
        return Json::parse(text);
    } catch (const Json::parse_error& e) {
        throw ValidationError("'" + path + "' is not valid JSON: " + e.what());
    }
}

void write_text_file(const std::string& path, std::string_view text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ValidationError("cannot write '" + path + "'");
    out << text;
}

std::string fnv1a_hex(std::string_view bytes) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    std::ostringstream os;
    os << std::hex << std::setw(16) << std::setfill('0') << h;
    return os.str();
}

Json ball_to_json(const QuasiMetricSpace& space, std::size_t ball_index) {
    const auto& b = space.balls()[ball_index];
    return {{"index", ball_index},
            {"center", b.center},
            {"radius", b.radius},
            {"measure", b.measure},
            {"members", space.members(b)}};
}

Json grid_to_json(const DyadicGrid& grid) {
    Json gens = Json::array();
    for (int k = grid.k_min(); k <= grid.k_max(); ++k) {
        Json cubes = Json::array();
        for (CubeId id : grid.generation(k)) {
            const auto& q = grid.cube(id);
            cubes.push_back({{"id", q.id}, {"center", q.center}, {"members", q.members}, {"measure", q.measure}});
        }
        gens.push_back({{"k", k}, {"scale", grid.scale(k)}, {"cubes", cubes}});
    }
    return {{"d0", grid.d0()},
            {"base_scale", grid.base_scale()},
            {"c_d", grid.c_d()},
            {"c_inner", grid.c_inner()},
            {"eps_child", grid.eps_child()},
            {"generations", gens}};
}

Json maximal_to_json(const MaximalResult& r) {
    Json pts = Json::array();
    for (std::size_t x = 0; x < r.values.size(); ++x) {
        pts.push_back({{"point", x}, {"value", r.values[x]}, {"witness", r.witness[x]}});
    }
    return {{"witness_kind", r.kind == WitnessKind::Ball ? "ball" : "cube"}, {"points", pts}};
}

std::string maximal_to_csv(const MaximalResult& r) {
    std::ostringstream os;
    os.precision(17);
    os << "point,value,witness\n";
    for (std::size_t x = 0; x < r.values.size(); ++x) os << x << ',' << r.values[x] << ',' << r.witness[x] << '\n';
    return os.str();
}

Json decomposition_to_json(const DyadicGrid& grid, const CZDecomposition& d) {
    return {{"lambda", d.lambda},
            {"eta", d.eta},
            {"c_cz", d.c_cz},
            {"root_selected", d.root_selected},
            {"cubes", cube_list(grid, d.cubes, d.averages)}};
}

Json stack_to_json(const DyadicGrid& grid, const CZStack& s) {
    Json levels = Json::array();
    for (const auto& lvl : s.levels) {
        auto cubes = cube_list(grid, lvl.cubes, lvl.averages);
        for (std::size_t i = 0; i < lvl.cores.size(); ++i) cubes[i]["core"] = lvl.cores[i];
        levels.push_back({{"k", lvl.k}, {"height", lvl.height}, {"root_selected", lvl.root_selected}, {"cubes", cubes}});
    }
    return {{"a", s.a},       {"eta", s.eta},       {"c_cz", s.c_cz},
            {"lambda0", s.lambda0}, {"k0", s.k0}, {"levels", levels}};
}

}  // namespace vexmax
