#include "vexmax/dyadic.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <sstream>

#include "vexmax/error.hpp"
#include "vexmax/exact_sum.hpp"

namespace vexmax {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr CubeId kNoCube = std::numeric_limits<CubeId>::max();

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

std::string cube_label(const DyadicCube& q) {
    std::ostringstream os;
    os << "cube " << q.id << " (generation " << q.generation << ", center " << q.center << ")";
    return os.str();
}

}  // namespace

DyadicGrid::DyadicGrid(const QuasiMetricSpace& space, double d0, double base_scale,
                       std::vector<std::vector<CubeSpec>> generations)
    : d0_(d0), base_scale_(base_scale), num_points_(space.size()) {
    if (!(d0 > 1.0)) throw DomainError("dyadic scale base d0 must exceed 1");
    if (generations.empty() || generations.front().empty()) {
        throw ValidationError("grid needs at least one nonempty generation");
    }
    const std::size_t n = space.size();
    for (auto& gen : generations) {
        for (auto& spec : gen) {
            std::sort(spec.members.begin(), spec.members.end());
            spec.members.erase(std::unique(spec.members.begin(), spec.members.end()), spec.members.end());
            if (spec.members.empty()) throw ValidationError("dyadic cube with no members");
            if (spec.members.back() >= n || spec.center >= n) throw ValidationError("cube refers to unknown point");
        }
        std::sort(gen.begin(), gen.end(), [](const CubeSpec& a, const CubeSpec& b) {
            return a.members.front() != b.members.front() ? a.members.front() < b.members.front()
                                                          : a.center < b.center;
        });
    }

    by_generation_.resize(generations.size());
    cube_of_.assign(generations.size(), std::vector<CubeId>(n, kNoCube));
    for (std::size_t k = 0; k < generations.size(); ++k) {
        for (auto& spec : generations[k]) {
            DyadicCube q;
            q.id = cubes_.size();
            q.generation = static_cast<int>(k);
            q.center = spec.center;
            q.members = std::move(spec.members);
            q.measure = set_measure(space.mass(), q.members);
            for (PointId x : q.members) {
                if (cube_of_[k][x] == kNoCube) cube_of_[k][x] = q.id;
            }
            if (k > 0) {
                const CubeId par = cube_of_[k - 1][q.center];
                if (par != kNoCube) {
                    q.parent = par;
                    cubes_[par].children.push_back(q.id);
                }
            }
            by_generation_[k].push_back(q.id);
            cubes_.push_back(std::move(q));
        }
    }

    // Realized constants.
    c_d_ = 0.0;
    c_inner_ = 1.0;
    eps_child_ = 1.0;
    for (const auto& q : cubes_) {
        const double s = scale(q.generation);
        double outer = 0.0;
        double inner = kInf;
        std::vector<char> in(n, 0);
        for (PointId y : q.members) in[y] = 1;
        for (PointId y = 0; y < n; ++y) {
            const double d = space.dist(q.center, y);
            if (in[y]) {
                outer = std::max(outer, d);
            } else {
                inner = std::min(inner, d);
            }
        }
        double c = outer / s;
        while (c * s <= outer) c = std::nextafter(c, kInf);
        c_d_ = std::max(c_d_, c);
        if (std::isfinite(inner)) {
            double ci = inner / s;
            while (ci > 0.0 && ci * s > inner) ci = std::nextafter(ci, 0.0);
            c_inner_ = std::min(c_inner_, ci);
        }
        if (q.parent) {
            const double pm = cubes_[*q.parent].measure;
            double eps = q.measure / pm;
            while (eps > 0.0 && eps * pm > q.measure) eps = std::nextafter(eps, 0.0);
            eps_child_ = std::min(eps_child_, eps);
        }
    }
}

double DyadicGrid::scale(int k) const { return base_scale_ * std::pow(d0_, -static_cast<double>(k)); }

const std::vector<CubeId>& DyadicGrid::generation(int k) const {
    if (k < k_min() || k > k_max()) throw PreconditionError("generation " + std::to_string(k) + " out of range");
    return by_generation_[static_cast<std::size_t>(k)];
}

CubeId DyadicGrid::cube_at(PointId x, int k) const {
    if (k < k_min() || k > k_max()) throw PreconditionError("generation " + std::to_string(k) + " out of range");
    if (x >= num_points_) throw ValidationError("unknown point " + std::to_string(x));
    const CubeId id = cube_of_[static_cast<std::size_t>(k)][x];
    if (id == kNoCube) throw ConstructionError("point not covered by its generation");
    return id;
}

void DyadicGrid::set_claims(double c_d, double c_inner, double eps_child) {
    c_d_ = c_d;
    c_inner_ = c_inner;
    eps_child_ = eps_child;
}

DyadicGrid build_grid(const QuasiMetricSpace& space, double d0, std::optional<std::uint64_t> seed) {
    if (!(d0 > 1.0)) throw DomainError("dyadic scale base d0 must exceed 1");
    const std::size_t n = space.size();

    std::vector<PointId> priority(n);
    std::iota(priority.begin(), priority.end(), PointId{0});
    if (seed) {
        std::mt19937_64 rng(*seed);
        std::shuffle(priority.begin(), priority.end(), rng);
    }
    std::vector<std::size_t> rank(n);
    for (std::size_t i = 0; i < n; ++i) rank[priority[i]] = i;

    // Generation 0 scale: smallest power of d0 above the diameter.
    const double diam = space.diameter();
    double base = 1.0;
    if (diam > 0.0) {
        base = std::pow(d0, std::floor(std::log(diam) / std::log(d0)));
        while (base <= diam) base *= d0;
        while (base / d0 > diam) base /= d0;
    }
    int finest = 0;
    if (n > 1) {
        while (base * std::pow(d0, -static_cast<double>(finest)) > space.min_distance()) ++finest;
    }

    // Nested maximal nets.
    std::vector<std::vector<PointId>> nets(static_cast<std::size_t>(finest) + 1);
    std::vector<char> is_center(n, 0);
    nets[0].push_back(priority[0]);
    is_center[priority[0]] = 1;
    for (int k = 1; k <= finest; ++k) {
        const double s = base * std::pow(d0, -static_cast<double>(k));
        auto& net = nets[static_cast<std::size_t>(k)];
        net = nets[static_cast<std::size_t>(k) - 1];
        for (PointId y : priority) {
            if (is_center[y]) continue;
            const bool separated = std::all_of(net.begin(), net.end(), [&](PointId z) { return space.dist(y, z) >= s; });
            if (separated) {
                net.push_back(y);
                is_center[y] = 1;
            }
        }
    }
    if (nets.back().size() != n) throw ConstructionError("finest generation is not all singletons");

    // Bottom-up clustering.
    std::vector<std::vector<DyadicGrid::CubeSpec>> gens(nets.size());
    std::vector<PointSet> members(n);  // indexed by center
    for (PointId x = 0; x < n; ++x) {
        members[x] = {x};
        gens.back().push_back({x, {x}});
    }
    for (int k = finest - 1; k >= 0; --k) {
        const auto& parents = nets[static_cast<std::size_t>(k)];
        const auto& kids = nets[static_cast<std::size_t>(k) + 1];
        std::vector<PointSet> next(n);
        for (PointId z : kids) {
            PointId best = parents.front();
            for (PointId c : parents) {
                const double dc = space.dist(z, c), db = space.dist(z, best);
                if (dc < db || (dc == db && rank[c] < rank[best])) best = c;
            }
            next[best].insert(next[best].end(), members[z].begin(), members[z].end());
        }
        for (PointId c : parents) {
            std::sort(next[c].begin(), next[c].end());
            gens[static_cast<std::size_t>(k)].push_back({c, next[c]});
        }
        members = std::move(next);
    }
    return DyadicGrid(space, d0, base, std::move(gens));
}

GridReport verify_grid(const DyadicGrid& grid, const QuasiMetricSpace& space) {
    GridReport rep;
    const std::size_t n = space.size();
    const auto& cubes = grid.cubes();
    const std::size_t words = (n + 63) / 64;
    std::vector<std::vector<std::uint64_t>> bits(cubes.size(), std::vector<std::uint64_t>(words, 0));
    for (const auto& q : cubes) {
        for (PointId x : q.members) bits[q.id][x / 64] |= std::uint64_t{1} << (x % 64);
    }

    // (2) partition of each generation.
    for (int k = grid.k_min(); k <= grid.k_max() && rep.partition.pass; ++k) {
        std::vector<int> count(n, 0);
        for (CubeId id : grid.generation(k)) {
            for (PointId x : cubes[id].members) ++count[x];
        }
        for (PointId x = 0; x < n; ++x) {
            if (count[x] != 1) {
                std::ostringstream os;
                os << "generation " << k << ": point " << x << " lies in " << count[x] << " cubes";
                rep.partition = {false, os.str()};
                break;
            }
        }
    }

    // (1) pairwise nesting.
    for (std::size_t i = 0; i < cubes.size() && rep.nesting.pass; ++i) {
        for (std::size_t j = i + 1; j < cubes.size(); ++j) {
            std::size_t inter = 0;
            for (std::size_t w = 0; w < words; ++w) inter += std::popcount(bits[i][w] & bits[j][w]);
            if (inter != 0 && inter != cubes[i].members.size() && inter != cubes[j].members.size()) {
                rep.nesting = {false, cube_label(cubes[i]) + " and " + cube_label(cubes[j]) + " overlap without nesting"};
                break;
            }
        }
    }

    // (3) parents and children.
    for (const auto& q : cubes) {
        if (q.generation > grid.k_min()) {
            bool ok = q.parent.has_value() && cubes[*q.parent].generation == q.generation - 1;
            if (ok) {
                const auto& pm = cubes[*q.parent].members;
                ok = std::includes(pm.begin(), pm.end(), q.members.begin(), q.members.end());
            }
            if (!ok) {
                rep.parent_child = {false, cube_label(q) + " has no containing parent"};
                break;
            }
        }
        if (q.generation < grid.k_max() && q.children.empty()) {
            rep.parent_child = {false, cube_label(q) + " has no child"};
            break;
        }
    }

    // (4) child mass ratio and (5) sandwich, against the grid's claims.
    rep.c_d = 0.0;
    rep.c_inner = 1.0;
    rep.eps_child = 1.0;
    for (const auto& q : cubes) {
        const double mq = set_measure(space.mass(), q.members);
        if (q.parent) {
            const double mp = set_measure(space.mass(), cubes[*q.parent].members);
            rep.eps_child = std::min(rep.eps_child, mq / mp);
            if (rep.child_mass.pass && !(mq >= grid.eps_child() * mp)) {
                rep.child_mass = {false, cube_label(q) + " is too light relative to its parent"};
            }
        }
        const double s = grid.scale(q.generation);
        const double inner_r = grid.c_inner() * s;
        const double outer_r = grid.c_d() * s;
        bool center_in = false;
        for (PointId y = 0; y < n; ++y) {
            const bool in = (bits[q.id][y / 64] >> (y % 64)) & 1U;
            const double d = space.dist(q.center, y);
            if (y == q.center) center_in = in;
            if (in) {
                rep.c_d = std::max(rep.c_d, d / s);
                if (rep.sandwich.pass && !(d < outer_r)) {
                    std::ostringstream os;
                    os << cube_label(q) << ": member " << y << " outside the outer ball";
                    rep.sandwich = {false, os.str()};
                }
            } else {
                rep.c_inner = std::min(rep.c_inner, d / s);
                if (rep.sandwich.pass && d < inner_r) {
                    std::ostringstream os;
                    os << cube_label(q) << ": point " << y << " of the inner ball is missing";
                    rep.sandwich = {false, os.str()};
                }
            }
        }
        if (rep.sandwich.pass && !center_in) rep.sandwich = {false, cube_label(q) + " does not contain its center"};
    }
    if (!(rep.eps_child > 0.0) && rep.child_mass.pass) rep.child_mass = {false, "child mass ratio is zero"};
    return rep;
}

std::vector<DyadicGrid> build_grid_family(const QuasiMetricSpace& space, std::size_t n_grids,
                                          std::uint64_t seed, double d0) {
    if (n_grids == 0) throw PreconditionError("grid family needs at least one grid");
    std::vector<DyadicGrid> out;
    out.reserve(n_grids);
    for (std::size_t i = 0; i < n_grids; ++i) {
        out.push_back(build_grid(space, d0, splitmix64(seed ^ splitmix64(i + 1))));
    }
    return out;
}

double family_cover_constant(const QuasiMetricSpace& space, const std::vector<DyadicGrid>& family) {
    const auto balls = space.balls();
    std::vector<double> best(balls.size(), kInf);
    const std::size_t n = space.size();
    for (const auto& grid : family) {
        for (PointId c = 0; c < n; ++c) {
            auto ord = space.order(c);
            auto counts = space.candidate_counts(c);
            int level = grid.k_max();
            std::size_t filled = 0;
            for (std::size_t j = 0; j < counts.size(); ++j) {
                for (; filled < counts[j]; ++filled) {
                    const PointId y = ord[filled];
                    while (grid.cube_at(y, level) != grid.cube_at(c, level)) --level;
                }
                const std::size_t b = space.ball_index(c, j);
                const double ratio = grid.cube(grid.cube_at(c, level)).measure / balls[b].measure;
                best[b] = std::min(best[b], ratio);
            }
        }
    }
    return *std::max_element(best.begin(), best.end());
}

double parent_child_jump(const DyadicGrid& grid, std::span<const double> atoms, double eta) {
    if (!(eta >= 0.0 && eta < 1.0)) throw DomainError("eta must lie in [0,1)");
    std::vector<double> m(grid.cubes().size());
    for (const auto& q : grid.cubes()) m[q.id] = set_measure(atoms, q.members);
    double jump = 1.0;
    for (const auto& q : grid.cubes()) {
        if (q.parent) jump = std::max(jump, std::pow(m[*q.parent] / m[q.id], 1.0 - eta));
    }
    return jump;
}

}  // namespace vexmax
