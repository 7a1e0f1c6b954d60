#include "vexmax/space.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>
#include <unordered_map>

#include "vexmax/error.hpp"
#include "vexmax/exact_sum.hpp"

namespace vexmax {
namespace {

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

// Smallest c with fl(c * den) >= num.
double certified_ratio(double num, double den) {
    double c = num / den;
    while (c * den < num) c = std::nextafter(c, std::numeric_limits<double>::infinity());
    return c;
}

struct SetKey {
    std::uint64_t h1;
    std::uint64_t h2;
    std::size_t count;
    bool operator==(const SetKey&) const = default;
};

struct SetKeyHash {
    std::size_t operator()(const SetKey& k) const {
        return static_cast<std::size_t>(k.h1 ^ (k.h2 * 31) ^ k.count);
    }
};

std::string entry(std::size_t i, std::size_t j) {
    std::ostringstream os;
    os << "(" << i << "," << j << ")";
    return os.str();
}

}  // namespace

double quasi_triangle_constant(std::span<const double> dist, std::size_t n) {
    double a0 = 1.0;
    for (std::size_t x = 0; x < n; ++x) {
        for (std::size_t y = x + 1; y < n; ++y) {
            double best = std::numeric_limits<double>::infinity();
            for (std::size_t z = 0; z < n; ++z) {
                if (z == x || z == y) continue;
                best = std::min(best, dist[x * n + z] + dist[z * n + y]);
            }
            if (std::isfinite(best)) a0 = std::max(a0, certified_ratio(dist[x * n + y], best));
        }
    }
    return a0;
}

QuasiMetricSpace::QuasiMetricSpace(std::vector<double> dist, std::vector<double> mass)
    : n_(mass.size()), dist_(std::move(dist)), mass_(std::move(mass)) {
    if (n_ == 0) throw ValidationError("space must contain at least one point");
    if (dist_.size() != n_ * n_) {
        throw ValidationError("distance matrix must be " + std::to_string(n_) + "x" +
                              std::to_string(n_));
    }
    for (std::size_t i = 0; i < n_; ++i) {
        if (!(mass_[i] > 0.0) || !std::isfinite(mass_[i])) {
            throw ValidationError("mass at point " + std::to_string(i) + " must be positive and finite");
        }
        if (dist_[i * n_ + i] != 0.0) throw ValidationError("nonzero diagonal entry " + entry(i, i));
        for (std::size_t j = 0; j < n_; ++j) {
            const double d = dist_[i * n_ + j];
            if (!std::isfinite(d)) throw ValidationError("non-finite distance at " + entry(i, j));
            if (d != dist_[j * n_ + i]) throw ValidationError("asymmetric distance at " + entry(i, j));
            if (i != j && !(d > 0.0)) throw ValidationError("non-positive off-diagonal distance at " + entry(i, j));
        }
    }
    total_mass_ = exact_sum(mass_);

    min_distance_ = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < n_; ++i) {
        for (std::size_t j = i + 1; j < n_; ++j) {
            diameter_ = std::max(diameter_, dist_[i * n_ + j]);
            min_distance_ = std::min(min_distance_, dist_[i * n_ + j]);
        }
    }
    if (n_ == 1) min_distance_ = 0.0;
    super_radius_ = diameter_ > 0.0 ? 2.0 * diameter_ : 1.0;

    a0_ = quasi_triangle_constant(dist_, n_);

    order_.resize(n_ * n_);
    rank_.resize(n_ * n_);
    for (PointId c = 0; c < n_; ++c) {
        auto row = std::span<PointId>(order_.data() + c * n_, n_);
        std::iota(row.begin(), row.end(), PointId{0});
        std::sort(row.begin(), row.end(), [&](PointId a, PointId b) {
            const double da = this->dist(c, a), db = this->dist(c, b);
            return da != db ? da < db : a < b;
        });
        for (std::size_t k = 0; k < n_; ++k) rank_[c * n_ + row[k]] = k;
    }

    // Candidate radii: distinct positive distances plus the super radius.
    radii_offset_.assign(n_ + 1, 0);
    for (PointId c = 0; c < n_; ++c) {
        radii_offset_[c] = radii_.size();
        auto ord = order(c);
        for (std::size_t k = 1; k < n_; ++k) {
            const double d = this->dist(c, ord[k]);
            if (d != this->dist(c, ord[k - 1])) {
                radii_.push_back(d);
                counts_.push_back(k);
            }
        }
        radii_.push_back(super_radius_);
        counts_.push_back(n_);
    }
    radii_offset_[n_] = radii_.size();
    ball_index_.resize(radii_.size());

    std::vector<std::uint64_t> key1(n_), key2(n_);
    for (std::size_t i = 0; i < n_; ++i) {
        key1[i] = splitmix64(i);
        key2[i] = splitmix64(i ^ 0x5bd1e9955bd1e995ULL);
    }
    std::unordered_map<SetKey, std::vector<std::size_t>, SetKeyHash> seen;
    for (PointId c = 0; c < n_; ++c) {
        auto ord = order(c);
        auto radii = candidate_radii(c);
        auto counts = candidate_counts(c);
        std::uint64_t h1 = 0, h2 = 0;
        ExactSum acc;
        std::size_t filled = 0;
        for (std::size_t j = 0; j < radii.size(); ++j) {
            for (; filled < counts[j]; ++filled) {
                h1 += key1[ord[filled]];
                h2 += key2[ord[filled]];
                acc.add(mass_[ord[filled]]);
            }
            const SetKey key{h1, h2, counts[j]};
            auto& bucket = seen[key];
            std::size_t found = balls_.size();
            for (std::size_t id : bucket) {
                const BallRef& other = balls_[id];
                bool same = true;
                for (std::size_t k = 0; k < counts[j] && same; ++k) {
                    same = rank(other.center, ord[k]) < other.count;
                }
                if (same) {
                    found = id;
                    break;
                }
            }
            if (found == balls_.size()) {
                balls_.push_back(BallRef{c, counts[j], radii[j], acc.value()});
                bucket.push_back(found);
            }
            ball_index_[radii_offset_[c] + j] = found;
        }
    }

    c_mu_ = doubling_constant(*this, mass_);
}

PointSet QuasiMetricSpace::members(const BallRef& b) const {
    auto ord = order(b.center);
    PointSet out(ord.begin(), ord.begin() + static_cast<std::ptrdiff_t>(b.count));
    std::sort(out.begin(), out.end());
    return out;
}

Ball QuasiMetricSpace::materialize(const BallRef& b) const {
    return Ball{b.center, b.radius, members(b), b.measure};
}

QuasiMetricSpace build_space(std::vector<double> dist, std::vector<double> mass) {
    return QuasiMetricSpace(std::move(dist), std::move(mass));
}

QuasiMetricSpace euclidean_space(std::span<const double> coords, std::size_t dim,
                                 std::vector<double> mass) {
    const std::size_t n = mass.size();
    if (dim == 0 || coords.size() != n * dim) throw ValidationError("coordinate array does not match point count");
    std::vector<double> dist(n * n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            double s = 0.0;
            for (std::size_t k = 0; k < dim; ++k) {
                const double d = coords[i * dim + k] - coords[j * dim + k];
                s += d * d;
            }
            dist[i * n + j] = dist[j * n + i] = std::sqrt(s);
        }
    }
    return QuasiMetricSpace(std::move(dist), std::move(mass));
}

Ball ball(const QuasiMetricSpace& space, PointId center, double radius) {
    if (center >= space.size()) throw ValidationError("unknown center " + std::to_string(center));
    if (!(radius >= 0.0)) throw DomainError("ball radius must be nonnegative");
    Ball b{center, radius, {}, 0.0};
    for (PointId y = 0; y < space.size(); ++y) {
        if (space.dist(center, y) < radius) b.members.push_back(y);
    }
    b.measure = set_measure(space.mass(), b.members);
    return b;
}

std::vector<Ball> enumerate_balls(const QuasiMetricSpace& space) {
    std::vector<Ball> out;
    out.reserve(space.balls().size());
    for (const auto& b : space.balls()) out.push_back(space.materialize(b));
    return out;
}

double doubling_constant(const QuasiMetricSpace& space, std::span<const double> atoms) {
    const std::size_t n = space.size();
    if (atoms.size() != n) throw ValidationError("measure atoms do not match point count");
    double c = 1.0;
    std::vector<double> prefix(n + 1);
    for (PointId x = 0; x < n; ++x) {
        auto ord = space.order(x);
        ExactSum acc;
        prefix[0] = 0.0;
        for (std::size_t k = 0; k < n; ++k) {
            acc.add(atoms[ord[k]]);
            prefix[k + 1] = acc.value();
        }
        auto radii = space.candidate_radii(x);
        auto counts = space.candidate_counts(x);
        std::size_t big = 0;
        for (std::size_t j = 0; j < radii.size(); ++j) {
            const double r2 = 2.0 * radii[j];
            while (big < n && space.dist(x, ord[big]) < r2) ++big;
            c = std::max(c, certified_ratio(prefix[big], prefix[counts[j]]));
        }
    }
    return c;
}

double doubling_constant(const QuasiMetricSpace& space) { return space.c_mu(); }

double lower_mass_bound_report(const QuasiMetricSpace& space) {
    const std::size_t n = space.size();
    const double s = std::log2(space.c_mu());
    // For each y: running min over its candidate radii of mu(B(y,r)) / r^s.
    std::vector<std::vector<double>> prefmin(n);
    for (PointId y = 0; y < n; ++y) {
        auto radii = space.candidate_radii(y);
        double best = std::numeric_limits<double>::infinity();
        for (std::size_t j = 0; j < radii.size(); ++j) {
            const double m = space.balls()[space.ball_index(y, j)].measure;
            best = std::min(best, m / std::pow(radii[j], s));
            prefmin[y].push_back(best);
        }
    }
    double c = std::numeric_limits<double>::infinity();
    for (PointId x = 0; x < n; ++x) {
        auto ord = space.order(x);
        auto radii = space.candidate_radii(x);
        auto counts = space.candidate_counts(x);
        for (std::size_t i = 0; i < radii.size(); ++i) {
            const double big_r = radii[i];
            const double scale = std::pow(big_r, s) / space.balls()[space.ball_index(x, i)].measure;
            for (std::size_t k = 0; k < counts[i]; ++k) {
                const PointId y = ord[k];
                auto ry = space.candidate_radii(y);
                const auto it = std::lower_bound(ry.begin(), ry.end(), big_r);
                if (it == ry.begin()) continue;
                const std::size_t idx = static_cast<std::size_t>(it - ry.begin()) - 1;
                c = std::min(c, prefmin[y][idx] * scale);
            }
        }
    }
    return std::isfinite(c) ? c : 1.0;
}

double set_measure(std::span<const double> atoms, std::span<const PointId> set) {
    ExactSum acc;
    for (PointId y : set) acc.add(atoms[y]);
    return acc.value();
}

}  // namespace vexmax
