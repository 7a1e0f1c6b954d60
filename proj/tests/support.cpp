#include "support.hpp"

#include <mpfr.h>

#include <algorithm>
#include <set>

namespace vt {

double mpfr_sum(const std::vector<double>& xs) {
    if (xs.empty()) return 0.0;
    std::vector<mpfr_t> terms(xs.size());
    std::vector<mpfr_ptr> ptrs(xs.size());
    for (std::size_t i = 0; i < xs.size(); ++i) {
        mpfr_init2(terms[i], 53);
        mpfr_set_d(terms[i], xs[i], MPFR_RNDN);
        ptrs[i] = terms[i];
    }
    mpfr_t out;
    mpfr_init2(out, 53);
    mpfr_sum(out, ptrs.data(), static_cast<unsigned long>(ptrs.size()), MPFR_RNDN);
    const double r = mpfr_get_d(out, MPFR_RNDN);
    mpfr_clear(out);
    for (auto& t : terms) mpfr_clear(t);
    return r;
}

std::vector<PointSet> brute_ball_sets(const QuasiMetricSpace& space) {
    const std::size_t n = space.size();
    std::set<PointSet> seen;
    for (std::size_t c = 0; c < n; ++c) {
        for (std::size_t y = 0; y < n; ++y) {
            PointSet s;
            for (std::size_t z = 0; z < n; ++z) {
                if (space.dist(c, z) <= space.dist(c, y)) s.push_back(z);
            }
            seen.insert(std::move(s));
        }
    }
    return {seen.begin(), seen.end()};
}

std::vector<double> brute_maximal(const QuasiMetricSpace& space, double eta, const PointFn& f) {
    std::vector<double> out(space.size(), 0.0);
    for (const auto& b : brute_ball_sets(space)) {
        std::vector<double> m, s;
        for (auto y : b) {
            m.push_back(space.mass(y));
            s.push_back(std::fabs(f[y]) * space.mass(y));
        }
        const double v = std::pow(mpfr_sum(m), eta - 1.0) * mpfr_sum(s);
        for (auto y : b) out[y] = std::max(out[y], v);
    }
    return out;
}

}  // namespace vt
