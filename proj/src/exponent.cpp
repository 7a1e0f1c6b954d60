#include "vexmax/exponent.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "vexmax/error.hpp"

namespace vexmax {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kEtaTol = 1e-12;

double conj_value(double p) {
    if (p == kInf) return 1.0;
    if (p == 1.0) return kInf;
    return p / (p - 1.0);
}

double reciprocal(double p) { return p == kInf ? 0.0 : 1.0 / p; }

}  // namespace

Exponent::Exponent(std::vector<double> values, std::optional<double> p_inf)
    : values_(std::move(values)) {
    if (values_.empty()) throw ValidationError("exponent must have at least one value");
    for (std::size_t i = 0; i < values_.size(); ++i) {
        if (!(values_[i] > 0.0)) {
            throw DomainError("exponent value at point " + std::to_string(i) + " must be positive");
        }
    }
    p_inf_ = p_inf.value_or(values_[0]);
    finish();
}

void Exponent::finish() {
    inf_set_.clear();
    p_minus_ = kInf;
    p_plus_ = -kInf;
    for (std::size_t i = 0; i < values_.size(); ++i) {
        if (values_[i] == kInf) {
            inf_set_.push_back(i);
        } else {
            p_minus_ = std::min(p_minus_, values_[i]);
            p_plus_ = std::max(p_plus_, values_[i]);
        }
    }
    if (inf_set_.size() == values_.size()) p_minus_ = p_plus_ = kInf;

    conj_.clear();
    if (std::all_of(values_.begin(), values_.end(), [](double v) { return v >= 1.0; })) {
        conj_.reserve(values_.size());
        for (double v : values_) conj_.push_back(conj_value(v));
    }
}

Exponent Exponent::primal(std::vector<double> values, ExponentClass cls, std::optional<double> p_inf) {
    Exponent p(std::move(values), p_inf);
    if (!p.is_finite()) throw DomainError("primal exponent must be finite-valued");
    if (!p.in_class(cls)) {
        std::ostringstream os;
        os << "exponent range [" << p.p_minus() << ", " << p.p_plus() << "] is outside the declared class";
        throw DomainError(os.str());
    }
    return p;
}

Exponent Exponent::constant(std::size_t n, double value) {
    return Exponent(std::vector<double>(n, value));
}

bool Exponent::is_constant() const {
    return std::all_of(values_.begin(), values_.end(), [&](double v) { return v == values_[0]; });
}

bool Exponent::in_class(ExponentClass cls) const {
    switch (cls) {
        case ExponentClass::P: return p_minus_ > 1.0 && p_plus_ < kInf;
        case ExponentClass::P1: return p_minus_ >= 1.0 && p_plus_ < kInf;
        case ExponentClass::P0: return p_minus_ > 0.0;
    }
    return false;
}

Exponent Exponent::conjugate() const {
    if (conj_.empty()) throw DomainError("conjugate exponent requires p(x) >= 1 everywhere");
    Exponent out;
    out.values_ = conj_;
    out.conj_ = values_;
    out.p_inf_ = conj_value(p_inf_ < 1.0 ? 1.0 : p_inf_);
    const auto conj_copy = out.conj_;
    out.finish();
    out.conj_ = conj_copy;  // keep the exact original as the conjugate of the conjugate
    return out;
}

Exponent conjugate(const Exponent& p) { return p.conjugate(); }

std::pair<double, double> range_on(const Exponent& p, std::span<const PointId> subset) {
    if (subset.empty()) throw PreconditionError("range_on requires a nonempty subset");
    double lo = kInf, hi = -kInf;
    for (PointId x : subset) {
        if (x >= p.size()) throw ValidationError("point " + std::to_string(x) + " outside exponent domain");
        lo = std::min(lo, p[x]);
        hi = std::max(hi, p[x]);
    }
    return {lo, hi};
}

LHReport lh_constants(const Exponent& p, const QuasiMetricSpace& space, PointId base_point) {
    if (!p.is_finite()) throw DomainError("log-Hoelder constants need a finite exponent");
    if (p.size() != space.size()) throw ValidationError("exponent size does not match space");
    if (base_point >= space.size()) throw ValidationError("unknown base point");
    const double e = std::exp(1.0);
    LHReport rep;
    rep.base_point = base_point;
    for (PointId x = 0; x < space.size(); ++x) {
        for (PointId y = x + 1; y < space.size(); ++y) {
            const double d = space.dist(x, y);
            if (d < 0.5) rep.c0 = std::max(rep.c0, std::fabs(p[x] - p[y]) * std::log(e + 1.0 / d));
        }
        rep.c_inf = std::max(rep.c_inf, std::fabs(p[x] - p.p_inf()) *
                                            std::log(e + space.dist(base_point, x)));
    }
    return rep;
}

double check_eta_relation(const Exponent& p, const Exponent& q) {
    if (p.size() != q.size()) throw ValidationError("exponents live on different spaces");
    if (!p.is_finite() || !q.is_finite()) throw DomainError("eta relation needs finite exponents");
    double lo = kInf, hi = -kInf;
    for (std::size_t x = 0; x < p.size(); ++x) {
        const double d = reciprocal(p[x]) - reciprocal(q[x]);
        lo = std::min(lo, d);
        hi = std::max(hi, d);
    }
    const double deviation = hi - lo;
    if (deviation > kEtaTol) {
        std::ostringstream os;
        os << "1/p - 1/q is not constant (max deviation " << deviation << ")";
        throw DomainError(os.str());
    }
    double eta = lo == hi ? lo : 0.5 * (lo + hi);
    if (eta < 0.0 && eta > -kEtaTol) eta = 0.0;
    if (eta < 0.0 || eta >= 1.0) {
        std::ostringstream os;
        os << "eta = " << eta << " lies outside [0,1)";
        throw DomainError(os.str());
    }
    return eta;
}

Exponent exponent_from_eta(const Exponent& p, double eta) {
    if (!(eta >= 0.0 && eta < 1.0)) throw DomainError("eta must lie in [0,1)");
    if (eta == 0.0) return p;
    std::vector<double> q(p.size());
    for (std::size_t x = 0; x < p.size(); ++x) {
        const double inv = reciprocal(p[x]) - eta;
        if (!(inv > 0.0)) {
            throw DomainError("p(" + std::to_string(x) + ") >= 1/eta, so q would be infinite");
        }
        q[x] = 1.0 / inv;
    }
    const double qinf_inv = reciprocal(p.p_inf()) - eta;
    return Exponent(std::move(q), qinf_inv > 0.0 ? std::optional<double>(1.0 / qinf_inv) : std::nullopt);
}

}  // namespace vexmax
