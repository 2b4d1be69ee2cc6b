#include "kmncs/special_functions.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "kmncs/error.hpp"

namespace kmncs {

namespace {

constexpr double kRescaleThreshold = 1e300;
constexpr double kRescaleFactor = 1e-250;
const double kLogRescale = 250.0 * std::log(10.0);

bool is_pole(double b) { return b <= 0.0 && b == std::floor(b); }

void check_params(const Hyp0F3Params& p, double rel_tol) {
    for (double b : {p.b1, p.b2, p.b3}) {
        if (!std::isfinite(b) || is_pole(b)) {
            std::ostringstream msg;
            msg << "0F3 lower parameter " << b << " is not admissible";
            throw Error(ErrorCode::InvalidParams, msg.str());
        }
    }
    if (!std::isfinite(p.z)) throw Error(ErrorCode::InvalidParams, "0F3 argument is not finite");
    if (!(rel_tol > 0.0)) throw Error(ErrorCode::InvalidArgument, "rel_tol must be positive");
}

// Neumaier's variant of Kahan summation; the terms of 0F3 alternate in
// sign for z < 0.
struct CompensatedSum {
    double sum = 0.0;
    double carry = 0.0;

    void add(double x) {
        double t = sum + x;
        if (std::abs(sum) >= std::abs(x))
            carry += (sum - t) + x;
        else
            carry += (x - t) + sum;
        sum = t;
    }
    double total() const { return sum + carry; }
    void scale(double f) {
        sum *= f;
        carry *= f;
    }
};

}  // namespace

double SeriesResult::log_abs() const { return std::log(std::abs(value)) + log_scale; }

double SeriesResult::unscaled() const {
    return log_scale == 0.0 ? value : value * std::exp(log_scale);
}

double pochhammer(double u, unsigned n) {
    double r = 1.0;
    for (unsigned i = 0; i < n; ++i) r *= u + static_cast<double>(i);
    return r;
}

SeriesResult sum_hyp0f3(const Hyp0F3Params& p, double rel_tol, std::size_t max_terms) {
    check_params(p, rel_tol);
    SeriesResult out;
    if (max_terms == 0) return out;

    CompensatedSum acc;
    double term = 1.0;
    acc.add(term);
    std::size_t quiet = 0;
    std::size_t n = 0;
    out.terms_used = 1;
    while (out.terms_used < max_terms) {
        const double m = static_cast<double>(n);
        term *= p.z / ((m + 1.0) * (p.b1 + m) * (p.b2 + m) * (p.b3 + m));
        ++n;
        acc.add(term);
        ++out.terms_used;
        if (std::abs(acc.total()) > kRescaleThreshold || std::abs(term) > kRescaleThreshold) {
            acc.scale(kRescaleFactor);
            term *= kRescaleFactor;
            out.log_scale += kLogRescale;
        }
        // Two consecutive negligible terms, and never before n = 4: with
        // large lower parameters the early terms can be tiny even though
        // the series has not yet reached its peak.
        if (std::abs(term) <= rel_tol * std::abs(acc.total()))
            ++quiet;
        else
            quiet = 0;
        if (quiet >= 2 && n >= 4) {
            out.converged = true;
            break;
        }
    }
    out.value = acc.total();
    return out;
}

SeriesResult hyp0f3(const Hyp0F3Params& p, double rel_tol, std::size_t max_terms) {
    SeriesResult r = sum_hyp0f3(p, rel_tol, max_terms);
    if (!r.converged) {
        std::ostringstream msg;
        msg << "0F3(;" << p.b1 << "," << p.b2 << "," << p.b3 << ";" << p.z
            << ") did not converge within " << max_terms << " terms";
        throw Error(ErrorCode::NonConvergence, msg.str());
    }
    return r;
}

Hyp0F3Derivatives hyp0f3_derivatives(const Hyp0F3Params& p, double rel_tol,
                                     std::size_t max_terms) {
    // Differentiating term by term and re-indexing gives
    //   F'  = 0F3(; b+1; z) / (b1 b2 b3)
    //   F'' = 0F3(; b+2; z) / (b1 (b1+1) b2 (b2+1) b3 (b3+1)).
    const SeriesResult f = hyp0f3(p, rel_tol, max_terms);
    const SeriesResult g1 = hyp0f3({p.b1 + 1.0, p.b2 + 1.0, p.b3 + 1.0, p.z}, rel_tol, max_terms);
    const SeriesResult g2 = hyp0f3({p.b1 + 2.0, p.b2 + 2.0, p.b3 + 2.0, p.z}, rel_tol, max_terms);

    const double c1 = 1.0 / (p.b1 * p.b2 * p.b3);
    const double c2 = c1 / ((p.b1 + 1.0) * (p.b2 + 1.0) * (p.b3 + 1.0));

    Hyp0F3Derivatives d;
    d.log_scale = std::max({f.log_scale, g1.log_scale, g2.log_scale});
    auto align = [&](const SeriesResult& s) {
        return s.log_scale == d.log_scale ? s.value : s.value * std::exp(s.log_scale - d.log_scale);
    };
    d.f = align(f);
    d.f1 = c1 * align(g1);
    d.f2 = c2 * align(g2);
    return d;
}

}  // namespace kmncs
