#pragma once

#include <cstddef>

namespace kmncs {

/// Outcome of a power-series summation.
///
/// The represented sum is `value * exp(log_scale)`. `log_scale` is zero
/// unless a partial sum exceeded 1e300, in which case the mantissa was
/// rescaled during accumulation; ratios of results remain meaningful.
struct SeriesResult {
    double value = 0.0;
    double log_scale = 0.0;
    std::size_t terms_used = 0;
    bool converged = false;

    double log_abs() const;
    /// Unscaled value, which is +/-inf when the sum does not fit a double.
    double unscaled() const;
};

/// Lower parameters and argument of 0F3(; b1, b2, b3; z).
struct Hyp0F3Params {
    double b1 = 1.0;
    double b2 = 1.0;
    double b3 = 1.0;
    double z = 0.0;
};

inline constexpr double kDefaultSeriesTol = 1e-15;
inline constexpr std::size_t kDefaultMaxTerms = 10000;

/// Rising factorial (u)_n = u (u+1) ... (u+n-1), with (u)_0 = 1.
double pochhammer(double u, unsigned n);

/// Sums 0F3 without throwing on exhaustion of the term budget; the result
/// then has `converged == false`. Throws InvalidParams for poles.
SeriesResult sum_hyp0f3(const Hyp0F3Params& p, double rel_tol = kDefaultSeriesTol,
                        std::size_t max_terms = kDefaultMaxTerms);

/// 0F3(; b1, b2, b3; z) = sum_n z^n / (n! (b1)_n (b2)_n (b3)_n).
/// Throws NonConvergence when `max_terms` is exhausted.
SeriesResult hyp0f3(const Hyp0F3Params& p, double rel_tol = kDefaultSeriesTol,
                    std::size_t max_terms = kDefaultMaxTerms);

/// F, dF/dz and d2F/dz2 sharing one scale: the true values are
/// `f * exp(log_scale)` etc.
struct Hyp0F3Derivatives {
    double f = 0.0;
    double f1 = 0.0;
    double f2 = 0.0;
    double log_scale = 0.0;
};

Hyp0F3Derivatives hyp0f3_derivatives(const Hyp0F3Params& p, double rel_tol = kDefaultSeriesTol,
                                     std::size_t max_terms = kDefaultMaxTerms);

}  // namespace kmncs
