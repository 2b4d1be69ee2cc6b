#pragma once

#include <cstddef>
#include <iosfwd>
#include <string>
#include <variant>
#include <vector>

namespace kmncs {

/// N^2(r) = 0F3(; 1, 2-1/k, 2-1/k; r^2/k^2), k < 0.
struct NlcsProfile {
    double k = -0.1;
};

/// N^2(r) = exp(r^2): the undeformed coherent state, a flat feature space.
struct CoherentProfile {};

using NormalizationProfile = std::variant<NlcsProfile, CoherentProfile>;

std::string describe(const NormalizationProfile& p);

/// First and second r-derivatives of ln N(r), from the analytic series
/// derivatives. Even in r; finite at r = 0.
struct LogNormDerivatives {
    double d1 = 0.0;
    double d2 = 0.0;
};

LogNormDerivatives log_norm_derivatives(double r, const NormalizationProfile& p);

/// ln N(r) itself (used by finite-difference cross-checks).
double log_norm(double r, const NormalizationProfile& p);

/// Conformal factor of ds^2 = Omega(r) (dr^2 + r^2 dphi^2),
///   Omega = 1/2 [N''/N + N'/(r N) - (N'/N)^2] = 1/2 [(ln N)'' + (ln N)'/r].
/// Throws InvalidArgument for r <= 0 and SeriesFailure if the series fails.
double conformal_factor(double r, const NormalizationProfile& p);

/// Central-difference step used for derivatives of ln Omega.
double ricci_step(double r);

/// R = -Omega^-1 ( (ln Omega)'' + (ln Omega)'/r ), derivatives of ln Omega by
/// central differences with step `h` (0 selects ricci_step(r)).
double ricci_scalar(double r, const NormalizationProfile& p, double h = 0.0);

struct CurvatureCurve {
    NormalizationProfile profile;
    std::vector<double> r_samples;
    std::vector<double> omega;
    std::vector<double> ricci;
};

/// Uniform grid from r_min to r_max inclusive.
CurvatureCurve curvature_curve(const NormalizationProfile& p, double r_min, double r_max,
                               std::size_t samples);

/// CSV with '#' metadata lines (profile, k, h) and header `r,omega,ricci`.
void write_curvature_csv(const CurvatureCurve& c, std::ostream& out);
CurvatureCurve read_curvature_csv(std::istream& in);

}  // namespace kmncs
