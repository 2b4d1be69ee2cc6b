#include "kmncs/geometry.hpp"

#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>

#include "kmncs/error.hpp"
#include "kmncs/special_functions.hpp"
#include "kmncs/text_format.hpp"

namespace kmncs {

namespace {

constexpr double kMinRicciStep = 1e-4;
constexpr double kRelRicciStep = 1e-3;

void check_profile(const NormalizationProfile& p) {
    if (const auto* n = std::get_if<NlcsProfile>(&p))
        if (!(n->k < 0.0) || !std::isfinite(n->k))
            throw Error(ErrorCode::InvalidArgument, "nlcs profile needs k < 0");
}

Hyp0F3Derivatives nlcs_series(double z, double k) {
    const double b = 2.0 - 1.0 / k;
    try {
        return hyp0f3_derivatives({1.0, b, b, z});
    } catch (const Error& e) {
        throw Error(ErrorCode::SeriesFailure, e.what());
    }
}

// Omega without the r > 0 guard. With z = r^2/k^2, u = F'/F and w = F''/F,
//   Omega = (u + z (w - u^2)) / k^2,
// which stays finite through r = 0.
double omega_any(double r, const NormalizationProfile& p) {
    if (std::holds_alternative<CoherentProfile>(p)) return 1.0;
    const double k = std::get<NlcsProfile>(p).k;
    const double k2 = k * k;
    const double z = r * r / k2;
    const Hyp0F3Derivatives d = nlcs_series(z, k);
    const double u = d.f1 / d.f;
    const double w = d.f2 / d.f;
    return (u + z * (w - u * u)) / k2;
}

}  // namespace

std::string describe(const NormalizationProfile& p) {
    if (const auto* n = std::get_if<NlcsProfile>(&p)) return "nlcs(k=" + format_double(n->k) + ")";
    return "coherent";
}

LogNormDerivatives log_norm_derivatives(double r, const NormalizationProfile& p) {
    check_profile(p);
    if (std::holds_alternative<CoherentProfile>(p)) return {r, 1.0};
    // ln N = 1/2 ln F(z), z = r^2/k^2.
    const double k = std::get<NlcsProfile>(p).k;
    const double k2 = k * k;
    const double z = r * r / k2;
    const Hyp0F3Derivatives d = nlcs_series(z, k);
    const double u = d.f1 / d.f;
    const double w = d.f2 / d.f;
    LogNormDerivatives out;
    out.d1 = r * u / k2;
    out.d2 = 2.0 * z * (w - u * u) / k2 + u / k2;
    return out;
}

double log_norm(double r, const NormalizationProfile& p) {
    check_profile(p);
    if (std::holds_alternative<CoherentProfile>(p)) return 0.5 * r * r;
    const double k = std::get<NlcsProfile>(p).k;
    const double b = 2.0 - 1.0 / k;
    try {
        return 0.5 * hyp0f3({1.0, b, b, r * r / (k * k)}).log_abs();
    } catch (const Error& e) {
        throw Error(ErrorCode::SeriesFailure, e.what());
    }
}

double conformal_factor(double r, const NormalizationProfile& p) {
    if (!(r > 0.0)) throw Error(ErrorCode::InvalidArgument, "conformal factor needs r > 0");
    check_profile(p);
    return omega_any(r, p);
}

double ricci_step(double r) { return std::max(kMinRicciStep, kRelRicciStep * r); }

double ricci_scalar(double r, const NormalizationProfile& p, double h) {
    if (!(r > 0.0)) throw Error(ErrorCode::InvalidArgument, "Ricci scalar needs r > 0");
    check_profile(p);
    if (h <= 0.0) h = ricci_step(r);
    const double mid = conformal_factor(r, p);
    // All three samples go through the same expression, so rounding in the
    // second difference is symmetric.
    // Omega is even in r, so r - h < 0 is still a valid sample.
    const double lo = std::log(omega_any(r - h, p));
    const double hi = std::log(omega_any(r + h, p));
    const double c = std::log(mid);
    const double d1 = (hi - lo) / (2.0 * h);
    const double d2 = (hi - 2.0 * c + lo) / (h * h);
    return -(d2 + d1 / r) / mid;
}

CurvatureCurve curvature_curve(const NormalizationProfile& p, double r_min, double r_max,
                               std::size_t samples) {
    if (!(r_min > 0.0) || !(r_max > r_min))
        throw Error(ErrorCode::InvalidArgument, "curvature grid needs 0 < r_min < r_max");
    if (samples == 0) throw Error(ErrorCode::InvalidArgument, "curvature grid needs samples >= 1");
    CurvatureCurve c;
    c.profile = p;
    c.r_samples.reserve(samples);
    for (std::size_t i = 0; i < samples; ++i) {
        const double r = samples == 1 ? r_min
                         : i + 1 == samples
                             ? r_max
                             : r_min + (r_max - r_min) * static_cast<double>(i) / static_cast<double>(samples - 1);
        c.r_samples.push_back(r);
        c.omega.push_back(conformal_factor(r, p));
        c.ricci.push_back(ricci_scalar(r, p));
    }
    return c;
}

void write_curvature_csv(const CurvatureCurve& c, std::ostream& out) {
    if (const auto* n = std::get_if<NlcsProfile>(&c.profile)) {
        out << "# profile=nlcs\n# k=" << format_double(n->k) << "\n";
    } else {
        out << "# profile=coherent\n";
    }
    out << "# h=max(" << format_double(kMinRicciStep) << "," << format_double(kRelRicciStep) << "*r)\n";
    out << "r,omega,ricci\n";
    for (std::size_t i = 0; i < c.r_samples.size(); ++i)
        out << format_double(c.r_samples[i]) << ',' << format_double(c.omega[i]) << ','
            << format_double(c.ricci[i]) << '\n';
}

CurvatureCurve read_curvature_csv(std::istream& in) {
    CurvatureCurve c;
    c.profile = CoherentProfile{};
    std::string line;
    bool header = false;
    std::string profile = "coherent";
    double k = 0.0;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        if (line[0] == '#') {
            if (line.rfind("# profile=", 0) == 0) profile = line.substr(10);
            if (line.rfind("# k=", 0) == 0) k = parse_double(line.substr(4));
            continue;
        }
        if (!header) {
            if (line != "r,omega,ricci") throw Error(ErrorCode::IoError, "curvature CSV header mismatch");
            header = true;
            continue;
        }
        std::stringstream row(line);
        std::string a, b, d;
        if (!std::getline(row, a, ',') || !std::getline(row, b, ',') || !std::getline(row, d))
            throw Error(ErrorCode::IoError, "curvature CSV row needs 3 columns");
        c.r_samples.push_back(parse_double(a));
        c.omega.push_back(parse_double(b));
        c.ricci.push_back(parse_double(d));
    }
    if (profile == "nlcs") c.profile = NlcsProfile{k};
    return c;
}

}  // namespace kmncs
