#pragma once
// Slow reference implementations used only by the tests.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <span>
#include <vector>

#include <boost/multiprecision/cpp_dec_float.hpp>

namespace oracle {

using Big = boost::multiprecision::cpp_dec_float_50;

// 0F3(; b1, b2, b3; z) in 50-digit arithmetic, coefficients built from
// explicit factorials and Pochhammer products rather than a term ratio.
inline Big hyp0f3(double b1, double b2, double b3, const Big& zb, std::size_t terms = 400) {
    Big sum = 0, fact = 1, p1 = 1, p2 = 1, p3 = 1, zn = 1;
    for (std::size_t n = 0; n < terms; ++n) {
        if (n > 0) {
            fact *= Big(n);
            p1 *= Big(b1) + Big(n - 1);
            p2 *= Big(b2) + Big(n - 1);
            p3 *= Big(b3) + Big(n - 1);
            zn *= zb;
        }
        const Big t = zn / (fact * p1 * p2 * p3);
        sum += t;
        if (n > 8 && abs(t) < abs(sum) * Big("1e-48")) break;
    }
    return sum;
}

// Variable-mass weight rho_n = n! |k|^n (2 - 1/k)_n.
inline Big rho_variable_mass(std::size_t n, double k) {
    const Big b = Big(2) - Big(1) / Big(k);
    Big r = 1;
    for (std::size_t i = 1; i <= n; ++i) r *= Big(i) * abs(Big(k)) * (b + Big(i - 1));
    return r;
}

// Explicit feature-map inner product <x|y> for one component, truncated at M.
inline Big feature_map_kernel(double x, double y, double k, std::size_t M) {
    Big num = 0, nx = 0, ny = 0;
    Big px = 1, py = 1;
    for (std::size_t n = 0; n <= M; ++n) {
        const Big r2 = pow(rho_variable_mass(n, k), 2);
        num += px * py / r2;
        nx += px * px / r2;
        ny += py * py / r2;
        px *= Big(x);
        py *= Big(y);
    }
    return num / sqrt(nx * ny);
}

// Euclidean projection onto {0 <= a <= C, y'a = 0} by bisection on the
// multiplier of the equality constraint.
inline std::vector<double> project(std::span<const double> v, std::span<const int> y, double C) {
    const std::size_t n = v.size();
    auto at = [&](double lambda, std::vector<double>& out) {
        double s = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            out[i] = std::clamp(v[i] - lambda * y[i], 0.0, C);
            s += y[i] * out[i];
        }
        return s;
    };
    std::vector<double> a(n);
    double lo = -1.0, hi = 1.0;
    while (at(lo, a) < 0.0) lo *= 2.0;
    while (at(hi, a) > 0.0) hi *= 2.0;
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        (at(mid, a) > 0.0 ? lo : hi) = mid;
    }
    at(0.5 * (lo + hi), a);
    return a;
}

inline double dual_objective(std::span<const double> a, std::span<const int> y, std::span<const double> G) {
    const std::size_t n = a.size();
    double lin = 0.0, quad = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        lin += a[i];
        for (std::size_t j = 0; j < n; ++j) quad += a[i] * a[j] * y[i] * y[j] * G[i * n + j];
    }
    return lin - 0.5 * quad;
}

// Accelerated projected gradient ascent on the SVM dual (G row-major n x n).
inline double projected_gradient_dual(std::span<const double> G, std::span<const int> y, double C,
                                      std::size_t max_iter = 200000) {
    const std::size_t n = y.size();
    double L = 0.0;  // row-sum bound on the largest eigenvalue of Q
    for (std::size_t i = 0; i < n; ++i) {
        double s = 0.0;
        for (std::size_t j = 0; j < n; ++j) s += std::abs(G[i * n + j]);
        L = std::max(L, s);
    }
    std::vector<double> a(n, 0.0), prev(n, 0.0), m(n, 0.0), grad(n), step(n);
    double t = 1.0, best = 0.0;
    for (std::size_t it = 0; it < max_iter; ++it) {
        for (std::size_t i = 0; i < n; ++i) {
            double s = 0.0;
            for (std::size_t j = 0; j < n; ++j) s += y[i] * y[j] * G[i * n + j] * m[j];
            grad[i] = 1.0 - s;
            step[i] = m[i] + grad[i] / L;
        }
        prev = a;
        a = project(step, y, C);
        const double t_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t * t));
        double delta = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            m[i] = a[i] + (t - 1.0) / t_next * (a[i] - prev[i]);
            delta = std::max(delta, std::abs(a[i] - prev[i]));
        }
        t = t_next;
        const double obj = dual_objective(a, y, G);
        if (obj < best) {  // restart momentum on a non-monotone step
            m = a;
            t = 1.0;
        }
        best = std::max(best, obj);
        if (delta < 1e-13 && it > 100) break;
    }
    return best;
}

}  // namespace oracle
