#include "kmncs/kernels.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <complex>
#include <memory>
#include <cstdio>
#include <ostream>
#include <sstream>
#include <thread>

#include "kmncs/error.hpp"
#include "kmncs/special_functions.hpp"
#include "kmncs/text_format.hpp"

namespace kmncs {

namespace {

template <class... Ts>
struct Overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

void check_dims(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size()) {
        std::ostringstream msg;
        msg << "kernel arguments have dimensions " << x.size() << " and " << y.size();
        throw Error(ErrorCode::DimensionMismatch, msg.str());
    }
}

double nlcs_b(double k) { return 2.0 - 1.0 / k; }

SeriesResult nlcs_series(double z, double k) {
    const double b = nlcs_b(k);
    return hyp0f3({1.0, b, b, z});
}

// sum_{n=0}^{M} t^n / rho_n^2 by recurrence on the step ratio.
double deformed_sum(double t, const DeformationSequence& rho, std::size_t truncation) {
    double term = 1.0;
    double sum = 1.0;
    double carry = 0.0;
    for (std::size_t n = 1; n <= truncation; ++n) {
        const double s = rho.step(n);
        term *= t / (s * s);
        const double next = sum + term;
        carry += std::abs(sum) >= std::abs(term) ? (sum - next) + term : (term - next) + sum;
        sum = next;
    }
    return sum + carry;
}

void check_general(const DeformationSequence& rho, std::size_t truncation) {
    if (truncation < 1) throw Error(ErrorCode::InvalidArgument, "truncation must be >= 1");
    if (truncation > rho.max_index())
        throw Error(ErrorCode::InvalidArgument, "deformation sequence shorter than truncation");
}

}  // namespace

// ---------------------------------------------------------------------------
// DeformationSequence

DeformationSequence::DeformationSequence(std::string name, StepFn step, std::size_t max_index)
    : name_(std::move(name)), step_(std::move(step)), max_index_(max_index) {}

DeformationSequence DeformationSequence::harmonic() {
    return {"harmonic", [](std::size_t n) { return std::sqrt(static_cast<double>(n)); }};
}

DeformationSequence DeformationSequence::variable_mass(double k) {
    if (!(k < 0.0) || !std::isfinite(k))
        throw Error(ErrorCode::InvalidArgument, "variable-mass deformation needs k < 0");
    const double b = nlcs_b(k);
    DeformationSequence seq("variable_mass(k=" + format_double(k) + ")", [k, b](std::size_t n) {
        const double m = static_cast<double>(n);
        return m * std::abs(k) * (b + m - 1.0);
    });
    seq.parameter_ = k;
    return seq;
}

DeformationSequence DeformationSequence::from_values(std::vector<double> rho) {
    if (rho.empty() || rho[0] != 1.0)
        throw Error(ErrorCode::InvalidArgument, "deformation table must start with rho_0 = 1");
    for (double r : rho)
        if (!(r > 0.0) || !std::isfinite(r))
            throw Error(ErrorCode::InvalidArgument, "deformation weights must be positive");
    const std::size_t max_index = rho.size() - 1;
    auto table = std::make_shared<const std::vector<double>>(rho);
    DeformationSequence seq("table",
                            [table](std::size_t n) { return (*table)[n] / (*table)[n - 1]; },
                            max_index);
    seq.values_ = std::move(rho);
    return seq;
}

double DeformationSequence::step(std::size_t n) const {
    if (n == 0 || n > max_index_) throw Error(ErrorCode::InvalidArgument, "deformation index out of range");
    return step_(n);
}

double DeformationSequence::rho(std::size_t n) const {
    double r = 1.0;
    for (std::size_t i = 1; i <= n; ++i) r *= step(i);
    return r;
}

// ---------------------------------------------------------------------------
// Specs

void validate(const KernelSpec& spec) {
    std::visit(Overloaded{
                   [](const Rbf& s) {
                       if (!(s.sigma > 0.0) || !std::isfinite(s.sigma))
                           throw Error(ErrorCode::InvalidArgument, "rbf sigma must be positive");
                   },
                   [](const Squeezed& s) {
                       if (!std::isfinite(s.c))
                           throw Error(ErrorCode::InvalidArgument, "squeezing parameter must be finite");
                   },
                   [](const Nlcs& s) {
                       if (!(s.k < 0.0) || !std::isfinite(s.k))
                           throw Error(ErrorCode::InvalidArgument, "nlcs k must be negative");
                   },
                   [](const GeneralNlcs& s) { check_general(s.rho, s.truncation); },
               },
               spec);
}

std::string describe(const KernelSpec& spec) {
    return std::visit(Overloaded{
                          [](const Rbf& s) { return "rbf(sigma=" + format_double(s.sigma) + ")"; },
                          [](const Squeezed& s) { return "squeezed(c=" + format_double(s.c) + ")"; },
                          [](const Nlcs& s) { return "nlcs(k=" + format_double(s.k) + ")"; },
                          [](const GeneralNlcs& s) {
                              return "general_nlcs(rho=" + s.rho.name() +
                                     ",M=" + std::to_string(s.truncation) + ")";
                          },
                      },
                      spec);
}

// ---------------------------------------------------------------------------
// Kernel functions

double rbf_eval(std::span<const double> x, std::span<const double> y, double sigma) {
    check_dims(x, y);
    double d2 = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double d = x[i] - y[i];
        d2 += d * d;
    }
    return std::exp(-d2 / (2.0 * sigma * sigma));
}

double squeezed_eval(std::span<const double> x, std::span<const double> y, double c) {
    check_dims(x, y);
    const double sech2 = 1.0 / (std::cosh(c) * std::cosh(c));
    const double t = std::tanh(c) * std::tanh(c);
    std::complex<double> prod(1.0, 0.0);
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double d = x[i] - y[i];
        const double half = std::sin(0.5 * d);
        // 1 - t e^{i d}, with 1 - t written as sech^2 c so that d = 0 gives
        // exactly sech^2 c.
        const std::complex<double> denom(sech2 + 2.0 * t * half * half, -t * std::sin(d));
        prod *= sech2 / denom;
    }
    return std::sqrt(std::abs(prod));
}

double nlcs_norm(double t, double k) {
    if (!(k < 0.0)) throw Error(ErrorCode::InvalidArgument, "nlcs k must be negative");
    const SeriesResult f = nlcs_series(t * t / (k * k), k);
    return std::sqrt(f.value) * std::exp(0.5 * f.log_scale);
}

double nlcs_eval(std::span<const double> x, std::span<const double> y, double k) {
    check_dims(x, y);
    validate(Nlcs{k});
    double prod = 1.0;
    const double k2 = k * k;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const SeriesResult num = nlcs_series(x[i] * y[i] / k2, k);
        const SeriesResult nx = nlcs_series(x[i] * x[i] / k2, k);
        const SeriesResult ny = nlcs_series(y[i] * y[i] / k2, k);
        const double ratio = num.value / (std::sqrt(nx.value) * std::sqrt(ny.value));
        const double scale = num.log_scale - 0.5 * (nx.log_scale + ny.log_scale);
        prod *= scale == 0.0 ? ratio : ratio * std::exp(scale);
    }
    return prod;
}

double general_nlcs_eval(std::span<const double> x, std::span<const double> y,
                         const DeformationSequence& rho, std::size_t truncation) {
    check_dims(x, y);
    check_general(rho, truncation);
    double prod = 1.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double num = deformed_sum(x[i] * y[i], rho, truncation);
        const double nx = deformed_sum(x[i] * x[i], rho, truncation);
        const double ny = deformed_sum(y[i] * y[i], rho, truncation);
        prod *= num / (std::sqrt(nx) * std::sqrt(ny));
    }
    return prod;
}

double kernel_eval(const KernelSpec& spec, std::span<const double> x, std::span<const double> y) {
    return std::visit(Overloaded{
                          [&](const Rbf& s) { return rbf_eval(x, y, s.sigma); },
                          [&](const Squeezed& s) { return squeezed_eval(x, y, s.c); },
                          [&](const Nlcs& s) { return nlcs_eval(x, y, s.k); },
                          [&](const GeneralNlcs& s) {
                              return general_nlcs_eval(x, y, s.rho, s.truncation);
                          },
                      },
                      spec);
}

// ---------------------------------------------------------------------------
// KernelEvaluator

KernelEvaluator::KernelEvaluator(KernelSpec spec, std::vector<Point> points)
    : spec_(std::move(spec)), points_(std::move(points)) {
    validate(spec_);
    if (!points_.empty()) dim_ = points_.front().size();
    for (const Point& p : points_)
        if (p.size() != dim_) throw Error(ErrorCode::DimensionMismatch, "points differ in dimension");
    if (std::holds_alternative<Nlcs>(spec_) || std::holds_alternative<GeneralNlcs>(spec_)) {
        norms_.reserve(points_.size() * dim_);
        for (const Point& p : points_) {
            auto n = normalize(p);
            norms_.insert(norms_.end(), n.begin(), n.end());
        }
    }
}

std::vector<KernelEvaluator::Norm> KernelEvaluator::normalize(std::span<const double> x) const {
    std::vector<Norm> out;
    if (const auto* s = std::get_if<Nlcs>(&spec_)) {
        out.reserve(x.size());
        for (double t : x) {
            const SeriesResult f = nlcs_series(t * t / (s->k * s->k), s->k);
            out.push_back({std::sqrt(f.value), 0.5 * f.log_scale});
        }
    } else if (const auto* g = std::get_if<GeneralNlcs>(&spec_)) {
        out.reserve(x.size());
        for (double t : x) out.push_back({std::sqrt(deformed_sum(t * t, g->rho, g->truncation)), 0.0});
    }
    return out;
}

double KernelEvaluator::eval(std::span<const double> x, std::span<const Norm> xn,
                             std::span<const double> y, std::span<const Norm> yn) const {
    return std::visit(Overloaded{
                          [&](const Rbf& s) { return rbf_eval(x, y, s.sigma); },
                          [&](const Squeezed& s) { return squeezed_eval(x, y, s.c); },
                          [&](const Nlcs& s) {
                              const double k2 = s.k * s.k;
                              double prod = 1.0;
                              for (std::size_t i = 0; i < x.size(); ++i) {
                                  const SeriesResult num = nlcs_series(x[i] * y[i] / k2, s.k);
                                  const double ratio = num.value / (xn[i].mantissa * yn[i].mantissa);
                                  const double scale = num.log_scale - xn[i].log_scale - yn[i].log_scale;
                                  prod *= scale == 0.0 ? ratio : ratio * std::exp(scale);
                              }
                              return prod;
                          },
                          [&](const GeneralNlcs& s) {
                              double prod = 1.0;
                              for (std::size_t i = 0; i < x.size(); ++i)
                                  prod *= deformed_sum(x[i] * y[i], s.rho, s.truncation) /
                                          (xn[i].mantissa * yn[i].mantissa);
                              return prod;
                          },
                      },
                      spec_);
}

double KernelEvaluator::pair(std::size_t i, std::size_t j) const {
    std::span<const Norm> ni, nj;
    if (!norms_.empty()) {
        ni = {norms_.data() + i * dim_, dim_};
        nj = {norms_.data() + j * dim_, dim_};
    }
    return eval(points_[i], ni, points_[j], nj);
}

std::vector<double> KernelEvaluator::row(std::span<const double> x) const {
    if (x.size() != dim_ && !points_.empty())
        throw Error(ErrorCode::DimensionMismatch, "query point has the wrong dimension");
    const std::vector<Norm> xn = normalize(x);
    std::vector<double> out(points_.size());
    for (std::size_t i = 0; i < points_.size(); ++i) {
        std::span<const Norm> ni;
        if (!norms_.empty()) ni = {norms_.data() + i * dim_, dim_};
        out[i] = eval(points_[i], ni, x, xn);
    }
    return out;
}

// ---------------------------------------------------------------------------
// Gram matrices

GramMatrix::GramMatrix(std::size_t n, std::vector<double> values, KernelSpec kernel,
                       std::string fingerprint)
    : n_(n), values_(std::move(values)), kernel_(std::move(kernel)), fingerprint_(std::move(fingerprint)) {
    if (values_.size() != n_ * n_) throw Error(ErrorCode::InvalidArgument, "Gram storage is not n x n");
}

void GramMatrix::write_csv(std::ostream& out) const {
    out << "# kernel=" << describe(kernel_) << " n=" << n_ << "\n";
    for (std::size_t i = 0; i < n_; ++i) {
        for (std::size_t j = 0; j < n_; ++j) {
            if (j) out << ',';
            out << format_double((*this)(i, j));
        }
        out << '\n';
    }
}

std::string fingerprint(std::span<const Point> points) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    auto feed = [&h](std::uint64_t word) {
        for (int b = 0; b < 8; ++b) {
            h ^= (word >> (8 * b)) & 0xffU;
            h *= 0x100000001b3ULL;
        }
    };
    feed(points.size());
    for (const Point& p : points) {
        feed(p.size());
        for (double v : p) feed(std::bit_cast<std::uint64_t>(v));
    }
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

GramMatrix gram(const KernelEvaluator& evaluator, unsigned threads) {
    const std::size_t n = evaluator.size();
    if (n == 0) throw Error(ErrorCode::InvalidSize, "Gram matrix needs at least one point");
    std::vector<double> values(n * n);
    auto work = [&](std::size_t first, std::size_t stride) {
        for (std::size_t i = first; i < n; i += stride)
            for (std::size_t j = i; j < n; ++j) {
                const double v = evaluator.pair(i, j);
                values[i * n + j] = v;
                values[j * n + i] = v;
            }
    };
    if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
    const std::size_t workers = std::min<std::size_t>(threads, n < 128 ? 1 : n / 64);
    if (workers <= 1) {
        work(0, 1);
    } else {
        // Each unordered pair belongs to exactly one row i <= j, so workers
        // write disjoint cells. Exceptions are forwarded to the caller.
        std::vector<std::exception_ptr> errors(workers);
        std::vector<std::thread> pool;
        for (std::size_t t = 0; t < workers; ++t)
            pool.emplace_back([&, t] {
                try {
                    work(t, workers);
                } catch (...) {
                    errors[t] = std::current_exception();
                }
            });
        for (auto& th : pool) th.join();
        for (auto& e : errors)
            if (e) std::rethrow_exception(e);
    }
    return GramMatrix(n, std::move(values), evaluator.spec(), fingerprint(evaluator.points()));
}

GramMatrix gram(std::span<const Point> points, const KernelSpec& spec, unsigned threads) {
    return gram(KernelEvaluator(spec, std::vector<Point>(points.begin(), points.end())), threads);
}

// ---------------------------------------------------------------------------
// Eigenvalues

std::vector<double> symmetric_eigenvalues(std::vector<double> a, std::size_t n) {
    if (a.size() != n * n) throw Error(ErrorCode::InvalidArgument, "matrix storage is not n x n");
    auto at = [&](std::size_t i, std::size_t j) -> double& { return a[i * n + j]; };

    double total = 0.0;
    for (double v : a) total += v * v;
    const double target = 1e-12 * std::sqrt(total);

    constexpr int kMaxSweeps = 100;
    for (int sweep = 0;; ++sweep) {
        double off = 0.0;
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = i + 1; j < n; ++j) off += 2.0 * at(i, j) * at(i, j);
        if (std::sqrt(off) <= target) break;
        if (sweep == kMaxSweeps)
            throw Error(ErrorCode::NonConvergence, "Jacobi eigensolver did not converge");

        for (std::size_t p = 0; p + 1 < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                const double apq = at(p, q);
                if (apq == 0.0) continue;
                const double theta = (at(q, q) - at(p, p)) / (2.0 * apq);
                const double t = (theta >= 0.0 ? 1.0 : -1.0) / (std::abs(theta) + std::hypot(theta, 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;
                for (std::size_t k = 0; k < n; ++k) {
                    const double akp = at(k, p);
                    const double akq = at(k, q);
                    at(k, p) = c * akp - s * akq;
                    at(k, q) = s * akp + c * akq;
                }
                for (std::size_t k = 0; k < n; ++k) {
                    const double apk = at(p, k);
                    const double aqk = at(q, k);
                    at(p, k) = c * apk - s * aqk;
                    at(q, k) = s * apk + c * aqk;
                }
                at(p, q) = 0.0;
                at(q, p) = 0.0;
            }
        }
    }
    std::vector<double> eig(n);
    for (std::size_t i = 0; i < n; ++i) eig[i] = at(i, i);
    std::sort(eig.begin(), eig.end());
    return eig;
}

double min_eigenvalue(const GramMatrix& g) {
    if (g.size() > kMaxEigenSize) {
        std::ostringstream msg;
        msg << "eigensolve limited to " << kMaxEigenSize << " points, got " << g.size();
        throw Error(ErrorCode::SizeLimitExceeded, msg.str());
    }
    return symmetric_eigenvalues(g.values(), g.size()).front();
}

}  // namespace kmncs
