#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

namespace kmncs {

using Point = std::vector<double>;

/// Coefficient weights rho_n of a non-linear coherent state
///   |x>_f = N^-1 sum_n x^n / rho_n |n>,   rho_0 = 1.
///
/// The sequence is stored through its step ratio rho_n / rho_{n-1} (n >= 1)
/// so that kernels can be summed by recurrence without forming rho_n, which
/// overflows quickly for factorial-type deformations.
class DeformationSequence {
public:
    using StepFn = std::function<double(std::size_t)>;

    DeformationSequence(std::string name, StepFn step, std::size_t max_index = SIZE_MAX);

    /// rho_n^2 = n!, the undeformed oscillator (RBF with sigma = 1 in the limit).
    static DeformationSequence harmonic();
    /// rho_n = n! |k|^n (2 - 1/k)_n, the variable-mass oscillator.
    static DeformationSequence variable_mass(double k);
    /// Explicit table; `rho[0]` must be 1 and every entry positive.
    static DeformationSequence from_values(std::vector<double> rho);

    double step(std::size_t n) const;
    double rho(std::size_t n) const;
    const std::string& name() const { return name_; }
    /// Largest n for which rho_n is defined.
    std::size_t max_index() const { return max_index_; }
    /// Explicit table, when built by from_values (empty otherwise).
    const std::vector<double>& values() const { return values_; }
    /// Family parameter (k for variable_mass).
    std::optional<double> parameter() const { return parameter_; }

private:
    std::string name_;
    StepFn step_;
    std::size_t max_index_;
    std::vector<double> values_;
    std::optional<double> parameter_;
};

struct Rbf {
    double sigma = 1.0;
};

/// Single squeezing parameter shared by every point (c' = c).
struct Squeezed {
    double c = 1.0;
};

/// Variable-mass non-linear coherent state kernel, k = delta^2 / (2 lambda) < 0.
struct Nlcs {
    double k = -0.1;
};

struct GeneralNlcs {
    DeformationSequence rho = DeformationSequence::harmonic();
    std::size_t truncation = 60;
};

using KernelSpec = std::variant<Rbf, Squeezed, Nlcs, GeneralNlcs>;

/// Throws InvalidArgument if a hyperparameter is out of range.
void validate(const KernelSpec& spec);

/// Compact identifier, e.g. "rbf(sigma=1)" or "nlcs(k=-0.001)".
std::string describe(const KernelSpec& spec);

double rbf_eval(std::span<const double> x, std::span<const double> y, double sigma);
double squeezed_eval(std::span<const double> x, std::span<const double> y, double c);

/// Normalization N(t) = sqrt(0F3(; 1, 2-1/k, 2-1/k; t^2/k^2)).
double nlcs_norm(double t, double k);
double nlcs_eval(std::span<const double> x, std::span<const double> y, double k);

double general_nlcs_eval(std::span<const double> x, std::span<const double> y,
                         const DeformationSequence& rho, std::size_t truncation);

double kernel_eval(const KernelSpec& spec, std::span<const double> x, std::span<const double> y);

/// Kernel bound to a fixed point set, caching the per-component
/// normalizations of the NLCS kernels so that each is computed once per
/// point rather than once per pair.
class KernelEvaluator {
public:
    KernelEvaluator(KernelSpec spec, std::vector<Point> points);

    std::size_t size() const { return points_.size(); }
    std::size_t dimension() const { return dim_; }
    const KernelSpec& spec() const { return spec_; }
    const std::vector<Point>& points() const { return points_; }

    double pair(std::size_t i, std::size_t j) const;
    /// k(points[i], x) for every i.
    std::vector<double> row(std::span<const double> x) const;

private:
    struct Norm {
        double mantissa = 1.0;
        double log_scale = 0.0;
    };
    std::vector<Norm> normalize(std::span<const double> x) const;
    double eval(std::span<const double> x, std::span<const Norm> xn, std::span<const double> y,
                std::span<const Norm> yn) const;

    KernelSpec spec_;
    std::vector<Point> points_;
    std::size_t dim_ = 0;
    std::vector<Norm> norms_;  // size() * dim_, empty for RBF / squeezed
};

/// Dense symmetric Gram matrix, immutable once built.
class GramMatrix {
public:
    GramMatrix(std::size_t n, std::vector<double> values, KernelSpec kernel, std::string fingerprint);

    std::size_t size() const { return n_; }
    double operator()(std::size_t i, std::size_t j) const { return values_[i * n_ + j]; }
    std::span<const double> row(std::size_t i) const { return {values_.data() + i * n_, n_}; }
    const std::vector<double>& values() const { return values_; }
    const KernelSpec& kernel() const { return kernel_; }
    const std::string& dataset_fingerprint() const { return fingerprint_; }

    /// Row-major CSV preceded by `# kernel=<spec> n=<n>`.
    void write_csv(std::ostream& out) const;

private:
    std::size_t n_;
    std::vector<double> values_;
    KernelSpec kernel_;
    std::string fingerprint_;
};

/// Hex FNV-1a digest of the coordinates of a point set.
std::string fingerprint(std::span<const Point> points);

/// Each unordered pair is evaluated once and mirrored. Rows are spread over
/// `threads` workers (0 = hardware concurrency).
GramMatrix gram(std::span<const Point> points, const KernelSpec& spec, unsigned threads = 0);

/// Gram of an already-prepared point set.
GramMatrix gram(const KernelEvaluator& evaluator, unsigned threads = 0);

inline constexpr std::size_t kMaxEigenSize = 2000;

/// Smallest eigenvalue by cyclic Jacobi rotations. Throws SizeLimitExceeded
/// above kMaxEigenSize points.
double min_eigenvalue(const GramMatrix& g);

/// All eigenvalues (ascending) of a dense symmetric row-major matrix.
std::vector<double> symmetric_eigenvalues(std::vector<double> a, std::size_t n);

}  // namespace kmncs
