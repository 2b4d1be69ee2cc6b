#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <utility>
#include <vector>

#include "kmncs/kernels.hpp"

namespace kmncs {

inline constexpr double kSupportThreshold = 1e-10;

/// Snapshot handed to SmoOptions::on_update after every accepted pair update.
struct SmoProgress {
    std::size_t iteration = 0;
    std::size_t i = 0;
    std::size_t j = 0;
    std::span<const double> alphas;
    double dual_objective = 0.0;
    double kkt_violation = 0.0;
};

struct SmoOptions {
    double C = 1.0;
    double tol = 1e-3;
    /// Cap on working-pair iterations; 0 selects 10 n.
    std::size_t max_passes = 0;
    /// Curvature below which a pair step is clamped to the improving box edge.
    double min_curvature = 1e-12;
    std::function<void(const SmoProgress&)> on_update;
};

struct TrainingReport {
    std::size_t iterations = 0;
    double dual_objective = 0.0;
    double kkt_violation = 0.0;
    bool converged = false;
};

/// Optimum of the soft-margin dual on a Gram matrix, independent of points.
struct DualSolution {
    std::vector<double> alphas;
    double bias = 0.0;
    TrainingReport report;
};

struct SvmModel {
    std::vector<double> alphas;
    double bias = 0.0;
    std::vector<int> labels;
    std::vector<std::size_t> support_indices;
    KernelSpec kernel;
    std::vector<Point> train_points;
    double C = 1.0;
};

/// Maximizes sum(a) - 1/2 a' Q a, 0 <= a <= C, y'a = 0, by SMO with
/// maximal-violating-pair selection. Throws SingleClassData. A run that
/// exhausts its iteration budget returns the best-so-far solution with
/// `report.converged == false`.
DualSolution solve_dual(const GramMatrix& g, std::span<const int> labels, const SmoOptions& options = {});

std::pair<SvmModel, TrainingReport> train_smo(const GramMatrix& g, std::span<const int> labels,
                                              std::span<const Point> points,
                                              const SmoOptions& options = {});

/// sum_i a_i y_i G_ij contributions are evaluated in index order, so a
/// model reloaded from its serialized form predicts bit-identically.
class Predictor {
public:
    explicit Predictor(const SvmModel& model);

    double decision(std::span<const double> x) const;
    int predict(std::span<const double> x) const { return label_of(decision(x)); }
    std::size_t dimension() const { return dim_; }

    /// Sign with ties broken towards +1.
    static int label_of(double decision) { return decision >= 0.0 ? 1 : -1; }

private:
    KernelEvaluator support_;
    std::vector<double> coef_;  // a_i y_i over support vectors
    double bias_;
    std::size_t dim_;
};

double decision(const SvmModel& m, std::span<const double> x);
int predict(const SvmModel& m, std::span<const double> x);

/// sum(a) - 1/2 sum_ij a_i a_j y_i y_j G_ij.
double dual_objective(std::span<const double> alphas, std::span<const int> labels, const GramMatrix& g);
double dual_objective(const SvmModel& m, const GramMatrix& g);

}  // namespace kmncs
