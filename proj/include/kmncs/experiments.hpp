#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "kmncs/datasets.hpp"
#include "kmncs/geometry.hpp"
#include "kmncs/kernels.hpp"
#include "kmncs/svm.hpp"

namespace kmncs {

enum class DatasetKind { Moons, Circles };

std::string to_string(DatasetKind kind);
DatasetKind dataset_kind_from_string(const std::string& name);

struct ExperimentConfig {
    DatasetKind dataset = DatasetKind::Moons;
    std::size_t n_samples = 200;
    std::vector<double> noise_levels{0.1};
    double flip_y = 0.2;
    double factor = 0.5;
    std::vector<KernelSpec> kernels{Rbf{}};
    double C = 1.0;
    double tol = 1e-3;
    double train_frac = 0.6;
    std::size_t cv_folds = 5;
    std::vector<std::uint64_t> seeds;
    bool use_cv = true;
};

/// Seeds 1..count, the default multi-seed protocol.
std::vector<std::uint64_t> seed_range(std::size_t count);

/// Throws InvalidArgument for empty seed or noise lists and out-of-range fields.
void validate(const ExperimentConfig& cfg);

/// Generated and label-flipped dataset. Generation and flipping draw from
/// sub-streams derived from `seed`; meta.seed records `seed` itself.
Dataset make_dataset(DatasetKind kind, std::size_t n, double noise, double factor, double flip_y,
                     std::uint64_t seed);

/// Dataset for one (noise, seed) cell of an experiment.
Dataset generate_cell_dataset(const ExperimentConfig& cfg, double noise, std::uint64_t seed);

struct CvScore {
    double mean = 0.0;
    double std = 0.0;  // population standard deviation across folds
    std::vector<double> per_fold;
    std::size_t nonconverged_fits = 0;
};

/// Stratified f-fold cross-validated accuracy; each fold trains on its
/// complement and scores on the fold. folds == size() is leave-one-out,
/// which is allowed even when it exceeds the smaller class count.
CvScore cross_val_accuracy(const Dataset& d, const KernelSpec& spec, double C, std::size_t folds,
                           std::uint64_t seed, double tol = 1e-3);

/// Train on `train`, report accuracy on `test`.
double holdout_accuracy(const Dataset& train, const Dataset& test, const KernelSpec& spec, double C,
                        double tol = 1e-3, std::size_t* nonconverged = nullptr);

struct CellResult {
    std::size_t kernel_index = 0;
    double noise = 0.0;
    double mean_accuracy = 0.0;
    double std_accuracy = 0.0;
    std::vector<double> per_seed;
    std::size_t nonconverged_fits = 0;
};

struct ExperimentResult {
    ExperimentConfig config;
    std::string rng;
    /// Ordered by kernel, then noise level.
    std::vector<CellResult> cells;

    const CellResult& cell(std::size_t kernel_index, double noise) const;
};

/// Evaluates every (kernel, noise, seed) cell; cells run on `threads`
/// workers (0 = hardware concurrency) and the output does not depend on it.
ExperimentResult run_experiment(const ExperimentConfig& cfg, unsigned threads = 0);

struct BoundaryGrid {
    double x_min = 0.0, x_max = 0.0, y_min = 0.0, y_max = 0.0;
    std::size_t resolution = 0;
    /// Row-major with y varying slowest: value(ix, iy) = decision[iy * resolution + ix].
    std::vector<double> decision;
    std::vector<int> labels;

    double x_at(std::size_t ix) const;
    double y_at(std::size_t iy) const;
};

BoundaryGrid boundary_grid(const SvmModel& m, std::pair<double, double> x_range,
                           std::pair<double, double> y_range, std::size_t resolution);

/// Bounding box of the training points, widened by `margin` on every side.
std::pair<std::pair<double, double>, std::pair<double, double>> default_grid_bounds(const SvmModel& m,
                                                                                    double margin = 0.5);

inline constexpr std::size_t kDefaultGridResolution = 300;

enum class ExportFormat { Csv, Json };

void export_result(const ExperimentResult& r, const std::string& path, ExportFormat format);
void export_result(const BoundaryGrid& g, const std::string& path, ExportFormat format);
void export_result(const CurvatureCurve& c, const std::string& path, ExportFormat format);

ExperimentResult import_experiment_result(const std::string& path, ExportFormat format);
BoundaryGrid import_boundary_grid(const std::string& path, ExportFormat format);
CurvatureCurve import_curvature_curve(const std::string& path, ExportFormat format);

void write_boundary_csv(const BoundaryGrid& g, std::ostream& out);
BoundaryGrid read_boundary_csv(std::istream& in);

}  // namespace kmncs
