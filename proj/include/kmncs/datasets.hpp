#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "kmncs/kernels.hpp"

namespace kmncs {

struct DatasetMeta {
    std::string generator;  // "moons", "circles", or "file"
    std::size_t n_samples = 0;
    double noise = 0.0;
    std::optional<double> factor;
    double flip_y = 0.0;
    std::optional<std::uint64_t> flip_seed;
    std::uint64_t seed = 0;
    std::string rng;
};

/// 2-D points with labels in {-1, +1}.
struct Dataset {
    std::vector<Point> points;
    std::vector<int> labels;
    DatasetMeta meta;

    std::size_t size() const { return points.size(); }
    Dataset subset(std::span<const std::size_t> indices) const;
};

/// Two interleaving half circles: ceil(n/2) outer points labelled -1, the
/// rest inner labelled +1, then N(0, noise^2) added to every coordinate.
Dataset make_moons(std::size_t n, double noise, std::uint64_t seed);

/// Two concentric circles of radii 1 (label -1) and `factor` (label +1).
Dataset make_circles(std::size_t n, double noise, double factor, std::uint64_t seed);

/// Negates each label independently with probability flip_y. Applying it
/// twice with the same seed restores the input.
Dataset flip_labels(Dataset d, double flip_y, std::uint64_t seed);

/// Random permutation, then the first floor(train_frac n) samples train.
/// Throws DegenerateSplit unless both parts contain both classes.
std::pair<Dataset, Dataset> split(const Dataset& d, double train_frac, std::uint64_t seed);

struct FoldPlan {
    std::size_t folds = 1;
    std::vector<std::size_t> assignments;

    std::vector<std::size_t> members(std::size_t fold) const;
    std::vector<std::size_t> complement(std::size_t fold) const;
};

/// Shuffles each class and deals it round-robin over the folds, continuing
/// the rotation from one class to the next. Throws TooManyFolds.
FoldPlan stratified_folds(const Dataset& d, std::size_t folds, std::uint64_t seed);

/// CSV: '#' metadata lines, header `x1,x2,label`, one row per sample.
void write_dataset_csv(const Dataset& d, std::ostream& out);
Dataset read_dataset_csv(std::istream& in);

void save_dataset(const Dataset& d, const std::string& path);
Dataset load_dataset(const std::string& path);

}  // namespace kmncs
