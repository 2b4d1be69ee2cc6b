#include "kmncs/datasets.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <numbers>
#include <ostream>
#include <sstream>

#include "kmncs/error.hpp"
#include "kmncs/rng.hpp"
#include "kmncs/text_format.hpp"

namespace kmncs {

namespace {

void add_noise(Dataset& d, double noise, std::uint64_t seed) {
    if (noise == 0.0) return;
    SplitMix64 rng(seed);
    GaussianStream gauss(rng);
    for (Point& p : d.points)
        for (double& v : p) v += noise * gauss.next();
}

void check_generator(std::size_t n, double noise) {
    if (n < 2) throw Error(ErrorCode::InvalidSize, "need at least two samples");
    if (!(noise >= 0.0) || !std::isfinite(noise))
        throw Error(ErrorCode::InvalidArgument, "noise must be a finite non-negative number");
}

void shuffle(std::vector<std::size_t>& v, SplitMix64& rng) {
    for (std::size_t i = v.size(); i > 1; --i) std::swap(v[i - 1], v[rng.below(i)]);
}

}  // namespace

Dataset Dataset::subset(std::span<const std::size_t> indices) const {
    Dataset out;
    out.meta = meta;
    out.meta.n_samples = indices.size();
    out.points.reserve(indices.size());
    out.labels.reserve(indices.size());
    for (std::size_t i : indices) {
        out.points.push_back(points.at(i));
        out.labels.push_back(labels.at(i));
    }
    return out;
}

Dataset make_moons(std::size_t n, double noise, std::uint64_t seed) {
    check_generator(n, noise);
    const std::size_t n_out = (n + 1) / 2;
    const std::size_t n_in = n / 2;
    Dataset d;
    d.points.reserve(n);
    auto angle = [](std::size_t i, std::size_t count) {
        return count == 1 ? 0.0 : std::numbers::pi * static_cast<double>(i) / static_cast<double>(count - 1);
    };
    for (std::size_t i = 0; i < n_out; ++i) {
        const double t = angle(i, n_out);
        d.points.push_back({std::cos(t), std::sin(t)});
        d.labels.push_back(-1);
    }
    for (std::size_t i = 0; i < n_in; ++i) {
        const double t = angle(i, n_in);
        d.points.push_back({1.0 - std::cos(t), 1.0 - std::sin(t) - 0.5});
        d.labels.push_back(1);
    }
    add_noise(d, noise, seed);
    d.meta = {"moons", n, noise, std::nullopt, 0.0, std::nullopt, seed, std::string(SplitMix64::kAlgorithmId)};
    return d;
}

Dataset make_circles(std::size_t n, double noise, double factor, std::uint64_t seed) {
    check_generator(n, noise);
    if (!(factor > 0.0 && factor < 1.0)) throw Error(ErrorCode::InvalidFactor, "factor must lie in (0, 1)");
    const std::size_t n_out = (n + 1) / 2;
    const std::size_t n_in = n / 2;
    Dataset d;
    d.points.reserve(n);
    auto ring = [&](std::size_t count, double radius, int label) {
        for (std::size_t i = 0; i < count; ++i) {
            const double t = 2.0 * std::numbers::pi * static_cast<double>(i) / static_cast<double>(count);
            d.points.push_back({radius * std::cos(t), radius * std::sin(t)});
            d.labels.push_back(label);
        }
    };
    ring(n_out, 1.0, -1);
    ring(n_in, factor, 1);
    add_noise(d, noise, seed);
    d.meta = {"circles", n, noise, factor, 0.0, std::nullopt, seed, std::string(SplitMix64::kAlgorithmId)};
    return d;
}

Dataset flip_labels(Dataset d, double flip_y, std::uint64_t seed) {
    if (!(flip_y >= 0.0 && flip_y <= 1.0)) throw Error(ErrorCode::InvalidArgument, "flip_y must lie in [0, 1]");
    SplitMix64 rng(seed);
    for (int& y : d.labels)
        if (rng.uniform() < flip_y) y = -y;
    d.meta.flip_y = flip_y;
    d.meta.flip_seed = seed;
    return d;
}

std::pair<Dataset, Dataset> split(const Dataset& d, double train_frac, std::uint64_t seed) {
    if (!(train_frac > 0.0 && train_frac < 1.0))
        throw Error(ErrorCode::InvalidArgument, "train_frac must lie in (0, 1)");
    std::vector<std::size_t> order(d.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    SplitMix64 rng(seed);
    shuffle(order, rng);
    const auto cut = static_cast<std::size_t>(std::floor(train_frac * static_cast<double>(d.size())));
    const std::span<const std::size_t> all(order);
    auto train = d.subset(all.first(cut));
    auto test = d.subset(all.subspan(cut));
    auto both_classes = [](const Dataset& part) {
        const bool pos = std::find(part.labels.begin(), part.labels.end(), 1) != part.labels.end();
        const bool neg = std::find(part.labels.begin(), part.labels.end(), -1) != part.labels.end();
        return pos && neg;
    };
    if (!both_classes(train) || !both_classes(test))
        throw Error(ErrorCode::DegenerateSplit, "split leaves a part without both classes");
    return {std::move(train), std::move(test)};
}

std::vector<std::size_t> FoldPlan::members(std::size_t fold) const {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < assignments.size(); ++i)
        if (assignments[i] == fold) out.push_back(i);
    return out;
}

std::vector<std::size_t> FoldPlan::complement(std::size_t fold) const {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < assignments.size(); ++i)
        if (assignments[i] != fold) out.push_back(i);
    return out;
}

FoldPlan stratified_folds(const Dataset& d, std::size_t folds, std::uint64_t seed) {
    if (folds == 0) throw Error(ErrorCode::InvalidArgument, "fold count must be positive");
    std::vector<std::size_t> neg, pos;
    for (std::size_t i = 0; i < d.size(); ++i) (d.labels[i] == 1 ? pos : neg).push_back(i);
    if (folds > std::min(neg.size(), pos.size())) {
        std::ostringstream msg;
        msg << folds << " folds requested but the smallest class has "
            << std::min(neg.size(), pos.size()) << " samples";
        throw Error(ErrorCode::TooManyFolds, msg.str());
    }
    FoldPlan plan;
    plan.folds = folds;
    plan.assignments.assign(d.size(), 0);
    SplitMix64 rng(seed);
    std::size_t next = 0;
    for (auto* cls : {&neg, &pos}) {
        shuffle(*cls, rng);
        for (std::size_t idx : *cls) {
            plan.assignments[idx] = next;
            next = (next + 1) % folds;
        }
    }
    return plan;
}

// ---------------------------------------------------------------------------
// CSV

void write_dataset_csv(const Dataset& d, std::ostream& out) {
    const DatasetMeta& m = d.meta;
    out << "# generator=" << m.generator << "\n";
    out << "# n_samples=" << d.size() << "\n";
    out << "# seed=" << m.seed << "\n";
    out << "# noise=" << format_double(m.noise) << "\n";
    if (m.factor) out << "# factor=" << format_double(*m.factor) << "\n";
    out << "# flip_y=" << format_double(m.flip_y) << "\n";
    if (m.flip_seed) out << "# flip_seed=" << *m.flip_seed << "\n";
    out << "# n_informative=2\n";
    out << "# rng=" << m.rng << "\n";
    out << "x1,x2,label\n";
    for (std::size_t i = 0; i < d.size(); ++i) {
        const Point& p = d.points[i];
        for (double v : p) out << format_double(v) << ',';
        out << d.labels[i] << '\n';
    }
}

Dataset read_dataset_csv(std::istream& in) {
    Dataset d;
    d.meta.generator = "file";
    std::string line;
    bool header = false;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        if (line[0] == '#') {
            const auto eq = line.find('=');
            if (eq == std::string::npos) continue;
            std::string key = line.substr(1, eq - 1);
            key.erase(0, key.find_first_not_of(' '));
            const std::string value = line.substr(eq + 1);
            if (key == "generator") d.meta.generator = value;
            else if (key == "seed") d.meta.seed = std::stoull(value);
            else if (key == "noise") d.meta.noise = parse_double(value);
            else if (key == "factor") d.meta.factor = parse_double(value);
            else if (key == "flip_y") d.meta.flip_y = parse_double(value);
            else if (key == "flip_seed") d.meta.flip_seed = std::stoull(value);
            else if (key == "rng") d.meta.rng = value;
            continue;
        }
        if (!header) {
            if (line != "x1,x2,label")
                throw Error(ErrorCode::IoError, "dataset CSV must have header x1,x2,label");
            header = true;
            continue;
        }
        std::vector<std::string_view> cells;
        std::string_view rest(line);
        for (;;) {
            const auto comma = rest.find(',');
            cells.push_back(rest.substr(0, comma));
            if (comma == std::string_view::npos) break;
            rest.remove_prefix(comma + 1);
        }
        if (cells.size() != 3) {
            std::ostringstream msg;
            msg << "dataset CSV line " << lineno << " does not have 3 columns";
            throw Error(ErrorCode::IoError, msg.str());
        }
        try {
            const double label = parse_double(cells[2]);
            if (label != 1.0 && label != -1.0) throw Error(ErrorCode::InvalidArgument, "label not +/-1");
            d.points.push_back({parse_double(cells[0]), parse_double(cells[1])});
            d.labels.push_back(static_cast<int>(label));
        } catch (const Error& e) {
            std::ostringstream msg;
            msg << "dataset CSV line " << lineno << ": " << e.what();
            throw Error(ErrorCode::IoError, msg.str());
        }
    }
    if (!header) throw Error(ErrorCode::IoError, "dataset CSV has no header");
    d.meta.n_samples = d.size();
    return d;
}

void save_dataset(const Dataset& d, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw Error(ErrorCode::IoError, "cannot write " + path);
    write_dataset_csv(d, out);
    if (!out) throw Error(ErrorCode::IoError, "write failed for " + path);
}

Dataset load_dataset(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::IoError, "cannot read " + path);
    return read_dataset_csv(in);
}

}  // namespace kmncs
