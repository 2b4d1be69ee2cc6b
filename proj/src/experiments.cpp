#include "kmncs/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <fstream>
#include <limits>
#include <numeric>
#include <sstream>
#include <thread>

#include "kmncs/error.hpp"
#include "kmncs/rng.hpp"
#include "kmncs/serialization.hpp"
#include "kmncs/text_format.hpp"

namespace kmncs {

namespace {

// Sub-streams derived from each experiment seed.
enum Stream : std::uint64_t { kGenerate = 0, kFlip = 1, kSplit = 2, kFolds = 3 };

double mean_of(std::span<const double> v) {
    double s = 0.0;
    for (double x : v) s += x;
    return v.empty() ? 0.0 : s / static_cast<double>(v.size());
}

double population_std(std::span<const double> v) {
    if (v.empty()) return 0.0;
    const double m = mean_of(v);
    double s = 0.0;
    for (double x : v) s += (x - m) * (x - m);
    return std::sqrt(s / static_cast<double>(v.size()));
}

GramMatrix submatrix(const GramMatrix& g, std::span<const std::size_t> idx) {
    const std::size_t m = idx.size();
    std::vector<double> values(m * m);
    for (std::size_t a = 0; a < m; ++a)
        for (std::size_t b = 0; b < m; ++b) values[a * m + b] = g(idx[a], idx[b]);
    return GramMatrix(m, std::move(values), g.kernel(), g.dataset_fingerprint());
}

// Runs f(task) for task in [0, count) on up to `threads` workers.
template <class F>
void parallel_for(std::size_t count, unsigned threads, F f) {
    if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
    const std::size_t workers = std::min<std::size_t>(threads, count);
    if (workers <= 1) {
        for (std::size_t t = 0; t < count; ++t) f(t);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::exception_ptr> errors(workers);
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w)
        pool.emplace_back([&, w] {
            try {
                for (std::size_t t; (t = next.fetch_add(1)) < count;) f(t);
            } catch (...) {
                errors[w] = std::current_exception();
            }
        });
    for (auto& th : pool) th.join();
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
}

}  // namespace

std::string to_string(DatasetKind kind) { return kind == DatasetKind::Moons ? "moons" : "circles"; }

DatasetKind dataset_kind_from_string(const std::string& name) {
    if (name == "moons") return DatasetKind::Moons;
    if (name == "circles") return DatasetKind::Circles;
    throw Error(ErrorCode::InvalidArgument, "unknown dataset '" + name + "'");
}

std::vector<std::uint64_t> seed_range(std::size_t count) {
    std::vector<std::uint64_t> seeds(count);
    for (std::size_t i = 0; i < count; ++i) seeds[i] = i + 1;
    return seeds;
}

void validate(const ExperimentConfig& cfg) {
    auto fail = [](const std::string& what) { throw Error(ErrorCode::InvalidArgument, what); };
    if (cfg.seeds.empty()) fail("experiment needs at least one seed");
    if (cfg.noise_levels.empty()) fail("experiment needs at least one noise level");
    if (cfg.kernels.empty()) fail("experiment needs at least one kernel");
    for (double n : cfg.noise_levels)
        if (!(n >= 0.0) || !std::isfinite(n)) fail("noise levels must be non-negative");
    if (!(cfg.flip_y >= 0.0 && cfg.flip_y <= 1.0)) fail("flip_y must lie in [0, 1]");
    if (cfg.dataset == DatasetKind::Circles && !(cfg.factor > 0.0 && cfg.factor < 1.0))
        fail("factor must lie in (0, 1)");
    if (!(cfg.C > 0.0)) fail("C must be positive");
    if (!(cfg.tol > 0.0)) fail("tol must be positive");
    if (!(cfg.train_frac > 0.0 && cfg.train_frac < 1.0)) fail("train_frac must lie in (0, 1)");
    if (cfg.cv_folds == 0) fail("cv_folds must be positive");
    if (cfg.n_samples < 2) fail("n_samples must be at least 2");
    for (const KernelSpec& k : cfg.kernels) validate(k);
}

Dataset make_dataset(DatasetKind kind, std::size_t n, double noise, double factor, double flip_y,
                     std::uint64_t seed) {
    const std::uint64_t gen_seed = SplitMix64::derive(seed, kGenerate);
    Dataset d = kind == DatasetKind::Moons ? make_moons(n, noise, gen_seed) : make_circles(n, noise, factor, gen_seed);
    d = flip_labels(std::move(d), flip_y, SplitMix64::derive(seed, kFlip));
    d.meta.seed = seed;
    return d;
}

Dataset generate_cell_dataset(const ExperimentConfig& cfg, double noise, std::uint64_t seed) {
    return make_dataset(cfg.dataset, cfg.n_samples, noise, cfg.factor, cfg.flip_y, seed);
}

CvScore cross_val_accuracy(const Dataset& d, const KernelSpec& spec, double C, std::size_t folds,
                           std::uint64_t seed, double tol) {
    FoldPlan plan;
    if (folds > 1 && folds == d.size()) {
        // leave-one-out: every sample is its own fold, no shuffling needed
        plan.folds = folds;
        plan.assignments.resize(folds);
        std::iota(plan.assignments.begin(), plan.assignments.end(), std::size_t{0});
    } else {
        plan = stratified_folds(d, folds, seed);
    }
    // Every fold's training Gram is a principal submatrix of the full one,
    // and the kernel is a pure function, so slicing yields the same values
    // as recomputing per fold.
    const KernelEvaluator evaluator(spec, d.points);
    const GramMatrix full = gram(evaluator, 1);

    SmoOptions opts;
    opts.C = C;
    opts.tol = tol;
    CvScore score;
    for (std::size_t f = 0; f < plan.folds; ++f) {
        const std::vector<std::size_t> test = plan.members(f);
        const std::vector<std::size_t> train = plan.folds == 1 ? test : plan.complement(f);
        std::vector<int> labels;
        labels.reserve(train.size());
        for (std::size_t t : train) labels.push_back(d.labels[t]);

        const DualSolution sol = solve_dual(submatrix(full, train), labels, opts);
        if (!sol.report.converged) ++score.nonconverged_fits;

        std::size_t correct = 0;
        for (std::size_t t : test) {
            double dec = 0.0;
            for (std::size_t s = 0; s < train.size(); ++s)
                if (sol.alphas[s] > kSupportThreshold) dec += sol.alphas[s] * labels[s] * full(train[s], t);
            dec += sol.bias;
            if (Predictor::label_of(dec) == d.labels[t]) ++correct;
        }
        score.per_fold.push_back(static_cast<double>(correct) / static_cast<double>(test.size()));
    }
    score.mean = mean_of(score.per_fold);
    score.std = population_std(score.per_fold);
    return score;
}

double holdout_accuracy(const Dataset& train, const Dataset& test, const KernelSpec& spec, double C,
                        double tol, std::size_t* nonconverged) {
    SmoOptions opts;
    opts.C = C;
    opts.tol = tol;
    const GramMatrix g = gram(train.points, spec, 1);
    auto [model, report] = train_smo(g, train.labels, train.points, opts);
    if (nonconverged && !report.converged) ++*nonconverged;
    const Predictor predictor(model);
    std::size_t correct = 0;
    for (std::size_t t = 0; t < test.size(); ++t)
        if (predictor.predict(test.points[t]) == test.labels[t]) ++correct;
    return static_cast<double>(correct) / static_cast<double>(test.size());
}

const CellResult& ExperimentResult::cell(std::size_t kernel_index, double noise) const {
    for (const CellResult& c : cells)
        if (c.kernel_index == kernel_index && c.noise == noise) return c;
    throw Error(ErrorCode::InvalidArgument, "no such experiment cell");
}

ExperimentResult run_experiment(const ExperimentConfig& cfg, unsigned threads) {
    validate(cfg);
    const std::size_t n_noise = cfg.noise_levels.size();
    const std::size_t n_seed = cfg.seeds.size();
    const std::size_t n_kernel = cfg.kernels.size();

    // One task per (noise, seed); it owns its dataset and scores every kernel.
    std::vector<double> acc(n_noise * n_seed * n_kernel);
    std::vector<std::size_t> nonconverged(n_noise * n_seed * n_kernel, 0);
    parallel_for(n_noise * n_seed, threads, [&](std::size_t task) {
        const std::size_t ni = task / n_seed;
        const std::size_t si = task % n_seed;
        const std::uint64_t seed = cfg.seeds[si];
        const Dataset d = generate_cell_dataset(cfg, cfg.noise_levels[ni], seed);
        const auto [train, test] = split(d, cfg.train_frac, SplitMix64::derive(seed, kSplit));
        for (std::size_t ki = 0; ki < n_kernel; ++ki) {
            const std::size_t slot = (ki * n_noise + ni) * n_seed + si;
            if (cfg.use_cv) {
                const CvScore s = cross_val_accuracy(train, cfg.kernels[ki], cfg.C, cfg.cv_folds,
                                                     SplitMix64::derive(seed, kFolds), cfg.tol);
                acc[slot] = s.mean;
                nonconverged[slot] = s.nonconverged_fits;
            } else {
                acc[slot] = holdout_accuracy(train, test, cfg.kernels[ki], cfg.C, cfg.tol, &nonconverged[slot]);
            }
        }
    });

    ExperimentResult result;
    result.config = cfg;
    result.rng = std::string(SplitMix64::kAlgorithmId);
    for (std::size_t ki = 0; ki < n_kernel; ++ki)
        for (std::size_t ni = 0; ni < n_noise; ++ni) {
            CellResult cell;
            cell.kernel_index = ki;
            cell.noise = cfg.noise_levels[ni];
            const std::size_t base = (ki * n_noise + ni) * n_seed;
            cell.per_seed.assign(acc.begin() + static_cast<std::ptrdiff_t>(base),
                                 acc.begin() + static_cast<std::ptrdiff_t>(base + n_seed));
            for (std::size_t si = 0; si < n_seed; ++si) cell.nonconverged_fits += nonconverged[base + si];
            cell.mean_accuracy = mean_of(cell.per_seed);
            cell.std_accuracy = population_std(cell.per_seed);
            result.cells.push_back(std::move(cell));
        }
    return result;
}

// ---------------------------------------------------------------------------
// Decision-boundary grids

namespace {

double mesh_coord(double lo, double hi, std::size_t i, std::size_t res) {
    if (res == 1) return 0.5 * (lo + hi);
    if (i + 1 == res) return hi;
    return lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(res - 1);
}

}  // namespace

double BoundaryGrid::x_at(std::size_t ix) const { return mesh_coord(x_min, x_max, ix, resolution); }
double BoundaryGrid::y_at(std::size_t iy) const { return mesh_coord(y_min, y_max, iy, resolution); }

BoundaryGrid boundary_grid(const SvmModel& m, std::pair<double, double> x_range,
                           std::pair<double, double> y_range, std::size_t resolution) {
    if (resolution == 0) throw Error(ErrorCode::InvalidArgument, "grid resolution must be positive");
    if (!(x_range.first < x_range.second) || !(y_range.first < y_range.second))
        throw Error(ErrorCode::InvalidArgument, "grid ranges must be increasing");
    if (!m.train_points.empty() && m.train_points.front().size() != 2)
        throw Error(ErrorCode::DimensionMismatch, "boundary grids need a 2-D model");
    BoundaryGrid g;
    g.x_min = x_range.first;
    g.x_max = x_range.second;
    g.y_min = y_range.first;
    g.y_max = y_range.second;
    g.resolution = resolution;
    g.decision.resize(resolution * resolution);
    g.labels.resize(resolution * resolution);
    const Predictor predictor(m);
    for (std::size_t iy = 0; iy < resolution; ++iy)
        for (std::size_t ix = 0; ix < resolution; ++ix) {
            const double p[2] = {g.x_at(ix), g.y_at(iy)};
            const double v = predictor.decision(p);
            g.decision[iy * resolution + ix] = v;
            g.labels[iy * resolution + ix] = Predictor::label_of(v);
        }
    return g;
}

std::pair<std::pair<double, double>, std::pair<double, double>> default_grid_bounds(const SvmModel& m,
                                                                                    double margin) {
    if (m.train_points.empty()) throw Error(ErrorCode::InvalidArgument, "model has no training points");
    double x0 = std::numeric_limits<double>::infinity(), x1 = -x0, y0 = x0, y1 = -x0;
    for (const Point& p : m.train_points) {
        if (p.size() != 2) throw Error(ErrorCode::DimensionMismatch, "boundary grids need a 2-D model");
        x0 = std::min(x0, p[0]);
        x1 = std::max(x1, p[0]);
        y0 = std::min(y0, p[1]);
        y1 = std::max(y1, p[1]);
    }
    return {{x0 - margin, x1 + margin}, {y0 - margin, y1 + margin}};
}

void write_boundary_csv(const BoundaryGrid& g, std::ostream& out) {
    out << "# x_range=" << format_double(g.x_min) << ',' << format_double(g.x_max) << "\n";
    out << "# y_range=" << format_double(g.y_min) << ',' << format_double(g.y_max) << "\n";
    out << "# resolution=" << g.resolution << "\n";
    out << "x,y,decision,label\n";
    for (std::size_t iy = 0; iy < g.resolution; ++iy)
        for (std::size_t ix = 0; ix < g.resolution; ++ix) {
            const std::size_t c = iy * g.resolution + ix;
            out << format_double(g.x_at(ix)) << ',' << format_double(g.y_at(iy)) << ','
                << format_double(g.decision[c]) << ',' << g.labels[c] << '\n';
        }
}

BoundaryGrid read_boundary_csv(std::istream& in) {
    BoundaryGrid g;
    std::string line;
    bool header = false;
    auto pair_of = [](const std::string& v) {
        const auto comma = v.find(',');
        if (comma == std::string::npos) throw Error(ErrorCode::IoError, "range needs two values");
        return std::pair{parse_double(v.substr(0, comma)), parse_double(v.substr(comma + 1))};
    };
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        if (line[0] == '#') {
            if (line.rfind("# x_range=", 0) == 0) std::tie(g.x_min, g.x_max) = pair_of(line.substr(10));
            if (line.rfind("# y_range=", 0) == 0) std::tie(g.y_min, g.y_max) = pair_of(line.substr(10));
            if (line.rfind("# resolution=", 0) == 0) g.resolution = std::stoull(line.substr(13));
            continue;
        }
        if (!header) {
            if (line != "x,y,decision,label") throw Error(ErrorCode::IoError, "boundary CSV header mismatch");
            header = true;
            continue;
        }
        std::stringstream row(line);
        std::string x, y, dec, lab;
        if (!std::getline(row, x, ',') || !std::getline(row, y, ',') || !std::getline(row, dec, ',') ||
            !std::getline(row, lab))
            throw Error(ErrorCode::IoError, "boundary CSV row needs 4 columns");
        g.decision.push_back(parse_double(dec));
        g.labels.push_back(static_cast<int>(parse_double(lab)));
    }
    if (g.decision.size() != g.resolution * g.resolution)
        throw Error(ErrorCode::IoError, "boundary CSV row count does not match its resolution");
    return g;
}

// ---------------------------------------------------------------------------
// Export / import

namespace {

void write_experiment_csv(const ExperimentResult& r, std::ostream& out) {
    out << "# rng=" << r.rng << "\n";
    out << "# config=" << config_to_json(r.config).dump() << "\n";
    for (std::size_t k = 0; k < r.config.kernels.size(); ++k)
        out << "# kernel_" << k << "=" << describe(r.config.kernels[k]) << "\n";
    out << "kernel_index,noise,mean_accuracy,std_accuracy,nonconverged_fits,per_seed\n";
    for (const CellResult& c : r.cells) {
        out << c.kernel_index << ',' << format_double(c.noise) << ',' << format_double(c.mean_accuracy) << ','
            << format_double(c.std_accuracy) << ',' << c.nonconverged_fits << ',';
        for (std::size_t s = 0; s < c.per_seed.size(); ++s) out << (s ? " " : "") << format_double(c.per_seed[s]);
        out << '\n';
    }
}

ExperimentResult read_experiment_csv(std::istream& in) {
    ExperimentResult r;
    std::string line;
    bool header = false, have_config = false;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        if (line[0] == '#') {
            if (line.rfind("# rng=", 0) == 0) r.rng = line.substr(6);
            if (line.rfind("# config=", 0) == 0) {
                r.config = config_from_json(Json::parse(line.substr(9)));
                have_config = true;
            }
            continue;
        }
        if (!header) {
            if (line != "kernel_index,noise,mean_accuracy,std_accuracy,nonconverged_fits,per_seed")
                throw Error(ErrorCode::IoError, "experiment CSV header mismatch");
            header = true;
            continue;
        }
        std::stringstream row(line);
        std::string ki, noise, mean, sd, nc, seeds;
        if (!std::getline(row, ki, ',') || !std::getline(row, noise, ',') || !std::getline(row, mean, ',') ||
            !std::getline(row, sd, ',') || !std::getline(row, nc, ','))
            throw Error(ErrorCode::IoError, "experiment CSV row is truncated");
        std::getline(row, seeds);
        CellResult c;
        c.kernel_index = std::stoull(ki);
        c.noise = parse_double(noise);
        c.mean_accuracy = parse_double(mean);
        c.std_accuracy = parse_double(sd);
        c.nonconverged_fits = std::stoull(nc);
        std::stringstream ss(seeds);
        for (std::string v; ss >> v;) c.per_seed.push_back(parse_double(v));
        r.cells.push_back(std::move(c));
    }
    if (!have_config) throw Error(ErrorCode::IoError, "experiment CSV lacks its config line");
    return r;
}

template <class Writer>
void write_csv_file(const std::string& path, Writer w) {
    std::ostringstream out;
    w(out);
    write_text_file(path, out.str());
}

std::ifstream open_input(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::IoError, "cannot read " + path);
    return in;
}

}  // namespace

void export_result(const ExperimentResult& r, const std::string& path, ExportFormat format) {
    if (format == ExportFormat::Json)
        write_text_file(path, result_to_json(r).dump(2) + "\n");
    else
        write_csv_file(path, [&](std::ostream& o) { write_experiment_csv(r, o); });
}

void export_result(const BoundaryGrid& g, const std::string& path, ExportFormat format) {
    if (format == ExportFormat::Json)
        write_text_file(path, boundary_to_json(g).dump() + "\n");
    else
        write_csv_file(path, [&](std::ostream& o) { write_boundary_csv(g, o); });
}

void export_result(const CurvatureCurve& c, const std::string& path, ExportFormat format) {
    if (format == ExportFormat::Json)
        write_text_file(path, curvature_to_json(c).dump(2) + "\n");
    else
        write_csv_file(path, [&](std::ostream& o) { write_curvature_csv(c, o); });
}

ExperimentResult import_experiment_result(const std::string& path, ExportFormat format) {
    if (format == ExportFormat::Json) return result_from_json(read_json_file(path));
    auto in = open_input(path);
    return read_experiment_csv(in);
}

BoundaryGrid import_boundary_grid(const std::string& path, ExportFormat format) {
    if (format == ExportFormat::Json) return boundary_from_json(read_json_file(path));
    auto in = open_input(path);
    return read_boundary_csv(in);
}

CurvatureCurve import_curvature_curve(const std::string& path, ExportFormat format) {
    if (format == ExportFormat::Json) return curvature_from_json(read_json_file(path));
    auto in = open_input(path);
    return read_curvature_csv(in);
}

}  // namespace kmncs
