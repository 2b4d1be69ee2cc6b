// kmncs: command-line front end for dataset generation, SVM training,
// experiment tables, decision-boundary grids, and feature-space curvature.

#include <cstdio>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "kmncs/datasets.hpp"
#include "kmncs/error.hpp"
#include "kmncs/experiments.hpp"
#include "kmncs/geometry.hpp"
#include "kmncs/kernels.hpp"
#include "kmncs/serialization.hpp"
#include "kmncs/svm.hpp"
#include "kmncs/text_format.hpp"

namespace {

enum ExitCode { kOk = 0, kInvalid = 2, kNumerical = 3, kIo = 4 };

int exit_code_for(kmncs::ErrorCode code) {
    using kmncs::ErrorCode;
    switch (code) {
        case ErrorCode::IoError: return kIo;
        case ErrorCode::NonConvergence:
        case ErrorCode::SeriesFailure: return kNumerical;
        default: return kInvalid;
    }
}

struct KernelArgs {
    std::string kind;
    double sigma = 1.0;
    double c_squeeze = 1.0;
    std::optional<double> k;

    void attach(CLI::App* cmd) {
        cmd->add_option("--kernel", kind, "Kernel family")
            ->required()
            ->check(CLI::IsMember({"rbf", "squeezed", "nlcs"}));
        cmd->add_option("--sigma", sigma, "RBF width")->capture_default_str();
        cmd->add_option("--c-squeeze", c_squeeze, "Squeezing parameter c")->capture_default_str();
        cmd->add_option("--k", k, "NLCS deformation parameter (k < 0)");
    }

    kmncs::KernelSpec spec() const {
        kmncs::KernelSpec s;
        if (kind == "rbf") {
            s = kmncs::Rbf{sigma};
        } else if (kind == "squeezed") {
            s = kmncs::Squeezed{c_squeeze};
        } else {
            if (!k) throw kmncs::Error(kmncs::ErrorCode::InvalidArgument, "--kernel nlcs needs --k");
            s = kmncs::Nlcs{*k};
        }
        kmncs::validate(s);
        return s;
    }
};

kmncs::ExportFormat format_for(const std::string& path, const std::string& requested) {
    if (requested == "csv") return kmncs::ExportFormat::Csv;
    if (requested == "json") return kmncs::ExportFormat::Json;
    const bool csv = path.size() >= 4 && path.compare(path.size() - 4, 4, ".csv") == 0;
    return csv ? kmncs::ExportFormat::Csv : kmncs::ExportFormat::Json;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Kernel methods on non-linear coherent states"};
    app.require_subcommand(1);

    // gen-data
    auto* gen = app.add_subcommand("gen-data", "Generate a moons or circles dataset as CSV");
    std::string gen_dataset, gen_out;
    std::size_t gen_n = 0;
    double gen_noise = 0.0, gen_factor = 0.5, gen_flip = 0.0;
    std::uint64_t gen_seed = 0;
    gen->add_option("--dataset", gen_dataset)->required()->check(CLI::IsMember({"moons", "circles"}));
    gen->add_option("--n", gen_n)->required();
    gen->add_option("--noise", gen_noise)->required();
    gen->add_option("--factor", gen_factor)->capture_default_str();
    gen->add_option("--flip-y", gen_flip)->capture_default_str();
    gen->add_option("--seed", gen_seed)->required();
    gen->add_option("-o", gen_out)->required();

    // train
    auto* train = app.add_subcommand("train", "Train a soft-margin SVM on a dataset CSV");
    std::string train_data, train_out;
    KernelArgs train_kernel;
    double train_C = 1.0, train_tol = 1e-3;
    train->add_option("--data", train_data)->required();
    train_kernel.attach(train);
    train->add_option("--C", train_C)->capture_default_str();
    train->add_option("--tol", train_tol)->capture_default_str();
    train->add_option("-o", train_out)->required();

    // experiment
    auto* exp = app.add_subcommand("experiment", "Run an experiment configuration");
    std::string exp_config, exp_out, exp_format = "auto";
    unsigned exp_threads = 0;
    exp->add_option("--config", exp_config)->required();
    exp->add_option("-o", exp_out)->required();
    exp->add_option("--format", exp_format)->check(CLI::IsMember({"auto", "csv", "json"}))->capture_default_str();
    exp->add_option("--threads", exp_threads, "Worker threads (0 = all cores)")->capture_default_str();

    // boundary
    auto* boundary = app.add_subcommand("boundary", "Evaluate a model's decision function on a grid");
    std::string bnd_model, bnd_out;
    std::size_t bnd_grid = kmncs::kDefaultGridResolution;
    boundary->add_option("--model", bnd_model)->required();
    boundary->add_option("--grid", bnd_grid)->capture_default_str();
    boundary->add_option("-o", bnd_out)->required();

    // curvature
    auto* curv = app.add_subcommand("curvature", "Conformal factor and Ricci scalar of the feature space");
    std::string curv_profile, curv_out;
    std::optional<double> curv_k;
    double curv_rmin = 0.05, curv_rmax = 3.0;
    std::size_t curv_samples = 100;
    curv->add_option("--profile", curv_profile)->required()->check(CLI::IsMember({"nlcs", "coherent"}));
    curv->add_option("--k", curv_k);
    curv->add_option("--r-min", curv_rmin)->required();
    curv->add_option("--r-max", curv_rmax)->required();
    curv->add_option("--samples", curv_samples)->required();
    curv->add_option("-o", curv_out)->required();

    // gram-check
    auto* gcheck = app.add_subcommand("gram-check", "Smallest Gram eigenvalue of a dataset");
    std::string gc_data;
    KernelArgs gc_kernel;
    gcheck->add_option("--data", gc_data)->required();
    gc_kernel.attach(gcheck);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? kOk : kInvalid;
    }

    try {
        if (*gen) {
            const auto d = kmncs::make_dataset(kmncs::dataset_kind_from_string(gen_dataset), gen_n, gen_noise,
                                               gen_factor, gen_flip, gen_seed);
            kmncs::save_dataset(d, gen_out);
            return kOk;
        }
        if (*train) {
            const kmncs::Dataset d = kmncs::load_dataset(train_data);
            kmncs::SmoOptions opts;
            opts.C = train_C;
            opts.tol = train_tol;
            const kmncs::GramMatrix g = kmncs::gram(d.points, train_kernel.spec());
            auto [model, report] = kmncs::train_smo(g, d.labels, d.points, opts);
            kmncs::save_model(model, train_out);
            std::cout << "iterations=" << report.iterations
                      << " dual_objective=" << kmncs::format_double(report.dual_objective)
                      << " kkt_violation=" << kmncs::format_double(report.kkt_violation)
                      << " support_vectors=" << model.support_indices.size()
                      << " converged=" << (report.converged ? "true" : "false") << "\n";
            if (!report.converged) {
                std::cerr << "warning: SMO stopped before reaching tol; model written anyway\n";
                return kNumerical;
            }
            return kOk;
        }
        if (*exp) {
            const kmncs::ExperimentConfig cfg = kmncs::load_config(exp_config);
            const kmncs::ExperimentResult r = kmncs::run_experiment(cfg, exp_threads);
            kmncs::export_result(r, exp_out, format_for(exp_out, exp_format));
            for (const auto& c : r.cells)
                std::cout << kmncs::describe(cfg.kernels[c.kernel_index]) << " noise=" << kmncs::format_double(c.noise)
                          << " mean=" << kmncs::format_double(c.mean_accuracy)
                          << " std=" << kmncs::format_double(c.std_accuracy) << "\n";
            return kOk;
        }
        if (*boundary) {
            const kmncs::SvmModel m = kmncs::load_model(bnd_model);
            const auto [xr, yr] = kmncs::default_grid_bounds(m);
            const kmncs::BoundaryGrid g = kmncs::boundary_grid(m, xr, yr, bnd_grid);
            kmncs::export_result(g, bnd_out, format_for(bnd_out, "auto"));
            return kOk;
        }
        if (*curv) {
            kmncs::NormalizationProfile p = kmncs::CoherentProfile{};
            if (curv_profile == "nlcs") {
                if (!curv_k) throw kmncs::Error(kmncs::ErrorCode::InvalidArgument, "--profile nlcs needs --k");
                p = kmncs::NlcsProfile{*curv_k};
            }
            const kmncs::CurvatureCurve c = kmncs::curvature_curve(p, curv_rmin, curv_rmax, curv_samples);
            kmncs::export_result(c, curv_out, format_for(curv_out, "auto"));
            return kOk;
        }
        if (*gcheck) {
            constexpr double kThreshold = -1e-8;
            const kmncs::Dataset d = kmncs::load_dataset(gc_data);
            const double lambda = kmncs::min_eigenvalue(kmncs::gram(d.points, gc_kernel.spec()));
            const bool pass = lambda >= kThreshold;
            std::cout << "min_eigenvalue=" << kmncs::format_double(lambda) << " " << (pass ? "PASS" : "FAIL")
                      << " (threshold " << kmncs::format_double(kThreshold) << ")\n";
            return pass ? kOk : kNumerical;
        }
    } catch (const kmncs::Error& e) {
        std::cerr << "error: " << kmncs::to_string(e.code()) << ": " << e.what() << "\n";
        return exit_code_for(e.code());
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kInvalid;
    }
    return kOk;
}
