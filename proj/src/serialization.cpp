#include "kmncs/serialization.hpp"

#include <fstream>
#include <sstream>

#include "kmncs/error.hpp"
#include "kmncs/rng.hpp"

namespace kmncs {

namespace {

template <class T>
T get_or(const Json& j, const char* key, T fallback) {
    auto it = j.find(key);
    return it == j.end() ? fallback : it->get<T>();
}

std::vector<Point> points_from_json(const Json& j) {
    std::vector<Point> pts;
    for (const Json& p : j) pts.push_back(p.get<Point>());
    return pts;
}

}  // namespace

Json kernel_to_json(const KernelSpec& spec) {
    if (const auto* s = std::get_if<Rbf>(&spec)) return {{"type", "rbf"}, {"sigma", s->sigma}};
    if (const auto* s = std::get_if<Squeezed>(&spec)) return {{"type", "squeezed"}, {"c", s->c}};
    if (const auto* s = std::get_if<Nlcs>(&spec)) return {{"type", "nlcs"}, {"k", s->k}};
    const auto& g = std::get<GeneralNlcs>(spec);
    Json j{{"type", "general_nlcs"}, {"truncation", g.truncation}};
    const std::string& name = g.rho.name();
    if (name == "harmonic") {
        j["sequence"] = "harmonic";
    } else if (name.rfind("variable_mass", 0) == 0 && g.rho.parameter()) {
        j["sequence"] = "variable_mass";
        j["k"] = *g.rho.parameter();
    } else if (!g.rho.values().empty()) {
        j["sequence"] = "table";
        j["rho"] = g.rho.values();
    } else {
        throw Error(ErrorCode::InvalidArgument, "deformation sequence '" + name + "' is not serializable");
    }
    return j;
}

KernelSpec kernel_from_json(const Json& j) {
    try {
        const std::string type = j.at("type").get<std::string>();
        KernelSpec spec;
        if (type == "rbf") {
            spec = Rbf{get_or(j, "sigma", 1.0)};
        } else if (type == "squeezed") {
            spec = Squeezed{get_or(j, "c", 1.0)};
        } else if (type == "nlcs") {
            spec = Nlcs{j.at("k").get<double>()};
        } else if (type == "general_nlcs") {
            const std::string seq = j.at("sequence").get<std::string>();
            const auto m = get_or<std::size_t>(j, "truncation", 60);
            if (seq == "harmonic")
                spec = GeneralNlcs{DeformationSequence::harmonic(), m};
            else if (seq == "variable_mass")
                spec = GeneralNlcs{DeformationSequence::variable_mass(j.at("k").get<double>()), m};
            else if (seq == "table")
                spec = GeneralNlcs{DeformationSequence::from_values(j.at("rho").get<std::vector<double>>()), m};
            else
                throw Error(ErrorCode::InvalidArgument, "unknown deformation sequence '" + seq + "'");
        } else {
            throw Error(ErrorCode::InvalidArgument, "unknown kernel type '" + type + "'");
        }
        validate(spec);
        return spec;
    } catch (const Json::exception& e) {
        throw Error(ErrorCode::InvalidArgument, std::string("bad kernel description: ") + e.what());
    }
}

// ---------------------------------------------------------------------------
// Models

Json model_to_json(const SvmModel& m) {
    return {{"kernel", kernel_to_json(m.kernel)}, {"C", m.C},           {"alphas", m.alphas},
            {"bias", m.bias},                     {"labels", m.labels}, {"points", m.train_points}};
}

SvmModel model_from_json(const Json& j) {
    try {
        SvmModel m;
        m.kernel = kernel_from_json(j.at("kernel"));
        m.C = j.at("C").get<double>();
        m.alphas = j.at("alphas").get<std::vector<double>>();
        m.bias = j.at("bias").get<double>();
        m.labels = j.at("labels").get<std::vector<int>>();
        m.train_points = points_from_json(j.at("points"));
        if (m.alphas.size() != m.labels.size() || m.alphas.size() != m.train_points.size())
            throw Error(ErrorCode::InvalidArgument, "model arrays differ in length");
        for (std::size_t t = 0; t < m.alphas.size(); ++t)
            if (m.alphas[t] > kSupportThreshold) m.support_indices.push_back(t);
        return m;
    } catch (const Json::exception& e) {
        throw Error(ErrorCode::InvalidArgument, std::string("bad model file: ") + e.what());
    }
}

void save_model(const SvmModel& m, const std::string& path) { write_text_file(path, model_to_json(m).dump(1) + "\n"); }

SvmModel load_model(const std::string& path) { return model_from_json(read_json_file(path)); }

// ---------------------------------------------------------------------------
// Experiment configuration and results

Json config_to_json(const ExperimentConfig& cfg) {
    Json kernels = Json::array();
    for (const KernelSpec& k : cfg.kernels) kernels.push_back(kernel_to_json(k));
    return {{"dataset", to_string(cfg.dataset)},
            {"n_samples", cfg.n_samples},
            {"noise_levels", cfg.noise_levels},
            {"flip_y", cfg.flip_y},
            {"factor", cfg.factor},
            {"kernels", kernels},
            {"C", cfg.C},
            {"tol", cfg.tol},
            {"train_frac", cfg.train_frac},
            {"cv_folds", cfg.cv_folds},
            {"seeds", cfg.seeds},
            {"use_cv", cfg.use_cv}};
}

ExperimentConfig config_from_json(const Json& j) {
    try {
        ExperimentConfig cfg;
        cfg.dataset = dataset_kind_from_string(j.at("dataset").get<std::string>());
        cfg.n_samples = get_or(j, "n_samples", cfg.n_samples);
        if (j.contains("noise_levels")) cfg.noise_levels = j["noise_levels"].get<std::vector<double>>();
        cfg.flip_y = get_or(j, "flip_y", cfg.flip_y);
        cfg.factor = get_or(j, "factor", cfg.factor);
        if (j.contains("kernels")) {
            cfg.kernels.clear();
            for (const Json& k : j["kernels"]) cfg.kernels.push_back(kernel_from_json(k));
        } else if (j.contains("kernel")) {
            cfg.kernels = {kernel_from_json(j["kernel"])};
        }
        cfg.C = get_or(j, "C", cfg.C);
        cfg.tol = get_or(j, "tol", cfg.tol);
        cfg.train_frac = get_or(j, "train_frac", cfg.train_frac);
        cfg.cv_folds = get_or(j, "cv_folds", cfg.cv_folds);
        cfg.seeds = j.contains("seeds") ? j["seeds"].get<std::vector<std::uint64_t>>() : seed_range(20);
        cfg.use_cv = get_or(j, "use_cv", cfg.use_cv);
        validate(cfg);
        return cfg;
    } catch (const Json::exception& e) {
        throw Error(ErrorCode::InvalidArgument, std::string("bad experiment config: ") + e.what());
    }
}

ExperimentConfig load_config(const std::string& path) { return config_from_json(read_json_file(path)); }

Json result_to_json(const ExperimentResult& r) {
    Json cells = Json::array();
    for (const CellResult& c : r.cells)
        cells.push_back({{"kernel_index", c.kernel_index},
                         {"kernel", describe(r.config.kernels.at(c.kernel_index))},
                         {"noise", c.noise},
                         {"mean_accuracy", c.mean_accuracy},
                         {"std_accuracy", c.std_accuracy},
                         {"per_seed", c.per_seed},
                         {"nonconverged_fits", c.nonconverged_fits}});
    return {{"config", config_to_json(r.config)}, {"rng", r.rng}, {"cells", cells}};
}

ExperimentResult result_from_json(const Json& j) {
    try {
        ExperimentResult r;
        r.config = config_from_json(j.at("config"));
        r.rng = j.at("rng").get<std::string>();
        for (const Json& c : j.at("cells")) {
            CellResult cell;
            cell.kernel_index = c.at("kernel_index").get<std::size_t>();
            cell.noise = c.at("noise").get<double>();
            cell.mean_accuracy = c.at("mean_accuracy").get<double>();
            cell.std_accuracy = c.at("std_accuracy").get<double>();
            cell.per_seed = c.at("per_seed").get<std::vector<double>>();
            cell.nonconverged_fits = c.at("nonconverged_fits").get<std::size_t>();
            r.cells.push_back(std::move(cell));
        }
        return r;
    } catch (const Json::exception& e) {
        throw Error(ErrorCode::InvalidArgument, std::string("bad experiment result: ") + e.what());
    }
}

Json boundary_to_json(const BoundaryGrid& g) {
    return {{"x_range", {g.x_min, g.x_max}}, {"y_range", {g.y_min, g.y_max}}, {"resolution", g.resolution},
            {"decision", g.decision},        {"labels", g.labels}};
}

BoundaryGrid boundary_from_json(const Json& j) {
    try {
        BoundaryGrid g;
        g.x_min = j.at("x_range").at(0).get<double>();
        g.x_max = j.at("x_range").at(1).get<double>();
        g.y_min = j.at("y_range").at(0).get<double>();
        g.y_max = j.at("y_range").at(1).get<double>();
        g.resolution = j.at("resolution").get<std::size_t>();
        g.decision = j.at("decision").get<std::vector<double>>();
        g.labels = j.at("labels").get<std::vector<int>>();
        return g;
    } catch (const Json::exception& e) {
        throw Error(ErrorCode::InvalidArgument, std::string("bad boundary grid: ") + e.what());
    }
}

Json curvature_to_json(const CurvatureCurve& c) {
    Json profile;
    if (const auto* n = std::get_if<NlcsProfile>(&c.profile))
        profile = {{"type", "nlcs"}, {"k", n->k}};
    else
        profile = {{"type", "coherent"}};
    return {{"profile", profile}, {"r", c.r_samples}, {"omega", c.omega}, {"ricci", c.ricci}};
}

CurvatureCurve curvature_from_json(const Json& j) {
    try {
        CurvatureCurve c;
        const Json& p = j.at("profile");
        if (p.at("type").get<std::string>() == "nlcs")
            c.profile = NlcsProfile{p.at("k").get<double>()};
        else
            c.profile = CoherentProfile{};
        c.r_samples = j.at("r").get<std::vector<double>>();
        c.omega = j.at("omega").get<std::vector<double>>();
        c.ricci = j.at("ricci").get<std::vector<double>>();
        return c;
    } catch (const Json::exception& e) {
        throw Error(ErrorCode::InvalidArgument, std::string("bad curvature curve: ") + e.what());
    }
}

// ---------------------------------------------------------------------------
// Files

Json read_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::IoError, "cannot read " + path);
    try {
        return Json::parse(in);
    } catch (const Json::parse_error& e) {
        throw Error(ErrorCode::IoError, path + ": " + e.what());
    }
}

void write_text_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error(ErrorCode::IoError, "cannot write " + path);
    out << text;
    if (!out) throw Error(ErrorCode::IoError, "write failed for " + path);
}

}  // namespace kmncs
