#pragma once

#include <string>

#include <json.hpp>

#include "kmncs/experiments.hpp"
#include "kmncs/geometry.hpp"
#include "kmncs/kernels.hpp"
#include "kmncs/svm.hpp"

namespace kmncs {

using Json = nlohmann::json;

/// {"type": "rbf", "sigma": 1} and similar; general NLCS kernels name a
/// sequence ("harmonic", "variable_mass" with "k", or "table" with "rho").
Json kernel_to_json(const KernelSpec& spec);
KernelSpec kernel_from_json(const Json& j);

/// {kernel, C, alphas, bias, labels, points}.
Json model_to_json(const SvmModel& m);
SvmModel model_from_json(const Json& j);
void save_model(const SvmModel& m, const std::string& path);
SvmModel load_model(const std::string& path);

Json config_to_json(const ExperimentConfig& cfg);
/// Accepts either "kernel" (one object) or "kernels" (array); missing
/// fields take the ExperimentConfig defaults, and seeds default to 1..20.
ExperimentConfig config_from_json(const Json& j);
ExperimentConfig load_config(const std::string& path);

Json result_to_json(const ExperimentResult& r);
ExperimentResult result_from_json(const Json& j);

Json boundary_to_json(const BoundaryGrid& g);
BoundaryGrid boundary_from_json(const Json& j);

Json curvature_to_json(const CurvatureCurve& c);
CurvatureCurve curvature_from_json(const Json& j);

/// Parses a file, mapping failures to IoError.
Json read_json_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& text);

}  // namespace kmncs
