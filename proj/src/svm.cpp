#include "kmncs/svm.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "kmncs/error.hpp"

namespace kmncs {

namespace {

void check_problem(const GramMatrix& g, std::span<const int> labels, const SmoOptions& options) {
    if (labels.size() != g.size()) {
        std::ostringstream msg;
        msg << "got " << labels.size() << " labels for a " << g.size() << "-point Gram matrix";
        throw Error(ErrorCode::DimensionMismatch, msg.str());
    }
    bool pos = false, neg = false;
    for (int y : labels) {
        if (y == 1)
            pos = true;
        else if (y == -1)
            neg = true;
        else
            throw Error(ErrorCode::InvalidArgument, "labels must be +1 or -1");
    }
    if (!pos || !neg) throw Error(ErrorCode::SingleClassData, "training data contains a single class");
    if (!(options.C > 0.0)) throw Error(ErrorCode::InvalidArgument, "C must be positive");
    if (!(options.tol > 0.0)) throw Error(ErrorCode::InvalidArgument, "tol must be positive");
}

// Dual objective from the gradient of f(a) = 1/2 a'Qa - e'a:
// a'Qa = a'(grad + e), so -f = -1/2 a'(grad - e).
double objective_from_gradient(std::span<const double> alpha, std::span<const double> grad) {
    double s = 0.0;
    for (std::size_t t = 0; t < alpha.size(); ++t) s += alpha[t] * (grad[t] - 1.0);
    return -0.5 * s;
}

}  // namespace

DualSolution solve_dual(const GramMatrix& g, std::span<const int> labels, const SmoOptions& options) {
    check_problem(g, labels, options);
    const std::size_t n = g.size();
    const double C = options.C;
    const std::size_t max_iter = options.max_passes ? options.max_passes : 10 * n;

    std::vector<double> alpha(n, 0.0);
    std::vector<double> grad(n, -1.0);  // Q a - e at a = 0
    auto y = [&](std::size_t t) { return static_cast<double>(labels[t]); };
    auto in_up = [&](std::size_t t) { return labels[t] == 1 ? alpha[t] < C : alpha[t] > 0.0; };
    auto in_low = [&](std::size_t t) { return labels[t] == 1 ? alpha[t] > 0.0 : alpha[t] < C; };

    DualSolution out;
    TrainingReport& report = out.report;
    double violation = std::numeric_limits<double>::infinity();

    for (;;) {
        // Working pair: i maximizes -y grad over I_up, j minimizes it over
        // I_low. Their gap is the KKT violation (E_j - E_i in error terms).
        std::size_t i = n, j = n;
        double m_up = -std::numeric_limits<double>::infinity();
        double m_low = std::numeric_limits<double>::infinity();
        for (std::size_t t = 0; t < n; ++t) {
            const double v = -y(t) * grad[t];
            if (in_up(t) && v > m_up) {
                m_up = v;
                i = t;
            }
            if (in_low(t) && v < m_low) {
                m_low = v;
                j = t;
            }
        }
        violation = (i == n || j == n) ? 0.0 : std::max(0.0, m_up - m_low);
        if (violation <= options.tol) {
            report.converged = true;
            break;
        }
        if (report.iterations >= max_iter) break;

        // Move a_i += y_i d, a_j -= y_j d; this keeps y'a fixed and the
        // objective gains (m_up - m_low) d - eta d^2 / 2.
        const double eta = g(i, i) + g(j, j) - 2.0 * g(i, j);
        const double room_i = labels[i] == 1 ? C - alpha[i] : alpha[i];
        const double room_j = labels[j] == 1 ? alpha[j] : C - alpha[j];
        const double d_max = std::min(room_i, room_j);
        double d = d_max;
        if (eta > options.min_curvature) d = std::min(d_max, (m_up - m_low) / eta);
        if (!(d > 0.0)) break;

        const double old_i = alpha[i];
        const double old_j = alpha[j];
        alpha[i] = std::clamp(old_i + y(i) * d, 0.0, C);
        alpha[j] = std::clamp(old_j - y(j) * d, 0.0, C);
        if (d == room_i) alpha[i] = labels[i] == 1 ? C : 0.0;
        if (d == room_j) alpha[j] = labels[j] == 1 ? 0.0 : C;
        const double di = alpha[i] - old_i;
        const double dj = alpha[j] - old_j;

        const auto gi = g.row(i);
        const auto gj = g.row(j);
        for (std::size_t t = 0; t < n; ++t) grad[t] += y(t) * (y(i) * di * gi[t] + y(j) * dj * gj[t]);
        ++report.iterations;

        if (options.on_update) {
            SmoProgress p;
            p.iteration = report.iterations;
            p.i = i;
            p.j = j;
            p.alphas = alpha;
            p.dual_objective = objective_from_gradient(alpha, grad);
            p.kkt_violation = violation;
            options.on_update(p);
        }
    }

    // Bias: mean of -y grad over free vectors, otherwise the midpoint of the
    // interval allowed by the bound vectors.
    double free_sum = 0.0;
    std::size_t free_count = 0;
    double lower = -std::numeric_limits<double>::infinity();
    double upper = std::numeric_limits<double>::infinity();
    for (std::size_t t = 0; t < n; ++t) {
        const double v = -y(t) * grad[t];
        if (alpha[t] > 0.0 && alpha[t] < C) {
            free_sum += v;
            ++free_count;
        } else if ((alpha[t] == 0.0) == (labels[t] == 1)) {
            lower = std::max(lower, v);
        } else {
            upper = std::min(upper, v);
        }
    }
    if (free_count > 0)
        out.bias = free_sum / static_cast<double>(free_count);
    else if (std::isfinite(lower) && std::isfinite(upper))
        out.bias = 0.5 * (lower + upper);
    else
        out.bias = std::isfinite(lower) ? lower : upper;

    report.kkt_violation = violation;
    report.dual_objective = objective_from_gradient(alpha, grad);
    out.alphas = std::move(alpha);
    return out;
}

std::pair<SvmModel, TrainingReport> train_smo(const GramMatrix& g, std::span<const int> labels,
                                              std::span<const Point> points, const SmoOptions& options) {
    if (points.size() != g.size())
        throw Error(ErrorCode::DimensionMismatch, "point count does not match the Gram matrix");
    DualSolution sol = solve_dual(g, labels, options);
    SvmModel m;
    m.alphas = std::move(sol.alphas);
    m.bias = sol.bias;
    m.labels.assign(labels.begin(), labels.end());
    for (std::size_t t = 0; t < m.alphas.size(); ++t)
        if (m.alphas[t] > kSupportThreshold) m.support_indices.push_back(t);
    m.kernel = g.kernel();
    m.train_points.assign(points.begin(), points.end());
    m.C = options.C;
    return {std::move(m), sol.report};
}

namespace {

std::vector<Point> support_points(const SvmModel& m) {
    std::vector<Point> pts;
    pts.reserve(m.support_indices.size());
    for (std::size_t t : m.support_indices) pts.push_back(m.train_points.at(t));
    return pts;
}

}  // namespace

Predictor::Predictor(const SvmModel& model)
    : support_(model.kernel, support_points(model)),
      bias_(model.bias),
      dim_(model.train_points.empty() ? 0 : model.train_points.front().size()) {
    coef_.reserve(model.support_indices.size());
    for (std::size_t t : model.support_indices)
        coef_.push_back(model.alphas.at(t) * static_cast<double>(model.labels.at(t)));
}

double Predictor::decision(std::span<const double> x) const {
    if (dim_ != 0 && x.size() != dim_)
        throw Error(ErrorCode::DimensionMismatch, "query point has the wrong dimension");
    double f = 0.0;
    if (!coef_.empty()) {
        const std::vector<double> k = support_.row(x);
        for (std::size_t s = 0; s < coef_.size(); ++s) f += coef_[s] * k[s];
    }
    return f + bias_;
}

double decision(const SvmModel& m, std::span<const double> x) { return Predictor(m).decision(x); }

int predict(const SvmModel& m, std::span<const double> x) { return Predictor(m).predict(x); }

double dual_objective(std::span<const double> alphas, std::span<const int> labels, const GramMatrix& g) {
    const std::size_t n = g.size();
    if (alphas.size() != n || labels.size() != n)
        throw Error(ErrorCode::DimensionMismatch, "dual vectors do not match the Gram matrix");
    double linear = 0.0, quad = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        linear += alphas[i];
        if (alphas[i] == 0.0) continue;
        const auto row = g.row(i);
        double s = 0.0;
        for (std::size_t j = 0; j < n; ++j) s += alphas[j] * labels[j] * row[j];
        quad += alphas[i] * labels[i] * s;
    }
    return linear - 0.5 * quad;
}

double dual_objective(const SvmModel& m, const GramMatrix& g) { return dual_objective(m.alphas, m.labels, g); }

}  // namespace kmncs
