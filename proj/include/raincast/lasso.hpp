#pragma once

#include <cmath>
#include <fstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "raincast/errors.hpp"

namespace raincast {

// L1-penalized linear model fitted by cyclic coordinate descent on
// standardized features. Coefficients are stored on the original scale.
struct LinearModel {
    double intercept = 0.0;
    std::vector<double> coefficients;
    std::vector<double> feature_means;
    std::vector<double> feature_scales;
    double lambda = 0.0;
    bool converged = true;
    std::size_t sweeps = 0;
};

inline double soft_threshold(double z, double gamma) {
    if (z > gamma) return z - gamma;
    if (z < -gamma) return z + gamma;
    return 0.0;
}

// Minimizes (1/2N)*||y - b0 - X b||^2 + lambda*||b||_1. Zero-variance columns
// are dropped (coefficient 0). Convergence: max standardized-coefficient
// change below tol. Non-convergence keeps the last iterate and flags it.
inline LinearModel fit_lasso(const std::vector<std::vector<double>>& X,
                             const std::vector<double>& y, double lambda,
                             double tol = 1e-7, std::size_t max_iter = 10000,
                             std::vector<double>* objective_trace = nullptr) {
    const std::size_t N = X.size();
    if (N == 0 || N != y.size()) throw DimensionMismatchError("fit_lasso: bad row count");
    const std::size_t P = X[0].size();
    if (P == 0) throw DimensionMismatchError("fit_lasso: no features");
    if (lambda < 0.0) throw Error("fit_lasso: negative lambda");
    for (const auto& row : X) {
        if (row.size() != P) throw DimensionMismatchError("fit_lasso: ragged design matrix");
        for (double v : row)
            if (!std::isfinite(v)) throw NonFiniteInputError("fit_lasso: non-finite X");
    }
    for (double v : y)
        if (!std::isfinite(v)) throw NonFiniteInputError("fit_lasso: non-finite y");

    LinearModel model;
    model.lambda = lambda;
    model.feature_means.assign(P, 0.0);
    model.feature_scales.assign(P, 1.0);
    model.coefficients.assign(P, 0.0);

    double y_mean = 0.0;
    for (double v : y) y_mean += v;
    y_mean /= static_cast<double>(N);

    std::vector<bool> active(P, true);
    for (std::size_t j = 0; j < P; ++j) {
        double mean = 0.0;
        for (std::size_t i = 0; i < N; ++i) mean += X[i][j];
        mean /= static_cast<double>(N);
        double var = 0.0;
        for (std::size_t i = 0; i < N; ++i) var += (X[i][j] - mean) * (X[i][j] - mean);
        var /= static_cast<double>(N);
        model.feature_means[j] = mean;
        if (var <= 0.0) {
            active[j] = false; // degenerate column, coefficient stays 0
        } else {
            model.feature_scales[j] = std::sqrt(var);
        }
    }

    // Standardized copies: xs[i][j] = (X - mean)/scale, yc centered.
    std::vector<std::vector<double>> xs(N, std::vector<double>(P, 0.0));
    for (std::size_t i = 0; i < N; ++i)
        for (std::size_t j = 0; j < P; ++j)
            if (active[j]) xs[i][j] = (X[i][j] - model.feature_means[j]) / model.feature_scales[j];

    std::vector<double> residual(N); // yc - xs*b
    for (std::size_t i = 0; i < N; ++i) residual[i] = y[i] - y_mean;

    std::vector<double> beta(P, 0.0); // standardized coefficients
    model.converged = false;
    for (std::size_t sweep = 0; sweep < max_iter; ++sweep) {
        double max_change = 0.0;
        for (std::size_t j = 0; j < P; ++j) {
            if (!active[j]) continue;
            double rho = 0.0;
            for (std::size_t i = 0; i < N; ++i) rho += xs[i][j] * residual[i];
            rho = rho / static_cast<double>(N) + beta[j]; // since (1/N)*xs_j.xs_j == 1
            const double updated = soft_threshold(rho, lambda);
            const double change = updated - beta[j];
            if (change != 0.0) {
                for (std::size_t i = 0; i < N; ++i) residual[i] -= change * xs[i][j];
                beta[j] = updated;
            }
            max_change = std::max(max_change, std::fabs(change));
        }
        model.sweeps = sweep + 1;
        if (objective_trace) {
            double sse = 0.0;
            for (double r : residual) sse += r * r;
            double l1 = 0.0;
            for (double b : beta) l1 += std::fabs(b);
            objective_trace->push_back(sse / (2.0 * static_cast<double>(N)) + lambda * l1);
        }
        if (max_change < tol) {
            model.converged = true;
            break;
        }
    }

    double offset = 0.0;
    for (std::size_t j = 0; j < P; ++j) {
        if (!active[j]) continue;
        model.coefficients[j] = beta[j] / model.feature_scales[j];
        offset += model.coefficients[j] * model.feature_means[j];
    }
    model.intercept = y_mean - offset;
    return model;
}

inline double predict(const LinearModel& model, const std::vector<double>& x) {
    if (x.size() != model.coefficients.size())
        throw DimensionMismatchError("predict: feature dimension mismatch");
    double out = model.intercept;
    for (std::size_t j = 0; j < x.size(); ++j) out += model.coefficients[j] * x[j];
    return out;
}

// L1 norm of the standardized coefficients, i.e. the quantity the penalty
// acts on. Non-increasing in lambda on a fixed problem.
inline double standardized_l1_norm(const LinearModel& model) {
    double l1 = 0.0;
    for (std::size_t j = 0; j < model.coefficients.size(); ++j)
        l1 += std::fabs(model.coefficients[j] * model.feature_scales[j]);
    return l1;
}

// Penalized objective value, used by the monotonicity property tests.
inline double lasso_objective(const LinearModel& model, const std::vector<std::vector<double>>& X,
                              const std::vector<double>& y) {
    double sse = 0.0;
    for (std::size_t i = 0; i < X.size(); ++i) {
        const double r = y[i] - predict(model, X[i]);
        sse += r * r;
    }
    double l1 = 0.0;
    for (std::size_t j = 0; j < model.coefficients.size(); ++j)
        l1 += std::fabs(model.coefficients[j] * model.feature_scales[j]);
    return sse / (2.0 * static_cast<double>(X.size())) + model.lambda * l1;
}

// Least-squares slope of y against 1..n.
inline double fit_ols_slope(const std::vector<double>& y) {
    const std::size_t n = y.size();
    if (n < 2) throw TooFewPointsError("fit_ols_slope needs >= 2 points");
    const double mean_t = (static_cast<double>(n) + 1.0) / 2.0;
    double mean_y = 0.0;
    for (double v : y) mean_y += v;
    mean_y /= static_cast<double>(n);
    double num = 0.0, den = 0.0;
    for (std::size_t i = 1; i <= n; ++i) {
        const double dt = static_cast<double>(i) - mean_t;
        num += dt * (y[i - 1] - mean_y);
        den += dt * dt;
    }
    return num / den;
}

inline nlohmann::json linear_model_json(const LinearModel& model,
                                        const std::vector<std::string>& names) {
    nlohmann::json j;
    j["lambda"] = model.lambda;
    j["intercept"] = model.intercept;
    j["converged"] = model.converged;
    auto& coef = j["coefficients"] = nlohmann::json::object();
    for (std::size_t i = 0; i < model.coefficients.size(); ++i) {
        const std::string name = i < names.size() ? names[i] : "x" + std::to_string(i);
        coef[name] = model.coefficients[i];
    }
    return j;
}

} // namespace raincast
