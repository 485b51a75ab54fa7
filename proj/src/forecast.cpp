#include "canopy/forecast.hpp"

#include "canopy/errors.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>

namespace canopy::forecast {

namespace {

void check_weight(double w, const char* name) {
    if (!(w >= 0.0 && w <= 1.0)) {
        throw ArgumentError(fmt::format("{} must lie in [0,1], got {}", name, w));
    }
}

double mean(std::span<const double> xs) {
    return std::accumulate(xs.begin(), xs.end(), 0.0) / static_cast<double>(xs.size());
}

void check_finite(double level, double trend, int year) {
    if (!std::isfinite(level) || !std::isfinite(trend)) {
        throw NumericError(fmt::format("non-finite smoothing state at year {}", year));
    }
}

// ---- Nelder-Mead over the unit box ------------------------------------

std::vector<double> clamp01(std::vector<double> p) {
    for (double& x : p) x = std::clamp(x, 0.0, 1.0);
    return p;
}

struct Vertex {
    std::vector<double> x;
    double f = 0.0;
};

/// Derivative-free local refinement. Every evaluation is funneled through
/// `objective` so the caller can track the global best seen.
void nelder_mead(const std::function<double(const std::vector<double>&)>& objective,
                 std::vector<double> start, double step, int max_iterations,
                 double tolerance) {
    const std::size_t k = start.size();
    std::vector<Vertex> simplex;
    simplex.push_back({start, objective(start)});
    for (std::size_t i = 0; i < k; ++i) {
        auto p = start;
        p[i] = p[i] + step <= 1.0 ? p[i] + step : p[i] - step;
        simplex.push_back({p, objective(p)});
    }

    for (int it = 0; it < max_iterations; ++it) {
        std::stable_sort(simplex.begin(), simplex.end(),
                         [](const Vertex& a, const Vertex& b) { return a.f < b.f; });
        if (simplex.back().f - simplex.front().f <=
            tolerance * (1.0 + std::abs(simplex.front().f))) {
            break;
        }
        std::vector<double> centroid(k, 0.0);
        for (std::size_t v = 0; v < k; ++v) {
            for (std::size_t i = 0; i < k; ++i) centroid[i] += simplex[v].x[i];
        }
        for (double& c : centroid) c /= static_cast<double>(k);

        auto blend = [&](double coeff) {
            std::vector<double> p(k);
            for (std::size_t i = 0; i < k; ++i) {
                p[i] = centroid[i] + coeff * (centroid[i] - simplex.back().x[i]);
            }
            return clamp01(std::move(p));
        };

        const auto reflected = blend(1.0);
        const double fr = objective(reflected);
        if (fr < simplex.front().f) {
            const auto expanded = blend(2.0);
            const double fe = objective(expanded);
            simplex.back() = fe < fr ? Vertex{expanded, fe} : Vertex{reflected, fr};
        } else if (fr < simplex[k - 1].f) {
            simplex.back() = {reflected, fr};
        } else {
            const auto contracted = blend(-0.5);
            const double fc = objective(contracted);
            if (fc < simplex.back().f) {
                simplex.back() = {contracted, fc};
            } else {
                for (std::size_t v = 1; v <= k; ++v) {
                    for (std::size_t i = 0; i < k; ++i) {
                        simplex[v].x[i] = 0.5 * (simplex[v].x[i] + simplex[0].x[i]);
                    }
                    simplex[v].f = objective(simplex[v].x);
                }
            }
        }
    }
}

} // namespace

void SmoothingParams::validate() const {
    check_weight(alpha, "alpha");
    check_weight(beta, "beta");
    if (gamma.has_value() != seasonal_period.has_value()) {
        throw ArgumentError("gamma and seasonal_period must be set together");
    }
    if (gamma) check_weight(*gamma, "gamma");
    if (seasonal_period && *seasonal_period < 2) {
        throw ArgumentError(fmt::format("seasonal_period must be >= 2, got {}",
                                        *seasonal_period));
    }
}

FitResult hw_fit_filter(const emissions::SectorSeries& train, const SmoothingParams& params,
                        const InitOverride& init) {
    params.validate();
    const auto y = train.values();
    const std::size_t n = y.size();
    const std::size_t m = params.seasonal_period
                              ? static_cast<std::size_t>(*params.seasonal_period)
                              : 0;
    if (m > 0 && n < 2 * m) {
        throw ArgumentError(fmt::format(
            "seasonal fit needs at least {} observations, got {}", 2 * m, n));
    }
    if (n < 2) {
        throw ArgumentError(fmt::format("fit needs at least 2 observations, got {}", n));
    }

    const double alpha = params.alpha;
    const double beta = params.beta;

    double level;
    double trend;
    std::vector<double> seasonal;
    std::size_t start; // index of the first one-step prediction
    if (m == 0) {
        level = y[0];
        const std::size_t k = std::min<std::size_t>(3, n - 1);
        double sum = 0.0;
        for (std::size_t i = 0; i < k; ++i) sum += y[i + 1] - y[i];
        trend = sum / static_cast<double>(k);
        start = 1;
    } else {
        const double first = mean({y.data(), m});
        const double second = mean({y.data() + m, m});
        level = first;
        trend = (second - first) / static_cast<double>(m);
        seasonal.resize(m);
        for (std::size_t i = 0; i < m; ++i) seasonal[i] = y[i] - first;
        start = m;
    }
    if (init.level) level = *init.level;
    if (init.trend) trend = *init.trend;

    FitResult result;
    result.fitted.reserve(n - start);
    double sse = 0.0;
    for (std::size_t t = start; t < n; ++t) {
        const int year = train.observations[t].year;
        const double s_old = m > 0 ? seasonal[t % m] : 0.0;
        const double predicted = level + trend + s_old;
        const double err = y[t] - predicted;
        sse += err * err;
        result.fitted.push_back({year, predicted});

        const double prev_level = level;
        if (m > 0) {
            const double prev_trend = trend;
            level = alpha * (y[t] - s_old) + (1.0 - alpha) * (level + trend);
            trend = beta * (level - prev_level) + (1.0 - beta) * trend;
            seasonal[t % m] = *params.gamma * (y[t] - prev_level - prev_trend) +
                              (1.0 - *params.gamma) * s_old;
            if (!std::isfinite(seasonal[t % m])) {
                throw NumericError(fmt::format("non-finite seasonal offset at year {}", year));
            }
        } else {
            level = alpha * y[t] + (1.0 - alpha) * (level + trend);
            trend = beta * (level - prev_level) + (1.0 - beta) * trend;
        }
        check_finite(level, trend, year);
    }

    result.state.level = level;
    result.state.trend = trend;
    result.state.last_year = train.last_year();
    if (m > 0) {
        // Rotate so that entry (h-1) mod m is the offset for step h.
        std::vector<double> rotated(m);
        for (std::size_t j = 0; j < m; ++j) rotated[j] = seasonal[(n + j) % m];
        result.state.seasonal = std::move(rotated);
    }
    result.sse = sse;
    return result;
}

std::vector<FittedPoint> hw_forecast(const SmoothingState& state, int horizon) {
    if (horizon < 1) {
        throw ArgumentError(fmt::format("horizon must be >= 1, got {}", horizon));
    }
    if (!std::isfinite(state.level) || !std::isfinite(state.trend)) {
        throw ArgumentError("smoothing state is not finite");
    }
    std::vector<FittedPoint> out;
    out.reserve(static_cast<std::size_t>(horizon));
    for (int h = 1; h <= horizon; ++h) {
        double value = state.level + static_cast<double>(h) * state.trend;
        if (state.seasonal) {
            const auto& s = *state.seasonal;
            value += s[static_cast<std::size_t>(h - 1) % s.size()];
        }
        out.push_back({state.last_year + h, value});
    }
    return out;
}

FitParamsResult fit_params(const emissions::SectorSeries& train,
                           const OptimizerConfig& config) {
    if (config.grid_steps < 2) {
        throw ArgumentError("grid_steps must be at least 2");
    }
    const bool seasonal = config.seasonal_period.has_value();

    auto make_params = [&](const std::vector<double>& x) {
        SmoothingParams p;
        p.alpha = x[0];
        p.beta = x[1];
        if (seasonal) {
            p.gamma = x[2];
            p.seasonal_period = config.seasonal_period;
        }
        return p;
    };

    std::vector<double> best_x;
    double best_sse = std::numeric_limits<double>::infinity();
    auto objective = [&](const std::vector<double>& raw) {
        const auto x = clamp01(raw);
        double sse;
        try {
            sse = hw_fit_filter(train, make_params(x)).sse;
        } catch (const NumericError&) {
            return std::numeric_limits<double>::infinity();
        }
        if (sse < best_sse) {
            best_sse = sse;
            best_x = x;
        }
        return sse;
    };

    // Coarse grid; scan order makes ties resolve to the smallest alpha,
    // then beta, then gamma.
    const int steps = config.grid_steps;
    const double h = 1.0 / static_cast<double>(steps - 1);
    std::vector<double> x(seasonal ? 3 : 2);
    for (int i = 0; i < steps; ++i) {
        x[0] = static_cast<double>(i) * h;
        for (int j = 0; j < steps; ++j) {
            x[1] = static_cast<double>(j) * h;
            if (!seasonal) {
                objective(x);
                continue;
            }
            for (int g = 0; g < steps; ++g) {
                x[2] = static_cast<double>(g) * h;
                objective(x);
            }
        }
    }

    if (best_x.empty()) {
        throw NumericError("no finite SSE anywhere on the parameter grid");
    }
    if (config.refine_max_iterations > 0) {
        nelder_mead(objective, best_x, h / 2.0, config.refine_max_iterations,
                    config.refine_tolerance);
    }

    FitParamsResult result;
    result.params = make_params(best_x);
    auto fit = hw_fit_filter(train, result.params);
    result.state = std::move(fit.state);
    result.sse = fit.sse;
    return result;
}

double error_rate(std::span<const double> actual, std::span<const double> predicted) {
    if (actual.empty() || actual.size() != predicted.size()) {
        throw ArgumentError(fmt::format("error_rate needs equal nonzero lengths, got {} and {}",
                                        actual.size(), predicted.size()));
    }
    double abs_sum = 0.0;
    double actual_sum = 0.0;
    for (std::size_t i = 0; i < actual.size(); ++i) {
        abs_sum += std::abs(actual[i] - predicted[i]);
        actual_sum += actual[i];
    }
    if (actual_sum == 0.0) {
        throw NumericError("error rate undefined: actuals sum to zero");
    }
    return abs_sum / actual_sum;
}

double error_stddev(std::span<const double> actual, std::span<const double> predicted) {
    if (actual.empty() || actual.size() != predicted.size()) {
        throw ArgumentError(fmt::format(
            "error_stddev needs equal nonzero lengths, got {} and {}", actual.size(),
            predicted.size()));
    }
    const std::size_t n = actual.size();
    double mu = 0.0;
    for (std::size_t i = 0; i < n; ++i) mu += actual[i] - predicted[i];
    mu /= static_cast<double>(n);
    double var = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double d = actual[i] - predicted[i] - mu;
        var += d * d;
    }
    return std::sqrt(var / static_cast<double>(n));
}

std::vector<std::pair<int, double>> BacktestReport::per_year_errors() const {
    std::vector<std::pair<int, double>> out;
    out.reserve(rows.size());
    for (const auto& row : rows) out.emplace_back(row.year, row.actual - row.predicted);
    return out;
}

BacktestReport backtest(const emissions::SectorSeries& series, std::size_t holdout,
                        const OptimizerConfig& config) {
    if (series.size() <= holdout + 2) {
        throw ArgumentError(fmt::format(
            "backtest needs more than holdout+2 = {} observations, got {}", holdout + 2,
            series.size()));
    }
    auto [train, test] = emissions::split_train_test(series, holdout);
    auto fitted = fit_params(train, config);
    const auto forecast_points = hw_forecast(fitted.state, static_cast<int>(holdout));

    BacktestReport report;
    report.params = fitted.params;
    report.state = fitted.state;
    report.sse = fitted.sse;
    report.rows.reserve(holdout);
    std::vector<double> actuals;
    std::vector<double> predictions;
    for (std::size_t i = 0; i < holdout; ++i) {
        const auto& obs = test.observations[i];
        const auto& fc = forecast_points[i];
        report.rows.push_back({obs.year, obs.value, fc.predicted});
        actuals.push_back(obs.value);
        predictions.push_back(fc.predicted);
        if (fc.predicted < 0.0) {
            report.warnings.push_back(fmt::format(
                "forecast for year {} is negative ({})", fc.year, fc.predicted));
        }
    }
    report.error_rate = error_rate(actuals, predictions);
    report.error_stddev_abs = error_stddev(actuals, predictions);
    report.error_stddev_relative = report.error_stddev_abs / mean(actuals);
    return report;
}

} // namespace canopy::forecast
