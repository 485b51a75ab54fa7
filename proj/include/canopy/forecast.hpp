#ifndef CANOPY_FORECAST_HPP
#define CANOPY_FORECAST_HPP

#include "canopy/emissions.hpp"

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace canopy::forecast {

/// Additive Holt-Winters smoothing weights. The seasonal pair (gamma,
/// seasonal_period) is present together or not at all; annual data runs
/// without it, which reduces the model to Holt's linear method.
struct SmoothingParams {
    double alpha = 0.5;
    double beta = 0.5;
    std::optional<double> gamma;
    std::optional<int> seasonal_period;

    void validate() const;
};

/// Filter state after fitting. `seasonal`, when present, is rotated so the
/// h-step-ahead forecast adds seasonal[(h-1) mod period].
struct SmoothingState {
    double level = 0.0;
    double trend = 0.0;
    std::optional<std::vector<double>> seasonal;
    int last_year = 0;
};

struct FittedPoint {
    int year = 0;
    double predicted = 0.0;
};

struct FitResult {
    std::vector<FittedPoint> fitted; // one-step-ahead, from the init horizon on
    SmoothingState state;
    double sse = 0.0;
};

/// Optional replacement for the default initialization (level = first value,
/// trend = mean of the first min(3, n-1) differences).
struct InitOverride {
    std::optional<double> level;
    std::optional<double> trend;
};

/// Run the additive smoothing recursions over a training series:
///   prediction   y^_t = level + trend (+ seasonal)
///   level_t = a*y_t + (1-a)*(level + trend)       [seasonal: a*(y_t - s)]
///   trend_t = b*(level_t - level_prev) + (1-b)*trend
/// SSE accumulates from the second observation (after the first full season
/// in seasonal mode). Throws NumericError if the state goes non-finite.
FitResult hw_fit_filter(const emissions::SectorSeries& train, const SmoothingParams& params,
                        const InitOverride& init = {});

/// y^_{T+h} = level + h*trend (+ seasonal offset); years continue from
/// state.last_year.
std::vector<FittedPoint> hw_forecast(const SmoothingState& state, int horizon);

struct OptimizerConfig {
    int grid_steps = 21;            // per axis, over [0,1]
    int refine_max_iterations = 200; // Nelder-Mead budget after the grid
    double refine_tolerance = 1e-12;
    std::optional<int> seasonal_period;
};

struct FitParamsResult {
    SmoothingParams params;
    SmoothingState state;
    double sse = 0.0;
};

/// Minimize one-step SSE over the weight box: exhaustive coarse grid, then
/// Nelder-Mead refinement seeded at the best grid point. Grid ties resolve
/// to the smaller alpha, then the smaller beta (then gamma). The result is
/// never worse than any grid point and is deterministic for a fixed config.
FitParamsResult fit_params(const emissions::SectorSeries& train,
                           const OptimizerConfig& config = {});

/// Sum of absolute errors over the sum of actuals.
double error_rate(std::span<const double> actual, std::span<const double> predicted);

/// Population (1/n) standard deviation of the errors actual - predicted
/// around their mean.
double error_stddev(std::span<const double> actual, std::span<const double> predicted);

struct BacktestRow {
    int year = 0;
    double actual = 0.0;
    double predicted = 0.0;
};

struct BacktestReport {
    SmoothingParams params;
    SmoothingState state;
    double sse = 0.0; // one-step SSE on the train split
    double error_rate = 0.0;
    double error_stddev_abs = 0.0;      // tonnes
    double error_stddev_relative = 0.0; // divided by the mean of the actuals
    std::vector<BacktestRow> rows;
    std::vector<std::string> warnings;

    std::vector<std::pair<int, double>> per_year_errors() const; // actual - predicted
};

/// Fit on everything before the holdout, forecast the holdout years, and
/// score against the held-out actuals. Negative forecasts are kept but
/// flagged in `warnings`.
BacktestReport backtest(const emissions::SectorSeries& series, std::size_t holdout = 6,
                        const OptimizerConfig& config = {});

} // namespace canopy::forecast

#endif
