#include "osp/forecasters.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "osp/errors.hpp"
#include "osp/features.hpp"

namespace osp {

const char* to_string(ForecasterKind kind) {
    switch (kind) {
        case ForecasterKind::naive: return "naive";
        case ForecasterKind::snaive: return "snaive";
        case ForecasterKind::ses: return "ses";
        case ForecasterKind::holt: return "holt";
        case ForecasterKind::holt_winters_add: return "hw";
        case ForecasterKind::ets_auto: return "ets";
        case ForecasterKind::theta: return "theta";
    }
    return "?";
}

ForecasterKind forecaster_kind_from_string(const std::string& name) {
    if (name == "naive") return ForecasterKind::naive;
    if (name == "snaive") return ForecasterKind::snaive;
    if (name == "ses") return ForecasterKind::ses;
    if (name == "holt") return ForecasterKind::holt;
    if (name == "hw") return ForecasterKind::holt_winters_add;
    if (name == "ets") return ForecasterKind::ets_auto;
    if (name == "theta") return ForecasterKind::theta;
    throw InvalidSpecError("unknown base model: " + name);
}

int min_length(ForecasterKind kind, int frequency) {
    switch (kind) {
        case ForecasterKind::naive: return 1;
        case ForecasterKind::snaive:
        case ForecasterKind::holt_winters_add: return 2 * frequency;
        case ForecasterKind::ses:
        case ForecasterKind::holt:
        case ForecasterKind::ets_auto:
        case ForecasterKind::theta: return 4;
    }
    return 4;
}

namespace {

// Fine grid for SES/Holt smoothing constants, coarse grid for Holt-Winters.
std::vector<double> fine_grid() {
    std::vector<double> g;
    g.reserve(99);
    for (int i = 1; i <= 99; ++i) g.push_back(i / 100.0);
    return g;
}

std::vector<double> coarse_grid() {
    std::vector<double> g;
    g.reserve(10);
    for (int i = 0; i < 10; ++i) g.push_back(0.05 + 0.1 * i);
    return g;
}

struct SmootherFit {
    std::vector<double> fitted;
    double sse = 0.0;
    // Final states.
    double level = 0.0;
    double trend = 0.0;
    std::vector<double> seasonal;  // by phase, empty for non-seasonal fits
    int n_params = 0;
    int n_states = 0;
};

// Level = first observation.
SmootherFit ses_run(const std::vector<double>& y, double alpha) {
    SmootherFit fit;
    fit.fitted.resize(y.size());
    double level = y.front();
    for (std::size_t i = 0; i < y.size(); ++i) {
        fit.fitted[i] = level;
        const double e = y[i] - level;
        fit.sse += e * e;
        level += alpha * e;
    }
    fit.level = level;
    fit.n_params = 1;
    fit.n_states = 1;
    return fit;
}

// Level = first observation, trend = y2 - y1; the recursion starts at the
// second observation so the first fitted value is the observation itself,
// matching the SES alignment.
SmootherFit holt_run(const std::vector<double>& y, double alpha, double beta) {
    SmootherFit fit;
    fit.fitted.resize(y.size());
    double level = y[0];
    double trend = y[1] - y[0];
    fit.fitted[0] = y[0];
    for (std::size_t i = 1; i < y.size(); ++i) {
        const double pred = level + trend;
        fit.fitted[i] = pred;
        const double e = y[i] - pred;
        fit.sse += e * e;
        const double new_level = pred + alpha * e;
        trend = beta * (new_level - level) + (1.0 - beta) * trend;
        level = new_level;
    }
    fit.level = level;
    fit.trend = trend;
    fit.n_params = 2;
    fit.n_states = 2;
    return fit;
}

// Level = first-cycle mean, trend = cycle-mean slope, seasonals = first-cycle
// deviations from the first-cycle mean.
SmootherFit hw_run(const std::vector<double>& y, int f, double alpha, double beta, double gamma) {
    SmootherFit fit;
    fit.fitted.resize(y.size());
    double cycle1 = 0.0, cycle2 = 0.0;
    for (int i = 0; i < f; ++i) cycle1 += y[i];
    for (int i = f; i < 2 * f; ++i) cycle2 += y[i];
    cycle1 /= f;
    cycle2 /= f;
    double level = cycle1;
    double trend = (cycle2 - cycle1) / f;
    fit.seasonal.resize(static_cast<std::size_t>(f));
    for (int i = 0; i < f; ++i) fit.seasonal[i] = y[i] - cycle1;

    for (std::size_t i = 0; i < y.size(); ++i) {
        const int phase = static_cast<int>(i % static_cast<std::size_t>(f));
        const double pred = level + trend + fit.seasonal[phase];
        fit.fitted[i] = pred;
        const double e = y[i] - pred;
        fit.sse += e * e;
        const double new_level = alpha * (y[i] - fit.seasonal[phase]) + (1.0 - alpha) * (level + trend);
        const double new_trend = beta * (new_level - level) + (1.0 - beta) * trend;
        fit.seasonal[phase] = gamma * (y[i] - level - trend) + (1.0 - gamma) * fit.seasonal[phase];
        level = new_level;
        trend = new_trend;
    }
    fit.level = level;
    fit.trend = trend;
    fit.n_params = 3;
    fit.n_states = 2 + f;
    return fit;
}

SmootherFit ses_fit(const std::vector<double>& y, std::optional<double> fixed_alpha) {
    if (fixed_alpha) return ses_run(y, *fixed_alpha);
    SmootherFit best;
    double best_sse = std::numeric_limits<double>::infinity();
    for (double a : fine_grid()) {
        SmootherFit fit = ses_run(y, a);
        if (fit.sse < best_sse) {
            best_sse = fit.sse;
            best = std::move(fit);
        }
    }
    return best;
}

SmootherFit holt_fit(const std::vector<double>& y, std::optional<double> fixed_alpha,
                     std::optional<double> fixed_beta) {
    if (fixed_alpha && fixed_beta) return holt_run(y, *fixed_alpha, *fixed_beta);
    const std::vector<double> grid = fine_grid();
    const std::vector<double> alphas = fixed_alpha ? std::vector<double>{*fixed_alpha} : grid;
    const std::vector<double> betas = fixed_beta ? std::vector<double>{*fixed_beta} : grid;
    SmootherFit best;
    double best_sse = std::numeric_limits<double>::infinity();
    for (double a : alphas) {
        for (double b : betas) {
            SmootherFit fit = holt_run(y, a, b);
            if (fit.sse < best_sse) {
                best_sse = fit.sse;
                best = std::move(fit);
            }
        }
    }
    return best;
}

SmootherFit hw_fit(const std::vector<double>& y, int f, const ForecasterSpec& spec) {
    const std::vector<double> grid = coarse_grid();
    const std::vector<double> alphas = spec.alpha ? std::vector<double>{*spec.alpha} : grid;
    const std::vector<double> betas = spec.beta ? std::vector<double>{*spec.beta} : grid;
    const std::vector<double> gammas = spec.gamma ? std::vector<double>{*spec.gamma} : grid;
    SmootherFit best;
    double best_sse = std::numeric_limits<double>::infinity();
    for (double a : alphas) {
        for (double b : betas) {
            for (double g : gammas) {
                SmootherFit fit = hw_run(y, f, a, b, g);
                if (fit.sse < best_sse) {
                    best_sse = fit.sse;
                    best = std::move(fit);
                }
            }
        }
    }
    return best;
}

std::vector<double> ses_forecast_values(const SmootherFit& fit, int h) {
    return std::vector<double>(static_cast<std::size_t>(h), fit.level);
}

std::vector<double> holt_forecast_values(const SmootherFit& fit, int h) {
    std::vector<double> out(static_cast<std::size_t>(h));
    for (int k = 1; k <= h; ++k) out[k - 1] = fit.level + k * fit.trend;
    return out;
}

std::vector<double> hw_forecast_values(const SmootherFit& fit, int f, int origin, int h) {
    std::vector<double> out(static_cast<std::size_t>(h));
    for (int k = 1; k <= h; ++k) {
        const int phase = (origin - 1 + k) % f;
        out[k - 1] = fit.level + k * fit.trend + fit.seasonal[phase];
    }
    return out;
}

// Gaussian one-step-error AICc with shared constants dropped; candidates with
// too few observations for the correction are not selectable.
double aicc(double sse, int n, int k) {
    if (n <= k + 1) return std::numeric_limits<double>::infinity();
    const double safe_sse = std::max(sse, 1e-300);
    return n * std::log(safe_sse / n) + 2.0 * k + 2.0 * k * (k + 1.0) / (n - k - 1.0);
}

struct ThetaParts {
    bool seasonal = false;
    std::vector<double> indices;    // multiplicative, by phase
    std::vector<double> adjusted;   // deseasonalized values
    SmootherFit ses;
    double half_slope = 0.0;
};

ThetaParts theta_fit(const TimeSeries& series, std::optional<double> fixed_alpha) {
    const auto& y = series.values;
    const int t = static_cast<int>(y.size());
    const int f = series.frequency;
    ThetaParts parts;
    parts.adjusted = y;

    if (f > 1 && t >= 2 * f) {
        const double r = acf(y, f);
        const bool significant = std::abs(r) > 1.645 / std::sqrt(static_cast<double>(t));
        const bool positive = std::all_of(y.begin(), y.end(), [](double v) { return v > 0.0; });
        if (significant && positive) {
            // Multiplicative classical decomposition: per-phase mean ratio to
            // the centered-moving-average trend, normalized to mean 1.
            std::vector<double> trend(y.size());
            {
                TimeSeries tmp = series;
                const Decomposition d = decompose(tmp);
                trend = d.trend;
            }
            std::vector<double> ratio_sum(static_cast<std::size_t>(f), 0.0);
            std::vector<int> ratio_count(static_cast<std::size_t>(f), 0);
            bool valid = true;
            for (int i = 0; i < t; ++i) {
                if (trend[i] <= 0.0) {
                    valid = false;
                    break;
                }
                ratio_sum[i % f] += y[i] / trend[i];
                ++ratio_count[i % f];
            }
            if (valid) {
                std::vector<double> idx(static_cast<std::size_t>(f));
                double mean_idx = 0.0;
                for (int p = 0; p < f; ++p) {
                    idx[p] = ratio_sum[p] / ratio_count[p];
                    mean_idx += idx[p];
                }
                mean_idx /= f;
                for (int p = 0; p < f; ++p) {
                    idx[p] /= mean_idx;
                    if (idx[p] <= 0.0) valid = false;
                }
                if (valid) {
                    parts.seasonal = true;
                    parts.indices = idx;
                    for (int i = 0; i < t; ++i) parts.adjusted[i] = y[i] / idx[i % f];
                }
            }
        }
    }

    parts.ses = ses_fit(parts.adjusted, fixed_alpha);

    // OLS slope of the adjusted series on time.
    const double n = static_cast<double>(t);
    double sum_t = 0.0, sum_y = 0.0, sum_ty = 0.0, sum_tt = 0.0;
    for (int i = 0; i < t; ++i) {
        sum_t += i;
        sum_y += parts.adjusted[i];
        sum_ty += static_cast<double>(i) * parts.adjusted[i];
        sum_tt += static_cast<double>(i) * i;
    }
    const double denom = n * sum_tt - sum_t * sum_t;
    const double slope = denom > 0.0 ? (n * sum_ty - sum_t * sum_y) / denom : 0.0;
    parts.half_slope = 0.5 * slope;
    return parts;
}

void require_length(const TimeSeries& series, ForecasterKind kind) {
    if ((kind == ForecasterKind::snaive || kind == ForecasterKind::holt_winters_add) &&
        series.frequency <= 1) {
        throw InvalidSpecError(std::string(to_string(kind)) + ": requires frequency > 1");
    }
    if (series.length() < min_length(kind, series.frequency)) {
        throw TooShortError(std::string(to_string(kind)) + ": series '" + series.id +
                            "' too short (length " + std::to_string(series.length()) + ")");
    }
}

enum class EtsChoice { ses, holt, hw };

EtsChoice ets_select(const TimeSeries& series, const ForecasterSpec& spec, SmootherFit* out_fit) {
    const auto& y = series.values;
    const int n = static_cast<int>(y.size());
    const int f = series.frequency;

    EtsChoice choice = EtsChoice::ses;
    SmootherFit best_fit = ses_fit(y, spec.alpha);
    double best = aicc(best_fit.sse, n, best_fit.n_params + best_fit.n_states);

    if (n >= min_length(ForecasterKind::holt, f)) {
        SmootherFit fit = holt_fit(y, spec.alpha, spec.beta);
        const double score = aicc(fit.sse, n, fit.n_params + fit.n_states);
        if (score < best) {
            best = score;
            best_fit = std::move(fit);
            choice = EtsChoice::holt;
        }
    }
    if (f > 1 && n >= 2 * f) {
        SmootherFit fit = hw_fit(y, f, spec);
        const double score = aicc(fit.sse, n, fit.n_params + fit.n_states);
        if (score < best) {
            best = score;
            best_fit = std::move(fit);
            choice = EtsChoice::hw;
        }
    }
    if (out_fit) *out_fit = std::move(best_fit);
    return choice;
}

} // namespace

Forecast forecast(const ForecasterSpec& spec, const TimeSeries& series, int h) {
    if (h < 1) throw InvalidSpecError("forecast: h must be >= 1");
    require_length(series, spec.kind);
    const auto& y = series.values;
    const int t = static_cast<int>(y.size());
    const int f = series.frequency;

    Forecast fc;
    fc.model_name = to_string(spec.kind);
    fc.origin_length = t;

    switch (spec.kind) {
        case ForecasterKind::naive:
            fc.values.assign(static_cast<std::size_t>(h), y.back());
            break;
        case ForecasterKind::snaive: {
            // Repeat the last full cycle.
            fc.values.resize(static_cast<std::size_t>(h));
            for (int k = 1; k <= h; ++k) fc.values[k - 1] = y[t - f + (k - 1) % f];
            break;
        }
        case ForecasterKind::ses:
            fc.values = ses_forecast_values(ses_fit(y, spec.alpha), h);
            break;
        case ForecasterKind::holt:
            fc.values = holt_forecast_values(holt_fit(y, spec.alpha, spec.beta), h);
            break;
        case ForecasterKind::holt_winters_add:
            fc.values = hw_forecast_values(hw_fit(y, f, spec), f, t, h);
            break;
        case ForecasterKind::ets_auto: {
            SmootherFit fit;
            switch (ets_select(series, spec, &fit)) {
                case EtsChoice::ses: fc.values = ses_forecast_values(fit, h); break;
                case EtsChoice::holt: fc.values = holt_forecast_values(fit, h); break;
                case EtsChoice::hw: fc.values = hw_forecast_values(fit, f, t, h); break;
            }
            break;
        }
        case ForecasterKind::theta: {
            const ThetaParts parts = theta_fit(series, spec.alpha);
            fc.values.resize(static_cast<std::size_t>(h));
            for (int k = 1; k <= h; ++k) {
                double v = parts.ses.level + parts.half_slope * k;
                if (parts.seasonal) v *= parts.indices[(t - 1 + k) % f];
                fc.values[k - 1] = v;
            }
            break;
        }
    }
    return fc;
}

FitResult in_sample_fit(const ForecasterSpec& spec, const TimeSeries& series) {
    require_length(series, spec.kind);
    const auto& y = series.values;
    const int t = static_cast<int>(y.size());
    const int f = series.frequency;

    FitResult result;
    switch (spec.kind) {
        case ForecasterKind::naive: {
            result.fitted.resize(y.size());
            result.fitted[0] = y[0];
            for (int i = 1; i < t; ++i) result.fitted[i] = y[i - 1];
            break;
        }
        case ForecasterKind::snaive: {
            result.fitted.resize(y.size());
            for (int i = 0; i < t; ++i) result.fitted[i] = i < f ? y[i] : y[i - f];
            break;
        }
        case ForecasterKind::ses:
            result.fitted = ses_fit(y, spec.alpha).fitted;
            break;
        case ForecasterKind::holt:
            result.fitted = holt_fit(y, spec.alpha, spec.beta).fitted;
            break;
        case ForecasterKind::holt_winters_add:
            result.fitted = hw_fit(y, f, spec).fitted;
            break;
        case ForecasterKind::ets_auto: {
            SmootherFit fit;
            ets_select(series, spec, &fit);
            result.fitted = fit.fitted;
            break;
        }
        case ForecasterKind::theta: {
            const ThetaParts parts = theta_fit(series, spec.alpha);
            result.fitted.resize(y.size());
            for (int i = 0; i < t; ++i) {
                double v = parts.ses.fitted[i];
                if (parts.seasonal) v *= parts.indices[i % f];
                result.fitted[i] = v;
            }
            break;
        }
    }
    result.residuals.resize(y.size());
    for (int i = 0; i < t; ++i) result.residuals[i] = y[i] - result.fitted[i];
    return result;
}

} // namespace osp
