#include <doctest.h>

#include <cmath>
#include <limits>
#include <vector>

#include "osp/errors.hpp"
#include "osp/forecasters.hpp"
#include "test_util.hpp"

using namespace osp;
using test::make_series;

namespace {

// Independent SES: level starts at the first value, alpha grid-searched over
// {0.01..0.99} against one-step squared error.
struct SesOracle {
    double level = 0.0;
    double alpha = 0.0;
    double sse = 0.0;
};

SesOracle ses_oracle(const std::vector<double>& y) {
    SesOracle best;
    best.sse = std::numeric_limits<double>::infinity();
    for (int i = 1; i <= 99; ++i) {
        const double alpha = i / 100.0;
        double level = y[0];
        double sse = 0.0;
        for (double v : y) {
            const double e = v - level;
            sse += e * e;
            level += alpha * e;
        }
        if (sse < best.sse) best = {level, alpha, sse};
    }
    return best;
}

std::vector<ForecasterKind> all_kinds() {
    return {ForecasterKind::naive,  ForecasterKind::snaive,
            ForecasterKind::ses,    ForecasterKind::holt,
            ForecasterKind::holt_winters_add, ForecasterKind::ets_auto,
            ForecasterKind::theta};
}

} // namespace

TEST_CASE("naive repeats the last value") {
    const Forecast fc = forecast({.kind = ForecasterKind::naive}, make_series({1, 2, 3}), 2);
    CHECK(fc.values == std::vector<double>{3, 3});
    CHECK(fc.origin_length == 3);
}

TEST_CASE("snaive repeats the last full cycle") {
    const Forecast fc =
        forecast({.kind = ForecasterKind::snaive}, make_series({1, 2, 3, 4, 5, 6, 7, 8}, 4), 4);
    CHECK(fc.values == std::vector<double>{5, 6, 7, 8});

    const Forecast wrap =
        forecast({.kind = ForecasterKind::snaive}, make_series({1, 2, 3, 4, 5, 6, 7, 8}, 4), 6);
    CHECK(wrap.values == std::vector<double>{5, 6, 7, 8, 5, 6});
}

TEST_CASE("ses with alpha forced to 1 degenerates to naive") {
    const TimeSeries s = test::random_series(31);
    const Forecast ses_one = forecast({.kind = ForecasterKind::ses, .alpha = 1.0}, s, 3);
    const Forecast naive_fc = forecast({.kind = ForecasterKind::naive}, s, 3);
    CHECK(ses_one.values == naive_fc.values);
}

TEST_CASE("ses flat forecast at the grid-optimal level") {
    const TimeSeries s = test::ar1(60, 0.5, 17, 1.0);
    const SesOracle oracle = ses_oracle(s.values);
    const Forecast fc = forecast({.kind = ForecasterKind::ses}, s, 4);
    for (double v : fc.values) CHECK(v == doctest::Approx(oracle.level).epsilon(1e-12));
}

TEST_CASE("theta on a noiseless ramp matches ses-plus-half-slope") {
    TimeSeries s = make_series({});
    for (int t = 1; t <= 50; ++t) s.values.push_back(static_cast<double>(t));
    const Forecast fc = forecast({.kind = ForecasterKind::theta}, s, 1);

    const SesOracle oracle = ses_oracle(s.values);
    // OLS slope of y_t = t is exactly 1.
    const double expected = oracle.level + 0.5 * 1.0;
    CHECK(fc.values[0] == doctest::Approx(expected).epsilon(1e-6));
}

TEST_CASE("theta forecast slope is half the series slope") {
    for (double slope : {0.5, 2.0, -1.0}) {
        TimeSeries s = make_series({});
        for (int t = 0; t < 60; ++t) s.values.push_back(100.0 + slope * t);
        const Forecast fc = forecast({.kind = ForecasterKind::theta}, s, 6);
        for (int k = 1; k < fc.horizon(); ++k) {
            CHECK(fc.values[k] - fc.values[k - 1] ==
                  doctest::Approx(0.5 * slope).epsilon(1e-6));
        }
    }
}

TEST_CASE("minimum lengths and invalid specs") {
    CHECK_NOTHROW(forecast({.kind = ForecasterKind::naive}, make_series({5}), 2));
    CHECK_THROWS_AS(forecast({.kind = ForecasterKind::ses}, make_series({1, 2, 3}), 1),
                    TooShortError);
    CHECK_THROWS_AS(forecast({.kind = ForecasterKind::theta}, make_series({1, 2, 3}), 1),
                    TooShortError);
    CHECK_THROWS_AS(
        forecast({.kind = ForecasterKind::snaive}, make_series({1, 2, 3, 4, 5, 6}, 4), 1),
        TooShortError);
    CHECK_THROWS_AS(forecast({.kind = ForecasterKind::snaive}, make_series({1, 2, 3, 4}, 1), 1),
                    InvalidSpecError);
    CHECK_THROWS_AS(
        forecast({.kind = ForecasterKind::holt_winters_add}, make_series({1, 2, 3, 4}, 1), 1),
        InvalidSpecError);
}

TEST_CASE("forecasts are deterministic") {
    const TimeSeries s = test::random_series(47, 40, 80);
    for (ForecasterKind kind : all_kinds()) {
        if ((kind == ForecasterKind::snaive || kind == ForecasterKind::holt_winters_add) &&
            s.frequency <= 1) {
            continue;
        }
        const Forecast a = forecast({.kind = kind}, s, 5);
        const Forecast b = forecast({.kind = kind}, s, 5);
        CHECK(a.values == b.values);
    }
}

TEST_CASE("shift equivariance") {
    const double c = 12.75;
    const TimeSeries base = test::random_series(91, 40, 90);
    TimeSeries seasonal = base;
    seasonal.frequency = 4;
    for (ForecasterKind kind :
         {ForecasterKind::naive, ForecasterKind::snaive, ForecasterKind::ses,
          ForecasterKind::holt, ForecasterKind::holt_winters_add, ForecasterKind::ets_auto}) {
        const TimeSeries& s =
            (kind == ForecasterKind::snaive || kind == ForecasterKind::holt_winters_add)
                ? seasonal
                : base;
        TimeSeries shifted = s;
        for (double& v : shifted.values) v += c;
        const Forecast fa = forecast({.kind = kind}, s, 6);
        const Forecast fb = forecast({.kind = kind}, shifted, 6);
        for (int i = 0; i < 6; ++i) {
            CAPTURE(to_string(kind));
            CHECK(fb.values[i] == doctest::Approx(fa.values[i] + c).epsilon(1e-8).scale(1.0));
        }
    }
}

TEST_CASE("scale equivariance") {
    const double c = 2.5;
    TimeSeries base = test::random_series(92, 40, 90);
    for (double& v : base.values) v += 30.0;  // keep positive for theta
    TimeSeries seasonal = base;
    seasonal.frequency = 4;
    for (ForecasterKind kind : all_kinds()) {
        const TimeSeries& s =
            (kind == ForecasterKind::snaive || kind == ForecasterKind::holt_winters_add)
                ? seasonal
                : base;
        TimeSeries scaled = s;
        for (double& v : scaled.values) v *= c;
        const Forecast fa = forecast({.kind = kind}, s, 6);
        const Forecast fb = forecast({.kind = kind}, scaled, 6);
        for (int i = 0; i < 6; ++i) {
            CAPTURE(to_string(kind));
            CHECK(fb.values[i] ==
                  doctest::Approx(c * fa.values[i]).epsilon(1e-8).scale(1.0));
        }
    }
}

TEST_CASE("in-sample fit of naive is the lag-1 series") {
    const TimeSeries s = make_series({4, 7, 1, 9});
    const FitResult fit = in_sample_fit({.kind = ForecasterKind::naive}, s);
    CHECK(fit.fitted == std::vector<double>{4, 4, 7, 1});
    for (std::size_t i = 0; i < s.values.size(); ++i) {
        CHECK(fit.residuals[i] == s.values[i] - fit.fitted[i]);
    }
}

TEST_CASE("ses residuals of a constant series vanish") {
    const FitResult fit =
        in_sample_fit({.kind = ForecasterKind::ses}, make_series(std::vector<double>(10, 3.0)));
    for (std::size_t i = 1; i < fit.residuals.size(); ++i) CHECK(fit.residuals[i] == 0.0);
}

TEST_CASE("ses in-sample SSE equals the grid-search minimum") {
    const TimeSeries s = test::ar1(80, 0.6, 5, 2.0);
    const FitResult fit = in_sample_fit({.kind = ForecasterKind::ses}, s);
    double sse = 0.0;
    for (double r : fit.residuals) sse += r * r;
    CHECK(sse == doctest::Approx(ses_oracle(s.values).sse).epsilon(1e-12));
}

TEST_CASE("ets_auto follows a strong trend") {
    // On a strongly trending series the trend candidate must win selection:
    // the forecast continues the slope rather than staying flat.
    const TimeSeries r = test::ramp(50, 2.0);
    const Forecast fc = forecast({.kind = ForecasterKind::ets_auto}, r, 4);
    CHECK(fc.values[3] > fc.values[0]);
    CHECK(fc.values[0] > r.values.back());
}

TEST_CASE("holt extrapolates a clean linear trend") {
    const TimeSeries r = test::ramp(40, 3.0, 10.0);
    const Forecast fc = forecast({.kind = ForecasterKind::holt}, r, 3);
    for (int k = 1; k <= 3; ++k) {
        CHECK(fc.values[k - 1] ==
              doctest::Approx(r.values.back() + 3.0 * k).epsilon(1e-6));
    }
}

TEST_CASE("holt winters tracks an additive seasonal pattern") {
    TimeSeries s = make_series({}, 4);
    for (int i = 0; i < 40; ++i) s.values.push_back(10.0 + (i % 4));
    const Forecast fc = forecast({.kind = ForecasterKind::holt_winters_add}, s, 4);
    for (int k = 0; k < 4; ++k) {
        CHECK(fc.values[k] == doctest::Approx(10.0 + k).epsilon(1e-3));
    }
}

TEST_CASE("forecaster kind round-trips through its name") {
    for (ForecasterKind kind : all_kinds()) {
        CHECK(forecaster_kind_from_string(to_string(kind)) == kind);
    }
    CHECK_THROWS_AS(forecaster_kind_from_string("arima"), InvalidSpecError);
}
