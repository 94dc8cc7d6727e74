#include <cmath>

#include "duokg/analysis.hpp"

namespace duokg::analysis {

namespace {

void require_finite(std::span<const double> s, const char* where) {
    for (double v : s)
        if (!std::isfinite(v)) throw NumericError(std::string(where) + ": non-finite value in series");
}

}  // namespace

std::vector<double> difference(std::span<const double> series, std::size_t order) {
    if (series.size() <= order) {
        throw std::invalid_argument("difference: series of length " + std::to_string(series.size()) +
                                    " is too short for order " + std::to_string(order));
    }
    std::vector<double> cur(series.begin(), series.end());
    for (std::size_t k = 0; k < order; ++k) {
        std::vector<double> next(cur.size() - 1);
        for (std::size_t i = 1; i < cur.size(); ++i) next[i - 1] = cur[i] - cur[i - 1];
        cur = std::move(next);
    }
    return cur;
}

std::string to_string(AdfLevel level) {
    switch (level) {
        case AdfLevel::one: return "1%";
        case AdfLevel::five: return "5%";
        case AdfLevel::ten: return "10%";
        case AdfLevel::none: break;
    }
    return "not rejected";
}

AdfResult adf_test(std::span<const double> series, std::size_t lag) {
    require_finite(series, "adf_test");
    const std::size_t n = series.size();
    if (n < lag + 10) {
        throw std::invalid_argument("adf_test: need at least " + std::to_string(lag + 10) + " observations, got " +
                                    std::to_string(n));
    }
    const std::vector<double> dy = difference(series, 1);
    // dy[i] = y[i+1] - y[i]; regress dy[t] for t = lag .. n-2
    const std::size_t rows = dy.size() - lag;
    Design x;
    std::vector<double> ones(rows, 1.0), level(rows), target(rows);
    std::vector<std::vector<double>> lags(lag, std::vector<double>(rows));
    for (std::size_t r = 0; r < rows; ++r) {
        const std::size_t t = r + lag;
        target[r] = dy[t];
        level[r] = series[t];
        for (std::size_t j = 0; j < lag; ++j) lags[j][r] = dy[t - 1 - j];
    }
    x.add_column(std::move(ones));
    x.add_column(std::move(level));
    for (auto& c : lags) x.add_column(std::move(c));
    const OlsResult fit = ols(x, target);
    if (!(fit.standard_errors[1] > 0.0)) throw NumericError("adf_test: zero standard error on level coefficient");

    AdfResult out;
    out.t_stat = fit.coefficients[1] / fit.standard_errors[1];
    out.lag = lag;
    out.observations = rows;
    if (out.t_stat < kAdfCritical1)
        out.rejected = AdfLevel::one;
    else if (out.t_stat < kAdfCritical5)
        out.rejected = AdfLevel::five;
    else if (out.t_stat < kAdfCritical10)
        out.rejected = AdfLevel::ten;
    return out;
}

GrangerResult granger_f(std::span<const double> x, std::span<const double> y, std::size_t lag) {
    if (x.size() != y.size()) throw std::invalid_argument("granger_f: series lengths differ");
    if (lag == 0) throw std::invalid_argument("granger_f: lag must be positive");
    const std::size_t n = y.size();
    if (n <= 2 * lag + 5) {
        throw std::invalid_argument("granger_f: need more than " + std::to_string(2 * lag + 5) +
                                    " observations for lag " + std::to_string(lag));
    }
    require_finite(x, "granger_f");
    require_finite(y, "granger_f");
    const std::size_t rows = n - lag;
    std::vector<double> target(rows);
    for (std::size_t r = 0; r < rows; ++r) target[r] = y[r + lag];

    auto lagged = [&](std::span<const double> s, std::size_t j) {
        std::vector<double> c(rows);
        for (std::size_t r = 0; r < rows; ++r) c[r] = s[r + lag - j];
        return c;
    };
    Design restricted;
    restricted.add_column(std::vector<double>(rows, 1.0));
    for (std::size_t j = 1; j <= lag; ++j) restricted.add_column(lagged(y, j));
    Design unrestricted = restricted;
    for (std::size_t j = 1; j <= lag; ++j) unrestricted.add_column(lagged(x, j));

    const OlsResult r = ols(restricted, target);
    const OlsResult u = ols(unrestricted, target);
    GrangerResult g;
    g.rss_restricted = r.rss;
    // Nested least squares can only lower RSS; clamp roundoff so F stays nonnegative.
    g.rss_unrestricted = std::min(u.rss, r.rss);
    g.n_eff = rows;
    g.lag = lag;
    const double denom = g.rss_unrestricted / static_cast<double>(rows - 2 * lag - 1);
    if (!(denom > 0.0)) throw NumericError("granger_f: unrestricted model fits exactly");
    g.f = ((g.rss_restricted - g.rss_unrestricted) / static_cast<double>(lag)) / denom;
    return g;
}

Summary summarize(std::span<const double> series) {
    if (series.size() < 2) throw std::invalid_argument("summarize: need at least 2 values");
    require_finite(series, "summarize");
    Summary s;
    for (double v : series) s.mean += v;
    s.mean /= static_cast<double>(series.size());
    for (double v : series) s.variance += (v - s.mean) * (v - s.mean);
    s.variance /= static_cast<double>(series.size() - 1);
    if (!(s.variance > 0.0)) throw NumericError("summarize: zero variance, mean/variance ratio undefined");
    s.ratio = s.mean / s.variance;
    return s;
}

}  // namespace duokg::analysis
