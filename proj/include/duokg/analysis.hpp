#pragma once

#include <span>
#include <string>
#include <vector>

#include "duokg/common.hpp"

namespace duokg::analysis {

struct TimeSeries {
    std::string label;
    std::vector<double> values;
};

/// Column-major design matrix with `rows` observations.
struct Design {
    std::size_t rows = 0;
    std::vector<std::vector<double>> columns;

    void add_column(std::vector<double> c);
};

struct OlsResult {
    std::vector<double> coefficients;
    std::vector<double> standard_errors;
    double rss = 0.0;
    std::size_t dof = 0;
};

/// Least squares via column-pivoted QR. Throws NumericError on a rank-deficient design.
OlsResult ols(const Design& x, std::span<const double> y);

/// k-th order differences; result has n-k values.
std::vector<double> difference(std::span<const double> series, std::size_t order = 1);

enum class AdfLevel { none, ten, five, one };

struct AdfResult {
    double t_stat = 0.0;
    std::size_t lag = 0;
    std::size_t observations = 0;
    AdfLevel rejected = AdfLevel::none;   // most stringent level rejected

    bool rejects_at(AdfLevel level) const { return rejected >= level && level != AdfLevel::none; }
};

/// Asymptotic critical values, constant but no trend.
inline constexpr double kAdfCritical1 = -3.43;
inline constexpr double kAdfCritical5 = -2.86;
inline constexpr double kAdfCritical10 = -2.57;

AdfResult adf_test(std::span<const double> series, std::size_t lag = 2);
std::string to_string(AdfLevel level);

struct GrangerResult {
    double f = 0.0;
    double rss_restricted = 0.0;
    double rss_unrestricted = 0.0;
    std::size_t n_eff = 0;
    std::size_t lag = 0;
};

/// F statistic for "x Granger-causes y".
GrangerResult granger_f(std::span<const double> x, std::span<const double> y, std::size_t lag = 2);

struct Summary {
    double mean = 0.0;
    double variance = 0.0;
    double ratio = 0.0;
};

Summary summarize(std::span<const double> series);

}  // namespace duokg::analysis
