#pragma once

// Independent reference computations used to check library results. These are
// written from the definitions, not from the library code, and favour clarity
// over speed.

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <stdexcept>
#include <vector>

namespace oracle_ref {

inline double dot(const std::vector<double>& a, const std::vector<double>& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

inline double cosine(const std::vector<double>& a, const std::vector<double>& b) {
    return dot(a, b) / std::sqrt(dot(a, a) * dot(b, b));
}

inline std::vector<double> softmax(const std::vector<double>& x) {
    std::vector<double> e(x.size());
    double s = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) s += e[i] = std::exp(x[i]);
    for (auto& v : e) v /= s;
    return e;
}

inline double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

/// Row-major matrix times vector.
inline std::vector<double> matvec(const std::vector<double>& m, std::size_t rows, std::size_t cols,
                                  const std::vector<double>& x) {
    std::vector<double> y(rows, 0.0);
    for (std::size_t r = 0; r < rows; ++r)
        for (std::size_t c = 0; c < cols; ++c) y[r] += m[r * cols + c] * x[c];
    return y;
}

struct CellOut {
    std::vector<double> h, c;
};

/// Textbook LSTM cell with gate rows stacked as input, forget, candidate, output.
inline CellOut lstm_cell(const std::vector<double>& w_ih, const std::vector<double>& w_hh,
                         const std::vector<double>& b, const std::vector<double>& x, const std::vector<double>& h,
                         const std::vector<double>& c) {
    const std::size_t H = h.size(), I = x.size();
    const auto gx = matvec(w_ih, 4 * H, I, x);
    const auto gh = matvec(w_hh, 4 * H, H, h);
    CellOut out{std::vector<double>(H), std::vector<double>(H)};
    for (std::size_t k = 0; k < H; ++k) {
        const double i = sigmoid(gx[k] + gh[k] + b[k]);
        const double f = sigmoid(gx[H + k] + gh[H + k] + b[H + k]);
        const double g = std::tanh(gx[2 * H + k] + gh[2 * H + k] + b[2 * H + k]);
        const double o = sigmoid(gx[3 * H + k] + gh[3 * H + k] + b[3 * H + k]);
        out.c[k] = f * c[k] + i * g;
        out.h[k] = o * std::tanh(out.c[k]);
    }
    return out;
}

/// MRR and Hits@k from the best gold rank of each query.
inline double mrr(const std::vector<std::size_t>& ranks) {
    double s = 0.0;
    for (auto r : ranks) s += 1.0 / static_cast<double>(r);
    return s / static_cast<double>(ranks.size());
}

inline double hits(const std::vector<std::size_t>& ranks, std::size_t k) {
    double s = 0.0;
    for (auto r : ranks) s += r <= k ? 1.0 : 0.0;
    return s / static_cast<double>(ranks.size());
}

/// Average precision straight from the definition: mean of precision@i over
/// the positions i that hold a positive.
inline double average_precision(const std::vector<bool>& labels) {
    double sum = 0.0;
    std::size_t pos = 0;
    for (std::size_t i = 0; i < labels.size(); ++i) {
        if (!labels[i]) continue;
        ++pos;
        sum += static_cast<double>(pos) / static_cast<double>(i + 1);
    }
    return pos == 0 ? std::nan("") : sum / static_cast<double>(pos);
}

/// Expected reciprocal rank of one gold among n candidates in uniformly random order.
inline double random_ranking_mrr(std::size_t n) {
    double s = 0.0;
    for (std::size_t r = 1; r <= n; ++r) s += 1.0 / static_cast<double>(r);
    return s / static_cast<double>(n);
}

/// Ordinary least squares via the normal equations and Gauss-Jordan with
/// partial pivoting. Columns are regressors. Returns coefficients and RSS.
struct Fit {
    std::vector<double> beta;
    double rss = 0.0;
};

inline Fit normal_equations(const std::vector<std::vector<double>>& cols, const std::vector<double>& y) {
    const std::size_t k = cols.size(), n = y.size();
    std::vector<std::vector<double>> a(k, std::vector<double>(k + 1, 0.0));
    for (std::size_t i = 0; i < k; ++i) {
        for (std::size_t j = 0; j < k; ++j)
            for (std::size_t t = 0; t < n; ++t) a[i][j] += cols[i][t] * cols[j][t];
        for (std::size_t t = 0; t < n; ++t) a[i][k] += cols[i][t] * y[t];
    }
    for (std::size_t p = 0; p < k; ++p) {
        std::size_t best = p;
        for (std::size_t r = p + 1; r < k; ++r)
            if (std::abs(a[r][p]) > std::abs(a[best][p])) best = r;
        std::swap(a[p], a[best]);
        if (std::abs(a[p][p]) < 1e-300) throw std::runtime_error("singular");
        for (std::size_t r = 0; r < k; ++r) {
            if (r == p) continue;
            const double f = a[r][p] / a[p][p];
            for (std::size_t c = p; c <= k; ++c) a[r][c] -= f * a[p][c];
        }
    }
    Fit f;
    f.beta.resize(k);
    for (std::size_t i = 0; i < k; ++i) f.beta[i] = a[i][k] / a[i][i];
    for (std::size_t t = 0; t < n; ++t) {
        double pred = 0.0;
        for (std::size_t i = 0; i < k; ++i) pred += f.beta[i] * cols[i][t];
        f.rss += (y[t] - pred) * (y[t] - pred);
    }
    return f;
}

}  // namespace oracle_ref
