#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "duokg/nn/ops.hpp"

namespace duokg::nn {

namespace {

void expect(bool ok, const char* op, const std::string& detail) {
    if (!ok) throw ShapeError(std::string(op) + ": " + detail);
}

std::string pair_str(Shape a, Shape b) { return a.str() + " vs " + b.str(); }

bool any_grad(const Tape& t, std::initializer_list<Var> vs) {
    return std::any_of(vs.begin(), vs.end(), [&](Var v) { return t.requires_grad(v); });
}

double stable_sigmoid(double x) {
    double y;
    if (x >= 0.0) {
        y = 1.0 / (1.0 + std::exp(-x));
    } else {
        const double e = std::exp(x);
        y = e / (1.0 + e);
    }
    // keep strictly inside (0,1) so log-losses stay finite
    return std::clamp(y, std::numeric_limits<double>::min(), 1.0 - 0x1.0p-53);
}

}  // namespace

Var linear(Tape& t, Var w, Var x) {
    const Shape ws = t.shape(w), xs = t.shape(x);
    expect(xs.is_vector() && xs.rows == ws.cols, "linear", pair_str(ws, xs));
    const auto W = t.value(w);
    const auto X = t.value(x);
    std::vector<double> y(ws.rows, 0.0);
    for (std::size_t i = 0; i < ws.rows; ++i) {
        const double* wr = W.data() + i * ws.cols;
        double acc = 0.0;
        for (std::size_t j = 0; j < ws.cols; ++j) acc += wr[j] * X[j];
        y[i] = acc;
    }
    return t.emit("linear", Shape{ws.rows, 1}, std::move(y), any_grad(t, {w, x}), [w, x, ws](Tape& t, Var out) {
        const auto gy = t.grad(out);
        if (t.requires_grad(w)) {
            auto gw = t.grad(w);
            const auto X = t.value(x);
            for (std::size_t i = 0; i < ws.rows; ++i) {
                const double g = gy[i];
                if (g == 0.0) continue;
                double* row = gw.data() + i * ws.cols;
                for (std::size_t j = 0; j < ws.cols; ++j) row[j] += g * X[j];
            }
        }
        if (t.requires_grad(x)) {
            auto gx = t.grad(x);
            const auto W = t.value(w);
            for (std::size_t i = 0; i < ws.rows; ++i) {
                const double g = gy[i];
                if (g == 0.0) continue;
                const double* row = W.data() + i * ws.cols;
                for (std::size_t j = 0; j < ws.cols; ++j) gx[j] += row[j] * g;
            }
        }
    });
}

Var linear(Tape& t, Var w, Var x, Var b) {
    const Var wx = linear(t, w, x);
    expect(t.shape(b) == t.shape(wx), "linear(bias)", pair_str(t.shape(b), t.shape(wx)));
    return add(t, wx, b);
}

Var matmul_nt(Tape& t, Var a, Var b) {
    const Shape as = t.shape(a), bs = t.shape(b);
    expect(as.cols == bs.cols, "matmul_nt", pair_str(as, bs));
    const auto A = t.value(a);
    const auto B = t.value(b);
    const std::size_t k = as.rows, n = bs.rows, m = as.cols;
    std::vector<double> c(k * n, 0.0);
    for (std::size_t i = 0; i < k; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            double acc = 0.0;
            for (std::size_t l = 0; l < m; ++l) acc += A[i * m + l] * B[j * m + l];
            c[i * n + j] = acc;
        }
    return t.emit("matmul_nt", Shape{k, n}, std::move(c), any_grad(t, {a, b}), [a, b, k, n, m](Tape& t, Var out) {
        const auto gc = t.grad(out);
        const auto A = t.value(a);
        const auto B = t.value(b);
        if (t.requires_grad(a)) {
            auto ga = t.grad(a);
            for (std::size_t i = 0; i < k; ++i)
                for (std::size_t j = 0; j < n; ++j) {
                    const double g = gc[i * n + j];
                    for (std::size_t l = 0; l < m; ++l) ga[i * m + l] += g * B[j * m + l];
                }
        }
        if (t.requires_grad(b)) {
            auto gb = t.grad(b);
            for (std::size_t i = 0; i < k; ++i)
                for (std::size_t j = 0; j < n; ++j) {
                    const double g = gc[i * n + j];
                    for (std::size_t l = 0; l < m; ++l) gb[j * m + l] += g * A[i * m + l];
                }
        }
    });
}

Var matvec_t(Tape& t, Var m, Var v) {
    const Shape ms = t.shape(m), vs = t.shape(v);
    expect(vs.is_vector() && vs.rows == ms.rows, "matvec_t", pair_str(ms, vs));
    const auto M = t.value(m);
    const auto V = t.value(v);
    std::vector<double> y(ms.cols, 0.0);
    for (std::size_t i = 0; i < ms.rows; ++i)
        for (std::size_t j = 0; j < ms.cols; ++j) y[j] += M[i * ms.cols + j] * V[i];
    return t.emit("matvec_t", Shape{ms.cols, 1}, std::move(y), any_grad(t, {m, v}), [m, v, ms](Tape& t, Var out) {
        const auto gy = t.grad(out);
        if (t.requires_grad(m)) {
            auto gm = t.grad(m);
            const auto V = t.value(v);
            for (std::size_t i = 0; i < ms.rows; ++i)
                for (std::size_t j = 0; j < ms.cols; ++j) gm[i * ms.cols + j] += V[i] * gy[j];
        }
        if (t.requires_grad(v)) {
            auto gv = t.grad(v);
            const auto M = t.value(m);
            for (std::size_t i = 0; i < ms.rows; ++i) {
                double acc = 0.0;
                for (std::size_t j = 0; j < ms.cols; ++j) acc += M[i * ms.cols + j] * gy[j];
                gv[i] += acc;
            }
        }
    });
}

namespace {

template <class F, class G>
Var binary_elementwise(Tape& t, const char* op, Var a, Var b, F f, G dfa_dfb) {
    const Shape s = t.shape(a);
    expect(s == t.shape(b), op, pair_str(s, t.shape(b)));
    const auto A = t.value(a);
    const auto B = t.value(b);
    std::vector<double> y(s.size());
    for (std::size_t i = 0; i < y.size(); ++i) y[i] = f(A[i], B[i]);
    return t.emit(op, s, std::move(y), any_grad(t, {a, b}), [a, b, dfa_dfb](Tape& t, Var out) {
        const auto gy = t.grad(out);
        const auto A = t.value(a);
        const auto B = t.value(b);
        const bool ga_on = t.requires_grad(a), gb_on = t.requires_grad(b);
        std::span<double> ga, gb;
        if (ga_on) ga = t.grad(a);
        if (gb_on) gb = t.grad(b);
        for (std::size_t i = 0; i < gy.size(); ++i) {
            const auto [da, db] = dfa_dfb(A[i], B[i]);
            if (ga_on) ga[i] += gy[i] * da;
            if (gb_on) gb[i] += gy[i] * db;
        }
    });
}

template <class F, class D>
Var unary_elementwise(Tape& t, const char* op, Var a, F f, D dydx_from_x_y) {
    const Shape s = t.shape(a);
    const auto A = t.value(a);
    std::vector<double> y(s.size());
    for (std::size_t i = 0; i < y.size(); ++i) y[i] = f(A[i]);
    return t.emit(op, s, std::move(y), t.requires_grad(a), [a, dydx_from_x_y](Tape& t, Var out) {
        const auto gy = t.grad(out);
        const auto A = t.value(a);
        const auto Y = t.value(out);
        auto ga = t.grad(a);
        for (std::size_t i = 0; i < gy.size(); ++i) ga[i] += gy[i] * dydx_from_x_y(A[i], Y[i]);
    });
}

}  // namespace

Var add(Tape& t, Var a, Var b) {
    return binary_elementwise(
        t, "add", a, b, [](double x, double y) { return x + y; },
        [](double, double) { return std::pair{1.0, 1.0}; });
}

Var sub(Tape& t, Var a, Var b) {
    return binary_elementwise(
        t, "sub", a, b, [](double x, double y) { return x - y; },
        [](double, double) { return std::pair{1.0, -1.0}; });
}

Var mul(Tape& t, Var a, Var b) {
    return binary_elementwise(
        t, "mul", a, b, [](double x, double y) { return x * y; },
        [](double x, double y) { return std::pair{y, x}; });
}

Var scale(Tape& t, Var a, double c) {
    return unary_elementwise(
        t, "scale", a, [c](double x) { return c * x; }, [c](double, double) { return c; });
}

Var add_scalar(Tape& t, Var a, Var s) {
    expect(t.shape(s).is_scalar(), "add_scalar", "second operand must be 1x1, got " + t.shape(s).str());
    const Shape as = t.shape(a);
    const double sv = t.item(s);
    const auto A = t.value(a);
    std::vector<double> y(A.begin(), A.end());
    for (auto& v : y) v += sv;
    return t.emit("add_scalar", as, std::move(y), any_grad(t, {a, s}), [a, s](Tape& t, Var out) {
        const auto gy = t.grad(out);
        if (t.requires_grad(a)) {
            auto ga = t.grad(a);
            for (std::size_t i = 0; i < gy.size(); ++i) ga[i] += gy[i];
        }
        if (t.requires_grad(s)) t.grad(s)[0] += std::accumulate(gy.begin(), gy.end(), 0.0);
    });
}

Var relu(Tape& t, Var a) {
    return unary_elementwise(
        t, "relu", a, [](double x) { return x > 0.0 ? x : 0.0; },
        [](double x, double) { return x > 0.0 ? 1.0 : 0.0; });
}

Var leaky_relu(Tape& t, Var a, double slope) {
    return unary_elementwise(
        t, "leaky_relu", a, [slope](double x) { return x > 0.0 ? x : slope * x; },
        [slope](double x, double) { return x > 0.0 ? 1.0 : slope; });
}

Var sigmoid(Tape& t, Var a) {
    return unary_elementwise(
        t, "sigmoid", a, stable_sigmoid, [](double, double y) { return y * (1.0 - y); });
}

Var tanh(Tape& t, Var a) {
    return unary_elementwise(
        t, "tanh", a, [](double x) { return std::tanh(x); }, [](double, double y) { return 1.0 - y * y; });
}

Var concat(Tape& t, std::span<const Var> parts) {
    std::size_t n = 0;
    for (Var p : parts) {
        expect(t.shape(p).is_vector(), "concat", "part is not a vector: " + t.shape(p).str());
        n += t.shape(p).rows;
    }
    std::vector<double> y;
    y.reserve(n);
    bool needs = false;
    for (Var p : parts) {
        const auto v = t.value(p);
        y.insert(y.end(), v.begin(), v.end());
        needs = needs || t.requires_grad(p);
    }
    std::vector<Var> ins(parts.begin(), parts.end());
    return t.emit("concat", Shape{n, 1}, std::move(y), needs, [ins = std::move(ins)](Tape& t, Var out) {
        const auto gy = t.grad(out);
        std::size_t off = 0;
        for (Var p : ins) {
            const std::size_t len = t.shape(p).rows;
            if (t.requires_grad(p)) {
                auto gp = t.grad(p);
                for (std::size_t i = 0; i < len; ++i) gp[i] += gy[off + i];
            }
            off += len;
        }
    });
}

Var concat(Tape& t, std::initializer_list<Var> parts) {
    return concat(t, std::span<const Var>(parts.begin(), parts.size()));
}

Var hconcat(Tape& t, std::span<const Var> parts) {
    expect(!parts.empty(), "hconcat", "no parts");
    const std::size_t rows = t.shape(parts[0]).rows;
    std::size_t cols = 0;
    bool needs = false;
    for (Var p : parts) {
        expect(t.shape(p).rows == rows, "hconcat", pair_str(t.shape(parts[0]), t.shape(p)));
        cols += t.shape(p).cols;
        needs = needs || t.requires_grad(p);
    }
    std::vector<double> y(rows * cols);
    std::size_t col0 = 0;
    for (Var p : parts) {
        const auto v = t.value(p);
        const std::size_t pc = t.shape(p).cols;
        for (std::size_t r = 0; r < rows; ++r)
            std::copy_n(v.data() + r * pc, pc, y.data() + r * cols + col0);
        col0 += pc;
    }
    std::vector<Var> ins(parts.begin(), parts.end());
    return t.emit("hconcat", Shape{rows, cols}, std::move(y), needs,
                  [ins = std::move(ins), rows, cols](Tape& t, Var out) {
                      const auto gy = t.grad(out);
                      std::size_t col0 = 0;
                      for (Var p : ins) {
                          const std::size_t pc = t.shape(p).cols;
                          if (t.requires_grad(p)) {
                              auto gp = t.grad(p);
                              for (std::size_t r = 0; r < rows; ++r)
                                  for (std::size_t c = 0; c < pc; ++c) gp[r * pc + c] += gy[r * cols + col0 + c];
                          }
                          col0 += pc;
                      }
                  });
}

Var hconcat(Tape& t, std::initializer_list<Var> parts) {
    return hconcat(t, std::span<const Var>(parts.begin(), parts.size()));
}

Var slice(Tape& t, Var v, std::size_t offset, std::size_t length) {
    const Shape s = t.shape(v);
    expect(s.is_vector() && offset + length <= s.rows, "slice",
           "range [" + std::to_string(offset) + "," + std::to_string(offset + length) + ") of " + s.str());
    const auto V = t.value(v);
    std::vector<double> y(V.begin() + static_cast<std::ptrdiff_t>(offset),
                          V.begin() + static_cast<std::ptrdiff_t>(offset + length));
    return t.emit("slice", Shape{length, 1}, std::move(y), t.requires_grad(v), [v, offset](Tape& t, Var out) {
        const auto gy = t.grad(out);
        auto gv = t.grad(v);
        for (std::size_t i = 0; i < gy.size(); ++i) gv[offset + i] += gy[i];
    });
}

Var gather_rows(Tape& t, Var m, std::span<const std::uint32_t> rows) {
    const Shape ms = t.shape(m);
    const auto M = t.value(m);
    std::vector<double> y(rows.size() * ms.cols);
    for (std::size_t k = 0; k < rows.size(); ++k) {
        expect(rows[k] < ms.rows, "gather_rows", "row " + std::to_string(rows[k]) + " of " + ms.str());
        std::copy_n(M.data() + rows[k] * ms.cols, ms.cols, y.data() + k * ms.cols);
    }
    std::vector<std::uint32_t> idx(rows.begin(), rows.end());
    return t.emit("gather_rows", Shape{rows.size(), ms.cols}, std::move(y), t.requires_grad(m),
                  [m, idx = std::move(idx), cols = ms.cols](Tape& t, Var out) {
                      const auto gy = t.grad(out);
                      auto gm = t.grad(m);
                      for (std::size_t k = 0; k < idx.size(); ++k)
                          for (std::size_t c = 0; c < cols; ++c) gm[idx[k] * cols + c] += gy[k * cols + c];
                  });
}

Var row(Tape& t, Var m, std::size_t r) {
    const std::uint32_t idx[1] = {static_cast<std::uint32_t>(r)};
    const Var g = gather_rows(t, m, idx);
    const Shape gs = t.shape(g);
    // reinterpret 1 x cols as cols x 1
    const auto G = t.value(g);
    return t.emit("row", Shape{gs.cols, 1}, std::vector<double>(G.begin(), G.end()), t.requires_grad(g),
                  [g](Tape& t, Var out) {
                      const auto gy = t.grad(out);
                      auto gg = t.grad(g);
                      for (std::size_t i = 0; i < gy.size(); ++i) gg[i] += gy[i];
                  });
}

Var detach(Tape& t, Var a) {
    const auto A = t.value(a);
    return t.constant(t.shape(a), std::vector<double>(A.begin(), A.end()));
}

std::vector<double> softmax_values(std::span<const double> logits) {
    if (logits.empty()) throw ShapeError("softmax over an empty vector");
    const double mx = *std::max_element(logits.begin(), logits.end());
    std::vector<double> y(logits.size());
    double z = 0.0;
    for (std::size_t i = 0; i < y.size(); ++i) z += (y[i] = std::exp(logits[i] - mx));
    for (auto& v : y) v /= z;
    return y;
}

Var softmax(Tape& t, Var a) {
    expect(t.shape(a).is_vector(), "softmax", "needs a vector, got " + t.shape(a).str());
    auto y = softmax_values(t.value(a));
    return t.emit("softmax", t.shape(a), std::move(y), t.requires_grad(a), [a](Tape& t, Var out) {
        const auto gy = t.grad(out);
        const auto Y = t.value(out);
        double inner = 0.0;
        for (std::size_t i = 0; i < Y.size(); ++i) inner += gy[i] * Y[i];
        auto ga = t.grad(a);
        for (std::size_t i = 0; i < Y.size(); ++i) ga[i] += Y[i] * (gy[i] - inner);
    });
}

Var log_softmax(Tape& t, Var a) {
    expect(t.shape(a).is_vector() && t.shape(a).rows > 0, "log_softmax", "needs a non-empty vector");
    const auto A = t.value(a);
    const double mx = *std::max_element(A.begin(), A.end());
    double z = 0.0;
    for (double v : A) z += std::exp(v - mx);
    const double lse = mx + std::log(z);
    std::vector<double> y(A.size());
    for (std::size_t i = 0; i < y.size(); ++i) y[i] = A[i] - lse;
    return t.emit("log_softmax", t.shape(a), std::move(y), t.requires_grad(a), [a](Tape& t, Var out) {
        const auto gy = t.grad(out);
        const auto Y = t.value(out);
        const double total = std::accumulate(gy.begin(), gy.end(), 0.0);
        auto ga = t.grad(a);
        for (std::size_t i = 0; i < Y.size(); ++i) ga[i] += gy[i] - std::exp(Y[i]) * total;
    });
}

Var pick(Tape& t, Var v, std::size_t index) {
    expect(index < t.shape(v).size(), "pick", "index " + std::to_string(index) + " of " + t.shape(v).str());
    return t.emit("pick", Shape{1, 1}, {t.value(v)[index]}, t.requires_grad(v), [v, index](Tape& t, Var out) {
        t.grad(v)[index] += t.grad(out)[0];
    });
}

Var dot(Tape& t, Var a, Var b) {
    expect(t.shape(a) == t.shape(b), "dot", pair_str(t.shape(a), t.shape(b)));
    const auto A = t.value(a);
    const auto B = t.value(b);
    double acc = 0.0;
    for (std::size_t i = 0; i < A.size(); ++i) acc += A[i] * B[i];
    return t.emit("dot", Shape{1, 1}, {acc}, any_grad(t, {a, b}), [a, b](Tape& t, Var out) {
        const double g = t.grad(out)[0];
        const auto A = t.value(a);
        const auto B = t.value(b);
        if (t.requires_grad(a)) {
            auto ga = t.grad(a);
            for (std::size_t i = 0; i < A.size(); ++i) ga[i] += g * B[i];
        }
        if (t.requires_grad(b)) {
            auto gb = t.grad(b);
            for (std::size_t i = 0; i < B.size(); ++i) gb[i] += g * A[i];
        }
    });
}

Var sum(Tape& t, Var a) {
    const auto A = t.value(a);
    return t.emit("sum", Shape{1, 1}, {std::accumulate(A.begin(), A.end(), 0.0)}, t.requires_grad(a),
                  [a](Tape& t, Var out) {
                      const double g = t.grad(out)[0];
                      for (auto& v : t.grad(a)) v += g;
                  });
}

double cosine_values(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size()) throw ShapeError("cosine_similarity: length mismatch");
    double ab = 0.0, aa = 0.0, bb = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        ab += a[i] * b[i];
        aa += a[i] * a[i];
        bb += b[i] * b[i];
    }
    if (aa == 0.0 || bb == 0.0) throw NumericError("cosine_similarity of a zero vector");
    return ab / (std::sqrt(aa) * std::sqrt(bb));
}

Var cosine_similarity(Tape& t, Var a, Var b) {
    expect(t.shape(a) == t.shape(b), "cosine_similarity", pair_str(t.shape(a), t.shape(b)));
    const double c = cosine_values(t.value(a), t.value(b));
    return t.emit("cosine_similarity", Shape{1, 1}, {c}, any_grad(t, {a, b}), [a, b](Tape& t, Var out) {
        const double g = t.grad(out)[0];
        const auto A = t.value(a);
        const auto B = t.value(b);
        const double c = t.value(out)[0];
        double aa = 0.0, bb = 0.0;
        for (std::size_t i = 0; i < A.size(); ++i) {
            aa += A[i] * A[i];
            bb += B[i] * B[i];
        }
        const double na = std::sqrt(aa), nb = std::sqrt(bb);
        if (t.requires_grad(a)) {
            auto ga = t.grad(a);
            for (std::size_t i = 0; i < A.size(); ++i) ga[i] += g * (B[i] / (na * nb) - c * A[i] / aa);
        }
        if (t.requires_grad(b)) {
            auto gb = t.grad(b);
            for (std::size_t i = 0; i < B.size(); ++i) gb[i] += g * (A[i] / (na * nb) - c * B[i] / bb);
        }
    });
}

Var bernoulli_cross_entropy(Tape& t, Var p, double y) {
    expect(t.shape(p).is_scalar(), "bernoulli_cross_entropy", "p must be 1x1, got " + t.shape(p).str());
    const double pv = t.item(p);
    if (!(pv > 0.0 && pv < 1.0)) throw NumericError("bernoulli_cross_entropy: p outside (0,1)");
    const double loss = -(1.0 - y) * std::log(1.0 - pv) - y * std::log(pv);
    return t.emit("bernoulli_cross_entropy", Shape{1, 1}, {loss}, t.requires_grad(p), [p, y](Tape& t, Var out) {
        const double pv = t.value(p)[0];
        t.grad(p)[0] += t.grad(out)[0] * ((1.0 - y) / (1.0 - pv) - y / pv);
    });
}

Var entropy_from_log_probs(Tape& t, Var log_probs) {
    const auto L = t.value(log_probs);
    double h = 0.0;
    for (double l : L) h -= std::exp(l) * l;
    return t.emit("entropy", Shape{1, 1}, {h}, t.requires_grad(log_probs), [log_probs](Tape& t, Var out) {
        const double g = t.grad(out)[0];
        const auto L = t.value(log_probs);
        auto gl = t.grad(log_probs);
        for (std::size_t i = 0; i < L.size(); ++i) gl[i] += -g * std::exp(L[i]) * (L[i] + 1.0);
    });
}

}  // namespace duokg::nn
