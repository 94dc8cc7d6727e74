#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>

#include "duokg/analysis.hpp"
#include "duokg/rng.hpp"
#include "support/oracles.hpp"

using namespace duokg;
using namespace duokg::analysis;

namespace {

std::vector<double> white_noise(Rng& rng, std::size_t n) {
    std::vector<double> v(n);
    for (auto& x : v) x = rng.normal();
    return v;
}

std::vector<double> random_walk(Rng& rng, std::size_t n) {
    std::vector<double> v(n);
    double acc = 0.0;
    for (auto& x : v) x = acc += rng.normal();
    return v;
}

// F statistic computed through the normal-equation oracle.
double granger_by_hand(const std::vector<double>& x, const std::vector<double>& y, std::size_t q) {
    const std::size_t n = y.size(), rows = n - q;
    std::vector<std::vector<double>> r_cols, u_cols;
    std::vector<double> target(y.begin() + static_cast<std::ptrdiff_t>(q), y.end());
    r_cols.emplace_back(rows, 1.0);
    for (std::size_t j = 1; j <= q; ++j) r_cols.emplace_back(y.begin() + static_cast<std::ptrdiff_t>(q - j), y.end() - static_cast<std::ptrdiff_t>(j));
    u_cols = r_cols;
    for (std::size_t j = 1; j <= q; ++j) u_cols.emplace_back(x.begin() + static_cast<std::ptrdiff_t>(q - j), x.end() - static_cast<std::ptrdiff_t>(j));
    const double rss_r = oracle_ref::normal_equations(r_cols, target).rss;
    const double rss_u = oracle_ref::normal_equations(u_cols, target).rss;
    return ((rss_r - rss_u) / static_cast<double>(q)) / (rss_u / static_cast<double>(rows - 2 * q - 1));
}

}  // namespace

TEST_CASE("difference examples") {
    CHECK(difference(std::vector<double>{3, 3, 3, 3}) == std::vector<double>{0, 0, 0});
    CHECK(difference(std::vector<double>{1, 2, 3, 4}) == std::vector<double>{1, 1, 1});
    CHECK(difference(std::vector<double>{1, 4, 9, 16, 25}, 2) == std::vector<double>{2, 2, 2});
    CHECK_THROWS_AS(difference(std::vector<double>{1, 2}, 2), std::invalid_argument);
}

TEST_CASE("differencing a cumulative sum recovers the tail") {
    Rng rng(1);
    for (int trial = 0; trial < 50; ++trial) {
        std::vector<double> v(2 + rng.below(30));
        for (auto& x : v) x = static_cast<double>(static_cast<int>(rng.below(200)) - 100);
        std::vector<double> cum(v.size());
        std::partial_sum(v.begin(), v.end(), cum.begin());
        CHECK(difference(cum) == std::vector<double>(v.begin() + 1, v.end()));
    }
}

TEST_CASE("ols agrees with the normal equations") {
    Rng rng(2);
    for (int trial = 0; trial < 50; ++trial) {
        const std::size_t n = 20 + rng.below(40), k = 1 + rng.below(4);
        Design x;
        std::vector<std::vector<double>> cols;
        for (std::size_t j = 0; j < k; ++j) {
            cols.push_back(white_noise(rng, n));
            x.add_column(cols.back());
        }
        const auto y = white_noise(rng, n);
        const auto a = ols(x, y);
        const auto b = oracle_ref::normal_equations(cols, y);
        for (std::size_t j = 0; j < k; ++j) CHECK(a.coefficients[j] == doctest::Approx(b.beta[j]).epsilon(1e-9));
        CHECK(a.rss == doctest::Approx(b.rss).epsilon(1e-9));
        CHECK(a.dof == n - k);
    }
    Design bad;
    bad.add_column({1, 2, 3, 4});
    bad.add_column({2, 4, 6, 8});
    CHECK_THROWS_AS(ols(bad, std::vector<double>{1, 0, 1, 0}), NumericError);
}

TEST_CASE("adf separates white noise from random walks") {
    std::size_t noise_rejects = 0, walk_rejects = 0;
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
        Rng a = Rng::stream(seed, {1});
        Rng b = Rng::stream(seed, {2});
        noise_rejects += adf_test(white_noise(a, 500), 2).rejects_at(AdfLevel::five) ? 1 : 0;
        walk_rejects += adf_test(random_walk(b, 500), 2).rejects_at(AdfLevel::five) ? 1 : 0;
    }
    CHECK(noise_rejects >= 90);
    CHECK(100 - walk_rejects >= 90);
}

TEST_CASE("adf edge cases") {
    CHECK_THROWS_AS(adf_test(std::vector<double>(50, 0.3), 2), NumericError);
    CHECK_THROWS_AS(adf_test(std::vector<double>(11, 0.3), 2), std::invalid_argument);
    AdfResult r;
    r.rejected = AdfLevel::five;
    CHECK(r.rejects_at(AdfLevel::ten));
    CHECK(r.rejects_at(AdfLevel::five));
    CHECK_FALSE(r.rejects_at(AdfLevel::one));
    CHECK_FALSE(r.rejects_at(AdfLevel::none));
}

TEST_CASE("granger detects a lagged driver") {
    Rng rng(3);
    const auto x = white_noise(rng, 200);
    std::vector<double> y(200, 0.0);
    for (std::size_t t = 1; t < 200; ++t) y[t] = 0.9 * x[t - 1] + 0.01 * rng.normal();
    const auto g = granger_f(x, y, 2);
    CHECK(g.f > 100.0);
    CHECK(g.f == doctest::Approx(granger_by_hand(x, y, 2)).epsilon(1e-6));
}

TEST_CASE("granger on independent noise stays small") {
    std::vector<double> fs;
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
        Rng rng(seed + 1000);
        const auto x = white_noise(rng, 200), y = white_noise(rng, 200);
        const auto g = granger_f(x, y, 2);
        CHECK(g.f >= 0.0);
        CHECK(g.rss_unrestricted <= g.rss_restricted);
        CHECK(g.f == doctest::Approx(granger_by_hand(x, y, 2)).epsilon(1e-6));
        fs.push_back(g.f);
    }
    std::nth_element(fs.begin(), fs.begin() + 50, fs.end());
    CHECK(fs[50] < 3.0);
}

TEST_CASE("granger ignores constant offsets") {
    Rng rng(4);
    for (int trial = 0; trial < 20; ++trial) {
        auto x = white_noise(rng, 60), y = white_noise(rng, 60);
        const double base = granger_f(x, y, 2).f;
        const double cx = rng.uniform(-5, 5), cy = rng.uniform(-5, 5);
        for (auto& v : x) v += cx;
        for (auto& v : y) v += cy;
        CHECK(granger_f(x, y, 2).f == doctest::Approx(base).epsilon(1e-8));
    }
}

TEST_CASE("granger errors") {
    CHECK_THROWS_AS(granger_f(std::vector<double>(9, 0.0), std::vector<double>(9, 0.0), 2), std::invalid_argument);
    Rng rng(5);
    const auto x = white_noise(rng, 10), y = white_noise(rng, 10);
    CHECK_NOTHROW(granger_f(x, y, 2));
    CHECK_THROWS_AS(granger_f(std::vector<double>(x.begin(), x.end() - 1), std::vector<double>(y.begin(), y.end() - 1), 2),
                    std::invalid_argument);
    CHECK_THROWS_AS(granger_f(x, std::vector<double>(11, 0.0), 2), std::invalid_argument);
}

TEST_CASE("summary statistics") {
    const auto s = summarize(std::vector<double>{0.0, 1.0});
    CHECK(s.mean == 0.5);
    CHECK(s.variance == 0.5);
    CHECK(s.ratio == 1.0);
    CHECK_THROWS_AS(summarize(std::vector<double>{1, 1, 1}), NumericError);
    CHECK_THROWS_AS(summarize(std::vector<double>{1}), std::invalid_argument);

    Rng rng(6);
    for (int trial = 0; trial < 50; ++trial) {
        auto v = white_noise(rng, 5 + rng.below(20));
        const double c = rng.uniform(0.1, 10.0);
        const auto a = summarize(v);
        for (auto& x : v) x *= c;
        const auto b = summarize(v);
        CHECK(b.ratio == doctest::Approx(a.ratio / c).epsilon(1e-10));
    }
}
