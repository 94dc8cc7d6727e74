#include <Eigen/Dense>
#include <cmath>

#include "duokg/analysis.hpp"

namespace duokg::analysis {

void Design::add_column(std::vector<double> c) {
    if (columns.empty() && rows == 0) rows = c.size();
    if (c.size() != rows) throw ShapeError("design column has " + std::to_string(c.size()) + " rows, expected " +
                                           std::to_string(rows));
    columns.push_back(std::move(c));
}

OlsResult ols(const Design& x, std::span<const double> y) {
    const std::size_t n = x.rows, k = x.columns.size();
    if (y.size() != n) throw ShapeError("ols: response length does not match design rows");
    if (k == 0 || n <= k) throw NumericError("ols: need more observations than regressors");
    Eigen::MatrixXd a(n, k);
    for (std::size_t j = 0; j < k; ++j)
        for (std::size_t i = 0; i < n; ++i) a(i, j) = x.columns[j][i];
    Eigen::VectorXd b(n);
    for (std::size_t i = 0; i < n; ++i) b(i) = y[i];
    for (Eigen::Index i = 0; i < a.size(); ++i)
        if (!std::isfinite(a.data()[i])) throw NumericError("ols: non-finite regressor");

    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(a);
    qr.setThreshold(1e-10);
    if (qr.rank() < static_cast<Eigen::Index>(k)) throw NumericError("ols: singular regression matrix");
    const Eigen::VectorXd beta = qr.solve(b);
    const Eigen::VectorXd resid = b - a * beta;

    OlsResult r;
    r.rss = resid.squaredNorm();
    r.dof = n - k;
    const double sigma2 = r.rss / static_cast<double>(r.dof);
    // (A^T A)^-1 through the QR factors: R^-1 R^-T, then undo the pivoting.
    const Eigen::MatrixXd rtop = qr.matrixR().topLeftCorner(k, k).triangularView<Eigen::Upper>();
    const Eigen::MatrixXd rinv = rtop.triangularView<Eigen::Upper>().solve(Eigen::MatrixXd::Identity(k, k));
    const Eigen::MatrixXd cov_p = rinv * rinv.transpose();
    const auto& perm = qr.colsPermutation();
    const Eigen::MatrixXd cov = perm * cov_p * perm.transpose();
    r.coefficients.resize(k);
    r.standard_errors.resize(k);
    for (std::size_t j = 0; j < k; ++j) {
        r.coefficients[j] = beta(j);
        r.standard_errors[j] = std::sqrt(sigma2 * cov(j, j));
    }
    return r;
}

}  // namespace duokg::analysis
