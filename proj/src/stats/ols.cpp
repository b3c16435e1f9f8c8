#include "scidsi/stats/ols.hpp"

#include "scidsi/errors.hpp"
#include "scidsi/stats/descriptive.hpp"
#include "scidsi/stats/distributions.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

namespace scidsi::stats {

DesignMatrixBuilder::DesignMatrixBuilder(std::size_t n_rows) : n_rows_(n_rows) {
    names_.emplace_back("Intercept");
    columns_.emplace_back(n_rows, 1.0);
}

DesignMatrixBuilder& DesignMatrixBuilder::add(std::string name, std::span<const double> values) {
    if (values.size() != n_rows_) {
        throw PreconditionError("design column '" + name + "' has " +
                                std::to_string(values.size()) + " rows, expected " +
                                std::to_string(n_rows_));
    }
    require_finite(values, name.c_str());
    names_.push_back(std::move(name));
    columns_.emplace_back(values.begin(), values.end());
    return *this;
}

DesignMatrixBuilder& DesignMatrixBuilder::add_categorical(const std::string& name,
                                                          std::span<const std::string> levels) {
    if (levels.size() != n_rows_) {
        throw PreconditionError("categorical '" + name + "' has wrong row count");
    }
    const std::set<std::string> distinct(levels.begin(), levels.end());
    bool reference = true;
    for (const auto& level : distinct) {
        if (reference) {
            reference = false;
            continue;
        }
        std::vector<double> dummy(n_rows_, 0.0);
        for (std::size_t i = 0; i < n_rows_; ++i) {
            if (levels[i] == level) dummy[i] = 1.0;
        }
        names_.push_back(name + "[T." + level + "]");
        columns_.push_back(std::move(dummy));
    }
    return *this;
}

DesignMatrix DesignMatrixBuilder::build() const {
    DesignMatrix out;
    out.names = names_;
    out.values.resize(static_cast<Eigen::Index>(n_rows_), static_cast<Eigen::Index>(columns_.size()));
    for (std::size_t j = 0; j < columns_.size(); ++j) {
        for (std::size_t i = 0; i < n_rows_; ++i) {
            out.values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = columns_[j][i];
        }
    }
    return out;
}

std::string_view to_string(CovarianceType type) {
    return type == CovarianceType::Classic ? "nonrobust" : "HC3";
}

std::size_t RegressionResult::index_of(std::string_view name) const {
    for (std::size_t j = 0; j < names.size(); ++j) {
        if (names[j] == name) return j;
    }
    throw NotFound("no coefficient named " + std::string(name));
}

double RegressionResult::se(std::size_t j) const {
    const auto idx = static_cast<Eigen::Index>(j);
    return cov_type == CovarianceType::Classic ? se_classic(idx) : se_hc3(idx);
}

std::pair<double, double> RegressionResult::confidence_interval(std::size_t j, double level) const {
    if (!(level > 0.0 && level < 1.0)) throw DomainError("confidence level outside (0,1)");
    const double q = student_t_quantile(0.5 + 0.5 * level, dof);
    const double estimate = coefficients(static_cast<Eigen::Index>(j));
    const double half = q * se(j);
    return {estimate - half, estimate + half};
}

RegressionResult ols_fit(const DesignMatrix& x, std::span<const double> y, CovarianceType cov_type) {
    const Eigen::Index n = x.values.rows();
    const Eigen::Index p = x.values.cols();
    if (static_cast<std::size_t>(n) != y.size()) throw PreconditionError("ols_fit: y length mismatch");
    if (n <= p) throw PreconditionError("ols_fit: need more rows than columns");
    if (x.names.size() != static_cast<std::size_t>(p)) throw PreconditionError("ols_fit: column names mismatch");
    require_finite(y, "ols_fit y");

    const Eigen::Map<const Eigen::VectorXd> yv(y.data(), n);

    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(x.values);
    qr.setThreshold(1e-10);
    if (qr.rank() < p) {
        std::string culprits;
        const auto& perm = qr.colsPermutation().indices();
        for (Eigen::Index k = qr.rank(); k < p; ++k) {
            if (!culprits.empty()) culprits += ", ";
            culprits += x.names[static_cast<std::size_t>(perm(k))];
        }
        throw RankError("design matrix is rank deficient; collinear columns: " + culprits);
    }

    RegressionResult out;
    out.names = x.names;
    out.cov_type = cov_type;
    out.n = static_cast<std::size_t>(n);
    out.dof = static_cast<double>(n - p);
    out.coefficients = qr.solve(yv);
    out.fitted = x.values * out.coefficients;
    out.residuals = yv - out.fitted;

    // (X'X)^-1 = P R^-1 R^-T P'
    const Eigen::MatrixXd r = qr.matrixR().topLeftCorner(p, p).triangularView<Eigen::Upper>();
    const Eigen::MatrixXd r_inv =
        r.triangularView<Eigen::Upper>().solve(Eigen::MatrixXd::Identity(p, p));
    const Eigen::MatrixXd perm = qr.colsPermutation();
    const Eigen::MatrixXd xtx_inv = perm * (r_inv * r_inv.transpose()) * perm.transpose();

    const double sse = out.residuals.squaredNorm();
    out.mse = sse / out.dof;
    out.cov_classic = xtx_inv * out.mse;

    // Leverages are the squared row norms of the thin Q factor.
    const Eigen::MatrixXd q_thin = qr.householderQ() * Eigen::MatrixXd::Identity(n, p);
    Eigen::VectorXd weights(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        const double h = q_thin.row(i).squaredNorm();
        const double scaled = out.residuals(i) / (1.0 - h);
        weights(i) = scaled * scaled;
    }
    const Eigen::MatrixXd meat = x.values.transpose() * weights.asDiagonal() * x.values;
    out.cov_hc3 = xtx_inv * meat * xtx_inv;

    out.se_classic = out.cov_classic.diagonal().cwiseMax(0.0).cwiseSqrt();
    out.se_hc3 = out.cov_hc3.diagonal().cwiseMax(0.0).cwiseSqrt();

    out.t_stats.resize(p);
    out.p_values.resize(p);
    out.ci99.resize(static_cast<std::size_t>(p));
    const double q99 = student_t_quantile(0.995, out.dof);
    for (Eigen::Index j = 0; j < p; ++j) {
        const double se = out.se(static_cast<std::size_t>(j));
        const double beta = out.coefficients(j);
        const double t = se > 0.0 ? beta / se
                                  : (beta == 0.0 ? 0.0 : std::copysign(INFINITY, beta));
        out.t_stats(j) = t;
        out.p_values(j) = student_t_two_tailed(t, out.dof);
        out.ci99[static_cast<std::size_t>(j)] = {beta - q99 * se, beta + q99 * se};
    }

    const double y_mean = mean(y);
    const double sst = (yv.array() - y_mean).square().sum();
    out.r2 = sst > 0.0 ? 1.0 - sse / sst : 0.0;
    out.adj_r2 = 1.0 - (1.0 - out.r2) * static_cast<double>(n - 1) / out.dof;
    // JB is undefined for tiny samples and exact fits (residuals may then be
    // rounding noise of identical value); report NaN there.
    const double nan = std::numeric_limits<double>::quiet_NaN();
    out.jarque_bera = {nan, nan, nan, nan};
    if (n >= 8 && sse > 0.0) {
        try {
            out.jarque_bera = jarque_bera(std::span<const double>(out.residuals.data(), static_cast<std::size_t>(n)));
        } catch (const ConstantSeriesError&) {
        }
    }

    const double df_model = static_cast<double>(p - 1);
    if (df_model > 0.0) {
        if (sse > 0.0) {
            out.f_stat_classic = ((sst - sse) / df_model) / out.mse;
            out.f_p_classic = f_sf(std::max(out.f_stat_classic, 0.0), df_model, out.dof);
        } else {
            out.f_stat_classic = std::numeric_limits<double>::infinity();
            out.f_p_classic = 0.0;
        }
        if (cov_type == CovarianceType::Classic) {
            out.f_stat = out.f_stat_classic;
            out.f_p = out.f_p_classic;
        } else {
            // Wald test of all slopes = 0 under the robust covariance.
            const Eigen::VectorXd b = out.coefficients.tail(p - 1);
            const Eigen::MatrixXd v = out.cov_hc3.bottomRightCorner(p - 1, p - 1);
            const Eigen::LDLT<Eigen::MatrixXd> ldlt(v);
            const double wald = b.dot(ldlt.solve(b));
            out.f_stat = wald / df_model;
            out.f_p = std::isfinite(out.f_stat) ? f_sf(std::max(out.f_stat, 0.0), df_model, out.dof)
                                                : 0.0;
        }
    }
    return out;
}

}  // namespace scidsi::stats
