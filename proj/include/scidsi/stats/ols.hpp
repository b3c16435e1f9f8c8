#pragma once

#include "scidsi/stats/transforms.hpp"

#include <Eigen/Dense>

#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace scidsi::stats {

/// Regressor matrix with named columns. Column 0 is always the intercept.
struct DesignMatrix {
    std::vector<std::string> names;
    Eigen::MatrixXd values;

    std::size_t n_rows() const { return static_cast<std::size_t>(values.rows()); }
    std::size_t n_cols() const { return static_cast<std::size_t>(values.cols()); }
};

class DesignMatrixBuilder {
public:
    explicit DesignMatrixBuilder(std::size_t n_rows);

    DesignMatrixBuilder& add(std::string name, std::span<const double> values);

    /// Reference-level dummy coding. The alphabetically first level is the
    /// reference; other levels become columns named `name[T.level]`.
    DesignMatrixBuilder& add_categorical(const std::string& name,
                                         std::span<const std::string> levels);

    DesignMatrix build() const;

private:
    std::size_t n_rows_;
    std::vector<std::string> names_;
    std::vector<std::vector<double>> columns_;
};

enum class CovarianceType { Classic, HC3 };

std::string_view to_string(CovarianceType type);

struct RegressionResult {
    std::vector<std::string> names;
    Eigen::VectorXd coefficients;
    Eigen::VectorXd se_classic;
    Eigen::VectorXd se_hc3;

    /// Inference columns below use the covariance selected by `cov_type`.
    CovarianceType cov_type = CovarianceType::Classic;
    Eigen::VectorXd t_stats;
    Eigen::VectorXd p_values;
    std::vector<std::pair<double, double>> ci99;

    double r2 = 0.0;
    double adj_r2 = 0.0;
    /// Overall F: classic ANOVA F, or the Wald F built from the HC3
    /// covariance when cov_type is HC3.
    double f_stat = 0.0;
    double f_p = 1.0;
    double f_stat_classic = 0.0;
    double f_p_classic = 1.0;
    /// Residual mean square SSE / dof.
    double mse = 0.0;
    JarqueBera jarque_bera;
    std::size_t n = 0;
    double dof = 0.0;

    Eigen::VectorXd fitted;
    Eigen::VectorXd residuals;
    Eigen::MatrixXd cov_classic;
    Eigen::MatrixXd cov_hc3;

    std::size_t index_of(std::string_view name) const;
    double se(std::size_t j) const;
    std::pair<double, double> confidence_interval(std::size_t j, double level) const;
};

/// Least squares via column-pivoted Householder QR. Throws RankError naming
/// the columns found collinear. Requires n_rows > n_cols.
RegressionResult ols_fit(const DesignMatrix& x, std::span<const double> y,
                         CovarianceType cov_type = CovarianceType::Classic);

}  // namespace scidsi::stats
