#include <doctest.h>

#include "scidsi/errors.hpp"
#include "scidsi/stats/correlation.hpp"
#include "scidsi/stats/descriptive.hpp"
#include "scidsi/stats/distributions.hpp"
#include "scidsi/stats/grouped.hpp"
#include "scidsi/stats/levene.hpp"
#include "scidsi/stats/ols.hpp"
#include "scidsi/stats/transforms.hpp"
#include "test_paths.hpp"

#include <json.hpp>

#include <cmath>
#include <fstream>
#include <random>

using namespace scidsi;
using namespace scidsi::stats;
using nlohmann::json;

namespace {

const json& oracle() {
    static const json data = [] {
        std::ifstream in(test::fixture_dir() / "stats_oracle.json");
        REQUIRE(in.good());
        return json::parse(in);
    }();
    return data;
}

std::vector<double> vec(const json& j) { return j.get<std::vector<double>>(); }

bool close(double got, double want, double abs_tol, double rel_tol = 0.0) {
    return std::abs(got - want) <= std::max(abs_tol, rel_tol * std::abs(want));
}

}  // namespace

TEST_CASE("descriptive statistics") {
    const std::vector<double> v{4, 1, 3, 2};
    CHECK(mean(v) == 2.5);
    CHECK(median(v) == 2.5);
    CHECK(median(std::vector<double>{5, 1, 3}) == 3);
    CHECK(sample_variance(v) == doctest::Approx(5.0 / 3.0));
    CHECK(min(v) == 1);
    CHECK(max(v) == 4);
    CHECK_THROWS_AS(sample_variance(std::vector<double>{1}), PreconditionError);
    CHECK_THROWS_AS(mean(std::vector<double>{}), PreconditionError);
    CHECK_THROWS_AS(require_finite(std::vector<double>{1, NAN}, "x"), DomainError);

    const auto& q = oracle()["quantiles"];
    const auto x = vec(q["x"]);
    for (std::size_t i = 0; i < q["q"].size(); ++i) {
        CHECK(close(quantile(x, q["q"][i].get<double>()), q["values"][i].get<double>(), 1e-12));
    }
    CHECK(close(median(x), q["median"].get<double>(), 1e-15));
    CHECK(close(sample_sd(x), q["sd"].get<double>(), 1e-13));
    CHECK_THROWS_AS(quantile(x, 1.5), DomainError);
}

TEST_CASE("log10p1 and effect translation") {
    CHECK(log10p1(0) == 0.0);
    CHECK(log10p1(9) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(log10p1(99) == doctest::Approx(2.0).epsilon(1e-15));
    CHECK_THROWS_AS(log10p1(-0.5), DomainError);
    CHECK(std::abs(effect_percent(0.0259) - 6.14) < 0.05);
    CHECK(effect_percent(0.0) == 0.0);
    CHECK(effect_percent(1.0) == doctest::Approx(900.0));
}

TEST_CASE("standardize") {
    const auto z = standardize(std::vector<double>{1, 2, 3});
    CHECK(z[0] == doctest::Approx(-1.0));
    CHECK(z[1] == 0.0);
    CHECK(z[2] == doctest::Approx(1.0));
    CHECK_THROWS_AS(standardize(std::vector<double>{2, 2, 2}), ConstantSeriesError);

    std::mt19937_64 rng(1);
    std::gamma_distribution<double> g(2.0, 3.0);
    std::vector<double> x(1000);
    for (auto& v : x) v = g(rng) + 1e4;
    const auto s = standardize(x);
    CHECK(std::abs(mean(s)) < 1e-12);
    CHECK(std::abs(sample_sd(s) - 1.0) < 1e-12);
}

TEST_CASE("distribution functions match 50-digit references") {
    const auto& d = oracle()["distributions"];
    for (const auto& r : d["t_cdf"]) {
        INFO("t=" << r[0] << " v=" << r[1]);
        CHECK(close(student_t_cdf(r[0], r[1]), r[2], 1e-12, 1e-10));
    }
    for (const auto& r : d["t_two"]) CHECK(close(student_t_two_tailed(r[0], r[1]), r[2], 1e-12, 1e-10));
    for (const auto& r : d["t_quantile"]) {
        INFO("p=" << r[0] << " v=" << r[1]);
        CHECK(close(student_t_quantile(r[0], r[1]), r[2], 1e-10, 1e-10));
    }
    for (const auto& r : d["f_cdf"]) CHECK(close(f_cdf(r[0], r[1], r[2]), r[3], 1e-12));
    for (const auto& r : d["f_sf"]) {
        INFO("x=" << r[0] << " d1=" << r[1] << " d2=" << r[2]);
        CHECK(close(f_sf(r[0], r[1], r[2]), r[3], 1e-300, 1e-9));
    }
    for (const auto& r : d["chisq_cdf"]) CHECK(close(chisq_cdf(r[0], r[1]), r[2], 1e-12));
    for (const auto& r : d["chisq_sf"]) CHECK(close(chisq_sf(r[0], r[1]), r[2], 1e-300, 1e-9));
    for (const auto& r : d["normal_cdf"]) CHECK(close(normal_cdf(r[0]), r[1], 1e-300, 1e-12));
    for (const auto& r : d["normal_quantile"]) {
        INFO("p=" << r[0]);
        CHECK(close(normal_quantile(r[0]), r[1], 1e-12, 1e-12));
    }
    for (const auto& r : d["ibeta"]) CHECK(close(incomplete_beta(r[0], r[1], r[2]), r[3], 1e-12));
    for (const auto& r : d["gamma_p"]) CHECK(close(gamma_p(r[0], r[1]), r[2], 1e-12));
}

TEST_CASE("distribution closed forms and domains") {
    CHECK(normal_quantile(0.5) == 0.0);
    CHECK(chisq_cdf(2, 2) == doctest::Approx(1.0 - std::exp(-1.0)).epsilon(1e-14));
    // Printed t tables: P(T <= 1.812) = 0.95 and P(T <= 2.228) = 0.975 with 10 dof.
    CHECK(std::abs(student_t_cdf(1.812, 10) - 0.95) < 5e-5);
    CHECK(std::abs(student_t_quantile(0.975, 10) - 2.228) < 5e-4);
    CHECK(std::abs(student_t_cdf(1.0, 10) - 0.82955) < 5e-6);
    CHECK_THROWS_AS(normal_quantile(0.0), DomainError);
    CHECK_THROWS_AS(normal_quantile(1.2), DomainError);
    CHECK_THROWS_AS(student_t_cdf(1.0, 0.0), DomainError);
    CHECK_THROWS_AS(f_cdf(1.0, -1, 3), DomainError);
    CHECK_THROWS_AS(chisq_cdf(1.0, 0), DomainError);
    CHECK_THROWS_AS(incomplete_beta(1, 1, 1.5), DomainError);
}

TEST_CASE("pearson") {
    const std::vector<double> x{1, 2, 3, 4, 5};
    std::vector<double> y;
    for (double v : x) y.push_back(2 * v + 1);
    CHECK(pearson(x, y).coefficient == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(pearson(x, y).p_value == 0.0);
    std::vector<double> neg;
    for (double v : x) neg.push_back(-v);
    CHECK(pearson(x, neg).coefficient == doctest::Approx(-1.0).epsilon(1e-15));
    CHECK_THROWS_AS(pearson(x, std::vector<double>{1, 1, 1, 1, 1}), ConstantSeriesError);
    CHECK_THROWS_AS(pearson(std::vector<double>{1, 2}, std::vector<double>{1, 2}), PreconditionError);
    CHECK_THROWS_AS(pearson(x, std::vector<double>{1, 2}), PreconditionError);

    const auto& o = oracle()["pearson"];
    const auto c = pearson(vec(o["x"]), vec(o["y"]));
    CHECK(close(c.coefficient, o["r"], 1e-12));
    CHECK(close(c.p_value, o["p"], 1e-12));
    CHECK(c.n == 20);
}

TEST_CASE("spearman") {
    const std::vector<double> x{1, 2, 2, 3};
    CHECK(spearman(x, std::vector<double>{10, 20, 20, 30}).coefficient == doctest::Approx(1.0));
    std::vector<double> xs, ys;
    for (int i = 0; i < 30; ++i) {
        xs.push_back(i * 0.37 - 4);
        ys.push_back(std::exp(xs.back()) + std::pow(xs.back(), 3));
    }
    CHECK(spearman(xs, ys).coefficient == doctest::Approx(1.0).epsilon(1e-15));

    const auto ranks = average_ranks(std::vector<double>{10, 30, 20, 20, 10, 10});
    CHECK(ranks == std::vector<double>{2, 6, 4.5, 4.5, 2, 2});

    const auto& o = oracle()["spearman"];
    const auto a = vec(o["x"]);
    const auto b = vec(o["y"]);
    // Brute-force ranks: 1 + count below + (count equal - 1) / 2.
    auto brute = [](const std::vector<double>& v) {
        std::vector<double> r;
        for (double p : v) {
            double below = 0, equal = 0;
            for (double q : v) {
                below += q < p;
                equal += q == p;
            }
            r.push_back(1 + below + (equal - 1) / 2);
        }
        return r;
    };
    CHECK(average_ranks(a) == brute(a));
    CHECK(average_ranks(b) == brute(b));
    const auto c = spearman(a, b);
    CHECK(close(c.coefficient, o["rho"], 1e-12));
    CHECK(close(c.p_value, o["p"], 1e-12, 1e-10));
    CHECK(close(c.coefficient, pearson(brute(a), brute(b)).coefficient, 1e-15));
}

TEST_CASE("correlation symmetry and invariance") {
    std::mt19937_64 rng(7);
    std::normal_distribution<double> normal;
    for (int trial = 0; trial < 50; ++trial) {
        std::vector<double> x(25), y(25), xa(25), ym(25);
        for (std::size_t i = 0; i < 25; ++i) {
            x[i] = normal(rng);
            y[i] = 0.5 * x[i] + normal(rng);
            xa[i] = 3.5 * x[i] - 7;
            ym[i] = std::exp(y[i]);
        }
        const double r = pearson(x, y).coefficient;
        CHECK(close(pearson(y, x).coefficient, r, 1e-14));
        CHECK(close(pearson(xa, y).coefficient, r, 1e-12));
        const double rho = spearman(x, y).coefficient;
        CHECK(spearman(y, x).coefficient == rho);
        CHECK(spearman(x, ym).coefficient == rho);
        CHECK(std::abs(r) <= 1.0);
    }
}

TEST_CASE("levene") {
    const std::vector<double> a{1, 4, 2, 8, 5};
    std::vector<double> b;
    for (double v : a) b.push_back(v + 10);
    const auto same = levene({a, b});
    REQUIRE(same.statistic);
    CHECK(*same.statistic == doctest::Approx(0.0).epsilon(1e-14));

    const auto degenerate = levene({{2, 2, 2}, {5, 5}});
    CHECK_FALSE(degenerate.statistic);
    CHECK_THROWS_AS(levene({{1, 2, 3}}), PreconditionError);
    CHECK_THROWS_AS(levene({{1, 2, 3}, {4}}), PreconditionError);

    const auto& o = oracle()["levene"];
    const auto groups = o["groups"].get<std::vector<std::vector<double>>>();
    const auto m = levene(groups);
    CHECK(close(*m.statistic, o["w_mean"], 1e-11));
    CHECK(close(*m.p_value, o["p_mean"], 1e-12));
    CHECK(m.df_between == 3);
    CHECK(m.df_within == 72);
    const auto md = levene(groups, LeveneCenter::Median);
    CHECK(close(*md.statistic, o["w_median"], 1e-11));
    CHECK(close(*md.p_value, o["p_median"], 1e-12));

    std::mt19937_64 rng(3);
    std::normal_distribution<double> n1(0, 1), n3(0, 3);
    std::vector<double> g1(200), g2(200);
    for (auto& v : g1) v = n1(rng);
    for (auto& v : g2) v = n3(rng);
    CHECK(*levene({g1, g2}).p_value < 0.01);

    int accepted = 0;
    for (int seed = 0; seed < 20; ++seed) {
        std::mt19937_64 r(100 + static_cast<unsigned>(seed));
        std::vector<std::vector<double>> gs(3, std::vector<double>(60));
        for (auto& g : gs) {
            for (auto& v : g) v = n1(r);
        }
        accepted += *levene(gs).p_value > 0.05;
    }
    CHECK(accepted >= 18);
}

TEST_CASE("jarque-bera") {
    const auto& o = oracle()["jarque_bera"];
    const auto jb = jarque_bera(vec(o["x"]));
    CHECK(close(jb.statistic, o["jb"], 1e-11));
    CHECK(close(jb.p_value, o["p"], 1e-12, 1e-10));
    CHECK(close(jb.skewness, o["skew"], 1e-12));
    CHECK(close(jb.kurtosis, o["kurtosis"], 1e-12));

    std::vector<double> two;
    for (int i = 0; i < 20; ++i) two.push_back(i % 2 ? 1.0 : -1.0);
    const auto sym = jarque_bera(two);
    CHECK(sym.skewness == 0.0);
    // K = 1 for a two-point sample, so JB = n/6 * 4/4.
    CHECK(sym.statistic == doctest::Approx(20.0 / 6.0));
    CHECK_THROWS_AS(jarque_bera(std::vector<double>{1, 2, 3}), PreconditionError);

    int normal_ok = 0;
    for (int seed = 0; seed < 100; ++seed) {
        std::mt19937_64 r(static_cast<unsigned>(seed));
        std::normal_distribution<double> n;
        std::vector<double> x(10000);
        for (auto& v : x) v = n(r);
        normal_ok += jarque_bera(x).p_value > 0.01;
    }
    CHECK(normal_ok >= 95);

    std::mt19937_64 r(5);
    std::exponential_distribution<double> e;
    std::vector<double> x(1000);
    for (auto& v : x) v = e(r);
    const auto ej = jarque_bera(x);
    CHECK(ej.statistic > 100);
    CHECK(ej.p_value < 0.001);
}

TEST_CASE("qq points") {
    const auto mid = qq_points(std::vector<double>{-2, 0, 2});
    REQUIRE(mid.size() == 3);
    CHECK(mid[1].theoretical == 0.0);
    CHECK(mid[1].sample == 0.0);
    CHECK(mid[0].sample == doctest::Approx(-1.0));
    CHECK(mid[0].theoretical == doctest::Approx(normal_quantile(0.5 / 3)));
    CHECK_THROWS_AS(qq_points(std::vector<double>{1, 2}), PreconditionError);

    std::mt19937_64 rng(9);
    std::normal_distribution<double> n;
    std::vector<double> x(10000);
    for (auto& v : x) v = n(rng);
    const auto pts = qq_points(x);
    CHECK(std::abs(pts[5000].sample - pts[5000].theoretical) < 0.1);

    // Zero-inflated counts: the lowest ordered values sit well above the normal tail.
    std::vector<double> z(2000, 0.0);
    std::geometric_distribution<int> geo(0.05);
    for (std::size_t i = 0; i < 700; ++i) z[i] = geo(rng);
    const auto zp = qq_points(z);
    CHECK(zp[10].sample > zp[10].theoretical + 1.0);
}

TEST_CASE("ols on noiseless data") {
    std::vector<double> x{0, 1, 2, 3, 4, 5, 6, 7, 8, 9};
    std::vector<double> y;
    for (double v : x) y.push_back(1 + 2 * v);
    const auto fit = ols_fit(DesignMatrixBuilder(x.size()).add("x", x).build(), y);
    CHECK(std::abs(fit.coefficients(0) - 1) < 1e-10);
    CHECK(std::abs(fit.coefficients(1) - 2) < 1e-10);
    CHECK(std::abs(fit.r2 - 1) < 1e-12);
    CHECK(fit.mse < 1e-20);
    CHECK(fit.dof == 8);
}

TEST_CASE("ols HC3 on a six-point fixture") {
    const auto& o = oracle()["hc3_small"];
    const auto x = vec(o["x"]);
    const auto y = vec(o["y"]);
    const auto fit = ols_fit(DesignMatrixBuilder(6).add("x", x).build(), y, CovarianceType::HC3);
    for (int j = 0; j < 2; ++j) {
        CHECK(close(fit.coefficients(j), o["beta"][j], 1e-12));
        CHECK(close(fit.se_hc3(j), o["se_hc3"][j], 1e-10));
        CHECK(close(fit.se_classic(j), o["se_classic"][j], 1e-10));
    }
    CHECK(fit.se(1) == fit.se_hc3(1));
    CHECK(fit.index_of("x") == 1);
    CHECK_THROWS_AS(fit.index_of("z"), NotFound);
}

TEST_CASE("ols full model matches statsmodels") {
    const auto& o = oracle()["ols_full"];
    const auto field = o["field"].get<std::vector<std::string>>();
    const auto dsi = vec(o["dsi"]);
    const auto year = vec(o["year"]);
    std::vector<double> log_a;
    for (double a : vec(o["authors"])) log_a.push_back(std::log10(a));
    const auto y = vec(o["y"]);
    const auto design = DesignMatrixBuilder(y.size())
                            .add_categorical("Field", field)
                            .add("DSI", dsi)
                            .add("Pubyear", year)
                            .add("logA", log_a)
                            .build();
    CHECK(design.names[1] == "Field[T.HSS]");
    for (auto cov : {CovarianceType::Classic, CovarianceType::HC3}) {
        const auto& ref = o[std::string(to_string(cov))];
        const auto fit = ols_fit(design, y, cov);
        INFO(to_string(cov));
        for (std::size_t j = 0; j < design.n_cols(); ++j) {
            const auto k = static_cast<Eigen::Index>(j);
            CHECK(close(fit.coefficients(k), ref["params"][j], 1e-9, 1e-9));
            CHECK(close(fit.se(j), ref["bse"][j], 1e-10, 1e-8));
            CHECK(close(fit.t_stats(k), ref["tvalues"][j], 1e-8, 1e-8));
            CHECK(close(fit.p_values(k), ref["pvalues"][j], 1e-10, 1e-8));
            CHECK(close(fit.ci99[j].first, ref["ci_lo"][j], 1e-9, 1e-8));
            CHECK(close(fit.ci99[j].second, ref["ci_hi"][j], 1e-9, 1e-8));
        }
        CHECK(close(fit.r2, ref["r2"], 1e-12));
        CHECK(close(fit.adj_r2, ref["adj_r2"], 1e-12));
        CHECK(close(fit.f_stat, ref["f"], 1e-9, 1e-9));
        CHECK(close(fit.f_p, ref["f_p"], 1e-12, 1e-8));
        CHECK(close(fit.mse, ref["mse"], 1e-12, 1e-10));
        CHECK(close(fit.jarque_bera.statistic, ref["jb"], 1e-9, 1e-9));
        CHECK(close(fit.jarque_bera.p_value, ref["jb_p"], 1e-12, 1e-8));
        CHECK(fit.adj_r2 <= fit.r2);
    }
}

TEST_CASE("ols invariants") {
    std::mt19937_64 rng(11);
    std::normal_distribution<double> n;
    const std::size_t rows = 200;
    std::vector<double> a(rows), b(rows), y(rows);
    std::vector<std::string> level(rows);
    const char* names[] = {"c", "a", "b"};
    for (std::size_t i = 0; i < rows; ++i) {
        a[i] = 50 + 10 * n(rng);
        b[i] = n(rng);
        level[i] = names[i % 3];
        y[i] = 0.3 * a[i] - b[i] + (level[i] == "b" ? 2 : 0) + n(rng);
    }
    const auto design = DesignMatrixBuilder(rows).add_categorical("L", level).add("a", a).add("b", b).build();
    CHECK(design.names == std::vector<std::string>{"Intercept", "L[T.b]", "L[T.c]", "a", "b"});
    const auto fit = ols_fit(design, y);
    const Eigen::VectorXd xte = design.values.transpose() * fit.residuals;
    CHECK(xte.cwiseAbs().maxCoeff() < 1e-8 * design.values.cwiseAbs().maxCoeff() * static_cast<double>(rows));
    std::vector<double> fitted(fit.fitted.data(), fit.fitted.data() + rows);
    const double r = pearson(fitted, y).coefficient;
    CHECK(std::abs(fit.r2 - r * r) < 1e-10);

    const auto za = standardize(a);
    const auto zfit = ols_fit(DesignMatrixBuilder(rows).add_categorical("L", level).add("a", za).add("b", b).build(), y);
    const double sd_a = sample_sd(a);
    CHECK(std::abs(zfit.coefficients(3) - fit.coefficients(3) * sd_a) < 1e-9);
    for (Eigen::Index j = 1; j < 5; ++j) {
        CHECK(std::abs(zfit.t_stats(j) - fit.t_stats(j)) < 1e-9);
        CHECK(std::abs(zfit.p_values(j) - fit.p_values(j)) < 1e-9);
    }
    CHECK(std::abs(zfit.r2 - fit.r2) < 1e-9);
    CHECK(std::abs(zfit.f_stat - fit.f_stat) < 1e-9);

    for (std::size_t j = 0; j < 5; ++j) {
        const auto [lo, hi] = fit.ci99[j];
        CHECK(std::abs((lo + hi) / 2 - fit.coefficients(static_cast<Eigen::Index>(j))) < 1e-12);
    }
}

TEST_CASE("ols rank deficiency and preconditions") {
    const std::vector<double> a{1, 2, 3, 4, 5, 6};
    const std::vector<double> twice{2, 4, 6, 8, 10, 12};
    const std::vector<double> y{1, 3, 2, 5, 4, 6};
    try {
        ols_fit(DesignMatrixBuilder(6).add("a", a).add("twice", twice).build(), y);
        FAIL("expected RankError");
    } catch (const RankError& e) {
        const std::string what = e.what();
        CHECK((what.find("twice") != std::string::npos || what.find("a") != std::string::npos));
    }
    CHECK_THROWS_AS(ols_fit(DesignMatrixBuilder(6).add("a", a).build(), std::vector<double>{1, 2}), PreconditionError);
    CHECK_THROWS_AS(DesignMatrixBuilder(6).add("short", std::vector<double>{1}), PreconditionError);
    CHECK_THROWS_AS(ols_fit(DesignMatrixBuilder(2).add("a", std::vector<double>{1, 2}).build(),
                            std::vector<double>{1, 2}),
                    PreconditionError);
}

TEST_CASE("HC3 agrees with classic errors under homoskedasticity") {
    std::mt19937_64 rng(21);
    std::normal_distribution<double> n;
    const std::size_t rows = 1000;
    std::vector<double> a(rows), y(rows);
    for (std::size_t i = 0; i < rows; ++i) {
        a[i] = n(rng);
        y[i] = 1 + 0.5 * a[i] + n(rng);
    }
    const auto fit = ols_fit(DesignMatrixBuilder(rows).add("a", a).build(), y, CovarianceType::HC3);
    for (Eigen::Index j = 0; j < 2; ++j) {
        const double ratio = fit.se_hc3(j) / fit.se_classic(j);
        CHECK(ratio > 0.8);
        CHECK(ratio < 1.25);
    }
}

TEST_CASE("grouped correlation") {
    CHECK(parse_bin("3-5").hi == 5.0);
    CHECK_FALSE(parse_bin("11+").hi);
    CHECK(parse_bin("2").lo == 2.0);
    CHECK_THROWS_AS(parse_bin("5-3"), ConfigError);
    CHECK_THROWS_AS(parse_bin("x"), ConfigError);

    std::vector<double> dsi, authors;
    Target cit{"cit5", {}};
    std::mt19937_64 rng(2);
    std::uniform_real_distribution<double> u(0.6, 0.9);
    for (int i = 0; i < 120; ++i) {
        dsi.push_back(u(rng));
        authors.push_back(1 + i % 15);
        cit.values.emplace_back(dsi.back());
    }
    cit.values[4].reset();
    std::vector<Bin> bins;
    for (const char* s : {"1", "2", "3-5", "6-10", "11+", "40-50"}) bins.push_back(parse_bin(s));
    const auto report = grouped_correlation(dsi, authors, {cit}, bins, CorrelationMethod::Spearman);
    REQUIRE(report.rows.size() == 6);
    for (std::size_t b = 0; b < 5; ++b) CHECK(*report.rows[b].coefficient == doctest::Approx(1.0));
    CHECK(report.rows[0].n == 8);
    CHECK(report.rows[4].n == 40);
    CHECK(report.rows[5].n == 0);
    CHECK_FALSE(report.rows[5].coefficient);
    CHECK(report.uncovered == 0);
    CHECK(to_csv(report).starts_with("group,target,n,coefficient,p_value,method\n1,cit5,8,"));
    CHECK(to_csv(report).find("40-50,cit5,0,,,spearman\n") != std::string::npos);
    CHECK_THROWS_AS(grouped_correlation(dsi, authors, {cit}, {}, CorrelationMethod::Spearman), PreconditionError);

    const auto& t = oracle()["year_tally"];
    const auto years = vec(t["years"]);
    std::vector<Bin> ranges;
    for (const auto& r : t["ranges"]) ranges.push_back(parse_bin(r.get<std::string>()));
    Target same{"y", {}};
    for (double v : years) same.values.emplace_back(v);
    const auto yr = grouped_correlation(years, years, {same}, ranges, CorrelationMethod::Pearson);
    for (std::size_t b = 0; b < ranges.size(); ++b) CHECK(yr.rows[b].n == t["counts"][b].get<std::size_t>());
    CHECK(yr.uncovered == 0);
}
