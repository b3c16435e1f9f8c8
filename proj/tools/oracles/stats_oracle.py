#!/usr/bin/env python3
"""Freeze reference values for the stats unit tests.

Distribution functions are evaluated with mpmath at 50 digits. Tests use
scipy / statsmodels where those are the de-facto reference, and explicit
mpmath matrix algebra for the small HC3 sandwich.

Usage: stats_oracle.py <out.json>
"""
import json
import sys

import mpmath as mp
import numpy as np
import scipy.stats as ss
import statsmodels.api as sm

mp.mp.dps = 50


def f(x):
    return float(x)


def t_cdf(t, v):
    t, v = mp.mpf(t), mp.mpf(v)
    x = v / (v + t * t)
    tail = mp.betainc(v / 2, mp.mpf(1) / 2, 0, x, regularized=True) / 2
    return 1 - tail if t > 0 else tail


def f_cdf(x, d1, d2):
    x, d1, d2 = mp.mpf(x), mp.mpf(d1), mp.mpf(d2)
    return mp.betainc(d1 / 2, d2 / 2, 0, d1 * x / (d1 * x + d2), regularized=True)


def f_sf(x, d1, d2):
    x, d1, d2 = mp.mpf(x), mp.mpf(d1), mp.mpf(d2)
    return mp.betainc(d2 / 2, d1 / 2, 0, d2 / (d1 * x + d2), regularized=True)


def distributions():
    out = {"t_cdf": [], "t_two": [], "t_quantile": [], "f_cdf": [], "f_sf": [], "chisq_cdf": [],
           "chisq_sf": [], "normal_cdf": [], "normal_quantile": [], "ibeta": [], "gamma_p": []}
    for t in [-40.0, -6.5, -2.0, -0.3, 0.0, 0.7, 1.0, 2.228, 3.5, 12.0]:
        for v in [1, 2, 3.5, 10, 30, 250, 5000]:
            out["t_cdf"].append([t, v, f(t_cdf(t, v))])
            out["t_two"].append([t, v, f(2 * t_cdf(-abs(t), v))])
    for p in [1e-6, 0.001, 0.025, 0.3, 0.5, 0.8, 0.975, 0.995, 0.999999]:
        for v in [1, 3, 10, 47, 1000]:
            q = mp.findroot(lambda t: t_cdf(t, v) - p, f(ss.t.ppf(p, v)))
            out["t_quantile"].append([p, v, f(q)])
    for x in [0.01, 0.5, 1.0, 2.7, 9.0, 162.3, 500.0]:
        for d1, d2 in [(1, 1), (2, 10), (4, 400), (9, 51188), (13, 3000)]:
            out["f_cdf"].append([x, d1, d2, f(f_cdf(x, d1, d2))])
            out["f_sf"].append([x, d1, d2, f(f_sf(x, d1, d2))])
    for x in [0.001, 0.5, 2.0, 5.99, 40.0, 900.0]:
        for k in [1, 2, 3, 7.5, 100]:
            cdf = mp.gammainc(mp.mpf(k) / 2, 0, mp.mpf(x) / 2, regularized=True)
            out["chisq_cdf"].append([x, k, f(cdf)])
            out["chisq_sf"].append([x, k, f(mp.gammainc(mp.mpf(k) / 2, mp.mpf(x) / 2, mp.inf, regularized=True))])
    for x in [-30.0, -8.0, -1.96, -0.5, 0.0, 0.25, 1.0, 3.0, 9.0]:
        out["normal_cdf"].append([x, f(mp.ncdf(x))])
    for p in [1e-300, 1e-20, 1e-8, 0.001, 0.02425, 0.1, 0.5, 0.6, 0.975, 0.97575, 0.999, 1 - 1e-12]:
        q = mp.findroot(lambda z: mp.ncdf(z) - p, float(ss.norm.ppf(p)))
        out["normal_quantile"].append([p, f(q)])
    for a, b, x in [(0.5, 0.5, 0.3), (2, 3, 0.4), (10, 0.5, 0.99), (0.1, 20, 0.001), (50, 60, 0.45), (1, 1, 0.77)]:
        out["ibeta"].append([a, b, x, f(mp.betainc(a, b, 0, x, regularized=True))])
    for a, x in [(0.5, 0.1), (1, 1), (3, 2.5), (10, 15), (0.01, 3), (100, 90)]:
        out["gamma_p"].append([a, x, f(mp.gammainc(a, 0, x, regularized=True))])
    return out


def pearson_fixture(rng):
    x = rng.normal(size=20).round(6)
    y = (0.6 * x + rng.normal(size=20)).round(6)
    xm = [mp.mpf(float(v)) for v in x]
    ym = [mp.mpf(float(v)) for v in y]
    mx, my = sum(xm) / 20, sum(ym) / 20
    sxy = sum((a - mx) * (b - my) for a, b in zip(xm, ym))
    sxx = sum((a - mx) ** 2 for a in xm)
    syy = sum((b - my) ** 2 for b in ym)
    r = sxy / mp.sqrt(sxx * syy)
    t = r * mp.sqrt(18 / (1 - r * r))
    p = 2 * t_cdf(-abs(t), 18)
    return {"x": x.tolist(), "y": y.tolist(), "r": f(r), "p": f(p)}


def spearman_fixture(rng):
    x = rng.integers(0, 6, size=40).astype(float)
    y = (x + rng.integers(0, 4, size=40)).astype(float)
    y[::7] = 3.0
    rho, p = ss.spearmanr(x, y)
    return {"x": x.tolist(), "y": y.tolist(), "rho": f(rho), "p": f(p)}


def levene_fixture(rng):
    groups = [rng.normal(0, s, size=n).round(5).tolist() for s, n in [(1, 15), (2, 22), (1.5, 9), (3, 30)]]
    w, p = ss.levene(*groups, center="mean")
    wm, pm = ss.levene(*groups, center="median")
    return {"groups": groups, "w_mean": f(w), "p_mean": f(p), "w_median": f(wm), "p_median": f(pm)}


def jb_fixture(rng):
    x = rng.gamma(2.0, size=60).round(6)
    jb = ss.jarque_bera(x)
    return {"x": x.tolist(), "jb": f(jb.statistic), "p": f(jb.pvalue),
            "skew": f(ss.skew(x)), "kurtosis": f(ss.kurtosis(x, fisher=False))}


def hc3_small():
    x = [[1, 1.0], [1, 2.0], [1, 4.0], [1, 5.0], [1, 7.0], [1, 11.0]]
    y = [2.1, 3.9, 9.2, 9.8, 16.5, 21.0]
    X = mp.matrix(x)
    Y = mp.matrix(y)
    xtx_inv = (X.T * X) ** -1
    beta = xtx_inv * X.T * Y
    e = Y - X * beta
    H = X * xtx_inv * X.T
    meat = mp.zeros(2, 2)
    for i in range(6):
        w = (e[i] / (1 - H[i, i])) ** 2
        row = X[i, :]
        meat += w * (row.T * row)
    cov = xtx_inv * meat * xtx_inv
    sse = sum(v * v for v in e)
    cov_classic = xtx_inv * (sse / 4)
    return {"x": [r[1] for r in x], "y": y,
            "beta": [f(beta[0]), f(beta[1])],
            "se_hc3": [f(mp.sqrt(cov[0, 0])), f(mp.sqrt(cov[1, 1]))],
            "se_classic": [f(mp.sqrt(cov_classic[0, 0])), f(mp.sqrt(cov_classic[1, 1]))]}


def statsmodels_fixture(rng):
    n = 80
    fields = rng.choice(["HSS", "LSB", "NSE", "PSE", "AH"], size=n)
    dsi = rng.normal(0.8, 0.03, size=n).round(6)
    year = rng.integers(1994, 2021, size=n).astype(float)
    authors = rng.integers(1, 30, size=n).astype(float)
    effect = {"AH": 0.0, "HSS": 0.1, "LSB": 0.3, "NSE": 0.2, "PSE": 0.25}
    y = (1.0 + 3 * (dsi - 0.8) + np.array([effect[v] for v in fields]) - 0.01 * (year - 2000)
         + 0.4 * np.log10(authors) + rng.standard_t(4, size=n) * 0.3).round(6)
    import pandas as pd
    df = pd.DataFrame({"y": y, "DSI": dsi, "Field": fields, "Pubyear": year, "logA": np.log10(authors)})
    import statsmodels.formula.api as smf
    out = {"field": fields.tolist(), "dsi": dsi.tolist(), "year": year.tolist(),
           "authors": authors.tolist(), "y": y.tolist()}
    for cov in ["nonrobust", "HC3"]:
        m = smf.ols("y ~ C(Field) + DSI + Pubyear + logA", data=df).fit(cov_type=cov, use_t=True)
        names = list(m.params.index)
        ci = m.conf_int(alpha=0.01)
        jb = sm.stats.stattools.jarque_bera(m.resid)
        out[cov] = {"names": names, "params": m.params.tolist(), "bse": m.bse.tolist(),
                    "pvalues": m.pvalues.tolist(), "tvalues": m.tvalues.tolist(),
                    "ci_lo": ci[0].tolist(), "ci_hi": ci[1].tolist(),
                    "r2": f(m.rsquared), "adj_r2": f(m.rsquared_adj), "f": f(m.fvalue), "f_p": f(m.f_pvalue),
                    "mse": f(m.mse_resid), "jb": f(jb[0]), "jb_p": f(jb[1])}
    return out


def quantile_fixture(rng):
    x = rng.normal(size=23).round(4)
    qs = [0.0, 0.1, 0.25, 0.5, 0.75, 0.9, 1.0]
    return {"x": x.tolist(), "q": qs, "values": [f(np.quantile(x, q)) for q in qs],
            "median": f(np.median(x)), "sd": f(np.std(x, ddof=1))}


def year_tally(rng):
    years = rng.integers(1994, 2026, size=500).tolist()
    ranges = [(1994, 1999), (2000, 2005), (2006, 2011), (2012, 2017), (2018, 2023), (2024, 2025)]
    counts = [sum(lo <= y <= hi for y in years) for lo, hi in ranges]
    return {"years": years, "ranges": [f"{lo}-{hi}" for lo, hi in ranges], "counts": counts}


def main():
    rng = np.random.default_rng(20240607)
    out = {
        "distributions": distributions(),
        "pearson": pearson_fixture(rng),
        "spearman": spearman_fixture(rng),
        "levene": levene_fixture(rng),
        "jarque_bera": jb_fixture(rng),
        "hc3_small": hc3_small(),
        "ols_full": statsmodels_fixture(rng),
        "quantiles": quantile_fixture(rng),
        "year_tally": year_tally(rng),
    }
    with open(sys.argv[1], "w", encoding="utf-8") as fh:
        json.dump(out, fh, indent=1)
        fh.write("\n")


if __name__ == "__main__":
    main()
