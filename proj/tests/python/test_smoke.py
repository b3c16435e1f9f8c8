import json
import math
import os
from pathlib import Path

import numpy as np
import pytest

import scidsi

DATA = Path(os.environ.get("SCIDSI_DATA_DIR", Path(__file__).resolve().parents[2] / "data"))
VOCAB = DATA / "vocab" / "cased_fixture_vocab.txt"

TITLE_IDS = [101, 18447, 15841, 3304, 11062, 1107, 3608, 1699, 1115, 1132, 4405, 1118, 25958,
             8983, 170, 3987, 1200, 174, 8508, 22192, 1566, 181, 26312, 1179, 16812, 102]


def test_version():
    assert scidsi.__version__ == "0.3.0"


def test_tokenize_worked_title():
    vocab = scidsi.Vocabulary.load(VOCAB)
    assert len(vocab) == 28996
    title = ("Multi­aged forest fragments in Atlantic France that are surrounded by meadows "
             "retain a richer epiphyte lichen flora")
    out = scidsi.tokenize(title, vocab)
    assert out["ids"] == TITLE_IDS
    assert out["tokens"][1:3] == ["Multi", "##aged"]


def test_dsi_matches_numpy():
    rng = np.random.default_rng(3)
    doc = [{6: rng.normal(size=(rng.integers(1, 6), 8)).astype(np.float32),
            7: rng.normal(size=(rng.integers(1, 6), 8)).astype(np.float32)} for _ in range(5)]
    for sentence in doc:
        n = min(m.shape[0] for m in sentence.values())
        for k in sentence:
            sentence[k] = sentence[k][:n]
    pooled = {k: [s[k].astype(np.float64).mean(axis=0) for s in doc] for k in (6, 7)}
    dists = []
    for i in range(5):
        for j in range(i + 1, 5):
            for a in (6, 7):
                for b in (6, 7):
                    u, v = pooled[a][i], pooled[b][j]
                    dists.append(1 - u @ v / (np.linalg.norm(u) * np.linalg.norm(v)))
    got = scidsi.dsi(doc)
    assert got["n_distances"] == 40
    assert got["dsi"] == pytest.approx(np.mean(dists), abs=1e-9)
    assert scidsi.dsi(doc, backend="reference")["dsi"] == pytest.approx(got["dsi"], abs=1e-12)


def test_dsi_errors_are_typed():
    doc = [{6: np.ones((2, 4), np.float32), 7: np.ones((2, 4), np.float32)}]
    with pytest.raises(scidsi.ScidsiError, match="DocumentTooShort"):
        scidsi.dsi(doc)


def test_stats_against_scipy():
    stats = pytest.importorskip("scipy.stats")
    rng = np.random.default_rng(8)
    x = rng.normal(size=40)
    y = 0.5 * x + rng.normal(size=40)
    r, p = scidsi.pearson(x.tolist(), y.tolist())
    ref = stats.pearsonr(x, y)
    assert r == pytest.approx(ref[0], abs=1e-12)
    assert p == pytest.approx(ref[1], rel=1e-9)
    rho, _ = scidsi.spearman(x.tolist(), y.tolist())
    assert rho == pytest.approx(stats.spearmanr(x, y)[0], abs=1e-12)
    groups = [rng.normal(size=15).tolist(), (2 * rng.normal(size=12)).tolist()]
    w, pw = scidsi.levene(groups, "median")
    ref = stats.levene(*groups, center="median")
    assert w == pytest.approx(ref.statistic, rel=1e-10)
    assert pw == pytest.approx(ref.pvalue, rel=1e-9)
    assert scidsi.effect_percent(0.0259) == pytest.approx(6.14, abs=0.05)


def test_ols_noiseless():
    x = [float(i) for i in range(12)]
    y = [3.0 - 0.5 * v for v in x]
    fit = scidsi.ols([("x", x)], y)
    assert fit["names"] == ["Intercept", "x"]
    assert fit["beta"][0] == pytest.approx(3.0, abs=1e-10)
    assert fit["beta"][1] == pytest.approx(-0.5, abs=1e-10)


def test_pipeline_stages(tmp_path):
    corpus = tmp_path / "corpus.jsonl"
    corpus.write_text(scidsi.synthetic_corpus_jsonl(120, seed=2, field_map=DATA / "field_map.v1.csv"))
    config = tmp_path / "config.json"
    config.write_text(json.dumps({
        "corpus": {"path": "corpus.jsonl"},
        "seed": 2,
        "segmenter": {"min_subject_docs": 5},
        "provider": {"kind": "synthetic", "hidden_dim": 16},
        "output_dir": "out",
    }))
    for stage in ("ingest", "train-segmenter", "segment", "dsi", "analyze"):
        result = scidsi.run_stage(config, stage)
        assert result["status"] == "ok", result
    manifest = json.loads((tmp_path / "out" / "manifest.json").read_text())
    assert [s["name"] for s in manifest["stages"]] == ["ingest", "train-segmenter", "segment", "dsi", "analyze"]
    table2 = (tmp_path / "out" / "analysis" / "table2.csv").read_text().splitlines()
    assert table2[0] == "field,n,min,q1,median,mean,q3,max,range,sd"
    assert not (tmp_path / "out" / ".lock").exists()


def test_unknown_config_key(tmp_path):
    config = tmp_path / "config.json"
    config.write_text(json.dumps({"corpus": {"path": "x"}, "provider": {"hidden_dim": 4}, "extra": 1}))
    with pytest.raises(scidsi.ScidsiError, match="unknown config key: extra"):
        scidsi.run_stage(config, "ingest")
