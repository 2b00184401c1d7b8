import csv
import json
import xml.etree.ElementTree as ET

import numpy as np
import pytest

from kcswitch.cli import main, read_config_file, UsageError
from kcswitch.corpus import Chart, Corpus, save_corpus
from kcswitch.synthetic import make_song, separable_corpus

SVG_NS = "{http://www.w3.org/2000/svg}"


@pytest.fixture
def data(tmp_path):
    hot = tmp_path / "hot100.csv"
    glob = tmp_path / "global200.csv"
    save_corpus(separable_corpus(60, seed=1), hot)
    save_corpus(separable_corpus(60, seed=2, chart=Chart.GLOBAL200), glob)
    return tmp_path, hot, glob


def run(*argv):
    return main([str(a) for a in argv])


def test_features_command(data):
    tmp, hot, glob = data
    assert run("features", "--hot100", hot, "--global200", glob, "--out", tmp / "o") == 0
    with open(tmp / "o" / "features_hot100.csv", encoding="utf-8") as fh:
        rows = list(csv.DictReader(fh))
    assert len(rows) == 60
    assert {"kor_ratio", "code_switch_count"} <= set(rows[0])


def test_missing_file_exit_2(tmp_path, capsys):
    assert run("features", "--hot100", tmp_path / "nope.csv", "--out", tmp_path) == 2
    assert "not found" in capsys.readouterr().err


def test_bad_flags_exit_2(data):
    tmp, hot, _ = data
    assert run("features") == 2
    assert run("nonsense") == 2
    assert run("stats", "--hot100", hot, "--alpha", "2") == 2
    assert run("bigrams", "--hot100", hot, "--k", "0", "--out", tmp / "o") == 2


def test_classify_needs_embeddings(data):
    tmp, hot, _ = data
    assert run("classify", "--hot100", hot, "--mode", "with-embeddings", "--out", tmp / "o") == 2


def test_classify_separable_report(data):
    tmp, hot, glob = data
    assert run("classify", "--hot100", hot, "--global200", glob, "--out", tmp / "o") == 0
    report = json.loads((tmp / "o" / "classify_hot100.json").read_text())
    assert report["classifiers"]["logreg"]["macro_f1"] == 1.0
    assert set(report["classifiers"]) == {"logreg", "knn", "voting"}
    assert (tmp / "o" / "classify_summary.csv").read_text().count("\n") == 7


def test_classify_with_embeddings(data):
    tmp, hot, _ = data
    rng = np.random.default_rng(0)
    emb = tmp / "emb.csv"
    lines = ["title,artist," + ",".join(f"v{i}" for i in range(8))]
    for s in separable_corpus(60, seed=1).songs:
        lines.append(f"{s.title},{s.artist}," + ",".join(f"{v:.5f}" for v in rng.normal(size=8)))
    emb.write_text("\n".join(lines) + "\n")
    code = run("classify", "--hot100", hot, "--mode", "with-embeddings", "--embeddings", emb,
               "--out", tmp / "o")
    assert code == 0
    report = json.loads((tmp / "o" / "classify_hot100.json").read_text())
    assert report["design_width"] == 8 + 6


def test_join_error_exit_2(data):
    tmp, hot, _ = data
    emb = tmp / "emb.csv"
    emb.write_text("title,artist,v0\nsong 000,artist 0,1.0\n")
    code = run("classify", "--hot100", hot, "--mode", "with-embeddings", "--embeddings", emb,
               "--out", tmp / "o")
    assert code == 2


def test_stats_outputs(data):
    tmp, hot, glob = data
    assert run("stats", "--hot100", hot, "--global200", glob, "--out", tmp / "o") == 0
    out = tmp / "o"
    rows = json.loads((out / "comparisons.json").read_text())["rows"]
    assert len(rows) == 6
    for row in rows:
        assert row["conclusion"] in ("Significant", "Not significant")
        expected = "Welch" if row["normality"] == "Normal" else "Mann-Whitney"
        assert row["decisive_test"] == expected
    means = list(csv.reader(open(out / "group_means.csv", encoding="utf-8")))
    assert len(means) == 1 + 4


def test_svg_one_bar_per_cell(data):
    tmp, hot, glob = data
    run("stats", "--hot100", hot, "--global200", glob, "--out", tmp / "o")
    root = ET.parse(tmp / "o" / "korean_ratio_by_group.svg").getroot()
    assert root.tag == SVG_NS + "svg" and root.get("version") == "1.1"
    bars = [r for r in root.iter(SVG_NS + "rect") if r.get("class") == "bar"]
    assert len(bars) == 4 * 2
    cells = {(b.get("data-group"), b.get("data-series")) for b in bars}
    assert len(cells) == 8
    for b in bars:
        assert float(b.get("height")) >= 0


def test_insufficient_data_rows(data):
    tmp, hot, _ = data
    assert run("stats", "--hot100", hot, "--out", tmp / "o") == 0
    rows = json.loads((tmp / "o" / "comparisons.json").read_text())["rows"]
    flagged = [r for r in rows if r["conclusion"] == "insufficient data"]
    assert len(flagged) == 4  # everything touching Global 200
    assert all(r["note"] for r in flagged)
    assert "insufficient data" in (tmp / "o" / "comparisons.txt").read_text()


def test_bigrams(tmp_path):
    path = tmp_path / "one.csv"
    save_corpus(Corpus((make_song("t", "I know I know"),)), path)
    assert run("bigrams", "--hot100", path, "--k", 3, "--out", tmp_path / "o") == 0
    first = (tmp_path / "o" / "bigrams_hot100_F_group.csv").read_text().splitlines()[1]
    assert first == "I know,2"
    assert (tmp_path / "o" / "bigrams_hot100_M_solo.csv").read_bytes() == b""


def test_config_file_and_override(data):
    tmp, hot, _ = data
    conf = tmp / "run.conf"
    conf.write_text("# defaults\nhot100 = hot100.csv\nout = from_file\nk = 2\n")
    assert run("bigrams", "--config", conf) == 0
    text = (tmp / "from_file" / "bigrams_hot100_F_group.csv").read_text()
    assert text.count("\n") == 3
    assert run("bigrams", "--config", conf, "--k", 5, "--out", tmp / "cli") == 0
    assert (tmp / "cli" / "bigrams_hot100_F_group.csv").read_text().count("\n") == 6


def test_config_file_rejects_unknown_key(tmp_path):
    conf = tmp_path / "bad.conf"
    conf.write_text("colour = blue\n")
    with pytest.raises(UsageError):
        read_config_file(conf)
    assert run("features", "--config", conf) == 2


def test_global_flag_before_subcommand(data):
    tmp, hot, _ = data
    assert run("--hot100", hot, "features", "--out", tmp / "a") == 0
    assert (tmp / "a" / "features_hot100.csv").exists()


def test_malformed_corpus_exit_2(tmp_path, capsys):
    path = tmp_path / "bad.csv"
    path.write_text("Title,Artist\nx,y\n", encoding="utf-8")
    assert run("features", "--hot100", path, "--out", tmp_path) == 2
    assert "Peak Position" in capsys.readouterr().err


def test_analysis_failure_exit_1(tmp_path):
    songs = [make_song(f"s{i}", "love you") for i in range(4)]
    path = tmp_path / "tiny.csv"
    save_corpus(Corpus(tuple(songs)), path)
    assert run("classify", "--hot100", path, "--out", tmp_path / "o") == 1
