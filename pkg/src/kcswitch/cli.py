"""Command-line entry point: ``kcswitch {features,stats,classify,bigrams}``.

Exit codes: 0 success, 1 analysis failure, 2 usage or input failure.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass, replace
from pathlib import Path

from kcswitch import __version__
from kcswitch.classify import (ClassifyError, EmbeddingFormatError, ExperimentConfig, JoinError,
                               Mode, load_embeddings, run_experiment)
from kcswitch.corpus import Category, Chart, Corpus, CorpusError, Gender, filter_corpus, load_corpus
from kcswitch.features import (DEFAULT_CONFIG, FEATURE_NAMES, FeatureConfig, extract_all,
                               feature_table_csv, load_lexicon, top_bigrams)
from kcswitch.output import atomic_write, csv_text, grouped_bar_svg, text_table
from kcswitch.stats import (ALPHA, EXACT_U_MAX, STANDARD_COMPARISONS, StatsError, compare_groups,
                            group_means)

EXIT_OK, EXIT_ANALYSIS, EXIT_USAGE = 0, 1, 2

CHART_SLUG = {Chart.HOT100: "hot100", Chart.GLOBAL200: "global200"}
CHART_TITLE = {Chart.HOT100: "Hot 100", Chart.GLOBAL200: "Global 200"}


class UsageError(Exception):
    pass


@dataclass
class RunConfig:
    hot100: Path | None = None
    global200: Path | None = None
    embeddings: Path | None = None
    out: Path = Path("out")
    seed: int = 0
    alpha: float = ALPHA
    reclean: bool = False
    exact_u_max: int = EXACT_U_MAX
    filler_lexicon: Path | None = None
    mode: str = Mode.FEATURES_ONLY.value
    classifiers: tuple = ("logreg", "knn", "voting")
    chart: str | None = None
    k: int = 20

    def validate(self):
        if not 0.0 < self.alpha < 1.0:
            raise UsageError(f"--alpha must lie in (0, 1), got {self.alpha}")
        if self.hot100 is None and self.global200 is None:
            raise UsageError("at least one of --hot100 / --global200 is required")


# ---------------------------------------------------------------- config file

_PATH_KEYS = {"hot100", "global200", "embeddings", "out", "filler_lexicon"}
_BOOL_KEYS = {"reclean"}
_INT_KEYS = {"seed", "exact_u_max", "k"}
_FLOAT_KEYS = {"alpha"}


def _coerce(key, value, base: Path | None = None):
    if key in _PATH_KEYS:
        p = Path(value)
        return p if p.is_absolute() or base is None else base / p
    if key in _BOOL_KEYS:
        if isinstance(value, bool):
            return value
        low = str(value).strip().lower()
        if low not in {"1", "0", "true", "false", "yes", "no", "on", "off"}:
            raise UsageError(f"{key}: expected a boolean, got {value!r}")
        return low in {"1", "true", "yes", "on"}
    try:
        if key in _INT_KEYS:
            return int(value)
        if key in _FLOAT_KEYS:
            return float(value)
    except ValueError:
        raise UsageError(f"{key}: cannot parse {value!r}") from None
    if key == "classifiers" and isinstance(value, str):
        return tuple(v.strip() for v in value.split(",") if v.strip())
    return value


def read_config_file(path) -> dict:
    """Parse ``key = value`` lines; ``#`` starts a comment. Paths are taken
    relative to the file's directory."""
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise UsageError(f"cannot read config file {path}: {exc.strerror}") from None
    known = set(RunConfig.__dataclass_fields__)
    values = {}
    for no, line in enumerate(text.splitlines(), start=1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise UsageError(f"{path}:{no}: expected key = value")
        key, value = (part.strip() for part in line.split("=", 1))
        key = key.replace("-", "_").lower()
        if key not in known:
            raise UsageError(f"{path}:{no}: unknown key {key!r}")
        values[key] = _coerce(key, value, path.parent)
    return values


# -------------------------------------------------------------------- helpers

def _load_corpora(cfg: RunConfig) -> dict[Chart, Corpus]:
    corpora = {}
    for chart, path in ((Chart.HOT100, cfg.hot100), (Chart.GLOBAL200, cfg.global200)):
        if path is None:
            continue
        if not Path(path).is_file():
            raise UsageError(f"input file not found: {path}")
        corpora[chart] = load_corpus(path, chart, reclean=cfg.reclean)
    if cfg.chart is not None:
        wanted = Chart.parse(cfg.chart)
        if wanted not in corpora:
            raise UsageError(f"--chart {cfg.chart}: no input file for that chart")
        corpora = {wanted: corpora[wanted]}
    return corpora


def _feature_config(cfg: RunConfig) -> FeatureConfig:
    if cfg.filler_lexicon is None:
        return DEFAULT_CONFIG
    try:
        return replace(DEFAULT_CONFIG, fillers=load_lexicon(cfg.filler_lexicon))
    except OSError as exc:
        raise UsageError(f"cannot read filler lexicon {cfg.filler_lexicon}: {exc.strerror}") from None


def _num(value, digits=4):
    return f"{value:.{digits}f}"


# ------------------------------------------------------------------- commands

def cmd_features(cfg: RunConfig) -> list[Path]:
    fcfg = _feature_config(cfg)
    written = []
    for chart, corpus in _load_corpora(cfg).items():
        vectors = extract_all(corpus, fcfg)
        written.append(atomic_write(cfg.out / f"features_{CHART_SLUG[chart]}.csv",
                                    feature_table_csv(corpus, vectors)))
    return written


_MEANS_HEADER = ("chart", "gender", "n") + FEATURE_NAMES
_CMP_HEADER = ("feature", "comparison", "group_a", "group_b", "n_a", "n_b", "mean_a", "mean_b",
               "means", "t_statistic", "welch_df", "t_test_p", "u_statistic", "u_test_p",
               "u_exact", "shapiro_p_a", "shapiro_p_b", "normality", "decisive_test",
               "conclusion")
_BAR_GROUPS = (("Boy groups", Gender.M, Category.GROUP), ("Girl groups", Gender.F, Category.GROUP),
               ("Male solo", Gender.M, Category.SOLO), ("Female solo", Gender.F, Category.SOLO))


def _comparison_row(spec, result):
    if isinstance(result, str):
        return {"feature": spec.feature_label, "comparison": spec.comparison,
                "group_a": spec.group_labels[0], "group_b": spec.group_labels[1],
                "conclusion": "insufficient data", "note": result}
    digits = 3 if spec.feature == "kor_ratio" and spec.group_labels[0] == "Hot 100" else 2
    shapiro = [r.p_value if r is not None else None for r in result.normality]
    return {
        "feature": spec.feature_label,
        "comparison": spec.comparison,
        "group_a": spec.group_labels[0],
        "group_b": spec.group_labels[1],
        "n_a": result.n[0],
        "n_b": result.n[1],
        "mean_a": result.means[0],
        "mean_b": result.means[1],
        "means": f"{result.means[0]:.{digits}f} vs. {result.means[1]:.{digits}f}",
        "t_statistic": result.welch.statistic,
        "welch_df": result.welch.detail,
        "t_test_p": result.welch.p_value,
        "u_statistic": result.mannwhitney.statistic,
        "u_test_p": result.mannwhitney.p_value,
        "u_exact": result.mannwhitney.exact,
        "shapiro_p_a": shapiro[0],
        "shapiro_p_b": shapiro[1],
        "normality": "Normal" if result.normal else "Not normal",
        "decisive_test": "Welch" if result.normal else "Mann-Whitney",
        "conclusion": "Significant" if result.significant else "Not significant",
    }


def _cell(value):
    if value is None:
        return ""
    if isinstance(value, bool):
        return "yes" if value else "no"
    if isinstance(value, float):
        return _num(value)
    return str(value)


def cmd_stats(cfg: RunConfig) -> list[Path]:
    fcfg = _feature_config(cfg)
    corpora = _load_corpora(cfg)
    songs = [s for c in corpora.values() for s in c.songs]
    vectors = {}
    for corpus in corpora.values():
        vectors.update(zip(corpus.songs, extract_all(corpus, fcfg)))

    means = group_means(songs, ("chart", "gender"), vectors=vectors)
    counts = {}
    for s in songs:
        counts[(s.chart, s.gender)] = counts.get((s.chart, s.gender), 0) + 1
    mean_rows = []
    for (chart, gender), vec in means.items():
        if chart not in corpora:
            continue
        vals = ([""] * len(FEATURE_NAMES) if vec is None
                else [_num(v, 3) for v in vec.as_tuple()])
        mean_rows.append([CHART_TITLE[chart], gender.value, counts.get((chart, gender), 0)] + vals)

    rows = []
    for spec in STANDARD_COMPARISONS:
        try:
            result = compare_groups(songs, spec.feature, spec.split, spec.group_labels,
                                    alpha=cfg.alpha, vectors=vectors, exact_max=cfg.exact_u_max)
        except StatsError as exc:
            result = str(exc)
        rows.append(_comparison_row(spec, result))

    bar_values = {}
    for label, gender, category in _BAR_GROUPS:
        for chart in Chart:
            cell = [vectors[s].kor_ratio for s in songs
                    if s.chart == chart and s.gender == gender and s.category == category]
            bar_values[(label, CHART_TITLE[chart])] = sum(cell) / len(cell) if cell else None
    svg = grouped_bar_svg("Average Korean Lyric Ratio by Group Type and Chart",
                          [g[0] for g in _BAR_GROUPS], [CHART_TITLE[c] for c in Chart],
                          bar_values, y_label="Korean lyric ratio")

    cmp_table = [[_cell(r.get(h)) for h in _CMP_HEADER] for r in rows]
    short = ("feature", "comparison", "means", "t_test_p", "u_test_p", "normality", "conclusion")
    out = cfg.out
    return [
        atomic_write(out / "group_means.csv", csv_text(_MEANS_HEADER, mean_rows)),
        atomic_write(out / "group_means.txt", text_table(_MEANS_HEADER, mean_rows)),
        atomic_write(out / "comparisons.csv", csv_text(_CMP_HEADER, cmp_table)),
        atomic_write(out / "comparisons.json",
                     json.dumps({"alpha": cfg.alpha, "rows": rows}, indent=2,
                                ensure_ascii=False) + "\n"),
        atomic_write(out / "comparisons.txt",
                     text_table(short, [[_cell(r.get(h)) for h in short] for r in rows])),
        atomic_write(out / "korean_ratio_by_group.svg", svg),
    ]


def cmd_classify(cfg: RunConfig) -> list[Path]:
    try:
        mode = Mode(cfg.mode)
    except ValueError:
        raise UsageError(f"unknown mode {cfg.mode!r}") from None
    embeddings = None
    if mode is Mode.WITH_EMBEDDINGS:
        if cfg.embeddings is None:
            raise UsageError("with-embeddings mode requires --embeddings PATH")
        if not Path(cfg.embeddings).is_file():
            raise UsageError(f"embedding file not found: {cfg.embeddings}")
        embeddings = load_embeddings(cfg.embeddings)
    fcfg = _feature_config(cfg)
    exp_cfg = ExperimentConfig(seed=cfg.seed, classifiers=tuple(cfg.classifiers))
    written = []
    summary = []
    for chart, corpus in _load_corpora(cfg).items():
        result = run_experiment(corpus, mode, embeddings, exp_cfg,
                                features=extract_all(corpus, fcfg))
        payload = {
            "chart": chart.value,
            "mode": mode.value,
            "seed": cfg.seed,
            "n_train": result.n_train,
            "n_test": result.n_test,
            "design_width": result.width,
            "pca_dims": result.pca_dims,
            "notes": list(result.notes),
            "classifiers": {name: rep.to_dict() for name, rep in result.reports.items()},
        }
        slug = CHART_SLUG[chart]
        written.append(atomic_write(cfg.out / f"classify_{slug}.json",
                                    json.dumps(payload, indent=2) + "\n"))
        lines = [f"{CHART_TITLE[chart]} ({mode.value}, seed {cfg.seed}): "
                 f"{result.n_train} train / {result.n_test} test songs", ""]
        for name, rep in result.reports.items():
            summary.append([chart.value, mode.value, name, _num(rep.accuracy), _num(rep.macro_f1)]
                           + [_num(v) for c in rep.classes for v in rep.per_class[c]])
            lines.append(f"[{name}] accuracy {rep.accuracy:.4f}  macro-F1 {rep.macro_f1:.4f}")
            lines.append(text_table(("class", "precision", "recall", "f1"),
                                    [[c] + [_num(v) for v in rep.per_class[c]]
                                     for c in rep.classes]))
            lines.append(text_table(("gold \\ pred",) + rep.classes,
                                    [[c] + list(row) for c, row in zip(rep.classes, rep.confusion)]))
        written.append(atomic_write(cfg.out / f"classify_{slug}.txt", "\n".join(lines)))
    header = ("chart", "mode", "classifier", "accuracy", "macro_f1",
              "precision_M", "recall_M", "f1_M", "precision_F", "recall_F", "f1_F")
    written.append(atomic_write(cfg.out / "classify_summary.csv", csv_text(header, summary)))
    return written


def cmd_bigrams(cfg: RunConfig) -> list[Path]:
    if cfg.k < 1:
        raise UsageError(f"--k must be a positive integer, got {cfg.k}")
    written = []
    for chart, corpus in _load_corpora(cfg).items():
        for gender in Gender:
            for category in Category:
                sub = filter_corpus(corpus, gender=gender, category=category)
                name = f"bigrams_{CHART_SLUG[chart]}_{gender.value}_{category.value.lower()}.csv"
                pairs = top_bigrams(sub, cfg.k)
                text = csv_text(("bigram", "count"), pairs) if pairs else ""
                written.append(atomic_write(cfg.out / name, text))
    return written


COMMANDS = {"features": cmd_features, "stats": cmd_stats, "classify": cmd_classify,
            "bigrams": cmd_bigrams}


# --------------------------------------------------------------------- parser

def _add_global(p: argparse.ArgumentParser):
    S = argparse.SUPPRESS
    p.add_argument("--config", type=Path, default=S, help="key = value file supplying any flag")
    p.add_argument("--hot100", type=Path, default=S, metavar="PATH")
    p.add_argument("--global200", type=Path, default=S, metavar="PATH")
    p.add_argument("--embeddings", type=Path, default=S, metavar="PATH")
    p.add_argument("--out", type=Path, default=S, metavar="DIR")
    p.add_argument("--seed", type=int, default=S)
    p.add_argument("--alpha", type=float, default=S)
    p.add_argument("--reclean", action="store_true", default=S,
                   help="recompute cleaned lyrics even when the column is present")
    p.add_argument("--exact-u-max", type=int, default=S, dest="exact_u_max",
                   help="largest n_a*n_b for the exact Mann-Whitney p-value")
    p.add_argument("--filler-lexicon", type=Path, default=S, dest="filler_lexicon",
                   metavar="PATH")
    p.add_argument("--chart", default=S, help="restrict to one chart (Hot100 or Global200)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="kcswitch", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    _add_global(parser)
    sub = parser.add_subparsers(dest="command", metavar="COMMAND")
    sub.required = True
    p = sub.add_parser("features", help="per-song feature tables")
    _add_global(p)
    p = sub.add_parser("stats", help="group means, hypothesis tests and the Korean-ratio chart")
    _add_global(p)
    p = sub.add_parser("classify", help="gender classification experiment")
    _add_global(p)
    p.add_argument("--mode", choices=[m.value for m in Mode], default=argparse.SUPPRESS)
    p.add_argument("--classifiers", default=argparse.SUPPRESS,
                   help="comma-separated subset of logreg,knn,voting")
    p = sub.add_parser("bigrams", help="most frequent bigrams per chart, gender and category")
    _add_global(p)
    p.add_argument("--k", type=int, default=argparse.SUPPRESS, help="bigrams per file (default 20)")
    return parser


def resolve_config(ns: argparse.Namespace) -> RunConfig:
    values = vars(ns).copy()
    values.pop("command")
    cfg = {}
    if "config" in values:
        cfg.update(read_config_file(values.pop("config")))
    for key, value in values.items():
        cfg[key] = _coerce(key, value)
    run = RunConfig(**cfg)
    run.validate()
    return run


def main(argv=None) -> int:
    parser = build_parser()
    try:
        ns = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code not in (0, None) else EXIT_OK
    try:
        cfg = resolve_config(ns)
        COMMANDS[ns.command](cfg)
    except (UsageError, CorpusError, JoinError, EmbeddingFormatError) as exc:
        print(f"kcswitch: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (StatsError, ClassifyError) as exc:
        print(f"kcswitch: analysis failed: {exc}", file=sys.stderr)
        return EXIT_ANALYSIS
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
