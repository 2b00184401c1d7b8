"""Performer-gender classification from lyric features and imported embeddings."""

from __future__ import annotations

import csv
import enum
import io
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np

from kcswitch.corpus import Corpus, Gender
from kcswitch.features import FEATURE_NAMES, FeatureVector, extract_all
from kcswitch.pca import fit_pca, transform_pca

VARIANCE_FLOOR = 1e-12
GRAD_TOL = 1e-6
LABELS = {Gender.M: 0, Gender.F: 1}
CLASS_NAMES = ("M", "F")


class ClassifyError(ValueError):
    pass


class EmbeddingFormatError(ClassifyError):
    pass


class JoinError(ClassifyError):
    def __init__(self, missing):
        self.missing = list(missing)
        names = ", ".join(f"{t!r} by {a!r}" for t, a in self.missing)
        super().__init__(f"no embedding for {len(self.missing)} song(s): {names}")


class Mode(str, enum.Enum):
    FEATURES_ONLY = "features-only"
    WITH_EMBEDDINGS = "with-embeddings"


# ------------------------------------------------------------------ embeddings

@dataclass(frozen=True)
class EmbeddingSet:
    vectors: dict
    dim: int

    def __len__(self):
        return len(self.vectors)

    def matrix_for(self, corpus: Corpus) -> np.ndarray:
        missing = [s.key for s in corpus.songs if s.key not in self.vectors]
        if missing:
            raise JoinError(missing)
        if not corpus.songs:
            return np.zeros((0, self.dim))
        return np.vstack([self.vectors[s.key] for s in corpus.songs])


def load_embeddings(path) -> EmbeddingSet:
    """Read ``title,artist,v0..v{d-1}`` rows into an :class:`EmbeddingSet`."""
    text = Path(path).read_text(encoding="utf-8")
    rows = list(csv.reader(io.StringIO(text, newline="")))
    if not rows:
        raise EmbeddingFormatError(f"{path}: empty embedding file")
    header = [h.strip().lower() for h in rows[0]]
    if header[:2] != ["title", "artist"] or len(header) < 3:
        raise EmbeddingFormatError(f"{path}: header must be title, artist, v0, v1, ...")
    dim = len(header) - 2
    vectors = {}
    for line_no, row in enumerate(rows[1:], start=2):
        if not row:
            continue
        if len(row) != dim + 2:
            raise EmbeddingFormatError(
                f"{path}:{line_no}: expected {dim} values, found {len(row) - 2}")
        try:
            vec = np.array([float(v) for v in row[2:]], dtype=np.float64)
        except ValueError:
            raise EmbeddingFormatError(f"{path}:{line_no}: non-numeric value") from None
        if not np.all(np.isfinite(vec)):
            raise EmbeddingFormatError(f"{path}:{line_no}: non-finite value")
        key = (row[0].strip(), row[1].strip())
        if key in vectors:
            raise EmbeddingFormatError(f"{path}:{line_no}: duplicate record {key!r}")
        vectors[key] = vec
    return EmbeddingSet(vectors, dim)


# --------------------------------------------------------------- design matrix

@dataclass(frozen=True)
class Standardizer:
    mean: np.ndarray
    scale: np.ndarray
    floored: np.ndarray

    @classmethod
    def fit(cls, X) -> "Standardizer":
        X = np.asarray(X, dtype=np.float64)
        mean = X.mean(axis=0)
        var = ((X - mean) ** 2).mean(axis=0)
        floored = var < VARIANCE_FLOOR
        scale = np.where(floored, 1.0, np.sqrt(np.where(floored, 1.0, var)))
        return cls(mean, scale, floored)

    def transform(self, X) -> np.ndarray:
        out = (np.asarray(X, dtype=np.float64) - self.mean) / self.scale
        out[..., self.floored] = 0.0
        return out


def feature_matrix(vectors: Sequence[FeatureVector]) -> np.ndarray:
    return np.array([v.as_tuple() for v in vectors], dtype=np.float64).reshape(-1, len(FEATURE_NAMES))


def build_design_matrix(corpus: Corpus, features: Sequence[FeatureVector], reduced=None,
                        train_idx=None) -> np.ndarray:
    """Rows = songs; columns = reduced embedding coordinates, then the six
    handcrafted features standardised with statistics from ``train_idx``
    (all rows when omitted)."""
    n = len(corpus.songs)
    if len(features) != n:
        raise ClassifyError(f"{len(features)} feature vectors for {n} songs")
    F = feature_matrix(features)
    rows = np.arange(n) if train_idx is None else np.asarray(train_idx, dtype=int)
    F = Standardizer.fit(F[rows]).transform(F)
    if reduced is None:
        return F
    reduced = np.asarray(reduced, dtype=np.float64)
    if reduced.ndim != 2 or reduced.shape[0] != n:
        raise ClassifyError(f"reduced embeddings have shape {reduced.shape}, expected {n} rows")
    return np.hstack([reduced, F])


def stratified_split(labels: Sequence, train_fraction: float = 0.8,
                     seed: int = 0) -> tuple[list[int], list[int]]:
    """Per-class shuffled split keeping at least one item of each class per side."""
    if not 0.0 < train_fraction < 1.0:
        raise ClassifyError("train_fraction must be strictly between 0 and 1")
    labels = list(labels)
    classes = sorted(set(labels), key=str)
    if len(classes) < 2:
        raise ClassifyError("stratified split needs at least two classes")
    rng = np.random.default_rng(seed)
    train, test = [], []
    for cls in classes:
        idx = np.array([i for i, lab in enumerate(labels) if lab == cls])
        if len(idx) < 2:
            raise ClassifyError(f"class {cls!r} has {len(idx)} member(s); at least 2 required")
        n_train = min(max(math.floor(train_fraction * len(idx) + 0.5), 1), len(idx) - 1)
        perm = rng.permutation(idx)
        train.extend(int(i) for i in perm[:n_train])
        test.extend(int(i) for i in perm[n_train:])
    return sorted(train), sorted(test)


# ----------------------------------------------------------------- classifiers

class Kind(str, enum.Enum):
    LOGREG = "LogReg"
    KNN = "KNN"
    VOTING = "Voting"


def _sigmoid(z):
    return 0.5 * (1.0 + np.tanh(0.5 * z))


def logistic_loss(weights, bias, X, y, l2):
    """Mean log-loss plus ``l2 / (2n) * |w|^2``; the bias is not penalised."""
    X = np.asarray(X, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    z = X @ weights + bias
    n = len(y)
    return float(np.mean(np.logaddexp(0.0, z) - y * z) + 0.5 * l2 / n * weights @ weights)


def logistic_grad(weights, bias, X, y, l2):
    X = np.asarray(X, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    n = len(y)
    r = _sigmoid(X @ weights + bias) - y
    return X.T @ r / n + l2 / n * weights, float(np.mean(r))


@dataclass(frozen=True)
class LogRegModel:
    weights: np.ndarray
    bias: float
    l2: float
    epochs_run: int = 0
    converged: bool = False
    kind = Kind.LOGREG
    probabilistic = True

    def predict_proba(self, X) -> np.ndarray:
        return _sigmoid(np.asarray(X, dtype=np.float64) @ self.weights + self.bias)

    def predict(self, X) -> np.ndarray:
        return (self.predict_proba(X) >= 0.5).astype(int)


@dataclass(frozen=True)
class KNNModel:
    X: np.ndarray
    y: np.ndarray
    k: int
    kind = Kind.KNN
    probabilistic = False

    def _neighbours(self, X):
        X = np.asarray(X, dtype=np.float64)
        d2 = ((X[:, None, :] - self.X[None, :, :]) ** 2).sum(axis=2)
        return np.argsort(d2, axis=1, kind="stable")[:, : self.k]

    def predict_proba(self, X) -> np.ndarray:
        return self.y[self._neighbours(X)].mean(axis=1)

    def predict(self, X) -> np.ndarray:
        ones = self.y[self._neighbours(X)].sum(axis=1)
        return (2 * ones > self.k).astype(int)


@dataclass(frozen=True)
class VotingModel:
    members: tuple
    kind = Kind.VOTING
    probabilistic = False

    def predict(self, X) -> np.ndarray:
        votes = np.array([m.predict(X) for m in self.members])
        ones = votes.sum(axis=0)
        zeros = len(self.members) - ones
        out = (ones > zeros).astype(int)
        tied = ones == zeros
        if tied.any():
            probs = [m.predict_proba(X) for m in self.members if m.probabilistic]
            if probs:
                out[tied] = (np.mean(probs, axis=0)[tied] > 0.5).astype(int)
            else:
                out[tied] = 0
        return out


def _check_binary(X, y):
    X = np.asarray(X, dtype=np.float64)
    y = np.asarray(y, dtype=int)
    if X.ndim != 2 or X.shape[0] != len(y):
        raise ClassifyError(f"X has shape {X.shape} but there are {len(y)} labels")
    if set(np.unique(y)) - {0, 1}:
        raise ClassifyError("labels must be 0/1")
    return X, y


def train_logreg(X, y, l2: float = 1.0, epochs: int = 5000, step: float = 0.1) -> LogRegModel:
    """Full-batch gradient descent from zero weights."""
    X, y = _check_binary(X, y)
    if len(np.unique(y)) < 2:
        raise ClassifyError("logistic regression needs both classes in the training data")
    w = np.zeros(X.shape[1])
    b = 0.0
    for epoch in range(epochs):
        gw, gb = logistic_grad(w, b, X, y, l2)
        if max(np.max(np.abs(gw), initial=0.0), abs(gb)) < GRAD_TOL:
            return LogRegModel(w, b, l2, epoch, True)
        w = w - step * gw
        b = b - step * gb
    return LogRegModel(w, b, l2, epochs, False)


def train_knn(X, y, k: int = 5) -> KNNModel:
    X, y = _check_binary(X, y)
    if k < 1 or k % 2 == 0:
        raise ClassifyError(f"k must be a positive odd integer, got {k}")
    if k > len(y):
        raise ClassifyError(f"k={k} exceeds the {len(y)} training rows")
    return KNNModel(X.copy(), y.copy(), k)


def train_voting(members: Sequence) -> VotingModel:
    if len(members) < 2:
        raise ClassifyError("a voting ensemble needs at least two members")
    return VotingModel(tuple(members))


# ------------------------------------------------------------------ evaluation

@dataclass(frozen=True)
class EvalReport:
    classes: tuple
    accuracy: float
    macro_f1: float
    per_class: dict
    confusion: tuple  # confusion[i][j]: gold classes[i] predicted as classes[j]

    def to_dict(self) -> dict:
        return {
            "classes": [str(c) for c in self.classes],
            "accuracy": self.accuracy,
            "macro_f1": self.macro_f1,
            "per_class": {str(c): dict(zip(("precision", "recall", "f1"), self.per_class[c]))
                          for c in self.classes},
            "confusion": [list(r) for r in self.confusion],
        }


def _ratio(num, den):
    return num / den if den else 0.0


def evaluate(predictions: Sequence, gold: Sequence, classes: Sequence | None = None) -> EvalReport:
    predictions, gold = list(predictions), list(gold)
    if len(predictions) != len(gold):
        raise ClassifyError(f"{len(predictions)} predictions for {len(gold)} gold labels")
    if not gold:
        raise ClassifyError("nothing to evaluate")
    if classes is None:
        classes = sorted(set(gold) | set(predictions), key=str)
    classes = tuple(classes)
    pos = {c: i for i, c in enumerate(classes)}
    confusion = [[0] * len(classes) for _ in classes]
    for g, p in zip(gold, predictions):
        confusion[pos[g]][pos[p]] += 1
    per_class = {}
    for i, c in enumerate(classes):
        tp = confusion[i][i]
        precision = _ratio(tp, sum(row[i] for row in confusion))
        recall = _ratio(tp, sum(confusion[i]))
        per_class[c] = (precision, recall, _ratio(2 * precision * recall, precision + recall))
    accuracy = sum(confusion[i][i] for i in range(len(classes))) / len(gold)
    macro = math.fsum(v[2] for v in per_class.values()) / len(classes)
    return EvalReport(classes, accuracy, macro, per_class,
                      tuple(tuple(r) for r in confusion))


# ------------------------------------------------------------------ experiment

@dataclass(frozen=True)
class ExperimentConfig:
    seed: int = 0
    train_fraction: float = 0.8
    pca_dims: int = 30
    l2: float = 1.0
    epochs: int = 5000
    step: float = 0.1
    alt_step: float = 0.01
    knn_k: int = 5
    classifiers: tuple = ("logreg", "knn", "voting")


@dataclass(frozen=True)
class ExperimentResult:
    reports: dict
    n_train: int
    n_test: int
    width: int
    pca_dims: int = 0
    notes: tuple = field(default=())


def gender_labels(corpus: Corpus) -> list[int]:
    return [LABELS[s.gender] for s in corpus.songs]


def run_experiment(corpus: Corpus, mode: Mode | str = Mode.FEATURES_ONLY,
                   embeddings: EmbeddingSet | None = None,
                   config: ExperimentConfig = ExperimentConfig(),
                   features: Sequence[FeatureVector] | None = None) -> ExperimentResult:
    """Split, fit on the training rows only, and score every classifier on the test rows."""
    mode = Mode(mode)
    y = np.array(gender_labels(corpus), dtype=int)
    train, test = stratified_split(y, config.train_fraction, config.seed)
    vectors = list(features) if features is not None else extract_all(corpus)
    notes = []

    reduced = None
    k = 0
    if mode is Mode.WITH_EMBEDDINGS:
        if embeddings is None:
            raise ClassifyError("with-embeddings mode requires an embedding set")
        E = embeddings.matrix_for(corpus)
        k = min(config.pca_dims, len(train) - 1, embeddings.dim)
        if k < config.pca_dims:
            notes.append(f"PCA reduced to {k} dimensions (limited by training rows/dimension)")
        pca = fit_pca(E[train], k)
        reduced = transform_pca(pca, E)

    X = build_design_matrix(corpus, vectors, reduced, train_idx=train)
    Xtr, ytr, Xte, yte = X[train], y[train], X[test], y[test]

    logreg = train_logreg(Xtr, ytr, config.l2, config.epochs, config.step)
    models = {"logreg": logreg}
    wanted = set(config.classifiers)
    if wanted & {"knn", "voting"}:
        k_nn = min(config.knn_k, len(train) if len(train) % 2 else len(train) - 1)
        models["knn"] = train_knn(Xtr, ytr, k_nn)
    if "voting" in wanted:
        alt = train_logreg(Xtr, ytr, config.l2, config.epochs, config.alt_step)
        models["voting"] = train_voting([logreg, models["knn"], alt])

    reports = {}
    for name in config.classifiers:
        if name not in models:
            raise ClassifyError(f"unknown classifier {name!r}")
        pred = models[name].predict(Xte)
        reports[name] = evaluate([CLASS_NAMES[p] for p in pred], [CLASS_NAMES[g] for g in yte],
                                 classes=CLASS_NAMES)
    return ExperimentResult(reports, len(train), len(test), X.shape[1], k, tuple(notes))
