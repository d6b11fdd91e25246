"""Configuration-driven benchmark orchestrator.

Runs the full pipeline (data, preprocessing, feature extraction,
cross-validated training of the model roster, significance testing,
noise sweep, timing) and renders the report bundle as UTF-8 CSV files
plus one manifest. Every number in the metric reports is a pure
function of (config, seed); wall-clock timings live in their own file
so the deterministic reports stay byte-identical across reruns.
"""

from __future__ import annotations

import csv
import hashlib
import json
import math
import warnings
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import __version__
from .audio import normalize_amplitude, normalize_rms
from .dataset import Dataset, fit_scaler
from .errors import ParameterError, PipelineStageError
from .evaluation import (
    SignificanceReport,
    auc_roc,
    classification_metrics,
    confusion_from_predictions,
    mcc,
    nemenyi_critical_difference,
    significance_report,
    stratified_kfold,
)
from .features import extract_matrix
from .models import ModelSpec, measure_timing
from .registry import REGISTRY, REGISTRY_VERSION
from .synth import GeneratorConfig, add_noise_at_snr, generate_dataset, robustness_index
from .wavio import read_wav

DEFAULT_MODEL_ROSTER = (
    {"kind": "knn", "params": {"k": 7}},
    {"kind": "svm", "params": {}},
    {"kind": "rf", "params": {}},
    {"kind": "gbt", "params": {}},
    {"kind": "mlp", "params": {}},
    {"kind": "ensemble", "params": {}},
)

_PREPROCESS = {
    "none": lambda s: s,
    "rms": normalize_rms,
    "amplitude": normalize_amplitude,
}

_NOISE_SEED_OFFSET = 777_000


@dataclass
class ExperimentConfig:
    """Validated benchmark configuration; the CLI builds it from JSON."""

    seed: int
    data: dict = field(default_factory=lambda: {"source": "synthetic"})
    preprocess: str = "rms"
    models: tuple = DEFAULT_MODEL_ROSTER
    n_folds: int = 5
    holdout_fraction: float = 0.2
    validation_fraction: float = 0.0
    noise_levels_db: tuple = (40.0, 30.0, 20.0, 10.0)
    timing_enabled: bool = True
    timing_repetitions: int = 3
    nemenyi_q_alpha: float | None = None
    output_dir: str = "bench-output"

    def __post_init__(self):
        if self.seed is None:
            raise ParameterError("a seed is mandatory")
        self.seed = int(self.seed)
        if not self.models:
            raise ParameterError("at least one model must be configured")
        if self.preprocess not in _PREPROCESS:
            raise ParameterError(f"unknown preprocess mode {self.preprocess!r}")
        levels = tuple(float(v) for v in (self.noise_levels_db or ()))
        if any(b >= a for a, b in zip(levels, levels[1:])):
            raise ParameterError("noise levels must be strictly decreasing")
        if levels and not self.holdout_fraction > 0:
            raise ParameterError("a noise sweep needs a hold-out split (holdout_fraction > 0)")
        self.noise_levels_db = levels
        self.models = tuple(
            {"kind": m["kind"], "params": dict(m.get("params", {}))} for m in self.models
        )

    @classmethod
    def from_dict(cls, raw: dict, seed: int | None = None, output_dir: str | None = None):
        raw = dict(raw)
        known = {"seed", "data", "preprocess", "models", "cv", "noise", "timing", "stats", "output_dir"}
        unknown = set(raw) - known
        if unknown:
            raise ParameterError(f"unknown config keys: {sorted(unknown)}")
        cv = raw.pop("cv", {})
        noise = raw.pop("noise", {})
        timing = raw.pop("timing", {})
        stats = raw.pop("stats", {})
        return cls(
            seed=seed if seed is not None else raw.get("seed"),
            data=raw.get("data", {"source": "synthetic"}),
            preprocess=raw.get("preprocess", "rms"),
            models=tuple(raw.get("models", DEFAULT_MODEL_ROSTER)),
            n_folds=cv.get("n_folds", 5),
            holdout_fraction=cv.get("holdout_fraction", 0.2),
            validation_fraction=cv.get("validation_fraction", 0.0),
            noise_levels_db=tuple(noise.get("levels_db", (40.0, 30.0, 20.0, 10.0))),
            timing_enabled=timing.get("enabled", True),
            timing_repetitions=timing.get("repetitions", 3),
            nemenyi_q_alpha=stats.get("nemenyi_q_alpha"),
            output_dir=output_dir or raw.get("output_dir", "bench-output"),
        )

    @classmethod
    def from_file(cls, path, seed: int | None = None, output_dir: str | None = None):
        raw = json.loads(Path(path).read_text(encoding="utf-8"))
        return cls.from_dict(raw, seed=seed, output_dir=output_dir)

    def canonical_dict(self) -> dict:
        """Everything that determines the numbers; excludes the output path."""
        return {
            "seed": self.seed,
            "data": self.data,
            "preprocess": self.preprocess,
            "models": self.models,
            "cv": {
                "n_folds": self.n_folds,
                "holdout_fraction": self.holdout_fraction,
                "validation_fraction": self.validation_fraction,
            },
            "noise_levels_db": self.noise_levels_db,
            "nemenyi_q_alpha": self.nemenyi_q_alpha,
        }

    def config_hash(self) -> str:
        canon = json.dumps(self.canonical_dict(), sort_keys=True, default=list)
        return hashlib.sha256(canon.encode("utf-8")).hexdigest()[:16]

    def model_specs(self) -> list[ModelSpec]:
        return [
            ModelSpec(kind=m["kind"], params=m["params"], seed=self.seed + 101 * (i + 1))
            for i, m in enumerate(self.models)
        ]

    def model_names(self) -> list[str]:
        names = []
        for m in self.models:
            name = m["kind"]
            if name in names:  # duplicate kinds get numeric suffixes
                name = f"{name}-{sum(1 for n in names if n.split('-')[0] == m['kind']) + 1}"
            names.append(name)
        return names


METRIC_COLUMNS = ("accuracy", "precision", "recall", "f1", "auc_roc", "mcc")


@dataclass
class ReportBundle:
    """Everything a benchmark run produces, before rendering to disk."""

    config: ExperimentConfig
    model_names: list
    metrics_mean: dict  # name -> {metric: float}
    metrics_std: dict
    fold_f1: np.ndarray  # [n_folds, n_models]
    significance: SignificanceReport
    predictions: dict  # name -> out-of-fold predicted labels
    prediction_rows: list  # (sample_index, fold, y_true)
    importance: np.ndarray | None  # per-feature RF importances
    noise_table: dict | None  # name -> [f1 per condition]
    noise_conditions: list | None
    timing: dict | None  # name -> TimingReport
    manifest: dict


# ---------------------------------------------------------------------------
# corpus loading
# ---------------------------------------------------------------------------

def load_corpus(directory, labels_csv, permissive: bool = False) -> Dataset:
    """WAV directory + labels CSV -> extracted Dataset.

    The CSV needs 'filename' and 'label' columns. Missing files abort
    the load unless ``permissive`` is set, in which case they are
    skipped and reported in the provenance.
    """
    directory = Path(directory)
    if not directory.is_dir():
        raise ParameterError(f"{directory} is not a directory")
    if not any(directory.iterdir()):
        raise ParameterError(f"{directory} is empty")
    labels_path = Path(labels_csv)
    with open(labels_path, newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None or not {"filename", "label"} <= set(reader.fieldnames):
            raise ParameterError(f"{labels_path}: need 'filename' and 'label' columns")
        rows = list(reader)
    if not rows:
        raise ParameterError(f"{labels_path}: no data rows")

    signals, raw_labels, skipped = [], [], []
    for row in rows:
        path = directory / row["filename"]
        if not path.is_file():
            if permissive:
                skipped.append(row["filename"])
                continue
            raise ParameterError(f"listed file missing: {path}")
        signals.append(read_wav(path))
        raw_labels.append(int(row["label"]))
    if skipped:
        warnings.warn(f"skipped {len(skipped)} missing files: {skipped[:5]}...")
    if not signals:
        raise ParameterError("no loadable samples in corpus")

    classes = sorted(set(raw_labels))
    dense = {c: i for i, c in enumerate(classes)}
    labels = np.array([dense[c] for c in raw_labels])
    ds = Dataset(
        labels=labels,
        signals=signals,
        provenance={
            "source": "wav",
            "directory": str(directory),
            "labels_csv": str(labels_path),
            "label_mapping": {str(c): i for c, i in dense.items()},
            "skipped": skipped,
        },
    )
    return ds.with_features(extract_matrix(signals), registry_version=REGISTRY_VERSION)


# ---------------------------------------------------------------------------
# pipeline stages
# ---------------------------------------------------------------------------

def _stage(name):
    class _StageGuard:
        def __enter__(self):
            return self

        def __exit__(self, exc_type, exc, tb):
            if exc is not None and not isinstance(exc, PipelineStageError):
                raise PipelineStageError(name, str(exc)) from exc
            return False

    return _StageGuard()


def _build_dataset(cfg: ExperimentConfig) -> Dataset:
    source = cfg.data.get("source", "synthetic")
    if source == "synthetic":
        gen_kwargs = dict(cfg.data.get("generator", {}))
        gen = GeneratorConfig(
            samples_per_class=cfg.data.get("samples_per_class", 200),
            duration_s=cfg.data.get("duration_s", 1.0),
            sample_rate_hz=cfg.data.get("sample_rate_hz", 16000.0),
            base_seed=cfg.seed,
            **gen_kwargs,
        )
        return generate_dataset(gen)
    if source == "wav":
        return load_corpus(
            cfg.data["directory"],
            cfg.data["labels_csv"],
            permissive=cfg.data.get("permissive", False),
        )
    raise ParameterError(f"unknown data source {source!r}")


def _extract_features(cfg: ExperimentConfig, dataset: Dataset) -> Dataset:
    prep = _PREPROCESS[cfg.preprocess]
    if dataset.features is not None and cfg.preprocess == "none":
        return dataset
    if dataset.signals is None:
        raise ParameterError("dataset retains no signals; cannot re-extract")
    processed = [prep(s) for s in dataset.signals]
    return dataset.with_features(extract_matrix(processed), registry_version=REGISTRY_VERSION)


def _fold_metrics(y_true, y_pred, probs, n_classes) -> dict:
    cm = confusion_from_predictions(y_true, y_pred, n_classes)
    metrics = classification_metrics(cm)
    return {
        "accuracy": metrics.accuracy,
        "precision": metrics.precision,
        "recall": metrics.recall,
        "f1": metrics.f1,
        "auc_roc": auc_roc(probs, y_true),
        "mcc": mcc(cm),
    }


def run_experiment(cfg: ExperimentConfig) -> ReportBundle:
    """Execute the full benchmark pipeline and assemble the report bundle."""
    with _stage("config"):
        specs = cfg.model_specs()
        names = cfg.model_names()

    with _stage("data"):
        dataset = _build_dataset(cfg)

    with _stage("features"):
        dataset = _extract_features(cfg, dataset)
        n_classes = dataset.n_classes

    with _stage("cv"):
        plan = stratified_kfold(
            dataset.labels,
            cfg.n_folds,
            seed=cfg.seed + 1,
            holdout_fraction=cfg.holdout_fraction,
            validation_fraction=cfg.validation_fraction,
        )

    with _stage("train-eval"):
        per_fold = {name: [] for name in names}
        oof_pred = {name: np.full(len(dataset), -1) for name in names}
        row_fold = np.full(len(dataset), -1)
        for fold, (train_idx, test_idx) in enumerate(plan.iter_folds()):
            scaler = fit_scaler(dataset.features[train_idx])
            X_train = scaler.transform(dataset.features[train_idx])
            X_test = scaler.transform(dataset.features[test_idx])
            y_train = dataset.labels[train_idx]
            y_test = dataset.labels[test_idx]
            row_fold[test_idx] = fold
            for spec, name in zip(specs, names):
                model = spec.build().fit(X_train, y_train)
                probs = model.predict_proba(X_test)
                pred = np.argmax(probs, axis=1)
                per_fold[name].append(_fold_metrics(y_test, pred, probs, n_classes))
                oof_pred[name][test_idx] = pred

    with _stage("significance"):
        cv_idx = np.where(plan.cv_mask)[0]
        correctness = np.vstack(
            [oof_pred[name][cv_idx] == dataset.labels[cv_idx] for name in names]
        )
        fold_f1 = np.array(
            [[per_fold[name][fold]["f1"] for name in names] for fold in range(cfg.n_folds)]
        )
        sig = significance_report(names, correctness, fold_f1)

    with _stage("final-models"):
        scaler = fit_scaler(dataset.features[cv_idx])
        X_full = scaler.transform(dataset.features[cv_idx])
        y_full = dataset.labels[cv_idx]
        final_models = {
            name: spec.build().fit(X_full, y_full) for spec, name in zip(specs, names)
        }

    with _stage("importance"):
        importance = None
        for name, model in final_models.items():
            if model.kind == "rf":
                importance = model.feature_importances()
                break
            if model.kind == "ensemble":
                for member in getattr(model, "members_", []):
                    if member.kind == "rf":
                        importance = member.feature_importances()
                        break

    noise_table = None
    conditions = None
    if cfg.noise_levels_db:
        with _stage("noise"):
            noise_table, conditions = _noise_sweep(
                cfg, dataset, plan, scaler, final_models
            )

    timing = None
    if cfg.timing_enabled:
        with _stage("timing"):
            timing = {
                name: measure_timing(
                    spec.build, X_full, y_full, X_full[: max(1, len(X_full) // 4)],
                    repetitions=cfg.timing_repetitions,
                )
                for spec, name in zip(specs, names)
            }

    with _stage("report"):
        metrics_mean = {
            name: {
                m: float(np.mean([f[m] for f in per_fold[name]])) for m in METRIC_COLUMNS
            }
            for name in names
        }
        metrics_std = {
            name: {
                m: float(np.std([f[m] for f in per_fold[name]])) for m in METRIC_COLUMNS
            }
            for name in names
        }
        class_counts = np.bincount(dataset.labels, minlength=n_classes)
        manifest = {
            "config_hash": cfg.config_hash(),
            "seed": cfg.seed,
            "registry_version": REGISTRY_VERSION,
            "package_version": __version__,
            "n_samples": len(dataset),
            "n_features": dataset.features.shape[1],
            "n_classes": n_classes,
            "class_counts": ",".join(str(int(c)) for c in class_counts),
            "n_folds": cfg.n_folds,
            "holdout_samples": int(plan.holdout_mask.sum()),
            "validation_samples": int(plan.validation_mask.sum()),
            "validation_note": "validation fraction is taken from the total sample count",
            "friedman_input": "per-fold macro-F1 matrix [n_folds x n_models]",
            "models": ",".join(names),
            "noise_levels_db": ",".join(str(v) for v in cfg.noise_levels_db),
            "preprocess": cfg.preprocess,
        }
        prediction_rows = [
            (int(i), int(row_fold[i]), int(dataset.labels[i])) for i in cv_idx
        ]

    return ReportBundle(
        config=cfg,
        model_names=names,
        metrics_mean=metrics_mean,
        metrics_std=metrics_std,
        fold_f1=fold_f1,
        significance=sig,
        predictions={name: oof_pred[name] for name in names},
        prediction_rows=prediction_rows,
        importance=importance,
        noise_table=noise_table,
        noise_conditions=conditions,
        timing=timing,
        manifest=manifest,
    )


def _noise_sweep(cfg, dataset, plan, scaler, final_models):
    """Evaluate clean-trained models on noise-injected hold-out signals."""
    hold_idx = np.where(plan.holdout_mask)[0]
    if len(hold_idx) == 0:
        raise ParameterError("noise sweep needs a hold-out split (holdout_fraction > 0)")
    if dataset.signals is None:
        raise ParameterError("noise sweep needs retained raw signals")
    prep = _PREPROCESS[cfg.preprocess]
    y_hold = dataset.labels[hold_idx]
    n_classes = dataset.n_classes
    conditions = [math.inf] + list(cfg.noise_levels_db)
    table = {name: [] for name in final_models}
    for level_index, level in enumerate(conditions):
        noisy = [
            add_noise_at_snr(
                dataset.signals[i],
                level,
                seed=cfg.seed + _NOISE_SEED_OFFSET + level_index * len(dataset) + int(i),
            )
            for i in hold_idx
        ]
        feats = scaler.transform(extract_matrix([prep(s) for s in noisy]))
        for name, model in final_models.items():
            pred = model.predict(feats)
            f1 = classification_metrics(
                confusion_from_predictions(y_hold, pred, n_classes)
            ).f1
            table[name].append(f1)
    return table, conditions


def run_noise_sweep(cfg: ExperimentConfig, levels_db=None):
    """Train on the clean CV split and sweep the hold-out through noise levels.

    Returns (model names, conditions, {name: [f1 per condition incl. clean]},
    {name: robustness index}).
    """
    if levels_db is not None:
        cfg = ExperimentConfig(
            **{**cfg.__dict__, "noise_levels_db": tuple(levels_db)}
        )
    with _stage("data"):
        dataset = _build_dataset(cfg)
    with _stage("features"):
        dataset = _extract_features(cfg, dataset)
    with _stage("cv"):
        plan = stratified_kfold(
            dataset.labels,
            cfg.n_folds,
            seed=cfg.seed + 1,
            holdout_fraction=cfg.holdout_fraction,
            validation_fraction=cfg.validation_fraction,
        )
    with _stage("final-models"):
        cv_idx = np.where(plan.cv_mask)[0]
        scaler = fit_scaler(dataset.features[cv_idx])
        X_full = scaler.transform(dataset.features[cv_idx])
        y_full = dataset.labels[cv_idx]
        names = cfg.model_names()
        final_models = {
            name: spec.build().fit(X_full, y_full)
            for spec, name in zip(cfg.model_specs(), names)
        }
    with _stage("noise"):
        table, conditions = _noise_sweep(cfg, dataset, plan, scaler, final_models)
    indices = {name: robustness_index(values) for name, values in table.items()}
    return names, conditions, table, indices


# ---------------------------------------------------------------------------
# rendering
# ---------------------------------------------------------------------------

def _fmt(value: float) -> str:
    return f"{value:.4f}"


def _fmt_mean_std(mean: float, std: float) -> str:
    return f"{mean:.4f} ± {std:.4f}"


def _p_value_cell(p: float) -> str:
    if p < 0.001:
        return "<0.001***"
    if p < 0.05:
        return f"{p:.3f}*"
    return f"{p:.3f}"


def _write_csv(path: Path, rows) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        csv.writer(fh).writerows(rows)


def write_bundle(bundle: ReportBundle, out_dir) -> dict:
    """Render the bundle as CSV files + manifest; returns {label: path}."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    figs = out / "figs"
    figs.mkdir(exist_ok=True)
    written = {}

    header = ["Algorithm", "Accuracy", "Precision", "Recall", "F1-Score", "AUC-ROC", "MCC"]
    rows = [header]
    for name in bundle.model_names:
        mean, std = bundle.metrics_mean[name], bundle.metrics_std[name]
        rows.append([name] + [_fmt_mean_std(mean[m], std[m]) for m in METRIC_COLUMNS])
    _write_csv(out / "metrics.csv", rows)
    written["metrics"] = out / "metrics.csv"

    sig = bundle.significance
    rows = [["Model"] + list(sig.model_names)]
    for i, name in enumerate(sig.model_names):
        cells = []
        for j in range(len(sig.model_names)):
            cells.append("-" if i == j else _p_value_cell(sig.mcnemar_p[i, j]))
        rows.append([name] + cells)
    _write_csv(out / "significance.csv", rows)
    written["significance"] = out / "significance.csv"

    rows = [
        ["friedman_chi2", _fmt(sig.friedman_chi2)],
        ["friedman_p", f"{sig.friedman_p:.6g}"],
    ]
    if bundle.config.nemenyi_q_alpha is not None:
        cd = nemenyi_critical_difference(
            len(sig.model_names), bundle.config.n_folds, bundle.config.nemenyi_q_alpha
        )
        rows.append(["nemenyi_critical_difference", _fmt(cd)])
        rows.append(["nemenyi_q_alpha", _fmt(bundle.config.nemenyi_q_alpha)])
    rows.append(["Model", "AvgRank"])
    order = np.argsort(sig.avg_ranks, kind="stable")
    for k in order:
        rows.append([sig.model_names[k], f"{sig.avg_ranks[k]:.2f}"])
    _write_csv(out / "friedman.csv", rows)
    written["friedman"] = out / "friedman.csv"

    if bundle.noise_table is not None:
        cond_names = ["Clean"] + [
            f"SNR {int(v) if float(v).is_integer() else v} dB"
            for v in bundle.noise_conditions[1:]
        ]
        rows = [["Algorithm"] + cond_names + ["Robustness Index"]]
        for name in bundle.model_names:
            values = bundle.noise_table[name]
            rows.append(
                [name] + [_fmt(v) for v in values] + [_fmt(robustness_index(values))]
            )
        _write_csv(out / "noise.csv", rows)
        written["noise"] = out / "noise.csv"

        rows = [["model", "condition", "f1"]]
        for name in bundle.model_names:
            for cond, value in zip(cond_names, bundle.noise_table[name]):
                rows.append([name, cond, _fmt(value)])
        _write_csv(figs / "fig6_noise_curves.csv", rows)

    if bundle.importance is not None:
        order = np.argsort(-bundle.importance, kind="stable")
        rows = [["rank", "feature", "domain", "importance"]]
        for rank, fid in enumerate(order, start=1):
            entry = REGISTRY[fid]
            rows.append([rank, entry.name, entry.domain, f"{bundle.importance[fid]:.6f}"])
        _write_csv(out / "importance.csv", rows)
        written["importance"] = out / "importance.csv"

        rows = [["domain", "importance", "share_percent"]]
        for domain in ("frequency", "time", "time-frequency"):
            ids = [e.id for e in REGISTRY if e.domain == domain]
            share = float(bundle.importance[ids].sum())
            rows.append([domain, f"{share:.6f}", f"{share * 100:.1f}"])
        _write_csv(out / "domain_importance.csv", rows)
        written["domain_importance"] = out / "domain_importance.csv"

    if bundle.timing is not None:
        rows = [
            [
                "Algorithm",
                "Training Time (s)",
                "Training CV",
                "Prediction Time (ms)",
                "Prediction CV",
                "Repetitions",
            ]
        ]
        for name in bundle.model_names:
            t = bundle.timing[name]
            rows.append(
                [
                    name,
                    f"{t.training_seconds:.4f}",
                    f"{t.training_cv:.3f}",
                    f"{t.prediction_ms_per_sample:.4f}",
                    f"{t.prediction_cv:.3f}",
                    t.repetitions,
                ]
            )
        _write_csv(out / "timing.csv", rows)
        written["timing"] = out / "timing.csv"
        rows = [["model", "prediction_ms"]]
        for name in bundle.model_names:
            rows.append([name, f"{bundle.timing[name].prediction_ms_per_sample:.4f}"])
        _write_csv(figs / "fig4_prediction_time.csv", rows)

    rows = [["model", "metric", "mean", "std"]]
    for name in bundle.model_names:
        for metric in ("accuracy", "precision", "recall"):
            rows.append(
                [
                    name,
                    metric,
                    _fmt(bundle.metrics_mean[name][metric]),
                    _fmt(bundle.metrics_std[name][metric]),
                ]
            )
    _write_csv(figs / "fig3_performance.csv", rows)

    dataset_label = bundle.config.data.get("source", "synthetic")
    rows = [["dataset", "model", "f1_mean", "f1_std"]]
    for name in bundle.model_names:
        rows.append(
            [
                dataset_label,
                name,
                _fmt(bundle.metrics_mean[name]["f1"]),
                _fmt(bundle.metrics_std[name]["f1"]),
            ]
        )
    _write_csv(figs / "fig5_f1_by_dataset.csv", rows)

    rows = [["sample_index", "fold", "y_true"] + list(bundle.model_names)]
    for sample_index, fold, y_true in bundle.prediction_rows:
        rows.append(
            [sample_index, fold, y_true]
            + [int(bundle.predictions[name][sample_index]) for name in bundle.model_names]
        )
    _write_csv(out / "predictions.csv", rows)
    written["predictions"] = out / "predictions.csv"

    manifest_lines = [f"{key}={bundle.manifest[key]}" for key in sorted(bundle.manifest)]
    (out / "manifest.txt").write_text("\n".join(manifest_lines) + "\n", encoding="utf-8")
    written["manifest"] = out / "manifest.txt"
    return written


def significance_from_predictions(predictions_csv):
    """Rebuild the significance report from a saved predictions.csv."""
    with open(predictions_csv, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        rows = [[int(v) for v in row] for row in reader]
    if header[:3] != ["sample_index", "fold", "y_true"]:
        raise ParameterError(f"{predictions_csv}: unexpected column layout")
    names = header[3:]
    if not names:
        raise ParameterError(f"{predictions_csv}: no model columns")
    data = np.array(rows)
    folds = data[:, 1]
    y_true = data[:, 2]
    preds = data[:, 3:]
    correctness = (preds == y_true[:, None]).T
    n_classes = int(y_true.max()) + 1
    fold_ids = sorted(set(folds.tolist()))
    fold_f1 = np.zeros((len(fold_ids), len(names)))
    for fi, fold in enumerate(fold_ids):
        mask = folds == fold
        for mi in range(len(names)):
            cm = confusion_from_predictions(y_true[mask], preds[mask, mi], n_classes)
            fold_f1[fi, mi] = classification_metrics(cm).f1
    return significance_report(names, correctness, fold_f1)
