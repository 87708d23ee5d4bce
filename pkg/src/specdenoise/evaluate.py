"""Evaluation protocol: reconstruction error, downstream classification
relative to clean-data performance, ratioing, band-depth summary parameters
and the spurious-outcrop check.

The downstream classifier is a nearest-centroid stand-in operating on
continuum-removed spectra.  It is intentionally simple and isolated behind
the train/predict pair so a stronger classifier can be slotted in without
touching the protocol: train on clean train-split data, evaluate each
denoising method on the test split, report scores relative to the scores
the same classifier reaches on clean test data.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from .errors import ConfigError, DataError
from .grid import WavelengthGrid
from .spectra import Dataset, Spectrum


# ---------------------------------------------------------------------------
# reconstruction error

def mse_values(a: np.ndarray, b: np.ndarray) -> float:
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if a.shape != b.shape:
        raise DataError(f"shape mismatch {a.shape} vs {b.shape}")
    return float(np.mean((a - b) ** 2))


def denoise_mse(denoised: Dataset, clean: Dataset) -> float:
    """Mean squared error over all spectra and channels of aligned datasets."""
    if len(denoised) != len(clean) or not np.array_equal(denoised.ids, clean.ids):
        raise DataError("datasets are not aligned by spectrum id")
    return mse_values(denoised.values, clean.values)


# ---------------------------------------------------------------------------
# continuum removal and the stand-in classifier

def continuum_remove_values(
    values: np.ndarray, grid: WavelengthGrid, anchor: int = 3
) -> np.ndarray:
    """Divide by the per-segment line through the segment endpoints' local means.

    Each segment's continuum is the straight line through the mean of its
    first ``anchor`` channels and the mean of its last ``anchor`` channels
    (in wavelength).  Output sits near 1 on the continuum with absorption
    dips preserved; scaling the input leaves the output unchanged.
    """
    values = np.asarray(values, dtype=np.float64)
    out = np.empty_like(values)
    lam = grid.wavelengths
    for seg in grid.segment_slices:
        v = values[..., seg]
        w = lam[seg]
        va = v[..., :anchor].mean(axis=-1, keepdims=True)
        vb = v[..., -anchor:].mean(axis=-1, keepdims=True)
        wa = w[:anchor].mean()
        wb = w[-anchor:].mean()
        t = (w - wa) / (wb - wa)
        cont = va + t * (vb - va)
        if np.any(cont <= 0):
            raise DataError("degenerate continuum fit: nonpositive continuum value")
        out[..., seg] = v / cont
    return out


def continuum_remove(s: Spectrum, grid: WavelengthGrid) -> Spectrum:
    return replace(s, values=continuum_remove_values(s.values, grid))


@dataclass(frozen=True)
class CentroidClassifier:
    """Per-class means of continuum-removed spectra, ordered by class id."""

    class_ids: np.ndarray
    centroids: np.ndarray

    def __post_init__(self):
        ids = np.asarray(self.class_ids, dtype=np.int64)
        cen = np.asarray(self.centroids, dtype=np.float64)
        if ids.ndim != 1 or cen.ndim != 2 or cen.shape[0] != ids.size:
            raise DataError("classifier arrays are inconsistent")
        object.__setattr__(self, "class_ids", ids)
        object.__setattr__(self, "centroids", cen)


def centroid_classifier_train(
    train: Dataset, grid: WavelengthGrid, class_ids=None
) -> CentroidClassifier:
    """Fit per-class centroids on (clean, train-split) spectra."""
    if len(train) == 0:
        raise DataError("empty training dataset")
    if class_ids is None:
        class_ids = np.unique(train.labels)
    class_ids = np.asarray(sorted(int(c) for c in class_ids), dtype=np.int64)
    cr = continuum_remove_values(train.values, grid)
    centroids = np.empty((class_ids.size, cr.shape[1]), dtype=np.float64)
    for i, c in enumerate(class_ids):
        mask = train.labels == c
        if not mask.any():
            raise DataError(f"class {c} has zero training samples")
        centroids[i] = cr[mask].mean(axis=0)
    return CentroidClassifier(class_ids, centroids)


def centroid_classifier_predict(
    clf: CentroidClassifier, values: np.ndarray, grid: WavelengthGrid
) -> np.ndarray:
    """Nearest centroid by Euclidean distance; ties go to the lowest class id.

    Inputs are floored at 1e-6 I/F before continuum removal so that badly
    denoised spectra still classify (poorly) instead of aborting the
    evaluation.
    """
    values = np.maximum(np.asarray(values, dtype=np.float64), 1e-6)
    single = values.ndim == 1
    cr = continuum_remove_values(values.reshape(-1, values.shape[-1]), grid)
    d2 = (
        (cr * cr).sum(axis=1, keepdims=True)
        - 2.0 * cr @ clf.centroids.T
        + (clf.centroids * clf.centroids).sum(axis=1)
    )
    # argmin returns the first minimum; centroids are sorted by class id.
    preds = clf.class_ids[np.argmin(d2, axis=1)]
    return int(preds[0]) if single else preds


# ---------------------------------------------------------------------------
# classification metrics

@dataclass(frozen=True)
class MetricSet:
    accuracy: float
    macro_f1: float
    macro_precision: float
    macro_recall: float

    def as_dict(self) -> dict[str, float]:
        return {
            "accuracy": self.accuracy,
            "macro_f1": self.macro_f1,
            "macro_precision": self.macro_precision,
            "macro_recall": self.macro_recall,
        }


def classification_metrics(preds, labels) -> MetricSet:
    """Accuracy plus macro precision/recall/F1 over classes present in labels.

    Macro averages are unweighted means over the label classes; a class that
    is never predicted contributes precision 0.
    """
    preds = np.asarray(preds, dtype=np.int64)
    labels = np.asarray(labels, dtype=np.int64)
    if preds.shape != labels.shape or preds.ndim != 1:
        raise DataError(f"preds shape {preds.shape} does not match labels {labels.shape}")
    if preds.size == 0:
        raise DataError("empty prediction set")
    accuracy = float(np.mean(preds == labels))
    precisions, recalls, f1s = [], [], []
    for c in np.unique(labels):
        tp = float(np.sum((preds == c) & (labels == c)))
        fp = float(np.sum((preds == c) & (labels != c)))
        fn = float(np.sum((preds != c) & (labels == c)))
        p = tp / (tp + fp) if tp + fp > 0 else 0.0
        r = tp / (tp + fn)
        f = 2 * p * r / (p + r) if p + r > 0 else 0.0
        precisions.append(p)
        recalls.append(r)
        f1s.append(f)
    return MetricSet(
        accuracy=accuracy,
        macro_f1=float(np.mean(f1s)),
        macro_precision=float(np.mean(precisions)),
        macro_recall=float(np.mean(recalls)),
    )


def relative_metrics(method: MetricSet, ground_truth: MetricSet) -> MetricSet:
    """Element-wise ratio of method metrics to clean-data metrics."""
    gt = ground_truth.as_dict()
    zero = [k for k, v in gt.items() if v == 0]
    if zero:
        raise DataError(f"ground-truth metrics are zero: {zero}")
    m = method.as_dict()
    return MetricSet(**{k: m[k] / gt[k] for k in gt})


# ---------------------------------------------------------------------------
# ratioing and band-depth summary parameters

def ratio_values(values: np.ndarray, bland_values: np.ndarray) -> np.ndarray:
    """Divide channel-wise by the channel-wise median of the bland pool."""
    bland_values = np.asarray(bland_values, dtype=np.float64)
    if bland_values.ndim != 2 or bland_values.shape[0] == 0:
        raise DataError("bland pool must be a nonempty 2-D array")
    med = np.median(bland_values, axis=0)
    if np.any(med == 0):
        raise DataError("bland median has zero-valued channels")
    return np.asarray(values, dtype=np.float64) / med


def ratio_spectra(pixel: Spectrum, bland_pool) -> Spectrum:
    """Suppress shared continuum/residual structure via bland-median division."""
    values = np.stack([b.values for b in bland_pool]) if bland_pool else np.empty((0, 0))
    return replace(pixel, values=ratio_values(pixel.values, values))


@dataclass(frozen=True)
class BandDepthParam:
    """Absorption-strength summary parameter: centre plus two shoulders."""

    name: str
    left_um: float
    center_um: float
    right_um: float

    def __post_init__(self):
        if not self.left_um < self.center_um < self.right_um:
            raise ConfigError(
                f"{self.name}: wavelengths must satisfy left < center < right"
            )


def _sample_channel(values: np.ndarray, grid: WavelengthGrid, lam: float) -> tuple[np.ndarray, int]:
    """3-channel median around the channel nearest the target wavelength."""
    c = grid.nearest_channel(lam)
    w = grid.wavelengths
    spacing = abs(w[min(c + 1, grid.n_channels - 1)] - w[max(c - 1, 0)])
    if abs(w[c] - lam) > spacing:
        raise DataError(f"wavelength {lam} um is outside the grid coverage")
    seg = grid.segment_slices[grid.segment_of(c)]
    lo = max(c - 1, seg.start)
    hi = min(c + 2, seg.stop)
    return np.median(values[..., lo:hi], axis=-1), c


def band_depth_values(
    values: np.ndarray, p: BandDepthParam, grid: WavelengthGrid
) -> np.ndarray | float:
    """Band depth ``1 - R(center) / R*(center)``.

    ``R*`` is the straight line between the left and right shoulder samples,
    evaluated at the centre channel's wavelength.  Each sample is the
    3-channel median around the channel nearest the requested wavelength,
    so the anchors are the channel wavelengths, not the nominal parameter
    values; a perfectly linear spectrum therefore scores exactly 0.
    """
    values = np.asarray(values, dtype=np.float64)
    r_left, cl = _sample_channel(values, grid, p.left_um)
    r_center, cc = _sample_channel(values, grid, p.center_um)
    r_right, cr = _sample_channel(values, grid, p.right_um)
    segs = {grid.segment_of(c) for c in (cl, cc, cr)}
    if len(segs) != 1:
        raise DataError(f"{p.name}: shoulders and centre lie in different segments")
    w = grid.wavelengths
    t = (w[cc] - w[cl]) / (w[cr] - w[cl])
    r_star = r_left + t * (r_right - r_left)
    bd = 1.0 - r_center / r_star
    return float(bd) if bd.ndim == 0 else bd


def band_depth(s: Spectrum, p: BandDepthParam, grid: WavelengthGrid) -> float:
    return float(band_depth_values(s.values, p, grid))


def band_depth_table(
    values: np.ndarray, params, grid: WavelengthGrid
) -> np.ndarray:
    """(n_spectra, n_params) matrix of band depths."""
    values = np.asarray(values, dtype=np.float64)
    return np.stack([band_depth_values(values, p, grid) for p in params], axis=-1)


@dataclass(frozen=True)
class OutcropReport:
    """Per-pixel detection flags plus counts against an optional reference."""

    param_names: tuple[str, ...]
    band_depths: np.ndarray
    flags: np.ndarray
    n_detected: int
    n_true: int | None = None
    n_missed: int | None = None
    n_spurious: int | None = None


def outcrop_report(
    ds: Dataset,
    params,
    threshold: float,
    grid: WavelengthGrid,
    reference: Dataset | None = None,
) -> OutcropReport:
    """Flag pixels whose band depth exceeds the threshold on any parameter.

    With a reference dataset (typically the clean version of the same
    pixels) the report also counts true detections, missed detections and
    spurious detections relative to that reference.
    """
    params = tuple(params)
    bd = band_depth_table(ds.values, params, grid)
    flags = (bd > threshold).any(axis=-1)
    n_true = n_missed = n_spurious = None
    if reference is not None:
        if len(reference) != len(ds) or not np.array_equal(reference.ids, ds.ids):
            raise DataError("reference dataset is not aligned by spectrum id")
        ref_bd = band_depth_table(reference.values, params, grid)
        ref_flags = (ref_bd > threshold).any(axis=-1)
        n_true = int(np.sum(flags & ref_flags))
        n_missed = int(np.sum(~flags & ref_flags))
        n_spurious = int(np.sum(flags & ~ref_flags))
    return OutcropReport(
        param_names=tuple(p.name for p in params),
        band_depths=bd,
        flags=flags,
        n_detected=int(flags.sum()),
        n_true=n_true,
        n_missed=n_missed,
        n_spurious=n_spurious,
    )


# ---------------------------------------------------------------------------
# report container and rendering

@dataclass(frozen=True)
class MethodEval:
    method: str
    denoise_mse: float | None
    absolute: MetricSet
    relative: MetricSet


@dataclass(frozen=True)
class EvalReport:
    ground_truth: MetricSet
    methods: tuple[MethodEval, ...]

    def method(self, name: str) -> MethodEval:
        for m in self.methods:
            if m.method == name:
                return m
        raise KeyError(name)


def evaluate_methods(
    clean_test: Dataset,
    denoised_by_method: dict[str, Dataset],
    classifier: CentroidClassifier,
    grid: WavelengthGrid,
) -> EvalReport:
    """Score each method's denoised test set against clean-data performance."""
    gt_preds = centroid_classifier_predict(classifier, clean_test.values, grid)
    gt_metrics = classification_metrics(gt_preds, clean_test.labels)
    methods = []
    for name, ds in denoised_by_method.items():
        preds = centroid_classifier_predict(classifier, ds.values, grid)
        absolute = classification_metrics(preds, ds.labels)
        methods.append(
            MethodEval(
                method=name,
                denoise_mse=denoise_mse(ds, clean_test),
                absolute=absolute,
                relative=relative_metrics(absolute, gt_metrics),
            )
        )
    return EvalReport(ground_truth=gt_metrics, methods=tuple(methods))


def report_table(report: EvalReport) -> str:
    """Human-readable table: MSE column plus relative classification columns."""
    header = (
        f"{'Data':<22} {'MSE':>12} {'Rel.Accuracy':>13} {'Rel.F1':>8} "
        f"{'Rel.Precision':>14} {'Rel.Recall':>11}"
    )
    lines = [header, "-" * len(header)]
    lines.append(
        f"{'ground_truth':<22} {'N/A':>12} {1.0:>13.2f} {1.0:>8.2f} {1.0:>14.2f} {1.0:>11.2f}"
    )
    for m in report.methods:
        mse = f"{m.denoise_mse:.4e}" if m.denoise_mse is not None else "N/A"
        r = m.relative
        lines.append(
            f"{m.method:<22} {mse:>12} {r.accuracy:>13.2f} {r.macro_f1:>8.2f} "
            f"{r.macro_precision:>14.2f} {r.macro_recall:>11.2f}"
        )
    return "\n".join(lines) + "\n"


def report_csv(report: EvalReport) -> str:
    """Machine-readable report: absolute and relative metrics per method."""
    cols = [
        "method", "denoise_mse",
        "accuracy", "macro_f1", "macro_precision", "macro_recall",
        "rel_accuracy", "rel_macro_f1", "rel_macro_precision", "rel_macro_recall",
    ]
    lines = [",".join(cols)]
    gt = report.ground_truth
    lines.append(
        "ground_truth,,"
        + ",".join(f"{v:.10e}" for v in gt.as_dict().values())
        + ",1,1,1,1"
    )
    for m in report.methods:
        mse = f"{m.denoise_mse:.10e}" if m.denoise_mse is not None else ""
        a, r = m.absolute.as_dict(), m.relative.as_dict()
        lines.append(
            f"{m.method},{mse},"
            + ",".join(f"{v:.10e}" for v in a.values())
            + ","
            + ",".join(f"{v:.10e}" for v in r.values())
        )
    return "\n".join(lines) + "\n"
