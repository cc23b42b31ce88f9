"""Desk-scale cross-supervision trainer on synthetic segmentation data.

Two per-pixel linear softmax classifiers train jointly: each sees the
labeled images with ground truth, and on unlabeled images each learns
from the other's (optionally uncertainty-boosted) pseudo labels,

    loss_1 = mean_L CE(p_1, y) + lambda * mean_U CE(p_1, boost(p_2)),

and symmetrically for the second model. The point is not to rival a real
segmentation network but to compare booster policies (none / uniform /
regional) under identical conditions in seconds, with bitwise-reproducible
trajectories.

Synthetic images are built from per-class Gaussian blob score fields
(labels = per-pixel argmax) rendered through a per-dataset class palette
with additive intensity noise. Per-pixel features are handcrafted: the
raw intensity channels, normalized row/column coordinates, and a 3x3
local mean of each intensity channel.

Reproducibility contract: everything is driven by ``numpy.random.Generator``
streams spawned from a single seed, the loop is single-threaded, and all
accumulation is float64, so identical config + seed gives identical
histories down to the bit.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Sequence

import numpy as np

from .booster import boost
from .metrics import ConfusionMatrix
from .tensors import ValidationError, argmax_labels, one_hot
from .voting import VicinitySpec, _window_bounds

CSV_HEADER = "policy,vicinity,seed,iter,miou"


class TrainingDiverged(RuntimeError):
    """Raised when a loss goes non-finite; carries the 1-based iteration."""

    def __init__(self, iteration: int, loss: float):
        super().__init__(f"non-finite loss {loss!r} at iteration {iteration}")
        self.iteration = iteration


@dataclass
class SynthDataset:
    """Synthetic image stack with a labeled/unlabeled index split."""

    features: np.ndarray  # (N, H, W, F) float64
    labels: np.ndarray  # (N, H, W) uint16
    labeled_idx: np.ndarray
    unlabeled_idx: np.ndarray
    classes: int
    seed: int

    @property
    def count(self) -> int:
        return self.features.shape[0]


@dataclass
class LinearModel:
    """Per-pixel linear softmax scorer with SGD momentum buffers."""

    weights: np.ndarray  # (K, F) float64
    bias: np.ndarray  # (K,) float64
    w_momentum: np.ndarray
    b_momentum: np.ndarray

    @classmethod
    def init(cls, classes: int, features: int, rng: np.random.Generator, scale: float = 0.1):
        w = scale * rng.standard_normal((classes, features))
        return cls(
            weights=w,
            bias=np.zeros(classes),
            w_momentum=np.zeros((classes, features)),
            b_momentum=np.zeros(classes),
        )


@dataclass
class SimConfig:
    """Everything a simulator run depends on, data generation included."""

    lam: float = 1.5  # trade-off weight on the cross-supervision term
    lr: float = 0.2
    momentum: float = 0.9
    weight_decay: float = 1e-4
    iters: int = 200
    batch: int = 4
    vicinity: VicinitySpec = field(default_factory=VicinitySpec)
    policy: str = "ruv"
    seeds: tuple = (0, 1, 2, 3, 4)
    eval_every: int = 20
    harden: bool = False
    images: int = 40
    height: int = 32
    width: int = 32
    classes: int = 3
    labeled_fraction: float = 0.1
    noise: float = 0.3
    val_images: int = 8

    def __post_init__(self):
        if self.lam < 0:
            raise ValidationError(f"lambda must be >= 0, got {self.lam}")
        if self.iters < 1:
            raise ValidationError(f"iteration count must be >= 1, got {self.iters}")


@dataclass
class TrainResult:
    model_a: LinearModel
    model_b: LinearModel
    history: list  # (iteration, miou) at each eval point
    losses: list  # (loss_a, loss_b) per iteration


def _box_mean(plane: np.ndarray, radius: int = 1) -> np.ndarray:
    """Local mean over a (2r+1)^2 window clipped to the image."""
    h, w = plane.shape
    sat = np.zeros((h + 1, w + 1))
    np.cumsum(plane, axis=0, out=sat[1:, 1:])
    np.cumsum(sat[1:, 1:], axis=1, out=sat[1:, 1:])
    r_lo, r_hi = _window_bounds(h, radius)
    c_lo, c_hi = _window_bounds(w, radius)
    sums = sat[r_hi][:, c_hi] - sat[r_lo][:, c_hi] - sat[r_hi][:, c_lo] + sat[r_lo][:, c_lo]
    area = (r_hi - r_lo)[:, None] * (c_hi - c_lo)[None, :]
    return sums / area


def generate(
    seed: int,
    count: int = 40,
    height: int = 32,
    width: int = 32,
    classes: int = 3,
    labeled_fraction: float = 0.1,
    noise: float = 0.3,
) -> SynthDataset:
    """Generate a synthetic segmentation dataset, fully determined by ``seed``.

    Each image draws one Gaussian blob score field per class; the label is
    the per-pixel argmax, giving smooth connected regions. Intensities come
    from a per-dataset class palette (two channels) plus Gaussian noise.
    """
    if classes < 2:
        raise ValidationError(f"need at least 2 classes, got {classes}")
    if count < 2:
        raise ValidationError(f"need at least 2 images, got {count}")
    rng = np.random.default_rng(seed)
    # Class colors sit on a fixed circle in the 2-channel intensity plane,
    # independent of the seed, so color -> class transfers across datasets
    # (training and held-out validation use different seeds).
    angles = 2.0 * np.pi * np.arange(classes) / classes
    palette = 0.5 + 0.35 * np.stack([np.cos(angles), np.sin(angles)], axis=1)
    rows = np.arange(height, dtype=np.float64)[:, None]
    cols = np.arange(width, dtype=np.float64)[None, :]
    row_feat = np.broadcast_to(rows / max(height - 1, 1), (height, width))
    col_feat = np.broadcast_to(cols / max(width - 1, 1), (height, width))
    features = np.empty((count, height, width, 6))
    labels = np.empty((count, height, width), dtype=np.uint16)
    min_share = 0.3 / classes
    for i in range(count):
        # Resample blob layouts until no class is starved of pixels; keeps
        # every image informative about all classes (deterministic per seed).
        best_lab, best_share = None, -1.0
        for _ in range(40):
            centers = rng.uniform([0, 0], [height, width], size=(classes, 2))
            sigmas = rng.uniform(0.25, 0.55, classes) * min(height, width)
            amps = rng.uniform(0.8, 1.25, classes)
            scores = np.empty((height, width, classes))
            for k in range(classes):
                d2 = (rows - centers[k, 0]) ** 2 + (cols - centers[k, 1]) ** 2
                scores[:, :, k] = amps[k] * np.exp(-d2 / (2.0 * sigmas[k] ** 2))
            lab = np.argmax(scores, axis=2)
            share = np.bincount(lab.ravel(), minlength=classes).min() / lab.size
            if share > best_share:
                best_lab, best_share = lab, share
            if share >= min_share:
                break
        lab = best_lab
        img = palette[lab] + rng.normal(0.0, noise, size=(height, width, 2))
        labels[i] = lab.astype(np.uint16)
        features[i] = np.stack(
            [
                img[:, :, 0],
                img[:, :, 1],
                row_feat,
                col_feat,
                _box_mean(img[:, :, 0]),
                _box_mean(img[:, :, 1]),
            ],
            axis=-1,
        )
    perm = rng.permutation(count)
    n_labeled = max(1, round(labeled_fraction * count))
    if n_labeled >= count:
        raise ValidationError("labeled fraction leaves no unlabeled images")
    return SynthDataset(
        features=features,
        labels=labels,
        labeled_idx=np.sort(perm[:n_labeled]),
        unlabeled_idx=np.sort(perm[n_labeled:]),
        classes=classes,
        seed=seed,
    )


def generate_from_config(config: SimConfig, seed: int) -> SynthDataset:
    return generate(
        seed,
        count=config.images,
        height=config.height,
        width=config.width,
        classes=config.classes,
        labeled_fraction=config.labeled_fraction,
        noise=config.noise,
    )


def _log_softmax(logits: np.ndarray) -> np.ndarray:
    z = logits - logits.max(axis=-1, keepdims=True)
    return z - np.log(np.exp(z).sum(axis=-1, keepdims=True))


def forward(model: LinearModel, features: np.ndarray) -> np.ndarray:
    """Per-pixel class probabilities for ``(..., F)`` features."""
    if not (np.isfinite(model.weights).all() and np.isfinite(model.bias).all()):
        raise ValidationError("model parameters are not finite")
    return np.exp(_log_softmax(features @ model.weights.T + model.bias))


def cross_entropy_and_grad(model: LinearModel, features: np.ndarray, targets: np.ndarray):
    """Mean CE of the model against per-row soft targets, with gradients.

    Returns ``(loss, grad_weights, grad_bias)`` for ``(n, F)`` features and
    ``(n, K)`` targets whose rows lie on the simplex.
    """
    logits = features @ model.weights.T + model.bias
    logp = _log_softmax(logits)
    loss = -float(np.mean((targets * logp).sum(axis=1)))
    d = (np.exp(logp) - targets) / targets.shape[0]
    return loss, d.T @ features, d.sum(axis=0)


def cross_entropy_hard(model: LinearModel, features: np.ndarray, labels: np.ndarray):
    """Mean CE against integer labels; bitwise-equal to the soft path on one-hots."""
    logits = features @ model.weights.T + model.bias
    logp = _log_softmax(logits)
    n = labels.shape[0]
    idx = np.arange(n)
    loss = -float(np.mean(logp[idx, labels]))
    d = np.exp(logp)
    d[idx, labels] -= 1.0
    d /= n
    return loss, d.T @ features, d.sum(axis=0)


def _sgd_step(model: LinearModel, grad_w, grad_b, config: SimConfig) -> None:
    model.w_momentum *= config.momentum
    model.w_momentum += grad_w + config.weight_decay * model.weights
    model.b_momentum *= config.momentum
    model.b_momentum += grad_b + config.weight_decay * model.bias
    model.weights -= config.lr * model.w_momentum
    model.bias -= config.lr * model.b_momentum


def evaluate_pair(model_a: LinearModel, model_b: LinearModel, data: SynthDataset) -> float:
    """Validation mean IoU of the two-model probability ensemble."""
    cm = ConfusionMatrix(data.classes)
    for i in range(data.count):
        probs = 0.5 * (forward(model_a, data.features[i]) + forward(model_b, data.features[i]))
        cm.update(data.labels[i], argmax_labels(probs))
    return cm.miou()


def _flat(data: SynthDataset, image_indices: np.ndarray):
    feats = data.features[image_indices]
    labs = data.labels[image_indices]
    return feats.reshape(-1, feats.shape[-1]), labs.reshape(-1).astype(np.intp)


def _pseudo_targets(model: LinearModel, data: SynthDataset, image_indices, config: SimConfig):
    """Boosted soft targets produced by ``model`` on a batch of unlabeled images."""
    targets = []
    for i in image_indices:
        pred = forward(model, data.features[i])
        soft = boost(pred, config.vicinity, config.policy).data
        if config.harden:
            soft = one_hot(argmax_labels(soft), data.classes).astype(np.float32)
        targets.append(soft.reshape(-1, data.classes))
    return np.concatenate(targets, axis=0).astype(np.float64)


def _run(data: SynthDataset, config: SimConfig, seed, cross_supervised: bool) -> TrainResult:
    if seed is None:
        seed = data.seed
    init_a, init_b, labeled_stream, unlabeled_stream = np.random.SeedSequence(seed).spawn(4)
    k = data.classes
    f = data.features.shape[-1]
    model_a = LinearModel.init(k, f, np.random.default_rng(init_a))
    model_b = LinearModel.init(k, f, np.random.default_rng(init_b))
    rng_l = np.random.default_rng(labeled_stream)
    rng_u = np.random.default_rng(unlabeled_stream)
    val = generate(
        data.seed + 1,
        count=config.val_images,
        height=data.features.shape[1],
        width=data.features.shape[2],
        classes=k,
        labeled_fraction=config.labeled_fraction,
        noise=config.noise,
    )
    use_unlabeled = cross_supervised and config.lam > 0.0
    history = []
    losses = []
    for t in range(1, config.iters + 1):
        batch_l = data.labeled_idx[rng_l.integers(0, len(data.labeled_idx), size=config.batch)]
        x_l, y_l = _flat(data, batch_l)
        loss_a, gw_a, gb_a = cross_entropy_hard(model_a, x_l, y_l)
        loss_b, gw_b, gb_b = cross_entropy_hard(model_b, x_l, y_l)
        if use_unlabeled:
            batch_u = data.unlabeled_idx[rng_u.integers(0, len(data.unlabeled_idx), size=config.batch)]
            x_u, _ = _flat(data, batch_u)
            # Pseudo labels from the pre-update parameters, both directions.
            targets_from_b = _pseudo_targets(model_b, data, batch_u, config)
            targets_from_a = _pseudo_targets(model_a, data, batch_u, config)
            lu_a, gwu_a, gbu_a = cross_entropy_and_grad(model_a, x_u, targets_from_b)
            lu_b, gwu_b, gbu_b = cross_entropy_and_grad(model_b, x_u, targets_from_a)
            loss_a += config.lam * lu_a
            loss_b += config.lam * lu_b
            gw_a = gw_a + config.lam * gwu_a
            gb_a = gb_a + config.lam * gbu_a
            gw_b = gw_b + config.lam * gwu_b
            gb_b = gb_b + config.lam * gbu_b
        if not (np.isfinite(loss_a) and np.isfinite(loss_b)):
            raise TrainingDiverged(t, loss_a if not np.isfinite(loss_a) else loss_b)
        _sgd_step(model_a, gw_a, gb_a, config)
        _sgd_step(model_b, gw_b, gb_b, config)
        losses.append((loss_a, loss_b))
        if t % config.eval_every == 0 or t == config.iters:
            history.append((t, evaluate_pair(model_a, model_b, val)))
    return TrainResult(model_a, model_b, history, losses)


def train_cps(data: SynthDataset, config: SimConfig, seed: int | None = None) -> TrainResult:
    """Cross-supervised training of a model pair on one dataset.

    ``seed`` drives initialization and batch sampling; it defaults to the
    dataset's own seed. Pass ``lam=0`` to cut the unlabeled term; the
    trajectory is then bitwise identical to :func:`train_supervised`.
    """
    return _run(data, config, seed, cross_supervised=True)


def train_supervised(data: SynthDataset, config: SimConfig, seed: int | None = None) -> TrainResult:
    """Labeled-only baseline sharing init and batch streams with train_cps."""
    return _run(data, config, seed, cross_supervised=False)


def ablate(
    data: SynthDataset | None,
    config: SimConfig,
    policies: Sequence[str],
    vicinities: Sequence[int] = (5,),
) -> list:
    """Grid of runs over policies, window sizes, and seeds.

    One row ``(policy, vicinity, seed, iteration, final_miou)`` per
    combination. Window sizes only apply to the regional policy; other
    policies record vicinity 0. With ``data=None`` every seed generates its
    own dataset from the config; otherwise the given dataset is reused and
    seeds vary only initialization and batching.
    """
    rows = []
    for seed in config.seeds:
        d = generate_from_config(config, seed) if data is None else data
        for policy in policies:
            sizes = vicinities if policy == "ruv" else (None,)
            for size in sizes:
                vic = (
                    VicinitySpec(size, size, config.vicinity.border)
                    if size is not None
                    else config.vicinity
                )
                run_cfg = replace(config, policy=policy, vicinity=vic)
                result = train_cps(d, run_cfg, seed=seed)
                it, miou = result.history[-1]
                rows.append((policy, size if size is not None else 0, seed, it, miou))
    return rows


def rows_to_csv(rows: Sequence[tuple]) -> str:
    """Render grid rows as CSV with 6-decimal mIoU values."""
    lines = [CSV_HEADER]
    for policy, vicinity, seed, iteration, value in rows:
        lines.append(f"{policy},{vicinity},{seed},{iteration},{value:.6f}")
    return "\n".join(lines) + "\n"
