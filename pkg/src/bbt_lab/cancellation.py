"""Layerwise cancellation ratios on butterfly intermediates and the input proxy."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .boolean_core import TruthTable, fwht
from .synthesis import DEFAULT_TAU, TernaryMask, heuristic_mask, multi_start_repair


def pair_ratio(a: float, b: float) -> float:
    """``min(|a+b|, |a-b|) / (|a| + |b|)``.

    Taken as the ``eps -> 0`` limit of ``min(...) / (|a| + |b| + eps)``, so an
    all-zero pair scores 0 while a half-zero pair still scores 1.
    """
    den = abs(a) + abs(b)
    if den == 0:
        return 0.0
    return min(abs(a + b), abs(a - b)) / den


def _pair_ratios(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    den = np.abs(a) + np.abs(b)
    num = np.minimum(np.abs(a + b), np.abs(a - b))
    out = np.zeros(np.broadcast(a, b).shape)
    np.divide(num, den, out=out, where=den > 0)
    return out


def _layer_pairs(v: np.ndarray, layer: int) -> tuple[np.ndarray, np.ndarray]:
    N = v.shape[-1]
    h = 1 << layer
    blocks = v.reshape(*v.shape[:-1], N // (2 * h), 2, h)
    lead = v.shape[:-1]
    return blocks[..., 0, :].reshape(*lead, -1), blocks[..., 1, :].reshape(*lead, -1)


@dataclass(frozen=True)
class CancellationReport:
    rho: tuple[float, ...]        # min over layer pairs of the propagated vectors
    rho_tilde: tuple[float, ...]  # median over layer pairs of the raw mask

    @property
    def rho_mean(self) -> float:
        return float(np.mean(self.rho))

    @property
    def rho_tilde_mean(self) -> float:
        return float(np.mean(self.rho_tilde))


def layer_cancellation(mask: TernaryMask) -> CancellationReport:
    rho, rho_t = layer_cancellation_batch(mask.w[None, :])
    return CancellationReport(tuple(float(x) for x in rho[0]), tuple(float(x) for x in rho_t[0]))


def layer_cancellation_batch(W: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Per-layer ``(rho, rho_tilde)`` for a batch of masks (rows of ``W``)."""
    W = np.asarray(W, dtype=np.int64)
    N = W.shape[-1]
    n = N.bit_length() - 1
    rho = np.empty((W.shape[0], n))
    rho_t = np.empty((W.shape[0], n))
    v = W.copy()
    for layer in range(n):
        a, b = _layer_pairs(v, layer)
        rho[:, layer] = _pair_ratios(a, b).min(axis=1)
        a0, b0 = _layer_pairs(W, layer)
        rho_t[:, layer] = np.median(_pair_ratios(a0, b0), axis=1)
        v = np.concatenate([a + b, a - b], axis=-1)
        v = _unpair(v, layer, N)
    return rho, rho_t


def _unpair(v: np.ndarray, layer: int, N: int) -> np.ndarray:
    # inverse of _layer_pairs after concatenating [a+b, a-b]
    h = 1 << layer
    half = N // 2
    top = v[..., :half].reshape(*v.shape[:-1], N // (2 * h), 1, h)
    bot = v[..., half:].reshape(*v.shape[:-1], N // (2 * h), 1, h)
    return np.concatenate([top, bot], axis=-2).reshape(*v.shape[:-1], N)


def pearson_or_none(x, y) -> float | None:
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    if len(x) < 2 or np.ptp(x) == 0 or np.ptp(y) == 0:
        return None
    return float(np.corrcoef(x, y)[0, 1])


def cancellation_support_correlation(certs, which: str = "rho_tilde") -> float | None:
    """Pearson r between the per-mask cancellation aggregate and support.

    ``which`` selects the input proxy (``rho_tilde``, median over raw mask
    pairs) or the propagated index (``rho``); both are averaged over layers.
    """
    certs = list(certs)
    if not certs:
        return None
    W = np.stack([c.mask.w for c in certs])
    rho, rho_t = layer_cancellation_batch(W)
    agg = (rho_t if which == "rho_tilde" else rho).mean(axis=1)
    return pearson_or_none(agg, [c.mask.support for c in certs])


@dataclass(frozen=True)
class RepairShift:
    size: int
    heuristic_mean: float   # mean input proxy of the Fourier-sign masks
    repaired_mean: float    # same, after multi-start repair
    changed: int            # functions whose final mask differs from the heuristic one
    changed_heuristic_mean: float | None
    changed_repaired_mean: float | None


def repair_proxy_shift(fids, n: int, tau: float = DEFAULT_TAU) -> RepairShift:
    """Compare the layer-averaged input proxy before and after repair over ``fids``."""
    H, R = [], []
    for fid in fids:
        f = TruthTable.from_fid(int(fid), n)
        H.append(heuristic_mask(fwht(f), tau).w)
        R.append(multi_start_repair(f, tau).mask.w)
    H, R = np.array(H), np.array(R)
    a = layer_cancellation_batch(H)[1].mean(axis=1)
    b = layer_cancellation_batch(R)[1].mean(axis=1)
    diff = np.any(H != R, axis=1)
    k = int(diff.sum())
    return RepairShift(len(a), float(a.mean()), float(b.mean()), k,
                       float(a[diff].mean()) if k else None, float(b[diff].mean()) if k else None)
