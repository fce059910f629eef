"""Correlation image reconstruction and 8-bit post-processing."""

from __future__ import annotations

import numpy as np

_DIAGONAL = np.eye(4, dtype=bool)
# cross-polarized cells within a basis: (H,V), (V,H), (D,A), (A,D)
_ERROR_CELLS = np.zeros((4, 4), dtype=bool)
_ERROR_CELLS[[0, 1, 2, 3], [1, 0, 3, 2]] = True


def _mask_array(masks) -> np.ndarray:
    if isinstance(masks, np.ndarray):
        return masks
    return np.stack([np.asarray(getattr(m, "cells", m)) for m in masks])


def spi_reconstruct(masks, intensities) -> np.ndarray:
    """Correlation image G(i,j) = <P I> - <P><I> over all shots.

    Parameters
    ----------
    masks : sequence of PatternMask or array of shape (shots, side, side)
    intensities : array of shape (shots,) or (shots, k)
        Bucket values per shot. A second axis reconstructs ``k`` images at
        once, returned with shape (k, side, side).
    """
    p = _mask_array(masks)
    y = np.asarray(intensities, dtype=float)
    if p.shape[0] == 0:
        raise ValueError("empty mask sequence")
    if y.shape[0] != p.shape[0]:
        raise ValueError(f"{p.shape[0]} masks but {y.shape[0]} intensities")
    flat = p.reshape(p.shape[0], -1).astype(float)
    n = flat.shape[0]
    yy = y.reshape(n, -1)
    corr = flat.T @ yy / n - np.outer(flat.mean(axis=0), yy.mean(axis=0))
    side = p.shape[1:]
    if y.ndim == 1:
        return corr[:, 0].reshape(side)
    return corr.T.reshape((-1,) + side)


def tally_intensities(counts: np.ndarray) -> np.ndarray:
    """Per-shot (all, correct, erroneous) coincidence totals, shape (shots, 3)."""
    counts = np.asarray(counts, dtype=float)
    return np.stack(
        [
            counts.sum(axis=(1, 2)),
            counts[:, _DIAGONAL].sum(axis=1),
            counts[:, _ERROR_CELLS].sum(axis=1),
        ],
        axis=1,
    )


def split_reconstructions(tallies, masks=None):
    """Return ``(G_all, G_cor, G_mask)`` from a TallySet.

    G_cor uses matched-polarization coincidences, G_mask the cross-polarized
    ones within a basis.
    """
    if len(tallies) == 0:
        raise ValueError("no tallies to reconstruct")
    if masks is None:
        masks = tallies.masks()
    g_all, g_cor, g_mask = spi_reconstruct(masks, tally_intensities(tallies.counts))
    return g_all, g_cor, g_mask


def trustworthy_image(g_cor: np.ndarray, g_mask: np.ndarray, clip: bool = True) -> np.ndarray:
    """G_cor - 3 G_mask with negative pixels set to zero.

    Under an intercept-resend attack G_mask carries a quarter of Eve's image
    and G_cor the remaining three quarters, so this cancels her part.
    """
    g_cor = np.asarray(g_cor, dtype=float)
    g_mask = np.asarray(g_mask, dtype=float)
    if g_cor.shape != g_mask.shape:
        raise ValueError(f"shape mismatch: {g_cor.shape} vs {g_mask.shape}")
    out = g_cor - 3.0 * g_mask
    return np.clip(out, 0.0, None) if clip else out


def render_8bit(image: np.ndarray) -> np.ndarray:
    """Clip negatives, scale so the maximum is 255, round half up."""
    img = np.clip(np.asarray(image, dtype=float), 0.0, None)
    if img.size == 0:
        raise ValueError("empty image")
    peak = img.max()
    if peak <= 0:
        return np.zeros(img.shape, dtype=np.uint8)
    return np.floor(img / peak * 255.0 + 0.5).astype(np.uint8)


def normalized_cross_correlation(a: np.ndarray, b: np.ndarray) -> float:
    """Zero-mean normalized cross-correlation (Pearson) of two images."""
    a = np.asarray(a, dtype=float).ravel()
    b = np.asarray(b, dtype=float).ravel()
    a = a - a.mean()
    b = b - b.mean()
    denom = np.sqrt(np.dot(a, a) * np.dot(b, b))
    return float(np.dot(a, b) / denom) if denom > 0 else 0.0
