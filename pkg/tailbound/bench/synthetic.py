"""合成資料集。"""

from __future__ import annotations

import numpy as np
from scipy.stats import ortho_group

from tailbound.exceptions import InvalidParameterError


def _check(n: int, d: int) -> None:
    if n < 1 or d < 1:
        raise InvalidParameterError(f"n / d 必須 >= 1，收到 n={n}, d={d}")


def decay_spectrum(d: int, decay: float = 6.0) -> np.ndarray:
    """特徵值 λ_j = e^{−decay·j/d}，j = 0..d−1。"""
    return np.exp(-decay * np.arange(d, dtype=np.float64) / d)


def rotated_gaussian(n: int, d: int, decay: float = 6.0, seed: int = 0) -> np.ndarray:
    """協方差特徵值指數衰減、再經隨機旋轉的高斯資料（能量不集中在前幾個座標）。"""
    _check(n, d)
    rng = np.random.default_rng(seed)
    z = rng.standard_normal((n, d)) * np.sqrt(decay_spectrum(d, decay))
    if d == 1:
        return z
    rotation = ortho_group.rvs(d, random_state=rng)
    return z @ rotation.T


def white_gaussian(n: int, d: int, seed: int = 0) -> np.ndarray:
    _check(n, d)
    return np.random.default_rng(seed).standard_normal((n, d))


def gaussian_blobs(n: int, d: int, n_centers: int = 8, spread: float = 0.1, seed: int = 0) -> np.ndarray:
    """n_centers 個群中心（標準常態）周圍的等向性高斯群。"""
    _check(n, d)
    if n_centers < 1:
        raise InvalidParameterError(f"n_centers 必須 >= 1，收到 {n_centers}")
    rng = np.random.default_rng(seed)
    centers = rng.standard_normal((n_centers, d))
    labels = rng.integers(n_centers, size=n)
    return centers[labels] + spread * rng.standard_normal((n, d))
