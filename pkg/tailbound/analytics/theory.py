"""成本模型與門檻分析的解析公式。

- expected_cost_fraction：φ 的漸近預測 1/α
- effective_alpha：查詢與資料壓縮程度不同時的有效 α
- margin / pruning_dimension：由 k-NN 門檻的 margin 推出預期處理維度
- DKW 工具：以經驗分佈的一致偏差界定樣本門檻
"""

from __future__ import annotations

import math

from scipy.special import ndtri

from tailbound.exceptions import InvalidParameterError


def _require_positive(**values: float) -> None:
    for name, value in values.items():
        if not value > 0:
            raise InvalidParameterError(f"{name} 必須 > 0，收到 {value}")


def expected_cost_fraction(alpha: float) -> float:
    """φ ≈ 1/α（常數 C ≈ 1）。"""
    _require_positive(alpha=alpha)
    return 1.0 / alpha


def effective_alpha(alpha_q: float, alpha_x: float) -> float:
    if alpha_q < 0 or alpha_x < 0:
        raise InvalidParameterError(f"alpha 必須 >= 0，收到 ({alpha_q}, {alpha_x})")
    return (alpha_q + alpha_x) / 2.0


def normal_quantile(prob: float) -> float:
    """標準常態分位數 Φ⁻¹（scipy ndtri，雙精度）。"""
    return float(ndtri(prob))


def margin(i: int, k: int, sigma: float, epsilon: float) -> float:
    """Δ_i = −σ·Φ⁻¹(k/(i+1) + ε)。"""
    if sigma < 0:
        raise InvalidParameterError(f"sigma 必須 >= 0，收到 {sigma}")
    arg = k / (i + 1) + epsilon
    if not 0.0 < arg < 1.0:
        raise InvalidParameterError(f"k/(i+1)+ε 必須落在 (0, 1)，收到 {arg}")
    if sigma == 0:
        return 0.0
    return -sigma * normal_quantile(arg)


def pruning_dimension(delta: float, c0: float, alpha: float, d: int) -> float:
    """預期處理維度 (d/α)·max(0, ln(C0/Δ))，上限為 d。"""
    _require_positive(delta=delta, c0=c0, alpha=alpha, d=d)
    return min(float(d), (d / alpha) * max(0.0, math.log(c0 / delta)))


def expected_speedup(p_verification_share: float, o_fraction_processed: float) -> float:
    """Amdahl 式預期加速：1 / ((1−p) + p·o)。"""
    p, o = p_verification_share, o_fraction_processed
    if not 0.0 <= p <= 1.0:
        raise InvalidParameterError(f"p 必須落在 [0, 1]，收到 {p}")
    if not 0.0 < o <= 1.0:
        raise InvalidParameterError(f"o 必須落在 (0, 1]，收到 {o}")
    return 1.0 / ((1.0 - p) + p * o)


def dkw_confidence(i: int, epsilon: float) -> float:
    """P(sup|F_i − F| ≤ ε) ≥ 1 − 2e^{−2iε²}（下限截到 0）。"""
    _require_positive(i=i, epsilon=epsilon)
    return max(0.0, 1.0 - 2.0 * math.exp(-2.0 * i * epsilon ** 2))


def uniform_epsilon(i: int, n_candidates: int, delta: float) -> float:
    """對 N′ 個樣本點同時成立、信心 1−δ 的 ε = √(ln(2N′/δ)/(2i))。"""
    _require_positive(i=i, n_candidates=n_candidates)
    if not 0.0 < delta < 1.0:
        raise InvalidParameterError(f"delta 必須落在 (0, 1)，收到 {delta}")
    return math.sqrt(math.log(2.0 * n_candidates / delta) / (2.0 * i))


def threshold_bounds(i: int, k: int, mu: float, sigma: float, epsilon: float) -> tuple[float, float]:
    """第 i 個候選之後 k-NN 門檻的區間 (μ + σΦ⁻¹(k/(i+1)−ε), μ + σΦ⁻¹(k/(i+1)+ε))。

    分位數參數截到 [0, 1]，端點因此可能為 ±∞。
    """
    if sigma < 0 or epsilon < 0:
        raise InvalidParameterError("sigma / epsilon 必須 >= 0")
    if sigma == 0:
        return mu, mu
    center = k / (i + 1)
    lo = normal_quantile(max(0.0, center - epsilon))
    hi = normal_quantile(min(1.0, center + epsilon))
    return mu + sigma * lo, mu + sigma * hi


def empirical_constant(phi: float, alpha: float) -> float:
    """成本模型的實測常數 C = φ·α̂。"""
    if phi < 0:
        raise InvalidParameterError(f"phi 必須 >= 0，收到 {phi}")
    _require_positive(alpha=alpha)
    return phi * alpha
