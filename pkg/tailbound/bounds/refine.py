"""部分內積與 Cauchy–Schwarz 上下界。

‖q − x‖² = ‖q‖² + ‖x‖² − 2⟨q, x⟩。處理完前 m_ℓ 維得到部分內積 p 後，
剩下的內積以 |Σ_{j≥m_ℓ} q_j x_j| ≤ √(R_q R_x) 夾住：

    LB = ‖q‖² + ‖x‖² − 2(p + √(R_q R_x))
    UB = ‖q‖² + ‖x‖² − 2(p − √(R_q R_x))
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from tailbound.bounds.levels import LevelSpec
from tailbound.bounds.tails import TransformedVector
from tailbound.exceptions import InvalidParameterError, LevelSkipError


def bounds_from_partial(partial, norm_q, norm_x, tail_q, tail_x):
    """由部分內積與尾部能量計算 (LB, UB)；純量或 numpy 陣列皆可。"""
    # 捨入可能讓尾部能量變成 -1e-18，開根號前截到 0
    radical = np.sqrt(np.maximum(tail_q, 0.0) * np.maximum(tail_x, 0.0))
    base = norm_q + norm_x
    return base - 2.0 * (partial + radical), base - 2.0 * (partial - radical)


@dataclass(frozen=True)
class RefineState:
    """單一候選的 refinement 狀態。partial 以 float64 累加。"""

    partial: float
    level: int
    lb: float
    ub: float
    pruned: bool = False

    @classmethod
    def initial(cls, q: TransformedVector, x: TransformedVector) -> "RefineState":
        """ℓ = 0：尚未讀取任何維度，LB = (‖q‖−‖x‖)²、UB = (‖q‖+‖x‖)²。"""
        lb, ub = bounds_from_partial(0.0, q.norm_sq, x.norm_sq, q.tails[0], x.tails[0])
        return cls(partial=0.0, level=0, lb=float(lb), ub=float(ub))

    def mark_pruned(self) -> "RefineState":
        return replace(self, pruned=True)


def refine_step(
    state: RefineState,
    q: TransformedVector,
    x: TransformedVector,
    level: int,
    levels: LevelSpec,
) -> RefineState:
    """讀入第 level 層的係數，更新部分內積並收緊上下界。"""
    if state.pruned:
        raise InvalidParameterError("已剪枝的候選不可繼續 refine")
    if state.level != level - 1:
        raise LevelSkipError(f"refine_step 需要 state.level = {level - 1}，實際為 {state.level}")

    start, stop = levels.span(level)
    qc = np.asarray(q.coeffs[start:stop], dtype=np.float64)
    xc = np.asarray(x.coeffs[start:stop], dtype=np.float64)
    partial = state.partial + float(np.dot(qc, xc))
    lb, ub = bounds_from_partial(partial, q.norm_sq, x.norm_sq, q.tails[level], x.tails[level])
    return replace(state, partial=partial, level=level, lb=float(lb), ub=float(ub))
