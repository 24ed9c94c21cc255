"""refinement 工作量計數。"""

from __future__ import annotations

from dataclasses import dataclass, field


@dataclass
class WorkCounter:
    """累計處理的維度項數 Σρᵢ 與候選數 N′。

    剪枝發生在第 ℓ 層之後的候選計為 m_ℓ 維（以整層為單位）。
    """

    dim: int
    terms: int = 0
    candidates: int = 0
    pruned: int = 0
    record_pruned: bool = False
    pruned_ids: list[int] = field(default_factory=list)

    @property
    def phi(self) -> float:
        """φ = Σρᵢ / (N′·d)。"""
        if self.candidates == 0:
            return 0.0
        return self.terms / (self.candidates * self.dim)

    def charge(self, n_candidates: int, dims: int) -> None:
        self.terms += n_candidates * dims

    def mark_pruned(self, ids) -> None:
        n = len(ids)
        self.pruned += n
        if self.record_pruned and n:
            self.pruned_ids.extend(int(i) for i in ids)

    def merge(self, other: "WorkCounter") -> "WorkCounter":
        """合併另一個計數器（例如同一查詢的多個 IVF list）。"""
        self.terms += other.terms
        self.candidates += other.candidates
        self.pruned += other.pruned
        self.pruned_ids.extend(other.pruned_ids)
        return self
