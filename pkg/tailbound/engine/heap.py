"""ResultHeap：保留 k 個最小平方距離的有界 max-heap。"""

from __future__ import annotations

import heapq
import math
from enum import Enum

from tailbound.exceptions import InvalidParameterError


class EntryKind(str, Enum):
    EXACT = "exact"
    UPPER = "upper"     # batch_ub：上界暫存，之後由精確距離取代


class ResultHeap:
    """以 (距離, id) 字典序比較的 top-k；同距離以較小 id 優先。

    heapq 存 (−距離, −id)，堆頂即目前最差的項目。同一 id 只保留一筆，
    精確距離會取代同 id 的上界項目。
    """

    def __init__(self, k: int):
        if k < 1:
            raise InvalidParameterError(f"k 必須 >= 1，收到 {k}")
        self.k = k
        self._heap: list[tuple[float, int]] = []
        self._entries: dict[int, tuple[float, EntryKind]] = {}

    def __len__(self) -> int:
        return len(self._heap)

    def __contains__(self, cand_id: int) -> bool:
        return cand_id in self._entries

    @property
    def full(self) -> bool:
        return len(self._heap) >= self.k

    @property
    def threshold(self) -> float:
        """d_k：堆滿時為最大距離，否則 +∞。"""
        if not self.full:
            return math.inf
        return -self._heap[0][0]

    @property
    def upper_count(self) -> int:
        return sum(1 for _, kind in self._entries.values() if kind == EntryKind.UPPER)

    def kind_of(self, cand_id: int) -> EntryKind | None:
        entry = self._entries.get(cand_id)
        return entry[1] if entry else None

    def _admits(self, dist: float, cand_id: int) -> bool:
        if not self.full:
            return True
        worst_dist, worst_neg_id = -self._heap[0][0], self._heap[0][1]
        return (dist, cand_id) < (worst_dist, -worst_neg_id)

    def _insert(self, dist: float, cand_id: int, kind: EntryKind) -> None:
        if self.full:
            _, neg_id = heapq.heapreplace(self._heap, (-dist, -cand_id))
            del self._entries[-neg_id]
        else:
            heapq.heappush(self._heap, (-dist, -cand_id))
        self._entries[cand_id] = (dist, kind)

    def _replace(self, dist: float, cand_id: int, kind: EntryKind) -> None:
        # 同 id 的值只會變小，重建即可（k 很小）
        self._heap = [(-dist, -cand_id) if -neg_id == cand_id else (neg_d, neg_id) for neg_d, neg_id in self._heap]
        heapq.heapify(self._heap)
        self._entries[cand_id] = (dist, kind)

    def push_exact(self, cand_id: int, dist: float) -> bool:
        """推入精確距離；回傳是否留在堆中。"""
        current = self._entries.get(cand_id)
        if current is not None:
            if current[1] == EntryKind.EXACT:
                return True
            self._replace(dist, cand_id, EntryKind.EXACT)
            return True
        if not self._admits(dist, cand_id):
            return False
        self._insert(dist, cand_id, EntryKind.EXACT)
        return True

    def push_upper(self, cand_id: int, bound: float) -> bool:
        """推入上界項目；已有精確或更緊的上界時不變。"""
        current = self._entries.get(cand_id)
        if current is not None:
            if current[1] == EntryKind.UPPER and bound < current[0]:
                self._replace(bound, cand_id, EntryKind.UPPER)
            return True
        if not self._admits(bound, cand_id):
            return False
        self._insert(bound, cand_id, EntryKind.UPPER)
        return True

    def evict(self, cand_id: int) -> bool:
        """移除某 id 的上界項目（該候選已被剪枝）。精確項目不移除。"""
        current = self._entries.get(cand_id)
        if current is None or current[1] != EntryKind.UPPER:
            return False
        self._heap = [item for item in self._heap if -item[1] != cand_id]
        heapq.heapify(self._heap)
        del self._entries[cand_id]
        return True

    def results(self) -> list[tuple[int, float]]:
        """依 (距離, id) 遞增排序的 (id, 距離)；要求全部為精確項目。"""
        if self.upper_count:
            raise InvalidParameterError(f"結果堆仍有 {self.upper_count} 筆上界項目")
        return sorted(((i, d) for i, (d, _) in self._entries.items()), key=lambda item: (item[1], item[0]))
