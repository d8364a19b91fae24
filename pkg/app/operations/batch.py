# app/operations/batch.py

import numpy as np

from app.schemas.counts import CELL_NAMES, MarginsMixin


class CountsBatch(MarginsMixin):
    """
    A block of paired tables stored as a (B, 8) float array.

    Exposes the same ``x1``..``x8``, margin and transform attributes as
    PairedCounts, each as a length-B column, so the formula kernels and the
    symmetry transforms evaluate every table of the block in one call.
    """

    def __init__(self, table: np.ndarray):
        table = np.asarray(table, dtype=float)
        if table.ndim != 2 or table.shape[1] != 8:
            raise ValueError(f"Expected an array of shape (B, 8), got {table.shape}")
        self.table = table

    def __len__(self) -> int:
        return self.table.shape[0]

    def __getattr__(self, name):
        # x1..x8 resolve to columns; anything else is a genuine miss
        if name in CELL_NAMES:
            return self.table[:, CELL_NAMES.index(name)]
        raise AttributeError(name)

    @property
    def values(self) -> np.ndarray:
        return self.table

    def reindex(self, order) -> "CountsBatch":
        return CountsBatch(self.table[:, list(order)])

    def shifted(self, amount: float) -> "CountsBatch":
        return CountsBatch(self.table + amount)

    def substitute_zeros(self, value: float) -> "CountsBatch":
        return CountsBatch(np.where(self.table == 0, value, self.table))
