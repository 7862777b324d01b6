"""Random signature-matrix models.

Three models are supported for the L x N signature matrix S:

* ``gaussian``   -- IID standard normal entries;
* ``rademacher`` -- IID entries from {+1, -1} with equal probability;
* ``hadamard``   -- doubly sub-sampled Hadamard: L rows and N columns drawn
  uniformly without replacement from the full 2**q x 2**q Sylvester-Hadamard
  matrix.

Everything is a pure function of (model, L, N, seed); see rng.py for the
exact stream rules.  For the Hadamard model the sampled row indices are kept
on the result because the rank oracle in ``lifting`` needs them.
"""

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .rng import Stream, derive_seed

MODEL_KINDS = ("gaussian", "rademacher", "hadamard")


class ResourceLimitError(RuntimeError):
    """A requested object is too large for desk-scale use."""


@dataclass(frozen=True)
class SignatureModel:
    """Tagged signature model; ``n_full`` only applies to ``hadamard``."""

    kind: str
    n_full: Optional[int] = None

    def __post_init__(self):
        if self.kind not in MODEL_KINDS:
            raise ValueError(f"unknown model kind {self.kind!r}")
        if self.kind == "hadamard":
            n = self.n_full
            if n is None or n < 1 or (n & (n - 1)) != 0:
                raise ValueError("hadamard model needs n_full = 2**q >= 1")
        elif self.n_full is not None:
            raise ValueError(f"n_full is only meaningful for hadamard, not {self.kind}")

    @property
    def is_pm_one(self) -> bool:
        """True when every entry of a sample is +-1 (so S*S is all ones)."""
        return self.kind in ("rademacher", "hadamard")


GAUSSIAN = SignatureModel("gaussian")
RADEMACHER = SignatureModel("rademacher")


def subsampled_hadamard(n_full: int) -> SignatureModel:
    return SignatureModel("hadamard", n_full)


@dataclass(frozen=True)
class SignatureMatrix:
    """An L x N signature draw with its provenance."""

    entries: np.ndarray
    model: SignatureModel
    seed: int
    row_indices: Optional[np.ndarray] = None
    col_indices: Optional[np.ndarray] = None

    @property
    def L(self) -> int:
        return self.entries.shape[0]

    @property
    def N(self) -> int:
        return self.entries.shape[1]


def hadamard_full(q: int) -> np.ndarray:
    """The 2**q x 2**q Sylvester-Hadamard matrix, as float64.

    Entry (i, j) is (-1)**popcount(i & j), which is exactly the Sylvester
    recursion H_{2n} = [[H_n, H_n], [H_n, -H_n]] with H_1 = [[1]].
    """
    if q < 0:
        raise ValueError("q must be non-negative")
    if q > 16:
        raise ResourceLimitError(f"hadamard_full(q={q}) would need 4**{q} entries")
    idx = np.arange(1 << q, dtype=np.uint64)
    pop = np.bitwise_count(np.bitwise_and.outer(idx, idx))
    return np.where(pop % 2 == 0, 1.0, -1.0)


def _hadamard_entries(rows: np.ndarray, cols: np.ndarray) -> np.ndarray:
    pop = np.bitwise_count(np.bitwise_and.outer(rows.astype(np.uint64),
                                                cols.astype(np.uint64)))
    return np.where(pop % 2 == 0, 1.0, -1.0)


def sample_signature(model: SignatureModel, L: int, N: int, seed: int) -> SignatureMatrix:
    """Draw an L x N signature matrix; deterministic in (model, L, N, seed)."""
    if L < 1 or N < 1:
        raise ValueError(f"need L, N >= 1, got L={L}, N={N}")
    stream = Stream(derive_seed("signature", model.kind, L, N, seed))
    if model.kind == "gaussian":
        entries = stream.normal(L * N).reshape(L, N)
        return SignatureMatrix(entries, model, seed)
    if model.kind == "rademacher":
        entries = stream.signs(L * N).reshape(L, N)
        return SignatureMatrix(entries, model, seed)
    # hadamard: rows sampled first, then columns, from the same stream
    n_full = model.n_full
    if n_full < max(L, N):
        raise ValueError(f"n_full={n_full} < max(L, N)={max(L, N)}")
    rows = stream.subset(n_full, L)
    cols = stream.subset(n_full, N)
    entries = _hadamard_entries(rows, cols)
    return SignatureMatrix(entries, model, seed, row_indices=rows, col_indices=cols)


def write_matrix_txt(path, M: np.ndarray) -> None:
    """Debug dump: header line ``L N`` then L whitespace-separated rows."""
    M = np.asarray(M, dtype=np.float64)
    with open(path, "w") as fh:
        fh.write(f"{M.shape[0]} {M.shape[1]}\n")
        for row in M:
            fh.write(" ".join(repr(float(v)) for v in row) + "\n")


def read_matrix_txt(path) -> np.ndarray:
    with open(path) as fh:
        header = fh.readline().split()
        if len(header) != 2:
            raise ValueError(f"{path}: expected header 'L N'")
        rows, cols = int(header[0]), int(header[1])
        data = np.loadtxt(fh, dtype=np.float64, ndmin=2)
    if data.shape != (rows, cols):
        raise ValueError(f"{path}: header says {rows}x{cols}, body is {data.shape}")
    return data
