"""Lifted constraint system of a signature matrix and its surrogate.

An L x N signature matrix S enters the identifiability event only through
the linear system built from the columnwise outer products s_n s_n^T:

* ``A1 = S * S`` entrywise (L x N), the diagonal part;
* ``A2`` (d x N, d = L(L-1)/2), whose row for the pair (i, j), j < i, is the
  entrywise product of rows i and j of S -- the strict lower triangle of
  each outer product.

For +-1-valued signatures A1 is the all-ones matrix, so the stacked system
[A1; A2] can be compressed to [1; A2] without changing the null space.  The
semi-random surrogate replaces A2 by a right rotationally-invariant matrix
with a prescribed spectrum, keeping the all-ones row.
"""

import csv
from dataclasses import dataclass
from typing import List, Tuple

import numpy as np

from .rng import Stream, derive_seed
from .signatures import SignatureMatrix


class InvalidModeError(ValueError):
    """Reduced stacking requested for a signature that is not +-1 valued."""


@dataclass(frozen=True)
class LiftedSystem:
    """The pair (A1, A2) plus the pair ordering of A2's rows."""

    A1: np.ndarray
    A2: np.ndarray
    pair_index: Tuple[Tuple[int, int], ...]
    source: SignatureMatrix

    @property
    def L(self) -> int:
        return self.A1.shape[0]

    @property
    def N(self) -> int:
        return self.A1.shape[1]

    @property
    def d(self) -> int:
        return self.A2.shape[0]


def lift(S: SignatureMatrix) -> LiftedSystem:
    """Build A1 and A2 from a signature draw.

    Pair rows are ordered lexicographically by (j, i) with j < i, i.e. all
    pairs with j = 0 first.  This ordering is part of the file contract and
    must never change.
    """
    E = S.entries
    L = E.shape[0]
    A1 = E * E
    j_idx, i_idx = np.triu_indices(L, k=1)  # row-major over j < i == (j, i)-lex
    A2 = E[i_idx, :] * E[j_idx, :]
    pairs = tuple(zip(i_idx.tolist(), j_idx.tolist()))
    return LiftedSystem(A1, A2, pairs, S)


def stacked_constraints(sys: LiftedSystem, mode: str = "full") -> np.ndarray:
    """Constraint matrix whose null space defines the identifiability event.

    ``full``    -> [A1; A2], (L+d) x N.
    ``reduced`` -> [1; A2], (1+d) x N; requires A1 to be exactly all ones,
    in which case both stacks have identical null spaces.
    """
    if mode == "full":
        return np.vstack([sys.A1, sys.A2])
    if mode == "reduced":
        if not np.all(sys.A1 == 1.0):
            raise InvalidModeError(
                "reduced stacking needs S*S == 1 everywhere (+-1 signatures)")
        return np.vstack([np.ones((1, sys.N)), sys.A2])
    raise ValueError(f"unknown stacking mode {mode!r}")


def singular_values(M: np.ndarray) -> np.ndarray:
    """Singular values in descending order (length min(rows, cols))."""
    M = np.asarray(M, dtype=np.float64)
    if M.size == 0:
        return np.zeros(min(M.shape))
    return np.linalg.svd(M, compute_uv=False)


def numerical_rank(M: np.ndarray, rel_tol: float = 1e-10) -> int:
    """Count of singular values above rel_tol * max(shape) * sigma_max."""
    if rel_tol <= 0:
        raise ValueError("rel_tol must be positive")
    M = np.asarray(M, dtype=np.float64)
    if M.size == 0:
        return 0
    sv = singular_values(M)
    if sv[0] == 0.0:
        return 0
    return int(np.count_nonzero(sv > rel_tol * max(M.shape) * sv[0]))


def null_space_basis(M: np.ndarray, rel_tol: float = 1e-10) -> np.ndarray:
    """Orthonormal basis (columns) of the numerical null space of M."""
    M = np.asarray(M, dtype=np.float64)
    n = M.shape[1]
    if M.size == 0:
        return np.eye(n)
    u, s, vt = np.linalg.svd(M)
    cut = rel_tol * max(M.shape) * (s[0] if s.size else 0.0)
    r = int(np.count_nonzero(s > cut))
    return vt[r:].T.copy()


def row_compress(M: np.ndarray, rel_tol: float = 1e-10) -> np.ndarray:
    """Orthonormal-row matrix with the same null space as M (rank many rows)."""
    M = np.asarray(M, dtype=np.float64)
    if M.size == 0:
        return np.zeros((0, M.shape[1]))
    s, vt = np.linalg.svd(M, compute_uv=True)[1:]
    cut = rel_tol * max(M.shape) * (s[0] if s.size else 0.0)
    r = int(np.count_nonzero(s > cut))
    return vt[:r].copy()


def hadamard_rank_oracle(sampled_row_indices) -> int:
    """Rank of the Hadamard A2 block, combinatorially.

    In Sylvester indexing the entrywise product of Hadamard rows i and j is
    the Hadamard row indexed i XOR j, so A2's distinct rows correspond to
    distinct pairwise XOR values, and duplicated XORs are duplicated rows.
    """
    idx = np.asarray(sampled_row_indices, dtype=np.int64)
    if idx.size != np.unique(idx).size:
        raise ValueError("row indices must be distinct")
    if idx.size < 2:
        return 0
    x = np.bitwise_xor.outer(idx, idx)
    iu = np.triu_indices(idx.size, k=1)
    return int(np.unique(x[iu]).size)


@dataclass(frozen=True)
class SemiRandomSystem:
    """All-ones row stacked over a right rotationally-invariant block."""

    matrix: np.ndarray          # (1+d) x N
    spectrum: np.ndarray        # the d prescribed singular values
    seed: int

    @property
    def N(self) -> int:
        return self.matrix.shape[1]

    @property
    def d(self) -> int:
        return self.matrix.shape[0] - 1

    @property
    def block(self) -> np.ndarray:
        return self.matrix[1:]


def haar_orthogonal(n: int, seed: int) -> np.ndarray:
    """Haar-distributed n x n orthogonal matrix.

    QR of an IID standard-normal matrix, columns rescaled so the triangular
    factor has positive diagonal (the sign correction that makes the
    distribution exactly Haar).
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    g = Stream(derive_seed("haar", n, seed)).normal(n * n).reshape(n, n)
    q, r = np.linalg.qr(g)
    signs = np.sign(np.diag(r))
    signs[signs == 0.0] = 1.0
    return q * signs[None, :]


def semi_random_system(spectrum, N: int, seed: int) -> SemiRandomSystem:
    """Surrogate system [1; A_RI] with prescribed singular values.

    A_RI embeds the spectrum on the diagonal and applies a Haar rotation on
    the right; the left factor is the identity, which cannot change the null
    space of the stacked system.
    """
    spectrum = np.asarray(spectrum, dtype=np.float64).ravel()
    d = spectrum.size
    if d > N:
        raise ValueError(f"spectrum length {d} exceeds N={N}")
    if np.any(spectrum < 0):
        raise ValueError("singular values must be non-negative")
    V = haar_orthogonal(N, seed)
    block = spectrum[:, None] * V[:d, :]
    matrix = np.vstack([np.ones((1, N)), block])
    return SemiRandomSystem(matrix, spectrum.copy(), seed)


def write_spectrum_csv(path, spectrum) -> None:
    """Single-column CSV with header ``sigma``."""
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["sigma"])
        for v in np.asarray(spectrum, dtype=np.float64).ravel():
            w.writerow([repr(float(v))])


def read_spectrum_csv(path) -> np.ndarray:
    with open(path, newline="") as fh:
        r = csv.reader(fh)
        header = next(r)
        if header != ["sigma"]:
            raise ValueError(f"{path}: expected header ['sigma'], got {header}")
        return np.array([float(row[0]) for row in r], dtype=np.float64)
