"""Deterministic random streams used everywhere in this package.

The generator is SplitMix64: state advances by the 64-bit golden-ratio
constant and each output is the standard finalizer

    z  = state
    z ^= z >> 30;  z *= 0xBF58476D1CE4E5B9
    z ^= z >> 27;  z *= 0x94D049BB133111EB
    z ^= z >> 31

(all arithmetic mod 2**64).  It is counter-based, so per-trial streams are
derived by mixing, not by jumping, and results are identical on every
platform and every numpy build.

Derived quantities are fixed here once and for all:

* uniforms in [0, 1) take the top 53 bits: ``(u >> 11) * 2**-53``;
* standard normals use the Marsaglia polar transform, consuming the
  uniform stream in blocks of 1024 candidate pairs and keeping accepted
  pairs in stream order;
* bounded integers use rejection below the largest multiple of the bound,
  so they are exactly uniform;
* subsets are the first ``k`` entries of a partial Fisher-Yates shuffle.

Changing any of these rules invalidates every golden value in the test
suite; do not.
"""

import numpy as np

_MASK = (1 << 64) - 1
_GOLDEN = 0x9E3779B97F4A7C15
_MIX1 = 0xBF58476D1CE4E5B9
_MIX2 = 0x94D049BB133111EB


def mix64(z: int) -> int:
    """SplitMix64 finalizer on a Python int (mod 2**64)."""
    z &= _MASK
    z = ((z ^ (z >> 30)) * _MIX1) & _MASK
    z = ((z ^ (z >> 27)) * _MIX2) & _MASK
    return z ^ (z >> 31)


def derive_seed(*parts) -> int:
    """Mix an ordered tuple of components into one 64-bit stream seed.

    Components may be ints (taken mod 2**64) or strings (FNV-1a hashed).
    The fold is  h <- mix64(h ^ mix64(part + i*GOLDEN))  over enumerated
    parts, so both values and positions matter.
    """
    h = 0x8AD8AB3A2A1C4D9F
    for i, p in enumerate(parts):
        if isinstance(p, str):
            v = 0xCBF29CE484222325
            for byte in p.encode("utf-8"):
                v = ((v ^ byte) * 0x100000001B3) & _MASK
        else:
            v = int(p) & _MASK
        h = mix64(h ^ mix64((v + i * _GOLDEN) & _MASK))
    return h


class Stream:
    """A seeded SplitMix64 stream with vectorized draws."""

    def __init__(self, seed: int):
        self._state = int(seed) & _MASK

    def u64(self, n: int) -> np.ndarray:
        """Next ``n`` raw 64-bit outputs as a uint64 array."""
        start = self._state
        self._state = (start + n * _GOLDEN) & _MASK
        with np.errstate(over="ignore"):
            z = (np.uint64(start)
                 + np.arange(1, n + 1, dtype=np.uint64) * np.uint64(_GOLDEN))
            z ^= z >> np.uint64(30)
            z *= np.uint64(_MIX1)
            z ^= z >> np.uint64(27)
            z *= np.uint64(_MIX2)
            z ^= z >> np.uint64(31)
        return z

    def next_u64(self) -> int:
        self._state = (self._state + _GOLDEN) & _MASK
        return mix64(self._state)

    def uniform(self, n: int) -> np.ndarray:
        """``n`` doubles uniform on [0, 1), top-53-bit rule."""
        return (self.u64(n) >> np.uint64(11)).astype(np.float64) * 2.0**-53

    def normal(self, n: int) -> np.ndarray:
        """``n`` IID standard normals via the Marsaglia polar method.

        Candidate pairs are drawn in fixed blocks of 1024 so the amount of
        stream consumed depends only on the accept/reject pattern, which is
        itself a pure function of the stream.
        """
        out = np.empty(n, dtype=np.float64)
        filled = 0
        while filled < n:
            u = self.uniform(2048)
            v1 = 2.0 * u[0::2] - 1.0
            v2 = 2.0 * u[1::2] - 1.0
            s = v1 * v1 + v2 * v2
            keep = (s < 1.0) & (s > 0.0)
            v1, v2, s = v1[keep], v2[keep], s[keep]
            f = np.sqrt(-2.0 * np.log(s) / s)
            pair = np.empty(2 * f.size, dtype=np.float64)
            pair[0::2] = v1 * f
            pair[1::2] = v2 * f
            take = min(pair.size, n - filled)
            out[filled:filled + take] = pair[:take]
            filled += take
        return out

    def randint(self, bound: int) -> int:
        """One integer uniform on [0, bound) by rejection (exact)."""
        if bound <= 0:
            raise ValueError("bound must be positive")
        limit = (1 << 64) - ((1 << 64) % bound)
        while True:
            u = self.next_u64()
            if u < limit:
                return u % bound

    def subset(self, n: int, k: int) -> np.ndarray:
        """``k`` distinct indices from range(n), uniform without replacement.

        First ``k`` steps of a Fisher-Yates shuffle of arange(n).
        """
        if not 0 <= k <= n:
            raise ValueError(f"need 0 <= k <= n, got k={k}, n={n}")
        a = list(range(n))
        for i in range(k):
            j = i + self.randint(n - i)
            a[i], a[j] = a[j], a[i]
        return np.array(a[:k], dtype=np.int64)

    def signs(self, n: int) -> np.ndarray:
        """``n`` IID entries from {+1, -1} (top bit of the raw output)."""
        return 1.0 - 2.0 * (self.u64(n) >> np.uint64(63)).astype(np.float64)
