"""Reproducible Rademacher and Steinhaus random multiplicative functions.

Per-prime values come from a counter-style hash of (seed, p), not from a
sequential stream, so evaluation order, laziness and parallelism cannot
change a realization.  Rademacher values are the integers +-1 (and f is
supported on the squarefree integers); Steinhaus values are complex of
modulus 1 and f is completely multiplicative.
"""

from __future__ import annotations

from enum import Enum

import numpy as np

from .sieve import PrimeTables


class Model(str, Enum):
    RADEMACHER = "rademacher"
    STEINHAUS = "steinhaus"


_GOLDEN = np.uint64(0x9E3779B97F4A7C15)
_OFFSET = np.uint64(0x85EBCA6B27D4EB4F)


def _mix64(x: np.ndarray) -> np.ndarray:
    """murmur3 fmix64 finalizer, vectorized over uint64 (wrapping arithmetic)."""
    x = x.astype(np.uint64, copy=True)
    x ^= x >> np.uint64(33)
    x *= np.uint64(0xFF51AFD7ED558CCD)
    x ^= x >> np.uint64(33)
    x *= np.uint64(0xC4CEB9FE1A85EC53)
    x ^= x >> np.uint64(33)
    return x


def _uniform_bits(seeds, primes) -> np.ndarray:
    """64 uniform bits per (seed, prime) pair, shape (len(seeds), len(primes))."""
    s = np.asarray(seeds, dtype=np.int64).astype(np.uint64).reshape(-1, 1)
    p = np.asarray(primes, dtype=np.int64).astype(np.uint64).reshape(1, -1)
    return _mix64(_mix64(p * _GOLDEN + _OFFSET) ^ s)


def prime_value_matrix(model: Model, seeds, primes) -> np.ndarray:
    """f(p) for every (seed, prime) pair; int8 for Rademacher, complex128 else.

    The Steinhaus angle is 2*pi*u/2^64 for the 64 hashed bits u, i.e. exactly
    uniform on the circle up to the 2^-64 discretization.
    """
    bits = _uniform_bits(seeds, primes)
    if Model(model) is Model.RADEMACHER:
        return np.where(bits >> np.uint64(63), 1, -1).astype(np.int8)
    theta = bits.astype(np.float64) * (2.0 ** -64) * (2.0 * np.pi)
    return np.cos(theta) + 1j * np.sin(theta)


class SampledFunction:
    """One seeded realization of a random multiplicative function.

    All prime values up to ``tables.limit`` are materialized at construction
    (counter-based, so the same (model, seed) always yields the same values)
    and the instance is immutable afterwards; concurrent reads are safe.
    """

    def __init__(self, model, seed: int, tables: PrimeTables, _values=None):
        self.model = Model(model)
        self.seed = int(seed)
        self.tables = tables
        if _values is None:
            _values = prime_value_matrix(self.model, [self.seed], tables.primes)[0]
        self._values = _values

    # -- conditioning support ------------------------------------------------

    def resampled_above(self, y: int, seed2: int) -> "SampledFunction":
        """Copy of this realization with f(p) redrawn (from seed2) for p > y.

        Values at primes <= y are kept bit-identical, which realizes
        conditioning on the small-prime sigma-algebra exactly.
        """
        k = self.tables.prime_count_upto(y)
        fresh = prime_value_matrix(self.model, [int(seed2)], self.tables.primes[k:])[0]
        vals = self._values.copy()
        vals[k:] = fresh
        return SampledFunction(self.model, self.seed, self.tables, _values=vals)

    # -- point evaluation ----------------------------------------------------

    def _prime_index(self, p: int) -> int:
        idx = int(np.searchsorted(self.tables.primes, p))
        if idx >= len(self.tables.primes) or self.tables.primes[idx] != p:
            raise ValueError(f"{p} is not a prime <= {self.tables.limit}")
        return idx

    def prime_value(self, p: int):
        """f(p); an int in {+1,-1} for Rademacher, a unit complex for Steinhaus."""
        v = self._values[self._prime_index(p)]
        return int(v) if self.model is Model.RADEMACHER else complex(v)

    def value_at(self, n: int):
        """f(n) from the prime factorization; f(1) = 1.

        Rademacher vanishes on non-squarefree n; Steinhaus is completely
        multiplicative.
        """
        if not 1 <= n <= self.tables.limit:
            raise ValueError(f"n={n} outside [1, {self.tables.limit}]")
        spf = self.tables.spf
        m = n
        if self.model is Model.RADEMACHER:
            out = 1
            while m > 1:
                p = int(spf[m])
                m //= p
                if m % p == 0:
                    return 0
                out *= int(self._values[self._prime_index(p)])
            return out
        out = complex(1.0)
        while m > 1:
            p = int(spf[m])
            v = complex(self._values[self._prime_index(p)])
            while m % p == 0:
                m //= p
                out *= v
        return out

    # -- bulk evaluation -----------------------------------------------------

    def values_up_to(self, y: int) -> np.ndarray:
        """Array ``fv`` of length y+1 with ``fv[n] = f(n)`` (``fv[0] = 0``).

        Sieved multiplicatively in O(y log log y): one strided multiply per
        prime power.  Rademacher output is int8 (exact), Steinhaus complex128.
        """
        if not 1 <= y <= self.tables.limit:
            raise ValueError(f"y={y} outside [1, {self.tables.limit}]")
        primes = self.tables.primes
        k = self.tables.prime_count_upto(y)
        if self.model is Model.RADEMACHER:
            fv = np.ones(y + 1, dtype=np.int8)
            for i in range(k):
                p = int(primes[i])
                fv[p::p] *= self._values[i]
                if p * p <= y:
                    fv[p * p :: p * p] = 0
        else:
            fv = np.ones(y + 1, dtype=np.complex128)
            for i in range(k):
                p = int(primes[i])
                q = p
                while q <= y:
                    fv[q::q] *= self._values[i]
                    q *= p
        fv[0] = 0
        return fv

    def prefix_sums(self, y: int) -> np.ndarray:
        """A[k] = sum of f(m) for m <= k, 0 <= k <= y, with A[0] = 0.

        Rademacher sums are exact int64; Steinhaus sums are complex128
        (numpy pairwise cumulation, deterministic).
        """
        fv = self.values_up_to(y)
        if self.model is Model.RADEMACHER:
            return np.concatenate(([0], np.cumsum(fv[1:], dtype=np.int64)))
        return np.concatenate(([0.0 + 0.0j], np.cumsum(fv[1:])))


def value_matrix(model: Model, seeds, y: int, tables: PrimeTables) -> np.ndarray:
    """f(n) for n = 0..y per seed, shape (len(seeds), y+1); column ops per prime.

    Rademacher rows agree bit-for-bit with
    ``SampledFunction(...).values_up_to``; Steinhaus rows agree up to 1-ulp
    rounding (the broadcast multiply may fuse differently than the scalar one).
    """
    model = Model(model)
    seeds = np.asarray(seeds, dtype=np.int64)
    k = tables.prime_count_upto(y)
    pv = prime_value_matrix(model, seeds, tables.primes[:k])
    if model is Model.RADEMACHER:
        fv = np.ones((len(seeds), y + 1), dtype=np.int8)
        for i in range(k):
            p = int(tables.primes[i])
            fv[:, p::p] *= pv[:, i : i + 1]
            if p * p <= y:
                fv[:, p * p :: p * p] = 0
    else:
        fv = np.ones((len(seeds), y + 1), dtype=np.complex128)
        for i in range(k):
            p = int(tables.primes[i])
            q = p
            while q <= y:
                fv[:, q::q] *= pv[:, i : i + 1]
                q *= p
    fv[:, 0] = 0
    return fv


def partial_sum_matrix(model: Model, seeds, y: int, tables: PrimeTables) -> np.ndarray:
    """Full partial sums A_f(y) = sum_{m<=y} f(m), one per seed."""
    fv = value_matrix(model, seeds, y, tables)
    if Model(model) is Model.RADEMACHER:
        return fv[:, 1:].astype(np.int64).sum(axis=1)
    return fv[:, 1:].sum(axis=1)
