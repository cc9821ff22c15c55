"""The central random sums: large-prime-factor partial sums and variances.

For an integer x, every n <= x whose largest prime factor P(n) exceeds
sqrt(x) factors uniquely as n = p*m with p prime, p^2 > x and m <= x/p.
The fast paths below exploit that: they only ever need full prefix sums
up to sqrt(x) plus one pass over the primes in (sqrt(x), x].

Boundary convention throughout: "p > sqrt(u)" is evaluated as p*p > u in
integer arithmetic, equivalently p > isqrt(u); no floating point square
root ever decides membership.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .rmf import Model, SampledFunction
from .sieve import PrimeTables, squarefree_indicator

#: Largest x accepted by the definition-level brute-force oracle.
ORACLE_CAP = 1_000_000


@dataclass(frozen=True)
class SumStatistics:
    """Per-x bundle: M_f(x), V(x) and the full partial sum A_f(x)."""

    x: int
    m_f: complex
    v: float
    a_full: complex


def _abs2(z: np.ndarray) -> np.ndarray:
    if np.iscomplexobj(z):
        return z.real * z.real + z.imag * z.imag
    z = z.astype(np.int64) if z.dtype.kind in "iu" else z
    return z * z


def _check_x(F: SampledFunction, x: int, lo: int = 1) -> None:
    if not lo <= x <= F.tables.limit:
        raise ValueError(f"x={x} outside [{lo}, {F.tables.limit}]")


def large_prime_sum(F: SampledFunction, x: int):
    """Sum of f(n) over n <= x with P(n) > sqrt(x), via the p*m decomposition.

    Uses prefix sums of f on [1, isqrt(x)] only; exact integer arithmetic in
    the Rademacher case.
    """
    _check_x(F, x)
    s = math.isqrt(x)
    if s < 1 or x < 2:
        return 0 if F.model is Model.RADEMACHER else 0.0 + 0.0j
    A = F.prefix_sums(s)
    ps = F.tables.primes_in(s, x)
    if len(ps) == 0:
        return 0 if F.model is Model.RADEMACHER else 0.0 + 0.0j
    i0 = F.tables.prime_count_upto(s)
    fp = F._values[i0 : i0 + len(ps)]
    quots = x // ps
    if F.model is Model.RADEMACHER:
        return int(np.sum(fp.astype(np.int64) * A[quots]))
    return complex(np.sum(fp * A[quots]))


def large_prime_sum_bruteforce(F: SampledFunction, x: int):
    """Definition-level oracle: enumerate n <= x and test P(n)^2 > x directly."""
    if x > ORACLE_CAP:
        raise ValueError(f"x={x} exceeds the brute-force cap {ORACLE_CAP}")
    _check_x(F, x)
    if x < 2:
        return 0 if F.model is Model.RADEMACHER else 0.0 + 0.0j
    fv = F.values_up_to(x)
    lpf = F.tables.largest_factor_table()[: x + 1].astype(np.int64)
    mask = lpf * lpf > x
    mask[0] = mask[1] = False
    if F.model is Model.RADEMACHER:
        return int(np.sum(fv[mask].astype(np.int64)))
    return complex(np.sum(fv[mask]))


def conditional_variance(F: SampledFunction, x: int) -> float:
    """V(x) = sum over primes sqrt(x) < p <= x of |A_f(floor(x/p))|^2."""
    _check_x(F, x)
    s = math.isqrt(x)
    if s < 1 or x < 2:
        return 0.0
    A = F.prefix_sums(s)
    ps = F.tables.primes_in(s, x)
    if len(ps) == 0:
        return 0.0
    quots = x // ps
    return float(np.sum(_abs2(A[quots])))


def exact_expected_variance(x: int, model: Model, tables: PrimeTables) -> float:
    """E[V(x)] in closed form by orthogonality of distinct f(n).

    Each |A_f(y)|^2 has mean floor(y) (Steinhaus) or the number of squarefree
    integers <= y (Rademacher), summed over primes sqrt(x) < p <= x.
    """
    if not 1 <= x <= tables.limit:
        raise ValueError(f"x={x} outside [1, {tables.limit}]")
    s = math.isqrt(x)
    ps = tables.primes_in(s, x)
    if len(ps) == 0:
        return 0.0
    quots = x // ps
    if Model(model) is Model.STEINHAUS:
        return float(np.sum(quots))
    sq = np.cumsum(squarefree_indicator(s, tables).astype(np.int64))
    return float(np.sum(sq[quots]))


def interval_sum_pconstraint(
    F: SampledFunction, n_lo: int, n_hi: int, p_lo: int, p_hi: int
):
    """Sum of f(n) over n_lo < n <= n_hi with p_lo < P(n) <= p_hi.

    n = 1 is never included (its factor table sentinel is 1 and p_lo >= 1).
    """
    if not 0 <= n_lo <= n_hi or n_hi > F.tables.limit:
        raise ValueError(f"bad n range ({n_lo}, {n_hi}]")
    if not 1 <= p_lo <= p_hi:
        raise ValueError(f"bad prime window ({p_lo}, {p_hi}]")
    if n_hi < 2 or p_lo == p_hi:
        return 0 if F.model is Model.RADEMACHER else 0.0 + 0.0j
    fv = F.values_up_to(n_hi)
    lpf = F.tables.largest_factor_table()[: n_hi + 1].astype(np.int64)
    ns = np.arange(n_hi + 1)
    mask = (ns > n_lo) & (lpf > p_lo) & (lpf <= p_hi)
    mask[:2] = False
    if F.model is Model.RADEMACHER:
        return int(np.sum(fv[mask].astype(np.int64)))
    return complex(np.sum(fv[mask]))


def increment_decomposition_check(F: SampledFunction, x_prev: int, x: int):
    """Three-term split of M_f(x) across a test-point step.

    Returns ``(M_f(x_prev), -middle, tail)`` where ``middle`` removes the
    integers n <= x_prev whose largest prime factor crosses from above
    sqrt(x_prev) to at most sqrt(x), and ``tail`` adds the fresh integers in
    (x_prev, x] with a large prime factor.  The three terms sum to M_f(x)
    exactly.
    """
    if not 2 <= x_prev <= x or x > F.tables.limit:
        raise ValueError(f"bad pair x_prev={x_prev}, x={x}")
    t1 = large_prime_sum(F, x_prev)
    s_prev, s = math.isqrt(x_prev), math.isqrt(x)
    if s > s_prev:
        t2 = -interval_sum_pconstraint(F, 0, x_prev, s_prev, s)
    else:
        t2 = 0 if F.model is Model.RADEMACHER else 0.0 + 0.0j
    if x > x_prev:
        t3 = interval_sum_pconstraint(F, x_prev, x, s, x)
    else:
        t3 = 0 if F.model is Model.RADEMACHER else 0.0 + 0.0j
    return (t1, t2, t3)


def statistics_at(F: SampledFunction, x: int) -> SumStatistics:
    """M_f(x), V(x) and A_f(x) bundled for one x."""
    a = F.prefix_sums(x)[x]
    return SumStatistics(
        x=x,
        m_f=large_prime_sum(F, x),
        v=conditional_variance(F, x),
        a_full=a if np.iscomplexobj(np.asarray(a)) else int(a),
    )


def _isqrt_array(xs: np.ndarray) -> np.ndarray:
    s = np.sqrt(xs.astype(np.float64)).astype(np.int64)
    s = np.where((s + 1) * (s + 1) <= xs, s + 1, s)
    s = np.where(s * s > xs, s - 1, s)
    return s


def grid_statistics(F: SampledFunction, xs) -> tuple[np.ndarray, np.ndarray]:
    """M_f and V evaluated at every x in the ascending grid ``xs``.

    Amortized O(max(xs)) for the whole grid: both statistics are rewritten as
    a cumulative sum over n (each n = p*m with p^2 > n contributes f(n), or
    the telescoped |A|^2 increment) minus a correction accumulated at prime
    squares, where a prime permanently leaves the range (sqrt(x), x].
    """
    xs = np.asarray(xs, dtype=np.int64)
    if xs.size == 0:
        dt = np.int64 if F.model is Model.RADEMACHER else np.complex128
        return np.zeros(0, dtype=dt), np.zeros(0, dtype=np.float64)
    if np.any(np.diff(xs) < 0) or xs[0] < 1:
        raise ValueError("grid must be ascending with entries >= 1")
    N = int(xs[-1])
    _check_x(F, N)

    fv = F.values_up_to(N)
    if F.model is Model.RADEMACHER:
        fv = fv.astype(np.int64)
    lpf = F.tables.largest_factor_table()[: N + 1].astype(np.int64)
    ns = np.arange(N + 1, dtype=np.int64)
    A = np.concatenate(([0], np.cumsum(fv[1:])))

    big = lpf * lpf > ns
    big[:2] = False
    # Running sum of f(n) over n with P(n)^2 > n.
    C1 = np.cumsum(np.where(big, fv, 0))
    # Telescoped |A(m)|^2 - |A(m-1)|^2 at n = p*m for the same n.
    q = ns // lpf
    w = np.where(big, _abs2(A[q]) - _abs2(A[np.maximum(q - 1, 0)]), 0)
    D1 = np.cumsum(w.astype(np.float64))

    # Corrections: once x passes p^2 the prime p leaves (sqrt(x), x] and its
    # accumulated contribution (all n = p*m with m <= p-1) must be removed.
    s_max = math.isqrt(N)
    k_small = F.tables.prime_count_upto(s_max)
    ps = F.tables.primes[:k_small]
    fp = F._values[:k_small]
    if F.model is Model.RADEMACHER:
        corr_m = np.concatenate(
            ([0], np.cumsum(fp.astype(np.int64) * A[ps - 1]))
        )
    else:
        corr_m = np.concatenate(([0.0 + 0.0j], np.cumsum(fp * A[ps - 1])))
    corr_v = np.concatenate(([0.0], np.cumsum(_abs2(A[ps - 1]).astype(np.float64))))

    sx = _isqrt_array(xs)
    k = np.searchsorted(ps, sx, side="right")
    m_vals = C1[xs] - corr_m[k]
    v_vals = D1[xs] - corr_v[k]
    return m_vals, np.maximum(v_vals, 0.0)
