"""Experiment driver: grids, trial statistics, and the inequality suites.

Every suite here checks a theorem by Monte Carlo: estimates are compared
to exact bounds or closed-form targets with a 3-standard-error rule, so a
stable violation indicates an implementation bug, never new mathematics.
Conditioning is realized exactly by seed-splitting: small primes keep the
values of the conditioning seed, resampled primes are redrawn from
per-resample seeds.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .euler import (
    QuadratureConfig,
    integral_on_grid,
    log_factor_matrix,
    simpson_grid,
)
from .reporting import MomentReport
from .rmf import Model, SampledFunction, prime_value_matrix, value_matrix
from .sieve import PrimeTables, divisor_m
from .sums import exact_expected_variance, grid_statistics

#: Seed offset separating conditioning seeds from resample seed streams.
RESAMPLE_STREAM = 0x5EED_0000


@dataclass
class ExperimentConfig:
    """Knobs shared by the experiment drivers."""

    model: Model = Model.RADEMACHER
    epsilon: float = 0.1
    seed_base: int = 0
    trials: int = 100
    x_max: int = 100_000
    t_param: float = 10.0
    oracle_cap: int = 1_000_000
    #: Smallest x entering the sup statistics.  Below ~e^e the loglog
    #: normalization is tiny and the sup degenerates into a coin flip on
    #: the first few f(p); grid rows are still reported for all x.
    sup_x_min: int = 100
    quad: QuadratureConfig = field(default_factory=QuadratureConfig)

    def __post_init__(self):
        self.model = Model(self.model)
        if not 0.0 < self.epsilon < 0.25:
            raise ValueError(f"epsilon must lie in (0, 1/4), got {self.epsilon}")
        if self.trials < 1:
            raise ValueError("trials must be positive")
        if self.t_param < 1.0:
            raise ValueError("t_param must be >= 1")

    @property
    def K(self) -> float:
        return 1.0 / (4.0 * self.epsilon)


@dataclass
class TrialResult:
    """Statistics of one realization over the test-point grid."""

    seed: int
    grid: np.ndarray
    m_values: np.ndarray
    v_values: np.ndarray
    normalized_sup: float
    variance_sup: float
    degenerate: bool = False


# ---------------------------------------------------------------------------
# Grids and normalizations
# ---------------------------------------------------------------------------


def test_points(epsilon: float, x_max: int) -> np.ndarray:
    """Distinct values of floor(exp(i^epsilon)) in [3, x_max], ascending.

    Computed by inversion: x is kept iff some integer i >= 1 satisfies
    (log x)^(1/eps) <= i < (log(x+1))^(1/eps), which avoids iterating the
    astronomically many i directly.
    """
    if not 0.0 < epsilon < 0.25:
        raise ValueError(f"epsilon must lie in (0, 1/4), got {epsilon}")
    if x_max < 3:
        return np.zeros(0, dtype=np.int64)
    xs = np.arange(3, x_max + 1, dtype=np.int64)
    inv = 1.0 / epsilon
    lo = np.log(xs.astype(np.float64)) ** inv
    hi = np.log((xs + 1).astype(np.float64)) ** inv
    first = np.maximum(np.ceil(lo), 1.0)
    return xs[first < hi]


def block_boundaries(epsilon: float, x_max: int) -> list[int]:
    """The doubly exponential block endpoints floor(exp(2^(l^K))) <= x_max.

    Computed in log space so that overflowing endpoints simply terminate the
    list; at desk scale only one or two survive.
    """
    if not 0.0 < epsilon < 0.25:
        raise ValueError(f"epsilon must lie in (0, 1/4), got {epsilon}")
    K = 1.0 / (4.0 * epsilon)
    out: list[int] = []
    for ell in range(1, 200):
        logx = 2.0 ** (ell**K)
        if logx > math.log(x_max + 1):
            break
        val = math.floor(math.exp(logx))
        if val > x_max:
            break
        if val >= 2:
            out.append(val)
    return out


def fluctuation_scale(x, epsilon: float):
    """(log log x)^(1/4 + epsilon), the normalization of the sup statistic."""
    x_arr = np.asarray(x, dtype=np.float64)
    if np.any(x_arr < 3):
        raise ValueError("x must be >= 3 so that log log x > 0")
    out = np.log(np.log(x_arr)) ** (0.25 + epsilon)
    return float(out) if np.isscalar(x) or x_arr.ndim == 0 else out


def run_trial(config: ExperimentConfig, seed: int, tables: PrimeTables,
              grid: np.ndarray | None = None) -> TrialResult:
    """Evaluate M_f and V on the whole test-point grid for one realization."""
    if grid is None:
        grid = test_points(config.epsilon, config.x_max)
    if grid.size == 0:
        dt = np.int64 if config.model is Model.RADEMACHER else np.complex128
        return TrialResult(
            seed=seed,
            grid=grid,
            m_values=np.zeros(0, dtype=dt),
            v_values=np.zeros(0),
            normalized_sup=0.0,
            variance_sup=0.0,
            degenerate=True,
        )
    F = SampledFunction(config.model, seed, tables)
    m_vals, v_vals = grid_statistics(F, grid)
    gx = grid.astype(np.float64)
    scale = np.sqrt(gx) * fluctuation_scale(grid, config.epsilon)
    keep = grid >= config.sup_x_min
    if not np.any(keep):
        keep = np.ones(grid.shape, dtype=bool)
    nsup = float(np.max(np.abs(m_vals[keep]) / scale[keep]))
    vsup = float(
        np.max(v_vals[keep] * np.sqrt(np.log(np.log(gx[keep]))) / gx[keep])
    )
    return TrialResult(
        seed=seed,
        grid=grid,
        m_values=m_vals,
        v_values=v_vals,
        normalized_sup=nsup,
        variance_sup=vsup,
    )


# ---------------------------------------------------------------------------
# Moment and tail suites
# ---------------------------------------------------------------------------


def _mean_se(vals: np.ndarray) -> tuple[float, float]:
    est = float(np.mean(vals))
    se = float(np.std(vals, ddof=1) / math.sqrt(len(vals))) if len(vals) > 1 else 0.0
    return est, se


def _proportion_se(p: float, n: int) -> float:
    return math.sqrt(max(p * (1.0 - p), 0.0) / n)


def hypercontractive_check(
    weights: dict[int, complex],
    m: int,
    trials: int,
    model: Model,
    tables: PrimeTables,
    seed_base: int = 0,
) -> MomentReport:
    """E|sum a_n f(n)|^(2m) against the exact bound (sum |a_n|^2 d_{2m-1}(n))^m.

    The bound is computed exactly through the sieve; the moment by Monte
    Carlo.  One-sided: a theorem, so ``violated`` should always be False.
    """
    if not 1 <= m <= 3:
        raise ValueError("m must be in 1..3 (higher MC moments are too noisy)")
    if trials < 1000:
        raise ValueError("need at least 1000 trials")
    ns = np.array(sorted(weights), dtype=np.int64)
    if ns.size == 0 or ns[0] < 1:
        raise ValueError("weights must be supported on positive integers")
    a = np.array([weights[int(n)] for n in ns], dtype=np.complex128)
    N = int(ns[-1])
    seeds = seed_base + np.arange(trials)
    fv = value_matrix(model, seeds, N, tables)
    sums = np.asarray(fv, dtype=np.complex128)[:, ns] @ a
    vals = (sums.real**2 + sums.imag**2) ** m
    est, se = _mean_se(vals)
    bound = float(
        sum(abs(weights[int(n)]) ** 2 * divisor_m(int(n), 2 * m - 1, tables) for n in ns)
        ** m
    )
    return MomentReport(
        estimate=est,
        std_error=se,
        bound=bound,
        trials=trials,
        violated=est - 3.0 * se > bound,
        label=f"hypercontractive m={m} N={N} {Model(model).value}",
    )


def hoeffding_tail_check(
    model: Model,
    x: int,
    epsilon: float,
    small_prime_seed: int,
    trials: int,
    tables: PrimeTables,
    resample_seed_base: int | None = None,
) -> MomentReport:
    """Conditional tail of M_f(x) at the threshold 2*sqrt(x)*scale(x).

    The small primes (p <= sqrt(x)) are frozen from ``small_prime_seed``, so
    each summand f(p)*A_f(floor(x/p)) lies in a known interval and the
    conditional variance V0 is a fixed number.  The asserted bound is the
    directly derivable one: 2*exp(-t^2/(2 V0)) for the real Rademacher sum,
    and 4*exp(-t^2/(4 V0)) for |M| in the Steinhaus case (real and imaginary
    parts each bounded at threshold t/sqrt(2)).  The looser literature-shaped
    form exp(-4 x scale^2 / V0) is reported in ``aux``, not asserted.
    """
    model = Model(model)
    if x < 16:
        raise ValueError("x must be >= 16")
    if trials < 1000:
        raise ValueError("need at least 1000 resamples")
    if resample_seed_base is None:
        resample_seed_base = small_prime_seed + RESAMPLE_STREAM
    s = math.isqrt(x)
    F0 = SampledFunction(model, small_prime_seed, tables)
    A = F0.prefix_sums(s)
    ps = tables.primes_in(s, x)
    w = np.asarray(A[x // ps], dtype=np.complex128)
    v0 = float(np.sum(w.real**2 + w.imag**2))
    t = 2.0 * math.sqrt(x) * fluctuation_scale(x, epsilon)
    label = f"hoeffding x={x} seed={small_prime_seed} {model.value}"
    if v0 == 0.0:
        return MomentReport(0.0, 0.0, 0.0, trials, False, label=label,
                            aux={"v0": 0.0, "threshold": t, "literature_bound": 0.0})
    seeds = resample_seed_base + np.arange(trials)
    fp = np.asarray(prime_value_matrix(model, seeds, ps), dtype=np.complex128)
    M = fp @ w
    hits = np.abs(M) >= t
    est = float(np.mean(hits))
    se = _proportion_se(est, trials)
    if model is Model.RADEMACHER:
        bound = 2.0 * math.exp(-t * t / (2.0 * v0))
    else:
        bound = 4.0 * math.exp(-t * t / (4.0 * v0))
    literature_bound = math.exp(-4.0 * x * fluctuation_scale(x, epsilon) ** 2 / v0)
    return MomentReport(
        estimate=est,
        std_error=se,
        bound=min(bound, 1.0),
        trials=trials,
        violated=est - 3.0 * se > bound,
        label=label,
        aux={"v0": v0, "threshold": t, "literature_bound": literature_bound},
    )


# ---------------------------------------------------------------------------
# Submartingale suites
# ---------------------------------------------------------------------------


def _revealed_prime_sums(model: Model, seeds, x_base: int, p_lo: int, p_hi: int,
                         tables: PrimeTables) -> tuple[np.ndarray, np.ndarray]:
    """Per-trial sums G_p = sum of f(n) over n <= x_base with P(n) = p.

    Only primes p in (p_lo, p_hi] with p^2 > x_base are meaningful here: each
    such n = p*m has m < p, so G_p = f(p) * A_f(floor(x_base/p)).  Returns
    (primes, matrix of shape (trials, len(primes))).
    """
    ps = tables.primes_in(p_lo, p_hi)
    fv = np.asarray(value_matrix(model, seeds, x_base, tables), dtype=np.complex128)
    G = np.zeros((len(seeds), len(ps)), dtype=np.complex128)
    for j, p in enumerate(ps.tolist()):
        G[:, j] = fv[:, p::p].sum(axis=1)
    return ps, G


def submartingale_z_check(
    model: Model,
    x_base: int,
    k_lo: int,
    k_hi: int,
    resamples: int,
    seed: int,
    tables: PrimeTables,
) -> list[MomentReport]:
    """Conditional increments of the prime-reveal squared-sum sequence.

    The sequence at index k is |sum of f(n) over n <= x_base with
    sqrt(x_base) < P(n) <= isqrt(k)|^2.  Stepping k -> k+1 reveals at most
    one new prime; with everything below frozen, the conditional mean
    increment is exactly |A_f(floor(x_base/p))|^2 >= 0 (the cross term has
    mean zero).  One report per step; ``violated`` iff the Monte Carlo mean
    dips below -3 SE.
    """
    model = Model(model)
    if x_base > 1_000_000:
        raise ValueError("x_base above the oracle cap")
    if not 2 <= k_lo < k_hi:
        raise ValueError("need 2 <= k_lo < k_hi")
    F = SampledFunction(model, seed, tables)
    s0 = math.isqrt(x_base)
    out: list[MomentReport] = []
    for k in range(k_lo, k_hi):
        r, r2 = math.isqrt(k), math.isqrt(k + 1)
        label = f"z-step x_base={x_base} k={k} {model.value}"
        newp = tables.primes_in(max(r, s0), r2)
        if r2 == r or len(newp) == 0:
            out.append(MomentReport(0.0, 0.0, 0.0, resamples, False, label=label,
                                    aux={"target": 0.0, "new_prime": 0}))
            continue
        p = int(newp[0])
        # Frozen part: everything with sqrt(x_base) < P(n) <= r.
        S = complex(0.0)
        for q in tables.primes_in(s0, r).tolist():
            aq = F.prefix_sums(x_base // q)[x_base // q]
            S += complex(F.prime_value(q) * aq)
        aq = F.prefix_sums(x_base // p)[x_base // p]
        c = complex(aq)
        fp = np.asarray(
            prime_value_matrix(model, seed + RESAMPLE_STREAM + np.arange(resamples), [p]),
            dtype=np.complex128,
        )[:, 0]
        z_now = abs(S) ** 2
        z_next = np.abs(S + fp * c) ** 2
        est, se = _mean_se(z_next - z_now)
        out.append(
            MomentReport(
                estimate=est,
                std_error=se,
                bound=0.0,
                trials=resamples,
                violated=est < -3.0 * se,
                label=label,
                aux={"target": abs(c) ** 2, "new_prime": p},
            )
        )
    return out


def _y_grid(model: Model, T: float, panels: int) -> tuple[np.ndarray, np.ndarray]:
    # Steinhaus realizations are not even in t; integrate both half lines.
    if Model(model) is Model.RADEMACHER:
        ts, w = simpson_grid(0.0, T, panels)
        return ts, 2.0 * w
    return simpson_grid(-T, T, 2 * panels)


def y_submartingale_check(
    model: Model,
    x_from: int,
    x_to: int,
    resamples: int,
    seed: int,
    tables: PrimeTables,
    ell: int = 2,
    K: float = 2.5,
    block_prev: int | None = None,
    T: float = 40.0,
    panels: int = 400,
) -> MomentReport:
    """Conditional increment of the normalized Parseval-integral statistic.

    The realization is frozen up to truncation ``x_from`` and the primes in
    (x_from, x_to] are resampled; the Monte Carlo mean of the statistic at
    ``x_to`` is compared to its frozen value at ``x_from``.  A shared fixed
    Simpson grid is used for every sample so the discretized statistic is
    itself a submartingale.  ``violated`` iff mean < previous - 3 SE.
    """
    model = Model(model)
    if not 3 <= x_from < x_to <= tables.limit:
        raise ValueError("need 3 <= x_from < x_to <= limit")
    if block_prev is None:
        block_prev = x_from
    F = SampledFunction(model, seed, tables)
    ts, wts = _y_grid(model, T, panels)
    denom = 0.25 + ts * ts
    k0 = tables.prime_count_upto(x_from)
    k1 = tables.prime_count_upto(x_to)
    base_re = log_factor_matrix(
        model, F._values[:k0], tables.primes[:k0], ts
    ).real.sum(axis=0)
    i_prev = float(wts @ (np.exp(2.0 * base_re) / denom))
    norm_prev = (math.log(x_from) / math.log(block_prev)) ** (1.0 / (ell - 1) ** K)
    y_prev = norm_prev * i_prev / math.log(x_from)

    delta_primes = tables.primes[k0:k1]
    norm_next = (math.log(x_to) / math.log(block_prev)) ** (1.0 / (ell - 1) ** K)
    phase = (1.0 / np.sqrt(delta_primes.astype(np.float64)))[:, None] * np.exp(
        -1j * np.outer(np.log(delta_primes.astype(np.float64)), ts)
    )
    y_next = np.empty(resamples)
    chunk = max(1, 4_000_000 // max(1, phase.size))
    for j0 in range(0, resamples, chunk):
        seeds = seed + RESAMPLE_STREAM + np.arange(j0, min(j0 + chunk, resamples))
        fp = np.asarray(
            prime_value_matrix(model, seeds, delta_primes), dtype=np.complex128
        )
        if model is Model.RADEMACHER:
            dre = np.log1p(fp[:, :, None] * phase[None, :, :]).real.sum(axis=1)
        else:
            dre = -np.log1p(-fp[:, :, None] * phase[None, :, :]).real.sum(axis=1)
        vals = np.exp(2.0 * (base_re[None, :] + dre)) / denom[None, :]
        y_next[j0 : j0 + len(seeds)] = (
            norm_next / math.log(x_to)
        ) * (vals @ wts)
    est, se = _mean_se(y_next)
    return MomentReport(
        estimate=est - y_prev,
        std_error=se,
        bound=0.0,
        trials=resamples,
        violated=(est - y_prev) < -3.0 * se,
        label=f"y-step {x_from}->{x_to} seed={seed} {model.value}",
        aux={"y_prev": y_prev, "y_next_mean": est},
    )


def _z_trajectories(model: Model, seeds, x_base: int, r_hi: int,
                    tables: PrimeTables) -> np.ndarray:
    """Matrix (trials, steps) of the prime-reveal squared sums."""
    s0 = math.isqrt(x_base)
    ps, G = _revealed_prime_sums(model, seeds, x_base, s0, r_hi, tables)
    cum = np.cumsum(G, axis=1)
    return cum.real**2 + cum.imag**2


def _y_trajectories(model: Model, seeds, truncations, tables: PrimeTables,
                    ell: int, K: float, T: float, panels: int) -> np.ndarray:
    """Matrix (trials, len(truncations)) of normalized integral statistics."""
    truncations = list(truncations)
    x_last = truncations[-1]
    ts, wts = _y_grid(model, T, panels)
    denom = 0.25 + ts * ts
    k_last = tables.prime_count_upto(x_last)
    counts = [tables.prime_count_upto(x) for x in truncations]
    norms = [
        (math.log(x) / math.log(truncations[0])) ** (1.0 / (ell - 1) ** K)
        / math.log(x)
        for x in truncations
    ]
    pv = prime_value_matrix(model, np.asarray(seeds), tables.primes[:k_last])
    out = np.empty((len(seeds), len(truncations)))
    for i in range(len(seeds)):
        lf = log_factor_matrix(model, pv[i], tables.primes[:k_last], ts).real
        cum = np.cumsum(lf, axis=0)
        for j, kc in enumerate(counts):
            re = cum[kc - 1] if kc > 0 else np.zeros_like(ts)
            out[i, j] = norms[j] * float(wts @ (np.exp(2.0 * re) / denom))
    return out


def doob_check(
    sequence_spec: str,
    lam: float,
    p_exponent: float | None,
    trials: int,
    model: Model,
    tables: PrimeTables,
    seed_base: int = 0,
    x_base: int = 1000,
    r_hi: int = 100,
    truncations=(50, 100, 200, 400),
    T: float = 40.0,
    panels: int = 400,
) -> MomentReport:
    """Doob's maximal or L^p inequality on one of the submartingale sequences.

    ``sequence_spec`` is "z" (prime-reveal squared sums at ``x_base``) or "y"
    (normalized integral statistics on ``truncations``).  Maximal form
    (``p_exponent`` None): lambda * P(max > lambda) <= E[X_n].  L^2 form
    (``p_exponent`` == 2): E[max^2] <= 4 * max_k E[X_k^2].  Violations are
    flagged beyond 3 joint standard errors.
    """
    model = Model(model)
    seeds = seed_base + np.arange(trials)
    if sequence_spec == "z":
        X = _z_trajectories(model, seeds, x_base, r_hi, tables)
    elif sequence_spec == "y":
        ell, K = 2, 2.5
        X = _y_trajectories(model, seeds, truncations, tables, ell, K, T, panels)
    else:
        raise ValueError(f"unknown sequence_spec {sequence_spec!r}")
    if X.shape[1] == 0:
        return MomentReport(0.0, 0.0, 0.0, trials, False,
                            label=f"doob {sequence_spec} (empty sequence)")
    mx = X.max(axis=1)
    if p_exponent is None:
        hit = mx > lam
        est = lam * float(np.mean(hit))
        se_l = lam * _proportion_se(float(np.mean(hit)), trials)
        rhs, se_r = _mean_se(X[:, -1])
        label = f"doob-max {sequence_spec} lambda={lam} {model.value}"
    elif p_exponent == 2:
        est, se_l = _mean_se(mx**2)
        per_k = [(float(np.mean(X[:, j] ** 2)),
                  float(np.std(X[:, j] ** 2, ddof=1) / math.sqrt(trials)))
                 for j in range(X.shape[1])]
        j_star = int(np.argmax([m for m, _ in per_k]))
        rhs, se_r = 4.0 * per_k[j_star][0], 4.0 * per_k[j_star][1]
        label = f"doob-l2 {sequence_spec} {model.value}"
    else:
        raise ValueError("p_exponent must be None (maximal form) or 2")
    joint = math.sqrt(se_l * se_l + se_r * se_r)
    return MomentReport(
        estimate=est,
        std_error=joint,
        bound=rhs,
        trials=trials,
        violated=est - rhs > 3.0 * joint,
        label=label,
    )


# ---------------------------------------------------------------------------
# Distribution summaries
# ---------------------------------------------------------------------------


def sigma_event_statistic(
    model: Model,
    x_prev: int,
    trials: int,
    t_param: float,
    tables: PrimeTables,
    ell: int = 2,
    K: float = 2.5,
    seed_base: int = 0,
    T: float = 40.0,
    panels: int = 400,
) -> dict:
    """Empirical distribution of the Parseval integral at truncation x_prev.

    Reports quantiles, the fraction exceeding the block-budget threshold
    sqrt(t_param) * 2^((ell-1)^K) / sqrt((ell-1)^K), the shape budget
    t_param^(-1/4) it is compared against, and the mean of
    sqrt(integral) / sqrt(log x / sqrt(log log x)) as a measured (not
    asserted) low-moment ratio.
    """
    model = Model(model)
    if not 3 <= x_prev <= tables.limit:
        raise ValueError(f"x_prev={x_prev} outside [3, {tables.limit}]")
    ts, wts = _y_grid(model, T, panels)
    k = tables.prime_count_upto(x_prev)
    pv = prime_value_matrix(model, seed_base + np.arange(trials), tables.primes[:k])
    vals = np.empty(trials)
    for i in range(trials):
        vals[i] = integral_on_grid(model, pv[i], tables.primes[:k], ts, wts)
    threshold = math.sqrt(t_param) * 2.0 ** ((ell - 1) ** K) / math.sqrt(
        (ell - 1) ** K
    )
    qs = [0.0, 0.1, 0.25, 0.5, 0.75, 0.9, 0.99, 1.0]
    lw = math.log(x_prev) / math.sqrt(math.log(math.log(x_prev)))
    return {
        "x_prev": x_prev,
        "trials": trials,
        "quantiles": {str(q): float(np.quantile(vals, q)) for q in qs},
        "threshold": threshold,
        "exceed_fraction": float(np.mean(vals > threshold)),
        "budget_shape": t_param ** -0.25,
        "mean_sqrt_ratio": float(np.mean(np.sqrt(vals))) / math.sqrt(lw),
    }


def variance_ratio_ensemble(
    config: ExperimentConfig,
    tables: PrimeTables,
    xs=(1000, 10_000, 100_000),
) -> list[dict]:
    """Distribution of V(x)*sqrt(loglog x)/x across trials, per grid x.

    Also compares the Monte Carlo mean of V(x) against the closed-form
    expectation (the exact oracle); the ``violated`` flag is two-sided at
    3 SE on that comparison.
    """
    out = []
    seeds = config.seed_base + np.arange(config.trials)
    for x in xs:
        s = math.isqrt(x)
        ps = tables.primes_in(s, x)
        quots = (x // ps).astype(np.int64)
        vals = np.empty(config.trials)
        chunk = max(1, 4_000_000 // max(1, len(ps)))
        for j0 in range(0, config.trials, chunk):
            sub = seeds[j0 : j0 + chunk]
            fv = np.asarray(
                value_matrix(config.model, sub, s, tables), dtype=np.complex128
            )
            A = np.concatenate(
                (np.zeros((len(sub), 1), dtype=np.complex128), np.cumsum(fv[:, 1:], axis=1)),
                axis=1,
            )
            Aq = A[:, quots]
            vals[j0 : j0 + len(sub)] = (Aq.real**2 + Aq.imag**2).sum(axis=1)
        est, se = _mean_se(vals)
        exact = exact_expected_variance(x, config.model, tables)
        ratio = vals * math.sqrt(math.log(math.log(x))) / x
        out.append(
            {
                "x": x,
                "trials": config.trials,
                "mean_v": est,
                "std_error": se,
                "exact_ev": exact,
                "violated": abs(est - exact) > 3.0 * se,
                "ratio_median": float(np.median(ratio)),
                "ratio_q90": float(np.quantile(ratio, 0.9)),
            }
        )
    return out


def partial_sum_second_moment_check(
    model: Model,
    y: int,
    trials: int,
    tables: PrimeTables,
    seed_base: int = 0,
) -> MomentReport:
    """Monte Carlo E|A_f(y)|^2 against the orthogonality target.

    Target: floor(y) for Steinhaus, the squarefree count up to y for
    Rademacher.  Two-sided at 3 SE.
    """
    from .sieve import squarefree_count

    model = Model(model)
    seeds = seed_base + np.arange(trials)
    vals = np.empty(trials)
    chunk = max(1, 8_000_000 // max(2, y))
    for j0 in range(0, trials, chunk):
        sub = seeds[j0 : j0 + chunk]
        fv = np.asarray(value_matrix(model, sub, y, tables), dtype=np.complex128)
        A = fv[:, 1:].sum(axis=1)
        vals[j0 : j0 + len(sub)] = A.real**2 + A.imag**2
    est, se = _mean_se(vals)
    target = float(y if model is Model.STEINHAUS else squarefree_count(y, tables))
    return MomentReport(
        estimate=est,
        std_error=se,
        bound=target,
        trials=trials,
        violated=abs(est - target) > 3.0 * se,
        label=f"second-moment y={y} {model.value}",
    )
