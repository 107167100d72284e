# file: density_sim_module.py
"""
Arithmetic behind the density model.

Draw floor(c^delta) face orbits uniformly out of c and ask that none of them hits the
f flagged orbits. The module estimates that probability by Monte Carlo, evaluates the
closed form and its exponential lower bounds, and carries the index arithmetic used
to show small tori survive: the Landau function, the Stirling bound and the log-scale
margin between them.
"""

import math
from concurrent.futures import ProcessPoolExecutor
from typing import List, Optional

import numpy as np
import pandas as pd
from pydantic import BaseModel, Field, model_validator
from tqdm import tqdm

from config import MAX_LANDAU_P, MONTE_CARLO_CHUNK, SHOW_PROGRESS, get_logger
from errors_module import BudgetExceededError, DensityParamError

logger = get_logger(__name__)

# 1 - x >= exp(-2x) holds up to x ~ 0.7968; the bound is only used below this
BOUND_DOMAIN = 0.5
# draws per Monte Carlo block, so one block stays a few megabytes
_BLOCK_CELLS = 2_000_000


# -------------------------
# PARAMETERS
# -------------------------
class DensityParams(BaseModel):
    c_size: int = Field(..., ge=1)
    delta: float = Field(..., gt=0.0, lt=1.0)
    f_size: int = Field(0, ge=0)
    trials: int = Field(10_000, ge=1)
    rng_seed: int = 0

    @model_validator(mode="after")
    def _flagged_fit(self):
        if self.f_size > self.c_size:
            raise ValueError(f"f_size {self.f_size} exceeds c_size {self.c_size}")
        return self

    @property
    def draws(self):
        return math.floor(self.c_size ** self.delta + 1e-9)


class GrowthParams(BaseModel):
    p: int = Field(..., ge=1)
    c_lin: float = Field(..., gt=0.0)


def density_params(**kwargs):
    """DensityParams, with validation failures reported as DensityParamError."""
    try:
        return DensityParams(**kwargs)
    except ValueError as e:
        raise DensityParamError(str(e)) from e


# -------------------------
# MONTE CARLO
# -------------------------
class DensityEstimate(BaseModel):
    probability: float
    stderr: float
    trials: int
    hits: int


def _chunk_hits(args):
    """Trials in one chunk whose draws all avoid the flagged orbits."""
    seed_seq, trials, c_size, f_size, draws = args
    rng = np.random.default_rng(seed_seq)
    rows = max(1, min(trials, _BLOCK_CELLS // max(draws, 1)))
    avoided = 0
    done = 0
    while done < trials:
        n = min(rows, trials - done)
        sample = rng.integers(0, c_size, size=(n, draws))
        # orbits 0..f-1 are the flagged ones
        avoided += int(np.count_nonzero((sample >= f_size).all(axis=1)))
        done += n
    return avoided


def simulate_density_event(params, jobs=1):
    """Monte Carlo estimate with binomial standard error; seeded chunks make it reproducible."""
    draws = params.draws
    if draws < 1:
        raise DensityParamError(f"floor(c^delta) = {draws}; need at least one draw")
    n_chunks = math.ceil(params.trials / MONTE_CARLO_CHUNK)
    seeds = np.random.SeedSequence(params.rng_seed).spawn(n_chunks)
    tasks = []
    for k, seed_seq in enumerate(seeds):
        size = min(MONTE_CARLO_CHUNK, params.trials - k * MONTE_CARLO_CHUNK)
        tasks.append((seed_seq, size, params.c_size, params.f_size, draws))

    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            counts = list(pool.map(_chunk_hits, tasks))
    else:
        counts = [_chunk_hits(t) for t in tqdm(tasks, desc="monte carlo",
                                               disable=not SHOW_PROGRESS, leave=False)]

    hits = sum(counts)
    p = hits / params.trials
    stderr = math.sqrt(p * (1.0 - p) / params.trials)
    logger.debug("density event: %d/%d trials avoided %d flagged of %d",
                 hits, params.trials, params.f_size, params.c_size)
    return DensityEstimate(probability=p, stderr=stderr, trials=params.trials, hits=hits)


# -------------------------
# CLOSED FORM AND BOUNDS
# -------------------------
class BoundChain(BaseModel):
    exact: float
    bound1: float
    bound2: float
    draws: int
    const: float
    alpha: float

    @property
    def nonincreasing(self):
        return self.exact >= self.bound1 - 1e-15 and self.bound1 >= self.bound2 - 1e-15


def exact_density_event(c_size, delta, f_size):
    draws = math.floor(c_size ** delta + 1e-9)
    return (1.0 - f_size / c_size) ** draws


def bound_density_event(params, const=None, alpha=None):
    """
    exact = (1 - f/c)^floor(c^delta)
    bound1 = exp(-2 f c^(delta-1))
    bound2 = exp(-2 C c^(delta-1+alpha)), for f <= C c^alpha

    Without (const, alpha) the tightest choice alpha = 0, C = f is used, so bound2
    equals bound1.
    """
    c, f, delta = params.c_size, params.f_size, params.delta
    if f / c > BOUND_DOMAIN:
        raise DensityParamError(f"f/c = {f / c:.3f} is outside the bound's domain (<= {BOUND_DOMAIN})")
    if const is None or alpha is None:
        const, alpha = float(f), 0.0
    if f > const * c ** alpha * (1 + 1e-12):
        raise DensityParamError(f"f = {f} exceeds C c^alpha = {const * c ** alpha:.3f}")

    exact = exact_density_event(c, delta, f)
    bound1 = math.exp(-2.0 * f * c ** (delta - 1.0))
    bound2 = math.exp(-2.0 * const * c ** (delta - 1.0 + alpha))
    chain = BoundChain(exact=exact, bound1=bound1, bound2=bound2, draws=params.draws,
                       const=const, alpha=alpha)
    if not chain.nonincreasing:
        raise DensityParamError(f"bound chain out of order: {chain}")
    return chain


def persistence_profile(sizes, delta, alpha):
    """Exact event probability along growing c with f = floor(c^alpha)."""
    rows = []
    for c in sizes:
        f = math.floor(c ** alpha + 1e-9)
        rows.append((c, f, exact_density_event(c, delta, f)))
    return rows


def density_table(params, const=None, alpha=None, jobs=1):
    """Exact value, bounds, empirical estimate and standard error in one row."""
    chain = bound_density_event(params, const, alpha)
    estimate = simulate_density_event(params, jobs)
    return pd.DataFrame([{
        "c": params.c_size,
        "delta": params.delta,
        "f": params.f_size,
        "draws": params.draws,
        "exact": chain.exact,
        "bound1": chain.bound1,
        "bound2": chain.bound2,
        "empirical": estimate.probability,
        "stderr": estimate.stderr,
    }])


# -------------------------
# LANDAU FUNCTION
# -------------------------
def primes_upto(n):
    if n < 2:
        return []
    sieve = np.ones(n + 1, dtype=bool)
    sieve[:2] = False
    for k in range(2, int(n ** 0.5) + 1):
        if sieve[k]:
            sieve[k * k::k] = False
    return [int(q) for q in np.nonzero(sieve)[0]]


def landau_g(p):
    """Largest order of a permutation of p points: max lcm over partitions of p."""
    if p < 1:
        raise DensityParamError("landau_g needs p >= 1")
    if p > MAX_LANDAU_P:
        raise BudgetExceededError(MAX_LANDAU_P, "landau p")
    best = [1] * (p + 1)   # best[s]: largest lcm of prime powers summing to at most s
    for q in primes_upto(p):
        new = best[:]
        power = q
        while power <= p:
            for s in range(p, power - 1, -1):
                candidate = best[s - power] * power
                if candidate > new[s]:
                    new[s] = candidate
            power *= q
        best = new
    return max(best)


def _partitions(n, largest=None):
    largest = n if largest is None else largest
    if n == 0:
        yield ()
        return
    for part in range(min(n, largest), 0, -1):
        for rest in _partitions(n - part, part):
            yield (part,) + rest


def landau_brute_force(p):
    """max lcm over every partition of p, by enumeration."""
    return max(math.lcm(*parts) for parts in _partitions(p))


def landau_ratio(p):
    """ln g(p) / sqrt(p ln p), which tends to 1."""
    if p < 2:
        raise DensityParamError("landau_ratio needs p >= 2")
    return math.log(landau_g(p)) / math.sqrt(p * math.log(p))


def landau_table(ps):
    return pd.DataFrame([{"p": p, "g": landau_g(p), "ratio": landau_ratio(p)} for p in ps])


# -------------------------
# SMALL TORI
# -------------------------
def small_tori_margin(growth, delta):
    """delta p ln(p/e) - c_lin p; positive when p!^delta outgrows e^(c_lin p)."""
    if growth.p < 3:
        raise DensityParamError("small_tori_margin needs p >= 3")
    if not 0.0 < delta < 1.0:
        raise DensityParamError("delta must lie in (0, 1)")
    p = growth.p
    return delta * p * math.log(p / math.e) - growth.c_lin * p


def first_positive_margin(c_lin, delta, p_max=10 ** 6) -> Optional[int]:
    """Least p >= 3 with positive margin, scanning up to p_max."""
    p = np.arange(3, p_max + 1, dtype=np.float64)
    margin = delta * p * np.log(p / math.e) - c_lin * p
    positive = np.nonzero(margin > 0)[0]
    if positive.size == 0:
        return None
    return int(p[positive[0]])


class StirlingReport(BaseModel):
    p: int
    log_factorial: float
    log_bound: float
    factorial: Optional[float] = None
    bound: Optional[float] = None

    @property
    def holds(self):
        return self.log_factorial >= self.log_bound


def stirling_lower(p):
    """ln p! against p ln(p/e); plain values too while they fit a float."""
    if p < 1:
        raise DensityParamError("stirling_lower needs p >= 1")
    log_factorial = math.lgamma(p + 1)
    log_bound = p * math.log(p / math.e)
    report = StirlingReport(p=p, log_factorial=log_factorial, log_bound=log_bound)
    if p <= 170:
        report.factorial = float(math.factorial(p))
        report.bound = (p / math.e) ** p
    return report


def margin_grid(c_lins: List[float], deltas: List[float], p_max=10 ** 6):
    """First positive margin for every (c_lin, delta) pair."""
    rows = []
    for c_lin in c_lins:
        for delta in deltas:
            rows.append({"c_lin": c_lin, "delta": delta,
                         "first_p": first_positive_margin(c_lin, delta, p_max)})
    return pd.DataFrame(rows)
