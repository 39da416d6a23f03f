"""Achievable-rate conditions for stabilizer codes on memoryless channels.

All finite-``n`` binomial sums are done in exact integer arithmetic.  A channel
parameter ``p`` is turned into an exact fraction ``P / D`` (floats convert exactly,
strings such as ``"0.01"`` as decimals); every term ``C(n,i) p^i q^(n-i)`` then
has the common denominator ``D^n`` and only numerators are summed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence, Union

from scipy.optimize import bisect

from stabcap.errors import StabcapError
from stabcap.parallel import pmap

__all__ = [
    "LOG2_3",
    "RatePoint",
    "binary_entropy",
    "relative_entropy",
    "chernoff_bound",
    "tail_sum",
    "inner_sum",
    "log2_inner_bound",
    "finite_n_rate",
    "asymptotic_bound",
    "asymptotic_point",
    "conventional_bound",
    "asymptotic_zero",
    "random_coding_majorant",
    "resolve_delta",
    "optimize_delta",
    "rate_curve",
    "RATE_CURVE_COLUMNS",
]

LOG2_3 = math.log2(3)

Prob = Union[float, int, Fraction, str]


def _fraction(p: Prob, what: str = "p") -> Fraction:
    try:
        f = Fraction(p)
    except (ValueError, TypeError):
        raise StabcapError(f"{what} must be a number, got {p!r}") from None
    if not 0 <= f <= 1:
        raise StabcapError(f"{what} must lie in [0, 1], got {p}")
    return f


def _unit(x: float, what: str) -> float:
    x = float(x)
    if not 0.0 <= x <= 1.0 or math.isnan(x):
        raise StabcapError(f"{what} must lie in [0, 1], got {x}")
    return x


def binary_entropy(x: float) -> float:
    x = _unit(x, "entropy argument")
    if x in (0.0, 1.0):
        return 0.0
    return -x * math.log2(x) - (1 - x) * math.log2(1 - x)


def _xlog(x: float, y: float) -> float:
    """``x log2(x / y)`` with ``0 log 0 = 0``."""
    if x == 0:
        return 0.0
    if y == 0:
        return math.inf
    return x * math.log2(x / y)


def relative_entropy(lam: float, eps: float) -> float:
    """``D(lam || eps)`` between Bernoulli distributions, in bits."""
    lam = _unit(lam, "lam")
    eps = _unit(eps, "eps")
    return _xlog(lam, eps) + _xlog(1 - lam, 1 - eps)


def chernoff_bound(n: int, delta: float, p: float) -> float:
    """``2^(-n D(delta || p))``, an upper bound on the tail past ``delta n`` when ``delta > p``."""
    if not float(delta) > float(p):
        raise StabcapError(f"the exponential tail bound needs delta > p (delta={delta}, p={p})")
    return 2.0 ** (-n * relative_entropy(float(delta), float(p)))


def _cutoff(n: int, delta: float) -> int:
    delta = float(delta)
    if not 0.0 < delta < 1.0:
        raise StabcapError(f"delta must lie in (0, 1), got {delta}")
    # the tiny slack keeps e.g. 0.06 * 100 at 6 despite binary rounding
    return math.floor(delta * n + 1e-9)


@dataclass(frozen=True)
class _Sums:
    """Numerators over the common denominator ``den = D^n``."""

    head: int  # sum_{i=0}^{m} C(n,i) P^i Q^(n-i)
    inner: int  # sum_{i=1}^{m} C(n,i) P^i Q^(n-i) sum_{j<=i} C(n,j) 3^j
    den: int
    log2_den: float


def _sums(n: int, m: int, p: Fraction, with_inner: bool = True) -> _Sums:
    big_p, d = p.numerator, p.denominator
    big_q = d - big_p
    den = d**n
    log2_den = n * math.log2(d)
    if big_q == 0:
        # p = 1: all mass sits on i = n
        term_n = big_p**n
        head = term_n if m >= n else 0
        inner = term_n * sum(math.comb(n, j) * 3**j for j in range(n + 1)) if m >= n else 0
        return _Sums(head, inner if with_inner else 0, den, log2_den)
    term = big_q**n
    head = term
    inner = 0
    ball = 1  # sum_{j<=i} C(n,j) 3^j
    c = 1  # C(n,i) 3^i
    for i in range(1, m + 1):
        term = term * (n - i + 1) * big_p // (i * big_q)
        if term == 0:
            break
        head += term
        if with_inner:
            c = c * (n - i + 1) * 3 // i
            ball += c
            inner += term * ball
    return _Sums(head, inner, den, log2_den)


def tail_sum(n: int, delta: float, p: Prob) -> Fraction:
    """``sum_{i > floor(delta n)} C(n,i) p^i (1-p)^(n-i)``, exactly."""
    pf = _fraction(p)
    m = _cutoff(n, delta)
    s = _sums(n, m, pf, with_inner=False)
    return Fraction(s.den - s.head, s.den)


def inner_sum(n: int, delta: float, p: Prob) -> Fraction:
    """``sum_{i=1}^{floor(delta n)} C(n,i) p^i q^(n-i) sum_{j<=i} C(n,j) 3^j``, exactly."""
    pf = _fraction(p)
    s = _sums(n, _cutoff(n, delta), pf)
    return Fraction(s.inner, s.den)


def log2_inner_bound(n: int, delta: float) -> float:
    """``log2[(delta n + 1) 2^(n (H(delta) + delta log2 3))]``."""
    delta = float(delta)
    return math.log2(delta * n + 1) + n * (binary_entropy(delta) + delta * LOG2_3)


def _ratio(num: int, den: int) -> float:
    return num / den if num else 0.0


@dataclass(frozen=True)
class RatePoint:
    """A rate evaluated at block length ``n`` (``math.inf`` for the limit).

    ``tail`` is the mass above ``floor(delta n)`` errors, ``log2_inner`` the log of the
    collision sum the rate is built from (``-inf`` when that sum vanishes) and
    ``log2_inner_bound`` its entropy majorant.
    """

    n: float
    delta: float
    p: float
    rate: float
    tail: float
    log2_inner: float
    log2_inner_bound: float
    policy: str = "fixed"

    @property
    def vacuous(self) -> bool:
        return self.rate <= 0

    @property
    def inner_bound_holds(self) -> bool:
        return self.log2_inner <= self.log2_inner_bound + 1e-9 * max(1.0, abs(self.log2_inner_bound))


def finite_n_rate(n: int, delta: float, p: Prob, policy: str = "fixed") -> RatePoint:
    """Rate ``1 - log2(inner_sum) / n`` at block length ``n``; 1 when the sum is empty."""
    if int(n) != n or n < 2:
        raise StabcapError(f"block length must be an integer >= 2, got {n}")
    n = int(n)
    pf = _fraction(p)
    m = _cutoff(n, delta)
    s = _sums(n, m, pf)
    if s.inner == 0:
        log_inner = -math.inf
        rate = 1.0
    else:
        log_inner = math.log2(s.inner) - s.log2_den
        rate = 1.0 - log_inner / n
    return RatePoint(
        n=n,
        delta=float(delta),
        p=float(pf),
        rate=rate,
        tail=_ratio(s.den - s.head, s.den),
        log2_inner=log_inner,
        log2_inner_bound=log2_inner_bound(n, delta),
        policy=policy,
    )


def asymptotic_bound(p: float) -> float:
    """``1 - H(p) - p log2 3``; negative values mean the bound says nothing."""
    p = _unit(p, "p")
    return 1.0 - binary_entropy(p) - p * LOG2_3


def asymptotic_point(p: float) -> RatePoint:
    p = _unit(p, "p")
    return RatePoint(math.inf, p, p, asymptotic_bound(p), 0.0, math.nan, math.nan, "limit")


def conventional_bound(p: float) -> float:
    """``1 - H(2p) - 2p log2 3``, from correcting every pattern of up to ``2pn`` errors."""
    p = _unit(p, "p")
    if 2 * p > 1:
        raise StabcapError(f"the 2p form needs p <= 1/2, got {p}")
    return asymptotic_bound(2 * p)


def asymptotic_zero(xtol: float = 1e-12) -> float:
    """The ``p`` in ``(0, 1/2)`` where the asymptotic bound crosses zero."""
    return bisect(asymptotic_bound, 0.01, 0.5, xtol=xtol)


def random_coding_majorant(n: int, k: int, delta: float, p: Prob, include_tail: bool = False) -> float:
    """``2^-(n-k)`` times the collision sum: the mean truncated uncorrectable mass of a
    uniformly random ``[[n, k]]`` stabilizer code is at most this.  ``include_tail`` adds
    the mass above the truncation, which bounds the untruncated mean.
    """
    if not 0 <= k <= n:
        raise StabcapError(f"need 0 <= k <= n, got n={n}, k={k}")
    pf = _fraction(p)
    s = _sums(n, _cutoff(n, delta), pf)
    out = float(Fraction(s.inner, s.den * 2 ** (n - k)))
    if include_tail:
        out += _ratio(s.den - s.head, s.den)
    return out


def optimize_delta(n: int, p: Prob) -> float:
    """``delta = m / n`` with integer ``m`` chosen by golden-section search to maximise
    ``rate * (1 - tail)``; both depend on ``delta`` only through ``floor(delta n)``.
    """
    pf = _fraction(p)
    lo = max(1, math.floor(pf * n) + 1)
    hi = n - 1
    if lo >= hi:
        return min(lo, n - 1) / n
    cache: dict[int, float] = {}

    def score(m: int) -> float:
        if m not in cache:
            pt = finite_n_rate(n, m / n, pf)
            cache[m] = pt.rate * (1 - pt.tail)
        return cache[m]

    inv_phi = (math.sqrt(5) - 1) / 2
    a, b = lo, hi
    while b - a > 3:
        c = b - round(inv_phi * (b - a))
        d = a + round(inv_phi * (b - a))
        if c >= d:
            d = c + 1
        if score(c) >= score(d):
            b = d
        else:
            a = c
    best = max(range(a, b + 1), key=lambda m: (score(m), -m))
    return best / n


def resolve_delta(policy: str | float, n: int, p: Prob) -> tuple[float, str]:
    """Turn a policy into a concrete ``delta``.

    ``"margin"`` (default) gives ``p + max(0.01, 3 sqrt(p(1-p)/n))``, ``"margin:x"``
    gives ``p + x``, ``"optimize"`` searches, and a bare number or ``"fixed:x"`` is used as is.
    """
    pf = float(_fraction(p))
    if isinstance(policy, (int, float)):
        delta, label = float(policy), "fixed"
    else:
        text = policy.strip().lower()
        name, _, arg = text.partition(":")
        if name == "margin":
            margin = float(arg) if arg else max(0.01, 3 * math.sqrt(pf * (1 - pf) / n))
            delta, label = pf + margin, "margin"
        elif name == "optimize":
            delta, label = optimize_delta(n, p), "optimize"
        elif name == "fixed":
            delta, label = float(arg), "fixed"
        else:
            try:
                delta, label = float(text), "fixed"
            except ValueError:
                raise StabcapError(f"unknown delta policy {policy!r}") from None
    if not 0.0 < delta < 1.0:
        raise StabcapError(f"delta policy {policy!r} gives delta={delta} outside (0, 1)")
    return delta, label


def _curve_point(args: tuple[int, str | float, Prob]) -> RatePoint:
    n, policy, p = args
    delta, label = resolve_delta(policy, n, p)
    return finite_n_rate(n, delta, p, policy=label)


def rate_curve(p: Prob, ns: Sequence[int], policy: str | float = "margin") -> list[RatePoint]:
    _fraction(p)
    return pmap(_curve_point, [(int(n), policy, p) for n in ns])


RATE_CURVE_COLUMNS = ("n", "delta", "policy", "finite_rate", "asymptote", "tail_bound", "log2_inner", "vacuous")


def curve_row(pt: RatePoint) -> dict[str, object]:
    return {
        "n": pt.n,
        "delta": pt.delta,
        "policy": pt.policy,
        "finite_rate": pt.rate,
        "asymptote": asymptotic_bound(pt.p),
        "tail_bound": pt.tail,
        "log2_inner": pt.log2_inner,
        "vacuous": pt.vacuous,
    }
