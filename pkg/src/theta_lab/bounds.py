"""Closed-form upper bounds and constant-free lower-bound shapes for vartheta.

All logarithms are natural; lower bounds are reported without their
(existential) constants so only growth rates are comparable.  Evaluation is
done in 50-digit mpmath arithmetic and rounded to float at the end.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass

import mpmath

from .errors import InputError

_DPS = 50


@dataclass(frozen=True)
class BoundReport:
    n: int
    d: int
    k: int
    upper_balanced: float
    upper_general: float
    lower_balanced_form: float
    lower_even_form: float
    steiner_lower_form: float
    log_f: float | None = None

    def as_dict(self) -> dict:
        return asdict(self)


def log2_binomial(n: int, a: int) -> mpmath.mpf:
    with mpmath.workdps(_DPS):
        return (mpmath.loggamma(n + 1) - mpmath.loggamma(a + 1) - mpmath.loggamma(n - a + 1)) / mpmath.log(2)


def log_representation_count(n: int, alpha: int, t: int) -> float:
    """log2 of (2 C(n, alpha))^t, the bound on the number of t-representations
    of graphs with independence number at most alpha."""
    if not (1 <= alpha <= n and t >= 1):
        raise InputError(f"need 1 <= alpha <= n and t >= 1; got n={n} alpha={alpha} t={t}")
    with mpmath.workdps(_DPS):
        return float(t * (1 + log2_binomial(n, alpha)))


def compute_bounds(n: int, d: int, k: int, alpha: int | None = None, t: int | None = None) -> BoundReport:
    if k < 2:
        raise InputError(f"k must be at least 2, got {k}")
    if not n > d >= 2:
        raise InputError(f"need n > d >= 2; got n={n} d={d}")
    with mpmath.workdps(_DPS):
        N, D, K = mpmath.mpf(n), mpmath.mpf(d), mpmath.mpf(k)
        ln_n, ln_d = mpmath.log(N), mpmath.log(D)
        c_bal = mpmath.mpf(2) ** (k + 2) * K ** (k + 1)
        delta = 1 / ((K - 1) * mpmath.mpf(2) ** (k + 2))
        c_gen = 2 * K / delta**k
        report = BoundReport(
            n=n,
            d=d,
            k=k,
            upper_balanced=float(c_bal * D ** (K / (K - 1)) * ln_n),
            upper_general=float(c_gen * D ** (K / 2) * ln_n),
            lower_balanced_form=float(D ** (K / (K - 1)) / ln_d * mpmath.log(N ** (K - 1) / D)),
            lower_even_form=float(D**2 / ln_d * mpmath.log(2 * N / (K * D))),
            steiner_lower_form=float(N ** (K / (K - 1)) / ln_n ** (1 / (K - 1))),
            log_f=None if alpha is None or t is None else log_representation_count(n, alpha, t),
        )
    return report
