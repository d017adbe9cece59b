"""Closed-form threshold parameters, evaluated in exact rational arithmetic."""
from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass
from fractions import Fraction
from math import factorial

from .core import binom
from .errors import PreconditionError

T_MAX = 20


def _check_kt(k: int, t: int) -> None:
    if not 3 <= k < t:
        raise PreconditionError(f"need 3 <= k < t, got k={k}, t={t}")
    if t > T_MAX:
        raise PreconditionError(f"t={t} exceeds the desk-scale limit {T_MAX}")


def beta_ltl(k: int, t: int, l: int) -> Fraction:
    """2 / (C(t,k-1) + C(t-l-1,k-1) + C(l+1,k-1))."""
    _check_kt(k, t)
    if not 0 <= l <= t - 1:
        raise PreconditionError(f"need 0 <= l <= t-1, got l={l}")
    return Fraction(2, binom(t, k - 1) + binom(t - l - 1, k - 1) + binom(l + 1, k - 1))


def l0_conditions(k: int, t: int, l: int) -> dict[str, bool]:
    """The three defining conditions of l0, evaluated separately."""
    b = beta_ltl(k, t, l) if l <= t - 1 else None
    c = binom(2 * l + 1, k - 1)
    return {
        "half": 2 * (l + 1) <= t,
        "link": b is not None and b <= Fraction(1, binom(t - 1, k - 1) + binom(l, k - 1)),
        "double": c == 0 or (b is not None and b <= Fraction(1, 2 * c)),
    }


def l0_qualifying(k: int, t: int) -> int | None:
    """Largest l meeting all three conditions literally (k >= 4), else None."""
    _check_kt(k, t)
    best = None
    for l in range(0, t):
        if all(l0_conditions(k, t, l).values()):
            best = l
    return best


def l0_floor(k: int, t: int) -> int:
    """floor(min(k, t-2) / 2), the stated lower bound on l0 for k >= 4."""
    return min(k, t - 2) // 2


def l0(k: int, t: int) -> int:
    """l0(k, t); 1 for k = 3.

    For k >= 4 this is the largest l meeting the three conditions. Where
    that falls short of ``l0_floor``, it is raised to the largest l up to
    the floor that still meets the first two conditions; the second one
    keeps d(k, t) positive. The raise matters for (5, 6), where only the
    doubling condition fails at l = 2 and the published k = 5 threshold
    uses beta(5, 6, 2).
    """
    _check_kt(k, t)
    if k == 3:
        return 1
    q = l0_qualifying(k, t)
    best = q if q is not None else 0
    for l in range(best + 1, l0_floor(k, t) + 1):
        cond = l0_conditions(k, t, l)
        if cond["half"] and cond["link"]:
            best = l
    return best


def beta(k: int, t: int) -> Fraction:
    return beta_ltl(k, t, l0(k, t))


def d_param(k: int, t: int) -> Fraction:
    return 1 - binom(t - 1, k - 1) * beta(k, t)


def weight_w(t: int, j: int) -> Fraction:
    """w(0) = w(1) = 0 and w(j+1) - w(j) = 1 - (t-j+1)!/(t+1)!."""
    if t < 1 or t > T_MAX:
        raise PreconditionError(f"t={t} outside 1..{T_MAX}")
    if not 0 <= j <= t:
        raise PreconditionError(f"need 0 <= j <= t, got j={j}")
    return _weights(t)[j]


_WEIGHT_CACHE: dict[int, tuple[Fraction, ...]] = {}


def _weights(t: int) -> tuple[Fraction, ...]:
    if t not in _WEIGHT_CACHE:
        top = factorial(t + 1)
        w = [Fraction(0), Fraction(0)]
        for j in range(1, t):
            w.append(w[-1] + 1 - Fraction(factorial(t - j + 1), top))
        _WEIGHT_CACHE[t] = tuple(w[: t + 1])
    return _WEIGHT_CACHE[t]


def weight_table(t: int) -> tuple[Fraction, ...]:
    """(w(0), ..., w(t))."""
    weight_w(t, 0)
    return _weights(t)


def k_plus_one_coefficient(k: int) -> Fraction:
    """1 - (k + [k odd]) / (2 k^2), the t = k+1 codegree coefficient."""
    if k < 3:
        raise PreconditionError("need k >= 3")
    return 1 - Fraction(k + (k % 2), 2 * k * k)


def general_coefficient(k: int, t: int) -> Fraction:
    """1 - min(beta(k,t), (t-1)/(t C(t-1,k-1)))."""
    return 1 - min(beta(k, t), Fraction(t - 1, t * binom(t - 1, k - 1)))


@dataclass(frozen=True)
class ThresholdRow:
    k: int
    t: int
    beta: Fraction
    l0: int
    d: Fraction
    codegree_coefficient: Fraction
    k_plus_one_bound: Fraction | None = None

    def as_record(self) -> dict[str, int]:
        return {
            "k": self.k, "t": self.t, "l0": self.l0,
            "beta_num": self.beta.numerator, "beta_den": self.beta.denominator,
            "d_num": self.d.numerator, "d_den": self.d.denominator,
            "coefficient_num": self.codegree_coefficient.numerator,
            "coefficient_den": self.codegree_coefficient.denominator,
        }


COLUMNS = ("k", "t", "l0", "beta_num", "beta_den", "d_num", "d_den",
           "coefficient_num", "coefficient_den")


def threshold_row(k: int, t: int) -> ThresholdRow:
    coeff = general_coefficient(k, t)
    plus_one = None
    if t == k + 1:
        plus_one = k_plus_one_coefficient(k)
        coeff = min(coeff, plus_one)
    return ThresholdRow(k, t, beta(k, t), l0(k, t), d_param(k, t), coeff, plus_one)


def threshold_table(k_range, t_rule=lambda k: k + 1) -> list[ThresholdRow]:
    """One row per k; ``t_rule`` maps k to the clique order t.

    For t = k+1 the coefficient is the smaller of the general bound and the
    k+1 bound, which yields 3/4, 9/11, 13/15, 19/21 for k = 3..6.
    """
    return [threshold_row(k, t_rule(k)) for k in k_range]


def table_to_csv(rows: list[ThresholdRow]) -> str:
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=COLUMNS, lineterminator="\n")
    writer.writeheader()
    for r in rows:
        writer.writerow(r.as_record())
    return buf.getvalue()


def table_to_json(rows: list[ThresholdRow]) -> str:
    return json.dumps([r.as_record() for r in rows], indent=2) + "\n"
