"""Closed-form connection quantities on the two-level path.

For the path with n edges, six connection probabilities from the bottom
start vertex admit an exact recursion in q = 1 - p: reaching the bottom
end, the top end, both, exactly one, and the two only-one variants.
The recursion tracks the both/exactly-one pair and the two only-one
quantities; the plain end-to-end probabilities are reconstructed from
the closed-form gap, whose correctness is checked against the
independently tracked only-one recursion and against full enumeration.

Near q = 0 the reconstructed quantities have pinned series coefficients,
and along q = lambda/sqrt(n) the bottom-to-bottom probability tends to
exp(-lambda^2); both facts are exposed as checks here.
"""

from __future__ import annotations

from dataclasses import dataclass
from decimal import Decimal, localcontext
from fractions import Fraction
from math import isqrt
from typing import Iterator, Optional

from .graphs import Multigraph
from .polynomials import VAR_Q, RationalPoly
from .reports import FAIL, PARTIAL, PASS, VerificationReport

_DECIMAL_PRECISION = 50
# Continued-fraction approximation budget for irrational sqrt(n).
_APPROX_DENOMINATOR = 10 ** 40


def path_graph(n: int) -> Multigraph:
    """The path with n edges on vertices '0' .. 'n'."""
    if n < 0:
        raise ValueError("n must be nonnegative")
    vertices = tuple(str(i) for i in range(n + 1))
    edges = tuple((i, str(i), str(i + 1)) for i in range(n))
    return Multigraph(vertices, edges)


@dataclass(frozen=True)
class LineQuantities:
    """Connection probabilities from the bottom start of the length-n path.

    All polynomials are in q = 1 - p.  to_bottom and to_top are the
    probabilities of reaching the bottom and top copies of the far end;
    to_both and to_exactly_one refine them; to_bottom_only and
    to_top_only are the corresponding exclusive events.
    """

    n: int
    to_bottom: RationalPoly
    to_top: RationalPoly
    to_both: RationalPoly
    to_exactly_one: RationalPoly
    to_bottom_only: RationalPoly
    to_top_only: RationalPoly


def gap_polynomial(n: int) -> RationalPoly:
    """Closed form q^(n+1) (1-q)^n for to_bottom - to_top."""
    q = RationalPoly.variable(VAR_Q)
    return q ** (n + 1) * (1 - q) ** n


def iter_line_quantities(max_n: int) -> Iterator[LineQuantities]:
    """Yield LineQuantities for n = 0, 1, ..., max_n at incremental cost."""
    q = RationalPoly.variable(VAR_Q)
    one = RationalPoly.one(VAR_Q)
    p = one - q
    step_only = q * p          # survive one rung reaching the same side
    step_cross = q * q * p     # enter from the both-reached state
    both_keep = (one + 2 * q) * p * p
    both_from_one = p * p
    one_from_both = 2 * q * q * p
    one_keep = q * p

    bottom_only = q
    top_only = RationalPoly.zero(VAR_Q)
    both = p
    exactly_one = q

    n = 0
    while True:
        gap = gap_polynomial(n)
        half = Fraction(1, 2)
        to_bottom = (2 * both + exactly_one + gap) * half
        to_top = (2 * both + exactly_one - gap) * half
        yield LineQuantities(
            n=n,
            to_bottom=to_bottom,
            to_top=to_top,
            to_both=both,
            to_exactly_one=exactly_one,
            to_bottom_only=bottom_only,
            to_top_only=top_only,
        )
        if n == max_n:
            return
        bottom_only, top_only, both, exactly_one = (
            step_only * bottom_only + step_cross * both,
            step_only * top_only + step_cross * both,
            both_keep * both + both_from_one * exactly_one,
            one_from_both * both + one_keep * exactly_one,
        )
        n += 1


def line_quantities(n: int) -> LineQuantities:
    if n < 0:
        raise ValueError("n must be nonnegative")
    for lq in iter_line_quantities(n):
        if lq.n == n:
            return lq
    raise AssertionError("unreachable")


def gap_check(n: int) -> bool:
    """The reconstruction gap agrees with the only-one recursion difference."""
    lq = line_quantities(n)
    gap = gap_polynomial(n)
    return (
        lq.to_bottom - lq.to_top == gap
        and lq.to_bottom_only - lq.to_top_only == gap
    )


def _series_table(n: int) -> dict[str, list[Fraction]]:
    """Pinned series coefficients through order five, exact for n >= 5."""
    f = Fraction
    return {
        "to_bottom": [f(1), f(0), f(-(n + 2)), f(-2 * (n - 1)),
                      f(n * n + 7 * n + 10, 2), f(2 * (n * n + 2 * n - 8))],
        "to_top": [f(1), f(0), f(-(n + 2)), f(-2 * (n - 1)),
                   f(n * n + 7 * n + 10, 2), f(2 * (n * n + 2 * n - 8))],
        "to_both": [f(1), f(0), f(-(n + 3)), f(-2 * (n - 1)),
                    f(n * n + 9 * n + 16, 2), f(2 * (n * n + 3 * n - 10))],
        "to_exactly_one": [f(0), f(0), f(2), f(0),
                           f(-2 * (n + 3)), f(-4 * (n - 2))],
    }


def series_check(n: int) -> VerificationReport:
    """Compare computed low-order coefficients against the pinned table.

    The table is exact only up to order n, so for n < 5 the comparison
    stops at order n and the verdict is PARTIAL.
    """
    lq = line_quantities(n)
    table = _series_table(n)
    limit = min(5, n)
    mismatches = []
    checked = {}
    for name, expected in table.items():
        poly: RationalPoly = getattr(lq, name)
        got = [poly.coeff(k) for k in range(limit + 1)]
        checked[name] = got
        for k in range(limit + 1):
            if got[k] != expected[k]:
                mismatches.append({"quantity": name, "order": k,
                                   "expected": expected[k], "got": got[k]})
    if mismatches:
        verdict = FAIL
    elif n < 5:
        verdict = PARTIAL
    else:
        verdict = PASS
    return VerificationReport(
        check="line_series",
        verdict=verdict,
        inputs={"n": n},
        quantities={"orders_checked": limit, "coefficients": checked},
        witnesses={"mismatches": mismatches},
    )


def _approx_lambda_over_sqrt(lam: Fraction, n: int) -> Fraction:
    """Rational lambda/sqrt(n) with relative error well under 1e-30."""
    if n <= 0:
        raise ValueError("n must be positive")
    root = isqrt(n)
    if root * root == n:
        return lam / root
    # lambda/sqrt(n) = lambda*sqrt(n)/n; floor sqrt at 40 digits, then
    # take the best continued-fraction approximant under the budget.
    scale = 10 ** 40
    r = isqrt(n * scale * scale)
    approx = Fraction(lam.numerator * r, lam.denominator * n * scale)
    return approx.limit_denominator(_APPROX_DENOMINATOR)


@dataclass(frozen=True)
class GaussianLimitResult:
    """Evaluation of the bottom connection probability at q ~ lambda/sqrt(n)."""

    n: int
    lam: Fraction
    q: Fraction
    value: Decimal
    target: Decimal
    gap_bound: Decimal
    absolute_error: Decimal


def gaussian_limit(n: int, lam: Fraction) -> GaussianLimitResult:
    """Exact evaluation against the limiting value exp(-lambda^2)."""
    lam = Fraction(lam)
    q = _approx_lambda_over_sqrt(lam, n)
    if not 0 < q < 1:
        raise ValueError(f"lambda/sqrt(n) = {q} falls outside (0, 1)")
    lq = line_quantities(n)
    value_exact = lq.to_bottom.evaluate(q)
    gap_exact = gap_polynomial(n).evaluate(q)
    with localcontext() as ctx:
        ctx.prec = _DECIMAL_PRECISION
        value = Decimal(value_exact.numerator) / Decimal(value_exact.denominator)
        gap_bound = Decimal(gap_exact.numerator) / Decimal(gap_exact.denominator)
        lam2 = lam * lam
        target = (-Decimal(lam2.numerator) / Decimal(lam2.denominator)).exp()
        error = abs(value - target)
    return GaussianLimitResult(
        n=n, lam=lam, q=q, value=value, target=target,
        gap_bound=gap_bound, absolute_error=error,
    )
