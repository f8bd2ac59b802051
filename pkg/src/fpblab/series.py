"""
Exact big-integer series engine for fixed-point-biased permutation counts.

Everything here is driven by one bivariate generating function: for any of
the three patterns 132, 321, 213, the total weight of avoiders of length n
with bias q on fixed points has generating function

    G(z, q) = 2 / (1 + 2(1-q)z + sqrt(1-4z)),

so with s = series of sqrt(1-4z) (s_0 = 1, s_j = -2*Catalan(j-1)) the
length-n weights satisfy the convolution recurrence

    2*g_n = -2(1-q)*g_{n-1} - sum_{j=1..n} s_j * g_{n-j},

equivalently  g_n = (q-1)*g_{n-1} + sum_{j=1..n} Catalan(j-1)*g_{n-j}.

This recurrence is used both with polynomial arithmetic in q (exact-poly
mode) and at a fixed rational q (exact-eval mode). The column route
extracts the per-fixed-point-count coefficients a[k][n] from
alpha*A_k = 2z*A_{k-1} with alpha = 1 + 2z + sqrt(1-4z); both routes are
validated against exhaustive enumeration in the tests.

Unrestricted permutations use the closed form
    total_weight(n, q) = sum_k binom(n,k) * derangements(n-k) * q^k.

Catalan and derangement numbers come from their own recurrences so they can
serve as independent oracles for the series code.
"""
from __future__ import annotations

import json
import sys
from dataclasses import dataclass, field
from fractions import Fraction
from math import comb

import numpy as np

from .config import check_budget

TAU_CLASS = ("132", "321", "213")  # patterns sharing the generating function


def as_rational(q) -> Fraction:
    """Coerce int/str/Fraction to an exact rational ("a/b" and "0.25" both work)."""
    if isinstance(q, float):
        raise TypeError(
            "exact modes require an exact rational q (int, Fraction, or string); "
            "floats are only accepted in scaled-float mode"
        )
    return Fraction(q)


# ---------------------------------------------------------------------------
# Reference integer sequences (independent recurrences; they act as oracles)
# ---------------------------------------------------------------------------

_catalan_cache: list[int] = [1]


def catalan_numbers(n_max: int) -> list[int]:
    """Catalan numbers C_0..C_n via the ratio recurrence C_n = C_{n-1}*2(2n-1)/(n+1)."""
    c = _catalan_cache
    while len(c) <= n_max:
        n = len(c)
        c.append(c[-1] * 2 * (2 * n - 1) // (n + 1))
    return c[: n_max + 1]


def catalan_numbers_by_convolution(n_max: int) -> list[int]:
    """Oracle route: C_0 = 1, C_{n+1} = sum_i C_i C_{n-i}."""
    c = [1]
    for n in range(n_max):
        c.append(sum(c[i] * c[n - i] for i in range(n + 1)))
    return c


def derangement_numbers(n_max: int) -> list[int]:
    """D_0..D_n with D_0 = 1, D_1 = 0, D_n = (n-1)(D_{n-1} + D_{n-2})."""
    d = [1, 0]
    for n in range(2, n_max + 1):
        d.append((n - 1) * (d[n - 1] + d[n - 2]))
    return d[: n_max + 1]


def sqrt_series(n_max: int) -> list[int]:
    """
    Coefficients of sqrt(1-4z): s_0 = 1 and s_n = -2*Catalan(n-1) for n >= 1.

    The binomial route binom(1/2, n)*(-4)^n gives the same integers; the
    tests check both and the self-convolution sum_j s_j s_{n-j} = [1, -4, 0, 0, ...].
    """
    cat = catalan_numbers(max(n_max - 1, 0))
    return [1] + [-2 * cat[n - 1] for n in range(1, n_max + 1)]


# ---------------------------------------------------------------------------
# Polynomials in q with integer coefficients
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class QPolynomial:
    """Integer-coefficient polynomial in q; coeffs[k] multiplies q^k, trailing zeros trimmed."""

    coeffs: tuple[int, ...]

    def __post_init__(self):
        c = tuple(self.coeffs)
        while c and c[-1] == 0:
            c = c[:-1]
        object.__setattr__(self, "coeffs", c)

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def coefficient(self, k: int) -> int:
        return self.coeffs[k] if 0 <= k < len(self.coeffs) else 0

    def __call__(self, q) -> Fraction:
        q = as_rational(q)
        acc = Fraction(0)
        for c in reversed(self.coeffs):
            acc = acc * q + c
        return acc

    def derivative(self) -> "QPolynomial":
        return QPolynomial(tuple(k * c for k, c in enumerate(self.coeffs) if k >= 1))

    def __str__(self) -> str:
        if not self.coeffs:
            return "0"
        parts = []
        for k, c in enumerate(self.coeffs):
            if c == 0:
                continue
            term = f"{c}" if k == 0 else (f"{c}*q" if k == 1 else f"{c}*q^{k}")
            parts.append(term)
        return " + ".join(parts)


@dataclass
class SeriesTable:
    """
    Values of one generating function for n = 0..n_max.

    mode: "exact-poly" (QPolynomial), "exact-eval" (Fraction), or
    "scaled-float" (float). meta records which function and which q.
    """

    mode: str
    values: list
    meta: dict = field(default_factory=dict)

    @property
    def n_max(self) -> int:
        return len(self.values) - 1

    def __getitem__(self, n: int):
        return self.values[n]


# ---------------------------------------------------------------------------
# Exact engines (shared incremental caches keyed by the evaluation point)
# ---------------------------------------------------------------------------

_poly_cache: list[list[int]] = [[1]]  # raw coefficient lists of the length-n weight polynomials


def _extend_poly_cache(n_max: int) -> None:
    cat = catalan_numbers(n_max)
    g = _poly_cache
    while len(g) <= n_max:
        n = len(g)
        acc = [0] * (n + 1)
        prev = g[n - 1]
        for k, v in enumerate(prev):  # (q-1) * g_{n-1}
            acc[k + 1] += v
            acc[k] -= v
        for j in range(1, n + 1):  # sum Catalan(j-1) * g_{n-j}
            c = cat[j - 1]
            for k, v in enumerate(g[n - j]):
                acc[k] += c * v
        g.append(acc)


def avoider_polynomials(n_max: int, budget: int | None = None) -> SeriesTable:
    """
    Length-n fixed-point polynomials for the 132/321/213 avoidance classes.

    values[n].coefficient(k) counts the avoiders of length n with exactly k
    fixed points; values[n](1) is Catalan(n) and values[n](q) is the
    normalization constant of the biased avoiding measure.
    """
    check_budget("poly", n_max, budget, hint="use avoider_series or avoider_columns at large n")
    _extend_poly_cache(n_max)
    vals = [QPolynomial(tuple(c)) for c in _poly_cache[: n_max + 1]]
    return SeriesTable(mode="exact-poly", values=vals, meta={"function": "avoider-weights"})


# fixed-q caches: (num, den) -> {"g": [U_n...], "g2": [...], "g3": [...], "g4": [...]}
# where U_n = value_n * den^n so every entry is an integer.
_eval_cache: dict[tuple[int, int], dict[str, list[int]]] = {}


def _eval_entry(q: Fraction) -> dict[str, list[int]]:
    key = (q.numerator, q.denominator)
    if key not in _eval_cache:
        _eval_cache[key] = {"g": [1]}
    return _eval_cache[key]


def _extend_eval(q: Fraction, n_max: int) -> list[int]:
    entry = _eval_entry(q)
    g = entry["g"]
    if len(g) > n_max:
        return g
    a, b = q.numerator, q.denominator
    cat = catalan_numbers(n_max)
    # weights w_j = Catalan(j-1) * b^j keep U_n = g_n * b^n integral
    w = entry.setdefault("w", [0, b])  # w[1] = Catalan(0)*b
    while len(w) <= n_max:
        j = len(w)
        w.append(cat[j - 1] * pow(b, j))
    while len(g) <= n_max:
        n = len(g)
        acc = (a - b) * g[n - 1]
        for j in range(1, n + 1):
            acc += w[j] * g[n - j]
        g.append(acc)
    return g


def _power_full(q: Fraction, p: int, n_max: int) -> list[int]:
    # full series of G^p at fixed q, same den^n scaling as the base series
    if p == 1:
        return _extend_eval(q, n_max)
    entry = _eval_entry(q)
    prev = _power_full(q, p - 1, n_max)
    g = entry["g"]
    series = entry.setdefault(f"g{p}", [1])
    while len(series) <= n_max:
        m = len(series)
        series.append(sum(prev[i] * g[m - i] for i in range(m + 1)))
    return series


def _power_coefficient(q: Fraction, p: int, j: int) -> int:
    # [z^j] G^p, scaled by den^j: dot the two cached half powers so that a
    # single-coefficient query never builds more full series than needed
    lo, hi = p // 2, p - p // 2
    a = _power_full(q, hi, j)
    b = a if lo == hi else _power_full(q, lo, j)
    return sum(a[i] * b[j - i] for i in range(j + 1))


def avoider_series(q, n_max: int, budget: int | None = None) -> SeriesTable:
    """
    Exact normalization constants of the biased avoiding measure, n = 0..n_max.

    values[n] = sum over avoiders of length n of q^(fixed points), as a
    Fraction. At q = 1 these are the Catalan numbers; q = 0 counts the
    fixed-point-free avoiders (the measure itself needs q > 0, the series
    does not).
    """
    q = as_rational(q)
    check_budget("eval", n_max, budget)
    g = _extend_eval(q, n_max)
    b = q.denominator
    vals = [Fraction(g[n], pow(b, n)) for n in range(n_max + 1)]
    return SeriesTable(mode="exact-eval", values=vals, meta={"function": "avoider-normalization", "q": str(q)})


def avoider_normalization(q, n: int, budget: int | None = None) -> Fraction:
    """Normalization constant of the biased avoiding measure at a single n."""
    return avoider_series(q, n, budget=budget)[n]


def factorial_moment_coefficient(m: int, q, n: int, budget: int | None = None) -> Fraction:
    """
    [z^n] of the m-th falling-factorial weight series at bias q, exactly.

    The series is m! (qz)^m G^{m+1}; dividing the result by the length-n
    normalization gives the m-th factorial moment of the fixed-point count
    under the biased avoiding measure.
    """
    if m < 1:
        raise ValueError("moment order m must be >= 1")
    q = as_rational(q)
    check_budget("eval", n, budget)
    if n < m:
        return Fraction(0)
    scaled = _power_coefficient(q, m + 1, n - m)  # [z^{n-m}] G^{m+1} times den^(n-m)
    fact = 1
    for i in range(2, m + 1):
        fact *= i
    return fact * q**m * Fraction(scaled, q.denominator ** (n - m))


def factorial_moment_series(m: int, q, n_max: int, budget: int | None = None) -> SeriesTable:
    """Table of factorial-moment coefficients for n = 0..n_max at fixed q."""
    vals = [factorial_moment_coefficient(m, q, n, budget=budget) for n in range(n_max + 1)]
    return SeriesTable(
        mode="exact-eval", values=vals, meta={"function": f"factorial-moment-{m}", "q": str(as_rational(q))}
    )


def unrestricted_normalization(q, n: int) -> Fraction:
    """
    Total bias weight of all of S_n: sum_k binom(n,k) * D_{n-k} * q^k.

    At q = 1 this is n!; at q = 0 it is the derangement number D_n.
    """
    q = as_rational(q)
    if n > 100_000:
        raise ValueError("n too large for the closed-form evaluation")
    d = derangement_numbers(n)
    return sum(comb(n, k) * d[n - k] * q**k for k in range(n + 1))


def unrestricted_weights(q, n: int) -> list[Fraction]:
    """Unnormalized weights by fixed-point count: w[k] = binom(n,k)*D_{n-k}*q^k."""
    q = as_rational(q)
    d = derangement_numbers(n)
    return [comb(n, k) * d[n - k] * q**k for k in range(n + 1)]


# ---------------------------------------------------------------------------
# Column extraction: counts by fixed-point number
# ---------------------------------------------------------------------------


@dataclass
class ColumnTable:
    """
    Per-fixed-point-count coefficients a[k][n] for the avoidance classes.

    exact mode holds big integers; scaled-float mode holds a[k][n] / 4^n as
    floats (a numpy array indexed [n, k]).
    """

    mode: str
    k_max: int
    n_max: int
    exact: list[list[int]] | None = None  # indexed [k][n]
    scaled: np.ndarray | None = None  # indexed [n, k]

    def count(self, k: int, n: int) -> int:
        if self.exact is None:
            raise ValueError("counts only available in exact mode")
        return self.exact[k][n]

    def scaled_count(self, k: int, n: int) -> float:
        if self.scaled is not None:
            return float(self.scaled[n, k])
        return self.exact[k][n] / 4.0**n


def avoider_columns(k_max: int, n_max: int, mode: str = "exact", budget: int | None = None) -> ColumnTable:
    """
    Counts of avoiders by fixed-point number, from the column recurrence.

    With alpha = 1 + 2z + sqrt(1-4z), the k-th column satisfies
    alpha*A_k = 2z*A_{k-1} (and alpha*A_0 = 2); coefficientwise that is

        a[k][n] = a[k-1][n-1] + sum_{j=2..n} Catalan(j-1) * a[k][n-j].

    scaled-float mode runs the same recurrence on a[k][n]/4^n.
    """
    if k_max > n_max:
        raise ValueError("k_max cannot exceed n_max (no length-n permutation has more than n fixed points)")
    if mode == "exact":
        check_budget("columns", k_max, budget, hint="use scaled-float mode for large tables")
        check_budget("eval", n_max)
        cat = catalan_numbers(n_max)
        cols: list[list[int]] = []
        for k in range(k_max + 1):
            col = [0] * (n_max + 1)
            for n in range(n_max + 1):
                acc = 0
                if k == 0 and n == 0:
                    acc = 1
                if k > 0 and n > 0:
                    acc = cols[k - 1][n - 1]
                acc += sum(cat[j - 1] * col[n - j] for j in range(2, n + 1))
                col[n] = acc
            cols.append(col)
        return ColumnTable(mode="exact", k_max=k_max, n_max=n_max, exact=cols)
    if mode == "scaled-float":
        scaled = _scaled_weighted_columns(n_max, k_max, q=1.0, base=4.0)
        return ColumnTable(mode="scaled-float", k_max=k_max, n_max=n_max, scaled=scaled)
    raise ValueError(f"unknown mode {mode!r} (expected 'exact' or 'scaled-float')")


def _scaled_weighted_columns(n_max: int, k_max: int, q: float, base: float) -> np.ndarray:
    """
    Float table t[n, k] = a[k][n] * q^k / base^n by the positive column recurrence.

    All recurrence terms are nonnegative, so relative float error stays at
    machine-epsilon scale; `base` is chosen by the caller to keep the row
    sums (the scaled normalization constants) inside float range.
    """
    t = np.zeros((n_max + 1, k_max + 1))
    t[0, 0] = 1.0
    # w[j] = Catalan(j-1)/base^j for j >= 2, via the Catalan ratio recurrence
    w = np.zeros(n_max + 1)
    if n_max >= 2:
        w[2] = 1.0 / base**2
        for j in range(3, n_max + 1):
            w[j] = w[j - 1] * (2 * (2 * j - 3) / j) / base
    wr = w[::-1].copy()  # contiguous reversed weights so the matvec hits BLAS
    qb = q / base
    for n in range(1, n_max + 1):
        row = np.zeros(k_max + 1)
        row[1:] = qb * t[n - 1, : k_max]
        if n >= 2:
            row += wr[n_max - n : n_max - 1] @ t[: n - 1]
        t[n] = row
    return t


def scaled_weight_rows(q: float, n_max: int, k_max: int | None = None, base: float | None = None) -> np.ndarray:
    """
    Scaled bias weights t[n, k] proportional to a[k][n] * q^k (float engine).

    For q <= 3 rows are scaled by 4^n; above the phase point the
    normalization grows like ((q-1)^2/(q-2))^n > 4^n and that base is used
    instead so the mass-carrying entries stay representable. Each row still
    normalizes to the same probability vector.
    """
    if q <= 0:
        raise ValueError("bias parameter q must be positive")
    if k_max is None:
        k_max = n_max
    if base is None:
        base = 4.0 if q <= 3 else (q - 1) ** 2 / (q - 2)
    return _scaled_weighted_columns(n_max, k_max, q=float(q), base=float(base))


# ---------------------------------------------------------------------------
# Export
# ---------------------------------------------------------------------------


def _value_to_text(v, csv: bool = False) -> str:
    if isinstance(v, QPolynomial):
        if csv:  # CSV cells must stay comma-free
            return " ".join(_int_to_str(c) for c in v.coeffs)
        return json.dumps([_int_to_str(c) for c in v.coeffs])
    if isinstance(v, Fraction):
        if v.denominator == 1:
            return _int_to_str(v.numerator)
        return f"{_int_to_str(v.numerator)}/{_int_to_str(v.denominator)}"
    if isinstance(v, float):
        return repr(v)
    if isinstance(v, int):
        return _int_to_str(v)
    raise TypeError(f"cannot serialize {type(v).__name__}")


def _int_to_str(x: int) -> str:
    # decimal rendering of very large exact values needs the str-digit guard lifted
    need = x.bit_length() // 3 + 3
    if need > sys.get_int_max_str_digits():
        sys.set_int_max_str_digits(need)
    return str(x)


def table_to_json(table: SeriesTable) -> str:
    payload = {
        "mode": table.mode,
        "meta": table.meta,
        "values": [_value_to_text(v) for v in table.values],
    }
    return json.dumps(payload, sort_keys=True, separators=(",", ":")) + "\n"


def table_to_csv(table: SeriesTable) -> str:
    lines = ["n,value,mode"]
    for n, v in enumerate(table.values):
        lines.append(f"{n},{_value_to_text(v, csv=True)},{table.mode}")
    return "\n".join(lines) + "\n"


def columns_to_csv(table: ColumnTable) -> str:
    lines = ["n,k,value,mode"]
    for n in range(table.n_max + 1):
        for k in range(min(n, table.k_max) + 1):
            if table.mode == "exact":
                val = _int_to_str(table.count(k, n))
            else:
                val = repr(table.scaled_count(k, n))
            lines.append(f"{n},{k},{val},{table.mode}")
    return "\n".join(lines) + "\n"
