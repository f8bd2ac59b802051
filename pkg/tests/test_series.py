"""Series engine: recurrences against enumeration oracles and each other."""
from fractions import Fraction

import pytest

from fpblab import perms, series
from fpblab.config import BudgetExceededError


def brute_counts(n, tau):
    return perms.fixed_point_counts(perms.enumerate_avoiders(n, tau), n)


def test_catalan_routes_agree():
    assert series.catalan_numbers(60) == series.catalan_numbers_by_convolution(60)
    assert series.catalan_numbers(5) == [1, 1, 2, 5, 14, 42]


def test_derangements():
    assert series.derangement_numbers(8) == [1, 0, 1, 2, 9, 44, 265, 1854, 14833]
    # oracle: brute count of fixed-point-free permutations
    for n in range(8):
        brute = sum(1 for s in perms.enumerate_permutations(n) if perms.fixed_points(s) == 0)
        assert series.derangement_numbers(n)[n] == brute


def test_sqrt_series_values_and_binomial_oracle():
    s = series.sqrt_series(4)
    assert s == [1, -2, -2, -4, -10]
    # generalized binomial oracle: binom(1/2, n) * (-4)^n
    coeffs = series.sqrt_series(25)
    for n in range(26):
        num = Fraction(1)
        for i in range(n):
            num *= Fraction(1, 2) - i
        for i in range(1, n + 1):
            num /= i
        assert num * Fraction(-4) ** n == coeffs[n]


def test_sqrt_series_self_convolution_is_one_minus_4z():
    s = series.sqrt_series(30)
    for n in range(31):
        conv = sum(s[j] * s[n - j] for j in range(n + 1))
        assert conv == {0: 1, 1: -4}.get(n, 0)


def test_polynomials_match_enumeration_for_all_three_patterns():
    table = series.avoider_polynomials(9)
    for n in range(10):
        for tau in series.TAU_CLASS:
            counts = brute_counts(n, tau)
            assert [table[n].coefficient(k) for k in range(n + 1)] == counts, (n, tau)


def test_polynomial_examples():
    table = series.avoider_polynomials(4)
    assert table[1].coeffs == (0, 1)  # q
    assert table[3].coeffs == (2, 2, 0, 1)  # q^3 + 2q + 2
    assert table[4].coeffs == (6, 4, 3, 0, 1)  # q^4 + 3q^2 + 4q + 6


def test_polynomial_invariants():
    cat = series.catalan_numbers(40)
    table = series.avoider_polynomials(40)
    for n in range(41):
        poly = table[n]
        assert all(c >= 0 for c in poly.coeffs)
        assert sum(poly.coeffs) == cat[n]  # mass identity at q = 1
        if n >= 2:
            assert poly.coefficient(n - 1) == 0  # no permutation has n-1 fixed points
        assert poly.coefficient(n) == 1  # only the identity has n fixed points


def test_eval_engine():
    assert [int(v) for v in series.avoider_series(1, 12).values] == series.catalan_numbers(12)
    assert series.avoider_series(2, 3)[3] == 14  # 8 + 4 + 2
    assert series.avoider_series(0, 4)[4] == 6  # fixed-point-free 321-avoiders of length 4
    table = series.avoider_polynomials(10)
    for q in (Fraction(1, 2), Fraction(7, 3), 5):
        ser = series.avoider_series(q, 10)
        for n in range(11):
            assert ser[n] == table[n](q), (q, n)


def test_eval_engine_float_rejected():
    with pytest.raises(TypeError, match="exact rational"):
        series.avoider_series(0.5, 5)


def test_columns_match_polynomials():
    # cross-method identity for n <= 30
    table = series.avoider_polynomials(30)
    cols = series.avoider_columns(30, 30, mode="exact")
    for n in range(31):
        for k in range(n + 1):
            assert cols.count(k, n) == table[n].coefficient(k)
    assert [cols.count(0, n) for n in range(5)] == [1, 0, 1, 2, 6]
    assert all(cols.count(n, n) == 1 for n in range(31))


def test_scaled_float_columns_track_exact():
    # spec regression band: absolute error <= 1e-10 for n <= 200, k <= n
    n_max = 200
    exact = series.avoider_columns(n_max, n_max, mode="exact")
    scaled = series.avoider_columns(n_max, n_max, mode="scaled-float")
    worst = 0.0
    for n in range(n_max + 1):
        for k in range(n + 1):
            worst = max(worst, abs(scaled.scaled_count(k, n) - exact.count(k, n) / 4.0**n))
    assert worst <= 1e-10, worst


def test_unrestricted_closed_form():
    assert series.unrestricted_normalization(1, 4) == 24
    assert series.unrestricted_normalization(0, 4) == 9  # derangements
    # n = 3 polynomial is q^3 + 3q + 2
    for q in (1, 2, Fraction(1, 2)):
        q = Fraction(q)
        assert series.unrestricted_normalization(q, 3) == q**3 + 3 * q + 2
    for n in range(8):
        for q in (Fraction(1, 2), Fraction(1), Fraction(2), Fraction(5)):
            brute = sum(q ** perms.fixed_points(s) for s in perms.enumerate_permutations(n))
            assert series.unrestricted_normalization(q, n) == brute


def test_factorial_moment_examples():
    # order 1, n = 3: the weight series coefficient is 3q^3 + 2q
    for q in (1, 2, Fraction(1, 3)):
        q = Fraction(q)
        assert series.factorial_moment_coefficient(1, q, 3) == 3 * q**3 + 2 * q
    assert series.factorial_moment_coefficient(2, 1, 3) == 6  # only the identity contributes
    assert series.factorial_moment_coefficient(1, Fraction(5, 7), 1) == Fraction(5, 7)


def test_factorial_moments_match_coefficient_sums():
    # spec consistency window: n <= 30, m <= 3, against the polynomial route
    table = series.avoider_polynomials(30)
    for q in (Fraction(3), Fraction(1, 2)):
        for n in (5, 12, 30):
            poly = table[n]
            for m in (1, 2, 3):
                direct = Fraction(0)
                for k in range(n + 1):
                    falling = 1
                    for i in range(m):
                        falling *= k - i
                    direct += falling * poly.coefficient(k) * q**k
                assert series.factorial_moment_coefficient(m, q, n) == direct, (q, n, m)


def test_factorial_moments_match_enumeration():
    for n in range(1, 8):
        for m in (1, 2, 4):
            direct = Fraction(0)
            for sigma in perms.enumerate_avoiders(n, "321"):
                k = perms.fixed_points(sigma)
                falling = 1
                for i in range(m):
                    falling *= k - i
                direct += falling * Fraction(2) ** k
            assert series.factorial_moment_coefficient(m, 2, n) == direct


def test_budget_refusals():
    with pytest.raises(BudgetExceededError, match="poly"):
        series.avoider_polynomials(10, budget=5)
    with pytest.raises(BudgetExceededError, match="eval"):
        series.avoider_series(2, 50, budget=10)
    with pytest.raises(BudgetExceededError, match="columns"):
        series.avoider_columns(30, 30, mode="exact", budget=10)
    with pytest.raises(ValueError, match="k_max"):
        series.avoider_columns(5, 3)


def test_budget_env_override(monkeypatch):
    from fpblab.config import budgets

    monkeypatch.setenv("FPBL_BUDGET", "poly=7, eval=123")
    assert budgets()["poly"] == 7
    assert budgets()["eval"] == 123
    assert budgets()["columns"] == 400
    monkeypatch.setenv("FPBL_BUDGET", "bogus=1")
    with pytest.raises(ValueError, match="unknown FPBL_BUDGET key"):
        budgets()


def test_qpolynomial_behaviour():
    p = series.QPolynomial((2, 2, 0, 1, 0, 0))
    assert p.coeffs == (2, 2, 0, 1)  # trailing zeros trimmed
    assert p.degree == 3
    assert p(2) == 14
    assert p(Fraction(1, 2)) == Fraction(25, 8)
    assert p.derivative().coeffs == (2, 0, 3)
    assert str(p) == "2 + 2*q + 1*q^3"


def test_exports_round_trip():
    import json

    table = series.avoider_series(Fraction(1, 2), 6)
    text = series.table_to_json(table)
    data = json.loads(text)
    assert json.dumps(data, sort_keys=True, separators=(",", ":")) + "\n" == text
    assert data["values"][3] == "25/8"
    csv_text = series.table_to_csv(table)
    assert csv_text.splitlines()[0] == "n,value,mode"
    cols = series.avoider_columns(3, 5, mode="exact")
    lines = series.columns_to_csv(cols).splitlines()
    assert lines[0] == "n,k,value,mode"
    assert "4,2,3,exact" in lines  # a[2][4] = 3


def test_scaled_weight_rows_supercritical_base():
    # above the phase point the rows are rescaled so that entries stay finite
    import numpy as np

    rows = series.scaled_weight_rows(4.0, 300)
    assert np.isfinite(rows).all()
    assert rows[300].sum() > 0
    poly = series.avoider_polynomials(60)[60]
    z = poly(4)
    w = rows[60]
    pmf_exact = [float(Fraction(poly.coefficient(k)) * Fraction(4) ** k / z) for k in range(61)]
    pmf_float = w / w.sum()
    assert max(abs(a - b) for a, b in zip(pmf_exact, pmf_float)) < 1e-12
