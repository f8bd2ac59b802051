"""
Exact and float fixed-point laws, reference limit laws, and distances.

A FixedPointPMF is the law of the number of fixed points of a random
permutation under one of the three measure families:

- bias q on all of S_n                  (tau = None),
- uniform / bias q on the avoiders of a length-3 pattern tau.

Exact mode carries Fractions that sum to one exactly; float mode carries
doubles from the positively-scaled column engine (entries accurate to
machine-epsilon scale, sums normalized). Monte-Carlo estimates record
(seed, stream_id, sample count) so checks are reproducible bit for bit.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping

from . import series, special
from .config import budgets
from .perms import check_pattern, enumerate_avoiders, fixed_point_counts
from .series import TAU_CLASS, as_rational


class UnsupportedMeasureError(ValueError):
    """Raised when a (n, q, tau, mode) combination has no legal computation route."""


@dataclass(frozen=True)
class MeasureSpec:
    """Selects a fixed-point-biased measure: (n, q) plus an optional pattern."""

    n: int
    q: Fraction
    tau: str | None = None

    def __post_init__(self):
        object.__setattr__(self, "q", as_rational(self.q))
        if self.n < 0:
            raise ValueError("n must be nonnegative")
        if self.q <= 0:
            raise ValueError("bias parameter q must be positive")
        if self.tau is not None:
            object.__setattr__(self, "tau", check_pattern(self.tau))

    def describe(self) -> str:
        where = "all permutations" if self.tau is None else f"{self.tau}-avoiders"
        return f"bias {self.q} on {where} of length {self.n}"


@dataclass(frozen=True)
class Provenance:
    kind: str  # "series" | "enumeration" | "closed-form" | "monte-carlo"
    samples: int | None = None
    seed: int | None = None
    stream_id: int | None = None


class FixedPointPMF:
    """
    Law of the fixed-point count; weights indexed by k with sum 1.

    mode "exact" holds Fractions (exact sum); mode "float" holds doubles
    (sum within 1e-12 after normalization). No measure puts mass on
    k = n-1 when n >= 2, and that is enforced here.
    """

    def __init__(self, n: int, weights: Mapping[int, Fraction | float], mode: str,
                 provenance: Provenance, spec: MeasureSpec | None = None):
        if mode not in ("exact", "float"):
            raise ValueError(f"mode must be 'exact' or 'float', got {mode!r}")
        self.n = n
        self.mode = mode
        self.provenance = provenance
        self.spec = spec
        clean = {k: v for k, v in weights.items() if v != 0}
        if any(k < 0 or k > n for k in clean):
            raise ValueError("support must lie in 0..n")
        if n >= 2 and clean.get(n - 1, 0) != 0:
            raise ValueError(f"impossible mass at k = n-1 = {n - 1}")
        total = sum(clean.values())
        if mode == "exact":
            if total != 1:
                raise ValueError(f"exact weights must sum to 1, got {total}")
        else:
            if not math.isclose(float(total), 1.0, rel_tol=0, abs_tol=1e-9):
                raise ValueError(f"float weights sum to {float(total)}, expected 1")
            clean = {k: float(v) / float(total) for k, v in clean.items()}
        self.weights = dict(sorted(clean.items()))

    def pmf(self, k: int):
        return self.weights.get(k, Fraction(0) if self.mode == "exact" else 0.0)

    def cdf(self, k: int):
        zero = Fraction(0) if self.mode == "exact" else 0.0
        return sum((v for j, v in self.weights.items() if j <= k), zero)

    @property
    def support(self) -> list[int]:
        return list(self.weights)

    def reweighted(self, q) -> "FixedPointPMF":
        """
        Tilt by q^k and renormalize (the change of measure between bias
        levels): result(k) = q^k * self(k) / sum_j q^j * self(j).
        """
        q = as_rational(q)
        if self.mode == "exact":
            w = {k: q**k * v for k, v in self.weights.items()}
            z = sum(w.values())
            w = {k: v / z for k, v in w.items()}
        else:
            qf = float(q)
            w = {k: qf**k * v for k, v in self.weights.items()}
            z = sum(w.values())
            w = {k: v / z for k, v in w.items()}
        new_spec = None
        if self.spec is not None:
            new_spec = MeasureSpec(self.n, self.spec.q * q, self.spec.tau)
        return FixedPointPMF(self.n, w, self.mode, self.provenance, new_spec)

    def as_float(self) -> "FixedPointPMF":
        if self.mode == "float":
            return self
        return FixedPointPMF(self.n, {k: float(v) for k, v in self.weights.items()},
                             "float", self.provenance, self.spec)


def _pmf_from_weights(spec: MeasureSpec, raw: Mapping[int, Fraction], kind: str) -> FixedPointPMF:
    z = sum(raw.values())
    if z == 0:
        raise UnsupportedMeasureError(f"no permutations match {spec.describe()}")
    weights = {k: Fraction(v, 1) / z if not isinstance(v, Fraction) else v / z for k, v in raw.items()}
    return FixedPointPMF(spec.n, weights, "exact", Provenance(kind), spec)


def fp_pmf(spec: MeasureSpec, mode: str = "exact", rng=None, samples: int | None = None,
           k_max: int | None = None) -> FixedPointPMF:
    """
    The fixed-point law under the measure selected by `spec`.

    mode "exact": closed form (no pattern), series coefficients (132/321/213
    within the polynomial budget), or exhaustive enumeration (any pattern,
    n <= enumeration cap). mode "scaled-float": the positive column engine,
    any n within desk range. mode "monte-carlo": empirical law from the
    samplers (uniform for q = 1; for pattern 123 any q via exact
    reweighting over the finite support {0,1,2}); needs `rng` and `samples`.
    """
    caps = budgets()
    n, q, tau = spec.n, spec.q, spec.tau
    if mode == "exact":
        if tau is None:
            return _pmf_from_weights(spec, dict(enumerate(series.unrestricted_weights(q, n))), "closed-form")
        if tau in TAU_CLASS and n <= caps["poly"]:
            poly = series.avoider_polynomials(n)[n]
            raw = {k: poly.coefficient(k) * q**k for k in range(n + 1)}
            return _pmf_from_weights(spec, raw, "series")
        if n <= caps["enum"]:
            counts = fixed_point_counts(enumerate_avoiders(n, tau), n)
            raw = {k: counts[k] * q**k for k in range(n + 1)}
            return _pmf_from_weights(spec, raw, "enumeration")
        raise UnsupportedMeasureError(
            f"no exact route for {spec.describe()}: enumeration is capped at n={caps['enum']}"
            + (", use mode='scaled-float'" if tau in TAU_CLASS else
               " and this pattern has no series route (only 132/321/213 do)")
        )
    if mode == "scaled-float":
        qf = float(q)
        if tau is None:
            return fp_pmf(spec, mode="exact").as_float()
        if tau not in TAU_CLASS:
            if n <= caps["enum"]:
                return fp_pmf(spec, mode="exact").as_float()
            raise UnsupportedMeasureError(
                f"pattern {tau} has no large-n float route (only 132/321/213 do); "
                f"enumeration is capped at n={caps['enum']}"
            )
        km = n if k_max is None else min(k_max, n)
        rows = series.scaled_weight_rows(qf, n, k_max=km)
        w = rows[n]
        total = float(w.sum())
        weights = {k: float(v) / total for k, v in enumerate(w) if v > 0.0}
        return FixedPointPMF(n, weights, "float", Provenance("series"), spec)
    if mode == "monte-carlo":
        from . import sampling  # deferred: sampling builds on this module

        if rng is None or samples is None:
            raise ValueError("monte-carlo mode needs rng= and samples=")
        if tau == "123":
            base = sampling.monte_carlo_fp_pmf(n, tau, samples, rng)
            return base if q == 1 else base.reweighted(q)
        if tau in ("321", "132", "213", "123") and q == 1:
            return sampling.monte_carlo_fp_pmf(n, tau, samples, rng)
        raise UnsupportedMeasureError(
            f"monte-carlo fp law only for uniform avoiders (q=1, patterns 321/132/213/123) "
            f"or pattern 123 at any q (finite support {{0,1,2}} reweights exactly); "
            f"got {spec.describe()}"
        )
    raise ValueError(f"unknown mode {mode!r}")


# ---------------------------------------------------------------------------
# Reference laws
# ---------------------------------------------------------------------------


class Poisson:
    """Poisson(lam); pmf is float-valued (e^-lam is irrational)."""

    discrete = True

    def __init__(self, lam):
        self.lam = float(lam)
        if self.lam <= 0:
            raise ValueError("Poisson rate must be positive")

    def pmf(self, k: int) -> float:
        if k < 0:
            return 0.0
        return math.exp(-self.lam + k * math.log(self.lam) - math.lgamma(k + 1))

    def mean(self) -> float:
        return self.lam

    def __repr__(self):
        return f"Poisson({self.lam})"


class BernoulliSum:
    """Sum of two independent Bernoulli(p); exact pmf when p is rational."""

    discrete = True

    def __init__(self, p):
        self.p = as_rational(p) if not isinstance(p, float) else p
        if not 0 < self.p < 1:
            raise ValueError("Bernoulli parameter must lie in (0,1)")

    def pmf(self, k: int):
        p = self.p
        one = Fraction(1) if isinstance(p, Fraction) else 1.0
        if k == 0:
            return (one - p) ** 2
        if k == 1:
            return 2 * p * (one - p)
        if k == 2:
            return p * p
        return 0 * one

    def mean(self):
        return 2 * self.p

    def __repr__(self):
        return f"BernoulliSum({self.p})"


class NegativeBinomial:
    """
    NegativeBinomial(r, p): pmf(k) = binom(k+r-1, k) (1-p)^k p^r, k >= 0.

    Counts failures before the r-th success; exact pmf for rational p.
    """

    discrete = True

    def __init__(self, r: int, p):
        if not (isinstance(r, int) and r >= 1):
            raise ValueError("r must be a positive integer")
        self.r = r
        self.p = as_rational(p) if not isinstance(p, float) else p
        if not 0 < self.p <= 1:
            raise ValueError("p must lie in (0,1]")

    def pmf(self, k: int):
        if k < 0:
            return Fraction(0) if isinstance(self.p, Fraction) else 0.0
        return math.comb(k + self.r - 1, k) * (1 - self.p) ** k * self.p**self.r

    def mean(self):
        return self.r * (1 - self.p) / self.p

    def __repr__(self):
        return f"NegativeBinomial({self.r}, {self.p})"


class Rayleigh:
    """Rayleigh(sigma): density (x/sigma^2) exp(-x^2 / 2 sigma^2) on x >= 0."""

    discrete = False

    def __init__(self, sigma):
        self.sigma = float(sigma)
        if self.sigma <= 0:
            raise ValueError("Rayleigh scale must be positive")

    def cdf(self, x: float) -> float:
        if x <= 0:
            return 0.0
        return 1.0 - math.exp(-x * x / (2.0 * self.sigma**2))

    def mean(self) -> float:
        return self.sigma * math.sqrt(math.pi / 2.0)

    def __repr__(self):
        return f"Rayleigh({self.sigma})"


class Normal:
    """Normal(mu, var), cdf through the in-house erf (platform-stable)."""

    discrete = False

    def __init__(self, mu=0.0, var=1.0):
        self.mu = float(mu)
        self.var = float(var)
        if self.var <= 0:
            raise ValueError("variance must be positive")

    def cdf(self, x: float) -> float:
        return special.normal_cdf(x, self.mu, math.sqrt(self.var))

    def mean(self) -> float:
        return self.mu

    def __repr__(self):
        return f"Normal({self.mu}, {self.var})"


# ---------------------------------------------------------------------------
# Distances and moments
# ---------------------------------------------------------------------------


def tv_distance(pmf: FixedPointPMF, law) -> float:
    """
    Total variation distance between a fixed-point law and a discrete
    reference law: half the l1 difference over 0..n plus, in full, the
    reference law's tail mass beyond n (so truncation can only increase
    the reported distance, never hide error).
    """
    if not getattr(law, "discrete", False):
        raise ValueError(f"{law!r} is continuous; use kolmogorov_distance with a scaling")
    acc = 0.0
    law_mass = 0.0
    for k in range(pmf.n + 1):
        lk = float(law.pmf(k))
        acc += abs(float(pmf.pmf(k)) - lk)
        law_mass += lk
    acc += max(1.0 - law_mass, 0.0)
    return acc / 2.0


def kolmogorov_distance(pmf: FixedPointPMF, law, center=0.0, scale=1.0) -> float:
    """
    sup_x |F_pmf(x) - F_law((x - center)/scale)| against a continuous law.

    The sup over all reals is attained at the jump points of the discrete
    cdf, approaching from either side, so both F(k) and F(k-1) are compared
    with the law's cdf at k (no continuity correction, by design).
    """
    scale = float(scale)
    if scale <= 0:
        raise ValueError("scale must be positive")
    if getattr(law, "discrete", True):
        raise ValueError(f"{law!r} is discrete; use tv_distance")
    sup = 0.0
    running = 0.0
    for k, v in pmf.weights.items():
        x = (k - float(center)) / scale
        lc = law.cdf(x)
        sup = max(sup, abs(running - lc))  # left limit at the jump
        running += float(v)
        sup = max(sup, abs(running - lc))
    return sup


def pmf_moment(pmf: FixedPointPMF, m: int, kind: str = "raw"):
    """m-th raw moment sum k^m p_k, or falling-factorial moment sum (k)_m p_k."""
    if m < 1:
        raise ValueError("moment order must be >= 1")
    if kind not in ("raw", "factorial"):
        raise ValueError("kind must be 'raw' or 'factorial'")
    zero = Fraction(0) if pmf.mode == "exact" else 0.0
    total = zero
    for k, v in pmf.weights.items():
        if kind == "raw":
            term = k**m
        else:
            term = 1
            for i in range(m):
                term *= k - i
        total += term * v
    return total


# ---------------------------------------------------------------------------
# Serialization (schema frozen; JSON round-trips byte-identically)
# ---------------------------------------------------------------------------


def _rat_text(v) -> str:
    if isinstance(v, Fraction):
        return str(v.numerator) if v.denominator == 1 else f"{v.numerator}/{v.denominator}"
    return repr(float(v))


def pmf_to_json(pmf: FixedPointPMF) -> str:
    spec = pmf.spec
    payload = {
        "n": pmf.n,
        "q": _rat_text(spec.q) if spec is not None else None,
        "tau": spec.tau if spec is not None else None,
        "mode": pmf.mode,
        "weights": [[str(k), _rat_text(v)] for k, v in pmf.weights.items()],
        "seed": pmf.provenance.seed,
        "stream_id": pmf.provenance.stream_id,
        "samples": pmf.provenance.samples,
        "provenance": pmf.provenance.kind,
    }
    return json.dumps(payload, sort_keys=True, separators=(",", ":")) + "\n"


def _parse_value(text: str):
    if "/" in text:
        return Fraction(text)
    if "." in text or "e" in text or "inf" in text:
        return float(text)
    return Fraction(int(text))


def pmf_from_json(text: str) -> FixedPointPMF:
    data = json.loads(text)
    spec = None
    if data.get("q") is not None:
        spec = MeasureSpec(data["n"], Fraction(data["q"]), data.get("tau"))
    prov = Provenance(data.get("provenance", "series"), data.get("samples"),
                      data.get("seed"), data.get("stream_id"))
    weights = {int(k): _parse_value(v) for k, v in data["weights"]}
    return FixedPointPMF(data["n"], weights, data["mode"], prov, spec)
