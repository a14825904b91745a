"""Coefficients of the weighted integral estimates for the Lane-Emden system.

Exponents (p, q) are parameterized as p = (n+2*d1)/(n-2*d1),
q = (n+2*d2)/(n-2*d2), which turns the usual subcriticality conditions into
linear constraints on (d1, d2).  Two coefficient choices are supported:

* scheme I  -- fully rational formulas built around the quadratic weight
  mu(x) = ((n+2)n + (n^2-3n-1)x - n(n+2)x^2/4) / (n-1)^2;
* scheme II -- a square-root choice that zeroes the two quartic-gradient
  coefficients exactly at eps0 = 0 and perturbs them positive for small
  eps0 > 0.  Scheme II values are sound rational intervals (the surd is the
  only irrational quantity in the whole construction).

Everything exists twice: symbolically, as rational functions in (n, d1, d2)
used by the certification and expansion pipelines, and pointwise, as exact
fractions / intervals for inspection.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Mapping, Optional, Union

from .exactnum import DEFAULT_SQRT_WIDTH, DomainError, Interval, iv_sqrt, rat_to_text
from .sympoly import PolyExpr, RatFunc

Value = Union[Fraction, Interval]


class DegeneratePointError(DomainError):
    """A coefficient choice degenerates at the requested point."""

    def __init__(self, quantity: str, detail: str = ""):
        self.quantity = quantity
        super().__init__(f"degenerate point: {quantity}" + (f" ({detail})" if detail else ""))


# --- exponent data -----------------------------------------------------------


@dataclass(frozen=True)
class ExponentData:
    n: int
    d1: Fraction
    d2: Fraction
    p: Fraction
    q: Fraction
    alpha: Optional[Fraction]
    beta: Optional[Fraction]
    sobolev_gap: Fraction

    def to_json_dict(self) -> dict:
        return {
            "n": self.n,
            "d1": rat_to_text(self.d1),
            "d2": rat_to_text(self.d2),
            "p": rat_to_text(self.p),
            "q": rat_to_text(self.q),
            "alpha": None if self.alpha is None else rat_to_text(self.alpha),
            "beta": None if self.beta is None else rat_to_text(self.beta),
            "sobolev_gap": rat_to_text(self.sobolev_gap),
        }


def exponents_from_d(n: int, d1, d2) -> ExponentData:
    d1, d2 = Fraction(d1), Fraction(d2)
    if n < 3:
        raise DomainError(f"need n >= 3, got {n}")
    if d1 < 0 or d2 < 0:
        raise DomainError("need d1 >= 0 and d2 >= 0")
    if 2 * d1 >= n or 2 * d2 >= n:
        raise DomainError("need d1 < n/2 and d2 < n/2")
    p = Fraction(n + 2 * d1, n - 2 * d1)
    q = Fraction(n + 2 * d2, n - 2 * d2)
    gap = 1 / (p + 1) + 1 / (q + 1) - (1 - Fraction(2, n))
    if p * q != 1:
        alpha = 2 * (p + 1) / (p * q - 1)
        beta = 2 * (q + 1) / (p * q - 1)
    else:
        alpha = beta = None
    return ExponentData(n=n, d1=d1, d2=d2, p=p, q=q, alpha=alpha, beta=beta, sobolev_gap=gap)


def d_from_p(n: int, p: Fraction) -> Fraction:
    """Inverse parametrization: d1 = n(p-1)/(2(p+1))."""
    return Fraction(n) * (p - 1) / (2 * (p + 1))


# --- mu / xi ------------------------------------------------------------------


def mu(n, x):
    """Quadratic weight mu(x); accepts exact rationals or RatFunc arguments."""
    if isinstance(x, (RatFunc, PolyExpr)):
        nn = RatFunc.of(PolyExpr.var("n")) if not isinstance(n, (int, Fraction)) or n is None else RatFunc.of(Fraction(n))
        x = RatFunc.of(x)
        return (nn * (nn + 2) + (nn * nn - 3 * nn - 1) * x - nn * (nn + 2) * x * x * Fraction(1, 4)) / ((nn - 1) ** 2)
    n, x = Fraction(n), Fraction(x)
    if n == 1:
        raise DomainError("mu undefined at n = 1")
    return (n * (n + 2) + (n * n - 3 * n - 1) * x - n * (n + 2) * x * x / 4) / (n - 1) ** 2


def xi(n, x):
    """xi(x) = mu(x) - x."""
    if isinstance(x, (RatFunc, PolyExpr)):
        return mu(n, x) - RatFunc.of(x)
    return mu(n, x) - Fraction(x)


def obata_margin(n, x) -> Fraction:
    """x^2 (8n - 4 - 4nx - n^2 x^2) / (4 n^2): positive iff the quadratic-in-k
    coefficient alpha admits the scheme-I k-choice strictly inside its root
    interval (for x != 0)."""
    n, x = Fraction(n), Fraction(x)
    return x * x * (8 * n - 4 - 4 * n * x - n * n * x * x) / (4 * n * n)


def scaling_exponent(n, d1, d2) -> Fraction:
    """Exponent of the ball-growth estimate: (-(d1+3d2) - (2-d1-d2)n)/(d1+d2)."""
    n, d1, d2 = Fraction(n), Fraction(d1), Fraction(d2)
    if d1 + d2 == 0:
        raise DomainError("scaling exponent needs d1 + d2 > 0")
    return (-(d1 + 3 * d2) - (2 - d1 - d2) * n) / (d1 + d2)


# --- symbolic scheme I bundle ---------------------------------------------------


@lru_cache(maxsize=1)
def scheme1_symbolic() -> Mapping[str, RatFunc]:
    """All scheme-I quantities as rational functions in (n, d1, d2).

    The defining forms are built literally (delta via its quadratic
    expression, A via p*beta/gamma); the simplified/factored forms are built
    separately so that their equality is a real consistency check, exercised
    by the identity test suite.
    """
    n = RatFunc.of(PolyExpr.var("n"))
    d1 = RatFunc.of(PolyExpr.var("d1"))
    d2 = RatFunc.of(PolyExpr.var("d2"))
    one = RatFunc.of(1)

    p = (n + 2 * d1) / (n - 2 * d1)
    q = (n + 2 * d2) / (n - 2 * d2)
    r = (-3) * (d1 - d2) / (n - 2 * d2)
    s = (d1 - d2) / (n - 2 * d1)

    def mu_of(x: RatFunc) -> RatFunc:
        return (n * (n + 2) + (n * n - 3 * n - 1) * x - n * (n + 2) * x * x * Fraction(1, 4)) / ((n - 1) ** 2)

    mu_r, mu_s = mu_of(r), mu_of(s)
    k1 = n / (2 * (n - 1)) * (r - 2 + r / n + r * r * Fraction(1, 2))
    k2 = n / (2 * (n - 1)) * (s - 2 + s / n + s * s * Fraction(1, 2))
    theta1 = (mu_r - r) / p
    theta2 = (mu_s - s) / q

    def delta_def(x, th, e):
        return (x + th * e) * (x + th * (e - 2) + 1) + th * (th - 1) * e

    delta1 = delta_def(r, theta1, p)
    delta2 = delta_def(s, theta2, q)
    delta1_simple = r * r / p + r + (p - 1) / p * mu_r * mu_r
    delta2_simple = s * s / q + s + (q - 1) / q * mu_s * mu_s

    w1 = Fraction(3, 2) * r - (n + 2) / n * k1
    w2 = Fraction(3, 2) * s - (n + 2) / n * k2
    alpha1 = -(n - 1) / n * k1 * k1 + k1 * (r - 1) - Fraction(1, 2) * r * (r - 1)
    alpha2 = -(n - 1) / n * k2 * k2 + k2 * (s - 1) - Fraction(1, 2) * s * (s - 1)
    gamma1 = w1 * p / delta1
    gamma2 = w2 * q / delta2
    beta1 = w1 * (2 * theta1 * (p - 1) + r + 1) / delta1 - (n - 1) / n
    beta2 = w2 * (2 * theta2 * (q - 1) + s + 1) / delta2 - (n - 1) / n
    A1 = p * beta1 / gamma1
    A2 = q * beta2 / gamma2
    A1_fac = (one - r / mu_r) * ((p - 1) / p * mu_r + r / p + one)
    A2_fac = (one - s / mu_s) * ((q - 1) / q * mu_s + s / q + one)
    A1_minus_p_fac = (mu_r - p - r) * ((p - 1) * mu_r + r) / (mu_r * p)
    A2_minus_q_fac = (mu_s - q - s) * ((q - 1) * mu_s + s) / (mu_s * q)

    margin1_core = 8 * n - 4 - 4 * n * r - n * n * r * r
    margin2_core = 8 * n - 4 - 4 * n * s - n * n * s * s
    margin1 = r * r * margin1_core / (4 * n * n)
    margin2 = s * s * margin2_core / (4 * n * n)

    xi_r = mu_r - r
    xi_s = mu_s - s

    return {
        "p": p, "q": q, "r": r, "s": s, "k1": k1, "k2": k2,
        "mu_r": mu_r, "mu_s": mu_s, "xi_r": xi_r, "xi_s": xi_s,
        "theta1": theta1, "theta2": theta2,
        "delta1": delta1, "delta2": delta2,
        "delta1_simple": delta1_simple, "delta2_simple": delta2_simple,
        "w1": w1, "w2": w2,
        "alpha1": alpha1, "alpha2": alpha2,
        "beta1": beta1, "beta2": beta2,
        "gamma1": gamma1, "gamma2": gamma2,
        "A1": A1, "A2": A2, "A1_fac": A1_fac, "A2_fac": A2_fac,
        "A1_minus_p_fac": A1_minus_p_fac, "A2_minus_q_fac": A2_minus_q_fac,
        "FF": A1 * A2 - p * q,
        "FF_fac": A1_fac * A2_fac - p * q,
        "margin1": margin1, "margin2": margin2,
        "margin1_core": margin1_core, "margin2_core": margin2_core,
    }


@lru_cache(maxsize=1)
def scheme2_rational_symbolic() -> Mapping[str, RatFunc]:
    """The rational (surd-free) ingredients of scheme II in (n, d1, d2)."""
    n = RatFunc.of(PolyExpr.var("n"))
    d1 = RatFunc.of(PolyExpr.var("d1"))
    d2 = RatFunc.of(PolyExpr.var("d2"))
    p = (n + 2 * d1) / (n - 2 * d1)
    q = (n + 2 * d2) / (n - 2 * d2)
    r = (-3) * (d1 - d2) / (n - 2 * d2)
    s = (d1 - d2) / (n - 2 * d1)
    arg1 = (1 - r) * ((n - 2) * r + n) / n
    arg2 = (1 - s) * ((n - 2) * s + n) / n
    return {
        "p": p, "q": q, "r": r, "s": s, "arg1": arg1, "arg2": arg2,
        # range-claim quantities, all required positive on the working region
        "neg_r": -r,
        "r_above_lower": (n - 2) * r + n,   # r > -n/(n-2)
        "s_pos": s,
        "s_below_one": 1 - s,
    }


# --- coefficient sets ------------------------------------------------------------


@dataclass(frozen=True)
class CoefficientSet:
    scheme: str
    n: int
    d1: Fraction
    d2: Fraction
    c0: Optional[Fraction] = None
    eps0: Optional[Fraction] = None
    values: dict = field(default_factory=dict)

    def __getitem__(self, key: str) -> Value:
        return self.values[key]

    def to_json_dict(self) -> dict:
        def enc(v):
            if isinstance(v, Interval):
                return {"lo": rat_to_text(v.lo), "hi": rat_to_text(v.hi)}
            return rat_to_text(v)

        out = {
            "scheme": self.scheme,
            "n": self.n,
            "d1": rat_to_text(self.d1),
            "d2": rat_to_text(self.d2),
        }
        if self.c0 is not None:
            out["c0"] = rat_to_text(self.c0)
        if self.eps0 is not None:
            out["eps0"] = rat_to_text(self.eps0)
        out["values"] = {k: enc(v) for k, v in sorted(self.values.items())}
        return out


def _check_point(n: int, d1: Fraction, d2: Fraction) -> None:
    if n < 3:
        raise DomainError(f"need n >= 3, got {n}")
    if not (0 <= d2 < d1):
        raise DegeneratePointError("d1 - d2", "coefficient choices need 0 <= d2 < d1")
    if 2 * d1 >= n:
        raise DomainError("need d1 < n/2")


def scheme1(n: int, d1, d2) -> CoefficientSet:
    """Exact scheme-I coefficients at a point (all values rational)."""
    d1, d2 = Fraction(d1), Fraction(d2)
    _check_point(n, d1, d2)
    nf = Fraction(n)
    p = (nf + 2 * d1) / (nf - 2 * d1)
    q = (nf + 2 * d2) / (nf - 2 * d2)
    r = -3 * (d1 - d2) / (nf - 2 * d2)
    s = (d1 - d2) / (nf - 2 * d1)
    mu_r, mu_s = mu(n, r), mu(n, s)
    if mu_r == 0:
        raise DegeneratePointError("mu(r)")
    if mu_s == 0:
        raise DegeneratePointError("mu(s)")
    k1 = nf / (2 * (nf - 1)) * (r - 2 + r / nf + r * r / 2)
    k2 = nf / (2 * (nf - 1)) * (s - 2 + s / nf + s * s / 2)
    theta1 = (mu_r - r) / p
    theta2 = (mu_s - s) / q
    delta1 = (r + theta1 * p) * (r + theta1 * (p - 2) + 1) + theta1 * (theta1 - 1) * p
    delta2 = (s + theta2 * q) * (s + theta2 * (q - 2) + 1) + theta2 * (theta2 - 1) * q
    if delta1 == 0:
        raise DegeneratePointError("delta1")
    if delta2 == 0:
        raise DegeneratePointError("delta2")
    w1 = Fraction(3, 2) * r - (nf + 2) / nf * k1
    w2 = Fraction(3, 2) * s - (nf + 2) / nf * k2
    # validity side conditions of the underlying estimate
    if q == 1:
        if s in (0, -1):
            raise DegeneratePointError("s", "s must avoid {0, -1} when q = 1")
    elif (q - 1) * w2 * delta2 <= 0:
        raise DegeneratePointError("(q-1)*w2*delta2", "side condition violated")
    if p == 1:
        if r in (0, -1):
            raise DegeneratePointError("r", "r must avoid {0, -1} when p = 1")
    elif (p - 1) * w1 * delta1 <= 0:
        raise DegeneratePointError("(p-1)*w1*delta1", "side condition violated")
    alpha1 = -(nf - 1) / nf * k1 * k1 + k1 * (r - 1) - r * (r - 1) / 2
    alpha2 = -(nf - 1) / nf * k2 * k2 + k2 * (s - 1) - s * (s - 1) / 2
    gamma1 = w1 * p / delta1
    gamma2 = w2 * q / delta2
    beta1 = w1 * (2 * theta1 * (p - 1) + r + 1) / delta1 - (nf - 1) / nf
    beta2 = w2 * (2 * theta2 * (q - 1) + s + 1) / delta2 - (nf - 1) / nf
    A1 = p * beta1 / gamma1
    A2 = q * beta2 / gamma2
    values = {
        "p": p, "q": q, "r": r, "s": s, "k1": k1, "k2": k2,
        "theta1": theta1, "theta2": theta2,
        "mu_r": mu_r, "mu_s": mu_s, "xi_r": mu_r - r, "xi_s": mu_s - s,
        "delta1": delta1, "delta2": delta2,
        "alpha1": alpha1, "alpha2": alpha2,
        "beta1": beta1, "beta2": beta2,
        "gamma1": gamma1, "gamma2": gamma2,
        "A1": A1, "A2": A2,
        "A1A2_minus_pq": A1 * A2 - p * q,
        "beta_product_margin": beta1 * beta2 - gamma1 * gamma2,
    }
    return CoefficientSet(scheme="I", n=n, d1=d1, d2=d2, values=values)


def scheme2(n: int, d1, d2, eps0=Fraction(0), width=DEFAULT_SQRT_WIDTH) -> CoefficientSet:
    """Scheme-II coefficients at a point, as sound intervals.

    At eps0 = 0 the quartic-gradient coefficients alpha1/alpha2 are exactly
    zero; their returned enclosures always contain 0 and have width bounded
    by a small multiple of ``width``.
    """
    d1, d2 = Fraction(d1), Fraction(d2)
    eps0, width = Fraction(eps0), Fraction(width)
    _check_point(n, d1, d2)
    if eps0 < 0:
        raise DomainError("eps0 must be >= 0")
    if width <= 0:
        raise DomainError("width must be positive")
    box = {"d1": Interval.point(d1), "d2": Interval.point(d2)}
    prog = SchemeIIProgram(n)
    vals = prog.evaluate(box, eps0=eps0, width=width)
    return CoefficientSet(scheme="II", n=n, d1=d1, d2=d2, eps0=eps0, values=vals)


class SchemeIIProgram:
    """Interval evaluation of the scheme-II quantities at fixed integer n.

    The construction is a straight-line program over rational intervals with
    exactly two square roots; every downstream quantity is affine or rational
    in those roots, so enclosures stay tight.
    """

    def __init__(self, n: int):
        if n < 3:
            raise DomainError("need n >= 3")
        self.n = n
        sym = scheme2_rational_symbolic()
        self.rational = {k: v.eval_partial_n(n) for k, v in sym.items()}

    def evaluate(self, box: Mapping[str, Interval], eps0: Fraction, width: Fraction) -> dict:
        n = Fraction(self.n)
        rat = {k: v.eval_interval(box) for k, v in self.rational.items()}
        r, s, p, q = rat["r"], rat["s"], rat["p"], rat["q"]
        arg1, arg2 = rat["arg1"], rat["arg2"]
        if arg1.lo < 0 or arg2.lo < 0:
            raise DomainError("negative surd argument; point/box outside the valid range")
        sig1 = iv_sqrt(arg1, width)
        sig2 = iv_sqrt(arg2, width)
        c_eps = 2 * (n - 1) / n * eps0
        k1 = n / (2 * (n - 1)) * (r - 1 - sig1) + eps0
        k2 = n / (2 * (n - 1)) * (s - 1 - sig2) + eps0
        rho1 = n / (n - 1) * (Fraction(3, 2) * r - (n + 2) / n * k1)
        rho2 = n / (n - 1) * (Fraction(3, 2) * s - (n + 2) / n * k2)
        theta1 = (rho1 - r) / p
        theta2 = (rho2 - s) / q
        delta1 = r**2 / p + r + (p - 1) / p * rho1**2
        delta2 = s**2 / q + s + (q - 1) / q * rho2**2
        # defining quadratic for alpha, intersected with the exact product form
        # alpha = n/(4(n-1)) * c * (2*sqrt(arg) - c), c = 2(n-1)eps0/n
        alpha1_def = -(n - 1) / n * k1**2 + k1 * (r - 1) - r * (r - 1) * Fraction(1, 2)
        alpha2_def = -(n - 1) / n * k2**2 + k2 * (s - 1) - s * (s - 1) * Fraction(1, 2)
        alpha1_prod = n / (4 * (n - 1)) * c_eps * (2 * sig1 - c_eps)
        alpha2_prod = n / (4 * (n - 1)) * c_eps * (2 * sig2 - c_eps)
        alpha1 = _intersect(alpha1_def, alpha1_prod)
        alpha2 = _intersect(alpha2_def, alpha2_prod)
        out = {
            "p": p, "q": q, "r": r, "s": s, "k1": k1, "k2": k2,
            "rho1": rho1, "rho2": rho2, "theta1": theta1, "theta2": theta2,
            "delta1": delta1, "delta2": delta2,
            "alpha1": alpha1, "alpha2": alpha2,
            "arg1": arg1, "arg2": arg2,
            "neg_r": rat["neg_r"], "r_above_lower": rat["r_above_lower"],
            "s_pos": rat["s_pos"], "s_below_one": rat["s_below_one"],
        }
        # gamma/beta/A need division by delta and rho; only well defined when
        # the enclosures exclude zero -- callers subdivide otherwise.
        try:
            w1 = (n - 1) / n * rho1
            w2 = (n - 1) / n * rho2
            gamma1 = w1 * p / delta1
            gamma2 = w2 * q / delta2
            beta1 = w1 * (2 * theta1 * (p - 1) + r + 1) / delta1 - (n - 1) / n
            beta2 = w2 * (2 * theta2 * (q - 1) + s + 1) / delta2 - (n - 1) / n
            A1 = 2 * theta1 * (p - 1) + r + 1 - delta1 / rho1
            A2 = 2 * theta2 * (q - 1) + s + 1 - delta2 / rho2
            out.update({
                "gamma1": gamma1, "gamma2": gamma2, "beta1": beta1, "beta2": beta2,
                "A1": A1, "A2": A2,
                "A1A2_minus_pq": A1 * A2 - p * q,
                "beta_product_margin": beta1 * beta2 - gamma1 * gamma2,
            })
        except DomainError:
            pass
        return out


def _intersect(a: Interval, b: Interval) -> Interval:
    lo, hi = max(a.lo, b.lo), min(a.hi, b.hi)
    if lo > hi:
        raise DomainError("empty intersection of two enclosures of one value")
    return Interval(lo, hi)


class SurdExpr:
    """Element of the ring Q(n, d1, d2)[sigma1, sigma2] / (sigma_k^2 - arg_k).

    Coefficients are rational functions; exponents stay in {0, 1} because
    squares reduce exactly through the known radicands.  This keeps every
    scheme-II quantity in a four-term bilinear normal form whose coefficient
    polynomials can be range-bounded tightly.
    """

    __slots__ = ("coeffs", "arg1", "arg2")

    def __init__(self, coeffs: Mapping[tuple[int, int], RatFunc], arg1: RatFunc, arg2: RatFunc):
        self.coeffs = {k: v for k, v in coeffs.items() if not RatFunc.of(v).is_zero()}
        self.arg1 = arg1
        self.arg2 = arg2

    @staticmethod
    def rational(v, arg1, arg2) -> "SurdExpr":
        return SurdExpr({(0, 0): RatFunc.of(v)}, arg1, arg2)

    def __add__(self, other) -> "SurdExpr":
        o = other if isinstance(other, SurdExpr) else SurdExpr.rational(other, self.arg1, self.arg2)
        out = dict(self.coeffs)
        for k, v in o.coeffs.items():
            out[k] = out.get(k, RatFunc.zero()) + v
        return SurdExpr(out, self.arg1, self.arg2)

    __radd__ = __add__

    def __neg__(self) -> "SurdExpr":
        return SurdExpr({k: -v for k, v in self.coeffs.items()}, self.arg1, self.arg2)

    def __sub__(self, other) -> "SurdExpr":
        o = other if isinstance(other, SurdExpr) else SurdExpr.rational(other, self.arg1, self.arg2)
        return self + (-o)

    def __mul__(self, other) -> "SurdExpr":
        if not isinstance(other, SurdExpr):
            other = SurdExpr.rational(other, self.arg1, self.arg2)
        out: dict[tuple[int, int], RatFunc] = {}
        for (i1, j1), c1 in self.coeffs.items():
            for (i2, j2), c2 in other.coeffs.items():
                c = c1 * c2
                i, j = i1 + i2, j1 + j2
                if i == 2:
                    c = c * self.arg1
                    i = 0
                if j == 2:
                    c = c * self.arg2
                    j = 0
                key = (i, j)
                out[key] = out.get(key, RatFunc.zero()) + c
        return SurdExpr(out, self.arg1, self.arg2)

    __rmul__ = __mul__

    def coefficient(self, key: tuple[int, int]) -> RatFunc:
        return self.coeffs.get(key, RatFunc.zero())


@lru_cache(maxsize=32)
def scheme2_sigma_quantities(n: int, eps0: Fraction) -> dict:
    """Scheme-II quantities at fixed n in bilinear sigma normal form.

    Returns {"quantities": {name: (SurdExpr numerator, divisor chain)},
    "arg1": RatFunc, "arg2": RatFunc}.  Each quantity Q satisfies
    Q = numerator / prod(divisors), with every divisor a previously listed
    quantity, so Q > 0 follows from numerator > 0 once the divisors are
    certified positive.
    """
    eps0 = Fraction(eps0)
    nf = Fraction(n)
    sym = scheme2_rational_symbolic()
    rat = {k: v.eval_partial_n(n) for k, v in sym.items()}
    r, s, p, q = rat["r"], rat["s"], rat["p"], rat["q"]
    arg1, arg2 = rat["arg1"], rat["arg2"]

    def lift(v) -> SurdExpr:
        return SurdExpr.rational(v, arg1, arg2)

    sig1 = SurdExpr({(1, 0): RatFunc.of(1)}, arg1, arg2)
    sig2 = SurdExpr({(0, 1): RatFunc.of(1)}, arg1, arg2)
    k1 = lift(nf / (2 * (nf - 1))) * (lift(r - 1) - sig1) + lift(eps0)
    k2 = lift(nf / (2 * (nf - 1))) * (lift(s - 1) - sig2) + lift(eps0)
    rho1 = lift(nf / (nf - 1)) * (lift(r) * Fraction(3, 2) - lift((nf + 2) / nf) * k1)
    rho2 = lift(nf / (nf - 1)) * (lift(s) * Fraction(3, 2) - lift((nf + 2) / nf) * k2)
    # delta * p = r^2 + r p + (p-1) rho^2 clears the 1/p without division
    delta1_num = lift(r * r + r * p) + lift((p - 1)) * rho1 * rho1
    delta2_num = lift(s * s + s * q) + lift((q - 1)) * rho2 * rho2
    # A = G / rho with G = (2 (rho - r)(p-1)/p + r + 1) rho - delta;
    # multiply through by p: G*p = (2 (rho - r)(p-1) + (r+1) p) rho - delta*p
    G1 = (lift(2 * (p - 1)) * (rho1 - lift(r)) + lift((r + 1) * p)) * rho1 - delta1_num
    G2 = (lift(2 * (q - 1)) * (rho2 - lift(s)) + lift((s + 1) * q)) * rho2 - delta2_num
    # FF * (rho1 rho2 p q) = G1 G2 - (pq)^2 rho1 rho2
    H = G1 * G2 - lift(p * q * p * q) * rho1 * rho2
    c_eps = 2 * (nf - 1) / nf * eps0
    alpha1_core = sig1 * 2 - lift(c_eps)   # alpha1 = n c/(4(n-1)) * (2 sigma1 - c)
    alpha2_core = sig2 * 2 - lift(c_eps)
    # each entry: quantity = numerator / prod(divisors); divisors "p"/"q" are
    # trivially positive on the region, "rho1"/"rho2" are certified first
    quantities = {
        "rho1": (rho1, ()),
        "rho2": (rho2, ()),
        "delta1": (delta1_num, ("p",)),
        "delta2": (delta2_num, ("q",)),
        "A1": (G1, ("rho1", "p")),
        "A2": (G2, ("rho2", "q")),
        "A1A2_minus_pq": (H, ("rho1", "rho2", "p", "q")),
        "alpha1": (alpha1_core, ()),
        "alpha2": (alpha2_core, ()),
        "neg_r": (lift(-r), ()),
        "r_above_lower": (lift((nf - 2) * r + nf), ()),
        "s_pos": (lift(s), ()),
        "s_below_one": (lift(1 - s), ()),
    }
    return {"quantities": quantities, "arg1": arg1, "arg2": arg2, "p": rat["p"], "q": rat["q"]}


def pick_eps0(n: int, certify, start=Fraction(1, 2**10), floor=Fraction(1, 2**40)) -> Fraction:
    """Deterministic eps0 selection: try start, halve on failure down to floor.

    ``certify`` is a callable eps0 -> bool.  Returns the first eps0 that
    certifies; raises if the floor is reached without success.
    """
    eps0 = Fraction(start)
    while eps0 >= floor:
        if certify(eps0):
            return eps0
        eps0 = eps0 / 2
    raise DomainError(f"no eps0 >= {floor} certified the positivity conditions for n={n}")
