"""Exact multivariate polynomial and rational-function algebra over Q.

Polynomials live in Q[n, d1, d2] as sparse exponent->coefficient maps with a
graded lexicographic term order (n > d1 > d2).  Rational functions keep their
denominator as a *factored* list, which makes the sign bookkeeping explicit
when inequalities get their denominators cleared, and lets common factors
cancel cheaply by exact division instead of a full multivariate gcd.

The interval evaluator collects the polynomial by powers of n and runs Horner
in n with naive monomial enclosures in (d1, d2); a Bernstein-form range
bounder for pure (d1, d2) polynomials is provided separately for the
certification engine, where tight bounds matter.
"""

from __future__ import annotations

import json
import math
import re
from fractions import Fraction
from functools import reduce
from typing import Iterable, Mapping, Optional, Sequence, Union

from .exactnum import DomainError, Interval, IntervalLike, rat_from_text, rat_to_text

VARS = ("n", "d1", "d2")
Key = tuple[int, int, int]

_ZERO = Fraction(0)


class PoleError(ZeroDivisionError):
    """Evaluation hit a zero (or possibly-zero) denominator."""


class ParseError(ValueError):
    """Malformed polynomial text."""


def _grlex_key(e: Key) -> tuple:
    return (sum(e), e)


class PolyExpr:
    """Immutable sparse polynomial in Q[n, d1, d2]."""

    __slots__ = ("terms", "_hash")

    def __init__(self, terms: Mapping[Key, Fraction] | None = None):
        clean: dict[Key, Fraction] = {}
        if terms:
            for e, c in terms.items():
                c = Fraction(c)
                if c != 0:
                    clean[(int(e[0]), int(e[1]), int(e[2]))] = c
        object.__setattr__(self, "terms", clean)
        object.__setattr__(self, "_hash", None)

    def __setattr__(self, *a):  # pragma: no cover - immutability guard
        raise AttributeError("PolyExpr is immutable")

    # --- constructors ---------------------------------------------------
    @staticmethod
    def const(c) -> "PolyExpr":
        return PolyExpr({(0, 0, 0): Fraction(c)})

    @staticmethod
    def var(name: str) -> "PolyExpr":
        i = VARS.index(name)
        e = [0, 0, 0]
        e[i] = 1
        return PolyExpr({tuple(e): Fraction(1)})

    # --- basic queries ---------------------------------------------------
    def is_zero(self) -> bool:
        return not self.terms

    def is_constant(self) -> bool:
        return not self.terms or self.terms.keys() == {(0, 0, 0)}

    def constant_value(self) -> Fraction:
        if not self.is_constant():
            raise ValueError("not a constant polynomial")
        return self.terms.get((0, 0, 0), _ZERO)

    def degree(self, var: Optional[str] = None) -> int:
        if not self.terms:
            return -1
        if var is None:
            return max(sum(e) for e in self.terms)
        i = VARS.index(var)
        return max(e[i] for e in self.terms)

    def sorted_terms(self) -> list[tuple[Key, Fraction]]:
        return sorted(self.terms.items(), key=lambda kv: _grlex_key(kv[0]), reverse=True)

    def leading_term(self) -> tuple[Key, Fraction]:
        if not self.terms:
            raise ValueError("zero polynomial has no leading term")
        e = max(self.terms, key=_grlex_key)
        return e, self.terms[e]

    def content(self) -> Fraction:
        """Positive rational c with self/c integer-primitive, sign of lead kept out."""
        if not self.terms:
            return Fraction(1)
        num_gcd = reduce(math.gcd, (abs(c.numerator) for c in self.terms.values()))
        den_lcm = reduce(math.lcm, (c.denominator for c in self.terms.values()))
        return Fraction(num_gcd, den_lcm)

    def primitive(self) -> tuple["PolyExpr", Fraction]:
        """(primitive part with positive leading coefficient, scale) with
        self = scale * primitive."""
        if not self.terms:
            return self, Fraction(1)
        c = self.content()
        if self.leading_term()[1] < 0:
            c = -c
        return self * (1 / c), c

    # --- ring operations --------------------------------------------------
    def __add__(self, other) -> "PolyExpr":
        other = _as_poly(other)
        out = dict(self.terms)
        for e, c in other.terms.items():
            v = out.get(e, _ZERO) + c
            if v:
                out[e] = v
            else:
                out.pop(e, None)
        return PolyExpr(out)

    __radd__ = __add__

    def __neg__(self) -> "PolyExpr":
        return PolyExpr({e: -c for e, c in self.terms.items()})

    def __sub__(self, other) -> "PolyExpr":
        return self + (-_as_poly(other))

    def __rsub__(self, other) -> "PolyExpr":
        return _as_poly(other) - self

    def __mul__(self, other) -> "PolyExpr":
        if isinstance(other, (int, Fraction)):
            c = Fraction(other)
            if c == 0:
                return PolyExpr()
            return PolyExpr({e: v * c for e, v in self.terms.items()})
        other = _as_poly(other)
        if len(self.terms) < len(other.terms):
            a, b = self.terms, other.terms
        else:
            a, b = other.terms, self.terms
        out: dict[Key, Fraction] = {}
        for e1, c1 in a.items():
            for e2, c2 in b.items():
                e = (e1[0] + e2[0], e1[1] + e2[1], e1[2] + e2[2])
                v = out.get(e, _ZERO) + c1 * c2
                if v:
                    out[e] = v
                else:
                    out.pop(e, None)
        return PolyExpr(out)

    __rmul__ = __mul__

    def __pow__(self, k: int) -> "PolyExpr":
        if k < 0:
            raise ValueError("negative power of a polynomial; use RatFunc")
        result = PolyExpr.const(1)
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base if k > 1 else base
            k >>= 1
        return result

    def __eq__(self, other) -> bool:
        if isinstance(other, (int, Fraction)):
            other = PolyExpr.const(other)
        if not isinstance(other, PolyExpr):
            return NotImplemented
        return self.terms == other.terms

    def __hash__(self) -> int:
        h = self._hash
        if h is None:
            h = hash(tuple(sorted(self.terms.items(), key=lambda kv: kv[0])))
            object.__setattr__(self, "_hash", h)
        return h

    # --- division ---------------------------------------------------------
    def divide_exact(self, divisor: "PolyExpr") -> Optional["PolyExpr"]:
        """Quotient self/divisor if divisor divides exactly, else None."""
        if divisor.is_zero():
            raise ZeroDivisionError("division by zero polynomial")
        if self.is_zero():
            return PolyExpr()
        if divisor.is_constant():
            return self * (1 / divisor.constant_value())
        rem = dict(self.terms)
        de, dc = divisor.leading_term()
        q: dict[Key, Fraction] = {}
        while rem:
            e = max(rem, key=_grlex_key)
            ediff = (e[0] - de[0], e[1] - de[1], e[2] - de[2])
            if min(ediff) < 0:
                return None
            coef = rem[e] / dc
            q[ediff] = coef
            for e2, c2 in divisor.terms.items():
                et = (ediff[0] + e2[0], ediff[1] + e2[1], ediff[2] + e2[2])
                v = rem.get(et, _ZERO) - coef * c2
                if v:
                    rem[et] = v
                else:
                    rem.pop(et, None)
        return PolyExpr(q)

    def div_in_var(self, divisor: "PolyExpr", var: str = "n") -> tuple["PolyExpr", "PolyExpr"]:
        """Division with remainder treating ``var`` as the main variable.

        Requires divisor's leading coefficient in ``var`` to be a nonzero
        constant, which covers every use here (all documented denominators
        have constant leading coefficient in n).
        """
        i = VARS.index(var)
        dd = divisor.degree(var)
        lead = divisor.coeff_in_var(var, dd)
        if not lead.is_constant():
            raise ValueError("divisor leading coefficient in main variable must be constant")
        lc = lead.constant_value()
        q = PolyExpr()
        rem = self
        while not rem.is_zero() and rem.degree(var) >= dd:
            dr = rem.degree(var)
            coef = rem.coeff_in_var(var, dr) * (1 / lc)
            shift = [0, 0, 0]
            shift[i] = dr - dd
            mono = PolyExpr({tuple(shift): Fraction(1)})
            q = q + coef * mono
            rem = rem - coef * mono * divisor
        return q, rem

    def coeff_in_var(self, var: str, power: int) -> "PolyExpr":
        i = VARS.index(var)
        out = {}
        for e, c in self.terms.items():
            if e[i] == power:
                e2 = list(e)
                e2[i] = 0
                out[tuple(e2)] = c
        return PolyExpr(out)

    # --- evaluation ---------------------------------------------------------
    def eval(self, n, d1, d2) -> Fraction:
        point = (Fraction(n), Fraction(d1), Fraction(d2))
        total = Fraction(0)
        pows = [{0: Fraction(1)}, {0: Fraction(1)}, {0: Fraction(1)}]
        for e, c in self.terms.items():
            v = c
            for i in range(3):
                cache = pows[i]
                if e[i] not in cache:
                    cache[e[i]] = point[i] ** e[i]
                v *= cache[e[i]]
            total += v
        return total

    def eval_partial_n(self, n_value) -> "PolyExpr":
        """Substitute an exact rational for n, leaving a (d1, d2) polynomial."""
        nv = Fraction(n_value)
        out: dict[Key, Fraction] = {}
        for e, c in self.terms.items():
            key = (0, e[1], e[2])
            v = out.get(key, _ZERO) + c * nv ** e[0]
            if v:
                out[key] = v
            else:
                out.pop(key, None)
        return PolyExpr(out)

    def eval_interval(self, box: Mapping[str, IntervalLike]) -> Interval:
        """Sound enclosure over a box, Horner in n over collected coefficients."""
        ivs = {v: Interval.make(box[v]) for v in VARS if v in box}
        missing = [v for v in VARS if self.degree(v) > 0 and v not in ivs]
        if missing:
            raise ValueError(f"box missing variables {missing}")
        coeffs = self.collect_n()
        acc = Interval.point(0)
        n_iv = ivs.get("n")
        prev_i = None
        for i, cpoly in coeffs:  # descending powers of n
            if prev_i is not None:
                acc = acc * n_iv ** (prev_i - i)
            acc = acc + _monomial_enclosure(cpoly, ivs)
            prev_i = i
        if prev_i is not None and prev_i > 0:
            acc = acc * n_iv**prev_i
        return acc

    def collect_n(self) -> list[tuple[int, "PolyExpr"]]:
        """[(i, coefficient in (d1, d2))] with descending i, no zero entries."""
        buckets: dict[int, dict[Key, Fraction]] = {}
        for e, c in self.terms.items():
            buckets.setdefault(e[0], {})[(0, e[1], e[2])] = c
        return [(i, PolyExpr(b)) for i, b in sorted(buckets.items(), reverse=True)]

    def substitute(self, bindings: Mapping[str, "RatFunc | PolyExpr | Fraction | int"]) -> "RatFunc":
        """Exact composition; unbound variables stay symbolic."""
        vals: list[RatFunc] = []
        for v in VARS:
            if v in bindings:
                vals.append(RatFunc.of(bindings[v]))
            else:
                vals.append(RatFunc.of(PolyExpr.var(v)))
        out = RatFunc.zero()
        for e, c in self.sorted_terms():
            term = RatFunc.of(PolyExpr.const(c))
            for i in range(3):
                if e[i]:
                    term = term * vals[i] ** e[i]
            out = out + term
        return out

    # --- serialization ---------------------------------------------------
    def serialize(self) -> str:
        if not self.terms:
            return "0"
        parts = []
        for e, c in self.sorted_terms():
            mono = "*".join(
                f"{v}^{k}" if k > 1 else v for v, k in zip(VARS, e) if k
            )
            ac = abs(c)
            if not mono:
                body = str(ac)
            elif ac == 1:
                body = mono
            else:
                body = f"{ac}*{mono}"
            parts.append(("- " if c < 0 else "+ ") + body)
        text = " ".join(parts)
        return text[2:] if text.startswith("+ ") else ("-" + text[2:])

    def to_json_dict(self) -> dict:
        return {
            "vars": list(VARS),
            "terms": [
                {"e": list(e), "c": rat_to_text(c)} for e, c in self.sorted_terms()
            ],
        }

    @staticmethod
    def from_json_dict(obj: Mapping) -> "PolyExpr":
        if list(obj.get("vars", VARS)) != list(VARS):
            raise ParseError(f"unsupported variable set {obj.get('vars')}")
        return PolyExpr({tuple(t["e"]): rat_from_text(t["c"]) for t in obj["terms"]})

    def __str__(self) -> str:
        return self.serialize()

    def __repr__(self) -> str:
        return f"PolyExpr({self.serialize()!r})"


def _as_poly(x) -> PolyExpr:
    if isinstance(x, PolyExpr):
        return x
    if isinstance(x, (int, Fraction)):
        return PolyExpr.const(x)
    raise TypeError(f"cannot coerce {type(x).__name__} to PolyExpr")


def _monomial_enclosure(p: PolyExpr, ivs: Mapping[str, Interval]) -> Interval:
    acc = Interval.point(0)
    for e, c in p.terms.items():
        t = Interval.point(c)
        if e[1]:
            t = t * ivs["d1"] ** e[1]
        if e[2]:
            t = t * ivs["d2"] ** e[2]
        acc = acc + t
    return acc


# --- gcd --------------------------------------------------------------------


def _content_in_var(f: PolyExpr, var: str) -> PolyExpr:
    """gcd of the coefficient polynomials of f viewed in Q[var]."""
    g = PolyExpr()
    for power in range(f.degree(var) + 1):
        c = f.coeff_in_var(var, power)
        if not c.is_zero():
            g = poly_gcd(g, c)
            if g.is_constant():
                return PolyExpr.const(1)
    return g if not g.is_zero() else PolyExpr.const(1)


def _pp_in_var(f: PolyExpr, var: str) -> PolyExpr:
    cont = _content_in_var(f, var)
    if cont.is_constant():
        return f.primitive()[0]
    return f.divide_exact(cont).primitive()[0]


def _poly_gcd_univar(a: PolyExpr, b: PolyExpr, var: str) -> PolyExpr:
    """Primitive-PRS gcd with ``var`` as main variable and proper content
    extraction, so common factors living in the coefficient ring are found."""
    cont = poly_gcd(_content_in_var(a, var), _content_in_var(b, var))
    a = _pp_in_var(a, var)
    b = _pp_in_var(b, var)
    while not b.is_zero():
        da, db = a.degree(var), b.degree(var)
        if da < db:
            a, b = b, a
            continue
        rem = _pseudo_rem(a, b, var)
        a, b = b, (_pp_in_var(rem, var) if not rem.is_zero() else PolyExpr())
        if not b.is_zero() and b.degree(var) == 0:
            b = PolyExpr()
            a = PolyExpr.const(1)
    return (cont * a).primitive()[0]


def _pseudo_rem(a: PolyExpr, b: PolyExpr, var: str) -> PolyExpr:
    """Pseudo remainder: multiply the remainder by lc(b) at each step, which
    keeps every subtraction polynomial without any divisibility assumption."""
    i = VARS.index(var)
    db = b.degree(var)
    lcb = b.coeff_in_var(var, db)
    rem = a
    while not rem.is_zero() and rem.degree(var) >= db:
        dr = rem.degree(var)
        cr = rem.coeff_in_var(var, dr)
        shift = [0, 0, 0]
        shift[i] = dr - db
        mono = PolyExpr({tuple(shift): Fraction(1)})
        rem = rem * lcb - cr * mono * b
    return rem


def poly_gcd(a: PolyExpr, b: PolyExpr) -> PolyExpr:
    """Multivariate gcd (primitive, positive leading coefficient)."""
    if a.is_zero():
        return b.primitive()[0]
    if b.is_zero():
        return a.primitive()[0]
    if a.is_constant() or b.is_constant():
        return PolyExpr.const(1)
    for var in VARS:
        if a.degree(var) > 0 or b.degree(var) > 0:
            g = _poly_gcd_univar(a, b, var)
            return g
    return PolyExpr.const(1)


# --- rational functions -------------------------------------------------------


class RatFunc:
    """num / prod(factor^mult) with primitive, sign-normalized factors."""

    __slots__ = ("num", "den_factors", "_den_cache")

    def __init__(self, num: PolyExpr, den_factors: Sequence[tuple[PolyExpr, int]] = ()):
        object.__setattr__(self, "num", num)
        object.__setattr__(self, "den_factors", tuple(den_factors))
        object.__setattr__(self, "_den_cache", None)

    def __setattr__(self, *a):  # pragma: no cover
        raise AttributeError("RatFunc is immutable")

    # --- construction -----------------------------------------------------
    @staticmethod
    def of(x) -> "RatFunc":
        if isinstance(x, RatFunc):
            return x
        return RatFunc(_as_poly(x))

    @staticmethod
    def zero() -> "RatFunc":
        return RatFunc(PolyExpr())

    @staticmethod
    def make(num: PolyExpr, den_factors: Iterable[tuple[PolyExpr, int]]) -> "RatFunc":
        """Canonicalize: primitive factors, constants folded, cancellation."""
        num = _as_poly(num)
        fac: dict[PolyExpr, int] = {}
        scale = Fraction(1)
        for f, k in den_factors:
            if k == 0:
                continue
            if k < 0:
                raise ValueError("negative factor multiplicity")
            if f.is_zero():
                raise ZeroDivisionError("zero polynomial in denominator")
            fp, c = f.primitive()
            scale *= c**k
            if fp.is_constant():
                continue
            fac[fp] = fac.get(fp, 0) + k
        num = num * (1 / scale)
        if num.is_zero():
            return RatFunc(num)
        # cancel factors dividing the numerator exactly
        out: dict[PolyExpr, int] = {}
        for f, k in fac.items():
            while k > 0:
                q = num.divide_exact(f)
                if q is None:
                    break
                num = q
                k -= 1
            if k:
                out[f] = k
        ordered = tuple(
            sorted(out.items(), key=lambda fk: (fk[0].degree(), _poly_sort_key(fk[0])))
        )
        return RatFunc(num, ordered)

    # --- structure -----------------------------------------------------------
    def den(self) -> PolyExpr:
        d = self._den_cache
        if d is None:
            d = PolyExpr.const(1)
            for f, k in self.den_factors:
                d = d * f**k
            object.__setattr__(self, "_den_cache", d)
        return d

    def is_polynomial(self) -> bool:
        return not self.den_factors

    def as_poly(self) -> PolyExpr:
        if not self.is_polynomial():
            raise ValueError(f"not a polynomial: denominator {self.den().serialize()}")
        return self.num

    def is_zero(self) -> bool:
        return self.num.is_zero()

    # --- arithmetic --------------------------------------------------------
    def __add__(self, other) -> "RatFunc":
        o = RatFunc.of(other)
        fac: dict[PolyExpr, int] = {}
        for f, k in self.den_factors:
            fac[f] = max(fac.get(f, 0), k)
        for f, k in o.den_factors:
            fac[f] = max(fac.get(f, 0), k)
        a = self.num
        for f, k in fac.items():
            extra = k - _mult(self.den_factors, f)
            if extra:
                a = a * f**extra
        b = o.num
        for f, k in fac.items():
            extra = k - _mult(o.den_factors, f)
            if extra:
                b = b * f**extra
        return RatFunc.make(a + b, tuple(fac.items()))

    __radd__ = __add__

    def __neg__(self) -> "RatFunc":
        return RatFunc(-self.num, self.den_factors)

    def __sub__(self, other) -> "RatFunc":
        return self + (-RatFunc.of(other))

    def __rsub__(self, other) -> "RatFunc":
        return RatFunc.of(other) - self

    def __mul__(self, other) -> "RatFunc":
        o = RatFunc.of(other)
        fac: dict[PolyExpr, int] = {}
        for f, k in self.den_factors:
            fac[f] = fac.get(f, 0) + k
        for f, k in o.den_factors:
            fac[f] = fac.get(f, 0) + k
        return RatFunc.make(self.num * o.num, tuple(fac.items()))

    __rmul__ = __mul__

    def inverse(self) -> "RatFunc":
        if self.num.is_zero():
            raise ZeroDivisionError("inverse of zero rational function")
        return RatFunc.make(self.den(), ((self.num, 1),))

    def __truediv__(self, other) -> "RatFunc":
        return self * RatFunc.of(other).inverse()

    def __rtruediv__(self, other) -> "RatFunc":
        return RatFunc.of(other) * self.inverse()

    def __pow__(self, k: int) -> "RatFunc":
        if k < 0:
            return self.inverse() ** (-k)
        out = RatFunc.of(1)
        for _ in range(k):
            out = out * self
        return out

    def __eq__(self, other) -> bool:
        if not isinstance(other, (RatFunc, PolyExpr, int, Fraction)):
            return NotImplemented
        o = RatFunc.of(other)
        return (self.num * o.den() - o.num * self.den()).is_zero()

    def __hash__(self) -> int:
        n = self.normalized()
        return hash((n.num, n.den_factors))

    def normalized(self) -> "RatFunc":
        """Reduce by the full polynomial gcd (used for identity certificates)."""
        if self.is_polynomial():
            return self
        out_num = self.num
        fac: list[tuple[PolyExpr, int]] = []
        for f, k in self.den_factors:
            for _ in range(k):
                g = poly_gcd(out_num, f)
                if g.is_constant():
                    fac.append((f, 1))
                else:
                    out_num = out_num.divide_exact(g)
                    fq = f.divide_exact(g)
                    if not fq.is_constant():
                        fac.append((fq, 1))
                    else:
                        out_num = out_num * (1 / fq.constant_value())
        return RatFunc.make(out_num, fac)

    # --- evaluation ------------------------------------------------------------
    def eval(self, n, d1, d2) -> Fraction:
        dv = Fraction(1)
        for f, k in self.den_factors:
            v = f.eval(n, d1, d2)
            if v == 0:
                raise PoleError(f"pole: factor {f.serialize()} vanishes at the point")
            dv *= v**k
        return self.num.eval(n, d1, d2) / dv

    def eval_interval(self, box: Mapping[str, IntervalLike]) -> Interval:
        acc = self.num.eval_interval(box)
        for f, k in self.den_factors:
            fv = f.eval_interval(box)
            if fv.straddles_zero():
                raise PoleError(
                    f"possible pole: enclosure of {f.serialize()} contains zero"
                )
            acc = acc / fv**k
        return acc

    def eval_partial_n(self, n_value) -> "RatFunc":
        return RatFunc.make(
            self.num.eval_partial_n(n_value),
            tuple((f.eval_partial_n(n_value), k) for f, k in self.den_factors),
        )

    def substitute(self, bindings: Mapping[str, "RatFunc | PolyExpr | Fraction | int"]) -> "RatFunc":
        num = self.num.substitute(bindings)
        out = num
        for f, k in self.den_factors:
            fs = f.substitute(bindings)
            if fs.is_zero():
                raise DomainError(
                    f"substitution sends denominator factor {f.serialize()} to zero"
                )
            out = out / fs**k
        return out

    def serialize(self) -> str:
        if self.is_polynomial():
            return self.num.serialize()
        return f"({self.num.serialize()}) / ({self.den().serialize()})"

    def __repr__(self) -> str:
        return f"RatFunc({self.serialize()!r})"


def _mult(factors: Sequence[tuple[PolyExpr, int]], f: PolyExpr) -> int:
    for g, k in factors:
        if g == f:
            return k
    return 0


def _poly_sort_key(p: PolyExpr) -> tuple:
    return tuple(sorted(((e, str(c)) for e, c in p.terms.items())))


# --- spec-surface helpers ------------------------------------------------------


def poly_arith(op: str, a, b) -> RatFunc:
    a, b = RatFunc.of(a), RatFunc.of(b)
    if op == "+":
        return a + b
    if op in ("-", "−"):
        return a - b
    if op in ("*", "×"):
        return a * b
    raise ValueError(f"unknown polynomial operation {op!r}")


def substitute(f, bindings) -> RatFunc:
    return RatFunc.of(f).substitute(bindings)


def eval_exact(f, point) -> Fraction:
    n, d1, d2 = point
    return RatFunc.of(f).eval(n, d1, d2)


def eval_interval(f, box) -> Interval:
    return RatFunc.of(f).eval_interval(box)


def collect_n(f: PolyExpr) -> list[tuple[int, PolyExpr]]:
    return _as_poly(f).collect_n()


def clear_denominators(f: RatFunc) -> tuple[PolyExpr, tuple[tuple[PolyExpr, int], ...], str]:
    """(numerator, factored denominator, sign-domain note)."""
    f = RatFunc.of(f)
    note = "; ".join(
        f"({g.serialize()})^{k} != 0 required" for g, k in f.den_factors
    ) or "denominator 1"
    return f.num, f.den_factors, note


# --- text parsing ---------------------------------------------------------------

_TOKEN = re.compile(
    r"\s*(?:(?P<num>\d+(?:/\d+)?)|(?P<var>n|d1|d2)|(?P<op>[-+*^()])|(?P<bad>\S))"
)


def parse(text: str) -> PolyExpr:
    """Parse +,-,*,^ polynomial expressions with parentheses over n, d1, d2."""
    tokens: list[tuple[str, str]] = []
    pos = 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m:
            break
        if m.group("bad"):
            raise ParseError(f"unexpected character {m.group('bad')!r} at position {m.start('bad')}")
        for kind in ("num", "var", "op"):
            if m.group(kind):
                tokens.append((kind, m.group(kind)))
        pos = m.end()
    if not tokens:
        raise ParseError("empty polynomial text")
    state = {"i": 0}

    def peek():
        return tokens[state["i"]] if state["i"] < len(tokens) else (None, None)

    def take():
        t = peek()
        state["i"] += 1
        return t

    def parse_sum() -> PolyExpr:
        kind, val = peek()
        sign = 1
        if kind == "op" and val in "+-":
            take()
            sign = -1 if val == "-" else 1
        node = parse_product() * sign
        while True:
            kind, val = peek()
            if kind == "op" and val in "+-":
                take()
                rhs = parse_product()
                node = node + (rhs if val == "+" else -rhs)
            else:
                return node

    def parse_product() -> PolyExpr:
        node = parse_power()
        while True:
            kind, val = peek()
            if kind == "op" and val == "*":
                take()
                node = node * parse_power()
            elif kind in ("num", "var") or (kind == "op" and val == "("):
                # implicit multiplication like 2(n-1) or 3n
                node = node * parse_power()
            else:
                return node

    def parse_power() -> PolyExpr:
        base = parse_atom()
        kind, val = peek()
        if kind == "op" and val == "^":
            take()
            kind, val = take()
            if kind != "num" or "/" in val:
                raise ParseError("exponent must be a non-negative integer")
            return base ** int(val)
        return base

    def parse_atom() -> PolyExpr:
        kind, val = take()
        if kind == "num":
            return PolyExpr.const(Fraction(val))
        if kind == "var":
            return PolyExpr.var(val)
        if kind == "op" and val == "(":
            node = parse_sum()
            kind, val = take()
            if (kind, val) != ("op", ")"):
                raise ParseError("unbalanced parentheses")
            return node
        if kind == "op" and val == "-":
            return -parse_atom()
        raise ParseError(f"unexpected token {val!r} at index {state['i'] - 1}")

    node = parse_sum()
    if state["i"] != len(tokens):
        raise ParseError(f"trailing input from token index {state['i']}")
    return node


def serialize(f) -> str:
    return RatFunc.of(f).serialize()


def poly_to_json(p: PolyExpr) -> str:
    return json.dumps(p.to_json_dict(), separators=(",", ":"))


def poly_from_json(text: str) -> PolyExpr:
    return PolyExpr.from_json_dict(json.loads(text))


# --- Bernstein range bounder (pure d1, d2 polynomials) ----------------------------


class BernsteinPatch:
    """Exact Bernstein form of a (d1, d2) polynomial over a rectangle.

    Coefficient extrema bound the range; the four corner coefficients equal
    the polynomial values at the corners.  Splitting uses de Casteljau at the
    midpoint, so children reuse the parent's coefficients exactly.
    """

    __slots__ = ("coeffs", "box", "m1", "m2")

    def __init__(self, coeffs: list[list[Fraction]], box: tuple[Interval, Interval]):
        self.coeffs = coeffs
        self.box = box
        self.m1 = len(coeffs) - 1
        self.m2 = len(coeffs[0]) - 1

    @staticmethod
    def from_poly(p: PolyExpr, box: tuple[Interval, Interval]) -> "BernsteinPatch":
        if p.degree("n") > 0:
            raise ValueError("Bernstein bounder handles (d1, d2) polynomials only")
        b1, b2 = box
        m1 = max(0, p.degree("d1"))
        m2 = max(0, p.degree("d2"))
        # power coefficients in local coordinates d = lo + w*t
        a = [[Fraction(0)] * (m2 + 1) for _ in range(m1 + 1)]
        for e, c in p.terms.items():
            a[e[1]][e[2]] = c
        a = _shift_scale_rows(a, b1.lo, b1.width, axis=0)
        a = _shift_scale_rows(a, b2.lo, b2.width, axis=1)
        # power -> Bernstein, one axis at a time:
        # b_i = sum_{k<=i} C(i,k)/C(m,k) a_k
        bin1 = _binomials(m1)
        bin2 = _binomials(m2)
        tmp = [[Fraction(0)] * (m2 + 1) for _ in range(m1 + 1)]
        for i in range(m1 + 1):
            for k in range(i + 1):
                f = Fraction(bin1[i][k], bin1[m1][k])
                row = a[k]
                trow = tmp[i]
                for j in range(m2 + 1):
                    if row[j]:
                        trow[j] += f * row[j]
        out = [[Fraction(0)] * (m2 + 1) for _ in range(m1 + 1)]
        for j in range(m2 + 1):
            for k in range(j + 1):
                f = Fraction(bin2[j][k], bin2[m2][k])
                for i in range(m1 + 1):
                    if tmp[i][k]:
                        out[i][j] += f * tmp[i][k]
        return BernsteinPatch(out, (b1, b2))

    def min_coeff(self) -> Fraction:
        return min(min(row) for row in self.coeffs)

    def max_coeff(self) -> Fraction:
        return max(max(row) for row in self.coeffs)

    def bounds(self) -> Interval:
        return Interval(self.min_coeff(), self.max_coeff())

    def corner_values(self) -> list[tuple[Fraction, Fraction, Fraction]]:
        b1, b2 = self.box
        c = self.coeffs
        return [
            (b1.lo, b2.lo, c[0][0]),
            (b1.hi, b2.lo, c[self.m1][0]),
            (b1.lo, b2.hi, c[0][self.m2]),
            (b1.hi, b2.hi, c[self.m1][self.m2]),
        ]

    def split(self, axis: int) -> tuple["BernsteinPatch", "BernsteinPatch"]:
        b1, b2 = self.box
        if axis == 0:
            left = _decasteljau_axis0(self.coeffs, keep="left")
            right = _decasteljau_axis0(self.coeffs, keep="right")
            mid = b1.mid
            return (
                BernsteinPatch(left, (Interval(b1.lo, mid), b2)),
                BernsteinPatch(right, (Interval(mid, b1.hi), b2)),
            )
        lo, hi = _decasteljau_axis1(self.coeffs)
        mid = b2.mid
        return (
            BernsteinPatch(lo, (b1, Interval(b2.lo, mid))),
            BernsteinPatch(hi, (b1, Interval(mid, b2.hi))),
        )


def _decasteljau_axis0(c: list[list[Fraction]], keep: str) -> list[list[Fraction]]:
    m = len(c) - 1
    cols = len(c[0])
    half = Fraction(1, 2)
    work = [row[:] for row in c]
    left = [None] * (m + 1)
    right = [None] * (m + 1)
    left[0] = work[0][:]
    right[m] = work[m][:]
    for step in range(1, m + 1):
        for i in range(m - step + 1):
            work[i] = [(work[i][j] + work[i + 1][j]) * half for j in range(cols)]
        left[step] = work[0][:]
        right[m - step] = work[m - step][:]
    return left if keep == "left" else right


def _decasteljau_axis1(c: list[list[Fraction]]) -> tuple[list[list[Fraction]], list[list[Fraction]]]:
    m = len(c[0]) - 1
    half = Fraction(1, 2)
    lo = []
    hi = []
    for row in c:
        work = row[:]
        lrow = [work[0]]
        rrow = [work[m]]
        for step in range(1, m + 1):
            for j in range(m - step + 1):
                work[j] = (work[j] + work[j + 1]) * half
            lrow.append(work[0])
            rrow.append(work[m - step])
        hi.append(list(reversed(rrow)))
        lo.append(lrow)
    return lo, hi


def _shift_scale_rows(a: list[list[Fraction]], lo: Fraction, w: Fraction, axis: int):
    """Substitute x -> lo + w*t along one axis of a power-coefficient grid."""
    m1 = len(a) - 1
    m2 = len(a[0]) - 1
    if axis == 0:
        out = [[Fraction(0)] * (m2 + 1) for _ in range(m1 + 1)]
        binom = _binomials(m1)
        for i in range(m1 + 1):
            wi = w**0
            # (lo + w t)^i = sum_k C(i,k) lo^(i-k) w^k t^k
            for k in range(i + 1):
                f = binom[i][k] * lo ** (i - k) * w**k
                if f:
                    for j in range(m2 + 1):
                        if a[i][j]:
                            out[k][j] += f * a[i][j]
        return out
    out = [[Fraction(0)] * (m2 + 1) for _ in range(m1 + 1)]
    binom = _binomials(m2)
    for j in range(m2 + 1):
        for k in range(j + 1):
            f = binom[j][k] * lo ** (j - k) * w**k
            if f:
                for i in range(m1 + 1):
                    if a[i][j]:
                        out[i][k] += f * a[i][j]
    return out


def _binomials(m: int) -> list[list[int]]:
    rows = [[1]]
    for i in range(1, m + 1):
        prev = rows[-1]
        rows.append([1] + [prev[k - 1] + prev[k] for k in range(1, i)] + [1])
    return rows
