"""Radial shooting explorer for the Lane-Emden system.

Integrates u'' + (n-1)/r u' = -v^p, v'' + (n-1)/r v' = -u^q from regular
initial data with an adaptive high-order solver, locating the first zero of
either component by event detection.  This module is exploratory evidence
only: it runs in floating point and certificates never depend on it.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Optional

import numpy as np
from scipy.integrate import quad, solve_ivp

DEFAULT_REL_TOL = 1e-10
DEFAULT_ABS_TOL = 1e-12

#: fraction of the natural length scale used for the series start
SERIES_START = 1e-6


class StiffnessError(RuntimeError):
    def __init__(self, message: str, last_state=None):
        super().__init__(message)
        self.last_state = last_state


@dataclass
class Trajectory:
    n: int
    p: float
    q: float
    u0: float
    v0: float
    r: np.ndarray                      # strictly increasing radii
    u: np.ndarray
    du: np.ndarray
    v: np.ndarray
    dv: np.ndarray
    first_zero: Optional[tuple[str, float]]   # (component, radius)
    rel_tol: float
    abs_tol: float
    dense: Optional[Callable] = field(default=None, repr=False)

    def sample(self, r: float) -> tuple[float, float, float, float]:
        """Dense-output state (u, du, v, dv) at radius r."""
        if self.dense is None:
            raise ValueError("trajectory carries no dense output")
        r0 = self.r[0]
        if r < r0:
            # series region: second-order Taylor from the center
            u = self.u0 - self.v0**self.p * r * r / (2 * self.n)
            v = self.v0 - self.u0**self.q * r * r / (2 * self.n)
            return u, -self.v0**self.p * r / self.n, v, -self.u0**self.q * r / self.n
        y = self.dense(min(r, self.r[-1]))
        return tuple(y)


def _rhs(n: int, p: float, q: float):
    def fn(r, y):
        u, du, v, dv = y
        up = max(u, 0.0)
        vp = max(v, 0.0)
        return [du, -(vp**p) - (n - 1) / r * du,
                dv, -(up**q) - (n - 1) / r * dv]
    return fn


def shoot(n: int, p, q, u0: float = 1.0, v0: float = 1.0, r_max: float = 50.0,
          rel_tol: float = DEFAULT_REL_TOL, abs_tol: float = DEFAULT_ABS_TOL) -> Trajectory:
    """Integrate from the regular center until the first zero or r_max.

    The removable singularity at r = 0 is bridged by the second-order series
    u = u0 - v0^p r^2/(2n) + O(r^4); the truncation error at the start radius
    is far below abs_tol.
    """
    p, q = float(p), float(q)
    if u0 <= 0 or v0 <= 0:
        raise ValueError("initial data must be positive")
    if r_max <= 0 or rel_tol <= 0 or abs_tol <= 0:
        raise ValueError("r_max and tolerances must be positive")
    scale = min(1.0, (u0 ** -((p * q - 1) / (2 * (p + 1))) if p * q > 1 else 1.0))
    r0 = SERIES_START * scale
    y0 = [u0 - v0**p * r0 * r0 / (2 * n), -(v0**p) * r0 / n,
          v0 - u0**q * r0 * r0 / (2 * n), -(u0**q) * r0 / n]

    def u_zero(r, y):
        return y[0]

    def v_zero(r, y):
        return y[2]

    u_zero.terminal = True
    u_zero.direction = -1
    v_zero.terminal = True
    v_zero.direction = -1

    sol = solve_ivp(_rhs(n, p, q), (r0, r_max), y0, method="DOP853",
                    rtol=rel_tol, atol=abs_tol, events=(u_zero, v_zero),
                    dense_output=True)
    if not sol.success and sol.status != 1:
        raise StiffnessError(sol.message, last_state=(sol.t[-1], sol.y[:, -1]))
    first_zero = None
    hits = []
    if len(sol.t_events[0]):
        hits.append(("u", float(sol.t_events[0][0])))
    if len(sol.t_events[1]):
        hits.append(("v", float(sol.t_events[1][0])))
    if hits:
        first_zero = min(hits, key=lambda h: h[1])
    return Trajectory(
        n=n, p=p, q=q, u0=u0, v0=v0,
        r=sol.t, u=sol.y[0], du=sol.y[1], v=sol.y[2], dv=sol.y[3],
        first_zero=first_zero, rel_tol=rel_tol, abs_tol=abs_tol,
        dense=sol.sol,
    )


def classify(n: int, p, q) -> dict:
    """Exact rational classification against the Sobolev hyperbola and the
    extended working region 1/(p+1) + 1/(q+1) >= 1 - 2/n + 4/n^2."""
    p, q = Fraction(p), Fraction(q)
    if p <= 0 or q <= 0:
        raise ValueError("need p, q > 0")
    lhs = 1 / (p + 1) + 1 / (q + 1)
    hyperbola = 1 - Fraction(2, n)
    if lhs > hyperbola:
        kind = "subcritical"
    elif lhs == hyperbola:
        kind = "critical"
    else:
        kind = "supercritical"
    in_region = lhs >= hyperbola + Fraction(4, n * n)
    return {
        "class": kind,
        "gap": lhs - hyperbola,
        "in_working_region": bool(in_region),
    }


def check_comparison(traj: Trajectory, tolerance: float = 1e-8) -> dict:
    """Report the maximal excess of v^(p+1)/(p+1) over u^(q+1)/(q+1).

    The comparison is a theorem for entire solutions with p >= q; along a
    shot trajectory with arbitrary initial data this only reports whether
    the ordering propagates, it asserts nothing.
    """
    p, q = traj.p, traj.q
    if p < q:
        raise ValueError("comparison check expects p >= q")
    mask = (traj.u > 0) & (traj.v > 0)
    lhs = traj.v[mask] ** (p + 1) / (p + 1)
    rhs = traj.u[mask] ** (q + 1) / (q + 1)
    excess = lhs - rhs
    max_excess = float(np.max(excess)) if excess.size else 0.0
    at_zero = traj.v0 ** (p + 1) / (p + 1) - traj.u0 ** (q + 1) / (q + 1)
    return {
        "max_excess": max_excess,
        "holds_at_start": bool(at_zero <= tolerance),
        "violated_beyond_tolerance": bool(max_excess > tolerance),
        "tolerance": tolerance,
    }


def scaling_exponents(p, q) -> tuple[Fraction, Fraction]:
    p, q = Fraction(p), Fraction(q)
    if p * q == 1:
        raise ValueError("scaling exponents need p*q != 1")
    return 2 * (p + 1) / (p * q - 1), 2 * (q + 1) / (p * q - 1)


def rescale_check(traj: Trajectory, R, n_samples: int = 200) -> dict:
    """Deviation between the rescaled trajectory and a fresh shot.

    The system is invariant under u -> R^a u(R r), v -> R^b v(R r); the
    rescaled initial data is integrated afresh and compared on the common
    radius range.
    """
    Rf = float(R)
    a, b = scaling_exponents(Fraction(traj.p).limit_denominator(10**6),
                             Fraction(traj.q).limit_denominator(10**6))
    af, bf = float(a), float(b)
    u0s = Rf**af * traj.u0
    v0s = Rf**bf * traj.v0
    r_hi_orig = float(traj.r[-1])
    fresh = shoot(traj.n, traj.p, traj.q, u0s, v0s,
                  r_max=max(r_hi_orig / Rf * 1.05, SERIES_START * 10),
                  rel_tol=traj.rel_tol, abs_tol=traj.abs_tol)
    r_common_hi = min(r_hi_orig / Rf, float(fresh.r[-1]))
    r_lo = max(float(traj.r[0]) / Rf, float(fresh.r[0]))
    rs = np.linspace(r_lo, r_common_hi * 0.999, n_samples)
    # deviation relative to the trajectory scale: pointwise relative error is
    # ill-conditioned where u crosses zero
    scale = max(abs(u0s), 1e-300)
    dev = max(
        abs(Rf**af * traj.sample(Rf * r)[0] - fresh.sample(r)[0]) for r in rs
    ) / scale
    out = {"R": Rf, "max_rel_deviation": dev, "samples": n_samples}
    if traj.first_zero and fresh.first_zero:
        comp0, r0 = traj.first_zero
        comp1, r1 = fresh.first_zero
        out["first_zero_original"] = r0
        out["first_zero_rescaled"] = r1
        out["first_zero_component_match"] = comp0 == comp1
        out["first_zero_covariance_error"] = abs(r1 - r0 / Rf) / max(r0 / Rf, 1e-300)
    return out


def monotone_flux_residual(traj: Trajectory, n_checks: int = 20) -> float:
    """Max residual of r^(n-1) u'(r) = -int_0^r t^(n-1) v(t)^p dt."""
    n, p = traj.n, traj.p
    rs = np.linspace(float(traj.r[0]) * 2, float(traj.r[-1]) * 0.98, n_checks)
    worst = 0.0
    for r in rs:
        lhs = r ** (n - 1) * traj.sample(r)[1]
        val, _err = quad(lambda t: t ** (n - 1) * max(traj.sample(t)[2], 0.0) ** p,
                         0.0, r, limit=200)
        denom = max(abs(lhs), abs(val), 1e-12)
        worst = max(worst, abs(lhs + val) / denom)
    return worst


def critical_bubble(n: int, r: np.ndarray) -> np.ndarray:
    """Closed-form radial solution of the critical scalar equation with
    center value 1: (1 + r^2/(n(n-2)))^(-(n-2)/2)."""
    return (1.0 + r * r / (n * (n - 2.0))) ** (-(n - 2.0) / 2.0)


def save_csv(traj: Trajectory, path: str) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["r", "u", "du", "v", "dv"])
        for row in zip(traj.r, traj.u, traj.du, traj.v, traj.dv):
            w.writerow([f"{x:.17g}" for x in row])


def save_svg(traj: Trajectory, path: str) -> None:
    import matplotlib
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    fig, ax = plt.subplots(figsize=(7, 4.5))
    ax.plot(traj.r, traj.u, label="u", lw=1.4)
    ax.plot(traj.r, traj.v, label="v", lw=1.4, ls="--")
    ax.axhline(0.0, color="k", lw=0.6)
    if traj.first_zero:
        comp, rz = traj.first_zero
        ax.axvline(rz, color="crimson", lw=0.8, ls=":")
        ax.annotate(f"first zero of {comp} at r={rz:.4g}", (rz, 0),
                    textcoords="offset points", xytext=(6, 10), fontsize=8)
    ax.set_xlabel("r")
    ax.set_ylabel("component value")
    ax.set_title(f"radial shot: n={traj.n}, p={traj.p:g}, q={traj.q:g}, "
                 f"u0={traj.u0:g}, v0={traj.v0:g}")
    ax.legend()
    fig.tight_layout()
    fig.savefig(path)
    plt.close(fig)
