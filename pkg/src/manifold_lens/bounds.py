"""Closed-form sample-complexity and concentration bounds.

Every function evaluates an explicit formula in 64-bit floats.  Probability
bounds are returned raw and may exceed one; :func:`is_vacuous` flags those.

The curvature functions of the flattening bound are not available in closed
form, so radius conditions use the explicit dominating constant
``q = 3 + (8 d phi_max + 5 alpha tau) / phi_min``, valid for ``r / tau <= 1/48``.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field

import numpy as np

from .geometry import unit_ball_volume

THM_A_CONSTANTS = {"c1": 1 / 16, "c2": 4642.0, "c3": 14.0}
THM_B_CONSTANTS = {"c1": 1 / 48, "c2": 41778.0, "c3": 14.0}
THM_MAIN_CONSTANTS = {"radius_factor": 16.0, "c2": 4642.0, "c3": 14.0}
MULTIPOINT_C = 1156.0
FORMULA_VERSION = (
    "thmA(c1=1/16,c2=4642,c3=14);thmB(c1=1/48,c2=41778,c3=14);"
    "main(16,4642,14);multipoint(1156,14);conc(512,1152);q=3+(8d*phimax+5*alpha*tau)/phimin"
)
SURROGATE_REGIME = 1 / 48


class BoundError(ValueError):
    pass


@dataclass(frozen=True)
class BoundInputs:
    """Scalar parameters of the theorem conditions.

    Exactly one of ``theta`` (tangent mode), ``eta`` (dimension mode) and
    ``eps`` (projector mode) must be given.
    """

    tau: float
    d: int
    D: int
    phi_min: float
    phi_max: float
    alpha: float = 0.0
    s: float = 0.0
    r: float | None = None
    m: int | None = None
    rho: float = 1.0
    delta: float = 0.05
    theta: float | None = None
    eta: float | None = None
    eps: float | None = None
    u0: float | None = None

    def __post_init__(self):
        if not self.tau > 0:
            raise BoundError("tau must be positive")
        if not self.phi_min > 0:
            raise BoundError("phi_min must be positive")
        if not self.phi_min <= self.phi_max:
            raise BoundError("need phi_min <= phi_max")
        if not self.alpha >= 0:
            raise BoundError("alpha must be non-negative")
        if not 0 < self.delta < 1:
            raise BoundError("delta must lie in (0, 1)")
        if not 0 < self.rho <= 1:
            raise BoundError("rho must lie in (0, 1]")
        if not 1 <= self.d < self.D:
            raise BoundError("need 1 <= d < D")
        if not self.s >= 0:
            raise BoundError("s must be non-negative")
        given = [name for name in ("theta", "eta", "eps") if getattr(self, name) is not None]
        if len(given) != 1:
            raise BoundError("exactly one of theta, eta, eps must be given")

    @property
    def mode(self) -> str:
        return {"theta": "tangent", "eta": "dimension", "eps": "projector"}[
            next(n for n in ("theta", "eta", "eps") if getattr(self, n) is not None)]


@dataclass
class BoundReport:
    mode: str
    S1: float | None
    S2: float | None
    q: float
    required_ratio: float | None
    provided_ratio: float | None
    radius_ok: bool | None
    sample_ok: bool | None
    m_min: int | None
    notes: list = field(default_factory=list)

    def as_dict(self) -> dict:
        return asdict(self)


def is_vacuous(prob_bound: float) -> bool:
    return prob_bound >= 1.0


def _density_factor(inp: BoundInputs) -> float:
    return inp.phi_min / (3 * inp.phi_min + 8 * inp.d * inp.phi_max + 5 * inp.alpha * inp.tau)


def _log_term(D, rho, delta, c3=14.0):
    arg = c3 * D * rho / delta
    if not arg > 0:
        raise BoundError("log argument must be positive")
    return math.log(arg)


def q_surrogate(inp: BoundInputs) -> float:
    return 3.0 + (8 * inp.d * inp.phi_max + 5 * inp.alpha * inp.tau) / inp.phi_min


def thmA_S1(inp: BoundInputs) -> float:
    if inp.theta is None:
        raise BoundError("theta is required")
    c1 = THM_A_CONSTANTS["c1"]
    return c1 * inp.tau * math.sin(inp.theta) / (inp.d + 2) * _density_factor(inp)


def thmA_S2(inp: BoundInputs) -> float:
    if inp.theta is None:
        raise BoundError("theta is required")
    c2, c3 = THM_A_CONSTANTS["c2"], THM_A_CONSTANTS["c3"]
    return (c2 * (inp.d + 2) ** 2 / (unit_ball_volume(inp.d) * inp.phi_min * math.sin(inp.theta) ** 2)
            * _log_term(inp.D, inp.rho, inp.delta, c3))


def _check_eta(inp: BoundInputs):
    if inp.eta is None:
        raise BoundError("eta is required")
    if not 0 < inp.eta < 1 / (2 * inp.D):
        raise BoundError("eta out of range: need 0 < eta < 1/(2D)")


def thmB_S1(inp: BoundInputs) -> float:
    _check_eta(inp)
    c1 = THM_B_CONSTANTS["c1"]
    return c1 * inp.tau / ((inp.d + 2) * inp.D * (1 + 1 / inp.eta)) * _density_factor(inp)


def thmB_S2(inp: BoundInputs) -> float:
    _check_eta(inp)
    c2, c3 = THM_B_CONSTANTS["c2"], THM_B_CONSTANTS["c3"]
    lead = c2 * (inp.d + 2) ** 2 * inp.D**2 * (1 + 1 / inp.eta) ** 2
    return lead / (unit_ball_volume(inp.d) * inp.phi_min) * _log_term(inp.D, inp.rho, inp.delta, c3)


def hoeffding_matrix_bound(eps: float, sigma2_sum: float, D: int) -> float:
    """Matrix Hoeffding tail ``2D exp(-eps^2 / (8 sigma^2))``."""
    if eps < 0 or not sigma2_sum > 0:
        raise BoundError("need eps >= 0 and sigma^2 > 0")
    return 2 * D * math.exp(-(eps**2) / (8 * sigma2_sum))


def vector_hoeffding_bound(eps: float, sigma2_sum: float, D: int) -> float:
    """Vector version through the Hermitian dilation, ``2(D+1) exp(-eps^2 / (8 sigma^2))``."""
    if eps < 0 or not sigma2_sum > 0:
        raise BoundError("need eps >= 0 and sigma^2 > 0")
    return 2 * (D + 1) * math.exp(-(eps**2) / (8 * sigma2_sum))


def cov_concentration_bounds(eps: float, m: int, r: float, D: int) -> tuple[float, float]:
    """Tails for the fixed-center and the mean-centered sample covariance.

    Returns ``(2D exp(-m eps^2 / 512 r^4), (4D+2) exp(-m eps^2 / 1152 r^4))``.
    """
    if eps < 0 or m < 1 or not r > 0:
        raise BoundError("need eps >= 0, m >= 1, r > 0")
    x = m * eps**2 / r**4
    return 2 * D * math.exp(-x / 512), (4 * D + 2) * math.exp(-x / 1152)


def fixed_window_delta(eps: float, m: int, r: float, D: int, u: float) -> float:
    """Failure probability for a window of mass ``u``: ``(4D+2)(1 - u(1 - xi))^m``."""
    if not 0 < u <= 1:
        raise BoundError("window mass u must lie in (0, 1]")
    if eps < 0 or m < 0 or not r > 0:
        raise BoundError("need eps >= 0, m >= 0, r > 0")
    xi = math.exp(-(eps**2) / (1152 * r**4))
    return (4 * D + 2) * (1 - u * (1 - xi)) ** m


def multipoint_required_ratio(eps: float, r: float, D: int, u0: float, rho: float, delta: float) -> float:
    """Required ``m / log m`` for all local covariances to be eps-accurate."""
    if not 0 < eps <= 2 * r**2:
        raise BoundError("need 0 < eps <= 2 r^2")
    if not 0 < u0 <= 1:
        raise BoundError("u0 must lie in (0, 1]")
    return MULTIPOINT_C * r**4 / (u0 * eps**2) * _log_term(D, rho, delta)


def tail_threshold_radius(d: int, D: int, eta: float) -> float:
    """Spectral radius around the reference spectrum inside which ``thr`` returns d."""
    if not 0 < eta < 1 / (2 * d):
        raise BoundError("eta out of range: need 0 < eta < 1/(2d)")
    return 1.0 / (3 * math.sqrt(D) * (1 + 1 / eta))


def phi_min_substitute(phi_local: float) -> float:
    """Replacement for ``phi_min`` from the local mass functional when phi vanishes."""
    if not phi_local > 0:
        raise BoundError("local mass functional must be positive")
    return 1.04 * phi_local


def _ratio(m: int) -> float:
    return m / math.log(m)


def solve_m(A: float) -> int:
    """Smallest integer ``m >= 3`` with ``m / log m >= A``."""
    if not A > math.e or _ratio(3) >= A:
        return 3
    lo, hi = 3, 4
    while _ratio(hi) < A:
        lo, hi = hi, hi * 2
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if _ratio(mid) >= A:
            hi = mid
        else:
            lo = mid
    return hi


def log_lemma_chain(x: float, a: float, b: float) -> tuple[bool, bool, bool]:
    """Truth values of ``x/log x > a(1 + log b)``, ``x > a log(bx)``, ``x/log x > a``.

    For ``b > 1`` and ``x > e`` each statement implies the next.
    """
    if not (b > 1 and x > math.e):
        raise BoundError("need b > 1 and x > e")
    lx = math.log(x)
    return x / lx > a * (1 + math.log(b)), x > a * math.log(b * x), x / lx > a


def _finish(report: BoundReport, inp: BoundInputs) -> BoundReport:
    if report.required_ratio is not None:
        report.m_min = solve_m(report.required_ratio)
        if inp.m is not None:
            report.provided_ratio = _ratio(inp.m) if inp.m >= 3 else None
            report.sample_ok = inp.m >= 3 and report.provided_ratio >= report.required_ratio
    return report


def theorem_conditions(inp: BoundInputs) -> BoundReport:
    """Evaluate the radius and sample-size conditions for ``inp.mode``."""
    if inp.mode == "projector":
        return thm_main_conditions(inp)
    q = q_surrogate(inp)
    if inp.mode == "tangent":
        S1, S2 = thmA_S1(inp), thmA_S2(inp)
    else:
        S1, S2 = thmB_S1(inp), thmB_S2(inp)
    report = BoundReport(inp.mode, S1, S2, q, None, None, None, None, None)
    if inp.r is not None:
        report.radius_ok = math.sqrt(2 * inp.tau * inp.s) <= inp.r <= S1
        effective = inp.r - 2 * inp.s
        if effective > 0:
            report.required_ratio = S2 / effective**inp.d
        else:
            report.notes.append("r - 2s <= 0: sample condition cannot hold")
            report.sample_ok = False
    return _finish(report, inp)


def thm_main_conditions(inp: BoundInputs) -> BoundReport:
    """Projector-mode conditions with the surrogate ``q`` in place of the curvature term."""
    eps = inp.eps
    if eps is None or not 0 < eps < 2:
        raise BoundError("eps must lie in (0, 2)")
    q = q_surrogate(inp)
    upper = inp.tau * eps / (THM_MAIN_CONSTANTS["radius_factor"] * (inp.d + 2) * q)
    report = BoundReport("projector", upper, None, q, None, None, None, None, None)
    report.notes.append("S1 is the radius upper limit tau * eps / (16 (d+2) q)")
    if inp.r is not None:
        ratio = inp.r / inp.tau
        report.radius_ok = math.sqrt(2 * inp.s / inp.tau) < ratio < upper / inp.tau
    if inp.u0 is not None:
        if not 0 < inp.u0 <= 1:
            raise BoundError("u0 must lie in (0, 1]")
        report.required_ratio = (THM_MAIN_CONSTANTS["c2"] * (inp.d + 2) ** 2 / (inp.u0 * eps**2)
                                 * _log_term(inp.D, inp.rho, inp.delta, THM_MAIN_CONSTANTS["c3"]))
    else:
        report.notes.append("u0 not supplied: sample condition not evaluated")
    return _finish(report, inp)


def estimate_u0(source, r: float, n_mc: int = 200, seed: int = 0) -> dict:
    """Plug-in estimate of ``inf_x mu(B_r(x))`` over the support.

    ``source`` is either an ``(n, D)`` array of points drawn from ``mu`` or a
    ``(model, density, noise)`` triple.  Centers are the first ``n_mc``
    points and ball masses are measured on the remaining ``10 * n_mc`` (or
    all remaining) points.  The minimum is not a certified infimum.
    """
    from .geometry import sample

    if not r > 0:
        raise BoundError("r must be positive")
    if isinstance(source, tuple):
        model, density, noise = source
        points = sample(model, density, noise, 11 * n_mc, seed).points
    else:
        points = np.asarray(source, dtype=float)
        if len(points) < 2:
            raise BoundError("need at least two points")
    n_centers = min(n_mc, max(1, len(points) // 11))
    centers, pool = points[:n_centers], points[n_centers:]
    masses = np.empty(n_centers)
    for k in range(0, n_centers, 256):
        c = centers[k:k + 256]
        dist2 = np.sum((c[:, None, :] - pool[None, :, :]) ** 2, axis=-1)
        masses[k:k + 256] = np.mean(dist2 < r * r, axis=1)
    u0 = float(masses.min())
    j = int(np.argmin(masses))
    stderr = math.sqrt(max(u0 * (1 - u0), 0.0) / len(pool))
    return {
        "u0": u0,
        "stderr": stderr,
        "center_index": j,
        "n_centers": int(n_centers),
        "pool_size": int(len(pool)),
        "certified": False,
        "low_count": bool(u0 * len(pool) < 30),
    }
