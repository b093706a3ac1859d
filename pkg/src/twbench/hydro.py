"""Phase-plane analysis of the travelling-wave reduction of the nonlocal
hydrodynamic model.

In the frame omega = x - D*t the model reduces (after the first integral
U = C1 - D/R) to the planar system

    dR/domega = Y
    dY/domega = { E*R - [ D^2 + beta*R^(nu+3)/(nu+2)
                          + sigma*(nu+1)*R^(nu+1)*Y^2 ] } / (sigma*R^(nu+2))

whose critical points lie on the R axis at the roots of
P(R) = beta*R^(nu+3)/(nu+2) - E*R + D^2.  Multiplying the vector field by the
positive factor 2*R^nu turns the system into Hamiltonian form with

    H = 2*D^2*R^(nu+1)/(nu+1) + beta*R^(2(nu+2))/(nu+2)^2
        + sigma*Y^2*R^(2(nu+1)) - 2*E*R^(nu+2)/(nu+2)

so phase curves in the right half-plane are level sets of H.  The saddle
level H1 = H(R1, 0) carries the homoclinic loop; its R-extent runs up to the
turning point R3, the first zero of G(R) = H1 - H(R, 0) beyond the center.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Union

import numpy as np
from scipy.integrate import quad, solve_ivp
from scipy.optimize import brentq

Number = Union[Fraction, int, float]

R_FLOOR = 1e-9


class NoSecondRoot(ValueError):
    """Theorem precondition fails: no second critical point beyond R1."""


class NoTurningPoint(ValueError):
    """G has no zero beyond the center (should not happen when nu > -2)."""


class OutOfDomain(ValueError):
    """Argument outside the curve's domain (e.g. G < 0)."""


class StiffnessFailure(RuntimeError):
    """Adaptive integrator step underflow."""


class QuadratureFailure(RuntimeError):
    """Quadrature error estimate above tolerance."""


def _exact_root(q: Fraction, k: int) -> Fraction | None:
    """Exact k-th root of a non-negative rational, or None."""
    if q < 0:
        return None
    def iroot(n: int) -> int | None:
        if n < 2:
            return n
        r = round(n ** (1.0 / k))
        for cand in (r - 1, r, r + 1):
            if cand >= 0 and cand**k == n:
                return cand
        return None
    a, b = iroot(q.numerator), iroot(q.denominator)
    if a is None or b is None:
        return None
    return Fraction(a, b)


def _rpow(base: Number, exp: Fraction) -> Number:
    """base**exp, exact Fraction when representable, float otherwise."""
    exp = Fraction(exp)
    if isinstance(base, float):
        return base**float(exp)
    base = Fraction(base)
    if exp.denominator == 1:
        return base ** int(exp)
    root = _exact_root(base if exp >= 0 else 1 / base, exp.denominator)
    if root is not None:
        return root ** abs(exp.numerator)
    return float(base) ** float(exp)


@dataclass(frozen=True)
class PhaseState:
    """A point (R, Y) of the phase plane, restricted to R > 0."""

    R: float
    Y: float

    def __post_init__(self):
        if not self.R > 0:
            raise OutOfDomain("phase states live in the right half-plane R > 0")


@dataclass(frozen=True)
class HydroModel:
    """Parameters nu, beta, sigma, D, R1 with derived C1 and E.

    The asymptotic state R -> R1, U -> 0 fixes C1 = D/R1 and
    E = D^2/R1 + beta*R1^(nu+2)/(nu+2).
    """

    nu: Fraction
    beta: Fraction
    sigma: Fraction
    D: Fraction
    R1: Fraction

    def __post_init__(self):
        for name in ("nu", "beta", "sigma", "D", "R1"):
            value = getattr(self, name)
            if not isinstance(value, (Fraction, int)):
                raise TypeError(f"{name} must be rational (got {type(value).__name__})")
            object.__setattr__(self, name, Fraction(value))
        if self.nu <= -2 or self.nu == -1:
            raise OutOfDomain("nu must satisfy nu > -2, nu != -1 "
                              "(nu+1 and nu+2 appear in denominators)")
        if self.beta <= 0 or self.sigma <= 0 or self.R1 <= 0:
            raise OutOfDomain("beta, sigma and R1 must be positive")

    @property
    def C1(self) -> Fraction:
        return self.D / self.R1

    @property
    def E(self) -> Number:
        return self.D**2 / self.R1 + self.beta * _rpow(self.R1, self.nu + 2) / (self.nu + 2)

    def theorem_holds(self) -> bool:
        """Precondition for the saddle/center pair: D^2 > beta*R1^(nu+3)."""
        return self.D**2 > self.beta * _rpow(self.R1, self.nu + 3)


def reference_instance() -> HydroModel:
    """The worked instance: D = R1 = sigma = 1, beta = 1/2, nu = 0 (E = 5/4)."""
    return HydroModel(nu=Fraction(0), beta=Fraction(1, 2), sigma=Fraction(1),
                      D=Fraction(1), R1=Fraction(1))


def parse_hydro_model(text: str) -> HydroModel:
    """Read {"nu","beta","sigma","D","R1"} JSON; E and C1 are always derived.

    Numbers are exact decimals; "p/q" strings are exact rationals.
    """
    import json as _json

    from .model import SchemaError, _read_value

    try:
        doc = _json.loads(text, parse_float=Fraction, parse_int=Fraction)
    except ValueError as exc:
        raise SchemaError(f"invalid JSON: {exc}") from None
    if not isinstance(doc, dict):
        raise SchemaError("top-level value must be an object")
    expected = {"nu", "beta", "sigma", "D", "R1"}
    if set(doc) != expected:
        raise SchemaError(f"keys mismatch: missing {sorted(expected - set(doc))}, "
                          f"unknown {sorted(set(doc) - expected)}")
    fields = {}
    for name in expected:
        value = _read_value(doc[name], name)
        if isinstance(value, str):
            raise SchemaError(f"{name} must be numeric")
        fields[name] = value
    return HydroModel(**fields)


# -- the critical-point polynomial and Hamiltonian ---------------------------


def P_of_R(model: HydroModel, R: Number) -> Number:
    """P(R) = beta*R^(nu+3)/(nu+2) - E*R + D^2; its roots are the equilibria."""
    return model.beta * _rpow(R, model.nu + 3) / (model.nu + 2) - model.E * R + model.D**2


def P_prime(model: HydroModel, R: float) -> float:
    nu = float(model.nu)
    return float(model.beta) * (nu + 3) / (nu + 2) * R ** (nu + 2) - float(model.E)


def hamiltonian(model: HydroModel, state) -> Number:
    """H(R, Y); exact Fraction when the inputs and powers are rational."""
    R, Y = (state.R, state.Y) if isinstance(state, PhaseState) else state
    if not (R > 0):
        raise OutOfDomain("hamiltonian requires R > 0")
    nu = model.nu
    return (2 * model.D**2 * _rpow(R, nu + 1) / (nu + 1)
            + model.beta * _rpow(R, 2 * (nu + 2)) / (nu + 2) ** 2
            + model.sigma * Y * Y * _rpow(R, 2 * (nu + 1))
            - 2 * model.E * _rpow(R, nu + 2) / (nu + 2))


def saddle_level(model: HydroModel) -> Number:
    """H1 = H(R1, 0), the level of the saddle separatrices."""
    return hamiltonian(model, (model.R1, Fraction(0)))


def G_of_R(model: HydroModel, R: Number) -> Number:
    """G(R) = H1 - H(R, 0), the radicand of the separatrix formula."""
    return saddle_level(model) - hamiltonian(model, (R, Fraction(0)))


def G_prime(model: HydroModel, R: float) -> float:
    """G'(R) = -2*R^nu*P(R) (exact identity used for root polishing)."""
    return -2.0 * float(R) ** float(model.nu) * float(P_of_R(model, float(R)))


def _polish(f, df, x: float, steps: int = 4) -> float:
    for _ in range(steps):
        d = df(x)
        if d == 0 or not math.isfinite(d):
            break
        step = f(x) / d
        if not math.isfinite(step):
            break
        x -= step
    return x


def second_root(model: HydroModel) -> float:
    """R2, the center location: the root of P on (R1, infinity)."""
    if not model.theorem_holds():
        raise NoSecondRoot("precondition D^2 > beta*R1^(nu+3) fails")
    f = lambda R: float(P_of_R(model, R))
    lo = float(model.R1) * (1 + 1e-9)
    hi = max(2.0 * float(model.R1), 1.0)
    for _ in range(200):
        if f(hi) > 0:
            break
        hi *= 2.0
    else:
        raise NoSecondRoot("P does not change sign beyond R1")
    r2 = brentq(f, lo, hi, xtol=1e-15, rtol=8.9e-16)
    return _polish(f, lambda R: P_prime(model, R), r2)


def turning_point(model: HydroModel) -> float:
    """R3 > R2: first zero of G beyond the center (the homoclinic's peak)."""
    r2 = second_root(model)
    g = lambda R: float(G_of_R(model, R))
    if g(r2) <= 0:
        raise NoTurningPoint("G(R2) is not positive")
    hi = 2.0 * r2
    for _ in range(200):
        if g(hi) < 0:
            break
        hi *= 2.0
    else:
        raise NoTurningPoint("G does not change sign beyond R2")
    r3 = brentq(g, r2, hi, xtol=1e-15, rtol=8.9e-16)
    r3 = _polish(g, lambda R: G_prime(model, R), r3)
    if not r3 > r2:
        raise NoTurningPoint("turning point did not exceed the center")
    return r3


@dataclass(frozen=True)
class CriticalPointReport:
    points: tuple  # (R, kind, eigenvalues) triples
    R2: float
    Psi_positive: bool


def Psi(model: HydroModel, R: float, R2: float | None = None) -> float:
    """The positive cofactor in P(R) = (R - R1)*(R - R2)*Psi(R)."""
    R1 = float(model.R1)
    R2 = second_root(model) if R2 is None else R2
    if abs(R - R1) < 1e-9:
        return P_prime(model, R1) / (R1 - R2)
    if abs(R - R2) < 1e-9:
        return P_prime(model, R2) / (R2 - R1)
    return float(P_of_R(model, R)) / ((R - R1) * (R - R2))


def critical_points(model: HydroModel) -> CriticalPointReport:
    """Locate and classify the equilibria of the reduced system.

    The linearization at (R*, 0) has eigenvalues lam^2 = -P'(R*)/(sigma*R*^(nu+2)):
    a real pair (saddle) at R1, an imaginary pair (center) at R2.
    """
    r1 = float(model.R1)
    r2 = second_root(model)
    sigma, nu = float(model.sigma), float(model.nu)
    points = []
    for r in (r1, r2):
        lam_sq = -P_prime(model, r) / (sigma * r ** (nu + 2))
        if lam_sq > 0:
            kind, eig = "saddle", (math.sqrt(lam_sq), -math.sqrt(lam_sq))
        else:
            kind, eig = "center", complex(0.0, math.sqrt(-lam_sq))
            eig = (eig, -eig)
        points.append((r, kind, eig))
    r3 = turning_point(model)
    grid = np.geomspace(1e-6 * r1, 10.0 * r3, 400)
    psi_positive = all(
        Psi(model, float(R), r2) > 0
        for R in grid
        if min(abs(R - r1), abs(R - r2)) > 1e-9
    )
    return CriticalPointReport(points=tuple(points), R2=r2, Psi_positive=psi_positive)


def saddle_angle(model: HydroModel) -> float:
    """Angle between the outgoing separatrix and the R axis at the saddle."""
    r1 = float(model.R1)
    r2 = second_root(model)
    s = (r2 - r1) * Psi(model, r1, r2) / (float(model.sigma) * r1 ** (float(model.nu) + 2))
    return math.atan(math.sqrt(s))


def separatrix(model: HydroModel, R: float) -> tuple[float, float]:
    """(Y+, Y-) of the saddle separatrix at abscissa R in [R1, R3]."""
    r1, r3 = float(model.R1), turning_point(model)
    if not (r1 - 1e-12 <= R <= r3 + 1e-12):
        raise OutOfDomain(f"separatrix abscissa must lie in [R1, R3] = [{r1}, {r3}]")
    g = float(G_of_R(model, R))
    scale = float(model.sigma) * R ** (2 * (float(model.nu) + 1))
    if g < -1e-12 * max(1.0, scale):
        raise OutOfDomain(f"G({R}) < 0")
    y = math.sqrt(max(g, 0.0) / scale)
    return y, -y


# -- direct integration -------------------------------------------------------


@dataclass(frozen=True)
class Trajectory:
    """A sampled flow trajectory with its conserved quantity at every step."""

    omega: np.ndarray
    R: np.ndarray
    Y: np.ndarray
    H: np.ndarray
    status: str  # "completed" | "boundary"
    dense: object  # scipy OdeSolution for interpolation


def _rhs(model: HydroModel):
    nu, beta, sigma = float(model.nu), float(model.beta), float(model.sigma)
    D2, E = float(model.D) ** 2, float(model.E)

    def rhs(_, state):
        R, Y = state
        R = max(R, R_FLOOR)
        bracket = E * R - (D2 + beta * R ** (nu + 3) / (nu + 2)
                           + sigma * (nu + 1) * R ** (nu + 1) * Y * Y)
        return [Y, bracket / (sigma * R ** (nu + 2))]

    return rhs


def flow(model: HydroModel, start, omega_span, rel_tol: float = 1e-10) -> Trajectory:
    """Integrate the reduced system with an adaptive embedded Runge-Kutta pair.

    Samples are the accepted solver steps; H is evaluated at each of them.
    Integration halts with status "boundary" if R reaches the floor 1e-9.
    """
    if rel_tol < 1e-13:
        raise ValueError("rel_tol below 1e-13 is not resolvable in double precision")
    if isinstance(start, PhaseState):
        start = (start.R, start.Y)
    if isinstance(omega_span, (int, float)):
        omega_span = (0.0, float(omega_span))

    def boundary(_, state):
        return state[0] - R_FLOOR

    boundary.terminal = True
    boundary.direction = -1

    sol = solve_ivp(_rhs(model), omega_span, [float(start[0]), float(start[1])],
                    method="DOP853", rtol=rel_tol, atol=rel_tol * 1e-2,
                    dense_output=True, events=boundary)
    if sol.status == -1:
        raise StiffnessFailure(sol.message)
    R, Y = sol.y
    H = np.array([float(hamiltonian(model, (float(r), float(y))))
                  for r, y in zip(R, Y)])
    return Trajectory(omega=sol.t, R=R, Y=Y, H=H,
                      status="boundary" if sol.status == 1 else "completed",
                      dense=sol.sol)


# -- the homoclinic orbit ------------------------------------------------------


def quadrature_integrand(model: HydroModel, R: float) -> float:
    """d(omega)/dR along the homoclinic: sqrt(sigma)*R^(1+nu)/sqrt(G(R))."""
    g = float(G_of_R(model, R))
    if g <= 0:
        raise OutOfDomain(f"G({R}) <= 0")
    return math.sqrt(float(model.sigma)) * R ** (1 + float(model.nu)) / math.sqrt(g)


_GAUSS8_X, _GAUSS8_W = np.polynomial.legendre.leggauss(8)
_GAUSS8_X = 0.5 * (_GAUSS8_X + 1.0)  # nodes on [0, 1]
_GAUSS8_W = 0.5 * _GAUSS8_W


def G_second(model: HydroModel, R: float) -> float:
    """G''(R) = -2*(nu*R^(nu-1)*P + R^nu*P') (smooth, no cancellation)."""
    nu = float(model.nu)
    return -2.0 * (nu * R ** (nu - 1.0) * float(P_of_R(model, R))
                   + R**nu * P_prime(model, R))


def homoclinic_profile(model: HydroModel, n: int = 400,
                       delta: float = 1e-6) -> tuple[np.ndarray, np.ndarray]:
    """The homoclinic profile (omega, R) by quadrature, peak-centered.

    Both quadrature endpoints are singular: G has a simple root at the peak
    R3 (inverse-square-root, removed by s = sqrt(R3 - R)) and a double root
    at the saddle abscissa R1 (logarithmic, removed by R = R1 + exp(t)).
    Near R1 the smooth cofactor G(R)/(R - R1)^2 is evaluated through the
    cancellation-free representation  integral_0^1 (1-x)*G''(R1 + x*(R-R1)) dx.
    The returned branch has omega >= 0 increasing while R falls from R3 to
    R1 + delta; the orbit is even in omega, so the other side is the mirror.
    """
    if n < 2:
        raise ValueError("need at least two sample points")
    r1, r3 = float(model.R1), turning_point(model)
    nu, sigma = float(model.nu), float(model.sigma)
    r_mid = 0.5 * (r1 + r3)

    def phi_peak(s: float) -> float:
        # G(R3 - s^2)/s^2 = -integral_0^1 G'(R3 - x*s^2) dx: cancellation-free
        return -float(np.dot(_GAUSS8_W,
                             [G_prime(model, r3 - x * s * s) for x in _GAUSS8_X]))

    def integrand_s(s: float) -> float:
        return 2.0 * math.sqrt(sigma) * (r3 - s * s) ** (1 + nu) / math.sqrt(phi_peak(s))

    def phi_saddle(d: float) -> float:
        # G(R1 + d)/d^2 via the second-derivative integral representation
        return float(np.dot(_GAUSS8_W,
                            [(1.0 - x) * G_second(model, r1 + x * d) for x in _GAUSS8_X]))

    def integrand_t(t: float) -> float:
        d = math.exp(t)
        return math.sqrt(sigma) * (r1 + d) ** (1 + nu) / math.sqrt(phi_saddle(d))

    def accumulate(fun, grid, omega0):
        out = np.empty(len(grid))
        out[0] = omega0
        for i in range(1, len(grid)):
            piece, err = quad(fun, grid[i - 1], grid[i],
                              epsabs=1e-12, epsrel=1e-10, limit=200)
            if not math.isfinite(piece) or err > 1e-8 * max(1.0, abs(piece)):
                raise QuadratureFailure(
                    f"panel [{grid[i-1]}, {grid[i]}] error estimate {err}")
            out[i] = out[i - 1] + piece
        return out

    n_s = max(n // 2, 2)
    n_t = max(n - n_s, 2)
    s_grid = np.linspace(0.0, math.sqrt(r3 - r_mid), n_s)
    omega_s = accumulate(integrand_s, s_grid, 0.0)
    # t decreasing: R walks from r_mid down to r1 + delta
    t_grid = np.linspace(math.log(r_mid - r1), math.log(delta), n_t)
    omega_t = accumulate(lambda t: -integrand_t(t), t_grid, omega_s[-1])
    omega = np.concatenate([omega_s, omega_t[1:]])
    R = np.concatenate([r3 - s_grid**2, r1 + np.exp(t_grid[1:])])
    return omega, R


# -- the explicit homoclinic of the worked instance ---------------------------


_SQRT2 = math.sqrt(2.0)

#: omega0 as printed alongside the explicit solution.
PRINTED_OMEGA0 = _SQRT2 * math.pi - math.log(2.0)

#: Peak-centering constant of the corrected antiderivative: F(R3) with
#: R3 = 2*sqrt(2) - 1, where the arcsine reaches its right endpoint pi/2.
CORRECTED_OMEGA0 = _SQRT2 * math.pi + 0.5 * _SQRT2 * math.log(2.0)


@dataclass(frozen=True)
class ExplicitHomoclinic:
    """Printed and corrected closed forms, both normalized to omega(R3) = 0."""

    corrected: float
    printed: float


def _is_reference_instance(model: HydroModel) -> bool:
    ref = reference_instance()
    return (model.nu, model.beta, model.sigma, model.D, model.R1) == \
           (ref.nu, ref.beta, ref.sigma, ref.D, ref.R1)


def _asin_clamped(x: float) -> float:
    # the argument reaches exactly 1 at R3; keep roundoff inside the domain
    return math.asin(min(max(x, -1.0), 1.0))


def _corrected_antiderivative(R: float) -> float:
    # d/dR of this equals R/sqrt(G(R)) with 8*G = (R-1)^2*(7 - 2R - R^2):
    # R/((R-1)sqrt(Q)) splits as 1/sqrt(Q) + 1/((R-1)sqrt(Q)), Q = 8-(R+1)^2
    Q = max(7.0 - 2.0 * R - R * R, 0.0)
    return (2.0 * _SQRT2 * _asin_clamped((R + 1.0) / (2.0 * _SQRT2))
            + _SQRT2 * math.log(2.0 * (R - 1.0) / (3.0 - R + math.sqrt(Q))))


def _printed_antiderivative(R: float) -> float:
    inner = max(20.0 - 2.0 * (R * R + 2.0 * R + 3.0), 0.0)
    return (2.0 * _SQRT2 * _asin_clamped((R + 1.0) / (2.0 * _SQRT2))
            + _SQRT2 * math.log((R - 1.0) / (3.0 - R + math.sqrt(inner))))


def explicit_homoclinic(R: float, model: HydroModel | None = None) -> ExplicitHomoclinic:
    """Closed-form omega(R) on the incoming branch (omega <= 0, peak at 0).

    Only defined for the worked instance D = R1 = sigma = 1, beta = 1/2,
    nu = 0.  Returns both the expression as printed and the corrected
    antiderivative (partial fractions + arcsine/log primitives); the
    corrected branch satisfies d(omega)/dR = quadrature integrand.
    """
    model = reference_instance() if model is None else model
    if not _is_reference_instance(model):
        raise OutOfDomain("the explicit homoclinic is specific to the worked instance")
    r3 = 2.0 * _SQRT2 - 1.0
    if not (1.0 < R <= r3):
        raise OutOfDomain(f"R must lie in (1, R3] = (1, {r3}]")
    corrected = _corrected_antiderivative(R) - CORRECTED_OMEGA0
    printed = _printed_antiderivative(R) - (_SQRT2 * math.pi - 0.5 * _SQRT2 * math.log(2.0))
    return ExplicitHomoclinic(corrected=corrected, printed=printed)
