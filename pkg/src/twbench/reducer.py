"""Travelling-wave reduction of the transport PDE to polynomial systems.

Substituting u = w^p with w = (sum a_mu E^mu)/(sum b_nu E^nu), E = exp(alpha*xi),
xi = x + v*t turns every PDE term into a rational function of E: d/dxi acts as
alpha*E*d/dE, so u_t = v*u', u_x = u', u_tt = v^2*u''.  Clearing the common
denominator (an exact power of the ansatz denominator) leaves a polynomial in
E whose coefficients must vanish individually, since the powers of E are
functionally independent.  Those coefficients form the emitted algebraic
system.

The inverse check, ``residual_scan``, evaluates the PDE residual pointwise on
a xi-grid from the analytic derivatives, so the two routes are independent.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping, Union

import numpy as np

from .model import HyperbolicPDE, TravelFrame
from .symcore import (
    E_NAME,
    ExpRational,
    Number,
    ParamPoly,
    frac_str,
    parse_poly_text,
    poly_dxi,
)

Coefficient = Union[str, Fraction, int, ParamPoly]


class PowerMismatch(ValueError):
    """Half-integer reaction exponents require the squared ansatz (p = 2)."""


class EmptyAnsatz(ValueError):
    """Ansatz with no terms, or an identically-zero numerator/denominator."""


class MissingUnknown(KeyError):
    """Assignment does not cover every unknown of the system."""


class PoleInWindow(ValueError):
    """Residual scan hit an undeclared pole of the solution."""


@dataclass(frozen=True)
class ExpAnsatz:
    """u = [ (a_0 + ... + a_m E^m) / (b_0 + ... + b_n E^n) ]^power.

    Coefficient slots may be symbol names, exact rationals, or small
    polynomial expressions in symbols (e.g. the palindromic numerators of the
    even families need slots like 2*a1).  No leading-coefficient gauge is
    imposed.
    """

    a: tuple[Coefficient, ...]
    b: tuple[Coefficient, ...]
    alpha: Union[str, Fraction] = "alpha"
    velocity: Union[str, Fraction] = "v"
    power: int = 1

    def __post_init__(self):
        if self.power not in (1, 2):
            raise ValueError("ansatz power must be 1 or 2")
        if not self.a or not self.b:
            raise EmptyAnsatz("coefficient lists must be non-empty")
        if all(_is_zero_number(c) for c in self.a):
            raise EmptyAnsatz("numerator is identically zero")
        if all(_is_zero_number(c) for c in self.b):
            raise EmptyAnsatz("denominator is identically zero")

    @property
    def m(self) -> int:
        return len(self.a) - 1

    @property
    def n(self) -> int:
        return len(self.b) - 1

    def numerator(self) -> ParamPoly:
        E = ParamPoly.var(E_NAME)
        return sum((ParamPoly.lift(c) * E**k for k, c in enumerate(self.a)), ParamPoly.const(0))

    def denominator(self) -> ParamPoly:
        E = ParamPoly.var(E_NAME)
        return sum((ParamPoly.lift(c) * E**k for k, c in enumerate(self.b)), ParamPoly.const(0))

    def base(self) -> ExpRational:
        """w as a rational function of E (before raising to `power`)."""
        return ExpRational(self.numerator(), self.denominator(), reduce=False)

    def symbols(self) -> tuple[str, ...]:
        """Unknowns, in slot order: numerator, denominator, alpha, velocity."""
        seen: dict[str, None] = {}
        for c in (*self.a, *self.b, self.alpha, self.velocity):
            if isinstance(c, str):
                seen.setdefault(c)
            elif isinstance(c, ParamPoly):
                for name in c.variables:
                    seen.setdefault(name)
        return tuple(seen)


def _is_zero_number(c: Coefficient) -> bool:
    return not isinstance(c, (str, ParamPoly)) and Fraction(c) == 0


@dataclass(frozen=True)
class AlgebraicSystem:
    """Polynomial equations produced by equating E-power coefficients to zero."""

    unknowns: tuple[str, ...]
    equations: tuple[ParamPoly, ...]
    provenance: tuple[int, ...]  # E power each equation came from
    parameters: tuple[str, ...] = ()  # symbolic reaction coefficients

    def all_symbols(self) -> tuple[str, ...]:
        return tuple(dict.fromkeys((*self.unknowns, *self.parameters)))

    def to_json(self) -> str:
        doc = {
            "unknowns": list(self.unknowns),
            "parameters": list(self.parameters),
            "equations": [eq.to_text() for eq in self.equations],
            "provenance": {str(i): k for i, k in enumerate(self.provenance)},
        }
        return json.dumps(doc, indent=2, sort_keys=True) + "\n"

    @staticmethod
    def from_json(text: str) -> "AlgebraicSystem":
        doc = json.loads(text)
        for key in ("unknowns", "parameters", "equations", "provenance"):
            if key not in doc:
                raise ValueError(f"system document missing key {key!r}")
        equations = tuple(parse_poly_text(s) for s in doc["equations"])
        unknowns = tuple(doc["unknowns"])
        parameters = tuple(doc["parameters"])
        allowed = set(unknowns) | set(parameters)
        for eq in equations:
            stray = set(eq.variables) - allowed
            if stray:
                raise ValueError(f"equation uses undeclared symbols {sorted(stray)}")
        provenance = tuple(doc["provenance"][str(i)] for i in range(len(equations)))
        return AlgebraicSystem(unknowns, equations, provenance, parameters)


@dataclass(frozen=True)
class Verdict:
    """Outcome of an exact or numeric verification."""

    status: str  # "PASS" | "FAIL"
    residuals: tuple
    report: str = ""

    @property
    def passed(self) -> bool:
        return self.status == "PASS"


@dataclass(frozen=True)
class ClosedFormSolution:
    """A fully numeric travelling-wave solution u = w(E)^power, E = exp(alpha*xi)."""

    expression: ExpRational  # w, with numeric coefficients
    alpha: float | Fraction
    velocity: float | Fraction
    frame: TravelFrame = field(default_factory=lambda: TravelFrame("xi", "v", "x+vt"))
    power: int = 1
    poles: tuple[float, ...] = ()  # xi locations where the denominator vanishes

    def __post_init__(self):
        for poly in (self.expression.num, self.expression.den):
            if any(v != E_NAME for v in poly.variables):
                raise ValueError("closed-form solution must have numeric coefficients")


def reduce(pde: HyperbolicPDE, ansatz: ExpAnsatz) -> AlgebraicSystem:
    """Emit the algebraic system whose vanishing makes the ansatz a solution.

    Every PDE term is tracked as numerator/g^k with g the ansatz denominator;
    the residual is cleared by g^K (K the largest k needed) and the
    coefficients of each E power in the cleared numerator are returned.  The
    residual vanishes identically in xi iff every returned equation vanishes.
    """
    p = ansatz.power
    if pde.has_half_integer_reaction() and p != 2:
        raise PowerMismatch("half-integer reaction exponents require power 2")
    clash = set(ansatz.symbols()) & (set(pde.symbols()) | {E_NAME})
    if clash:
        raise ValueError(f"ansatz symbols collide with model symbols: {sorted(clash)}")

    f = ansatz.numerator()
    g = ansatz.denominator()
    alpha = ansatz.alpha
    v = ParamPoly.lift(ansatz.velocity)

    # u = N0/g^p and its xi-derivatives with denominators g^(p+1), g^(p+2)
    N0 = f**p
    N1 = poly_dxi(N0, alpha) * g - p * N0 * poly_dxi(g, alpha)
    N2 = poly_dxi(N1, alpha) * g - (p + 1) * N1 * poly_dxi(g, alpha)

    terms: list[tuple[ParamPoly, int]] = []
    if pde.tau:
        terms.append((ParamPoly.const(pde.tau) * v * v * N2, p + 2))
    if pde.A:
        terms.append((ParamPoly.const(pde.A) * N0 * N1, 2 * p + 1))
    if pde.B:
        terms.append((ParamPoly.const(pde.B) * v * N1, p + 1))
    if pde.kappa:
        terms.append((ParamPoly.const(-pde.kappa) * N2, p + 2))
    for nu, lam in sorted(pde.reaction.items()):
        e = nu * p
        if e.denominator != 1:
            raise PowerMismatch(f"exponent {nu} not realizable at power {p}")
        terms.append((ParamPoly.const(-1) * ParamPoly.lift(lam) * f ** int(e), int(e)))

    terms = [(num, k) for num, k in terms if not num.is_zero()]
    if not terms:
        residual = ParamPoly.const(0)
    else:
        K = max(k for _, k in terms)
        residual = ParamPoly.const(0)
        for num, k in terms:
            residual = residual + num * g ** (K - k)

    buckets = residual.as_univariate(E_NAME)
    provenance = tuple(sorted(buckets))
    equations = tuple(buckets[k].primitive() for k in provenance)
    return AlgebraicSystem(
        unknowns=ansatz.symbols(),
        equations=equations,
        provenance=provenance,
        parameters=pde.symbols(),
    )


def verify_assignment(system: AlgebraicSystem, assignment: Mapping[str, Number]) -> Verdict:
    """Evaluate every equation exactly; PASS iff all residuals are exactly zero."""
    values: dict[str, Fraction] = {}
    for name, value in assignment.items():
        if isinstance(value, float):
            raise TypeError("exact verification requires rational values, got a float "
                            f"for {name!r}")
        values[name] = Fraction(value)
    needed = set()
    for eq in system.equations:
        needed.update(eq.variables)
    missing = needed - set(values)
    if missing:
        raise MissingUnknown(", ".join(sorted(missing)))

    residuals = tuple(eq.evaluate(values) for eq in system.equations)
    failing = [i for i, r in enumerate(residuals) if r != 0]
    if not failing:
        return Verdict("PASS", residuals, "all equations vanish exactly")
    lines = [
        f"equation {i} (E^{system.provenance[i]}): residual {frac_str(residuals[i])}"
        for i in failing
    ]
    return Verdict("FAIL", residuals, "; ".join(lines))


def solve_numeric(
    system: AlgebraicSystem,
    fixed: Mapping[str, Number] | None = None,
    seed: int = 1,
    starts: int = 32,
) -> list[dict[str, float]]:
    """Damped Newton with seeded randomized starts.

    Returns every distinct solution with residual sup-norm below 1e-12,
    deduplicated at sup-distance 1e-8 and sorted lexicographically.  An empty
    list reports that no start converged.
    """
    if starts < 1:
        raise ValueError("starts must be >= 1")
    fixed = {k: Fraction(v) if not isinstance(v, float) else v for k, v in (fixed or {}).items()}
    exact_fixed = {k: v for k, v in fixed.items() if not isinstance(v, float)}
    float_fixed = {k: v for k, v in fixed.items() if isinstance(v, float)}

    equations = [eq.substitute(exact_fixed) for eq in system.equations]
    unknowns = [u for u in system.all_symbols() if u not in fixed]
    if float_fixed:
        # floats cannot be substituted exactly; keep them as frozen unknowns
        env = dict(float_fixed)
    else:
        env = {}

    live = [eq for eq in equations if not eq.is_zero()]
    if not unknowns:
        ok = all(abs(float(eq.evaluate(env)) if env else float(eq.constant_value())) < 1e-12
                 for eq in live)
        return [{}] if ok else []
    jacobian = [[eq.diff(u) for u in unknowns] for eq in live]

    def f_at(x: np.ndarray) -> np.ndarray:
        point = dict(env)
        point.update(zip(unknowns, x))
        return np.array([float(eq.evaluate(point)) for eq in live], dtype=float)

    def j_at(x: np.ndarray) -> np.ndarray:
        point = dict(env)
        point.update(zip(unknowns, x))
        return np.array(
            [[float(d.evaluate(point)) for d in row] for row in jacobian], dtype=float
        )

    if not live:
        # every equation vanished under `fixed`: the origin is as good as any
        return [dict(zip(unknowns, [0.0] * len(unknowns)))]

    found: list[np.ndarray] = []
    for k in range(starts):
        rng = np.random.default_rng((int(seed), k))
        x = rng.uniform(-3.0, 3.0, size=len(unknowns))
        fx = f_at(x)
        for _ in range(80):
            if np.max(np.abs(fx)) < 1e-12:
                break
            J = j_at(x)
            try:
                step = np.linalg.lstsq(J, -fx, rcond=None)[0]
            except np.linalg.LinAlgError:
                break
            if not np.all(np.isfinite(step)):
                break
            lam, accepted = 1.0, False
            base = float(np.linalg.norm(fx))
            for _ in range(30):
                xn = x + lam * step
                fn = f_at(xn)
                if np.all(np.isfinite(fn)) and float(np.linalg.norm(fn)) < base:
                    x, fx, accepted = xn, fn, True
                    break
                lam *= 0.5
            if not accepted:
                break
        if np.max(np.abs(fx)) < 1e-12 and np.all(np.isfinite(x)):
            if all(np.max(np.abs(x - y)) > 1e-8 for y in found):
                found.append(x)

    found.sort(key=lambda x: tuple(x))
    return [dict(zip(unknowns, map(float, x))) for x in found]


# -- numeric residual scan ----------------------------------------------------


def _float_coeffs(poly: ParamPoly, subs: Mapping[str, float]) -> np.ndarray:
    """Dense float coefficient array in E after substituting all parameters."""
    parts = poly.as_univariate(E_NAME)
    deg = max(parts) if parts else 0
    out = np.zeros(deg + 1)
    for k, coeff in parts.items():
        out[k] = float(coeff.evaluate(subs))
    return out


def _balanced_eval(coeffs: np.ndarray, E: np.ndarray, J: int):
    """Evaluate sum c_j E^j scaled by E^-J for E > 1 (overflow-free).

    Returns (value, magnitude) where magnitude bounds the term sizes that
    entered the sum; |value|/magnitude small flags catastrophic cancellation,
    i.e. a nearby zero.
    """
    padded = np.zeros(J + 1)
    padded[: len(coeffs)] = coeffs
    absolute = np.abs(padded)
    value = np.empty_like(E)
    magnitude = np.empty_like(E)
    small = E <= 1.0
    if np.any(small):
        x = E[small]
        value[small] = np.polynomial.polynomial.polyval(x, padded)
        magnitude[small] = np.polynomial.polynomial.polyval(x, absolute)
    if np.any(~small):
        t = 1.0 / E[~small]
        value[~small] = np.polynomial.polynomial.polyval(t, padded[::-1])
        magnitude[~small] = np.polynomial.polynomial.polyval(t, absolute[::-1])
    return value, magnitude


def _ratio_on_grid(num: np.ndarray, den: np.ndarray, E: np.ndarray):
    """num(E)/den(E) with common E^-J scaling; also den's cancellation ratio."""
    J = max(len(num), len(den)) - 1
    nv, _ = _balanced_eval(num, E, J)
    dv, dm = _balanced_eval(den, E, J)
    with np.errstate(divide="ignore", invalid="ignore"):
        ratio = nv / dv
        rel = np.abs(dv) / np.where(dm > 0, dm, 1.0)
    return ratio, rel


def residual_scan(
    pde: HyperbolicPDE,
    sol: ClosedFormSolution,
    window: tuple[float, float] = (-10.0, 10.0),
    samples: int = 1001,
) -> float:
    """Max relative PDE residual of a closed-form solution on a xi-grid.

    Uses the analytic E-derivatives of u = w^p; points within 1e-3 of a
    declared pole are skipped, and an undeclared pole raises PoleInWindow.
    The result is max|residual| / (1 + max|u|).
    """
    if not pde.is_numeric():
        raise ValueError("residual scan needs a fully numeric model")
    if samples < 2:
        raise ValueError("need at least two samples")

    w = sol.expression
    p = sol.power
    u = w**p
    u1 = u.differentiate_xi("alpha")
    u2 = u1.differentiate_xi("alpha")

    alpha = float(sol.alpha)
    vel = float(sol.velocity)
    subs = {"alpha": alpha}
    w_num, w_den = _float_coeffs(w.num, subs), _float_coeffs(w.den, subs)
    u_num, u_den = _float_coeffs(u.num, subs), _float_coeffs(u.den, subs)
    u1_num, u1_den = _float_coeffs(u1.num, subs), _float_coeffs(u1.den, subs)
    u2_num, u2_den = _float_coeffs(u2.num, subs), _float_coeffs(u2.den, subs)

    xi = np.linspace(float(window[0]), float(window[1]), samples)
    keep = np.ones_like(xi, dtype=bool)
    for pole in sol.poles:
        keep &= np.abs(xi - pole) > 1e-3
    if not np.any(keep):
        raise ValueError("every sample lies within the pole exclusion zones")
    xi = xi[keep]
    E = np.exp(alpha * xi)

    w_val, w_rel = _ratio_on_grid(w_num, w_den, E)
    u_val, _ = _ratio_on_grid(u_num, u_den, E)
    u1_val, _ = _ratio_on_grid(u1_num, u1_den, E)
    u2_val, _ = _ratio_on_grid(u2_num, u2_den, E)

    near_pole = w_rel < 1e-9
    if np.any(near_pole):
        raise PoleInWindow(
            f"denominator vanishes near xi = {xi[near_pole][0]:.6g} (undeclared pole)"
        )

    reaction = np.zeros_like(xi)
    for nu, lam in pde.reaction.items():
        e = nu * p
        reaction += float(lam) * w_val ** int(e)

    residual = (
        float(pde.tau) * vel * vel * u2_val
        + float(pde.A) * u_val * u1_val
        + float(pde.B) * vel * u1_val
        - float(pde.kappa) * u2_val
        - reaction
    )
    bad = ~np.isfinite(residual)
    if np.any(bad):
        raise PoleInWindow(f"residual overflow near xi = {xi[bad][0]:.6g}")
    return float(np.max(np.abs(residual)) / (1.0 + np.max(np.abs(u_val))))


def poles_of(den_coeffs, alpha) -> tuple[float, ...]:
    """xi locations where sum b_k exp(k*alpha*xi) vanishes (positive E roots)."""
    if float(alpha) == 0.0:
        # E is identically 1; a vanishing denominator then has no isolated pole
        return ()
    arr = np.array([float(c) for c in den_coeffs])
    while len(arr) and arr[-1] == 0:
        arr = arr[:-1]
    if len(arr) < 2:
        return ()
    roots = np.roots(arr[::-1])
    real_pos = [float(r.real) for r in roots
                if abs(r.imag) <= 1e-9 * (1 + abs(r.real)) and r.real > 0]
    return tuple(sorted(np.log(r) / float(alpha) for r in real_pos))


def solution_from_assignment(ansatz: ExpAnsatz, assignment: Mapping[str, Number],
                             frame: TravelFrame | None = None) -> ClosedFormSolution:
    """Instantiate the ansatz at a numeric assignment, declaring its poles."""
    env = dict(assignment)

    def value(c):
        if isinstance(c, (str, ParamPoly)):
            return ParamPoly.lift(c).evaluate(env)
        return Fraction(c)

    num = [value(c) for c in ansatz.a]
    den = [value(c) for c in ansatz.b]
    alpha = value(ansatz.alpha)
    velocity = value(ansatz.velocity)
    E = ParamPoly.var(E_NAME)

    def poly(coeffs):
        acc = ParamPoly.const(0)
        for k, c in enumerate(coeffs):
            if isinstance(c, float):
                c = Fraction(str(c))
            acc = acc + ParamPoly.const(c) * E**k
        return acc

    return ClosedFormSolution(
        expression=ExpRational(poly(num), poly(den)),
        alpha=alpha,
        velocity=velocity,
        frame=frame or TravelFrame("xi", velocity, "x+vt"),
        power=ansatz.power,
        poles=poles_of(den, alpha),
    )


def sample_solution(sol: ClosedFormSolution, xi: np.ndarray) -> np.ndarray:
    """u(xi) on a grid, with NaN at points within 1e-3 of a declared pole."""
    alpha = float(sol.alpha)
    subs = {"alpha": alpha}
    num, den = _float_coeffs(sol.expression.num, subs), _float_coeffs(sol.expression.den, subs)
    E = np.exp(alpha * np.asarray(xi, dtype=float))
    w_val, _ = _ratio_on_grid(num, den, E)
    out = w_val ** sol.power
    for pole in sol.poles:
        out[np.abs(xi - pole) <= 1e-3] = np.nan
    return out
