"""Data model and JSON parser for the hyperbolic transport PDE family.

The equation under study is

    tau*u_tt + A*u*u_x + B*u_t - kappa*u_xx = f(u) = sum_nu lambda_nu * u^nu

with non-negative constants tau, A, B, kappa and reaction exponents nu drawn
from {0, 1/2, 1, 3/2, 2, 3}.  Reaction coefficients may be exact rationals or
named symbols; the linear coefficients are always numeric.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping, Union

from .symcore import frac_str

ReactionValue = Union[Fraction, str]

#: Allowed reaction exponents, as exact half-integers.
ALLOWED_EXPONENTS = (
    Fraction(0),
    Fraction(1, 2),
    Fraction(1),
    Fraction(3, 2),
    Fraction(2),
    Fraction(3),
)

_EXPONENT_KEYS = {"0": Fraction(0), "1/2": Fraction(1, 2), "1": Fraction(1),
                  "3/2": Fraction(3, 2), "2": Fraction(2), "3": Fraction(3)}

_SYMBOL_RE = re.compile(r"^[A-Za-z_]\w*$")
_RATIONAL_RE = re.compile(r"^-?\d+(/\d+)?$")


class SchemaError(ValueError):
    """Input document does not match the model schema."""


class DomainError(ValueError):
    """Well-formed input with out-of-domain values."""


class DegenerateFrame(ValueError):
    """Travelling frame with tau*v^2 - kappa = 0."""


@dataclass(frozen=True)
class TravelFrame:
    """A travelling variable, e.g. xi = x + v*t or omega = x - D*t."""

    symbol: str
    velocity: Union[str, Fraction]
    orientation: str  # "x+vt" or "x-Dt"

    def __post_init__(self):
        if self.orientation not in ("x+vt", "x-Dt"):
            raise DomainError(f"unknown frame orientation {self.orientation!r}")


@dataclass(frozen=True)
class HyperbolicPDE:
    """Coefficients of the PDE and its reaction map."""

    tau: Fraction
    A: Fraction
    B: Fraction
    kappa: Fraction
    reaction: Mapping[Fraction, ReactionValue]

    def __post_init__(self):
        for name in ("tau", "A", "B", "kappa"):
            value = getattr(self, name)
            if not isinstance(value, Fraction):
                object.__setattr__(self, name, Fraction(value))
        for name in ("tau", "A", "B", "kappa"):
            if getattr(self, name) < 0:
                raise DomainError(f"{name} must be non-negative")
        if not (self.tau or self.A or self.B or self.kappa):
            raise DomainError("at least one of tau, A, B, kappa must be nonzero")
        cleaned = {}
        for nu, lam in dict(self.reaction).items():
            nu = Fraction(nu)
            if nu not in ALLOWED_EXPONENTS:
                raise DomainError(f"reaction exponent {nu} outside the allowed set")
            if isinstance(lam, str):
                if not _SYMBOL_RE.match(lam):
                    raise DomainError(f"bad symbol name {lam!r}")
            else:
                lam = Fraction(lam)
            cleaned[nu] = lam
        object.__setattr__(self, "reaction", cleaned)

    def __hash__(self):
        return hash((self.tau, self.A, self.B, self.kappa,
                     tuple(sorted(self.reaction.items(), key=lambda kv: kv[0]))))

    def is_numeric(self) -> bool:
        """True when every reaction coefficient is an exact rational."""
        return all(not isinstance(v, str) for v in self.reaction.values())

    def has_half_integer_reaction(self) -> bool:
        return any(nu.denominator == 2 for nu in self.reaction)

    def symbols(self) -> tuple[str, ...]:
        return tuple(sorted({v for v in self.reaction.values() if isinstance(v, str)}))


@dataclass(frozen=True)
class QuarticReduction:
    """First integral of the nonlinear d'Alembert case: (du/dxi)^2 = quartic(u)."""

    c0: Fraction
    c1: Fraction
    c2: Fraction
    c3: Fraction
    c4: Fraction
    H: Fraction


def _read_value(raw, where: str) -> ReactionValue:
    if isinstance(raw, Fraction):
        return raw
    if isinstance(raw, str):
        if _RATIONAL_RE.match(raw):
            return Fraction(raw)
        if _SYMBOL_RE.match(raw):
            return raw
        raise SchemaError(f"{where}: string must be a symbol name or p/q rational, got {raw!r}")
    raise SchemaError(f"{where}: expected number or string, got {type(raw).__name__}")


def parse_model(text: str) -> HyperbolicPDE:
    """Parse a model JSON document, rejecting unknown keys.

    Numbers are read as exact decimals; strings are symbol names, except
    "p/q" strings which are exact rationals (for lossless round-trips of
    non-decimal coefficients).
    """
    try:
        doc = json.loads(text, parse_float=Fraction, parse_int=Fraction)
    except json.JSONDecodeError as exc:
        raise SchemaError(f"invalid JSON: {exc}") from None
    if not isinstance(doc, dict):
        raise SchemaError("top-level value must be an object")
    expected = {"tau", "A", "B", "kappa", "reaction"}
    if set(doc) != expected:
        missing = expected - set(doc)
        extra = set(doc) - expected
        raise SchemaError(f"keys mismatch: missing {sorted(missing)}, unknown {sorted(extra)}")
    fields = {}
    for name in ("tau", "A", "B", "kappa"):
        value = _read_value(doc[name], name)
        if isinstance(value, str):
            raise SchemaError(f"{name} must be numeric")
        fields[name] = value
    if not isinstance(doc["reaction"], dict):
        raise SchemaError("reaction must be an object")
    reaction = {}
    for key, raw in doc["reaction"].items():
        if key not in _EXPONENT_KEYS:
            raise SchemaError(f"reaction exponent key {key!r} not in {sorted(_EXPONENT_KEYS)}")
        reaction[_EXPONENT_KEYS[key]] = _read_value(raw, f"reaction[{key}]")
    return HyperbolicPDE(reaction=reaction, **fields)


def _write_value(value: ReactionValue):
    if isinstance(value, str):
        return value
    value = Fraction(value)
    if value.denominator == 1:
        return int(value)
    # exact decimal when the denominator is 2^a * 5^b, else "p/q"
    d = value.denominator
    for p in (2, 5):
        while d % p == 0:
            d //= p
    if d == 1:
        as_float = float(value)
        if Fraction(str(as_float)) == value:
            return as_float
    return frac_str(value)


def serialize_model(pde: HyperbolicPDE) -> str:
    """Inverse of :func:`parse_model` (exact round-trip)."""
    exponent_name = {v: k for k, v in _EXPONENT_KEYS.items()}
    doc = {
        "tau": _write_value(pde.tau),
        "A": _write_value(pde.A),
        "B": _write_value(pde.B),
        "kappa": _write_value(pde.kappa),
        "reaction": {exponent_name[nu]: _write_value(lam)
                     for nu, lam in sorted(pde.reaction.items())},
    }
    return json.dumps(doc, indent=2, sort_keys=True) + "\n"


def quartic_reduction(pde: HyperbolicPDE, v: Fraction, c0: Fraction) -> QuarticReduction:
    """Reduce tau*u_tt - kappa*u_xx = cubic(u) in the frame xi = x + v*t.

    One integration of H*u'' = f(u) gives (u')^2 = c0 + c1*u + ... + c4*u^4
    with H = tau*v^2 - kappa.  The integration constant c0 is the caller's.
    """
    if pde.A or pde.B:
        raise DomainError("quartic reduction requires A = B = 0")
    if not pde.is_numeric():
        raise DomainError("quartic reduction requires a fully numeric reaction")
    if pde.has_half_integer_reaction():
        raise DomainError("quartic reduction requires integer reaction exponents")
    v = Fraction(v)
    H = pde.tau * v * v - pde.kappa
    if H == 0:
        raise DegenerateFrame("tau*v^2 - kappa = 0")
    lam = {int(nu): Fraction(val) for nu, val in pde.reaction.items()}
    return QuarticReduction(
        c0=Fraction(c0),
        c1=2 * lam.get(0, Fraction(0)) / H,
        c2=lam.get(1, Fraction(0)) / H,
        c3=2 * lam.get(2, Fraction(0)) / (3 * H),
        c4=lam.get(3, Fraction(0)) / (2 * H),
        H=H,
    )
