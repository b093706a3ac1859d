"""Exact computer-algebra kernel.

Multivariate polynomials over exact rationals in named parameters, rational
functions in the travelling-wave exponential E = exp(alpha*xi), symbolic
differentiation d/dxi (which acts on E as alpha*E*d/dE), and exact or
floating-point evaluation.

Coefficients are ``fractions.Fraction`` throughout; floats enter only through
``evaluate``.
"""

from __future__ import annotations

import re
from fractions import Fraction
from typing import Iterable, Mapping, Union

Rational = Fraction

Number = Union[Fraction, int, float]

#: Name of the exponential variable E = exp(alpha*xi) inside ParamPoly.
E_NAME = "E"


class MissingParameter(KeyError):
    """Evaluation requested without a value for some parameter."""


class DivisionByZero(ArithmeticError):
    """Denominator vanishes (at a point, or identically)."""


def frac_str(q: Fraction) -> str:
    """Render a rational as ``p`` or ``p/q``."""
    q = Fraction(q)
    return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"


def parse_frac(text: str) -> Fraction:
    """Parse ``p``, ``p/q`` or a decimal literal into an exact rational."""
    return Fraction(text.strip())


def _coeff(value: Number) -> Fraction:
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, float):
        # exact decimal reading keeps 0.1 == 1/10
        return Fraction(str(value))
    raise TypeError(f"not a rational coefficient: {value!r}")


class ParamPoly:
    """Multivariate polynomial over Fraction in named parameters.

    Canonical form: variables sorted by name, no zero coefficients, variables
    with no occurrence dropped.  Term order for serialization is graded
    lexicographic (total degree first, then exponent vector), descending.
    """

    __slots__ = ("variables", "terms")

    def __init__(
        self,
        variables: Iterable[str] = (),
        terms: Mapping[tuple[int, ...], Number] | None = None,
    ):
        variables = tuple(variables)
        raw = dict(terms or {})
        # canonicalize: sorted variables, merged duplicates, zeros dropped
        order = sorted(range(len(variables)), key=lambda i: variables[i])
        svars = tuple(variables[i] for i in order)
        merged: dict[tuple[int, ...], Fraction] = {}
        for exps, c in raw.items():
            if len(exps) != len(variables):
                raise ValueError("exponent arity does not match variable list")
            key = tuple(exps[i] for i in order)
            c = _coeff(c)
            acc = merged.get(key, Fraction(0)) + c
            if acc:
                merged[key] = acc
            elif key in merged:
                del merged[key]
        # drop variables that never occur
        used = [i for i in range(len(svars)) if any(e[i] for e in merged)]
        if len(used) != len(svars):
            svars = tuple(svars[i] for i in used)
            merged = {tuple(e[i] for i in used): c for e, c in merged.items()}
        self.variables = svars
        self.terms = merged

    # -- constructors ------------------------------------------------------

    @staticmethod
    def const(value: Number) -> "ParamPoly":
        c = _coeff(value)
        return ParamPoly((), {(): c} if c else {})

    @staticmethod
    def var(name: str, power: int = 1) -> "ParamPoly":
        if power < 0:
            raise ValueError("negative power")
        if power == 0:
            return ParamPoly.const(1)
        return ParamPoly((name,), {(power,): Fraction(1)})

    @staticmethod
    def lift(value: "ParamPoly | str | Number") -> "ParamPoly":
        """Coerce a symbol name or number into a polynomial."""
        if isinstance(value, ParamPoly):
            return value
        if isinstance(value, str):
            return ParamPoly.var(value)
        return ParamPoly.const(value)

    # -- inspection --------------------------------------------------------

    def is_zero(self) -> bool:
        return not self.terms

    def is_constant(self) -> bool:
        return not self.variables

    def constant_value(self) -> Fraction:
        if self.variables:
            raise ValueError("not a constant polynomial")
        return self.terms.get((), Fraction(0))

    def degree(self, name: str | None = None) -> int:
        """Total degree, or degree in one variable; zero polynomial -> -1."""
        if not self.terms:
            return -1
        if name is None:
            return max(sum(e) for e in self.terms)
        if name not in self.variables:
            return 0
        i = self.variables.index(name)
        return max(e[i] for e in self.terms)

    # -- arithmetic --------------------------------------------------------

    def _aligned(self, other: "ParamPoly"):
        if self.variables == other.variables:
            return self.variables, self.terms, other.terms
        names = sorted(set(self.variables) | set(other.variables))
        pos = {n: i for i, n in enumerate(names)}

        def remap(poly: "ParamPoly"):
            idx = [pos[n] for n in poly.variables]
            out = {}
            for exps, c in poly.terms.items():
                key = [0] * len(names)
                for j, e in zip(idx, exps):
                    key[j] = e
                out[tuple(key)] = c
            return out

        return tuple(names), remap(self), remap(other)

    def __add__(self, other) -> "ParamPoly":
        other = ParamPoly.lift(other)
        names, a, b = self._aligned(other)
        out = dict(a)
        for k, c in b.items():
            acc = out.get(k, Fraction(0)) + c
            if acc:
                out[k] = acc
            elif k in out:
                del out[k]
        return ParamPoly(names, out)

    __radd__ = __add__

    def __neg__(self) -> "ParamPoly":
        p = ParamPoly.__new__(ParamPoly)
        p.variables = self.variables
        p.terms = {k: -c for k, c in self.terms.items()}
        return p

    def __sub__(self, other) -> "ParamPoly":
        return self + (-ParamPoly.lift(other))

    def __rsub__(self, other) -> "ParamPoly":
        return ParamPoly.lift(other) + (-self)

    def __mul__(self, other) -> "ParamPoly":
        other = ParamPoly.lift(other)
        names, a, b = self._aligned(other)
        out: dict[tuple[int, ...], Fraction] = {}
        for ka, ca in a.items():
            for kb, cb in b.items():
                k = tuple(x + y for x, y in zip(ka, kb))
                acc = out.get(k, Fraction(0)) + ca * cb
                if acc:
                    out[k] = acc
                elif k in out:
                    del out[k]
        return ParamPoly(names, out)

    __rmul__ = __mul__

    def __pow__(self, n: int) -> "ParamPoly":
        if n < 0:
            raise ValueError("negative power")
        result = ParamPoly.const(1)
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base if n > 1 else base
            n >>= 1
        return result

    def __eq__(self, other) -> bool:
        if not isinstance(other, ParamPoly):
            if isinstance(other, (int, Fraction)):
                other = ParamPoly.const(other)
            else:
                return NotImplemented
        return self.variables == other.variables and self.terms == other.terms

    def __hash__(self):
        return hash((self.variables, frozenset(self.terms.items())))

    # -- calculus and evaluation -------------------------------------------

    def diff(self, name: str) -> "ParamPoly":
        """Partial derivative with respect to one parameter."""
        if name not in self.variables:
            return ParamPoly.const(0)
        i = self.variables.index(name)
        out = {}
        for exps, c in self.terms.items():
            e = exps[i]
            if e:
                key = exps[:i] + (e - 1,) + exps[i + 1 :]
                out[key] = out.get(key, Fraction(0)) + c * e
        return ParamPoly(self.variables, out)

    def evaluate(self, assignment: Mapping[str, Number]) -> Number:
        """Evaluate at a point; exact iff every input value is exact."""
        values = []
        for name in self.variables:
            if name not in assignment:
                raise MissingParameter(name)
            values.append(assignment[name])
        total: Number = Fraction(0)
        for exps, c in self.terms.items():
            term: Number = c
            for v, e in zip(values, exps):
                if e:
                    term = term * v**e
            total = total + term
        return total

    def substitute(self, assignment: Mapping[str, Number]) -> "ParamPoly":
        """Substitute exact values for a subset of the variables."""
        keep = [i for i, n in enumerate(self.variables) if n not in assignment]
        vals = {i: _coeff(assignment[n]) for i, n in enumerate(self.variables) if n in assignment}
        out: dict[tuple[int, ...], Fraction] = {}
        for exps, c in self.terms.items():
            for i, v in vals.items():
                if exps[i]:
                    c = c * v ** exps[i]
            key = tuple(exps[i] for i in keep)
            acc = out.get(key, Fraction(0)) + c
            if acc:
                out[key] = acc
            elif key in out:
                del out[key]
        return ParamPoly(tuple(self.variables[i] for i in keep), out)

    def as_univariate(self, name: str) -> dict[int, "ParamPoly"]:
        """Split into coefficients of powers of one variable."""
        if name not in self.variables:
            return {0: self} if self.terms else {}
        i = self.variables.index(name)
        rest = self.variables[:i] + self.variables[i + 1 :]
        buckets: dict[int, dict] = {}
        for exps, c in self.terms.items():
            key = exps[:i] + exps[i + 1 :]
            buckets.setdefault(exps[i], {})[key] = c
        return {k: ParamPoly(rest, t) for k, t in sorted(buckets.items())}

    def coeff_list(self, name: str) -> list[Fraction]:
        """Dense coefficient list in one variable; requires all-rational coefficients."""
        parts = self.as_univariate(name)
        deg = max(parts) if parts else 0
        out = [Fraction(0)] * (deg + 1)
        for k, p in parts.items():
            out[k] = p.constant_value()
        return out

    def content(self) -> tuple[Fraction, tuple[int, ...]]:
        """Monomial content: gcd of coefficients and componentwise min exponent."""
        if not self.terms:
            return Fraction(0), (0,) * len(self.variables)
        num_g = 0
        den_l = 1
        for c in self.terms.values():
            num_g = _gcd(num_g, abs(c.numerator))
            den_l = den_l * c.denominator // _gcd(den_l, c.denominator)
        mins = tuple(min(e[i] for e in self.terms) for i in range(len(self.variables)))
        return Fraction(num_g, den_l), mins

    def divide_monomial(self, coeff: Fraction, exps: tuple[int, ...]) -> "ParamPoly":
        """Exact division by a monomial given in this polynomial's variables."""
        if not coeff:
            raise DivisionByZero("monomial coefficient is zero")
        out = {}
        for e, c in self.terms.items():
            key = tuple(a - b for a, b in zip(e, exps))
            if any(k < 0 for k in key):
                raise ValueError("monomial does not divide polynomial")
            out[key] = c / coeff
        return ParamPoly(self.variables, out)

    def primitive(self) -> "ParamPoly":
        """Divide out the rational content and normalize the leading sign."""
        if not self.terms:
            return self
        c, _ = self.content()
        if self._leading_coeff() < 0:
            c = -c
        return self.divide_monomial(c, (0,) * len(self.variables))

    def _leading_coeff(self) -> Fraction:
        key = max(self.terms, key=lambda e: (sum(e), e))
        return self.terms[key]

    # -- serialization -----------------------------------------------------

    def to_text(self) -> str:
        """Deterministic text form: graded-lex descending terms."""
        if not self.terms:
            return "0"
        pieces = []
        for exps in sorted(self.terms, key=lambda e: (sum(e), e), reverse=True):
            c = self.terms[exps]
            mono = "*".join(
                n if e == 1 else f"{n}^{e}"
                for n, e in zip(self.variables, exps)
                if e
            )
            if not mono:
                body = frac_str(abs(c))
            elif abs(c) == 1:
                body = mono
            else:
                body = f"{frac_str(abs(c))}*{mono}"
            pieces.append((c < 0, body))
        first_neg, first = pieces[0]
        text = ("-" if first_neg else "") + first
        for neg, body in pieces[1:]:
            text += (" - " if neg else " + ") + body
        return text

    def __repr__(self):
        return f"ParamPoly({self.to_text()})"


_FACTOR_RE = re.compile(r"^(?:(?P<num>-?\d+(?:/\d+)?)|(?P<var>[A-Za-z_]\w*)(?:\^(?P<exp>\d+))?)$")


def parse_poly_text(text: str) -> ParamPoly:
    """Parse the canonical text form produced by :meth:`ParamPoly.to_text`."""
    text = text.strip()
    if not text:
        raise ValueError("empty polynomial text")
    # tokenize into signed terms; '+'/'-' only appear as term separators
    norm = text.replace(" - ", " + -")
    result = ParamPoly.const(0)
    for chunk in norm.split(" + "):
        chunk = chunk.strip()
        if not chunk:
            raise ValueError(f"malformed polynomial text: {text!r}")
        neg = chunk.startswith("-")
        if neg:
            chunk = chunk[1:]
        term = ParamPoly.const(-1 if neg else 1)
        for factor in chunk.split("*"):
            m = _FACTOR_RE.match(factor.strip())
            if not m:
                raise ValueError(f"malformed factor {factor!r} in {text!r}")
            if m.group("num") is not None:
                term = term * ParamPoly.const(Fraction(m.group("num")))
            else:
                term = term * ParamPoly.var(m.group("var"), int(m.group("exp") or 1))
        result = result + term
    return result


def _gcd(a: int, b: int) -> int:
    while b:
        a, b = b, a % b
    return a


# -- rational functions in E -------------------------------------------------


def _poly_gcd_in_E(a: ParamPoly, b: ParamPoly) -> ParamPoly | None:
    """Monic gcd in E for polynomials with purely rational coefficients."""
    for p in (a, b):
        if any(v != E_NAME for v in p.variables):
            return None
    ca, cb = a.coeff_list(E_NAME), b.coeff_list(E_NAME)

    def strip(c):
        while c and not c[-1]:
            c.pop()
        return c

    ca, cb = strip(list(ca)), strip(list(cb))
    while cb:
        # remainder of ca by cb
        while len(ca) >= len(cb) and ca:
            q = ca[-1] / cb[-1]
            shift = len(ca) - len(cb)
            for i, c in enumerate(cb):
                ca[i + shift] -= q * c
            strip(ca)
        ca, cb = cb, ca
    if not ca:
        return ParamPoly.const(0)
    lead = ca[-1]
    return ParamPoly((E_NAME,), {(k,): c / lead for k, c in enumerate(ca) if c})


def _poly_div_in_E(a: ParamPoly, d: ParamPoly) -> ParamPoly:
    """Exact division in E for rationally-coefficiented polynomials."""
    ca = list(a.coeff_list(E_NAME))
    cd = d.coeff_list(E_NAME)
    out = [Fraction(0)] * (len(ca) - len(cd) + 1)
    while ca and len(ca) >= len(cd):
        while ca and not ca[-1]:
            ca.pop()
        if len(ca) < len(cd):
            break
        q = ca[-1] / cd[-1]
        shift = len(ca) - len(cd)
        out[shift] = q
        for i, c in enumerate(cd):
            ca[i + shift] -= q * c
    return ParamPoly((E_NAME,), {(k,): c for k, c in enumerate(out) if c})


class ExpRational:
    """Rational function in E = exp(alpha*xi) with ParamPoly numerator/denominator.

    Kept gcd-reduced in E: common E powers and common monomial content are
    always cancelled; a full univariate gcd is taken when both sides have
    purely rational coefficients.  The denominator's leading sign is
    normalized positive for deterministic serialization.
    """

    __slots__ = ("num", "den")

    def __init__(self, num: ParamPoly, den: ParamPoly | None = None, *, reduce: bool = True):
        den = ParamPoly.const(1) if den is None else den
        if den.is_zero():
            raise DivisionByZero("denominator is identically zero")
        if reduce:
            num, den = _reduce_pair(num, den)
        self.num = num
        self.den = den

    @staticmethod
    def lift(value) -> "ExpRational":
        if isinstance(value, ExpRational):
            return value
        return ExpRational(ParamPoly.lift(value), reduce=False)

    def is_zero(self) -> bool:
        return self.num.is_zero()

    def __add__(self, other) -> "ExpRational":
        other = ExpRational.lift(other)
        if self.den == other.den:
            return ExpRational(self.num + other.num, self.den)
        return ExpRational(self.num * other.den + other.num * self.den, self.den * other.den)

    __radd__ = __add__

    def __neg__(self) -> "ExpRational":
        return ExpRational(-self.num, self.den, reduce=False)

    def __sub__(self, other) -> "ExpRational":
        return self + (-ExpRational.lift(other))

    def __rsub__(self, other) -> "ExpRational":
        return ExpRational.lift(other) + (-self)

    def __mul__(self, other) -> "ExpRational":
        other = ExpRational.lift(other)
        return ExpRational(self.num * other.num, self.den * other.den)

    __rmul__ = __mul__

    def __truediv__(self, other) -> "ExpRational":
        other = ExpRational.lift(other)
        return ExpRational(self.num * other.den, self.den * other.num)

    def __pow__(self, n: int) -> "ExpRational":
        if n < 0:
            return ExpRational(self.den**-n, self.num**-n)
        return ExpRational(self.num**n, self.den**n)

    def __eq__(self, other) -> bool:
        if not isinstance(other, ExpRational):
            try:
                other = ExpRational.lift(other)
            except TypeError:
                return NotImplemented
        return (self.num * other.den - other.num * self.den).is_zero()

    def __hash__(self):
        return hash((self.num, self.den))

    def differentiate_xi(self, alpha: "str | Number" = "alpha") -> "ExpRational":
        """d/dxi under dE/dxi = alpha*E (quotient rule)."""
        dn = poly_dxi(self.num, alpha)
        dd = poly_dxi(self.den, alpha)
        return ExpRational(dn * self.den - self.num * dd, self.den * self.den)

    def evaluate(self, assignment: Mapping[str, Number], E_value: Number | None = None) -> Number:
        env = dict(assignment)
        if E_value is not None:
            env[E_NAME] = E_value
        n = self.num.evaluate(env)
        d = self.den.evaluate(env)
        if d == 0:
            raise DivisionByZero("denominator vanishes at the evaluation point")
        return n / d

    def to_text(self) -> str:
        if self.den == ParamPoly.const(1):
            return self.num.to_text()
        return f"({self.num.to_text()}) / ({self.den.to_text()})"

    def __repr__(self):
        return f"ExpRational({self.to_text()})"


def _reduce_pair(num: ParamPoly, den: ParamPoly) -> tuple[ParamPoly, ParamPoly]:
    if num.is_zero():
        return ParamPoly.const(0), ParamPoly.const(1)
    # common monomial content (covers common E powers as well)
    cn, en = num.content()
    cd, ed = den.content()
    names = sorted(set(num.variables) | set(den.variables))

    def min_exps(poly, exps):
        lookup = dict(zip(poly.variables, exps))
        return tuple(lookup.get(n, 0) for n in names)

    g_exps = tuple(min(a, b) for a, b in zip(min_exps(num, en), min_exps(den, ed)))
    g_coeff = Fraction(_gcd(cn.numerator * cd.denominator, cd.numerator * cn.denominator),
                       cn.denominator * cd.denominator)

    def strip(poly):
        exps = tuple(g_exps[names.index(n)] for n in poly.variables)
        return poly.divide_monomial(g_coeff, exps)

    if g_coeff != 1 or any(g_exps):
        num, den = strip(num), strip(den)
    # univariate gcd when everything else is rational
    g = _poly_gcd_in_E(num, den)
    if g is not None and g.degree(E_NAME) > 0:
        num = _poly_div_in_E(num, g)
        den = _poly_div_in_E(den, g)
    if den._leading_coeff() < 0:
        num, den = -num, -den
    return num, den


def poly_dxi(p: ParamPoly, alpha: "str | Number" = "alpha") -> ParamPoly:
    """Apply d/dxi = alpha*E*d/dE to a polynomial: E^k picks up a factor k*alpha."""
    if E_NAME not in p.variables:
        return ParamPoly.const(0)
    i = p.variables.index(E_NAME)
    scaled = ParamPoly(p.variables, {e: c * e[i] for e, c in p.terms.items() if e[i]})
    return scaled * ParamPoly.lift(alpha)


def differentiate_xi(f: "ExpRational | ParamPoly", alpha: "str | Number" = "alpha") -> ExpRational:
    """d/dxi of a rational function in E under dE/dxi = alpha*E."""
    return ExpRational.lift(f).differentiate_xi(alpha)


def evaluate(f: "ParamPoly | ExpRational", assignment: Mapping[str, Number],
             E_value: Number | None = None) -> Number:
    """Evaluate a polynomial or rational function at a point.

    Exact Fraction result when every input is exact; float otherwise.
    """
    if isinstance(f, ExpRational):
        return f.evaluate(assignment, E_value)
    env = dict(assignment)
    if E_value is not None:
        env[E_NAME] = E_value
    return f.evaluate(env)
