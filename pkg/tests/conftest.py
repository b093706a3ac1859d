import random
from fractions import Fraction

import pytest

from twbench.symcore import ParamPoly


@pytest.fixture
def rng():
    return random.Random(20240811)


def rand_frac(rng, lo=-6, hi=6, den=3) -> Fraction:
    return Fraction(rng.randint(lo, hi), rng.randint(1, den))


def rand_nonzero(rng, lo=-6, hi=6, den=3) -> Fraction:
    while True:
        q = rand_frac(rng, lo, hi, den)
        if q:
            return q


def rand_poly(rng, names=("x", "y", "z"), max_terms=4, max_deg=3) -> ParamPoly:
    terms = {}
    for _ in range(rng.randint(0, max_terms)):
        exps = tuple(rng.randint(0, max_deg) for _ in names)
        terms[exps] = terms.get(exps, Fraction(0)) + rand_frac(rng)
    return ParamPoly(names, {e: c for e, c in terms.items() if c})
