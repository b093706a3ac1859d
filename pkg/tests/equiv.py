"""Shared generator for (PDE, ansatz, assignment) equivalence trials.

Produces a mix of genuine solutions (constant profiles with a tuned reaction
root, plus instances drawn from the closed-form families) and random
non-solutions, each with the pole list needed by the residual scan.
"""

import random
from fractions import Fraction as F

from twbench.catalog import FAMILIES
from twbench.model import HyperbolicPDE
from twbench.reducer import ExpAnsatz, solution_from_assignment

from conftest import rand_frac, rand_nonzero

INTEGER_EXPONENTS = (F(0), F(1), F(2), F(3))
ALL_EXPONENTS = (F(0), F(1, 2), F(1), F(3, 2), F(2), F(3))

SOLUTION_FAMILIES = ("Burgers-shock", "IVd", "IVe-b", "II", "IVe-c")


def random_trial(rng: random.Random):
    """One (pde, ansatz, assignment, solution) tuple plus a should-pass hint."""
    kind = rng.randrange(4)
    if kind == 0:
        return _constant_solution_trial(rng) + (True,)
    if kind == 1:
        return _family_trial(rng) + (True,)
    return _random_trial(rng) + (None,)


def _random_pde(rng, power):
    pool = ALL_EXPONENTS if power == 2 else INTEGER_EXPONENTS
    exponents = [nu for nu in pool if rng.random() < 0.5]
    reaction = {nu: rand_frac(rng, -3, 3, 2) for nu in exponents}
    while True:
        tau = rng.choice((F(0), abs(rand_frac(rng, -3, 3, 2))))
        A = rng.choice((F(0), abs(rand_frac(rng, -3, 3, 2))))
        B = rng.choice((F(0), abs(rand_frac(rng, -3, 3, 2))))
        kappa = rng.choice((F(0), abs(rand_frac(rng, -3, 3, 2))))
        if tau or A or B or kappa:
            return HyperbolicPDE(tau=tau, A=A, B=B, kappa=kappa, reaction=reaction)


def _random_ansatz(rng, power):
    m = rng.randint(0, 2)
    n = rng.randint(0, 2)
    return ExpAnsatz(a=tuple(f"a{i}" for i in range(m + 1)),
                     b=tuple(f"b{i}" for i in range(n + 1)),
                     power=power)


def _random_theta(rng, ansatz):
    theta = {}
    for name in ansatz.symbols():
        if name == "alpha":
            theta[name] = rand_nonzero(rng, -4, 4, 2)
        elif name == "b0":
            theta[name] = rand_nonzero(rng, -3, 3, 2)
        else:
            theta[name] = rand_frac(rng, -3, 3, 2)
    if all(theta.get(f"b{i}", F(0)) == 0 for i in range(ansatz.n + 1)):
        theta["b0"] = F(1)
    return theta


def _random_trial(rng):
    power = rng.choice((1, 2))
    pde = _random_pde(rng, power)
    ansatz = _random_ansatz(rng, power)
    theta = _random_theta(rng, ansatz)
    return pde, ansatz, theta, solution_from_assignment(ansatz, theta)


def _constant_solution_trial(rng):
    """u identically constant, with one reaction coefficient solved so f(u) = 0."""
    power = rng.choice((1, 2))
    pde = _random_pde(rng, power)
    ansatz = _random_ansatz(rng, power)
    theta = _random_theta(rng, ansatz)
    c_w = rand_nonzero(rng, -3, 3, 2)
    for i in range(ansatz.n + 1):
        if i > ansatz.m:
            theta[f"b{i}"] = F(0)  # w is constant only when the slots pair up
    if all(theta[f"b{i}"] == 0 for i in range(min(ansatz.m, ansatz.n) + 1)):
        theta["b0"] = F(1)
    for i in range(ansatz.m + 1):
        theta[f"a{i}"] = c_w * theta.get(f"b{i}", F(0)) if i <= ansatz.n else F(0)
    if all(theta[f"a{i}"] == 0 for i in range(ansatz.m + 1)):
        # numerator must not vanish identically; retry with a fresh draw
        return _constant_solution_trial(rng)
    reaction = dict(pde.reaction)
    if reaction:
        # solve the last exponent's coefficient so that f(c_w^power) = 0
        exps = sorted(reaction)
        target = exps[-1]
        rest = sum(lam * c_w ** int(2 * nu if power == 2 else nu)
                   for nu, lam in reaction.items() if nu != target)
        reaction[target] = -rest / c_w ** int(2 * target if power == 2 else target)
    pde = HyperbolicPDE(tau=pde.tau, A=pde.A, B=pde.B, kappa=pde.kappa, reaction=reaction)
    return pde, ansatz, theta, solution_from_assignment(ansatz, theta)


def _family_trial(rng):
    fam = FAMILIES[rng.choice(SOLUTION_FAMILIES)]
    fv = fam.draw(rng)
    inst = next(i for i in fam.instances(fv) if i.reading == fam.adopted)
    return inst.pde, inst.ansatz, inst.assignment, inst.solution
