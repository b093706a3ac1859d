import math
import random
from fractions import Fraction as F

import numpy as np
import pytest
from scipy.optimize import brentq

from twbench.hydro import (
    CORRECTED_OMEGA0,
    PRINTED_OMEGA0,
    G_of_R,
    G_prime,
    HydroModel,
    NoSecondRoot,
    OutOfDomain,
    P_of_R,
    PhaseState,
    critical_points,
    explicit_homoclinic,
    flow,
    hamiltonian,
    homoclinic_profile,
    reference_instance,
    parse_hydro_model,
    quadrature_integrand,
    saddle_angle,
    saddle_level,
    second_root,
    separatrix,
    turning_point,
)
from twbench.model import SchemaError
from twbench.symcore import ParamPoly

R2_EXACT = (-1 + math.sqrt(17.0)) / 2
R3_EXACT = 2 * math.sqrt(2.0) - 1


@pytest.fixture(scope="module")
def worked():
    return reference_instance()


class TestModelConstruction:
    def test_derived_quantities_exact(self, worked):
        assert worked.E == F(5, 4)
        assert worked.C1 == 1
        assert worked.theorem_holds()

    def test_nu_exclusions(self):
        for nu in (F(-1), F(-2), F(-5, 2)):
            with pytest.raises(OutOfDomain):
                HydroModel(nu=nu, beta=F(1), sigma=F(1), D=F(1), R1=F(1))

    def test_positivity(self):
        with pytest.raises(OutOfDomain):
            HydroModel(nu=F(0), beta=F(-1), sigma=F(1), D=F(1), R1=F(1))

    def test_json_round_trip(self, worked):
        text = '{"nu":0,"beta":0.5,"sigma":1,"D":1,"R1":1}'
        assert parse_hydro_model(text) == worked
        with pytest.raises(SchemaError):
            parse_hydro_model('{"nu":0,"beta":0.5,"sigma":1,"D":1}')
        with pytest.raises(SchemaError):
            parse_hydro_model('{"nu":0,"beta":0.5,"sigma":1,"D":1,"R1":1,"E":2}')

    def test_E_never_an_input(self):
        # E follows from the asymptotic state for every model
        m = HydroModel(nu=F(1), beta=F(2), sigma=F(3), D=F(2), R1=F(1, 2))
        assert m.E == m.D**2 / m.R1 + m.beta * m.R1**3 / 3


class TestCriticalPoints:
    def test_P_at_R1_is_zero(self, worked):
        assert P_of_R(worked, F(1)) == 0
        # P(R) = R^3/4 - 5R/4 + 1 on the worked instance
        assert P_of_R(worked, F(2)) == F(8, 4) - F(10, 4) + 1

    def test_second_root_value(self, worked):
        assert abs(second_root(worked) - R2_EXACT) < 1e-12

    def test_kinds(self, worked):
        report = critical_points(worked)
        kinds = [(round(R, 9), kind) for R, kind, _ in report.points]
        assert kinds[0] == (1.0, "saddle")
        assert kinds[1][1] == "center"
        assert abs(report.R2 - R2_EXACT) < 1e-12
        assert report.Psi_positive

    def test_saddle_eigenvalues_real_pair(self, worked):
        (r1, kind, eig), _ = critical_points(worked).points
        assert kind == "saddle"
        assert eig[0] > 0 > eig[1]
        assert abs(eig[0] - math.tan(saddle_angle(worked))) < 1e-12

    def test_no_second_root(self):
        # D^2 < beta*R1^(nu+3) violates the theorem precondition
        bad = HydroModel(nu=F(0), beta=F(8), sigma=F(1), D=F(1), R1=F(1))
        assert not bad.theorem_holds()
        with pytest.raises(NoSecondRoot):
            second_root(bad)


class TestHamiltonian:
    def test_saddle_level_exact(self, worked):
        assert hamiltonian(worked, (F(1), F(0))) == F(7, 8)
        assert saddle_level(worked) == F(7, 8)

    def test_even_in_Y(self, worked):
        rng = random.Random(1)
        for _ in range(50):
            R = F(rng.randint(1, 40), 10)
            Y = F(rng.randint(-30, 30), 10)
            assert hamiltonian(worked, (R, Y)) == hamiltonian(worked, (R, -Y))

    def test_center_level(self, worked):
        r2 = second_root(worked)
        assert abs(float(hamiltonian(worked, (r2, 0.0))) - 0.818300) < 1e-6
        assert abs(float(G_of_R(worked, r2)) - 0.056700) < 1e-6

    def test_phase_state_domain(self):
        with pytest.raises(OutOfDomain):
            PhaseState(R=-1.0, Y=0.0)


class TestGFunction:
    def test_G_at_R1_zero_exactly(self, worked):
        assert G_of_R(worked, F(1)) == 0

    def test_G_at_three_halves(self, worked):
        assert G_of_R(worked, F(3, 2)) == F(7, 128)

    def test_Gprime_identity_symbolic_integer_nu(self):
        # G'(R) = -2*R^nu*P(R) as exact polynomials for integer nu
        for nu in (0, 1, 2):
            m = HydroModel(nu=F(nu), beta=F(1, 2), sigma=F(1), D=F(2), R1=F(1))
            R = ParamPoly.var("R")
            E_val, D2 = m.E, m.D**2
            G = (ParamPoly.const(saddle_level(m))
                 + ParamPoly.const(2 * E_val / (nu + 2)) * R ** (nu + 2)
                 - ParamPoly.const(2 * D2 / (nu + 1)) * R ** (nu + 1)
                 - ParamPoly.const(m.beta / (nu + 2) ** 2) * R ** (2 * nu + 4))
            P = (ParamPoly.const(m.beta / (nu + 2)) * R ** (nu + 3)
                 - ParamPoly.const(E_val) * R + ParamPoly.const(D2))
            assert G.diff("R") == ParamPoly.const(-2) * R**nu * P

    def test_Gprime_identity_numeric_fractional_nu(self):
        m = HydroModel(nu=F(1, 2), beta=F(1, 3), sigma=F(2), D=F(2), R1=F(1))
        for R in (0.7, 1.2, 2.9):
            step = 1e-6
            numeric = (float(G_of_R(m, R + step)) - float(G_of_R(m, R - step))) / (2 * step)
            assert abs(numeric - G_prime(m, R)) < 1e-7 * max(1.0, abs(numeric))


class TestSeparatrix:
    def test_endpoints_vanish(self, worked):
        r3 = turning_point(worked)
        assert separatrix(worked, float(worked.R1)) == (0.0, -0.0)
        yp, ym = separatrix(worked, r3)
        assert abs(yp) < 1e-7 and abs(ym) < 1e-7

    def test_value_at_center(self, worked):
        yp, ym = separatrix(worked, second_root(worked))
        assert abs(yp - 0.152489) < 1e-6
        assert ym == -yp

    def test_angle(self, worked):
        assert abs(saddle_angle(worked) - math.atan(1 / math.sqrt(2.0))) < 1e-12

    def test_out_of_domain(self, worked):
        with pytest.raises(OutOfDomain):
            separatrix(worked, 5.0)


class TestTurningPoint:
    def test_value(self, worked):
        assert abs(turning_point(worked) - R3_EXACT) < 1e-12

    def test_simple_root_straddle(self, worked):
        r3 = turning_point(worked)
        assert float(G_of_R(worked, r3 - 1e-8)) > 0 > float(G_of_R(worked, r3 + 1e-8))

    def test_exceeds_center(self, worked):
        assert turning_point(worked) > second_root(worked)


class TestFlow:
    def test_center_is_stationary(self, worked):
        r2 = second_root(worked)
        traj = flow(worked, (r2, 0.0), (0.0, 100.0), rel_tol=1e-12)
        assert np.max(np.abs(traj.R - r2)) < 1e-12
        assert np.max(np.abs(traj.Y)) < 1e-12

    def test_energy_conservation(self, worked):
        traj = flow(worked, (1.7, 0.0), (0.0, 100.0), rel_tol=1e-10)
        drift = np.max(np.abs(traj.H - traj.H[0])) / max(1.0, abs(float(traj.H[0])))
        assert drift < 1e-8
        assert traj.status == "completed"

    def test_level_set_equivalence(self, worked):
        # every accepted step of any trajectory lies on one level set of H
        for start in ((1.2, 0.1), (1.75, 0.0), (1.05, 0.02)):
            traj = flow(worked, start, (0.0, 50.0), rel_tol=1e-11)
            spread = np.max(traj.H) - np.min(traj.H)
            assert spread < 1e-9 * max(1.0, abs(float(traj.H[0])))

    def test_boundary_event(self):
        # nu in (-2, -1): the approach to the R = 0 axis is integrable, so the
        # trajectory reaches the floor and halts with a boundary event
        m = HydroModel(nu=F(-3, 2), beta=F(1), sigma=F(1), D=F(1), R1=F(1))
        traj = flow(m, (1.0, -0.5), (0.0, 50.0), rel_tol=1e-8)
        assert traj.status == "boundary"
        assert traj.R[-1] <= 1.01e-9

    def test_stiffness_failure_on_singular_axis(self):
        # for nu > -1 the axis is non-integrable: step underflow is reported
        from twbench.hydro import StiffnessFailure
        m = HydroModel(nu=F(-1, 2), beta=F(1), sigma=F(1), D=F(1), R1=F(1))
        with pytest.raises(StiffnessFailure):
            flow(m, (1.0, -1.0), (0.0, 50.0), rel_tol=1e-8)

    def test_separatrix_launch_tracks_curve(self, worked):
        eps = 1e-6
        ang = saddle_angle(worked)
        traj = flow(worked, (1.0 + eps, eps * math.tan(ang)), (0.0, 40.0), rel_tol=1e-12)
        r3 = turning_point(worked)
        worst = 0.0
        for w in np.linspace(2.0, 14.0, 120):
            R, Y = traj.dense(w)
            if R < r3 - 1e-3 and Y > 0:
                worst = max(worst, abs(Y - separatrix(worked, float(R))[0]))
        assert worst < 1e-5

    def test_periodic_orbits_close(self, worked):
        for r0 in (1.60, 1.70, 1.80):
            traj = flow(worked, (r0, 0.0), (0.0, 40.0), rel_tol=1e-11)
            sgn = np.sign(traj.Y)
            crossings = [i for i in np.where(sgn[:-1] * sgn[1:] < 0)[0]
                         if traj.omega[i] > 1e-3]
            w_full = brentq(lambda w: traj.dense(w)[1],
                            traj.omega[crossings[1]], traj.omega[crossings[1] + 1],
                            xtol=1e-14)
            r_return = float(traj.dense(w_full)[0])
            assert r_return > second_root(worked)
            assert abs(r_return - r0) < 1e-6


@pytest.fixture(scope="module")
def profile(worked):
    return homoclinic_profile(worked, n=400)


@pytest.fixture(scope="module")
def launched(worked):
    eps = 1e-6
    ang = saddle_angle(worked)
    traj = flow(worked, (1.0 + eps, eps * math.tan(ang)), (0.0, 40.0), rel_tol=1e-12)
    crossings = np.where(np.sign(traj.Y[:-1]) * np.sign(traj.Y[1:]) < 0)[0]
    w_peak = brentq(lambda w: traj.dense(w)[1],
                    traj.omega[crossings[0]], traj.omega[crossings[0] + 1],
                    xtol=1e-14)
    return traj, w_peak


class TestHomoclinic:
    def test_peak_reaches_R3(self, worked, launched):
        traj, w_peak = launched
        assert abs(float(traj.dense(w_peak)[0]) - turning_point(worked)) < 1e-9

    def test_quadrature_matches_flow(self, worked, profile, launched):
        omega, R = profile
        traj, w_peak = launched
        mask = (omega > 0) & (w_peak + omega <= traj.omega[-1])
        flow_R = traj.dense(w_peak + omega[mask])[0]
        assert np.max(np.abs(flow_R - R[mask])) < 1e-6

    def test_flow_even_about_peak(self, launched):
        traj, w_peak = launched
        offsets = np.linspace(0.1, min(w_peak - 0.5, traj.omega[-1] - w_peak), 80)
        fwd = traj.dense(w_peak + offsets)[0]
        back = traj.dense(w_peak - offsets)[0]
        assert np.max(np.abs(fwd - back)) < 1e-8

    def test_integrand_value(self, worked):
        assert abs(quadrature_integrand(worked, 1.5)
                   - 1.5 / math.sqrt(7.0 / 128.0)) < 1e-12

    def test_profile_normalization_and_tail(self, worked, profile):
        omega, R = profile
        assert omega[0] == 0.0 and abs(R[0] - turning_point(worked)) < 1e-12
        assert np.all(np.diff(omega) > 0)
        assert np.all(np.diff(R) < 0)
        r_at_30 = float(np.interp(30.0, omega, R))
        assert 0 < r_at_30 - 1 < 1e-3

    def test_matches_closed_form(self, worked, profile):
        omega, R = profile
        for i in range(1, len(R) - 1, 9):
            # profile omega >= 0 is the mirror of the closed form's branch
            assert abs(omega[i] + explicit_homoclinic(float(R[i])).corrected) < 1e-9


class TestExplicitHomoclinic:
    def test_corrected_derivative_matches_integrand(self, worked):
        r3 = R3_EXACT
        for R in np.linspace(1.01, r3 - 0.01, 51):
            h = min(R - 1.0, r3 - R) * 1e-3
            d = (-explicit_homoclinic(R + 2 * h).corrected
                 + 8 * explicit_homoclinic(R + h).corrected
                 - 8 * explicit_homoclinic(R - h).corrected
                 + explicit_homoclinic(R - 2 * h).corrected) / (12 * h)
            integ = quadrature_integrand(worked, float(R))
            assert abs(d - integ) / integ < 1e-9

    def test_printed_derivative_discrepancy_at_midpoint(self, worked):
        R, h = 1.5, 1e-5
        d = (-explicit_homoclinic(R + 2 * h).printed
             + 8 * explicit_homoclinic(R + h).printed
             - 8 * explicit_homoclinic(R - h).printed
             + explicit_homoclinic(R - 2 * h).printed) / (12 * h)
        integ = quadrature_integrand(worked, R)
        assert 0.010 <= abs(d - integ) / integ <= 0.020

    def test_arcsine_term_at_peak(self):
        # the arcsine argument reaches exactly 1 at R3, contributing sqrt(2)*pi
        assert abs((R3_EXACT + 1.0) / (2.0 * math.sqrt(2.0)) - 1.0) < 1e-15
        assert abs(2 * math.sqrt(2.0) * math.asin(1.0) - math.sqrt(2.0) * math.pi) < 1e-15

    def test_normalized_at_peak(self):
        eh = explicit_homoclinic(R3_EXACT)
        assert abs(eh.corrected) < 1e-12
        assert abs(eh.printed) < 1e-12

    def test_printed_omega0_is_not_peak_centering(self):
        # the printed omega0 differs from the peak value of the printed
        # antiderivative by (1 - sqrt(2)/2)*log(2)
        gap = CORRECTED_OMEGA0 - PRINTED_OMEGA0
        assert abs(gap - (0.5 * math.sqrt(2.0) + 1.0) * math.log(2.0)) < 1e-12

    def test_domain(self):
        with pytest.raises(OutOfDomain):
            explicit_homoclinic(0.5)
        with pytest.raises(OutOfDomain):
            explicit_homoclinic(1.9)
        other = HydroModel(nu=F(1), beta=F(1), sigma=F(1), D=F(2), R1=F(1))
        with pytest.raises(OutOfDomain):
            explicit_homoclinic(1.5, model=other)


class TestOtherInstances:
    """The machinery is not specific to the worked instance."""

    @pytest.mark.parametrize("kwargs", [
        dict(nu=F(1), beta=F(1, 3), sigma=F(2), D=F(2), R1=F(1)),
        dict(nu=F(1, 2), beta=F(1, 4), sigma=F(1), D=F(3, 2), R1=F(4, 5)),
    ])
    def test_full_pipeline(self, kwargs):
        m = HydroModel(**kwargs)
        assert m.theorem_holds()
        r2, r3 = second_root(m), turning_point(m)
        assert float(m.R1) < r2 < r3
        yp, _ = separatrix(m, 0.5 * (r2 + r3))
        assert yp > 0
        omega, R = homoclinic_profile(m, n=120)
        assert np.all(np.diff(omega) > 0)
        traj = flow(m, (0.5 * (r2 + r3), 0.0), (0.0, 30.0), rel_tol=1e-10)
        drift = np.max(np.abs(traj.H - traj.H[0])) / max(1.0, abs(float(traj.H[0])))
        assert drift < 1e-8
