import math

import numpy as np
import pytest

from qcirculator.correlations import (
    CORRELATION_PHOTON_NUMBER,
    CorrelationTrace,
    DarkPortError,
    correlation_epsilon,
    correlation_model,
    default_tau_grid,
    g2,
    g2_zero,
    output_operator,
)
from qcirculator.model import AtomState, ModelKind, ResonatorMode, SystemParams
from qcirculator.observables import solve_model, transmission_matrix
from qcirculator.quantum import expect

from conftest import weak_drive_g2_zero

ROUTES = [(1, 2), (1, 4), (3, 4), (3, 2)]


@pytest.fixture(scope="module")
def traces():
    p = SystemParams()
    tau = np.linspace(0.0, 12.0 / p.kappa_tot, 49)
    return {(i, o): g2(correlation_model(p, i), o, tau) for i, o in ROUTES}


def test_probe_sets_photon_number(defaults):
    eps = correlation_epsilon(defaults)
    m = correlation_model(defaults.replace(atom_state=AtomState.NO_ATOM), 1)
    assert m.epsilon == pytest.approx(eps)
    a = m.mode_op(ResonatorMode.CCW)
    n = expect(a.dag() @ a, solve_model(m)).real
    assert n == pytest.approx(CORRELATION_PHOTON_NUMBER, rel=1e-6)


def test_frozen_zero_delay_values(traces):
    expected = {(1, 2): 0.0916, (1, 4): 3.073, (3, 4): 0.744, (3, 2): 3.071}
    for route, value in expected.items():
        assert traces[route].g2_zero == pytest.approx(value, abs=2e-3)


def test_statistics_character(traces):
    # transmitted light of a driven strong mode is antibunched, the cross port bunched
    assert traces[1, 2].g2_zero < 1 < traces[1, 4].g2_zero
    assert traces[1, 2].g2_zero < traces[3, 4].g2_zero < 1
    assert traces[3, 2].g2_zero > 1


@pytest.mark.parametrize("route", ROUTES)
def test_matches_weak_drive_perturbation(traces, route):
    m = correlation_model(SystemParams(), route[0])
    assert traces[route].g2_zero == pytest.approx(weak_drive_g2_zero(m, route[1]), rel=0.02)


def test_zero_delay_consistent(traces):
    m = correlation_model(SystemParams(), 1)
    assert g2_zero(m, 4) == pytest.approx(traces[1, 4].g2_zero, rel=1e-12)
    assert traces[1, 4].g2[0] == pytest.approx(traces[1, 4].g2_zero, rel=1e-9)


def test_traces_settle(traces):
    for tr in traces.values():
        tail = tr.g2[tr.tau_grid * SystemParams().kappa_tot >= 10.0]
        assert np.all(np.abs(tail - 1) < 0.05)
        assert tr.settled(0.05)


def test_probe_is_weak_enough():
    p = SystemParams()
    eps = correlation_epsilon(p)
    for i, o in ROUTES:
        full = g2_zero(correlation_model(p, i), o)
        half = g2_zero(correlation_model(p, i, eps / 2), o)
        assert abs(full / half - 1) < 0.01


@pytest.mark.parametrize("route", ROUTES)
def test_normalisation_is_transmission(defaults, route):
    i, o = route
    t = transmission_matrix(defaults)[i, o]
    same = g2(correlation_model(defaults, i, epsilon=defaults.epsilon), o, [0.0])
    assert same.normalization / defaults.epsilon**2 == pytest.approx(t, rel=1e-6)
    m = correlation_model(defaults, i)
    probe = g2(m, o, [0.0])
    assert probe.normalization / abs(m.epsilon) ** 2 == pytest.approx(t, rel=1e-2)


class TestCoherentLimit:
    @pytest.mark.parametrize(
        "route, changes",
        [((1, 4), {}), ((3, 4), {}), ((3, 2), {}), ((1, 2), {"kappa_a": 2 * math.pi * 15.0})],
    )
    def test_no_atom_gives_coherent_light(self, defaults, route, changes):
        p = defaults.replace(g=0.0, **changes)
        tr = g2(correlation_model(p, route[0]), route[1], default_tau_grid(p, 9))
        np.testing.assert_allclose(tr.g2, 1.0, atol=1e-6)

    def test_dark_port_refused(self, defaults):
        # critical coupling with no atom: nothing leaves port 2
        with pytest.raises(DarkPortError):
            g2(correlation_model(defaults.replace(g=0.0), 1), 2)


class TestReciprocalRoutes:
    def test_equal_fibers(self):
        p = SystemParams.from_mhz(kappa_a=8.5, kappa_b=8.5)
        tau = default_tau_grid(p, 11)
        a = g2(correlation_model(p, 1), 4, tau)
        b = g2(correlation_model(p, 3), 2, tau)
        np.testing.assert_allclose(a.g2, b.g2, atol=1e-10)

    def test_matched_intracavity_drive(self, defaults):
        tau = default_tau_grid(defaults, 11)
        eps = correlation_epsilon(defaults)
        a = g2(correlation_model(defaults, 1, eps), 4, tau)
        b = g2(correlation_model(defaults, 3, eps * math.sqrt(defaults.kappa_a / defaults.kappa_b)), 2, tau)
        np.testing.assert_allclose(a.g2, b.g2, atol=1e-10)


class TestTraceObject:
    def test_symmetric_extension(self):
        tr = CorrelationTrace(1, 2, np.array([0.0, 1.0, 2.0]), np.array([0.5, 0.8, 1.0]), 0.5, 1.0)
        tau, vals = tr.symmetric()
        np.testing.assert_array_equal(tau, [-2, -1, 0, 1, 2])
        np.testing.assert_array_equal(vals, [1.0, 0.8, 0.5, 0.8, 1.0])

    def test_output_operator_offset(self, defaults):
        m = correlation_model(defaults, 1)
        assert output_operator(m, 2).offset == m.epsilon
        assert output_operator(m, 4).offset == 0

    def test_unreachable_port_in_simplified_model(self, defaults):
        m = correlation_model(defaults, 1, kind=ModelKind.SIMPLIFIED)
        with pytest.raises(ValueError):
            output_operator(m, 1)
