"""
Unit tests for the brute-force joint simulation
"""

import numpy as np
import pytest

from hsthermo.core.errors import CapacityError, InvalidParameterError
from hsthermo.core.lindblad import trace_preservation_error
from hsthermo.core.linops import trace_distance
from hsthermo.core.models import QubitThermalModel, ancilla_plus_state, ancilla_state, probe_state
from hsthermo.core.oracle import (
    MAX_PROBES,
    build_joint,
    evolve_and_reduce,
    max_term_commutator,
    relative_commutator_norm,
)
from hsthermo.core.scheme import SchemeConfig, composed_output_state, output_state
from hsthermo.core.types import Superoperator


class TestBuildJoint:
    """Joint generator assembly"""

    def test_capacity(self, example_model):
        with pytest.raises(CapacityError) as excinfo:
            build_joint(example_model, MAX_PROBES + 1)
        assert excinfo.value.requested == 4
        assert excinfo.value.maximum == 3

    def test_needs_a_probe(self, example_model):
        with pytest.raises(InvalidParameterError):
            build_joint(example_model, 0)

    def test_layout(self, example_model):
        system = build_joint(example_model, 2)
        assert system.dims == (2, 2, 2)
        assert len(system.terms) == 3
        assert system.liouvillian.op_dim == 8
        assert system.initial.dim == 8
        total = sum((term.matrix for term in system.terms[1:]), system.terms[0].matrix)
        np.testing.assert_allclose(total, system.liouvillian.matrix)

    def test_trace_preserving(self, example_model):
        assert trace_preservation_error(build_joint(example_model, 2).liouvillian) < 1e-9

    def test_terms_commute(self, example_model):
        assert max_term_commutator(build_joint(example_model, 2)) < 1e-10

    def test_relative_commutator_norm(self):
        first = Superoperator(np.diag([1.0, 2.0, 3.0, 4.0]))
        second = Superoperator(np.eye(4)[[1, 0, 2, 3]])
        assert relative_commutator_norm(first, first) == 0.0
        assert relative_commutator_norm(first, second) > 0.0


class TestEvolveAndReduce:
    """Reduced ancilla state"""

    def test_zero_time_returns_initial(self, example_model):
        system = build_joint(example_model, 1)
        assert evolve_and_reduce(system, 0.0) is system.ancilla_initial

    def test_negative_time(self, example_model):
        with pytest.raises(InvalidParameterError):
            evolve_and_reduce(build_joint(example_model, 1), -0.5)

    @pytest.mark.parametrize("n_probes", [1, 2])
    def test_matches_closed_form(self, example_model, n_probes):
        simulated = evolve_and_reduce(build_joint(example_model, n_probes), 1.0)
        config = SchemeConfig(model=example_model, n_probes=n_probes)
        assert trace_distance(simulated, output_state(config)) < 1e-7
        assert trace_distance(simulated, composed_output_state(config)) < 1e-7

    @pytest.mark.slow
    def test_three_probes(self, example_model):
        simulated = evolve_and_reduce(build_joint(example_model, 3), 1.0)
        assert trace_distance(simulated, output_state(SchemeConfig(model=example_model, n_probes=3))) < 1e-7

    def test_populations_preserved(self, example_model):
        sigma = ancilla_state(0.8, 0.1)
        simulated = evolve_and_reduce(build_joint(example_model, 2, ancilla_initial=sigma), 1.0)
        np.testing.assert_allclose(np.diag(simulated.entries).real, [0.8, 0.2], atol=1e-10)

    def test_uncoupled_ancilla_only_dephases(self, example_model):
        simulated = evolve_and_reduce(build_joint(example_model, 1, coupled=False), 1.0)
        expected = 0.5 * np.exp(-2.0 * example_model.eta)
        assert simulated.entries[0, 1] == pytest.approx(expected, abs=1e-10)
        assert simulated.is_density_matrix(trace_tol=1e-10, herm_tol=1e-12)
        assert trace_distance(simulated, ancilla_plus_state()) > 0.0


def random_qubit_state(rng, builder):
    p = rng.uniform(0.1, 0.9)
    radius = 0.9 * np.sqrt(p * (1.0 - p)) * rng.uniform(0.0, 1.0)
    return builder(p, radius * np.exp(1j * rng.uniform(0.0, 2.0 * np.pi)))


class TestAgainstComposedMaps:
    """Joint simulation against the single-probe composition"""

    @pytest.mark.parametrize("kappa_s", [0.5, 2.0])
    def test_probe_dephasing_does_not_change_the_ancilla(self, example_model, kappa_s):
        model = example_model.with_(kappa_s_over_g=kappa_s)
        sigma = ancilla_state(0.6, 0.2 + 0.3j)
        simulated = evolve_and_reduce(build_joint(model, 2, ancilla_initial=sigma), 1.0)
        config = SchemeConfig(model=example_model, n_probes=2, ancilla_initial=sigma)
        assert trace_distance(simulated, composed_output_state(config)) < 1e-9

    @pytest.mark.parametrize("draw", range(20))
    def test_random_parameters(self, draw):
        rng = np.random.default_rng([11, draw])
        model = QubitThermalModel(
            theta=rng.uniform(0.5, 5.0),
            xi=rng.uniform(5.0, 500.0),
            eta=rng.uniform(0.0, 0.5),
            kappa_s_over_g=rng.uniform(0.0, 2.0),
        )
        n_probes = int(rng.integers(1, MAX_PROBES + 1))
        rho = random_qubit_state(rng, probe_state)
        sigma = random_qubit_state(rng, ancilla_state)
        simulated = evolve_and_reduce(build_joint(model, n_probes, rho, sigma), 1.0)
        config = SchemeConfig(model=model, n_probes=n_probes, ancilla_initial=sigma, probe_initial=rho)
        assert trace_distance(simulated, output_state(config)) < 1e-7
