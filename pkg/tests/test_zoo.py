"""Concrete models: pinned examples, declared rows, registry."""

import math

import numpy as np
import pytest

from ontomodels import framework as fw
from ontomodels.engines import parse_engine
from ontomodels.framework import MeasContext, UnsupportedDimensionError
from ontomodels.hilbert import basis_state, orthogonal_qubit, random_state, state
from ontomodels.rng import stream
from ontomodels.zoo import (
    TABLE_ORDER,
    UnknownModelError,
    get_model,
    make_bb,
    make_bell2,
    make_ks,
    make_ws,
    table_models,
)

QUAD = parse_engine("quad:17")
CLOSED = parse_engine("closed")


class TestRegistry:
    def test_known_names(self):
        assert get_model("ks").name == "ks"
        assert get_model("bb:3").dim == 3
        assert get_model("bb").dim == 2
        assert get_model("ws").dim == 3
        assert get_model("ws:4").dim == 4

    def test_fixed_dim_models_reject_other_dims(self):
        with pytest.raises(UnsupportedDimensionError):
            get_model("ks:3")
        with pytest.raises(UnsupportedDimensionError):
            get_model("bell2:3")

    @pytest.mark.parametrize("bad", ["", "kss", "bb:x", "bb:1", "bb:2:3"])
    def test_rejects_malformed(self, bad):
        with pytest.raises((UnknownModelError, UnsupportedDimensionError)):
            get_model(bad)

    def test_table_has_seven_rows(self):
        models = table_models()
        assert [m.name.split(":")[0] for m in models] == list(TABLE_ORDER)
        assert sum(1 for m in models if m.implemented) == 4

    def test_stubs_cannot_run(self):
        stub = get_model("aaronson")
        assert not stub.implemented
        with pytest.raises(NotImplementedError):
            stub.prepare(basis_state(2, 0))


class TestBB:
    def test_prediction_is_born_exactly(self):
        bb = make_bb(4)
        rng = np.random.default_rng(1)
        psi, phi = random_state(4, rng), random_state(4, rng)
        est = fw.predict_probability(bb, psi, None, phi, None, CLOSED)
        assert est.value == pytest.approx(fw.born_probability(phi, psi), abs=1e-12)

    def test_overlap_zero_for_distinct_states(self):
        est = fw.overlap_fraction(make_bb(2), state(1, 1), basis_state(2, 0), CLOSED)
        assert est.value == 0.0

    def test_certainty_exact_on_the_single_atom(self):
        res = fw.check_quantum_certainty(make_bb(3), random_state(3, np.random.default_rng(2)))
        assert res.passed and res.n_samples == 1


class TestKS:
    def test_density_normalized_for_random_states(self):
        ks = make_ks()
        rng = np.random.default_rng(3)
        for _ in range(25):
            mu = ks.prepare(random_state(2, rng))
            assert QUAD.integrate(mu.density, mu.split_axes) == pytest.approx(
                1.0, abs=1e-6
            )

    def test_sampler_lands_in_support(self):
        ks = make_ks()
        mu = ks.prepare(state(1, 1j))
        pts = mu.sampler(stream(7, "kstest"), 5000)
        assert np.all(mu.support(pts))
        assert np.allclose(np.linalg.norm(pts, axis=1), 1.0, atol=1e-12)

    def test_aligned_and_antipodal_probabilities(self):
        ks = make_ks()
        psi = state(1, 1)
        opp = orthogonal_qubit(psi)
        assert fw.predict_probability(ks, psi, None, psi, None, QUAD).value == pytest.approx(1.0, abs=1e-6)
        assert fw.predict_probability(ks, psi, None, opp, None, QUAD).value == pytest.approx(0.0, abs=1e-6)

    def test_overlap_fraction_is_one_on_many_pairs(self):
        ks = make_ks()
        rng = np.random.default_rng(4)
        checked = 0
        while checked < 30:
            phi, psi = random_state(2, rng), random_state(2, rng)
            if fw.born_probability(phi, psi) < 0.05:
                continue
            est = fw.overlap_fraction(ks, phi, psi, QUAD)
            assert abs(est.value - 1.0) < 1e-6
            checked += 1

    def test_response_ignores_measurement_payload(self):
        ks = make_ks()
        phi = state(1, 1j)
        pts = fw.measurement_of(phi)  # canonical payload
        alt = MeasContext("reversed", tuple(reversed(pts.payload)))
        lam = ks.ontic_space.reference_sampler(stream(9, "ctx"), 500)
        a = ks.respond.evaluate(phi, lam, pts)
        b = ks.respond.evaluate(phi, lam, alt)
        assert np.array_equal(a, b)


class TestBell2:
    def test_threshold_examples(self):
        # Outcome probability 0.3 for the thresholded state: x = 0.2 fires
        # it, x = 0.9 fires the partner.
        bell2 = make_bell2()
        p = 0.3
        b1 = state(math.sqrt(p), math.sqrt(1.0 - p))   # bloch x > 0: ordered first
        b2 = orthogonal_qubit(b1)
        sm = MeasContext("pair", (b1, b2))
        psi = basis_state(2, 0)  # |<b1|0>|^2 = p
        chi = np.tile(psi.amplitudes, (2, 1))
        x = np.array([0.2, 0.9])
        vals = bell2.respond.evaluate(b1, (chi, x), sm)
        assert vals.tolist() == [1.0, 0.0]
        vals2 = bell2.respond.evaluate(b2, (chi, x), sm)
        assert vals2.tolist() == [0.0, 1.0]

    def test_prepared_state_always_fires_itself(self):
        bell2 = make_bell2()
        psi = random_state(2, np.random.default_rng(6))
        res = fw.check_quantum_certainty(bell2, psi, n_samples=5000, seed=3)
        assert res.passed

    def test_basis_order_does_not_matter(self):
        bell2 = make_bell2()
        psi, phi = random_state(2, np.random.default_rng(8)), state(1, 1)
        basis = (phi, orthogonal_qubit(phi))
        fwd = MeasContext("fwd", basis)
        rev = MeasContext("rev", tuple(reversed(basis)))
        batch = bell2.prepare(psi).sampler(stream(11, "b2"), 1000)
        assert np.array_equal(
            bell2.respond.evaluate(phi, batch, fwd),
            bell2.respond.evaluate(phi, batch, rev),
        )

    def test_monte_carlo_born(self):
        rep = fw.born_suite_pairs(make_bell2(), 10, seed=13, engine=parse_engine("mc:200000"))
        assert rep.passed


class TestWS:
    def test_ratio_example(self):
        # amplitudes (0.8, 0.6), auxiliary (1.0, 2.0): ratios (0.8, 0.3),
        # so the first basis outcome fires.
        ws = make_ws(2)
        sm = MeasContext("std", (basis_state(2, 0), basis_state(2, 1)))
        chi = np.array([[0.8, 0.6]], dtype=complex)
        omega = np.array([[1.0, 2.0]], dtype=complex)
        assert ws.respond.evaluate(basis_state(2, 0), (chi, omega), sm)[0] == 1.0
        assert ws.respond.evaluate(basis_state(2, 1), (chi, omega), sm)[0] == 0.0

    def test_basis_state_is_certain(self):
        ws = make_ws(3)
        psi = basis_state(3, 1)
        sm = MeasContext("std", tuple(basis_state(3, k) for k in range(3)))
        g = stream(17, "wstest")
        batch = ws.prepare(psi).sampler(g, 5000)
        vals = ws.respond.evaluate(psi, batch, sm)
        assert np.all(vals == 1.0)

    def test_zero_auxiliary_component_wins(self):
        # b_i = 0 with a_i != 0 is an infinite ratio and must win.
        ws = make_ws(2)
        sm = MeasContext("std", (basis_state(2, 0), basis_state(2, 1)))
        chi = np.array([[0.6, 0.8]], dtype=complex)
        omega = np.array([[0.0, 1.0]], dtype=complex)
        assert ws.respond.evaluate(basis_state(2, 0), (chi, omega), sm)[0] == 1.0

    def test_dead_ratio_loses(self):
        # a_i = b_i = 0 counts as ratio 0.
        ws = make_ws(2)
        sm = MeasContext("std", (basis_state(2, 0), basis_state(2, 1)))
        chi = np.array([[0.0, 1.0]], dtype=complex)
        omega = np.array([[0.0, 1.0]], dtype=complex)
        assert ws.respond.evaluate(basis_state(2, 1), (chi, omega), sm)[0] == 1.0

    def test_response_two_valued_on_a_million_triples(self):
        ws = make_ws(3)
        g = stream(23, "ws-binary")
        batch = ws.ontic_space.reference_sampler(g, 1_000_000)
        phi = random_state(3, g)
        sm = fw.measurement_of(phi)
        vals = ws.respond.evaluate(phi, batch, sm)
        assert np.all((vals == 0.0) | (vals == 1.0))

    def test_complement_rotation_flips_outcomes(self):
        ws = make_ws(3)
        rep = fw.classify(ws, n_trials=2048, seed=19)
        wit = rep.predicates["measurement_noncontextuality"].witness
        assert wit is not None and wit["variation"] == "rotation"

    def test_monte_carlo_born(self):
        rep = fw.born_suite_pairs(make_ws(3), 5, seed=13, engine=parse_engine("mc:200000"))
        assert rep.passed


class TestDeclaredRows:
    def test_all_implemented_models_match_their_rows(self):
        for model in table_models():
            if not model.implemented:
                continue
            rep = fw.classify(model, n_trials=2048, seed=29)
            assert rep.matches_declared(model.declared), model.name

    def test_stub_rows_render_from_declarations(self):
        rows = {
            "aaronson": ("yes", "no", "yes"),
            "bell1": ("no", "yes", "yes"),
            "aerts": ("yes", "no", "no"),
        }
        for name, (r, d, c) in rows.items():
            m = get_model(name)
            assert m.declared.reciprocal == (r == "yes")
            assert m.declared.outcome_deterministic == (d == "yes")
            assert m.declared.measurement_contextual == (c == "yes")
