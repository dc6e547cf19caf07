"""Concrete ontological models.

Four fully implemented models:

* ``bb``   -- ontic state is the quantum state itself; response is the Born
  probability.  Reciprocal, indeterministic, noncontextual.
* ``ks``   -- d=2 only; ontic states are unit directions, the epistemic
  state is a cosine density on the hemisphere around the prepared state's
  direction, the response is the indicator of the outcome's hemisphere.
  Reciprocal, deterministic, noncontextual; preparation contextual.
* ``bell2`` -- d=2 only; ontic state is (quantum state, x in [0,1]); the
  first outcome of the ordered basis fires iff x is below its Born
  probability.  Nonreciprocal, deterministic, noncontextual under the
  pinned basis ordering.
* ``ws``   -- ontic state is (quantum state chi, auxiliary vector omega of
  independent standard complex Gaussians); outcome j of basis B fires iff
  the ratio |<b_j|chi>| / |<b_j|omega>| is the largest.  Nonreciprocal,
  deterministic, measurement contextual for d >= 3.

Three more (``aaronson``, ``bell1``, ``aerts``) ship as declared-only stubs
so summary tables can render every known row; they cannot be executed.

Boundary conventions (all measure zero, chosen to make every response a
total function): hemisphere membership is strict; the bell2 threshold
resolves x = p toward the second outcome; ws ratio ties resolve to the
lowest index, a zero/zero ratio counts 0 and a nonzero/zero ratio counts
infinity.
"""

from __future__ import annotations

import math

import numpy as np

from .engines import sample_sphere
from .framework import (
    DeclaredProperties,
    EpistemicState,
    MeasContext,
    OnticSpace,
    OntologicalModel,
    ResponseFunction,
    UnsupportedDimensionError,
    point_mass_tv,
    state_label,
)
from .hilbert import PureState, fidelity_rows, state_to_bloch

XI_TOL = 1e-9


class UnknownModelError(ValueError):
    pass


def _haar(rng, m, d):
    v = rng.normal(size=(m, d)) + 1j * rng.normal(size=(m, d))
    return v / np.linalg.norm(v, axis=1, keepdims=True)


def _fidelity(chi, s: PureState):
    """|<chi_row|s>|^2 for each row of a complex (m, d) batch."""
    return fidelity_rows(chi, s)


def _find_outcome(phi: PureState, payload) -> int:
    for i, b in enumerate(payload):
        if _fidelity(phi.amplitudes[None, :], b)[0] > 1.0 - XI_TOL:
            return i
    raise ValueError("outcome state is not an element of the measurement basis")


# ---------------------------------------------------------------------------
# bb: the quantum state itself is the ontic state


def make_bb(d: int = 2) -> OntologicalModel:
    if d < 2:
        raise UnsupportedDimensionError("bb needs dimension >= 2")

    space = OnticSpace(
        kind="ray",
        dim=d,
        reference_sampler=lambda rng, m: _haar(rng, m, d),
    )

    def prepare_pure(psi: PureState) -> EpistemicState:
        atoms = psi.amplitudes[None, :].copy()
        return EpistemicState(
            space=space,
            label=state_label(psi),
            support=lambda batch: _fidelity(batch, psi) > 1.0 - XI_TOL,
            sampler=lambda rng, m: np.tile(psi.amplitudes, (m, 1)),
            point_masses=(atoms, np.array([1.0])),
        )

    def evaluate(phi, batch, sm):
        return _fidelity(batch, phi)

    respond = ResponseFunction(
        evaluate=evaluate,
        core=lambda phi, batch, sm: _fidelity(batch, phi) > 1.0 - XI_TOL,
        support=lambda phi, batch, sm: _fidelity(batch, phi) > XI_TOL,
    )

    return OntologicalModel(
        name=f"bb:{d}",
        display_name="B-B",
        table_type="ontic-complete",
        ontic_space=space,
        prepare_pure=prepare_pure,
        respond=respond,
        declared=DeclaredProperties(
            reciprocal=True,
            outcome_deterministic=False,
            measurement_contextual=False,
            preparation_contextual=True,
            psi_dependent_response=True,
        ),
        supported_dims=frozenset({d}),
        state_register="whole",
        default_engine_spec="closed",
    )


# ---------------------------------------------------------------------------
# ks: cosine density on the Bloch hemisphere, indicator response


def _bloch(s: PureState) -> np.ndarray:
    return state_to_bloch(s).as_array()


def make_ks() -> OntologicalModel:
    space = OnticSpace(
        kind="sphere2",
        dim=2,
        reference_sampler=sample_sphere,
        reference_mass=4.0 * math.pi,
    )

    def prepare_pure(psi: PureState) -> EpistemicState:
        n = _bloch(psi)
        k = int(np.argmin(np.abs(n)))
        a = np.zeros(3)
        a[k] = 1.0
        e1 = a - (a @ n) * n
        e1 /= np.linalg.norm(e1)
        e2 = np.cross(n, e1)

        def sampler(rng, m):
            # Density (n.lam)/pi on the hemisphere: height above the
            # splitting plane has cdf u^2, azimuth is uniform.
            u = np.sqrt(1.0 - rng.random(m))
            phi = rng.uniform(0.0, 2.0 * math.pi, size=m)
            r = np.sqrt(1.0 - u * u)
            return (
                np.outer(u, n)
                + np.outer(r * np.cos(phi), e1)
                + np.outer(r * np.sin(phi), e2)
            )

        return EpistemicState(
            space=space,
            label=state_label(psi),
            support=lambda pts: pts @ n > 0.0,
            density=lambda pts: np.clip(pts @ n, 0.0, None) / math.pi,
            sampler=sampler,
            split_axes=(n,),
        )

    def evaluate(phi, pts, sm):
        return (pts @ _bloch(phi) > 0.0).astype(float)

    def member(phi, pts, sm):
        return pts @ _bloch(phi) > 0.0

    respond = ResponseFunction(
        evaluate=evaluate,
        core=member,
        support=member,
        split_axes=lambda phi, sm: (_bloch(phi),),
    )

    return OntologicalModel(
        name="ks",
        display_name="K-S",
        table_type="epistemic (d=2)",
        ontic_space=space,
        prepare_pure=prepare_pure,
        respond=respond,
        declared=DeclaredProperties(
            reciprocal=True,
            outcome_deterministic=True,
            measurement_contextual=False,
            preparation_contextual=True,
            psi_dependent_response=False,
        ),
        supported_dims=frozenset({2}),
        state_register="absent",
        default_engine_spec="quad:17",
    )


# ---------------------------------------------------------------------------
# bell2: quantum state plus one uniform random number


def _bloch_key(s: PureState):
    return tuple(np.round(_bloch(s), 12))


def _ordered_pair(sm: MeasContext):
    payload = sm.payload
    if len(payload) != 2:
        raise ValueError("bell2 measurements are ordered qubit bases")
    b1, b2 = payload
    # Pinned convention: the lexicographically greater Bloch vector is
    # the thresholded outcome, making the response independent of the
    # order in which the basis was written down.
    if _bloch_key(b1) < _bloch_key(b2):
        b1, b2 = b2, b1
    return b1, b2


def make_bell2() -> OntologicalModel:
    space = OnticSpace(
        kind="composite",
        dim=2,
        reference_sampler=lambda rng, m: (_haar(rng, m, 2), rng.random(m)),
        aux="uniform01",
    )

    def prepare_pure(psi: PureState) -> EpistemicState:
        return EpistemicState(
            space=space,
            label=state_label(psi),
            support=lambda batch: _fidelity(batch[0], psi) > 1.0 - XI_TOL,
            sampler=lambda rng, m: (np.tile(psi.amplitudes, (m, 1)), rng.random(m)),
        )

    def decide(phi, batch, sm):
        chi, x = batch
        b1, b2 = _ordered_pair(sm)
        p1 = _fidelity(chi, b1)
        if _fidelity(phi.amplitudes[None, :], b1)[0] > 1.0 - XI_TOL:
            return x < p1
        if _fidelity(phi.amplitudes[None, :], b2)[0] > 1.0 - XI_TOL:
            return x >= p1
        raise ValueError("outcome state is not an element of the measurement basis")

    respond = ResponseFunction(
        evaluate=lambda phi, batch, sm: decide(phi, batch, sm).astype(float),
        core=decide,
        support=decide,
    )

    def closed_response_mean(psi, sp, phi, sm):
        b1, b2 = _ordered_pair(sm)
        p1 = float(_fidelity(psi.amplitudes[None, :], b1)[0])
        if _fidelity(phi.amplitudes[None, :], b1)[0] > 1.0 - XI_TOL:
            return p1
        if _fidelity(phi.amplitudes[None, :], b2)[0] > 1.0 - XI_TOL:
            return 1.0 - p1
        raise ValueError("outcome state is not an element of the measurement basis")

    return OntologicalModel(
        name="bell2",
        display_name="Bell 2nd",
        table_type="ontic-supplem. (d=2)",
        ontic_space=space,
        prepare_pure=prepare_pure,
        respond=respond,
        declared=DeclaredProperties(
            reciprocal=False,
            outcome_deterministic=True,
            measurement_contextual=False,
            preparation_contextual=True,
            psi_dependent_response=True,
        ),
        supported_dims=frozenset({2}),
        state_register="component",
        replace_state_register=lambda batch, psi: (
            np.tile(psi.amplitudes, (batch[0].shape[0], 1)),
            batch[1],
        ),
        closed_response_mean=closed_response_mean,
        prep_tv_closed=lambda da, db: point_mass_tv(
            [(s, w) for w, s in da.components],
            [(s, w) for w, s in db.components],
        ),
        default_engine_spec="mc:200000",
    )


# ---------------------------------------------------------------------------
# ws: quantum state plus a Gaussian auxiliary vector, ratio-argmax response


def make_ws(d: int = 3) -> OntologicalModel:
    if d < 2:
        raise UnsupportedDimensionError("ws needs dimension >= 2")

    def gauss(rng, m):
        return (rng.normal(size=(m, d)) + 1j * rng.normal(size=(m, d))) / math.sqrt(2.0)

    space = OnticSpace(
        kind="composite",
        dim=d,
        reference_sampler=lambda rng, m: (_haar(rng, m, d), gauss(rng, m)),
        aux="gaussian",
    )

    def prepare_pure(psi: PureState) -> EpistemicState:
        return EpistemicState(
            space=space,
            label=state_label(psi),
            support=lambda batch: _fidelity(batch[0], psi) > 1.0 - XI_TOL,
            sampler=lambda rng, m: (np.tile(psi.amplitudes, (m, 1)), gauss(rng, m)),
        )

    def winner_index(batch, sm):
        chi, omega = batch
        basis = np.stack([b.amplitudes for b in sm.payload])
        a = np.abs(chi @ basis.conj().T)
        b = np.abs(omega @ basis.conj().T)
        with np.errstate(divide="ignore", invalid="ignore"):
            r = a / b
        r[np.isnan(r)] = 0.0  # 0/0 counts as ratio 0
        return np.argmax(r, axis=1)  # ties and infinities: lowest index

    def decide(phi, batch, sm):
        if len(sm.payload) != d:
            raise ValueError("ws measurements are complete ordered bases")
        i = _find_outcome(phi, sm.payload)
        return winner_index(batch, sm) == i

    respond = ResponseFunction(
        evaluate=lambda phi, batch, sm: decide(phi, batch, sm).astype(float),
        core=decide,
        support=decide,
        reads_state_register=True,
    )

    return OntologicalModel(
        name=f"ws:{d}",
        display_name="W-S",
        table_type="ontic-supplem.",
        ontic_space=space,
        prepare_pure=prepare_pure,
        respond=respond,
        declared=DeclaredProperties(
            reciprocal=False,
            outcome_deterministic=True,
            measurement_contextual=d >= 3,
            preparation_contextual=True,
            psi_dependent_response=True,
        ),
        supported_dims=frozenset({d}),
        state_register="component",
        replace_state_register=lambda batch, psi: (
            np.tile(psi.amplitudes, (batch[0].shape[0], 1)),
            batch[1],
        ),
        prep_tv_closed=lambda da, db: point_mass_tv(
            [(s, w) for w, s in da.components],
            [(s, w) for w, s in db.components],
        ),
        default_engine_spec="mc:200000",
    )


# ---------------------------------------------------------------------------
# Declared-only stubs and the registry


def _stub(name, display, table_type, declared, dims) -> OntologicalModel:
    def unavailable(*args, **kwargs):
        raise NotImplementedError(f"model {name} ships as a declared-only stub")

    return OntologicalModel(
        name=name,
        display_name=display,
        table_type=table_type,
        ontic_space=OnticSpace(kind="ray", dim=min(dims), reference_sampler=unavailable),
        prepare_pure=unavailable,
        respond=ResponseFunction(
            evaluate=unavailable, core=unavailable, support=unavailable
        ),
        declared=declared,
        supported_dims=frozenset(dims),
        implemented=False,
    )


def make_aaronson() -> OntologicalModel:
    return _stub(
        "aaronson", "Aaronson", "ontic-supplem.",
        DeclaredProperties(True, False, True, True, True), {2},
    )


def make_bell1() -> OntologicalModel:
    return _stub(
        "bell1", "Bell 1st", "ontic-supplem.",
        DeclaredProperties(False, True, True, True, True), {2},
    )


def make_aerts() -> OntologicalModel:
    return _stub(
        "aerts", "Aerts", "ontic-complete (d=2)",
        DeclaredProperties(True, False, False, True, True), {2},
    )


TABLE_ORDER = ("bb", "ks", "aaronson", "bell1", "bell2", "aerts", "ws")

_FIXED_DIM = {"ks": 2, "bell2": 2, "aaronson": 2, "bell1": 2, "aerts": 2}
_DEFAULT_DIM = {"bb": 2, "ws": 3}


def get_model(spec: str) -> OntologicalModel:
    """Resolve a registry name like "ks", "bb:3", or "ws:4"."""
    parts = str(spec).strip().split(":")
    base = parts[0]
    if base not in TABLE_ORDER:
        raise UnknownModelError(f"unknown model {spec!r}")
    if len(parts) > 2:
        raise UnknownModelError(f"unknown model {spec!r}")
    dim = None
    if len(parts) == 2:
        try:
            dim = int(parts[1])
        except ValueError:
            raise UnknownModelError(f"unknown model {spec!r}") from None
    if base in _FIXED_DIM:
        if dim is not None and dim != _FIXED_DIM[base]:
            raise UnsupportedDimensionError(
                f"model {base} is defined for dimension {_FIXED_DIM[base]} only"
            )
        dim = _FIXED_DIM[base]
    elif dim is None:
        dim = _DEFAULT_DIM[base]
    if dim < 2:
        raise UnsupportedDimensionError("dimension must be at least 2")

    if base == "bb":
        return make_bb(dim)
    if base == "ks":
        return make_ks()
    if base == "bell2":
        return make_bell2()
    if base == "ws":
        return make_ws(dim)
    if base == "aaronson":
        return make_aaronson()
    if base == "bell1":
        return make_bell1()
    return make_aerts()


def table_models() -> list:
    """The seven summary-table models in their canonical order; concrete
    entries are instantiated at the dimensions their claims need."""
    specs = ("bb:3", "ks", "aaronson", "bell1", "bell2", "aerts", "ws:3")
    return [get_model(s) for s in specs]
