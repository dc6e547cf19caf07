"""Linear-programming bounds on epistemic overlap for finite fragments.

A fragment is a finite family of prepared states and measured orthonormal
bases in one Hilbert-space dimension.  Over the fragment's measured rays,
the outcome-deterministic noncontextual response schemes are exactly the
admissible 0/1 valuations of the ray orthogonality graph; we call those
valuations atoms.  A model in that class is a probability distribution
over atoms per prepared state, which turns two questions into LPs:

* ``feasibility_max_epistemic``: can such a model reproduce every Born
  probability of the fragment while each preparation is supported on
  atoms answering its own ray with certainty?  Feasible answers return
  the explicit weights; infeasible answers return a Farkas certificate.

* ``max_overlap_fraction``: the largest uniform fraction t such that for
  every ordered non-orthogonal pair (phi measured, psi prepared) the
  mass psi assigns to atoms answering phi's ray 1 stays between
  t * |<phi|psi>|^2 and |<phi|psi>|^2.  The optimum f* only bounds the
  noncontextual-deterministic class, so every report carries that caveat.

Fragment files are plain text: a ``dim=<d>`` header, an optional
``exact`` flag (rational amplitudes, exact arithmetic end to end),
``state:`` lines with d amplitudes ``re,im``, and ``basis:`` blocks
followed by d such vector lines.  ``#`` starts a comment.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path
from typing import Optional

import numpy as np

from .framework import (
    DeclaredProperties,
    EpistemicState,
    MeasContext,
    OnticSpace,
    OntologicalModel,
    ResponseFunction,
)
from .hilbert import PureState, born_probability
from .ksval import OrthogonalityGraph, enumerate_valuations, find_valuation, graph_from_edges
from .simplex import FEAS_TOL, LinearProgram, simplex_solve

ORTH_TOL = 1e-9    # dot-product cut for ray orthogonality in float mode
BASIS_TOL = 1e-12  # orthogonality required of declared basis vectors
BORN_EPS = 1e-12   # overlaps at or below this count as orthogonal pairs
CAVEAT = "noncontextual-deterministic class"


class FragmentError(ValueError):
    """Malformed fragment text; messages cite the offending line."""


@dataclass(frozen=True)
class Fragment:
    """Finite prepare/measure family in one dimension.

    ``states`` and ``bases`` always hold unit-normalized PureStates.  In
    exact mode ``exact_states`` and ``exact_bases`` keep the declared
    rational amplitudes as (re, im) Fraction pairs, unnormalized; Born
    probabilities then divide by the squared norms and stay rational.
    """

    dim: int
    states: tuple
    bases: tuple
    exact: bool = False
    exact_states: tuple = ()
    exact_bases: tuple = ()
    name: str = "fragment"

    @property
    def state_labels(self) -> tuple:
        return tuple(f"psi{i}" for i in range(len(self.states)))

    @property
    def basis_labels(self) -> tuple:
        return tuple(f"B{b}" for b in range(len(self.bases)))


# ---------------------------------------------------------------------------
# Parsing and formatting


_DIM_RE = re.compile(r"dim\s*=\s*(\d+)$")


def _strip_comment(line: str) -> str:
    cut = line.find("#")
    if cut >= 0:
        line = line[:cut]
    return line.strip()


def _parse_amp_float(token: str, lineno: int) -> complex:
    parts = token.split(",")
    if len(parts) != 2:
        raise FragmentError(f"line {lineno}: amplitude {token!r} is not 're,im'")
    try:
        return complex(float(parts[0]), float(parts[1]))
    except ValueError:
        raise FragmentError(f"line {lineno}: bad amplitude {token!r}") from None


def _parse_amp_exact(token: str, lineno: int):
    parts = token.split(",")
    if len(parts) != 2:
        raise FragmentError(f"line {lineno}: amplitude {token!r} is not 're,im'")
    try:
        return (Fraction(parts[0]), Fraction(parts[1]))
    except (ValueError, ZeroDivisionError):
        raise FragmentError(
            f"line {lineno}: amplitude {token!r} is not rational"
        ) from None


def _float_vector(tokens, lineno: int, dim: int) -> PureState:
    if len(tokens) != dim:
        raise FragmentError(
            f"line {lineno}: expected {dim} amplitudes, got {len(tokens)}"
        )
    v = np.array([_parse_amp_float(t, lineno) for t in tokens])
    norm = float(np.linalg.norm(v))
    if norm < 1e-12:
        raise FragmentError(f"line {lineno}: zero vector")
    return PureState(v / norm)


def _exact_vector(tokens, lineno: int, dim: int):
    if len(tokens) != dim:
        raise FragmentError(
            f"line {lineno}: expected {dim} amplitudes, got {len(tokens)}"
        )
    pairs = tuple(_parse_amp_exact(t, lineno) for t in tokens)
    if all(p == 0 and q == 0 for p, q in pairs):
        raise FragmentError(f"line {lineno}: zero vector")
    return pairs


def _exact_to_state(pairs) -> PureState:
    v = np.array([complex(float(p), float(q)) for p, q in pairs])
    return PureState(v / np.linalg.norm(v))


def parse_fragment(text: str, name: str = "fragment") -> Fragment:
    entries = [
        (k + 1, s)
        for k, line in enumerate(text.splitlines())
        if (s := _strip_comment(line))
    ]
    if not entries:
        raise FragmentError("empty fragment")
    n0, s0 = entries[0]
    m = _DIM_RE.fullmatch(s0)
    if not m:
        raise FragmentError(f"line {n0}: expected 'dim=<d>' header, got {s0!r}")
    dim = int(m.group(1))
    if dim < 2:
        raise FragmentError(f"line {n0}: dimension must be at least 2")
    pos = 1
    exact = False
    if pos < len(entries) and entries[pos][1] == "exact":
        exact = True
        pos += 1

    states, bases = [], []
    exact_states, exact_bases = [], []

    def read_vector(lineno, tokens):
        if exact:
            pairs = _exact_vector(tokens, lineno, dim)
            return _exact_to_state(pairs), pairs
        return _float_vector(tokens, lineno, dim), None

    while pos < len(entries):
        lineno, line = entries[pos]
        if line.startswith("state:"):
            state, pairs = read_vector(lineno, line[len("state:"):].split())
            states.append(state)
            exact_states.append(pairs)
            pos += 1
        elif line.startswith("basis:"):
            if line[len("basis:"):].strip():
                raise FragmentError(
                    f"line {lineno}: basis vectors go on the following lines"
                )
            block, block_pairs = [], []
            for k in range(dim):
                if pos + 1 + k >= len(entries):
                    raise FragmentError(
                        f"line {lineno}: basis block needs {dim} vector lines"
                    )
                vn, vline = entries[pos + 1 + k]
                if vline.startswith(("state:", "basis:", "dim")):
                    raise FragmentError(
                        f"line {lineno}: basis block needs {dim} vector lines"
                    )
                vec, pairs = read_vector(vn, vline.split())
                block.append(vec)
                block_pairs.append(pairs)
            _check_basis(block, block_pairs, exact, lineno)
            bases.append(tuple(block))
            exact_bases.append(tuple(block_pairs))
            pos += 1 + dim
        else:
            raise FragmentError(
                f"line {lineno}: expected 'state:' or 'basis:', got {line!r}"
            )

    if not states:
        raise FragmentError("fragment declares no states")
    if not bases:
        raise FragmentError("fragment declares no bases")
    return Fragment(
        dim=dim,
        states=tuple(states),
        bases=tuple(bases),
        exact=exact,
        exact_states=tuple(exact_states) if exact else (),
        exact_bases=tuple(exact_bases) if exact else (),
        name=name,
    )


def _check_basis(block, block_pairs, exact: bool, lineno: int):
    d = len(block)
    for i in range(d):
        for j in range(i + 1, d):
            if exact:
                ok = _exact_inner(block_pairs[i], block_pairs[j]) == (0, 0)
            else:
                ok = abs(block[i].inner(block[j])) <= BASIS_TOL
            if not ok:
                raise FragmentError(
                    f"line {lineno}: basis vectors {i} and {j} are not orthogonal"
                )


def load_fragment(path) -> Fragment:
    path = Path(path)
    return parse_fragment(path.read_text(), name=path.stem)


def format_fragment(frag: Fragment) -> str:
    def token(vec, pairs, k):
        if frag.exact:
            p, q = pairs[k]
            return f"{p},{q}"
        a = vec.amplitudes[k]
        return f"{float(a.real)!r},{float(a.imag)!r}"

    lines = [f"dim={frag.dim}"]
    if frag.exact:
        lines.append("exact")
    for i, psi in enumerate(frag.states):
        pairs = frag.exact_states[i] if frag.exact else None
        lines.append(
            "state: " + " ".join(token(psi, pairs, k) for k in range(frag.dim))
        )
    for b, basis in enumerate(frag.bases):
        lines.append("basis:")
        for k, vec in enumerate(basis):
            pairs = frag.exact_bases[b][k] if frag.exact else None
            lines.append(" ".join(token(vec, pairs, j) for j in range(frag.dim)))
    return "\n".join(lines) + "\n"


def save_fragment(path, frag: Fragment):
    Path(path).write_text(format_fragment(frag))


# ---------------------------------------------------------------------------
# Exact complex-rational arithmetic on (re, im) Fraction pairs


def _exact_inner(u, v):
    """conj(u) . v as an (re, im) pair of Fractions."""
    re_ = Fraction(0)
    im_ = Fraction(0)
    for (a, b), (c, d) in zip(u, v):
        re_ += a * c + b * d
        im_ += a * d - b * c
    return re_, im_


def _exact_norm2(u) -> Fraction:
    return sum((a * a + b * b for a, b in u), Fraction(0))


def _exact_born(phi, psi) -> Fraction:
    re_, im_ = _exact_inner(phi, psi)
    return (re_ * re_ + im_ * im_) / (_exact_norm2(phi) * _exact_norm2(psi))


def _exact_parallel(u, v) -> bool:
    """Same ray: every 2x2 complex minor u_i v_j - u_j v_i vanishes."""
    n = len(u)
    for i in range(n):
        for j in range(i + 1, n):
            re_ = u[i][0] * v[j][0] - u[i][1] * v[j][1]
            re_ -= u[j][0] * v[i][0] - u[j][1] * v[i][1]
            im_ = u[i][0] * v[j][1] + u[i][1] * v[j][0]
            im_ -= u[j][0] * v[i][1] + u[j][1] * v[i][0]
            if re_ or im_:
                return False
    return True


# ---------------------------------------------------------------------------
# Measured rays and their orthogonality graph


@dataclass(frozen=True)
class FragmentRays:
    """Deduplicated measured rays with the orthogonality graph.

    ``basis_rays[b][k]`` is the ray index of basis b's k-th vector;
    ``state_rays[i]`` is the prepared state's ray index, or None when the
    state is never measured (then no support constraint binds it).
    """

    vectors: tuple
    basis_rays: tuple
    state_rays: tuple
    graph: OrthogonalityGraph


def fragment_rays(frag: Fragment) -> FragmentRays:
    vectors = []
    exact_vectors = []

    def match(vec, pairs) -> Optional[int]:
        for r in range(len(vectors)):
            if frag.exact:
                if _exact_parallel(exact_vectors[r], pairs):
                    return r
            elif vectors[r].same_ray(vec, atol=ORTH_TOL):
                return r
        return None

    basis_rays = []
    for b, basis in enumerate(frag.bases):
        ids = []
        for k, vec in enumerate(basis):
            pairs = frag.exact_bases[b][k] if frag.exact else None
            r = match(vec, pairs)
            if r is None:
                vectors.append(vec)
                exact_vectors.append(pairs)
                r = len(vectors) - 1
            ids.append(r)
        basis_rays.append(tuple(ids))

    state_rays = []
    for i, psi in enumerate(frag.states):
        pairs = frag.exact_states[i] if frag.exact else None
        state_rays.append(match(psi, pairs))

    edges = []
    for i in range(len(vectors)):
        for j in range(i + 1, len(vectors)):
            if frag.exact:
                orth = _exact_inner(exact_vectors[i], exact_vectors[j]) == (0, 0)
            else:
                orth = abs(vectors[i].inner(vectors[j])) <= ORTH_TOL
            if orth:
                edges.append((i, j))
    graph = graph_from_edges(len(vectors), frag.dim, edges)
    return FragmentRays(tuple(vectors), tuple(basis_rays), tuple(state_rays), graph)


# ---------------------------------------------------------------------------
# Atoms


@dataclass(frozen=True)
class Atom:
    """One admissible 0/1 valuation of the measured rays.

    ``valuation[r]`` answers ray r; ``outcomes[b]`` is the index of the
    unique vector valued 1 in basis b.  A ray shared between bases gets
    one answer, so atoms are noncontextual by construction.
    """

    valuation: tuple
    outcomes: tuple


def enumerate_atoms(fragment: Fragment, rays: Optional[FragmentRays] = None):
    """Every atom of the fragment, in deterministic search order."""
    if rays is None:
        rays = fragment_rays(fragment)
    valuations, _ = enumerate_valuations(rays.graph, fragment.dim)
    atoms = []
    for val in valuations:
        outcomes = tuple(
            next(k for k in range(fragment.dim) if val[ids[k]] == 1)
            for ids in rays.basis_rays
        )
        atoms.append(Atom(tuple(val), outcomes))
    return atoms


# ---------------------------------------------------------------------------
# Born tables and LP scaffolding


def _zero(exact: bool):
    return Fraction(0) if exact else 0.0


def _born_state_basis(frag: Fragment):
    """borns[i][b][k] = probability of basis b outcome k on state i."""
    out = []
    for i in range(len(frag.states)):
        per_basis = []
        for b in range(len(frag.bases)):
            if frag.exact:
                row = tuple(
                    _exact_born(frag.exact_bases[b][k], frag.exact_states[i])
                    for k in range(frag.dim)
                )
            else:
                row = tuple(
                    born_probability(frag.bases[b][k], frag.states[i])
                    for k in range(frag.dim)
                )
            per_basis.append(row)
        out.append(tuple(per_basis))
    return tuple(out)


def _born_state_state(frag: Fragment):
    n = len(frag.states)
    out = [[None] * n for _ in range(n)]
    for i in range(n):
        for j in range(n):
            if frag.exact:
                out[i][j] = _exact_born(frag.exact_states[i], frag.exact_states[j])
            else:
                out[i][j] = born_probability(frag.states[i], frag.states[j])
    return out


def _admissible_atoms(frag: Fragment, rays: FragmentRays, atoms):
    """Per state: atom indices allowed by certainty on the state's own ray."""
    allowed = []
    for i in range(len(frag.states)):
        r = rays.state_rays[i]
        if r is None:
            allowed.append(list(range(len(atoms))))
        else:
            allowed.append([a for a, at in enumerate(atoms) if at.valuation[r] == 1])
    return allowed


# ---------------------------------------------------------------------------
# Feasibility of exact Born reproduction by the deterministic class


@dataclass(frozen=True)
class FeasibilityResult:
    """Outcome of the Born-reproduction LP over atoms.

    ``weights[i][a]`` is the mass state i places on atom a when feasible
    (zero on atoms excluded by the certainty constraint).  Infeasible
    answers carry the Farkas vector over the equality rows, already
    verified by direct arithmetic.
    """

    status: str
    n_atoms: int
    empty_atoms: bool = False
    weights: Optional[tuple] = None
    max_residual: Optional[float] = None
    farkas: Optional[tuple] = None
    certificate_ok: Optional[bool] = None
    exact: bool = False

    @property
    def feasible(self) -> bool:
        return self.status == "Feasible"


def feasibility_max_epistemic(fragment: Fragment) -> FeasibilityResult:
    """Can a deterministic noncontextual atom model match every Born value?

    Variables are per-state atom weights; atoms not answering the state's
    own measured ray with 1 are dropped (states never measured keep all
    atoms).  One equality row per (state, basis, outcome) pins the mass
    answering that outcome to the Born probability.  Feasible solutions
    are re-checked row by row; infeasible ones get a Farkas certificate.
    """
    rays = fragment_rays(fragment)
    atoms = enumerate_atoms(fragment, rays)
    exact = fragment.exact
    if not atoms:
        search = find_valuation(rays.graph, fragment.dim)
        if search.satisfiable:
            raise RuntimeError("atom enumeration and valuation search disagree")
        return FeasibilityResult(
            status="Infeasible", n_atoms=0, empty_atoms=True, exact=exact
        )

    allowed = _admissible_atoms(fragment, rays, atoms)
    var_of = {}
    for i in range(len(fragment.states)):
        for a in allowed[i]:
            var_of[(i, a)] = len(var_of)
    n_vars = len(var_of)
    borns = _born_state_basis(fragment)

    lp = LinearProgram(n_vars)
    for i in range(len(fragment.states)):
        for b, ids in enumerate(rays.basis_rays):
            for k in range(fragment.dim):
                row = [_zero(exact)] * n_vars
                for a in allowed[i]:
                    if atoms[a].valuation[ids[k]] == 1:
                        row[var_of[(i, a)]] = _zero(exact) + 1
                lp.add_eq(row, borns[i][b][k])

    res = simplex_solve(lp, exact=exact)
    if res.status == "infeasible":
        if not res.certificate_ok:
            raise RuntimeError("Farkas certificate failed verification")
        return FeasibilityResult(
            status="Infeasible",
            n_atoms=len(atoms),
            farkas=res.farkas,
            certificate_ok=res.certificate_ok,
            exact=exact,
        )
    if res.status != "optimal":
        raise RuntimeError(f"feasibility LP reported {res.status}")

    weights = [[_zero(exact)] * len(atoms) for _ in fragment.states]
    for (i, a), v in var_of.items():
        weights[i][a] = res.x[v]
    max_residual = 0.0
    for i in range(len(fragment.states)):
        for b, ids in enumerate(rays.basis_rays):
            for k in range(fragment.dim):
                mass = sum(
                    (weights[i][a] for a in range(len(atoms))
                     if atoms[a].valuation[ids[k]] == 1),
                    _zero(exact),
                )
                max_residual = max(max_residual, abs(float(mass - borns[i][b][k])))
    tol = 0.0 if exact else FEAS_TOL
    if max_residual > tol:
        raise RuntimeError(
            f"feasible LP answer violates a Born row by {max_residual:.3e}"
        )
    return FeasibilityResult(
        status="Feasible",
        n_atoms=len(atoms),
        weights=tuple(tuple(w) for w in weights),
        max_residual=max_residual,
        exact=exact,
    )


# ---------------------------------------------------------------------------
# Uniform overlap fraction


@dataclass(frozen=True)
class PairBound:
    """Core mass kept by one ordered (measured, prepared) pair at optimum."""

    measured: str
    prepared: str
    born: float
    core_mass: float
    ratio: float


@dataclass(frozen=True)
class OverlapResult:
    """Optimum of the uniform overlap-fraction LP.

    f_star stays a Fraction in exact mode.  The bound only constrains
    outcome-deterministic noncontextual models, hence the caveat field.
    """

    status: str
    f_star: object
    caveat: str
    n_atoms: int
    pairs: tuple = ()
    weights: Optional[tuple] = None
    farkas: Optional[tuple] = None
    certificate_ok: Optional[bool] = None
    exact: bool = False


def max_overlap_fraction(fragment: Fragment) -> OverlapResult:
    """Largest uniform t with t*Born <= core mass <= Born on every pair.

    Pairs run over ordered (phi, psi) with phi prepared and measured,
    psi prepared, and |<phi|psi>|^2 above the orthogonality cut.  Each
    prepared state's weights are a distribution over its admissible
    atoms; full Born reproduction is deliberately not imposed, so the
    optimum isolates how much overlap the deterministic noncontextual
    class can retain.  Empty atom sets leave the fraction undefined.
    """
    rays = fragment_rays(fragment)
    atoms = enumerate_atoms(fragment, rays)
    exact = fragment.exact
    if not atoms:
        return OverlapResult(
            status="Undefined", f_star=None, caveat=CAVEAT, n_atoms=0, exact=exact
        )

    n_states = len(fragment.states)
    allowed = _admissible_atoms(fragment, rays, atoms)
    var_of = {}
    for i in range(n_states):
        for a in allowed[i]:
            var_of[(i, a)] = 1 + len(var_of)  # variable 0 is t
    n_vars = 1 + len(var_of)
    bmat = _born_state_state(fragment)
    pairs = [
        (i, j)
        for i in range(n_states)
        if rays.state_rays[i] is not None
        for j in range(n_states)
        if j != i and bmat[i][j] > BORN_EPS
    ]

    one = _zero(exact) + 1
    lp = LinearProgram(n_vars, objective=[one] + [_zero(exact)] * (n_vars - 1))
    for j in range(n_states):
        row = [_zero(exact)] * n_vars
        for a in allowed[j]:
            row[var_of[(j, a)]] = one
        lp.add_eq(row, one)
    t_cap = [_zero(exact)] * n_vars
    t_cap[0] = one
    lp.add_ub(t_cap, one)

    def core_vars(i, j):
        r = rays.state_rays[i]
        return [var_of[(j, a)] for a in allowed[j] if atoms[a].valuation[r] == 1]

    for i, j in pairs:
        cols = core_vars(i, j)
        floor = [_zero(exact)] * n_vars
        floor[0] = bmat[i][j]
        for v in cols:
            floor[v] = -one
        lp.add_ub(floor, _zero(exact))  # t*born - core <= 0
        cap = [_zero(exact)] * n_vars
        for v in cols:
            cap[v] = one
        lp.add_ub(cap, bmat[i][j])  # core <= born

    res = simplex_solve(lp, exact=exact)
    if res.status == "infeasible":
        if not res.certificate_ok:
            raise RuntimeError("Farkas certificate failed verification")
        return OverlapResult(
            status="Infeasible",
            f_star=None,
            caveat=CAVEAT,
            n_atoms=len(atoms),
            farkas=res.farkas,
            certificate_ok=res.certificate_ok,
            exact=exact,
        )
    if res.status != "optimal":
        raise RuntimeError(f"overlap LP reported {res.status}")

    f_star = res.x[0]
    weights = [[_zero(exact)] * len(atoms) for _ in range(n_states)]
    for (j, a), v in var_of.items():
        weights[j][a] = res.x[v]

    labels = fragment.state_labels
    pair_rows = []
    for i, j in pairs:
        r = rays.state_rays[i]
        mass = sum(
            (weights[j][a] for a in range(len(atoms))
             if atoms[a].valuation[r] == 1),
            _zero(exact),
        )
        pair_rows.append(
            PairBound(
                measured=labels[i],
                prepared=labels[j],
                born=float(bmat[i][j]),
                core_mass=float(mass),
                ratio=float(mass) / float(bmat[i][j]),
            )
        )

    tol = 0.0 if exact else FEAS_TOL
    if float(f_star) > 1.0 + tol:
        raise RuntimeError(f"overlap fraction {float(f_star)!r} exceeds 1")
    if pair_rows:
        worst = min(p.ratio for p in pair_rows)
        if worst < float(f_star) - max(tol, 1e-9):
            raise RuntimeError(
                f"optimal weights keep ratio {worst!r} below t = {float(f_star)!r}"
            )
    return OverlapResult(
        status="Optimal",
        f_star=f_star,
        caveat=CAVEAT,
        n_atoms=len(atoms),
        pairs=tuple(pair_rows),
        weights=tuple(tuple(w) for w in weights),
        exact=exact,
    )


# ---------------------------------------------------------------------------
# Wrapping LP weights as a finite ontological model


def _state_index(fragment: Fragment, psi: PureState) -> int:
    for i, s in enumerate(fragment.states):
        if s.same_ray(psi, atol=ORTH_TOL):
            return i
    raise ValueError("state is not one of the fragment's preparations")


def fragment_contexts(fragment: Fragment):
    """Measurement contexts for the fragment's bases, in declared order."""
    return [
        MeasContext(label, tuple(basis))
        for label, basis in zip(fragment.basis_labels, fragment.bases)
    ]


def fragment_model(
    fragment: Fragment, weights, name: str = "fragment-lp"
) -> OntologicalModel:
    """Finite model whose ontic states are the fragment's atoms.

    ``weights[i][a]`` gives preparation i's mass on atom a (as returned
    by the feasibility LP).  Responses look the measured ray up in the
    atom's valuation, so they are outcome-deterministic and read nothing
    but the ontic state.  Batches are integer arrays of atom indices.
    """
    rays = fragment_rays(fragment)
    atoms = enumerate_atoms(fragment, rays)
    n_atoms = len(atoms)
    if n_atoms == 0:
        raise ValueError("fragment has no atoms; no model exists")
    wmat = np.array([[float(w) for w in row] for row in weights], dtype=float)
    if wmat.shape != (len(fragment.states), n_atoms):
        raise ValueError(
            f"weights shape {wmat.shape} does not match "
            f"{len(fragment.states)} states x {n_atoms} atoms"
        )
    val_matrix = np.array([a.valuation for a in atoms], dtype=float)

    space = OnticSpace(
        kind="finite",
        dim=fragment.dim,
        reference_sampler=lambda rng, m: rng.integers(0, n_atoms, size=m),
        reference_mass=float(n_atoms),
        atoms=tuple(atoms),
    )

    def ray_of(phi: PureState) -> int:
        for r, u in enumerate(rays.vectors):
            if u.same_ray(phi, atol=ORTH_TOL):
                return r
        raise ValueError("outcome state is not a measured ray of the fragment")

    labels = fragment.state_labels

    def prepare_pure(psi: PureState) -> EpistemicState:
        i = _state_index(fragment, psi)
        idx = np.nonzero(wmat[i] > 0)[0]
        ws = wmat[i][idx]
        ws = ws / ws.sum()

        def support(batch, _i=i):
            return wmat[_i][np.asarray(batch, dtype=int)] > 0

        def sampler(rng, m, _idx=idx, _ws=ws):
            return rng.choice(_idx, size=m, p=_ws)

        return EpistemicState(
            space=space,
            label=labels[i],
            support=support,
            sampler=sampler,
            point_masses=(idx.copy(), ws.copy()),
        )

    def evaluate(phi, batch, sm):
        return val_matrix[np.asarray(batch, dtype=int), ray_of(phi)]

    def core(phi, batch, sm):
        return val_matrix[np.asarray(batch, dtype=int), ray_of(phi)] == 1.0

    respond = ResponseFunction(evaluate=evaluate, core=core, support=core)
    declared = DeclaredProperties(
        reciprocal=True,
        outcome_deterministic=True,
        measurement_contextual=False,
        preparation_contextual=False,
        psi_dependent_response=False,
    )
    return OntologicalModel(
        name=name,
        display_name="fragment LP witness",
        table_type="fragment",
        ontic_space=space,
        prepare_pure=prepare_pure,
        respond=respond,
        declared=declared,
        supported_dims=frozenset({fragment.dim}),
        default_engine_spec="closed",
    )


# ---------------------------------------------------------------------------
# One-call analysis


def analyze(fragment: Fragment) -> dict:
    """Feasibility plus overlap optimum, as one JSON-ready report."""
    feas = feasibility_max_epistemic(fragment)
    over = max_overlap_fraction(fragment)
    certificate = None
    if feas.status == "Infeasible":
        if feas.empty_atoms:
            certificate = {"empty_atoms": True, "valuation_search": "unsat"}
        else:
            certificate = {
                "farkas": [float(y) for y in feas.farkas],
                "verified": bool(feas.certificate_ok),
            }
    return {
        "fragment": fragment.name,
        "dim": fragment.dim,
        "n_states": len(fragment.states),
        "n_bases": len(fragment.bases),
        "n_atoms": feas.n_atoms,
        "feasible": feas.status,
        "max_residual": feas.max_residual,
        "f_star": None if over.f_star is None else float(over.f_star),
        "f_star_status": over.status,
        "caveat": over.caveat,
        "certificate": certificate,
        "pairs": [
            {
                "measured": p.measured,
                "prepared": p.prepared,
                "born": p.born,
                "core_mass": p.core_mass,
                "ratio": p.ratio,
            }
            for p in over.pairs
        ],
        "exact": fragment.exact,
    }
