"""Bound the overlap fraction over deterministic noncontextual models.

A fragment fixes finitely many preparations and measurement bases.  Its
atoms are the 0/1 valuations of the measured rays; any deterministic
noncontextual model of the fragment is a probability distribution over
them.  One linear program asks whether such a model can reproduce every
Born probability exactly; a second maximizes the worst-case overlap
fraction f*.  In d=2 both succeed with f* = 1.  The pentagon fragment in
d=3 is Born-infeasible and caps f* strictly below 1, and a fragment
whose rays admit no valuation at all has an empty atom set.
"""

from ontomodels.data import fragment_path
from ontomodels.epibound import (
    analyze,
    enumerate_atoms,
    feasibility_max_epistemic,
    load_fragment,
    max_overlap_fraction,
)


def main():
    # d=2: two states, two bases. Atoms exist, Born is reproducible, and
    # the overlap LP reaches f* = 1 (this fragment is solved in exact
    # rational arithmetic).
    frag = load_fragment(fragment_path('d2_zx.frag'))
    feas = feasibility_max_epistemic(frag)
    bound = max_overlap_fraction(frag)
    print('{}: dim={} atoms={}'.format(frag.name, frag.dim, len(enumerate_atoms(frag))))
    print('  Born feasibility: {} (max residual {})'.format(
        feas.status, feas.max_residual))
    print('  f* = {} ({})'.format(bound.f_star, bound.status))
    print()

    # d=3 pentagon: five interlocking triads around a fixed state. The
    # Born equalities are infeasible (certified by a Farkas vector), and
    # the overlap fraction is capped at 2/sqrt(5) ~ 0.894.
    frag = load_fragment(fragment_path('kcbs.frag'))
    feas = feasibility_max_epistemic(frag)
    bound = max_overlap_fraction(frag)
    print('{}: dim={} atoms={}'.format(frag.name, frag.dim, len(enumerate_atoms(frag))))
    print('  Born feasibility: {} (Farkas certificate verified: {})'.format(
        feas.status, feas.certificate_ok))
    print('  f* = {:.12f} ({})'.format(bound.f_star, bound.status))
    print('  binding pairs (ratio == f*):')
    for pair in bound.pairs:
        flag = '  <-- binding' if pair.ratio <= bound.f_star + 1e-9 else ''
        print('    mu({:5s}) mass on core({:5s}): {:.6f} of born {:.6f}{}'.format(
            pair.prepared, pair.measured, pair.core_mass, pair.born, flag))
    print()

    # Uncolorable rays: the atom set itself is empty, cross-checked
    # against the valuation search, so no deterministic noncontextual
    # model exists regardless of weights.
    frag = load_fragment(fragment_path('peres33.frag'))
    report = analyze(frag)
    print('{}: dim={} atoms={}'.format(frag.name, report['dim'], report['n_atoms']))
    print('  Born feasibility: {} (certificate: {})'.format(
        report['feasible'], report['certificate']))
    print('  f* is undefined: no atom, hence no model of any fidelity.')


if __name__ == '__main__':
    main()
