"""Search for 0/1 valuations of three bundled ray sets.

A valuation marks each ray true or false so that no two orthogonal rays
are both true and every complete orthogonal basis contains exactly one
true ray.  A single triad admits exactly the three obvious valuations; a
33-ray set in d=3 admits none at all, which is what rules out
deterministic noncontextual outcome assignments there.
"""

from ontomodels.data import vector_path
from ontomodels.ksval import build_graph, enumerate_valuations, find_valuation, load_vector_set


def describe(name):
    vset = load_vector_set(vector_path(name))
    graph = build_graph(vset)
    print('{}: {} rays in d={}, {} orthogonal pairs, {} maximal cliques '
          '({} complete)'.format(name, len(vset.vectors), vset.dim,
                                 len(graph.edges), len(graph.bases),
                                 len(graph.complete_bases)))
    return vset, graph


def main():
    # A single orthogonal triad: pick which axis is the true one.
    vset, graph = describe('triad3.vec')
    valuations, stats = enumerate_valuations(graph, vset.dim)
    print('  exhaustive enumeration found {} valuations:'.format(len(valuations)))
    for v in valuations:
        print('   ', list(v))
    print()

    # Two triads sharing a ray: still colorable, one search is enough.
    vset, graph = describe('twotriads.vec')
    result = find_valuation(graph, vset.dim)
    print('  search verdict: {}'.format('SAT' if result.satisfiable else 'UNSAT'))
    print('  valuation:', list(result.valuation))
    print()

    # The 33-ray set: exhaustive search, no valuation survives.
    vset, graph = describe('peres33.vec')
    result = find_valuation(graph, vset.dim)
    print('  search verdict: {}'.format('SAT' if result.satisfiable else 'UNSAT'))
    print('  {} decisions, {} conflicts, search space exhausted: {}'.format(
        result.stats.decisions, result.stats.conflicts, result.stats.completed))


if __name__ == '__main__':
    main()
