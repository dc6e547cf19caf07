"""Show that one density operator can hide two distinguishable mixtures.

The unpolarized qubit state I/2 is prepared equally well by mixing the
standard basis or the Fourier (diagonal) basis.  Quantum mechanics
assigns both procedures the same density operator, so no measurement
can tell them apart.  An ontological model may still put different
distributions over ontic states behind them; the total-variation
distance between those distributions is the degree of preparation
contextuality.
"""

import numpy as np

from ontomodels.engines import parse_engine
from ontomodels.framework import canonical_mix_contexts, prep_context_distance
from ontomodels.hilbert import DensityOperator, mix
from ontomodels.zoo import get_model


def ket(s):
    return '[' + ' '.join('{:+.3f}'.format(a.real) for a in s.amplitudes) + ']'

SEED = 3


def main():
    model = get_model('ks')
    d = model.dim
    rho = DensityOperator(np.eye(d) / d)
    ctx_std, ctx_fourier = canonical_mix_contexts(d)

    print('Two preparation procedures for the unpolarized qubit:')
    for ctx in (ctx_std, ctx_fourier):
        dev = float(np.max(np.abs(mix(ctx.payload).matrix - rho.matrix)))
        parts = ', '.join(ket(s) for _, s in ctx.payload.components)
        print('  {:14s} mixes {{{}}}  |mix - I/2| = {:.1e}'.format(
            ctx.label, parts, dev))
    print()

    engine = parse_engine('quad:33', seed=SEED)
    tv = prep_context_distance(model, rho, ctx_std, ctx_fourier, engine)
    print('{} model: TV distance between the two ontic distributions'.format(
        model.display_name))
    print('  TV = {:.9f}  (sqrt(2) - 1 = {:.9f})'.format(tv, np.sqrt(2) - 1))
    print('The procedures are operationally identical but ontologically')
    print('distinct: this model is preparation contextual.')
    print()

    # The ontic-complete model in d=3 keeps even more procedure memory:
    # its epistemic states are point masses at the quantum state itself,
    # so different decompositions share no ontic mass at all.
    model = get_model('bb:3')
    rho = DensityOperator(np.eye(3) / 3)
    ctx_std, ctx_fourier = canonical_mix_contexts(3)
    tv = prep_context_distance(model, rho, ctx_std, ctx_fourier,
                               parse_engine('closed', seed=SEED))
    print('{} model (d=3): TV = {:.6f}'.format(get_model('bb:3').display_name, tv))


if __name__ == '__main__':
    main()
