"""Deterministic randomness for test and CLI campaigns.

All campaigns draw from the Philox4x64-10 counter-based generator
keyed by (seed, stream). The algorithm is fixed (not "whatever the
default generator happens to be") so that a recorded seed reproduces
the same sample sequence everywhere.
"""

import numpy as np


def make_rng(seed, stream=0):
    """Philox generator for the given seed and independent stream."""
    return np.random.Generator(np.random.Philox(key=np.array([seed, stream], dtype=np.uint64)))


def random_multivector(sig, rng, grade=None, scale=1.0):
    """Standard-normal coefficients, optionally restricted to one grade."""
    from .ka_core import Multivector

    coeffs = rng.standard_normal(sig.n_blades) * scale
    if grade is not None:
        for mask in range(sig.n_blades):
            if mask.bit_count() != grade:
                coeffs[mask] = 0.0
    return Multivector(sig, coeffs)


def random_spinor(rep, rng, scale=1.0):
    from .clifford_rep import Spinor

    return Spinor(rep, rng.standard_normal(rep.N) * scale)
