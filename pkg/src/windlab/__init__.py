"""windlab: a numerical laboratory for lattice path sums in one dimension.

Amplitudes with a winding phase, the squared-modulus probability rule,
brute-force and transfer-matrix propagators, the stationary-path limit,
and two-media least-time experiments, all seeded and reproducible.
"""

__version__ = "0.1.0"
