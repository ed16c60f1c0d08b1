"""Finite-truncation laboratory for spectral triples on Toeplitz-type extensions.

Submodules:

- ``linalg``: Hermitian eigensolver, operator norms, validation errors.
- ``core``: truncated triples, the extension Dirac family and its seminorms.
- ``states``: split states and the spectral distance solver.
- ``bounds``: comparison inequalities, bridges, GH bounds, degenerations.
- ``instances``: circle, unitarized compacts, iterated construction, even doubling.
- ``cli``: scenario runner.
"""

from .core import ExtElement, Params, TruncatedTriple, lip_a, lip_c, lip_ext, validate_params
from .instances import build_circle, build_compacts, build_podles, even_doubling
from .states import SplitState, connes_distance, delta_state, lip_a_spec, lip_c_spec, lip_ext_spec, random_state

__version__ = "0.1.0"

__all__ = [
    "ExtElement",
    "Params",
    "TruncatedTriple",
    "lip_a",
    "lip_c",
    "lip_ext",
    "validate_params",
    "build_circle",
    "build_compacts",
    "build_podles",
    "even_doubling",
    "SplitState",
    "connes_distance",
    "delta_state",
    "lip_a_spec",
    "lip_c_spec",
    "lip_ext_spec",
    "random_state",
]
