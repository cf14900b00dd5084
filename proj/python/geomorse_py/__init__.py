"""Closed geodesics on Riemannian 2-spheres.

Thin package wrapper around the compiled core: surfaces, discrete curves,
curve-shortening flow, Fermi charts, stability spectra, plane-sweepout
min-max and the Morse-inequality pipeline.
"""

try:
    from ._geomorse import *  # noqa: F401,F403
except ImportError:  # extension on sys.path rather than inside the package
    from _geomorse import *  # noqa: F401,F403
