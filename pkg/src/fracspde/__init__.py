"""Numerics for time-fractional diffusion with multiplicative Gaussian noise.

Modules
-------
specfun   : reciprocal Gamma, Wright, Mittag-Leffler, discrete Caputo derivative
greens    : fundamental kernels Y, Z1, Z2 for B = Laplacian, envelopes, J0
noise     : space-time Gaussian noise with fractional / Riesz / Bessel covariance
chaos     : well-posedness exponent, theorem checker, chaos bound series
duhamel   : deterministic Duhamel solver, chaos second moment, pathwise scheme
quadcheck : independent numerical verification of the integral lemmas
cli       : command-line entry point (``fracspde``)
"""

__version__ = "0.1.0"
