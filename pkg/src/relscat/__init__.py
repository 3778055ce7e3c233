"""
relscat - desk-scale numerics for H = sqrt(-Laplacian) + V on R^3.

Free resolvent kernels, Birman-Schwinger operators, low-energy expansions,
scattering matrices, propagators and dilation identities, with a batch
experiment driver.
"""

__version__ = "0.1.0"
__app_id__ = "relscat"
