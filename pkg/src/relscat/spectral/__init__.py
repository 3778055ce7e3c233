"""
Numerical core of relscat.

Grids and fields, special functions, potentials, free-resolvent kernel
operators, the Birman-Schwinger machinery, stationary scattering theory,
dynamics and the dilation/positivity checks. Every module logs under
``relscat.spectral.<module>``.
"""
