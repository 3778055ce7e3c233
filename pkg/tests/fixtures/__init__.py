"""
Test fixtures and sample data for relscat tests.
"""

from relscat.spectral.grid import Grid3, make_grid
from relscat.spectral.potential import Potential

RECIPE_TEMPLATE = """\
experiment = "{experiment}"

[grid]
n = {n}
L = {L}

[potential]
kind = "{kind}"
a = {a}
width = {width}

[logging]
log_to_file = false
{params}"""


def small_grid(n: int = 24, L: float = 6.0) -> Grid3:
    return make_grid(n, L)


def gaussian_well(a: float = 1.0, width: float = 1.0) -> Potential:
    """Attractive Gaussian well -a exp(-r^2 / width^2)."""
    return Potential(kind="gaussian-well", a=a, width=width)


def recipe_text(
    experiment: str,
    n: int = 32,
    L: float = 12.0,
    kind: str = "gaussian-well",
    a: float = 1.0,
    width: float = 1.0,
    params: str = "",
) -> str:
    block = f"\n[params]\n{params}\n" if params else ""
    return RECIPE_TEMPLATE.format(
        experiment=experiment, n=n, L=L, kind=kind, a=a, width=width, params=block
    )
