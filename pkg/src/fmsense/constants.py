"""Physical constants, frozen to four-significant-digit values so that
every derived benchmark number is bit-reproducible.

These are deliberately not configurable and deliberately not the CODATA
values; swapping in higher-precision constants would shift the frozen
regression numbers in the test suite.
"""

SPEED_OF_LIGHT = 2.998e8
"""Vacuum speed of light, m/s."""

BOLTZMANN = 1.381e-23
"""Boltzmann constant, J/K."""

ELEMENTARY_CHARGE = 1.602e-19
"""Elementary charge, C."""

HBAR = 1.055e-34
"""Reduced Planck constant, J*s."""
