"""Independent solvers used to cross-check the exact-diagonalization pipeline."""

from .bessel import (
    bessel_j,
    bessel_propagator,
    one_magnon_F,
    one_magnon_F_grid,
    single_magnon_chain_F,
)
from .freefermion import (
    BogoliubovMode,
    FermionCovariance,
    bdg_block,
    even_sector_spectrum,
    ff_protocol_F,
    txy_dispersion,
    wick_expectation,
)
from .ising import longrange_ising_sz

__all__ = [
    "BogoliubovMode",
    "FermionCovariance",
    "bdg_block",
    "bessel_j",
    "bessel_propagator",
    "even_sector_spectrum",
    "ff_protocol_F",
    "longrange_ising_sz",
    "one_magnon_F",
    "one_magnon_F_grid",
    "single_magnon_chain_F",
    "txy_dispersion",
    "wick_expectation",
]
