"""Physical constants and unit conversions.

All internal computations use SI units (F, H, rad/s).  GHz, nH, fF appear
only at I/O boundaries, through the helpers below, to avoid silent 2*pi
mistakes.
"""

import scipy.constants as const

H_PLANCK = const.h          # J s
HBAR = const.hbar           # J s
E_CHARGE = const.e          # C
PHI0 = const.h / (2 * const.e)          # magnetic flux quantum, Wb
PHI0_BAR = PHI0 / (2 * const.pi)        # reduced flux quantum, Wb

GHZ = 1e9            # Hz per GHz
NH = 1e-9            # H per nH
FF = 1e-15           # F per fF
TWO_PI = 2 * const.pi


def radpersec_to_ghz(omega):
    """Angular frequency (rad/s) -> ordinary frequency (GHz)."""
    return omega / TWO_PI / GHZ


def ghz_to_radpersec(f_ghz):
    """Ordinary frequency (GHz) -> angular frequency (rad/s)."""
    return f_ghz * GHZ * TWO_PI


def energy_ghz_to_joule(e_ghz):
    """Energy given as a frequency E/h in GHz -> Joules."""
    return e_ghz * GHZ * H_PLANCK


def inductance_from_energy_ghz(e_l_ghz):
    """Inductive energy E_L/h (GHz) -> inductance (H), E_L = (Phi0/2pi)^2 / L."""
    return PHI0_BAR**2 / energy_ghz_to_joule(e_l_ghz)


def energy_ghz_from_inductance(l_henry):
    """Inductance (H) -> inductive energy E_L/h (GHz)."""
    return PHI0_BAR**2 / l_henry / H_PLANCK / GHZ
