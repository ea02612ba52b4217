"""Classical microwave transmission through the chain via ABCD cascades.

Every circuit element is a 2x2 transfer matrix relating (V, I) at its two
ports; cascades multiply.  Matrices are stored with shape (..., 2, 2) so a
whole frequency grid is processed in one vectorized cascade.
"""

from dataclasses import dataclass

import numpy as np
from scipy.signal import find_peaks, peak_widths

from .errors import ValidationError
from .lattice import ChainSpec


@dataclass(frozen=True)
class PortConfig:
    """Port impedance and optional coplanar-waveguide feed sections."""

    z0: float = 50.0
    cpw_length: float = 0.0
    phase_velocity: float = 1.2e8

    def __post_init__(self):
        if not self.z0 > 0:
            raise ValidationError("must be positive", "z0")
        if self.cpw_length < 0 or self.phase_velocity <= 0:
            raise ValidationError("invalid CPW section parameters")


@dataclass(frozen=True)
class ResonancePeak:
    frequency: float       # Hz
    width: float           # Hz, at half prominence
    height: float          # |S21| at the peak
    prominence_db: float


def shunt_capacitor(c, omega):
    """ABCD matrix of a shunt capacitor, vectorized over omega."""
    omega = np.asarray(omega, dtype=float)
    m = np.zeros(omega.shape + (2, 2), dtype=complex)
    m[..., 0, 0] = 1.0
    m[..., 1, 1] = 1.0
    m[..., 1, 0] = 1j * omega * c
    return m


def series_inductor(l, omega):
    """ABCD matrix of a series inductor."""
    omega = np.asarray(omega, dtype=float)
    m = np.zeros(omega.shape + (2, 2), dtype=complex)
    m[..., 0, 0] = 1.0
    m[..., 1, 1] = 1.0
    m[..., 0, 1] = 1j * omega * l
    return m


def series_capacitor(c, omega):
    """ABCD matrix of a series capacitor."""
    omega = np.asarray(omega, dtype=float)
    m = np.zeros(omega.shape + (2, 2), dtype=complex)
    m[..., 0, 0] = 1.0
    m[..., 1, 1] = 1.0
    m[..., 0, 1] = -1j / (omega * c)
    return m


def cpw_section(ports: PortConfig, omega):
    """ABCD matrix of a transmission-line section (identity at zero length)."""
    omega = np.asarray(omega, dtype=float)
    bl = omega * ports.cpw_length / ports.phase_velocity
    m = np.zeros(omega.shape + (2, 2), dtype=complex)
    m[..., 0, 0] = np.cos(bl)
    m[..., 1, 1] = np.cos(bl)
    m[..., 0, 1] = 1j * ports.z0 * np.sin(bl)
    m[..., 1, 0] = 1j * np.sin(bl) / ports.z0
    return m


def unit_cell_matrix(spec: ChainSpec, omega, cell=None):
    """Transfer matrix of one resonator cell: M_Cg @ M_L @ M_Cg.

    ``cell`` selects the cell inductance (cell 0 carries the edge loading);
    None means a bulk cell.
    """
    if np.any(np.asarray(omega) <= 0):
        raise ValidationError("omega must be positive", "omega")
    ls = spec.cell_inductances()
    l = spec.l_r if cell is None else ls[cell]
    mg = shunt_capacitor(spec.c_g, omega)
    return mg @ series_inductor(l, omega) @ mg


def chain_abcd(spec: ChainSpec, ports: PortConfig, omega):
    """Full cascade M_cpw M_Cc [M_uc M_Cc]^N M_cpw over a frequency grid."""
    mcc = series_capacitor(spec.c_c, omega)
    total = cpw_section(ports, omega) @ mcc
    for cell in range(spec.num_cells):
        total = total @ unit_cell_matrix(spec, omega, cell=cell) @ mcc
    return total @ cpw_section(ports, omega)


def s21_from_abcd(m, z0):
    """S21 = 2 / (A + B/Z0 + C Z0 + D)."""
    a = m[..., 0, 0]
    b = m[..., 0, 1]
    c = m[..., 1, 0]
    d = m[..., 1, 1]
    return 2.0 / (a + b / z0 + c * z0 + d)


def chain_s21(spec: ChainSpec, ports: PortConfig, freq_ghz):
    """Complex S21 over a strictly increasing frequency grid (GHz)."""
    freq_ghz = np.asarray(freq_ghz, dtype=float)
    if freq_ghz.ndim != 1 or np.any(np.diff(freq_ghz) <= 0):
        raise ValidationError("frequency grid must be strictly increasing",
                              "freq_ghz")
    omega = 2 * np.pi * freq_ghz * 1e9
    return s21_from_abcd(chain_abcd(spec, ports, omega), ports.z0)


def default_frequency_grid(f_start_ghz=4.0, f_stop_ghz=10.0, step_ghz=1e-4):
    """4-10 GHz at 100 kHz steps unless overridden."""
    n = int(round((f_stop_ghz - f_start_ghz) / step_ghz)) + 1
    return f_start_ghz + step_ghz * np.arange(n)


def find_resonances(freq_ghz, s21, prominence_db=3.0):
    """Locate transmission peaks of |S21|.

    Peaks are local maxima of |S21| in dB with at least ``prominence_db``
    of prominence above the surrounding baseline; widths come from the
    half-prominence crossings.  Returns a possibly empty list sorted by
    frequency.
    """
    freq_ghz = np.asarray(freq_ghz, dtype=float)
    mag = np.abs(np.asarray(s21))
    mag_db = 20 * np.log10(np.maximum(mag, 1e-300))
    idx, props = find_peaks(mag_db, prominence=prominence_db)
    if idx.size == 0:
        return []
    widths, _, _, _ = peak_widths(mag_db, idx, rel_height=0.5)
    df = np.median(np.diff(freq_ghz))
    peaks = []
    for i, pk in enumerate(idx):
        peaks.append(ResonancePeak(
            frequency=freq_ghz[pk] * 1e9,
            width=widths[i] * df * 1e9,
            height=mag[pk],
            prominence_db=float(props["prominences"][i]),
        ))
    return peaks
