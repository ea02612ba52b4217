"""Fluxonium spectrum, flux-tunable SQUID coupler, couplings and Stark shifts.

The qubit Hamiltonian H/h = 4 E_C n^2 + (1/2) E_L phi^2 - E_J cos(phi - phi_ext)
is diagonalized on a uniform phase grid with a central second-difference
kinetic term.  Eigenvalues are Richardson-extrapolated from two nested grid
resolutions, which restores fourth-order accuracy (the harmonic limit is
reproduced to ~5e-8 relative at the default grid); wavefunctions and dipole
matrix elements are taken from the fine grid.

All qubit energies are frequencies in GHz (E/h); inductances, impedances and
angular frequencies at the module boundary are SI.
"""

from dataclasses import dataclass, field

import numpy as np
import scipy.linalg as sla

from .errors import (
    CalibrationRangeError,
    DivergentInductanceError,
    NearResonanceError,
    ResolutionError,
    ValidationError,
)
from .units import GHZ, H_PLANCK, HBAR, PHI0_BAR, TWO_PI

DEFAULT_SPAN = 8 * np.pi
DEFAULT_POINTS = 2048
BOUNDARY_AMPLITUDE_LIMIT = 1e-8
STARK_GUARD_HZ = 10e6  # dispersive formula invalid within 10 MHz of resonance


@dataclass(frozen=True)
class FluxoniumSpec:
    """Fluxonium energies (GHz) and external flux phase (rad)."""

    e_j: float
    e_c: float
    e_l: float
    phi_ext: float = 0.0

    def __post_init__(self):
        if self.e_c <= 0:
            raise ValidationError("must be positive", "e_c")
        if self.e_l <= 0:
            raise ValidationError("must be positive", "e_l")
        if self.e_j < 0:
            raise ValidationError("must be non-negative", "e_j")


@dataclass(frozen=True)
class PhaseGrid:
    """Uniform grid for the junction phase coordinate."""

    phi_min: float = -DEFAULT_SPAN
    phi_max: float = DEFAULT_SPAN
    num_points: int = DEFAULT_POINTS

    def __post_init__(self):
        if self.phi_max <= self.phi_min:
            raise ValidationError("phi_max must exceed phi_min")
        if self.num_points < 64:
            raise ValidationError("num_points too small", "num_points")

    def points(self, refine=1):
        n = refine * (self.num_points - 1) + 1
        return np.linspace(self.phi_min, self.phi_max, n)


@dataclass(frozen=True)
class FluxoniumSpectrum:
    """Eigenenergies (GHz, ascending), grid wavefunctions and dipoles (rad)."""

    energies: np.ndarray
    wavefunctions: np.ndarray        # (num_levels, num_grid_points)
    phi: np.ndarray                  # fine grid actually used
    dipoles: np.ndarray              # <l| phi |l'>
    spec: FluxoniumSpec

    def transition(self, l, lp):
        """Transition frequency eps_{l -> lp} = eps_lp - eps_l (GHz)."""
        return self.energies[lp] - self.energies[l]

    @property
    def num_levels(self):
        return self.energies.size


def _grid_eigensolve(spec, phi, num_levels):
    h = phi[1] - phi[0]
    potential = 0.5 * spec.e_l * phi**2 - spec.e_j * np.cos(phi - spec.phi_ext)
    kin = 4.0 * spec.e_c / h**2
    diag = 2.0 * kin + potential
    off = -kin * np.ones(phi.size - 1)
    evals, evecs = sla.eigh_tridiagonal(
        diag, off, select="i", select_range=(0, num_levels - 1))
    return evals, evecs / np.sqrt(h)


def solve_fluxonium(spec: FluxoniumSpec, grid: PhaseGrid | None = None,
                    num_levels: int = 6) -> FluxoniumSpectrum:
    """Lowest eigenpairs of the fluxonium on a phase grid.

    Raises :class:`ResolutionError` when the low-lying wavefunctions are not
    contained by the grid (boundary amplitude above 1e-8).
    """
    if grid is None:
        grid = PhaseGrid()
    if num_levels < 2:
        raise ValidationError("need at least 2 levels", "num_levels")

    phi_c = grid.points(refine=1)
    phi_f = grid.points(refine=2)
    evals_c, _ = _grid_eigensolve(spec, phi_c, num_levels)
    evals_f, evecs_f = _grid_eigensolve(spec, phi_f, num_levels)
    energies = (4.0 * evals_f - evals_c) / 3.0

    h = phi_f[1] - phi_f[0]
    edge_amp = np.sqrt(h) * np.abs(evecs_f[[0, -1], :]).max()
    if edge_amp > BOUNDARY_AMPLITUDE_LIMIT:
        raise ResolutionError(
            f"wavefunction amplitude {edge_amp:.2e} at the grid boundary; "
            "widen the phase grid")

    # fix a global sign per level for reproducibility
    for k in range(num_levels):
        lead = np.argmax(np.abs(evecs_f[:, k]))
        if evecs_f[lead, k] < 0:
            evecs_f[:, k] *= -1.0

    dipoles = (evecs_f * h).T @ (phi_f[:, None] * evecs_f)
    dipoles = 0.5 * (dipoles + dipoles.T)
    return FluxoniumSpectrum(energies, evecs_f.T.copy(), phi_f, dipoles, spec)


@dataclass(frozen=True)
class CouplerSpec:
    """Array of asymmetric SQUIDs acting as a flux-tunable linear inductor."""

    e_j1: float                 # GHz
    e_j2: float                 # GHz
    num_squids: int = 4
    phi_ext_squid: float = 0.0  # external phase per loop (rad)

    def __post_init__(self):
        if self.e_j1 < 0 or self.e_j2 < 0 or self.e_j1 + self.e_j2 <= 0:
            raise ValidationError("junction energies must be non-negative "
                                  "with a positive sum")
        if self.num_squids < 1:
            raise ValidationError("must be >= 1", "num_squids")

    @property
    def asymmetry(self):
        """d = (E_J2 - E_J1)/(E_J2 + E_J1), in [0, 1]."""
        return abs(self.e_j2 - self.e_j1) / (self.e_j2 + self.e_j1)

    def effective_junction_energy(self):
        """E_J'(Phi) = (E_J1+E_J2) |cos(x)| sqrt(1 + d^2 tan^2 x), x = phase/2.

        Evaluated as sqrt(cos^2 x + d^2 sin^2 x), which is identical and
        finite at half flux quantum.
        """
        x = 0.5 * self.phi_ext_squid
        d = self.asymmetry
        return (self.e_j1 + self.e_j2) * np.sqrt(
            np.cos(x) ** 2 + d**2 * np.sin(x) ** 2)


def squid_inductance(coupler: CouplerSpec) -> float:
    """Total coupler inductance L_c = M (Phi0/2pi)^2 / E_J' (H)."""
    e_eff = coupler.effective_junction_energy()
    if e_eff <= 1e-12 * (coupler.e_j1 + coupler.e_j2):
        raise DivergentInductanceError(
            "symmetric SQUID at half flux quantum: effective junction "
            "energy vanished")
    l_j = PHI0_BAR**2 / (e_eff * GHZ * H_PLANCK)
    return coupler.num_squids * l_j


def renormalized_inductances(l_r, l_q, l_c):
    """(L_r', L_q') with the galvanic corrections L_x + (parallel pair)."""
    for name, val in (("l_r", l_r), ("l_q", l_q), ("l_c", l_c)):
        if not val > 0:
            raise ValidationError("must be positive", name)
    par_qc = l_q * l_c / (l_q + l_c)
    par_rc = l_r * l_c / (l_r + l_c)
    return l_r + par_qc, l_q + par_rc


@dataclass(frozen=True)
class CouplingSet:
    """Dipole coupling rates between fluxonium transitions and the edge field."""

    g: np.ndarray              # rad/s, symmetric, zero diagonal
    g_over_omega_r: np.ndarray
    beta_l: float              # inductive participation L_c/(L_c+L_q)
    omega_r: float             # rad/s reference resonator frequency


def coupling_strengths(spectrum: FluxoniumSpectrum, l_c, l_q, z_r,
                       omega_r) -> CouplingSet:
    """g_{ll'}/omega_r = (Phi0/2pi) L_c/(L_c+L_q) (2 hbar Z_r)^(-1/2) <l|phi|l'>."""
    for name, val in (("l_c", l_c), ("l_q", l_q), ("z_r", z_r),
                      ("omega_r", omega_r)):
        if not val > 0:
            raise ValidationError("must be positive", name)
    beta = l_c / (l_c + l_q)
    ratio = PHI0_BAR * beta / np.sqrt(2 * HBAR * z_r) * spectrum.dipoles
    np.fill_diagonal(ratio, 0.0)
    return CouplingSet(ratio * omega_r, ratio, beta, omega_r)


def calibrate_coupler(flux_points, lowest_mode_ghz, chain_spec, l_q,
                      l_c_bounds=(1e-9, 30e-9), rtol=1e-10):
    """Invert the lowest lattice-mode frequency to coupler inductances.

    For each measured point the forward model loads the qubit-side edge cell
    with L_q || L_c and solves the chain eigenmodes; L_c follows by bisection
    (the shift is monotone in L_c).  Frequencies outside the modeled range
    raise :class:`CalibrationRangeError`.
    """
    from scipy.optimize import brentq

    from .lattice import ChainSpec, build_matrices, solve_eigenmodes, to_diff_com

    lowest_mode_ghz = np.atleast_1d(np.asarray(lowest_mode_ghz, dtype=float))
    flux_points = np.atleast_1d(np.asarray(flux_points, dtype=float))
    if flux_points.shape != lowest_mode_ghz.shape:
        raise ValidationError("flux and frequency arrays must align")

    def lowest(l_c):
        loaded = ChainSpec(
            num_cells=chain_spec.num_cells, l_r=chain_spec.l_r,
            c_g=chain_spec.c_g, c_c=chain_spec.c_c,
            l_r_edge=chain_spec.l_r_edge,
            edge_loading=l_q * l_c / (l_q + l_c))
        modes = solve_eigenmodes(to_diff_com(build_matrices(loaded)))
        return modes.frequencies_ghz()[0]

    lo, hi = l_c_bounds
    f_hi, f_lo = lowest(lo), lowest(hi)   # frequency decreases with L_c
    out = np.empty_like(lowest_mode_ghz)
    for i, f_meas in enumerate(lowest_mode_ghz):
        if not (f_lo - 1e-12 <= f_meas <= f_hi + 1e-12):
            raise CalibrationRangeError(
                f"measured {f_meas:.6f} GHz outside modeled range "
                f"[{f_lo:.6f}, {f_hi:.6f}] GHz for L_c in {l_c_bounds}")
        out[i] = brentq(lambda lc: lowest(lc) - f_meas, lo, hi, rtol=rtol)
    return out


def n_bar_from_power(power_w, omega, kappa):
    """Steady photon number n = P / (hbar omega kappa) of the driven mode."""
    if omega <= 0 or kappa <= 0:
        raise ValidationError("omega and kappa must be positive")
    return power_w / (HBAR * omega * kappa)


def dispersive_shift(spectrum: FluxoniumSpectrum, couplings: CouplingSet,
                     omega_k, participation, level):
    """Per-photon dispersive shift chi_{k,l} of one fluxonium level (rad/s).

    chi_{k,l} = sum_{l'} (chi_{k,ll'} - chi_{k,l'l}) with
    chi_{k,ll'} = |u_{k,0} g_{ll'}|^2 / (eps_{ll'} - omega_k) and
    eps_{ll'} = eps_l - eps_{l'} as an angular frequency.
    """
    nlev = spectrum.num_levels
    eps = spectrum.energies * GHZ * TWO_PI
    g_k = participation * couplings.g
    chi = 0.0
    for lp in range(nlev):
        if lp == level:
            continue
        for a, b, sign in ((level, lp, +1.0), (lp, level, -1.0)):
            g_ab = g_k[a, b]
            if g_ab == 0.0:
                continue
            det = (eps[a] - eps[b]) - omega_k
            if abs(det) < TWO_PI * STARK_GUARD_HZ:
                raise NearResonanceError(
                    f"transition {a}->{b} within 10 MHz of the driven mode; "
                    "dispersive formula invalid")
            chi += sign * abs(g_ab) ** 2 / det
    return chi


def stark_shift(omega_k, spectrum: FluxoniumSpectrum, couplings: CouplingSet,
                participation, n_bar, level=1):
    """ac-Stark shift (GHz) of a fluxonium level from n_bar photons in mode k.

    ``omega_k`` is the driven-mode angular frequency (rad/s) and
    ``participation`` its amplitude at the coupled edge site.
    """
    if n_bar == 0.0:
        return 0.0
    chi = dispersive_shift(spectrum, couplings, omega_k, participation, level)
    return chi * n_bar / TWO_PI / GHZ
