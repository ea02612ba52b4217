"""Single-photon scattering: analytic RWA amplitudes, the two-level
waveguide lineshape, and excitation-truncated exact diagonalization for
multi-photon bound states.

The lattice-plus-impurity model is an infinite uniform chain (site frequency
omega0, hopping t) with one detuned site at the origin (detuning delta) that
carries the local dipole coupling to the multi-level atom.
"""

from dataclasses import dataclass, field
from enum import Enum

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla
from scipy.optimize import least_squares

from .device import OperatingPoint
from .errors import ResourceLimitError, ValidationError
from .units import GHZ, TWO_PI


class Provenance(str, Enum):
    ANALYTIC_RWA = "analytic_rwa"
    EXACT_DIAG = "exact_diag"
    MPS = "mps"


@dataclass(frozen=True)
class ImpurityLatticeSpec:
    """Uniform chain with one detuned, atom-coupled site at the origin.

    ``eps`` are atom level energies relative to the ground level and ``g``
    the symmetric coupling-rate matrix, both as angular frequencies (rad/s).
    ``rwa`` drops the counter-rotating parts of the dipole coupling (terms
    that raise the atom while creating a photon, and their conjugates).
    """

    omega0: float
    t: float
    delta: float
    eps: np.ndarray
    g: np.ndarray
    rwa: bool = False

    def __post_init__(self):
        if not self.t > 0:
            raise ValidationError("must be positive", "t")
        eps = np.asarray(self.eps, dtype=float)
        g = np.asarray(self.g, dtype=float)
        if eps.size < 2:
            raise ValidationError("need at least two atom levels", "eps")
        if g.shape != (eps.size, eps.size):
            raise ValidationError("coupling matrix must be square over levels",
                                  "g")
        object.__setattr__(self, "eps", eps)
        object.__setattr__(self, "g", 0.5 * (g + g.T))

    @property
    def num_levels(self):
        return self.eps.size

    def band_edges(self):
        return self.omega0 - 2 * self.t, self.omega0 + 2 * self.t


def impurity_spec_from_operating_point(op: OperatingPoint, num_levels=None,
                                       rwa=False) -> ImpurityLatticeSpec:
    nlev = num_levels if num_levels is not None else op.spectrum.num_levels
    eps = (op.spectrum.energies[:nlev] - op.spectrum.energies[0]) * TWO_PI * GHZ
    return ImpurityLatticeSpec(
        omega0=op.omega_bulk, t=op.hopping, delta=op.delta,
        eps=eps, g=op.couplings.g[:nlev, :nlev], rwa=rwa)


@dataclass(frozen=True)
class ScatteringResult:
    k: np.ndarray
    transmission: np.ndarray
    reflection: np.ndarray | None
    provenance: Provenance
    omega: np.ndarray | None = None

    def unitarity_defect(self):
        if self.reflection is None:
            return None
        return np.abs(np.abs(self.transmission) ** 2
                      + np.abs(self.reflection) ** 2 - 1.0)


def rwa_coefficients(spec: ImpurityLatticeSpec, k) -> ScatteringResult:
    """Elastic amplitudes for the two-level RWA model at momenta k in (0, pi).

    T_k = -2 i t sin k / D and R_k = -(G - delta) / D with
    D = G(k) - delta - 2 i t sin k and G(k) = g^2 / (omega_k - Delta).
    This pair satisfies |T|^2 + |R|^2 = 1 identically and reproduces the
    resonant limits T -> 0 at omega_k = Delta and T -> 1 at
    omega_k = Delta + g^2/delta.  At exact atom resonance the limit values
    (T, R) = (0, -1) are returned.
    """
    if not spec.rwa:
        raise ValidationError("analytic coefficients require rwa=True", "rwa")
    k = np.atleast_1d(np.asarray(k, dtype=float))
    if np.any(k <= 0) or np.any(k >= np.pi):
        raise ValidationError("momenta must lie in (0, pi)", "k")
    delta_q = spec.eps[1] - spec.eps[0]
    g = spec.g[0, 1]
    omega_k = spec.omega0 - 2 * spec.t * np.cos(k)
    tvals = np.empty(k.size, dtype=complex)
    rvals = np.empty(k.size, dtype=complex)
    resonant = omega_k == delta_q
    with np.errstate(divide="ignore", invalid="ignore"):
        green = np.where(resonant, np.inf, g**2 / (omega_k - delta_q))
        den = green - spec.delta - 2j * spec.t * np.sin(k)
        tvals = np.where(resonant, 0.0, -2j * spec.t * np.sin(k) / den)
        rvals = np.where(resonant, -1.0, -(green - spec.delta) / den)
    return ScatteringResult(k, tvals, rvals, Provenance.ANALYTIC_RWA,
                            omega=omega_k)


def two_level_transmission(omega_p, gamma1, gamma2, eps01):
    """Weak-drive waveguide transmission T = 1 - (Gamma1/2)/(Gamma2 + i Delta).

    All arguments share one frequency unit; Delta = omega_p - eps01.
    """
    if not gamma2 > 0:
        raise ValidationError("must be positive", "gamma2")
    detuning = np.asarray(omega_p, dtype=float) - eps01
    return 1.0 - 0.5 * gamma1 / (gamma2 + 1j * detuning)


def fit_two_level_transmission(freqs, amplitudes, guess):
    """Fit |T| peak amplitudes to the two-level lineshape.

    The decoherence rate is parametrized as Gamma2 = Gamma1/2 + Gamma_phi
    with Gamma_phi >= 0, which removes the over-/under-coupled branch
    ambiguity of |T| (only Gamma1 <= 2 Gamma2 is physical).  ``guess`` is
    (gamma1, gamma2, eps01); returns the fitted (gamma1, gamma2, eps01).
    """
    freqs = np.asarray(freqs, dtype=float)
    amplitudes = np.asarray(amplitudes, dtype=float)
    g1_0, g2_0, e_0 = guess
    x0 = np.array([g1_0, max(g2_0 - g1_0 / 2, 1e-6), e_0])

    def resid(p):
        g1, g_phi, e01 = p
        model = two_level_transmission(freqs, g1, g1 / 2 + g_phi, e01)
        return np.abs(model) - amplitudes

    out = least_squares(resid, x0=x0,
                        bounds=([0.0, 0.0, freqs.min() - 10],
                                [np.inf, np.inf, freqs.max() + 10]))
    g1, g_phi, e01 = out.x
    return g1, g1 / 2 + g_phi, e01


# -- excitation-truncated exact diagonalization ------------------------------

@dataclass(frozen=True)
class BoundStateSpectrum:
    """Eigenstates grouped by dominant excitation sector.

    ``states`` maps sector label N to a list of (energy, ipr) tuples.
    Energies are measured from the vacuum-like reference eigenstate (the one
    with maximal overlap with the bare photon vacuum and atom ground level;
    in the full model this is the dressed ground state).  Only states whose
    photonic envelope is localized (participation ratio below half the
    lattice) are listed.  ``band`` holds the bare single-particle band edges.
    """

    states: dict
    band: tuple
    n_max: int
    lattice_size: int
    reference_energy: float
    reference_overlap: float
    all_energies: np.ndarray

    @property
    def ground_energy(self):
        return self.reference_energy


def _enumerate_configs(n_sites, max_total):
    """All photon occupation tuples with sum <= max_total, as sparse lists."""
    configs = [()]  # each config: tuple of (site, occupation), site-sorted
    for total in range(1, max_total + 1):
        def rec(start, remaining, current):
            for site in range(start, n_sites):
                for n in range(1, remaining + 1):
                    cfg = current + ((site, n),)
                    if n == remaining:
                        configs.append(cfg)
                    else:
                        rec(site + 1, remaining - n, cfg)
        rec(0, total, ())
    return configs


def _config_sum(cfg):
    return sum(n for _, n in cfg)


def _config_add(cfg, site, dn):
    d = dict(cfg)
    d[site] = d.get(site, 0) + dn
    if d[site] < 0:
        return None
    if d[site] == 0:
        del d[site]
    return tuple(sorted(d.items()))


def build_truncated_hamiltonian(spec: ImpurityLatticeSpec, n_max,
                                lattice_size, dim_cap=400_000):
    """Sparse Hamiltonian over states with (photons + atom level) <= n_max.

    The lattice has ``lattice_size`` sites centered on the impurity.
    Returns (H, basis, occupation) where ``basis`` is a list of
    (level, config) pairs and ``occupation`` the per-state photon occupation
    matrix used for envelope diagnostics.
    """
    if lattice_size % 2 == 0:
        raise ValidationError("lattice_size must be odd (centered impurity)",
                              "lattice_size")
    x_imp = lattice_size // 2
    nlev = spec.num_levels

    photon_configs = _enumerate_configs(lattice_size, n_max)
    basis = []
    for level in range(min(nlev, n_max + 1)):
        budget = n_max - level
        for cfg in photon_configs:
            if _config_sum(cfg) <= budget:
                basis.append((level, cfg))
    dim = len(basis)
    if dim > dim_cap:
        raise ResourceLimitError(
            f"truncated Hilbert space needs dimension {dim} > cap {dim_cap}")
    index = {state: i for i, state in enumerate(basis)}

    site_omega = np.full(lattice_size, spec.omega0)
    site_omega[x_imp] -= spec.delta

    rows, cols, vals = [], [], []
    occupation = np.zeros((dim, lattice_size))

    def add(i, j, v):
        rows.append(i)
        cols.append(j)
        vals.append(v)

    for i, (level, cfg) in enumerate(basis):
        diag = spec.eps[level]
        for site, n in cfg:
            diag += n * site_omega[site]
            occupation[i, site] = n
        add(i, i, diag)

        occ = dict(cfg)
        # hopping -t (a_s^+ a_{s'} + h.c.): enumerate annihilation site
        for site, n in cfg:
            for nb in (site - 1, site + 1):
                if not 0 <= nb < lattice_size:
                    continue
                cfg2 = _config_add(_config_add(cfg, site, -1), nb, +1)
                j = index.get((level, cfg2))
                if j is not None:
                    amp = -spec.t * np.sqrt(n) * np.sqrt(occ.get(nb, 0) + 1)
                    add(j, i, amp)
        # atom-photon coupling at the impurity site
        n0 = occ.get(x_imp, 0)
        for level2 in range(min(nlev, n_max + 1)):
            if level2 == level:
                continue
            g = spec.g[level, level2]
            if g == 0.0:
                continue
            raising_atom = level2 > level
            # photon annihilation: always present
            if n0 > 0:
                cfg2 = _config_add(cfg, x_imp, -1)
                j = index.get((level2, cfg2))
                if j is not None:
                    keep = (not spec.rwa) or raising_atom
                    if keep:
                        add(j, i, g * np.sqrt(n0))
            # photon creation: counter-rotating when the atom is raised
            cfg2 = _config_add(cfg, x_imp, +1)
            j = index.get((level2, cfg2))
            if j is not None:
                keep = (not spec.rwa) or (not raising_atom)
                if keep:
                    add(j, i, g * np.sqrt(n0 + 1))

    h = sp.coo_matrix((vals, (rows, cols)), shape=(dim, dim)).tocsr()
    defect = abs(h - h.T).max()
    assert defect < 1e-9 * max(abs(spec.omega0), spec.t), "H must be symmetric"
    return h, basis, occupation


def bound_state_spectrum(spec: ImpurityLatticeSpec, n_max=3, lattice_size=41,
                         num_states=40, dim_cap=400_000,
                         method="sparse") -> BoundStateSpectrum:
    """Spectrum of the truncated model with bound-state labels.

    ``method='sparse'`` computes the lowest ``num_states`` eigenpairs (enough
    for single-excitation work and for multi-photon branches once they have
    descended near the single-particle band); ``method='dense'`` computes the
    full spectrum, which is what sector-resolved searches at weak coupling
    need (dimension-capped).  States are classified by photonic-envelope
    participation ratio (< lattice_size/2 means localized) and labeled by
    their dominant total excitation number.
    """
    h, basis, occupation = build_truncated_hamiltonian(
        spec, n_max, lattice_size, dim_cap)
    dim = h.shape[0]
    if method == "dense":
        if dim > 6000:
            raise ResourceLimitError(
                f"dense diagonalization refused for dimension {dim} > 6000")
        evals, evecs = np.linalg.eigh(h.toarray())
    else:
        k = min(num_states, dim - 2)
        evals, evecs = spla.eigsh(h, k=k, which="SA")
        order = np.argsort(evals)
        evals, evecs = evals[order], evecs[:, order]

    weights = np.abs(evecs) ** 2                       # (dim, n_eigs)
    # reference: eigenstate with maximal bare-vacuum overlap (basis index 0
    # is always (level 0, no photons))
    ref = int(np.argmax(weights[0, :]))
    ref_energy = float(evals[ref])
    ref_overlap = float(weights[0, ref])

    n_total = np.array([_config_sum(cfg) + lev for lev, cfg in basis])
    one_hot = np.zeros((dim, n_max + 1))
    one_hot[np.arange(dim), n_total] = 1.0
    sector_weights = weights.T @ one_hot               # (n_eigs, n_max+1)
    envelopes = weights.T @ occupation                 # (n_eigs, sites)

    states: dict = {}
    for i in range(evals.size):
        sector = int(np.argmax(sector_weights[i]))
        if i == ref or sector == 0:
            continue
        total_photons = envelopes[i].sum()
        if total_photons < 1e-9:
            continue
        p = envelopes[i] / total_photons
        ipr = 1.0 / np.sum(p**2)
        if ipr >= lattice_size / 2:
            continue
        states.setdefault(sector, []).append(
            (float(evals[i] - ref_energy), float(ipr)))

    band = (spec.omega0 - 2 * spec.t, spec.omega0 + 2 * spec.t)
    return BoundStateSpectrum(states, band, n_max, lattice_size, ref_energy,
                              ref_overlap, evals - ref_energy)
