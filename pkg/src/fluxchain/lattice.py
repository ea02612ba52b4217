"""Circuit matrices and eigenmodes of the capacitively coupled resonator chain.

The chain of lumped-element resonators is described by its capacitance and
inverse-inductance matrices.  Three coordinate bases are supported:

* ``node``      -- one flux per circuit node (2M coordinates),
* ``diff_com``  -- differential / center-of-mass combinations per cell
  (2M coordinates, ordered [diff_0..diff_{M-1}, com_0..com_{M-1}]),
* ``diff_only`` -- the M differential coordinates with the COM block simply
  dropped.  This discards the diff-COM voltage coupling, so its spectrum
  differs from the exact one by a renormalization of the effective hopping;
  both spectra are exposed so the difference is observable.

Eigenmodes are obtained from the symmetric generalized problem
L^-1 x = omega^2 C x; the non-symmetric product C^-1 L^-1 is never formed.
"""

from dataclasses import dataclass, field
from enum import Enum

import numpy as np
import scipy.linalg as sla

from .errors import IllConditionedError, UsageError, ValidationError

ZERO_MODE_REL_THRESHOLD = 1e-6


class Basis(str, Enum):
    NODE = "node"
    DIFF_COM = "diff_com"
    DIFF_ONLY = "diff_only"


@dataclass(frozen=True)
class ChainSpec:
    """Lumped-element parameters of the resonator chain.

    Parameters
    ----------
    num_cells : int
        Number of unit cells M (>= 2 for a chain; 1 is allowed for the
        single-oscillator limit).
    l_r : float
        Bulk cell inductance (H).
    c_g : float
        Capacitance to ground per node (F).
    c_c : float
        Coupling capacitance between neighboring cells (F).
    l_r_edge : float or None
        Bare inductance of the qubit-side edge cell (cell 0) before any
        coupler loading.  Defaults to ``l_r``.
    edge_loading : float or None
        Extra effective series inductance (H) added to cell 0 by the
        coupler/qubit circuit, typically the parallel combination of the
        qubit and coupler inductances.  None means no loading.
    """

    num_cells: int
    l_r: float
    c_g: float
    c_c: float
    l_r_edge: float | None = None
    edge_loading: float | None = None

    def __post_init__(self):
        if self.num_cells < 1:
            raise ValidationError("num_cells must be >= 1", "num_cells")
        for name in ("l_r", "c_g", "c_c"):
            if not getattr(self, name) > 0:
                raise ValidationError("must be strictly positive", name)
        if self.l_r_edge is not None and not self.l_r_edge > 0:
            raise ValidationError("must be strictly positive", "l_r_edge")
        if self.edge_loading is not None and not self.edge_loading > 0:
            raise ValidationError("must be strictly positive", "edge_loading")

    @property
    def c_sigma(self):
        """Total node capacitance C_g + C_c (F)."""
        return self.c_g + self.c_c

    def cell_inductances(self):
        """Effective inductance per cell (H); cell 0 carries the edge loading."""
        ls = np.full(self.num_cells, self.l_r)
        ls[0] = (self.l_r_edge if self.l_r_edge is not None else self.l_r)
        if self.edge_loading is not None:
            ls[0] += self.edge_loading
        return ls


@dataclass(frozen=True)
class CircuitMatrices:
    """Capacitance and inverse-inductance matrices in a tagged basis."""

    c_mat: np.ndarray
    linv_mat: np.ndarray
    basis: Basis

    def __post_init__(self):
        c = np.array(self.c_mat, dtype=float)
        linv = np.array(self.linv_mat, dtype=float)
        if c.shape != linv.shape or c.ndim != 2 or c.shape[0] != c.shape[1]:
            raise ValidationError("matrices must be square and same shape")
        if not np.allclose(c, c.T, rtol=0, atol=1e-12 * np.abs(c).max()):
            raise ValidationError("capacitance matrix must be symmetric")
        if not np.allclose(linv, linv.T, rtol=0,
                           atol=1e-12 * max(np.abs(linv).max(), 1.0)):
            raise ValidationError("inverse-inductance matrix must be symmetric")
        try:
            np.linalg.cholesky(c)
        except np.linalg.LinAlgError as exc:
            raise IllConditionedError(
                "capacitance matrix is not positive definite") from exc
        c.flags.writeable = False
        linv.flags.writeable = False
        object.__setattr__(self, "c_mat", c)
        object.__setattr__(self, "linv_mat", linv)

    @property
    def size(self):
        return self.c_mat.shape[0]


@dataclass(frozen=True)
class EigenmodeSet:
    """Normal modes of the chain.

    ``frequencies`` are the positive square roots of the nonzero generalized
    eigenvalues, ascending (rad/s).  ``mode_vectors`` hold the corresponding
    eigenvectors as columns, orthonormal in the capacitance metric
    (v^T C v = 1).  ``participation`` holds, per mode (rows), the
    unit-normalized amplitude over the M differential site coordinates.
    """

    frequencies: np.ndarray
    mode_vectors: np.ndarray
    participation: np.ndarray
    num_zero_modes: int
    basis: Basis

    def frequencies_ghz(self):
        return self.frequencies / (2 * np.pi) / 1e9


@dataclass(frozen=True)
class TightBindingModel:
    """Site-resolved oscillator model extracted from the circuit matrices.

    ``omega`` are on-site frequencies (rad/s), ``impedance`` the site
    impedances (ohm).  ``coupling`` is the full symmetric matrix
    t_ij = -1/2 (Z_i Z_j)^(-1/2) [C^-1]_ij (rad/s, zero diagonal).  Only the
    first off-diagonal represents physical nearest-neighbor hopping; the
    remaining entries are the small capacitive tails that make the quadratic
    model exactly equivalent to the circuit Lagrangian.
    """

    omega: np.ndarray
    coupling: np.ndarray
    impedance: np.ndarray
    edge_site: int = 0

    @property
    def hopping(self):
        """Nearest-neighbor hopping rates t_{j,j+1} (rad/s), signed."""
        return np.diag(self.coupling, k=1)

    def bulk_omega(self):
        """On-site frequency of the central bulk sites (rad/s)."""
        m = len(self.omega)
        return float(np.median(self.omega[m // 3: 2 * m // 3 + 1]))

    def bulk_hopping(self):
        """Magnitude of the nearest-neighbor hopping in the bulk (rad/s)."""
        t = self.hopping
        m = len(t)
        return float(np.median(np.abs(t[m // 3: 2 * m // 3 + 1])))

    def single_particle_matrix(self):
        """M x M one-excitation Hamiltonian (diag omega, off-diag -t), rad/s."""
        h = np.diag(self.omega).astype(float)
        t = self.hopping
        for j, tj in enumerate(t):
            h[j, j + 1] = h[j + 1, j] = -tj
        return h


def build_matrices(spec: ChainSpec) -> CircuitMatrices:
    """Node-basis capacitance and inverse-inductance matrices.

    The diagonal of C is C_sigma = C_g + C_c everywhere (ports grounded),
    with -C_c between capacitively coupled nodes of adjacent cells; L^-1 is
    block diagonal with (1/L) [[1, -1], [-1, 1]] per cell.
    """
    m = spec.num_cells
    n = 2 * m
    c = np.zeros((n, n))
    linv = np.zeros((n, n))
    ls = spec.cell_inductances()
    for cell in range(m):
        a, b = 2 * cell, 2 * cell + 1
        c[a, a] += spec.c_sigma
        c[b, b] += spec.c_sigma
        linv[a, a] += 1.0 / ls[cell]
        linv[b, b] += 1.0 / ls[cell]
        linv[a, b] -= 1.0 / ls[cell]
        linv[b, a] -= 1.0 / ls[cell]
        if cell < m - 1:
            c[b, b + 1] = c[b + 1, b] = -spec.c_c
    return CircuitMatrices(c, linv, Basis.NODE)


def _pm_transform(m):
    """Rows of the node -> diff/COM map: diff_n = phi_{2n+1} - phi_{2n}."""
    u = np.zeros((2 * m, 2 * m))
    for cell in range(m):
        u[cell, 2 * cell + 1] = 1.0
        u[cell, 2 * cell] = -1.0
        u[m + cell, 2 * cell + 1] = 1.0
        u[m + cell, 2 * cell] = 1.0
    return u


def to_diff_com(mats: CircuitMatrices) -> CircuitMatrices:
    """Transform node-basis matrices to the differential/COM basis.

    The congruence uses U^-1 = U^T / 2, so the round trip
    ``node -> diff_com -> node`` is exact up to floating point.
    """
    if mats.basis is not Basis.NODE:
        raise UsageError(f"expected node basis, got {mats.basis.value}")
    m = mats.size // 2
    u = _pm_transform(m)
    c = 0.25 * u @ mats.c_mat @ u.T
    linv = 0.25 * u @ mats.linv_mat @ u.T
    return CircuitMatrices(c, linv, Basis.DIFF_COM)


def from_diff_com(mats: CircuitMatrices) -> CircuitMatrices:
    """Invert :func:`to_diff_com`."""
    if mats.basis is not Basis.DIFF_COM:
        raise UsageError(f"expected diff_com basis, got {mats.basis.value}")
    m = mats.size // 2
    u = _pm_transform(m)
    return CircuitMatrices(u.T @ mats.c_mat @ u, u.T @ mats.linv_mat @ u,
                           Basis.NODE)


def to_diff_only(mats: CircuitMatrices) -> CircuitMatrices:
    """Truncate the diff/COM matrices to the differential block.

    This drops the diff-COM voltage coupling entirely; the resulting
    spectrum carries an observable hopping renormalization relative to the
    exact diff_com result.
    """
    if mats.basis is Basis.NODE:
        mats = to_diff_com(mats)
    if mats.basis is not Basis.DIFF_COM:
        raise UsageError(f"expected node or diff_com basis, got {mats.basis.value}")
    m = mats.size // 2
    return CircuitMatrices(mats.c_mat[:m, :m].copy(),
                           mats.linv_mat[:m, :m].copy(), Basis.DIFF_ONLY)


def _diff_projection(vectors, basis, m):
    """Differential-coordinate amplitude of each eigenvector column."""
    if basis is Basis.DIFF_ONLY:
        return vectors.T.copy()
    if basis is Basis.DIFF_COM:
        return vectors[:m, :].T.copy()
    # node basis: diff_n = phi_{2n+1} - phi_{2n}
    return (vectors[1::2, :] - vectors[0::2, :]).T.copy()


def solve_eigenmodes(mats: CircuitMatrices) -> EigenmodeSet:
    """Normal-mode frequencies and vectors of the chain.

    Solves L^-1 x = omega^2 C x as a symmetric-definite generalized
    eigenproblem.  Eigenvalues below ``ZERO_MODE_REL_THRESHOLD`` times the
    median nonzero eigenvalue are classified as static COM modes and
    excluded from the returned frequencies.
    """
    try:
        evals, evecs = sla.eigh(mats.linv_mat, mats.c_mat)
    except np.linalg.LinAlgError as exc:
        raise IllConditionedError("generalized eigensolve failed") from exc
    evals = np.clip(evals, 0.0, None)
    scale = np.median(evals[evals > 1e-12 * evals.max()]) if evals.max() > 0 else 0.0
    nonzero = evals > ZERO_MODE_REL_THRESHOLD * scale
    num_zero = int(np.sum(~nonzero))
    freqs = np.sqrt(evals[nonzero])
    vecs = evecs[:, nonzero]
    order = np.argsort(freqs)
    freqs = freqs[order]
    vecs = vecs[:, order]

    m = mats.size if mats.basis is Basis.DIFF_ONLY else mats.size // 2
    part = _diff_projection(vecs, mats.basis, m)
    norms = np.linalg.norm(part, axis=1)
    norms[norms == 0] = 1.0
    part = part / norms[:, None]
    for row in part:
        lead = np.argmax(np.abs(row) > 0.1 * np.abs(row).max())
        if row[lead] < 0:
            row *= -1.0
    return EigenmodeSet(freqs, vecs, part, num_zero, mats.basis)


def extract_tight_binding(mats: CircuitMatrices,
                          spec: ChainSpec | None = None) -> TightBindingModel:
    """Extract on-site frequencies, couplings and impedances.

    Uses omega_j = sqrt([L^-1]_jj [C^-1]_jj), Z_j = sqrt([C^-1]_jj/[L^-1]_jj)
    and t_ij = -1/2 (Z_i Z_j)^(-1/2) [C^-1]_ij on the differential block.
    For diff_com input the inverse of the full matrix is taken first, so the
    COM-mediated renormalization is included; for diff_only input the
    truncated block is inverted as-is.
    """
    if mats.basis is Basis.NODE:
        mats = to_diff_com(mats)
    if mats.basis is Basis.DIFF_COM:
        m = mats.size // 2
        cinv = np.linalg.inv(mats.c_mat)[:m, :m]
        linv_diag = np.diag(mats.linv_mat)[:m]
    elif mats.basis is Basis.DIFF_ONLY:
        m = mats.size
        cinv = np.linalg.inv(mats.c_mat)
        linv_diag = np.diag(mats.linv_mat)
    else:  # pragma: no cover - exhaustive enum
        raise UsageError(f"unsupported basis {mats.basis.value}")

    cinv_diag = np.diag(cinv)
    omega = np.sqrt(linv_diag * cinv_diag)
    z = np.sqrt(cinv_diag / linv_diag)
    coupling = -0.5 * cinv / np.sqrt(np.outer(z, z))
    np.fill_diagonal(coupling, 0.0)
    return TightBindingModel(omega, coupling, z, edge_site=0)


def fit_cosine_dispersion(frequencies):
    """Least-squares fit of ascending mode frequencies to a cosine band.

    Fits f_n = f_c - 2 J cos(n pi / (M+1)), n = 1..M, returning (f_c, J) in
    the units of ``frequencies``.
    """
    freqs = np.asarray(frequencies, dtype=float)
    m = freqs.size
    ns = np.arange(1, m + 1)
    design = np.column_stack([np.ones(m), -2 * np.cos(ns * np.pi / (m + 1))])
    (fc, j), *_ = np.linalg.lstsq(design, freqs, rcond=None)
    return float(fc), float(j)
