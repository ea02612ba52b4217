"""Two-site DMRG ground-state search for nearest-neighbor MPO models."""

import numpy as np
import scipy.sparse.linalg as spla

from ..errors import ConvergenceError
from .state import MPS


class SweepEngine:
    """Holds the MPS, the MPO and the cached environments.

    ``LPs[i]`` is the contraction of everything left of site i with legs
    (bra_vL, wL, ket_vL); ``RPs[i]`` everything right of site i with legs
    (bra_vR, wR, ket_vR).
    """

    def __init__(self, psi: MPS, mpo):
        self.psi = psi
        self.mpo = mpo
        self.L = psi.L
        wdim = mpo[0].shape[0]
        lp = np.zeros((1, wdim, 1))
        lp[0, 0, 0] = 1.0
        rp = np.zeros((1, wdim, 1))
        rp[0, -1, 0] = 1.0
        self.LPs = [None] * self.L
        self.RPs = [None] * self.L
        self.LPs[0] = lp
        self.RPs[-1] = rp
        for i in range(self.L - 1, 0, -1):
            self.update_RP(i)

    def update_LP(self, i):
        """LP[i+1] from LP[i] and the left-canonical tensor at site i."""
        b = self.psi.Bs[i]
        s_l = self.psi.Ss[i]
        s_r = np.maximum(self.psi.Ss[i + 1], 1e-30)
        a = (s_l[:, None, None] * b) / s_r[None, None, :]       # A = S B S^-1
        lp = np.tensordot(self.LPs[i], a, axes=(2, 0))          # vLb wL p vR
        lp = np.tensordot(lp, self.mpo[i], axes=((1, 2), (0, 3)))  # vLb vR wR p
        lp = np.tensordot(a.conj(), lp, axes=((0, 1), (0, 3)))  # vRb vR wR
        self.LPs[i + 1] = lp.transpose(0, 2, 1)

    def update_RP(self, i):
        """RP[i-1] from RP[i] and the right-canonical tensor at site i."""
        b = self.psi.Bs[i]
        rp = np.tensordot(b, self.RPs[i], axes=(2, 2))          # vL p vRb wR
        rp = np.tensordot(rp, self.mpo[i], axes=((1, 3), (3, 1)))  # vL vRb wL p
        rp = np.tensordot(rp, b.conj(), axes=((1, 3), (2, 1)))  # vL wL vLb
        self.RPs[i - 1] = rp.transpose(2, 1, 0)

    def energy(self):
        """<psi|H|psi> via a fresh left-to-right contraction."""
        env = self.LPs[0]
        for i in range(self.L):
            b = self.psi.Bs[i]
            env = np.tensordot(env, b, axes=(2, 0))
            env = np.tensordot(env, self.mpo[i], axes=((1, 2), (0, 3)))
            env = np.tensordot(b.conj(), env, axes=((0, 1), (0, 3)))
            env = env.transpose(0, 2, 1)
        return float(env[0, -1, 0].real)


class _EffectiveHamiltonian(spla.LinearOperator):
    """Two-site effective Hamiltonian as a matrix-free operator."""

    def __init__(self, lp, w1, w2, rp):
        self.lp, self.w1, self.w2, self.rp = lp, w1, w2, rp
        self.shape_theta = (lp.shape[2], w1.shape[3], w2.shape[3], rp.shape[2])
        dim = int(np.prod(self.shape_theta))
        super().__init__(dtype=np.complex128, shape=(dim, dim))

    def _matvec(self, vec):
        th = vec.reshape(self.shape_theta)                  # vL p1 p2 vR
        x = np.tensordot(self.lp, th, axes=(2, 0))          # vLb wL p1 p2 vR
        x = np.tensordot(x, self.w1, axes=((1, 2), (0, 3)))  # vLb p2 vR w p1
        x = np.tensordot(x, self.w2, axes=((3, 1), (0, 3)))  # vLb vR p1 w p2
        x = np.tensordot(x, self.rp, axes=((1, 3), (2, 1)))  # vLb p1 p2 vRb
        return x.reshape(-1)


def dmrg_ground_state(model, chi_max=64, svd_cutoff=1e-10, max_sweeps=40,
                      energy_tol=1e-10, psi0=None):
    """Variational ground-state search.

    Returns (psi, energy, info) where ``info`` carries the per-sweep energy
    trace and truncation diagnostics.  Raises :class:`ConvergenceError` with
    the trace attached when ``max_sweeps`` is exhausted.
    """
    if psi0 is None:
        psi = MPS.from_product_state(model.vacuum_state_vectors())
    else:
        psi = psi0.copy()
    eng = SweepEngine(psi, model.mpo())
    energies = [eng.energy()]
    discarded_max = 0.0

    for sweep in range(max_sweeps):
        for i in list(range(psi.L - 1)) + list(range(psi.L - 2, -1, -1)):
            lp, rp = eng.LPs[i], eng.RPs[i + 1]
            heff = _EffectiveHamiltonian(lp, eng.mpo[i], eng.mpo[i + 1], rp)
            theta0 = psi.get_theta2(i).reshape(-1)
            if heff.shape[0] <= 64:
                hmat = heff @ np.eye(heff.shape[0], dtype=complex)
                evals, evecs = np.linalg.eigh(0.5 * (hmat + hmat.T.conj()))
                theta = evecs[:, 0]
            else:
                evals, evecs = spla.eigsh(heff, k=1, which="SA", v0=theta0)
                theta = evecs[:, 0]
            disc = psi.put_theta2(i, theta.reshape(heff.shape_theta),
                                  chi_max, svd_cutoff)
            discarded_max = max(discarded_max, disc)
            eng.update_LP(i)
            eng.update_RP(i + 1)
        energies.append(eng.energy())
        if abs(energies[-1] - energies[-2]) < energy_tol:
            info = {"sweeps": sweep + 1, "energies": energies,
                    "max_discarded_weight": discarded_max,
                    "converged": True}
            return psi, energies[-1], info

    raise ConvergenceError(
        f"DMRG did not converge in {max_sweeps} sweeps "
        f"(last change {abs(energies[-1] - energies[-2]):.2e})",
        trace=energies)
