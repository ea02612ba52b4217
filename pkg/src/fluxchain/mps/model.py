"""Lattice + impurity model in MPS-ready form.

The multi-level atom is fused with the detuned cavity it couples to into
one supersite (local basis = cavity Fock space x atom levels), which keeps
every interaction strictly nearest-neighbor: the hopping couples adjacent
cavity modes and the dipole coupling is local to the supersite.

All Hamiltonian data are produced in dimensionless model units with the
hopping t = 1 (times in 1/t); ``energy_scale`` converts back to rad/s.
"""

from dataclasses import dataclass

import numpy as np

from ..errors import ValidationError
from ..scattering import ImpurityLatticeSpec


def destroy(dim):
    return np.diag(np.sqrt(np.arange(1, dim, dtype=float)), 1)


@dataclass(frozen=True)
class ChainGeometry:
    n_left: int
    n_right: int
    fock_cutoff: int        # number of Fock states per cavity

    def __post_init__(self):
        if self.n_left < 1 or self.n_right < 1:
            raise ValidationError("need cavities on both sides")
        if self.fock_cutoff < 2:
            raise ValidationError("must be >= 2", "fock_cutoff")

    @property
    def num_sites(self):
        return self.n_left + 1 + self.n_right

    @property
    def impurity_index(self):
        return self.n_left

    def positions(self):
        """Physical cavity coordinate per MPS site (supersite at 0)."""
        return np.arange(-self.n_left, self.n_right + 1)


class ImpurityChainModel:
    """Nearest-neighbor model for DMRG/TEBD built from an impurity spec."""

    def __init__(self, spec: ImpurityLatticeSpec, geometry: ChainGeometry):
        self.spec = spec
        self.geometry = geometry
        self.energy_scale = spec.t          # rad/s per model unit

        d = geometry.fock_cutoff
        q = spec.num_levels
        self.cavity_dim = d
        self.atom_dim = q
        self.super_dim = d * q

        self._a = destroy(d)
        self._n = self._a.T @ self._a
        self._id_cav = np.eye(d)
        self._id_atom = np.eye(q)

        # supersite operators: photon (x) atom ordering
        self.a_super = np.kron(self._a, self._id_atom)
        self.n_super = np.kron(self._n, self._id_atom)

        # model-unit parameters
        self.omega0 = spec.omega0 / spec.t
        self.delta = spec.delta / spec.t
        self.eps = spec.eps / spec.t
        self.g = spec.g / spec.t

        coupling = self._coupling_operator()
        self.h_impurity = ((self.omega0 - self.delta) * self.n_super
                           + np.kron(self._id_cav, np.diag(self.eps))
                           + coupling)

        # whether the model conserves N = sum n_x + atom level index
        offres = [(l, lp) for l in range(q) for lp in range(q)
                  if abs(l - lp) > 1 and spec.g[l, lp] != 0.0]
        self.number_conserving = spec.rwa and not offres

    def _coupling_operator(self):
        q = self.atom_dim
        up = np.zeros((q, q))       # raising part sum_{l<l'} g |l'><l|
        for l in range(q):
            for lp in range(l + 1, q):
                up[lp, l] = self.g[l, lp]
        a, adag = self._a, self._a.T
        if self.spec.rwa:
            # keep atom-raising with photon annihilation and h.c.
            return (np.kron(a, up) + np.kron(adag, up.T))
        sigma = up + up.T
        return np.kron(a + adag, sigma)

    # -- site-resolved data ---------------------------------------------

    def site_dims(self):
        g = self.geometry
        return [self.cavity_dim] * g.n_left + [self.super_dim] \
            + [self.cavity_dim] * g.n_right

    def annihilation_ops(self):
        """Per-site photon annihilation operator (embedded on the supersite)."""
        g = self.geometry
        return [self._a] * g.n_left + [self.a_super] + [self._a] * g.n_right

    def number_ops(self):
        g = self.geometry
        return [self._n] * g.n_left + [self.n_super] + [self._n] * g.n_right

    def atom_projector(self, level):
        proj = np.zeros((self.atom_dim, self.atom_dim))
        proj[level, level] = 1.0
        return np.kron(self._id_cav, proj)

    def local_terms(self):
        g = self.geometry
        h = []
        for i in range(g.num_sites):
            if i == g.impurity_index:
                h.append(self.h_impurity)
            else:
                h.append(self.omega0 * self._n)
        return h

    def bond_terms(self):
        """Two-site Hamiltonians h_{i,i+1} including split on-site parts."""
        g = self.geometry
        dims = self.site_dims()
        locals_ = self.local_terms()
        ann = self.annihilation_ops()
        n_bonds = g.num_sites - 1
        bonds = []
        for i in range(n_bonds):
            dl, dr = dims[i], dims[i + 1]
            wl = 1.0 if i == 0 else 0.5
            wr = 1.0 if i == n_bonds - 1 else 0.5
            hop = -(np.kron(ann[i].T, ann[i + 1])
                    + np.kron(ann[i], ann[i + 1].T))
            h = (hop + wl * np.kron(locals_[i], np.eye(dr))
                 + wr * np.kron(np.eye(dl), locals_[i + 1]))
            bonds.append(h)
        return bonds

    def mpo(self):
        """Nearest-neighbor MPO (bond dimension 4), W legs (wL, wR, p, p*)."""
        g = self.geometry
        dims = self.site_dims()
        locals_ = self.local_terms()
        ann = self.annihilation_ops()
        ws = []
        for i in range(g.num_sites):
            d = dims[i]
            eye = np.eye(d)
            a = ann[i]
            w = np.zeros((4, 4, d, d))
            w[0, 0] = eye
            w[0, 1] = a
            w[0, 2] = a.T
            w[0, 3] = locals_[i]
            w[1, 3] = -a.T
            w[2, 3] = -a
            w[3, 3] = eye
            ws.append(w)
        return ws

    def vacuum_state_vectors(self):
        """Per-site vectors of the bare vacuum (atom in its ground level)."""
        vecs = []
        for i, d in enumerate(self.site_dims()):
            v = np.zeros(d)
            v[0] = 1.0  # supersite index 0 = (0 photons, level 0)
            vecs.append(v)
        return vecs

    def photon_numbers(self, psi, reference=None):
        """<n_x> per site, optionally minus a reference state's profile."""
        vals = psi.expectation_values(self.number_ops()).real
        if reference is not None:
            vals = vals - reference.expectation_values(self.number_ops()).real
        return vals

    def total_excitation(self, psi):
        """<N> with N = sum_x n_x + atom level index."""
        total = self.photon_numbers(psi).sum()
        for level in range(1, self.atom_dim):
            total += level * psi.site_expectation_value(
                self.atom_projector(level), self.geometry.impurity_index).real
        return total
