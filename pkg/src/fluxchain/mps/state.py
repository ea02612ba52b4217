"""Finite matrix-product states in right-canonical B form.

Conventions follow the usual finite-MPS toy-code layout: site tensor legs
are ordered (vL, p, vR); ``Ss[i]`` holds the singular values on the bond to
the left of site ``i`` (so ``Ss[0] = [1.]``).  Local dimensions may differ
per site (the impurity supersite is larger).
"""

import numpy as np
import scipy.linalg as sla

from ..errors import ValidationError


def gauge_fix_svd(u, s, vh):
    """Fix the SVD sign/phase gauge for reproducibility.

    Each left-singular vector is rotated so its largest-magnitude entry is
    real positive; the inverse phase multiplies the corresponding row of vh.
    """
    lead = np.argmax(np.abs(u), axis=0)
    phases = u[lead, np.arange(u.shape[1])]
    phases = np.where(np.abs(phases) == 0, 1.0, phases / np.abs(phases))
    return u / phases[None, :], s, vh * phases[:, None]


def robust_svd(mat):
    try:
        return sla.svd(mat, full_matrices=False, lapack_driver="gesdd")
    except np.linalg.LinAlgError:
        return sla.svd(mat, full_matrices=False, lapack_driver="gesvd")


def split_truncate_theta(theta, chi_max, eps):
    """Split a two-site wavefunction and truncate.

    ``theta`` has legs (vL, p1, p2, vR).  Returns (A, S, B, discarded) with
    A legs (vL, p1, vC), S normalized singular values, B legs (vC, p2, vR)
    and the discarded squared weight.
    """
    chi_l, d1, d2, chi_r = theta.shape
    u, s, vh = robust_svd(theta.reshape(chi_l * d1, d2 * chi_r))
    u, s, vh = gauge_fix_svd(u, s, vh)
    s2 = s * s
    total = s2.sum()
    keep = min(chi_max, np.sum(s > 1e-14))
    if eps > 0:
        # keep the smallest number of values holding all but eps of weight
        cum = np.cumsum(s2[::-1])[::-1]  # tail weights
        above = np.nonzero(cum > eps * total)[0]
        keep = min(keep, above[-1] + 1 if above.size else 1)
    keep = max(int(keep), 1)
    discarded = s2[keep:].sum() / total
    s_kept = s[:keep]
    s_kept = s_kept / np.linalg.norm(s_kept)
    a = u[:, :keep].reshape(chi_l, d1, keep)
    b = vh[:keep, :].reshape(keep, d2, chi_r)
    return a, s_kept, b, float(discarded)


class MPS:
    """Finite MPS in right-canonical form with per-bond singular values."""

    def __init__(self, Bs, Ss):
        if len(Bs) != len(Ss):
            raise ValidationError("need one singular-value set per site")
        self.Bs = Bs
        self.Ss = Ss
        self.L = len(Bs)

    @classmethod
    def from_product_state(cls, local_states):
        """Product state from per-site vectors (normalized internally)."""
        bs, ss = [], []
        for vec in local_states:
            v = np.asarray(vec, dtype=complex)
            v = v / np.linalg.norm(v)
            bs.append(v.reshape(1, v.size, 1))
            ss.append(np.ones(1))
        return cls(bs, ss)

    def copy(self):
        return MPS([b.copy() for b in self.Bs], [s.copy() for s in self.Ss])

    @property
    def dims(self):
        return [b.shape[1] for b in self.Bs]

    def bond_dimensions(self):
        return [b.shape[0] for b in self.Bs] + [self.Bs[-1].shape[2]]

    def get_theta1(self, i):
        """Single-site wavefunction (vL, p, vR)."""
        return self.Ss[i][:, None, None] * self.Bs[i]

    def get_theta2(self, i):
        """Two-site wavefunction on sites (i, i+1): legs (vL, p, p, vR)."""
        th = np.tensordot(self.get_theta1(i), self.Bs[i + 1], axes=(2, 0))
        return th

    def put_theta2(self, i, theta, chi_max, eps):
        """SVD-split ``theta`` back into sites (i, i+1); returns discarded."""
        a, s, b, discarded = split_truncate_theta(theta, chi_max, eps)
        # convert A (left-canonical) back to B form: B_i = S_i^-1 A S_new
        sl = np.maximum(self.Ss[i], 1e-30)
        gi = np.tensordot(np.diag(1.0 / sl), a, axes=(1, 0))
        self.Bs[i] = np.tensordot(gi, np.diag(s), axes=(2, 0))
        self.Ss[i + 1] = s
        self.Bs[i + 1] = b
        return discarded

    def norm(self):
        rho = np.ones((1, 1), dtype=complex)
        for b in self.Bs:
            rho = np.tensordot(rho, b, axes=(1, 0))
            rho = np.tensordot(b.conj(), rho, axes=((0, 1), (0, 1)))
        return float(np.sqrt(abs(rho[0, 0])))

    def canonical_defect(self):
        """Largest deviation of any B tensor from the right isometry."""
        worst = 0.0
        for b in self.Bs:
            eye = np.tensordot(b, b.conj(), axes=((1, 2), (1, 2)))
            worst = max(worst, np.abs(eye - np.eye(b.shape[0])).max())
        return worst

    def site_expectation_value(self, op, i):
        th = self.get_theta1(i)
        oth = np.tensordot(op, th, axes=(1, 1))        # p [p*], vL [p] vR
        return complex(np.tensordot(th.conj(), oth, axes=((1, 0, 2),
                                                          (0, 1, 2))))

    def expectation_values(self, ops):
        """One expectation per site; ``ops`` is a list of per-site operators."""
        return np.array([self.site_expectation_value(ops[i], i)
                         for i in range(self.L)])

    def entanglement_entropy(self, bond):
        s = self.Ss[bond]
        p = s**2
        p = p[p > 1e-30]
        return float(-np.sum(p * np.log(p)))

    def overlap(self, other):
        """<self|other> for two states on the same site dimensions."""
        env = np.ones((1, 1), dtype=complex)
        for bb, bk in zip(self.Bs, other.Bs):
            env = np.tensordot(env, bk, axes=(1, 0))
            env = np.tensordot(bb.conj(), env, axes=((0, 1), (0, 1)))
        return complex(env[0, 0])

    def apply_site_operator(self, op, i):
        """In-place application of a one-site operator (no truncation)."""
        self.Bs[i] = np.tensordot(op, self.Bs[i],
                                  axes=(1, 1)).transpose(1, 0, 2)

    def sandwich_site_operators(self, other, ops_by_site):
        """<self| O_x |other> for one single-site operator at every site.

        Returns an array with one entry per requested site; computed with
        cached left/right transfer environments, O(L chi^3) total.
        """
        L = self.L
        lefts = [np.ones((1, 1), dtype=complex)]
        for i in range(L - 1):
            env = np.tensordot(lefts[-1], other.Bs[i], axes=(1, 0))
            env = np.tensordot(self.Bs[i].conj(), env, axes=((0, 1), (0, 1)))
            lefts.append(env)
        rights = [np.ones((1, 1), dtype=complex)]
        for i in range(L - 1, 0, -1):
            env = np.tensordot(other.Bs[i], rights[-1], axes=(2, 1))
            env = np.tensordot(env, self.Bs[i].conj(), axes=((1, 2), (1, 2)))
            rights.append(env)
        rights = rights[::-1]

        out = np.zeros(L, dtype=complex)
        for i, op in enumerate(ops_by_site):
            if op is None:
                continue
            mid = np.tensordot(op, other.Bs[i], axes=(1, 1))  # p vL vR
            mid = mid.transpose(1, 0, 2)
            env = np.tensordot(lefts[i], mid, axes=(1, 0))    # vLb p vR
            env = np.tensordot(self.Bs[i].conj(), env, axes=((0, 1), (0, 1)))
            out[i] = np.tensordot(env, rights[i], axes=((0, 1), (1, 0)))
        return out
