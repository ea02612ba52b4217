"""Second-order TEBD real-time evolution for nearest-neighbor models."""

from dataclasses import dataclass

import numpy as np
import scipy.linalg as sla

from ..errors import ValidationError


@dataclass(frozen=True)
class EvolutionConfig:
    """Time-step, bond and truncation controls for real-time evolution.

    ``t_end`` is the maximum evolution time (model units, 1/t); plateau
    detection may stop earlier.  ``truncation_budget`` is the accumulated
    discarded-weight level above which results are flagged.
    """

    dt: float = 0.05
    t_end: float = 120.0
    chi_max: int = 64
    svd_cutoff: float = 1e-9
    scheme: str = "second_order_local_gates"
    measure_every: int = 20
    plateau_rtol: float = 1e-3
    truncation_budget: float = 1e-3

    def __post_init__(self):
        if self.dt <= 0:
            raise ValidationError("must be positive", "dt")
        if self.chi_max < 8:
            raise ValidationError("must be >= 8", "chi_max")
        if self.scheme != "second_order_local_gates":
            raise ValidationError(f"unknown scheme {self.scheme!r}", "scheme")


def bond_gates(bond_terms, dims, dt):
    """exp(-i h dt) per bond, reshaped to (p_i, p_j, p_i*, p_j*)."""
    gates = []
    for i, h in enumerate(bond_terms):
        dl, dr = dims[i], dims[i + 1]
        u = sla.expm(-1j * dt * h)
        gates.append(u.reshape(dl, dr, dl, dr))
    return gates


def apply_gate(psi, i, gate, chi_max, eps):
    """Apply a two-site gate at bond i; returns the discarded weight."""
    theta = psi.get_theta2(i)                                # vL p1 p2 vR
    theta = np.tensordot(gate, theta, axes=((2, 3), (1, 2)))  # p1 p2 vL vR
    theta = theta.transpose(2, 0, 1, 3)
    return psi.put_theta2(i, theta, chi_max, eps)


def sweep_second_order(psi, gates_half, gates_full, chi_max, eps):
    """One second-order step: half even, full odd, half even."""
    discarded = 0.0
    n_bonds = len(gates_full)
    for parity, gates in ((0, gates_half), (1, gates_full), (0, gates_half)):
        for i in range(parity, n_bonds, 2):
            discarded += apply_gate(psi, i, gates[i], chi_max, eps)
    return discarded
