"""Dense tensor-product reference for small impurity-chain systems.

Builds the full Hilbert-space Hamiltonian by Kronecker products straight
from the model's per-site operators, independent of the MPS machinery.
"""

import numpy as np


def embed(op, site, dims):
    out = np.array([[1.0]])
    for i, d in enumerate(dims):
        out = np.kron(out, op if i == site else np.eye(d))
    return out


def dense_hamiltonian(model):
    dims = model.site_dims()
    ann = model.annihilation_ops()
    h = np.zeros((int(np.prod(dims)),) * 2)
    for i, loc in enumerate(model.local_terms()):
        h = h + embed(loc, i, dims)
    for i in range(len(dims) - 1):
        ai = embed(ann[i], i, dims)
        aj = embed(ann[i + 1], i + 1, dims)
        h = h - (ai.T @ aj + ai @ aj.T)
    return h


def dense_state_from_mps(psi):
    """Contract an MPS into a full state vector (small systems only)."""
    vec = psi.Bs[0]
    for b in psi.Bs[1:]:
        vec = np.tensordot(vec, b, axes=(vec.ndim - 1, 0))
    return vec.reshape(-1)


def dense_wavepacket_injection(ground_vec, model, coeffs):
    dims = model.site_dims()
    out = np.zeros_like(ground_vec, dtype=complex)
    for i, op in enumerate(model.annihilation_ops()):
        out = out + coeffs[i] * (embed(op, i, dims).T @ ground_vec)
    return out / np.linalg.norm(out)
