"""Self-describing binary checkpoints for MPS states.

Layout: an 8-byte magic, a little-endian uint32 header length, a JSON
header (site count, local dims, bond dims, truncation settings, model
hash), then the site tensors followed by the singular-value vectors as
little-endian complex64 / float32 raw blocks in index order.
"""

import json
import struct

import numpy as np

from ..errors import ValidationError
from .state import MPS

MAGIC = b"FXCMPS01"


def model_fingerprint(model):
    """Stable hash of the model parameters, for checkpoint provenance."""
    import hashlib

    parts = [model.geometry.n_left, model.geometry.n_right,
             model.geometry.fock_cutoff, model.spec.rwa,
             round(model.omega0, 12), round(model.delta, 12),
             tuple(np.round(model.eps, 12)),
             tuple(np.round(np.asarray(model.g).ravel(), 12))]
    return hashlib.sha256(repr(parts).encode()).hexdigest()[:16]


def save_mps(path, psi: MPS, meta=None):
    header = {
        "sites": psi.L,
        "dims": psi.dims,
        "bond_dims": psi.bond_dimensions(),
        "meta": meta or {},
    }
    blob = json.dumps(header, sort_keys=True).encode()
    with open(path, "wb") as fh:
        fh.write(MAGIC)
        fh.write(struct.pack("<I", len(blob)))
        fh.write(blob)
        for b in psi.Bs:
            fh.write(np.ascontiguousarray(b, dtype="<c8").tobytes())
        for s in psi.Ss:
            fh.write(np.ascontiguousarray(s, dtype="<f4").tobytes())


def load_mps(path):
    with open(path, "rb") as fh:
        if fh.read(8) != MAGIC:
            raise ValidationError("not an MPS checkpoint file")
        (hlen,) = struct.unpack("<I", fh.read(4))
        header = json.loads(fh.read(hlen))
        bs, ss = [], []
        bonds = header["bond_dims"]
        for i, d in enumerate(header["dims"]):
            shape = (bonds[i], d, bonds[i + 1])
            count = int(np.prod(shape))
            buf = fh.read(8 * count)
            bs.append(np.frombuffer(buf, dtype="<c8").astype(
                np.complex128).reshape(shape))
        for i in range(header["sites"]):
            buf = fh.read(4 * bonds[i])
            ss.append(np.frombuffer(buf, dtype="<f4").astype(np.float64))
    return MPS(bs, ss), header["meta"]
