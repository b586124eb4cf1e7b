"""
Binary snapshot codec and CSV dumps for scalar fields.

Layout: a 64-byte little-endian header (magic "RDF1", 4 pad bytes, a,
n_r, n_theta, clustering, collar, t, 8 reserved bytes) followed by the
node values as little-endian float64, center first, then rings outward
with angle varying fastest.
"""

import struct

import numpy as np
import pandas as pd

from scripts.common.errors import UsageError
from scripts.common.file_utils import ensure_directory, safe_save_csv
from scripts.grid.disc_grid import DiscGrid
from scripts.grid.fields import ScalarField

MAGIC = b"RDF1"
HEADER = struct.Struct("<4s4xdqqddd8x")
assert HEADER.size == 64


def encode_field(f, t):
    grid = f.grid
    header = HEADER.pack(MAGIC, grid.a, grid.n_r, grid.n_theta, grid.clustering, grid.collar, float(t))
    return header + f.values.astype("<f8").tobytes()


def decode_field(payload):
    """Inverse of encode_field; returns (field, t)."""
    if len(payload) < HEADER.size:
        raise UsageError(f"snapshot payload too short: {len(payload)} bytes")
    magic, a, n_r, n_theta, clustering, collar, t = HEADER.unpack_from(payload)
    if magic != MAGIC:
        raise UsageError(f"bad snapshot magic {magic!r}, expected {MAGIC!r}")
    grid = DiscGrid(a, n_r, n_theta, clustering, collar)
    values = np.frombuffer(payload, dtype="<f8", offset=HEADER.size)
    if values.size != grid.n_nodes:
        raise UsageError(f"snapshot holds {values.size} values, header grid needs {grid.n_nodes}")
    return ScalarField(grid, values.astype(np.float64)), t


def write_field(path, f, t):
    ensure_directory(path)
    with open(path, "wb") as handle:
        handle.write(encode_field(f, t))


def read_field(path):
    with open(path, "rb") as handle:
        return decode_field(handle.read())


def field_frame(f, name="value"):
    """(r, theta, value) table of a field."""
    return pd.DataFrame({"r": f.grid.node_r, "theta": f.grid.node_theta, name: f.values})


def dump_csv(f, path, description="field"):
    return safe_save_csv(field_frame(f), path, description)
