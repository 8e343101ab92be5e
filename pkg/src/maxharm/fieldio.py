"""Binary field files.

Layout: one ASCII header line

    MAXHARM1 dim=<d> shape=<a,b,c> h=<float repr> topology=<torus|box> kind=<scalar|vector|matrix>\\n

followed by the values as little-endian float64 in C order (component axes
last).  Box files then carry one byte per cell (1 = inside the domain).
"""

from __future__ import annotations

import os

import numpy as np

from .errors import FieldFormatError
from .grid import FIELD_KINDS, Domain, Field, Grid, Topology

MAGIC = "MAXHARM1"


def _header(f: Field) -> bytes:
    g = f.grid
    return (
        f"{MAGIC} dim={g.dim} shape={','.join(map(str, g.shape))} h={g.h!r} "
        f"topology={g.topology.value} kind={f.kind}\n"
    ).encode("ascii")


def dumps(f: Field) -> bytes:
    data = np.ascontiguousarray(f.values, dtype="<f8").tobytes()
    out = _header(f) + data
    if not f.grid.is_torus:
        out += f.domain.mask.astype(np.uint8).tobytes()
    return out


def save_field(f: Field, path) -> None:
    with open(path, "wb") as fh:
        fh.write(dumps(f))


def _parse_header(line: bytes) -> dict:
    try:
        text = line.decode("ascii")
    except UnicodeDecodeError as exc:
        raise FieldFormatError("header is not ASCII") from exc
    parts = text.split()
    if not parts or parts[0] != MAGIC:
        raise FieldFormatError("bad magic")
    kv = {}
    for item in parts[1:]:
        key, sep, val = item.partition("=")
        if not sep:
            raise FieldFormatError(f"malformed header item {item!r}")
        kv[key] = val
    missing = {"dim", "shape", "h", "topology", "kind"} - kv.keys()
    if missing:
        raise FieldFormatError(f"header lacks {sorted(missing)}")
    try:
        dim = int(kv["dim"])
        shape = tuple(int(s) for s in kv["shape"].split(","))
        h = float(kv["h"])
        topo = Topology(kv["topology"])
    except ValueError as exc:
        raise FieldFormatError(f"bad header value: {exc}") from exc
    if len(shape) != dim:
        raise FieldFormatError("shape does not match dim")
    if kv["kind"] not in FIELD_KINDS:
        raise FieldFormatError(f"unknown kind {kv['kind']!r}")
    return {"shape": shape, "h": h, "topology": topo, "kind": kv["kind"]}


def loads(buf: bytes) -> Field:
    nl = buf.find(b"\n")
    if nl < 0:
        raise FieldFormatError("missing header line")
    hdr = _parse_header(buf[:nl])
    try:
        grid = Grid(hdr["shape"], hdr["h"], hdr["topology"])
    except ValueError as exc:
        raise FieldFormatError(str(exc)) from exc
    cls = FIELD_KINDS[hdr["kind"]]
    n = grid.dim
    comp = {"scalar": (), "vector": (n,), "matrix": (n, n)}[hdr["kind"]]
    shape = grid.shape + comp
    count = int(np.prod(shape))
    body = buf[nl + 1 :]
    mask_bytes = 0 if grid.is_torus else grid.size
    if len(body) != 8 * count + mask_bytes:
        raise FieldFormatError(f"payload has {len(body)} bytes, expected {8 * count + mask_bytes}")
    vals = np.frombuffer(body, dtype="<f8", count=count).reshape(shape).astype(float)
    mask = None
    if not grid.is_torus:
        raw = np.frombuffer(body, dtype=np.uint8, offset=8 * count).reshape(grid.shape)
        if np.any(raw > 1):
            raise FieldFormatError("mask bytes must be 0 or 1")
        mask = raw.astype(bool)
    if not np.isfinite(vals).all():
        raise FieldFormatError("payload contains non-finite values")
    try:
        return cls(Domain(grid, mask), vals)
    except ValueError as exc:
        raise FieldFormatError(str(exc)) from exc


def load_field(path) -> Field:
    if not os.path.exists(path):
        raise FileNotFoundError(path)
    with open(path, "rb") as fh:
        return loads(fh.read())
