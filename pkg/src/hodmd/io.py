"""File formats: DTF dense tensors, binary PGM stacks and mode tables.

DTF layout (all integers little-endian)::

    b"DTEN" | version u8 = 1 | order u8 in 2..4 | order x u64 extents |
    prod(extents) x float64, row-major (last index fastest)
"""

import csv
import io as _io
import os
import struct
from pathlib import Path

import numpy as np

from .exceptions import FormatError

MAGIC = b"DTEN"
VERSION = 1
_HEADER = 6


def dtf_bytes(array):
    a = np.asarray(array, dtype=np.float64)
    if not 2 <= a.ndim <= 4:
        raise FormatError(f"DTF stores tensors of order 2-4, got order {a.ndim}")
    head = MAGIC + bytes([VERSION, a.ndim]) + struct.pack(f"<{a.ndim}Q", *a.shape)
    return head + np.ascontiguousarray(a, dtype="<f8").tobytes(order="C")


def write_dtf(path, array):
    Path(path).write_bytes(dtf_bytes(array))


def parse_dtf(buf):
    """Decode DTF bytes into a float64 array."""
    if len(buf) < 4 or buf[:4] != MAGIC:
        raise FormatError(f"bad magic {bytes(buf[:4])!r}, expected {MAGIC!r}", offset=0)
    if len(buf) < _HEADER:
        raise FormatError("file ends inside the header", offset=len(buf))
    if buf[4] != VERSION:
        raise FormatError(f"unsupported DTF version {buf[4]}", offset=4)
    order = buf[5]
    if not 2 <= order <= 4:
        raise FormatError(f"tensor order {order} outside 2..4", offset=5)
    dims_end = _HEADER + 8 * order
    if len(buf) < dims_end:
        raise FormatError(f"expected {dims_end} header bytes, got {len(buf)}", offset=len(buf))
    dims = struct.unpack_from(f"<{order}Q", buf, _HEADER)
    if any(n == 0 for n in dims):
        raise FormatError(f"zero extent in dims {dims}", offset=_HEADER)
    expected = 8 * int(np.prod(dims, dtype=object))
    actual = len(buf) - dims_end
    if actual != expected:
        raise FormatError(f"expected {expected} data bytes for dims {dims}, got {actual}",
                          offset=dims_end + min(actual, expected))
    data = np.frombuffer(buf, dtype="<f8", offset=dims_end).astype(np.float64)
    return data.reshape(dims)


def read_dtf(path):
    return parse_dtf(Path(path).read_bytes())


def _pgm_tokens(buf, count, path):
    tokens, pos = [], 2
    while len(tokens) < count:
        while pos < len(buf) and buf[pos:pos + 1].isspace():
            pos += 1
        if pos < len(buf) and buf[pos:pos + 1] == b"#":
            while pos < len(buf) and buf[pos:pos + 1] not in (b"\n", b"\r"):
                pos += 1
            continue
        start = pos
        while pos < len(buf) and not buf[pos:pos + 1].isspace() and buf[pos:pos + 1] != b"#":
            pos += 1
        if start == pos:
            raise FormatError(f"{path}: truncated PGM header", offset=pos)
        try:
            tokens.append(int(buf[start:pos]))
        except ValueError:
            raise FormatError(f"{path}: non-numeric PGM header field", offset=start) from None
    return tokens, pos + 1


def read_pgm(path):
    """Binary (P5) PGM as a float64 ``(height, width)`` array scaled to ``[0, 1]``."""
    buf = Path(path).read_bytes()
    if buf[:2] != b"P5":
        raise FormatError(f"{path}: not a binary PGM (magic {buf[:2]!r})", offset=0)
    (width, height, maxval), pos = _pgm_tokens(buf, 3, path)
    if not 0 < maxval < 65536:
        raise FormatError(f"{path}: maxval {maxval} outside 1..65535", offset=pos)
    dtype = np.dtype("u1") if maxval < 256 else np.dtype(">u2")
    need = width * height * dtype.itemsize
    if len(buf) - pos < need:
        raise FormatError(f"{path}: expected {need} pixel bytes, got {len(buf) - pos}",
                          offset=len(buf))
    img = np.frombuffer(buf, dtype=dtype, count=width * height, offset=pos)
    return img.reshape(height, width).astype(np.float64) / maxval


def write_pgm(path, image, maxval=255):
    img = np.clip(np.rint(np.asarray(image, dtype=np.float64) * maxval), 0, maxval)
    dtype = "u1" if maxval < 256 else ">u2"
    h, w = img.shape
    Path(path).write_bytes(b"P5\n%d %d\n%d\n" % (w, h, maxval) + img.astype(dtype).tobytes())


def _pgm_files(directory):
    return sorted(p for p in Path(directory).iterdir()
                  if p.is_file() and p.suffix.lower() == ".pgm")


def read_pgm_stack(directory):
    """Load PGM images from ``directory``.

    Files directly inside form one slice, ``(H, W, K)``.  Otherwise every
    subdirectory is a slice and the result is ``(H, W, I, K)``.  Names are
    sorted lexicographically: subdirectories give slice order, files give
    time order.
    """
    directory = Path(directory)
    files = _pgm_files(directory)
    if files:
        return np.stack([read_pgm(f) for f in files], axis=-1)
    slices = sorted(p for p in directory.iterdir() if p.is_dir())
    stacks = [np.stack([read_pgm(f) for f in _pgm_files(s)], axis=-1)
              for s in slices if _pgm_files(s)]
    if not stacks:
        raise FormatError(f"{directory}: no .pgm images found")
    if len({s.shape for s in stacks}) != 1:
        raise FormatError(f"{directory}: slices differ in image size or frame count")
    return np.stack(stacks, axis=2)


def load_tensor(path):
    """Read a DTF file or a PGM directory."""
    path = Path(path)
    if path.is_dir():
        return read_pgm_stack(path)
    return read_dtf(path)


def mode_table(expansion):
    """CSV text listing every mode of ``expansion``, largest amplitude first."""
    out = _io.StringIO()
    w = csv.writer(out, lineterminator="\n")
    w.writerow(["m", "amplitude", "growth_rate", "omega_rad_s", "freq_bpm"])
    for m, (a, g, om, bpm) in enumerate(zip(expansion.amplitudes, expansion.growth_rates,
                                            expansion.frequencies, expansion.freq_bpm), 1):
        w.writerow([m] + [repr(float(v)) for v in (a, g, om, bpm)])
    return out.getvalue()


def write_mode_table(path, expansion):
    Path(path).write_text(mode_table(expansion))


def read_mode_table(path):
    with open(path, newline="") as fh:
        rows = list(csv.DictReader(fh))
    return {key: np.array([float(r[key]) for r in rows])
            for key in ("amplitude", "growth_rate", "omega_rad_s", "freq_bpm")}


def write_spatial_modes(prefix, expansion):
    """Write spatial modes as ``<prefix>_real.dtf`` and ``<prefix>_imag.dtf``.

    Each file has shape ``spatial_dims + (n_modes,)``.
    """
    shape = tuple(expansion.spatial_dims) + (expansion.n_modes,)
    modes = expansion.spatial_modes.reshape(shape)
    paths = (f"{os.fspath(prefix)}_real.dtf", f"{os.fspath(prefix)}_imag.dtf")
    write_dtf(paths[0], modes.real)
    write_dtf(paths[1], modes.imag)
    return paths
