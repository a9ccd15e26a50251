"""CSV persistence for signals and paths, and the on-disk Weyl-sum cache."""
from __future__ import annotations

import csv
import io
import os
from pathlib import Path

import numpy as np

from .signals import CyclicSignal, GridSignal
from .variation import SampledPath

__all__ = [
    "write_signal_csv",
    "read_signal_csv",
    "signal_to_csv",
    "read_path_csv",
    "WeylCache",
]


def signal_to_csv(sig: GridSignal | CyclicSignal) -> str:
    buf = io.StringIO()
    if isinstance(sig, CyclicSignal):
        buf.write(f"# modulus={sig.modulus}\n")
        idx = range(sig.modulus)
    else:
        idx = sig.indices.tolist()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["index", "re", "im"])
    for i, v in zip(idx, sig.values):
        w.writerow([i, repr(float(v.real)), repr(float(v.imag))])
    return buf.getvalue()


def write_signal_csv(path, sig: GridSignal | CyclicSignal) -> None:
    Path(path).write_text(signal_to_csv(sig))


def read_signal_csv(path) -> GridSignal | CyclicSignal:
    """Read a signal; a ``# modulus=M`` line makes it cyclic."""
    modulus = None
    rows = []
    with open(path, newline="") as fh:
        lines = []
        for line in fh:
            if line.startswith("#"):
                key, _, val = line[1:].strip().partition("=")
                if key.strip() == "modulus":
                    modulus = int(val)
                continue
            lines.append(line)
    reader = csv.DictReader(lines)
    if reader.fieldnames != ["index", "re", "im"]:
        raise ValueError(f"expected header index,re,im, got {reader.fieldnames}")
    for row in reader:
        rows.append((int(row["index"]), float(row["re"]) + 1j * float(row["im"])))
    if not rows:
        raise ValueError("signal file has no rows")
    idx = np.array([i for i, _ in rows])
    vals = np.array([v for _, v in rows])
    if modulus is not None:
        out = np.zeros(modulus, dtype=complex)
        out[idx % modulus] = vals
        return CyclicSignal(out)
    lo, hi = int(idx.min()), int(idx.max()) + 1
    dense = np.zeros(hi - lo, dtype=complex)
    dense[idx - lo] = vals
    return GridSignal(lo, dense)


def read_path_csv(path) -> SampledPath:
    """Path file with header ``t,v1[,v2,...]``."""
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        if not header or header[0] != "t" or len(header) < 2:
            raise ValueError("expected header t,v1[,v2,...]")
        data = np.array([[float(x) for x in row] for row in reader if row])
    if data.size == 0:
        raise ValueError("path file has no rows")
    vals = data[:, 1:]
    return SampledPath(data[:, 0], vals[:, 0] if vals.shape[1] == 1 else vals)


class WeylCache:
    """Complete Weyl sums persisted as CSV rows ``d,A,Q,re,im``.

    New values are appended with a single ``write`` on an ``O_APPEND``
    descriptor, so concurrent writers never interleave partial rows.
    """

    HEADER = "d,A,Q,re,im\n"

    def __init__(self, path):
        self.path = Path(path)
        self._values: dict[tuple[int, int, int], complex] = {}
        if self.path.exists() and self.path.stat().st_size:
            with open(self.path, newline="") as fh:
                for row in csv.DictReader(fh):
                    key = (int(row["d"]), int(row["A"]), int(row["Q"]))
                    self._values[key] = float(row["re"]) + 1j * float(row["im"])
        else:
            self._append(self.HEADER)

    def _append(self, text: str):
        fd = os.open(self.path, os.O_WRONLY | os.O_APPEND | os.O_CREAT, 0o644)
        try:
            os.write(fd, text.encode())
        finally:
            os.close(fd)

    def get(self, d: int, A: int, Q: int) -> complex | None:
        return self._values.get((d, A, Q))

    def put(self, d: int, A: int, Q: int, value: complex):
        key = (d, A, Q)
        if key in self._values:
            return
        self._values[key] = complex(value)
        self._append(f"{d},{A},{Q},{float(value.real)!r},{float(value.imag)!r}\n")

    def __len__(self) -> int:
        return len(self._values)
