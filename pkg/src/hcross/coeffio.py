"""Text format for coefficient files.

One header line `d=<d>`, then one line per coefficient:

    k_1 ... k_d re im

Whitespace-separated, '#' comments allowed, parse errors carry line numbers.
"""
from __future__ import annotations

import numpy as np

from .poly import TrigPoly


def write_coeffs(stream, f: TrigPoly) -> None:
    stream.write(f"d={f.d}\n")
    for k, c in zip(f.freqs.tolist(), f.coeffs):
        ks = " ".join(str(int(v)) for v in k)
        stream.write(f"{ks} {c.real:.17g} {c.imag:.17g}\n")


def save_coeffs(path: str, f: TrigPoly) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        write_coeffs(fh, f)


def load_coeffs(path: str) -> TrigPoly:
    d = None
    freqs, coeffs = [], []
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            body = line.split("#", 1)[0].strip()
            if not body:
                continue
            if d is None:
                if not body.startswith("d="):
                    raise ValueError(f"{path}:{lineno}: expected header 'd=<dim>', got {body!r}")
                try:
                    d = int(body[2:])
                except ValueError:
                    raise ValueError(f"{path}:{lineno}: invalid dimension {body[2:]!r}") from None
                if d < 1:
                    raise ValueError(f"{path}:{lineno}: dimension must be >= 1, got {d}")
                continue
            parts = body.split()
            if len(parts) != d + 2:
                raise ValueError(
                    f"{path}:{lineno}: expected {d + 2} fields (k_1..k_{d} re im), "
                    f"got {len(parts)}")
            try:
                k = tuple(int(p) for p in parts[:d])
                re_, im_ = float(parts[d]), float(parts[d + 1])
            except ValueError:
                raise ValueError(f"{path}:{lineno}: malformed numeric field in {body!r}") from None
            freqs.append(k)
            coeffs.append(complex(re_, im_))
    if d is None:
        raise ValueError(f"{path}: empty coefficient file (missing 'd=' header)")
    if not freqs:
        return TrigPoly.zero(d)
    return TrigPoly(d, np.array(freqs, dtype=np.int64), np.array(coeffs))
