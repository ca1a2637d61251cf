"""JSON encodings for frames, companion pairs and reports.

Complex numbers are written as two-element arrays [re, im].
"""

import json

import numpy as np

from .errors import InvalidArgument
from .frames import CompanionPair, FrameSpec, companion_angle_sq


def complex_to_json(a):
    a = np.asarray(a, dtype=np.complex128)
    if a.ndim == 0:
        return [float(a.real), float(a.imag)]
    return [complex_to_json(x) for x in a]


def complex_from_json(obj, ndim):
    arr = np.asarray(obj, dtype=np.float64)
    if arr.ndim != ndim + 1 or arr.shape[-1] != 2:
        raise InvalidArgument(f"expected a {ndim}-D array of [re, im] pairs, got shape {arr.shape}")
    return arr[..., 0] + 1j * arr[..., 1]


def pair_to_dict(pair, tol):
    F = pair.base
    return {
        "p": F.N,
        "d": F.d,
        "N": F.N,
        "m": pair.m,
        "tol": tol,
        "alpha": F.alpha,
        "companion_angle_sq": pair.angle_sq,
        "synthesis": complex_to_json(F.synthesis),
        "diag_unitary": complex_to_json(np.diag(pair.diag_unitary)),
        "companion": complex_to_json(pair.companion.synthesis),
    }


def pair_from_dict(data):
    """Rebuild a CompanionPair without re-certifying it."""
    try:
        d, N = int(data["d"]), int(data["N"])
        synth = complex_from_json(data["synthesis"], 2)
        diag = complex_from_json(data["diag_unitary"], 1)
        comp = complex_from_json(data["companion"], 2)
        m = int(data.get("m", 0))
    except (KeyError, TypeError, ValueError) as exc:
        raise InvalidArgument(f"malformed frame file: {exc}") from exc
    if synth.shape != (d, N) or comp.shape != (d, N) or diag.shape != (d,):
        raise InvalidArgument(
            f"frame file shapes inconsistent with d={d}, N={N}: "
            f"synthesis {synth.shape}, companion {comp.shape}, diag {diag.shape}"
        )
    F = FrameSpec(synth)
    G = FrameSpec(comp)
    return CompanionPair(F, np.diag(diag), G, companion_angle_sq(F, G), m=m)


def dump_json(obj, path=None):
    text = json.dumps(obj, indent=2, sort_keys=False) + "\n"
    if path is None:
        return text
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(text)
    return text


def load_json(path):
    try:
        with open(path, encoding="utf-8") as fh:
            return json.load(fh)
    except json.JSONDecodeError as exc:
        raise InvalidArgument(f"{path}: not valid JSON ({exc})") from exc
