"""JSON encoding of complex scalars, vectors, matrices and series.

Complex numbers are ``[re, im]`` pairs; vectors are lists of pairs and
matrices are row-major lists of rows of pairs.  Every top-level document
carries ``"schema": "ncrealize/1"``.
"""

import json

import numpy as np

from .errors import InputError
from .fps import TruncatedSeries, check_word, graded_lex_key

SCHEMA = "ncrealize/1"


def enc_scalar(z):
    z = complex(z)
    return [z.real, z.imag]


def dec_scalar(x):
    if isinstance(x, (int, float)):
        return complex(x)
    if isinstance(x, dict):
        return complex(x.get("re", 0.0), x.get("im", 0.0))
    re, im = x
    return complex(re, im)


def enc_vector(v):
    return [enc_scalar(z) for z in np.asarray(v).ravel()]


def dec_vector(x):
    return np.array([dec_scalar(z) for z in x], dtype=complex)


def enc_matrix(M):
    M = np.asarray(M)
    return [[enc_scalar(z) for z in row] for row in M]


def dec_matrix(x, n_cols=None):
    rows = [[dec_scalar(z) for z in row] for row in x]
    if not rows:
        return np.zeros((0, n_cols or 0), dtype=complex)
    return np.array(rows, dtype=complex)


def dec_matrices(x, d, dim):
    mats = [dec_matrix(m, dim).reshape(dim, dim) for m in x]
    if len(mats) != d:
        raise InputError(f"expected {d} matrices, found {len(mats)}")
    return np.array(mats, dtype=complex).reshape(d, dim, dim)


def series_to_dict(f: TruncatedSeries) -> dict:
    items = sorted(f.coeffs.items(), key=lambda kv: graded_lex_key(kv[0]))
    return {
        "schema": SCHEMA,
        "kind": "series",
        "d": f.d,
        "degree_bound": f.degree_bound,
        "coeffs": [{"word": list(w), "re": v.real, "im": v.imag} for w, v in items],
    }


def _coefficient(item):
    # {"re", "im"} as written by series_to_dict, or "value" as a number or [re, im]
    if "value" in item:
        v = item["value"]
        return complex(*v) if isinstance(v, (list, tuple)) else complex(v)
    if "re" not in item and "im" not in item:
        raise KeyError("coefficient entry needs 're'/'im' or 'value'")
    return complex(item.get("re", 0.0), item.get("im", 0.0))


def series_from_dict(doc: dict) -> TruncatedSeries:
    try:
        d, N = int(doc["d"]), int(doc["degree_bound"])
        coeffs = {}
        for item in doc["coeffs"]:
            w = check_word(item["word"], d)
            coeffs[w] = coeffs.get(w, 0j) + _coefficient(item)
    except (KeyError, TypeError, ValueError) as exc:
        raise InputError(f"malformed series document: {exc}") from exc
    return TruncatedSeries(d, N, coeffs)


def _finite(x):
    # strict JSON has no inf/nan; spell them as strings
    if isinstance(x, float) and not np.isfinite(x):
        return "nan" if np.isnan(x) else ("inf" if x > 0 else "-inf")
    if isinstance(x, (np.floating, np.integer)):
        return _finite(x.item())
    if isinstance(x, dict):
        return {k: _finite(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_finite(v) for v in x]
    return x


def dumps(doc) -> str:
    return json.dumps(_finite(doc), sort_keys=False, separators=(",", ":"), allow_nan=False)
