"""Correlated non-Hermitian random matrix pairs: linear eigenvalue statistics."""

import json

import numpy as np

from . import _core
from ._core import analytic_disk_variance, mde_point, solve_m, solve_m_newton

__all__ = [
    "analytic_disk_variance",
    "covariance",
    "cumulants",
    "eigenvalues",
    "girko_les",
    "les",
    "mde_point",
    "run_experiment",
    "sample_pair",
    "solve_m",
    "solve_m_newton",
    "schema_version",
]

schema_version = _core.schema_version


def _dump(obj):
    return obj if isinstance(obj, str) else json.dumps(obj)


def cumulants(spec):
    """Second and fourth order cumulant summary of an entry spec (dict or preset name)."""
    if isinstance(spec, str):
        spec = {"preset": spec}
    return json.loads(_core.summary_json(_dump(spec)))


def sample_pair(n, spec, seed, stream=0):
    if isinstance(spec, str):
        spec = {"preset": spec}
    return _core.sample_pair(n, _dump(spec), seed, stream)


def eigenvalues(X):
    return np.asarray(_core.eigenvalues(np.asarray(X, dtype=complex)))


def les(f, X):
    return _core.les(_dump(f), np.asarray(X, dtype=complex))


def girko_les(f, X, nodes=200, half_width=1.6, T=1e3):
    return _core.girko_les(_dump(f), np.asarray(X, dtype=complex), nodes, half_width, T)


def covariance(params):
    """Limiting covariance C(f, g); params as accepted by `corrles kernel --params`."""
    out = json.loads(_core.covariance_json(_dump(params)))
    out["value"] = complex(*out["value"])
    return out


def run_experiment(config):
    """Monte Carlo experiment; returns the summary dict and raw per-trial samples."""
    r = _core.run_experiment(_dump(config))
    return {
        "summary": json.loads(r["summary"]),
        "L1": np.asarray(r["L1"]),
        "L2": np.asarray(r["L2"]),
        "combined": np.asarray(r["combined"]),
    }
