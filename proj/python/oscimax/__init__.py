"""Oscillatory maximal functions: averages, sup over radii, norms, experiments.

Phases and functions are given as the same spec strings the CLI accepts,
e.g. ``"laurent:t^2"`` and ``"char:1"``.
"""
import json

from . import _core
from ._core import ConfigError, DomainError, PreconditionError

__all__ = ["average", "maximal", "norms", "weight", "decay",
           "ConfigError", "DomainError", "PreconditionError"]


def average(fn, phase, x, r, tol=1e-10):
    """|(1/2r) ∫ f(t) e^{iγ(x,x−t)} dt| over [x−r, x+r]; dict with re, im, error estimate."""
    return json.loads(_core.average(fn, phase, float(x), float(r), float(tol)))


def maximal(fn, phase, xs, config=None, workers=1):
    """M_γ f at each x. ``config`` is a dict of search settings; returns a list of dicts."""
    single = isinstance(xs, (int, float))
    xs = [float(xs)] if single else [float(v) for v in xs]
    out = json.loads(_core.maximal(fn, phase, xs, json.dumps(config) if config else "", int(workers)))
    return out[0] if single else out


def norms(fn, p=2.0, l=1.0):
    return json.loads(_core.norms(fn, float(p), float(l)))


def weight(spec, tail_start=2.0, probe=1e6):
    """Lower bound, doubling and tail-integrability diagnostics for a weight."""
    return json.loads(_core.weight(spec, float(tail_start), float(probe)))


def decay(k, beta, xs, absolute=False, workers=1):
    """Decay experiment for γ = t^k; returns (summary dict, CSV text)."""
    summary, csv = _core.decay(float(k), bool(absolute), float(beta), [float(v) for v in xs], int(workers))
    return json.loads(summary), csv
