"""Polyhomogeneous expansions of the cusp model problem.

Thin wrapper over the compiled ``_core`` extension. Models and sources are
given as dicts (or JSON strings) in the same format as the command-line tool's
input files; results come back as plain dicts.
"""

import json

from . import _core
from ._core import InputError, NumericalError

__all__ = [
    "InputError",
    "NumericalError",
    "roots",
    "index_set",
    "expand",
    "solve_mode_ode",
    "run_scenario",
    "verify",
    "list_scenarios",
    "acceptance",
]


def _text(obj):
    return obj if isinstance(obj, str) else json.dumps(obj)


def roots(lam):
    """Indicial roots m_bar, m_under of the eigenvalue ``lam``."""
    return json.loads(_core.roots(lam))


def index_set(model=None, cutoff=4.0, generators=None):
    """Index monoid up to ``cutoff`` from a model, or from explicit generators."""
    if generators is not None:
        return json.loads(_core.index_set_from_generators(list(generators), cutoff))
    if model is None:
        raise InputError("give a model or generators")
    return json.loads(_core.index_set(_text(model), cutoff))


def expand(model=None, source=None, order=2.0, scenario=None):
    """Formal solution to ``order`` for a model/source pair or a bundled scenario."""
    if scenario is not None:
        return json.loads(_core.expand_scenario(scenario, order))
    if model is None or source is None:
        raise InputError("give a scenario or both model and source")
    return json.loads(_core.expand(_text(model), _text(source), order))


def solve_mode_ode(lam, forcing, datum, x0=0.1, xmin=1e-6, n=512):
    """Bounded solution of -lam*v + N v = forcing(x) with v(x0) = datum.

    Returns ``(x, v)`` as lists on the geometric grid.
    """
    return _core.solve_mode_ode(lam, forcing, datum, x0, xmin, n)


def run_scenario(name, order=2.0, **grid):
    """Full pipeline on a bundled scenario; returns the report dict."""
    return json.loads(_core.run_scenario(name, order, **grid))


def verify(model, source, order=2.0, **grid):
    """Full pipeline on a model/source pair; returns the report dict."""
    return json.loads(_core.verify(_text(model), _text(source), order, **grid))


def list_scenarios():
    """Names and one-line descriptions of the bundled scenarios."""
    return [{"name": n, "description": d} for n, d in _core.list_scenarios()]


def acceptance(seed=0, only=()):
    """Runs the acceptance criteria; one dict per criterion."""
    return _core.acceptance(seed, list(only))
