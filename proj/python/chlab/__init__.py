"""Peakon solutions of the Camassa-Holm equation.

Thin wrapper over the compiled ``_chlab`` extension; functions that return JSON
from the C++ side are decoded into dicts here.
"""

import json as _json

from . import _chlab
from ._chlab import (  # noqa: F401
    ClosedFormPair,
    CollisionError,
    NonMonotoneFamily,
    PeakonState,
    ScenarioError,
    Solution,
    UnsupportedPolicy,
    P_Px,
    atom_time_scan,
    breaking_time_estimate,
    concentration_profile,
    energy,
    energy_ledger,
    exact_pair,
    extremal_char,
    integrate,
    integrate_char,
    max_abs_slope,
    mu_minus,
    mu_plus,
    pair_creation,
    prolong,
    riccati_residual,
    thick_pushforward,
    u,
    ux,
    zero_solution,
)


def verify(suite="all", seed=None):
    """Run a verification suite and return its report as a dict."""
    args = (suite,) if seed is None else (suite, seed)
    return _json.loads(_chlab.verify(*args))


def run_scenario(document, out_dir=""):
    """Run a scenario given as a JSON string or dict; returns the report dict."""
    if isinstance(document, dict):
        document = _json.dumps(document)
    return _json.loads(_chlab.run_scenario(document, out_dir))


def max_dissipation_compare(accreting, alternative, t0, B):
    return _json.loads(_chlab.max_dissipation_compare(accreting, alternative, t0, B))
