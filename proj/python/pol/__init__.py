"""Proof-of-Learning toolkit: deterministic training, certificates, the
capture-the-flag verification protocol and incentive analysis.

Structured values cross the boundary as JSON and come back as dicts.
Seeds are strings: 64 hex characters, a decimal integer, or any label.
"""

import json as _json

from . import _pol

__all__ = [
    "schema_versions", "seed_hex", "stage_seed_hex", "shuffle", "sample_without_replacement",
    "make_problem", "prove", "verify", "pass_prob_exact", "pass_prob_bound", "prover_utility",
    "sunk_cost_mu", "min_alpha_bis", "min_alpha_penalty", "analyze", "detection_rate", "simulate",
]

seed_hex = _pol.seed_hex
stage_seed_hex = _pol.stage_seed_hex
shuffle = _pol.shuffle
sample_without_replacement = _pol.sample_without_replacement
pass_prob_exact = _pol.pass_prob_exact
pass_prob_bound = _pol.pass_prob_bound
min_alpha_bis = _pol.min_alpha_bis
min_alpha_penalty = _pol.min_alpha_penalty
detection_rate = _pol.detection_rate


def _dump(obj):
    return obj if isinstance(obj, str) else _json.dumps(obj)


def schema_versions():
    return _json.loads(_pol.schema_versions())


def make_problem(**kwargs):
    return _json.loads(_pol.make_problem(**kwargs))


def prove(problem, mode="full", eta_flag=0.2, prover_secret="prover", cheat_stages=(),
          disguise="as-normal"):
    """Returns (certificate, flag_plan or None, checkpoint bytes)."""
    cert, plan, checkpoints = _pol.prove(_dump(problem), mode, eta_flag, str(prover_secret),
                                         list(cheat_stages), disguise)
    return _json.loads(cert), (_json.loads(plan) if plan is not None else None), checkpoints


def verify(problem, certificate, checkpoints, plan=None, alpha=5, eta_flag=0.2,
           verifier_secret="verifier"):
    return _json.loads(_pol.verify(_dump(problem), _dump(certificate), checkpoints,
                                   None if plan is None else _dump(plan), alpha, eta_flag,
                                   str(verifier_secret)))


def prover_utility(params, rho, mode="exact"):
    return _pol.prover_utility(_dump(params), rho, mode)


def sunk_cost_mu(competition, rho, total_cost):
    return _pol.sunk_cost_mu(_dump(competition), rho, total_cost)


def analyze(params, v_plus=0.0, v_zero=0.0):
    return _json.loads(_pol.analyze(_dump(params), v_plus, v_zero))


def simulate(config, threads=None):
    """Returns (summary dict, CSV text)."""
    summary, csv = _pol.simulate(_dump(config), threads)
    return _json.loads(summary), csv
