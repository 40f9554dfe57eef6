"""Python front end for the pcurv C++ core; structured results come back as dicts."""

import json

from ._pcurv import (
    PcurvError,
    a200_closed_form,
    alpha_D,
    b20_closed_form,
    conformal_factor,
    eval_U_halfspace,
    inversion,
    inversion_inverse,
)
from . import _pcurv

__all__ = [
    "PcurvError",
    "a200_closed_form",
    "alpha_D",
    "b20_closed_form",
    "certificate",
    "conformal_factor",
    "constants",
    "eval_U_halfspace",
    "expansion_check",
    "gamma_scan",
    "inversion",
    "inversion_inverse",
]


def constants(config):
    return json.loads(_pcurv.run_constants(json.dumps(config)))


def gamma_scan(config):
    """CSV text with one row per (x0, lambda) plus limit rows."""
    return _pcurv.run_gamma_scan(json.dumps(config))


def expansion_check(config):
    return json.loads(_pcurv.run_expansion_check(json.dumps(config)))


def certificate(config):
    return json.loads(_pcurv.run_certificate(json.dumps(config)))
