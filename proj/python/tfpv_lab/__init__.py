"""Timescale analysis and Fenichel reduction for mass-action networks."""

import os as _os

_packaged_data = _os.path.join(_os.path.dirname(__file__), "data")
if "TFPV_LAB_DATA" not in _os.environ and _os.path.isdir(_packaged_data):
    _os.environ["TFPV_LAB_DATA"] = _packaged_data

from ._core import (  # noqa: E402
    cascade,
    cascade_c2_tilde,
    closed_form_rhs,
    closed_forms,
    compare,
    data_dir,
    diagnose_regime,
    distinguished_params,
    figures,
    fixtures,
    lyap,
    reduce_rhs,
    simulate,
    verify,
)

__all__ = [
    "cascade",
    "cascade_c2_tilde",
    "closed_form_rhs",
    "closed_forms",
    "compare",
    "data_dir",
    "diagnose_regime",
    "distinguished_params",
    "figures",
    "fixtures",
    "lyap",
    "reduce_rhs",
    "simulate",
    "verify",
]
