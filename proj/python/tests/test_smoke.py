"""Smoke tests for the python bindings.

Run either against an installed wheel or against an in-tree build; in the
latter case the extension is discovered in the CMake build directory.
"""

import math
import os
import sys

import pytest


def _import_core():
    try:
        import tfpv_lab  # noqa: F401
        return tfpv_lab
    except ImportError:
        pass
    # in-tree: pick up the extension from the build directory
    here = os.path.dirname(os.path.abspath(__file__))
    root = os.path.dirname(os.path.dirname(here))
    for cand in ("build", "build-debug"):
        d = os.path.join(root, cand)
        if os.path.isdir(d):
            sys.path.insert(0, d)
    sys.path.insert(0, os.path.dirname(here))
    import _core
    return _core


lab = _import_core()


def test_fixture_listing():
    ids = lab.fixtures()
    for want in ("mm.irrev", "mm.rev", "coop", "uncomp", "comp"):
        assert want in ids
    assert "fig1" in lab.figures()


def test_verification_pass_and_fail():
    ok = lab.verify(fixture="coop", scenario="e0", points=51)
    assert ok["pass"] and ok["points"] > 0

    bad = lab.verify(fixture="coop", scenario="degenerate", points=21)
    assert not bad["pass"]
    assert any(f["check"] in ("nondegeneracy", "rank") for f in bad["failures"])


def test_distinguished_params_caption():
    dp = lab.distinguished_params(figure="fig1", eps_ref=1.0)
    assert dp["eps_star"] == pytest.approx(0.125, rel=1e-6)
    assert dp["mu_star"] == pytest.approx(0.5, rel=1e-6)
    assert dp["eps_lower"] <= dp["eps_star"]


def test_closed_forms_and_regime():
    pi = {k: 1.0 for k in ("k1", "km1", "k2", "k3", "km3", "e0", "s0", "i0")}
    cf = lab.closed_forms("uncomp", pi)
    assert cf["eps_U"] == pytest.approx(0.125)
    assert cf["mu_U"] == pytest.approx(1.0)

    flags = lab.diagnose_regime("uncomp", pi)
    assert not flags["near_invariant"]


def test_reduction_matches_closed_form():
    r = lab.reduce_rhs(figure="fig1", u=[1.0])
    assert r[0] == pytest.approx(-3.0 / 7.0, rel=1e-9)

    pi = {k: 1.0 for k in ("k1", "km1", "k2", "k3", "km3", "k4", "e0")}
    cf = lab.closed_form_rhs("coop.e0", pi, [1.0])
    assert cf[0] == pytest.approx(r[0], rel=1e-9)


def test_simulation_and_compare():
    tr = lab.simulate(figure="fig1", eps=0.1, t1=5.0, rtol=1e-8)
    assert tr["states"] == ["s", "c1", "c2"]
    assert tr["t"][0] == 0.0 and tr["t"][-1] == pytest.approx(5.0)
    assert tr["x"][0][0] == pytest.approx(1.0)  # s starts at s0

    rep = lab.compare("fig1", eps=[0.1, 0.01], rtol=1e-8)
    rows = rep["rows"]
    assert rows[0]["eps"] == 0.1
    assert rows[0]["err_post"] > rows[1]["err_post"]


def test_lyap_and_cascade():
    est = lab.lyap(1.0, 1.0, 1e-2, 1.0, 1.0)
    assert est["gamma"] == pytest.approx(1.0)
    assert est["eps_PE"] == pytest.approx(0.02)
    assert est["eps_L"] == pytest.approx(math.sqrt(2) * 0.01)

    two = lab.lyap(1.0, 1.0, 1e-2, 1.0, 1.0, convention="two")
    assert two["eps_L_normalized"] == two["eps_PE"]

    assert lab.cascade_c2_tilde(0.1, 1e-3, 100.0, 50.0) == pytest.approx(49.99, rel=1e-3)
    rep = lab.cascade("fig333")
    assert rep["err_c2_slow"] < 0.05
    assert rep["err_s_veryslow"] < 0.05
