"""Independent re-verification of Massey results, including tampered certificates."""

from __future__ import annotations

from dataclasses import replace

import pytest

from bba import corpus
from bba.cbba import build
from bba.errors import NeedsCertificate
from bba.linalg import Scalar
from bba.massey import (
    NONVANISHING, VANISHES, NonvanishingCertificate, VanishingCertificate, quadruple_abc, triple_abc,
    triple_derham, triple_dolbeault,
)
from bba.verify import verify

KT = build(corpus.read("kodaira-thurston"))
IW = build(corpus.read("iwasawa-sub"))
FIL = build(corpus.read("filiform"))


def failed(report):
    return {c.name for c in report.failures()}


@pytest.fixture(scope="module")
def iw_nonvanishing():
    P = IW.parse
    return triple_abc(IW, P("a"), P("a"), P("b"))


@pytest.fixture(scope="module")
def iw_vanishing():
    P = IW.parse
    return triple_abc(IW, P("a"), P("b"), P("a"))


@pytest.fixture(scope="module")
def fil_quad():
    P = FIL.parse
    return quadruple_abc(FIL, P("x"), P("x"), P("x*ybar"), P("y*xbar"))


def test_corpus_results_verify(iw_nonvanishing, iw_vanishing, fil_quad):
    P = KT.parse
    for r in (iw_nonvanishing, iw_vanishing, fil_quad,
              triple_dolbeault(KT, P("x"), P("xbar"), P("xbar")),
              triple_derham(KT, P("x"), P("xbar"), P("xbar")),
              quadruple_abc(FIL, *[FIL.parse("x")] * 4)):
        rep = verify(r)
        assert rep.ok, (r.kind, r.inputs, rep.failures())


def test_tampered_representative(iw_nonvanishing):
    bad = replace(iw_nonvanishing, representative=iw_nonvanishing.representative + IW.parse("bc"))
    assert "representative" in failed(verify(bad))


def test_tampered_defining_system(iw_nonvanishing):
    sysm = dict(iw_nonvanishing.defining_system)
    sysm["y"] = sysm["y"] + IW.parse("c")
    assert "defining system" in failed(verify(replace(iw_nonvanishing, defining_system=sysm)))


def test_zero_functional_does_not_separate(iw_nonvanishing):
    cert = NonvanishingCertificate({}, iw_nonvanishing.certificate.multipliers)
    assert "separates" in failed(verify(replace(iw_nonvanishing, certificate=cert)))


def test_functional_must_kill_indeterminacy(iw_nonvanishing):
    # the all-ones functional on (2,2) does not vanish on the indeterminacy
    w = {k: Scalar(1) for k in IW.realize(None).keys[(2, 2)]}
    cert = NonvanishingCertificate(w, {})
    assert not verify(replace(iw_nonvanishing, certificate=cert)).ok


def test_tampered_vanishing_system(iw_vanishing):
    s = dict(iw_vanishing.certificate.system)
    s["x"] = s["x"] + IW.parse("c")
    bad = replace(iw_vanishing, certificate=VanishingCertificate(s))
    assert "exact output" in failed(verify(bad))


def test_missing_certificate_raises(iw_nonvanishing, iw_vanishing, fil_quad):
    for r in (iw_nonvanishing, iw_vanishing, fil_quad):
        with pytest.raises(NeedsCertificate):
            verify(replace(r, certificate=None))


def test_quadruple_tampered_functional(fil_quad):
    assert fil_quad.verdict == NONVANISHING
    w = dict(fil_quad.certificate.functional)
    assert "separates" in failed(verify(replace(fil_quad, certificate=NonvanishingCertificate({}))))
    # a functional on every basis key of the output space separates but sees boundaries
    keys = [k for bd in fil_quad.extra["components"] for k in FIL.realize(None).keys.get(bd, ())]
    wide = NonvanishingCertificate({k: Scalar(1) for k in keys})
    assert not verify(replace(fil_quad, certificate=wide)).ok
    assert verify(replace(fil_quad, certificate=NonvanishingCertificate(w))).ok


def test_quadruple_tampered_boundary():
    r = quadruple_abc(FIL, *[FIL.parse("x")] * 4)
    assert r.verdict == VANISHES
    s = dict(r.certificate.system)
    s["boundary"] = s["boundary"] + FIL.parse("x*y*zbar")
    assert not verify(replace(r, certificate=VanishingCertificate(s))).ok


def test_quadruple_tampered_system(fil_quad):
    sysm = dict(fil_quad.defining_system)
    sysm["z"] = sysm["z"] + FIL.parse("z*zbar")
    assert "defining system" in failed(verify(replace(fil_quad, defining_system=sysm)))
    # a d-closed change of eta keeps the system valid but moves the representative
    sysm = dict(fil_quad.defining_system)
    sysm["eta"] = sysm["eta"] + FIL.parse("x")
    assert failed(verify(replace(fil_quad, defining_system=sysm))) == {"representative"}
