"""Hypersurface germs: normal coordinates, reality, Levi data."""

from fractions import Fraction

import pytest

from crrigid.geometry import (Source, Target, check_defining_reality,
                              defining_frame, normalize_defining)
from crrigid.scalars import Scalar
from crrigid.series import Series, frame

I = Scalar(0, 0, 1)
ORDER = 12


def _rho_quartic(order=ORDER):
    # Im w = |z|^2 + |z|^4, complexified
    frm = defining_frame(order)
    z = Series.variable(frm, "z")
    chi = Series.variable(frm, "chi")
    w = Series.variable(frm, "w")
    tau = Series.variable(frm, "tau")
    return (w - tau).scale(Scalar(0, 0, Fraction(-1, 2))) - z * chi \
        - (z * chi) ** 2


def test_reality_check():
    rho = _rho_quartic()
    check_defining_reality(rho)
    bad = rho + Series.variable(rho.frame, "z")
    with pytest.raises(ValueError):
        check_defining_reality(bad)


def test_normalize_quartic_source():
    res = normalize_defining(_rho_quartic())
    src = Source(res.Q)  # verify_normal_form runs on construction
    assert src.levi_nondegenerate()
    # leading terms: Q = tau + 2i z chi + ...
    assert src.Q.coefficient((1, 1, 0)) == 2 * I


def test_hyperquadric_source_is_exact():
    src = Source.hyperquadric(ORDER)
    assert set(src.Q.support()) == {(0, 0, 1), (1, 1, 0)}
    assert src.Q.coefficient((1, 1, 0)) == 2 * I
    res = normalize_defining(
        _rho_quartic() + (Series.variable(defining_frame(ORDER), "z")
                          * Series.variable(defining_frame(ORDER), "chi")) ** 2)
    # adding back |z|^4 cancels the quartic term: sphere again
    assert res.Q == Source.hyperquadric(ORDER).Q


def test_normal_form_rejects_bad_graph():
    frm = frame("z", "chi", "tau", order=8, weights=(1, 1, 2))
    q = Series.variable(frm, "tau") + Series.monomial(frm, (1, 0, 0), Scalar(1))
    with pytest.raises(ValueError):
        Source(q)


def test_target_hyperquadric_levi_signature():
    plus = Target.hyperquadric(1, ORDER)
    minus = Target.hyperquadric(-1, ORDER)
    assert plus.levi_signature() == (2, 0)
    assert minus.levi_signature() == (1, 1)
    assert plus.levi_nondegenerate() and minus.levi_nondegenerate()
    assert plus.hyperquadric_eps() == 1
    assert minus.hyperquadric_eps() == -1


def test_target_reality_enforced():
    frm = Target.hyperquadric(1, 8).frame
    rho = Target.hyperquadric(1, 8).rho + Series.variable(frm, "z1")
    with pytest.raises(ValueError):
        Target(rho, 3)


def test_segre_fiber_data_of_quartic():
    src = Source.from_defining(_rho_quartic())
    zf = frame("z", order=8)
    A = src.segre_coefficients(zf)
    # Q(z, chi, 0) = 2i z chi + ... : first Segre coefficient 2i z
    assert A[1] == Series.monomial(zf, (1,), 2 * I)


def test_source_reality_identity():
    # w = Q(z, chi, Qbar(chi, z, w)) holds exactly in the kept orders
    src = Source.from_defining(_rho_quartic())
    src.verify_normal_form()  # would raise on failure
