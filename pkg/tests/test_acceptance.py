"""Acceptance gate: one criterion per test, one PASS/FAIL line each.

Criterion 6 contains a deliberately red sub-claim: the expected total
dimension 18 for the sphere embedding.  The computed, stabilized value is
22, and it is exact: 23 closed-form solution fields (10 restricted target
automorphisms, 5 source-reparametrization pushforwards, 8 further
generators) are residual-verified and span a 22-dimensional space inside
the computed kernel, so 22 is simultaneously an upper and a lower bound.
The expected value 18 = 10 + 8 omits the source-reparametrization
contribution (4 extra dimensions after one overlap).  The test fails
honestly rather than encoding the unreachable number.
"""

from fractions import Fraction

import pytest

from crrigid.corpus import EXPECTATIONS, load_corpus
from crrigid.geometry import Source, Target, defining_frame, normalize_defining
from crrigid.linalg import in_span, rank_of, same_span, span_rank
from crrigid.maps import (MapGerm, apply_isotropy, map_frame, nondegeneracy,
                          source_isotropy, target_isotropy, transversality)
from crrigid.oracle import direct_solve
from crrigid.pipeline import DegenerateMapError, solve_deformation
from crrigid.scalars import Scalar
from crrigid.series import Series
from crrigid.spaces import (VERDICT_INCONCLUSIVE, VERDICT_RIGID_TRIVIAL,
                            VERDICT_RIGID_VANISHING, field_residual,
                            genericity_certificate, hyperquadric_hol0_basis,
                            jet_row_of_field, pushforward, source_hol0_basis)

I = Scalar(0, 0, 1)
NC = 2 * 42   # real 4-jet coordinates


def _line(num, ok, text):
    print(f"{'PASS' if ok else 'FAIL'} criterion {num}: {text}")
    assert ok, f"criterion {num}: {text}"


def test_criterion_01_quartic_dimension_and_verdict(cache):
    sol = cache.pipeline("example-6-1")
    orc = cache.oracle("example-6-1")
    rep = cache.rigidity("example-6-1")
    ok = (sol.dim == 10 and sol.stabilized and orc.dim == 10
          and orc.stabilized and rep.verdict == VERDICT_RIGID_TRIVIAL)
    _line(1, ok, "quartic example: dimension 10 on both routes, "
          "rigid because all deformations are trivial")


def test_criterion_02_fiber_and_published_rows(cache):
    from crrigid.pipeline import segre_fiber
    from crrigid.series import frame
    import test_pipeline as tp
    spec = cache.spec("example-6-1")
    fiber = segre_fiber(spec.source, 12)
    a1_ok = fiber.A1 == Series.monomial(fiber.A1.frame, (1,), 2 * I)
    # closed form of the inverted fiber (checked exactly in test_pipeline)
    tp.test_fiber_closed_form_of_quartic_source(cache)
    tp.test_first_pole_conditions_match_published_rows(cache)
    _line(2, a1_ok, "quartic example: first Segre coefficient 2 i z, "
          "closed-form fiber inversion, and pole-row kernel equality "
          "with the published first condition group")


def test_criterion_03_perturbed_example_dimension_zero(cache):
    sol = cache.pipeline("example-6-2")
    rep = cache.rigidity("example-6-2")
    ok = (sol.dim == 0 and sol.stabilized
          and rep.verdict == VERDICT_RIGID_VANISHING)
    _line(3, ok, "perturbed example: dimension 0, rigid by vanishing")


def test_criterion_04_cubic_example_dimension_one(cache):
    sol = cache.pipeline("example-6-3")
    spec = cache.spec("example-6-3")
    frm = spec.H.frame
    z = Series.variable(frm, "z")
    V = [z.scale(I), (z * z).scale(I * Fraction(1, 3)), Series.zero(frm)]
    res_ok = field_residual(V, spec.H, spec.source, spec.target, 12).is_zero()
    col = {k: i for i, k in enumerate(sol.jet_keys)}
    vec = {2 * col[("jet", 0, 1, 0)] + 1: Scalar(1),
           2 * col[("jet", 1, 2, 0)] + 1: Scalar(1) / 3}
    span_ok = in_span(vec, sol.kernel_real, NC)
    ok = sol.dim == 1 and sol.stabilized and res_ok and span_ok
    _line(4, ok, "cubic example: dimension 1 with residual-verified "
          "basis field (i z, i z^2 / 3, 0)")


def test_criterion_05_family_dimensions_and_degeneration(cache):
    s1 = cache.pipeline("example-6-4")
    s2 = cache.pipeline("example-6-4-t2")
    degenerate = False
    spec0 = cache.spec("example-6-4-t0")
    try:
        solve_deformation(spec0.H, spec0.source, spec0.target, work_order=10)
    except DegenerateMapError:
        degenerate = True
    ok = (s1.dim == 10 and s1.stabilized and s2.dim == 10 and s2.stabilized
          and degenerate)
    _line(5, ok, "one-parameter family: dimension 10 at two parameter "
          "values, degeneracy error at the excluded value")


# -- sphere embedding evidence ----------------------------------------

@pytest.fixture(scope="module")
def sphere_fields():
    """Closed-form solution fields for the degree-two sphere embedding."""
    ORDER = 26
    spec = load_corpus("sphere-8", order=ORDER)
    mf = spec.H.frame
    z, w = Series.variable(mf, "z"), Series.variable(mf, "w")
    one = Series.const(mf, 1)
    half = Scalar(Fraction(1, 2))
    sq2 = Scalar(0, 1, 0, 0)
    isq2 = sq2.inverse()
    D1 = ((w + one.scale(I)) * (w * w - one)).invert_unit()
    D2 = ((w + one.scale(I)) * (w * w - one) * (w * w - one)).invert_unit()
    E2 = ((w * w - one) * (w * w - one)).invert_unit()
    z2, z3, z4 = z * z, z * z * z, z * z * z * z
    w2, w3, w4, w5 = w * w, w ** 3, w ** 4, w ** 5
    X = [
        [(w * z).scale(sq2) * D1, ((w - one.scale(I)) * z2) * D1,
         Series.zero(mf)],
        [(w * z2).scale(Scalar(-1)) * D1,
         (z * (w2 + w.scale(I) + z2.scale(Scalar(2)))).scale(I * isq2) * D1,
         Series.zero(mf)],
        [(w2 * z).scale(Scalar(3) * isq2) * D1, z2.scale(Scalar(-3)) * D1,
         Series.zero(mf)],
        [(w * (w2 - z2.scale(Scalar(4)) - one)).scale(half) * D1,
         (z * (w2 + w.scale(Scalar(2) * I) + z2.scale(Scalar(4)) + one))
         .scale(I * isq2) * D1,
         (w * z) * (w2 - one).invert_unit()],
        [(w * z3).scale(Scalar(4) * I * sq2) * D2,
         (w5.scale(I) - w4 - w3.scale(I) + w2
          - (z4 * w).scale(Scalar(4) * I) - z4.scale(Scalar(4)))
         .scale(Scalar(-1)) * D2,
         (w2 * z2).scale(Scalar(2) * sq2) * E2],
        [(w * z3).scale(Scalar(-2) * sq2) * D2,
         (w5 + w4.scale(I) - w3 - w2.scale(I)
          + (z4 * w).scale(Scalar(4)) - z4.scale(Scalar(4) * I))
         .scale(Scalar(Fraction(-1, 2))) * D2,
         (w2 * z2).scale(I * sq2) * E2],
        [(w4 + (z2 * w3).scale(Scalar(4) * I)
          - w2 * (z2.scale(Scalar(2)) + one) + z2.scale(Scalar(2))) * D2,
         (z * (w4.scale(Scalar(-1)) - w3.scale(I)
               + (z2 * w2).scale(Scalar(2))
               + (w * (z2.scale(Scalar(2)) + one)).scale(I) + one))
         .scale(sq2) * D2,
         (w2 * z).scale(Scalar(2)) * E2],
        [(w2 * (w2 + (z2 * w).scale(Scalar(4) * I) - one)).scale(half) * D2,
         (z * (w4.scale(Scalar(-1)) - w3.scale(Scalar(2) * I)
               + w2 * (z2.scale(Scalar(4)) + one)
               + (w * (z2 + one)).scale(Scalar(2) * I)
               - z2.scale(Scalar(2)))).scale(isq2) * D2,
         (w2 * z) * E2],
    ]
    push = [pushforward(spec.H, Xs) for Xs in source_hol0_basis(ORDER)]
    return spec, X, push


def test_criterion_06_sphere_embedding(cache, sphere_fields):
    spec, X, push = sphere_fields
    sol = cache.pipeline("sphere-8")
    rep = cache.rigidity("sphere-8")
    triv = cache.trivial("sphere-8")

    residual_ok = all(
        field_residual(V, spec.H, spec.source, spec.target, 18).is_zero()
        for V in X + push)
    rows_triv = list(triv.rows)
    rows_push = [jet_row_of_field(V) for V in push]
    rows_X = [jet_row_of_field(V) for V in X]
    span_ok = all(in_span(r, sol.kernel_real, NC)
                  for r in rows_triv + rows_push + rows_X)
    lower = span_rank(rows_triv + rows_push + rows_X, NC)
    structure_ok = (triv.dim == 10 and residual_ok and span_ok
                    and rep.verdict == VERDICT_INCONCLUSIVE
                    and sol.stabilized and lower == sol.dim)

    # the structural sub-claims must all hold; a failure here is a real
    # regression, distinct from the known-red dimension sub-claim below
    assert structure_ok, (
        f"sphere structure: trivial dim {triv.dim} (want 10), residuals "
        f"zero {residual_ok}, kernel containment {span_ok}, verdict "
        f"{rep.verdict!r}, stabilized {sol.stabilized}, lower bound "
        f"{lower} vs computed {sol.dim}")

    dim_expected = 18
    dim_ok = sol.dim == dim_expected
    detail = (f"computed stabilized dimension {sol.dim} with an exact "
              f"lower bound of {lower} from closed-form solutions; the "
              f"expected value {dim_expected} = 10 trivial + 8 extra "
              "omits the 4 extra dimensions contributed by source "
              "reparametrizations and is unreachable")
    _line(6, dim_ok, "sphere embedding: trivial space of dimension 10, "
          "eight closed-form generators residual-verified and inside the "
          "computed kernel, verdict inconclusive, total dimension 18 -- "
          + detail)


def test_criterion_07_automorphism_dimensions(cache):
    ok = True
    for eps in (1, -1):
        from crrigid.oracle import infinitesimal_automorphisms
        res = infinitesimal_automorphisms(Target.hyperquadric(eps, 16), keq=7)
        basis = hyperquadric_hol0_basis(eps, order=8)
        rows = []
        col = {k: i for i, k in enumerate(res.jet_keys)}
        for V in basis:
            row = {}
            for j, comp in enumerate(V):
                for exp, c in comp.coeffs.items():
                    key = ("jet", j) + exp
                    if key not in col:
                        continue
                    if not c.real_part().is_zero():
                        row[2 * col[key]] = c.real_part()
                    if not c.imag_part().is_zero():
                        row[2 * col[key] + 1] = c.imag_part()
            rows.append(row)
        ncols = 2 * len(res.jet_keys)
        ok = ok and res.dim == 10 and res.stabilized \
            and span_rank(rows, ncols) == 10 \
            and all(in_span(r, res.kernel_real, ncols) for r in rows)
    for entry in ("example-6-2", "example-6-3", "example-6-4"):
        res = cache.automorphisms(entry)
        ok = ok and res.dim == 0 and res.stabilized
    res = cache.automorphisms("target-6-4")
    ok = ok and res.dim == 1 and res.stabilized
    _line(7, ok, "automorphism dimensions: 10 for both hyperquadrics "
          "(cross-checked against the closed-form bases), 0 for the "
          "rigid targets, 1 for the two-dimensional target")


def test_criterion_08_pipeline_matches_oracle_everywhere(cache):
    ok = True
    details = []
    for entry, exp in EXPECTATIONS.items():
        if exp.degenerate or exp.aut_only:
            continue
        sol = cache.pipeline(entry)
        orc = cache.oracle(entry)
        agree = (sol.dim == orc.dim and sol.stabilized and orc.stabilized
                 and same_span(sol.kernel_real, orc.kernel_real, NC))
        details.append(f"{entry}: {sol.dim}/{orc.dim}")
        ok = ok and agree
    _line(8, ok, "independent solvers agree in dimension and kernel span "
          "on every corpus entry, both stabilized (" + ", ".join(details) + ")")


def test_criterion_09_isotropy_invariance(cache):
    spec = cache.spec("example-6-1")
    base_nd = nondegeneracy(spec.H, spec.source, spec.target)
    ok = True
    for u in (I, Scalar(-1), -1 * I):
        sigma = source_isotropy(1, 0, u, 0, 24)
        sig_prime = target_isotropy(
            1, 0, [[u, Scalar(0)], [Scalar(0), u * u]], [0, 0], 1, 24)
        moved = apply_isotropy(spec.H, sigma, sig_prime)
        nd = nondegeneracy(moved, spec.source, spec.target)
        res = direct_solve(moved, spec.source, spec.target, keq=16)
        ok = ok and transversality(moved) and nd.k0 == base_nd.k0 == 2 \
            and res.dim == 10 and res.stabilized
    _line(9, ok, "quartic example: dimension and nondegeneracy order are "
          "invariant under three exact isotropy representatives")


def test_criterion_10_genericity_certificates(cache):
    cert = cache.genericity("example-6-1")
    ok = cert.certified and cert.rank == cert.ncols == 74
    perturbations = {
        "z^2 + z^3": [(3, 0, Scalar(1))],
        "z^2 - 1/2 z^3": [(3, 0, Scalar(Fraction(-1, 2)))],
        "z^2 + z^3 + 1/2 z^4": [(3, 0, Scalar(1)),
                                (4, 0, Scalar(Fraction(1, 2)))],
    }
    logged = []
    for label, extra in perturbations.items():
        order = 24
        dfrm = defining_frame(order)
        z = Series.variable(dfrm, "z")
        chi = Series.variable(dfrm, "chi")
        w = Series.variable(dfrm, "w")
        tau = Series.variable(dfrm, "tau")
        F = z * z
        Fbar = chi * chi
        for (m, n, c) in extra:
            F = F + Series.monomial(dfrm, _exp(dfrm, "z", m, "w", n), c)
            Fbar = Fbar + Series.monomial(
                dfrm, _exp(dfrm, "chi", m, "tau", n), c.conjugate())
        rho = (w - tau).scale(Scalar(0, 0, Fraction(-1, 2))) \
            - z * chi - F * Fbar
        src = Source(normalize_defining(rho).Q)
        mf = map_frame(order)
        zm, wm = Series.variable(mf, "z"), Series.variable(mf, "w")
        Fm = zm * zm
        for (m, n, c) in extra:
            Fm = Fm + Series.monomial(mf, _exp(mf, "z", m, "w", n), c)
        H = MapGerm([zm, Fm, wm])
        tgt = Target.hyperquadric(1, order)
        pc = genericity_certificate(H, src, tgt)
        logged.append(f"{label}: rank {pc.rank}/{pc.ncols}"
                      + ("" if pc.certified else " (not full)"))
    print("genericity log: " + "; ".join(logged))
    _line(10, ok, "genericity: full column rank 74 away from the free "
          "slots for the quadratic graph; perturbation ranks logged: "
          + "; ".join(logged))


def _exp(frm, v1, m, v2, n):
    e = [0] * len(frm.vars)
    e[frm.index(v1)] = m
    e[frm.index(v2)] = n
    return tuple(e)
