"""Jet parametrization of the linearized embedding equation.

The linearized equation

    sum_j r_j(H, Hbar) alpha_j(z, w) + rbar_j(Hbar, H) alphabar_j(chi, tau) = 0
    on w = Q(z, chi, tau)

is solved by parametrizing every candidate solution by its 4-jet Lambda at
the origin and expressing membership as an explicit system of linear
conditions on Lambda.  The construction runs in two reflection stages:

1. Differentiating the equation along d/dz in the (z, chi, tau) chart (the
   anti-CR direction there) and Cramer-solving the resulting 3x3 system
   expresses the conjugate field alphabar on the first Segre set in terms
   of the 4-jet ("D-representations").
2. Differentiating along d/dchi in the (z, chi, w) chart and Cramer-solving
   expresses alpha on the second Segre set {w = Q(z, chi, 0)} in terms of
   the 2-jet of alphabar on the first Segre set, i.e. in terms of the
   D-representations; contracting the two stages yields a jet-linear
   series phi_l(x1, x2) with alpha_l(x1, Q(x1, x2, 0)) = phi_l(x1, x2).

Writing Q(z, chi, 0) = B(z) t with B = A_1^2 and inverting the fiber
coordinate gives Psi_l(z, t) with alpha_l(z, w) = Psi_l(z, w / B(z)).
Since B vanishes to second order in z, Psi_l(z, w / B(z)) is a priori
Laurent in z, and the candidate solution exists iff

  (i)   all negative z-powers vanish (rows ``pole``); the regular part is
        the candidate K_l(z, w, Lambda);
  (ii)  the 4-jet of K agrees with Lambda and K(0) = 0 (rows ``jet``);
  (iii) K solves the original equation (rows ``residual``, which also
        involve the conjugate jet).

The real solution space is the kernel of all rows over the realified 4-jet
coordinates; its dimension is the quantity of interest.  All rows kept are
exact: a coefficient of weighted degree m + 2n (or a pole row with
a + 2 m2) is trusted only up to the working order, and the residual is
harvested at two consecutive orders to certify stabilization.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Dict, Hashable, List, Optional, Tuple

from crrigid.scalars import Scalar
from crrigid.series import Frame, Series, frame
from crrigid.linseries import LinSeries, bar_key
from crrigid.linalg import Eliminator, adjugate3, det3, rref
from crrigid.geometry import Source, Target
from crrigid.maps import MapGerm, map_frame, nondegeneracy
from crrigid.oracle import jet_unknowns, _realify_row, Row


class DegenerateMapError(ValueError):
    """The embedding is not 2-nondegenerate, so the reflection systems are
    singular and the jet parametrization does not apply."""


# -- small frame surgery helpers --------------------------------------

def _drop_var(s: Series, var: str, target: Frame) -> Series:
    """Restrict to {var = 0} and re-express over the remaining variables."""
    i = s.frame.index(var)
    out: Dict[tuple, Scalar] = {}
    for exp, c in s.coeffs.items():
        if exp[i]:
            continue
        nexp = [0] * len(target.vars)
        for k, v in enumerate(s.frame.vars):
            if v == var:
                continue
            nexp[target.index(v)] = exp[k]
        t = tuple(nexp)
        if target.admits(t):
            out[t] = c
    return Series(target, out)


def _project(s: Series, target: Frame,
             rename: Optional[Dict[str, str]] = None) -> Series:
    """Like rebase, but silently drops exponents the target does not admit
    (used to pass from a wide working frame to the output truncation)."""
    pos = {}
    for i, v in enumerate(s.frame.vars):
        pos[i] = target.index((rename or {}).get(v, v))
    out: Dict[tuple, Scalar] = {}
    for exp, c in s.coeffs.items():
        nexp = [0] * len(target.vars)
        for i, e in enumerate(exp):
            nexp[pos[i]] = e
        t = tuple(nexp)
        if target.admits(t):
            out[t] = c
    return Series(target, out)


def _lin_map(ls: LinSeries, fn, frm: Optional[Frame] = None) -> LinSeries:
    out: Dict[Hashable, Series] = {}
    for k, s in ls.comps.items():
        r = fn(s)
        frm = r.frame
        if not r.is_zero():
            out[k] = r
    return LinSeries(frm if frm is not None else ls.frame, out)


# -- the two reflection stages ----------------------------------------

def _pulled_back_gradients(H: MapGerm, target: Target, frm: Frame,
                           on_zct: bool, source: Source):
    """r_j(H, Hbar) and rbar_j(Hbar, H) on the given chart of the
    complexified source germ."""
    zv = Series.variable(frm, "z")
    cv = Series.variable(frm, "chi")
    if on_zct:
        wser = source.w_on_zct(frm)
        tser = Series.variable(frm, "tau")
    else:
        wser = Series.variable(frm, "w")
        tser = source.tau_on_zcw(frm)
    Hc = [c.substitute({"z": zv, "w": wser}) for c in H.components]
    Hb = [c.conj().substitute({"z": cv, "w": tser}) for c in H.components]
    bind: Dict[str, Series] = {}
    swap: Dict[str, str] = {}
    for i in range(target.n - 1):
        bind[f"z{i+1}"] = Hc[i]
        bind[f"bz{i+1}"] = Hb[i]
        swap[f"z{i+1}"] = f"bz{i+1}"
        swap[f"bz{i+1}"] = f"z{i+1}"
    bind["w1"] = Hc[-1]
    bind["bw1"] = Hb[-1]
    swap["w1"] = "bw1"
    swap["bw1"] = "w1"
    grad = target.gradient()
    r_on = [g.substitute(bind) for g in grad]
    rb_on = [g.conj(rename=swap).substitute(bind) for g in grad]
    return r_on, rb_on


def conjugate_reflection(H: MapGerm, source: Source, target: Target,
                         order: int, xfrm: Frame):
    """Stage 1: D-representations of the conjugate field.

    Returns D[h][(j1, j2)] for j1 + j2 <= 2: jet-linear series in x2 that
    represent (d/dchi)^j1 (d/dtau)^j2 alphabar_h on the first Segre set
    {(chi, tau) = (x2, 0)} in terms of the (unbarred) 4-jet of alpha.
    Only d/dz up to order 2 is ever applied, so the chart carries a z-cap.
    """
    frm = source.zct_frame(order, zcap=2)
    r_on, rb_on = _pulled_back_gradients(H, target, frm, True, source)
    wstar = source.w_on_zct(frm)
    zv = Series.variable(frm, "z")

    # the unknown replaced by its 4-jet polynomial evaluated on the germ
    zpow = [Series.const(frm, 1)]
    wpow = [Series.const(frm, 1)]
    for _ in range(4):
        zpow.append(zpow[-1] * zv)
        wpow.append(wpow[-1] * wstar)
    rhs = LinSeries.zero(frm)
    for key in jet_unknowns(target.n, (1, 2), 4):
        _, j, m, n = key
        s = r_on[j] * (zpow[m] * wpow[n])
        if not s.is_zero():
            rhs = rhs + LinSeries.term(key, -s)
    lhs = [list(rb_on)]
    rhs_k = [rhs]
    for _ in range(2):
        lhs.append([s.partial("z") for s in lhs[-1]])
        rhs_k.append(rhs_k[-1].partial("z"))

    ct = frame("chi", "tau", order=order, weights=(1, 2))
    M = [[_drop_var(s, "z", ct) for s in row] for row in lhs]
    b = [_lin_map(r, lambda s: _drop_var(s, "z", ct), ct) for r in rhs_k]
    det = det3(M)
    if det.constant_term().is_zero():
        raise DegenerateMapError("conjugate reflection system is singular")
    detinv = det.invert_unit()
    adj = adjugate3(M)
    sol = []
    for h in range(3):
        acc = LinSeries.zero(ct)
        for k in range(3):
            acc = acc + b[k] * adj[h][k]
        sol.append(_lin_map(acc, lambda s: s * detinv))

    chif = frame("chi", order=ct.order)
    D: List[Dict[Tuple[int, int], LinSeries]] = []
    for h in range(3):
        reps: Dict[Tuple[int, int], LinSeries] = {}
        for j1 in range(3):
            for j2 in range(3 - j1):
                d = sol[h]
                for _ in range(j1):
                    d = d.partial("chi")
                for _ in range(j2):
                    d = d.partial("tau")
                d = _lin_map(d, lambda s: _drop_var(s, "tau", chif), chif)
                reps[(j1, j2)] = _lin_map(
                    d, lambda s: _project(s, xfrm, {"chi": "x2"}), xfrm)
        D.append(reps)
    return D


def direct_reflection(H: MapGerm, source: Source, target: Target,
                      order: int, xfrm: Frame, D) -> List[LinSeries]:
    """Stage 2: alpha on the second Segre set.

    Works in the (z, chi, w) chart with formal symbols for the chi/tau
    derivatives of the conjugate field, applies d/dchi up to twice,
    evaluates on {z = x1, chi = x2, w = Q(x1, x2, 0)} (where the symbols
    become the stage-1 D-representations) and Cramer-solves.  Returns the
    jet-linear series phi_l(x1, x2) = alpha_l(x1, Q(x1, x2, 0)).
    """
    frm = source.zcw_frame(order)
    r_on, rb_on = _pulled_back_gradients(H, target, frm, False, source)
    qbar_chi = source.tau_on_zcw(frm).partial("chi")

    def dchi(ls: LinSeries) -> LinSeries:
        # chain rule on symbols ("dbar", h, j1, j2) for the chi/tau
        # derivatives of alphabar_h evaluated at (chi, Qbar(chi, z, w))
        out: Dict[Hashable, Series] = {}

        def add(key, s):
            if s.is_zero():
                return
            out[key] = out[key] + s if key in out else s

        for (tag, h, j1, j2), s in ls.comps.items():
            add((tag, h, j1, j2), s.partial("chi"))
            add((tag, h, j1 + 1, j2), s)
            add((tag, h, j1, j2 + 1), s * qbar_chi)
        return LinSeries(frm, out)

    rhs = LinSeries(frm, {("dbar", j, 0, 0): -rb_on[j] for j in range(3)
                          if not rb_on[j].is_zero()})
    lhs = [list(r_on)]
    rhs_k = [rhs]
    for _ in range(2):
        lhs.append([s.partial("chi") for s in lhs[-1]])
        rhs_k.append(dchi(rhs_k[-1]))

    x1 = Series.variable(xfrm, "x1")
    x2 = Series.variable(xfrm, "x2")
    q12 = source.Q.substitute({"z": x1, "chi": x2,
                               "tau": Series.zero(xfrm)})
    bind = {"z": x1, "chi": x2, "w": q12}
    M = [[s.substitute(bind) for s in row] for row in lhs]
    b = [r.substitute(bind) for r in rhs_k]
    det = det3(M)
    if det.constant_term().is_zero():
        raise DegenerateMapError("reflection system is singular")
    detinv = det.invert_unit()
    adj = adjugate3(M)

    phi: List[LinSeries] = []
    for ell in range(3):
        acc = LinSeries.zero(xfrm)
        for k in range(3):
            acc = acc + b[k] * adj[ell][k]
        acc = _lin_map(acc, lambda s: s * detinv)
        # contract the symbols with the stage-1 representations
        out = LinSeries.zero(xfrm)
        for (tag, h, j1, j2), s in acc.comps.items():
            out = out + D[h][(j1, j2)] * s
        phi.append(out)
    return phi


# -- fiber coordinate on the second Segre set -------------------------

@dataclass
class SegreFiber:
    A1: Series      # Q_chi(z, 0, 0), vanishing to first order in z
    Uinv: Series    # z^2 / A1(z)^2, a unit
    psi: Series     # fiber inverse: Q(z, A1(z) psi(z, t), 0) = A1(z)^2 t


def segre_fiber(source: Source, kphi: int) -> SegreFiber:
    zf = frame("z", order=max(kphi, source.order))
    A = source.segre_coefficients(zf)
    A1 = A.get(1, Series.zero(zf))
    u1 = Series(zf, {(e - 1,): c for (e,), c in A1.coeffs.items() if e >= 1})
    if u1.constant_term().is_zero():
        raise DegenerateMapError("source germ is Levi degenerate")
    Uinv = (u1 * u1).invert_unit()

    pf = frame("z", "u", order=2 * kphi, caps={"z": kphi, "u": kphi})
    psihat = Series.variable(pf, "u")
    upow = psihat
    A1p = _project(A1, frame("z", order=kphi))
    for j in range(2, kphi + 1):
        upow = upow * Series.variable(pf, "u")
        Aj = A.get(j)
        if Aj is None:
            continue
        Cj = _project(Aj * (A1 ** (j - 2)), frame("z", order=kphi))
        psihat = psihat + upow * Cj.rebase(pf)
    tf = frame("z", "t", order=2 * kphi, caps={"z": kphi, "t": kphi})
    from crrigid.series import reversion
    psi = reversion(psihat, ("z",), "u", "t", tf)

    # check the defining identity Q(z, A1 psi, 0) = A1^2 t on the kept ball
    zD = Series.variable(tf, "z")
    lift = _project(A1, frame("z", order=kphi)).rebase(tf) * psi
    qcheck = source.Q.substitute({"z": zD, "chi": lift,
                                  "tau": Series.zero(tf)})
    b_t = (_project(A1 * A1, frame("z", order=kphi)).rebase(tf)
           * Series.variable(tf, "t"))
    if qcheck != b_t:
        raise ArithmeticError("fiber inversion failed to verify")
    return SegreFiber(A1, Uinv, psi)


# -- conditions -------------------------------------------------------

@dataclass
class JetConditions:
    jet_keys: List[Hashable]                       # unbarred 4-jet tags
    K: List[LinSeries]                             # candidate solution, (z, w)
    rows_pole: Dict[Tuple[int, int, int], Row]     # (l, a, m2) -> complex row
    rows_jet: Dict[Tuple[int, int, int], Row]      # (l, m, n) -> complex row
    phi: List[LinSeries]
    fiber: SegreFiber


def jet_conditions(H: MapGerm, source: Source, target: Target,
                   work_order: int = 17) -> JetConditions:
    """Pole and jet conditions of the parametrized candidate solution.

    ``work_order`` bounds the trusted weighted degree; internally one more
    plain degree is carried so that pole rows with a + 2 m2 = work_order + 1
    (which occur already in the quadric model) are available exactly.
    """
    kphi = work_order + 1
    nd = nondegeneracy(H, source, target)
    if not nd.two_nondegenerate:
        raise DegenerateMapError("embedding is not 2-nondegenerate at 0")

    xfrm = frame("x1", "x2", order=kphi)
    D = conjugate_reflection(H, source, target, kphi + 4, xfrm)
    phi = direct_reflection(H, source, target, kphi + 2, xfrm, D)
    fiber = segre_fiber(source, kphi)

    # Psi_l(z, t) = phi_l(z, A1(z) psi(z, t))
    tf = fiber.psi.frame
    lift = (_project(fiber.A1, frame("z", order=kphi)).rebase(tf)
            * fiber.psi)
    zt = Series.variable(tf, "z")
    Psi = [p.substitute({"x1": zt, "x2": lift}) for p in phi]

    # t -> w / B(z) stratum by stratum: B^m2 = z^(2 m2) / Uinv^m2
    zf = frame("z", order=kphi)
    uipow = [Series.const(zf, 1)]
    for _ in range(kphi):
        uipow.append(uipow[-1] * _project(fiber.Uinv, zf))

    keys = jet_unknowns(target.n, (1, 2), 4)
    mf = map_frame(kphi)
    it = tf.index("t")
    iz = tf.index("z")
    rows_pole: Dict[Tuple[int, int, int], Row] = {}
    Kcomps: List[Dict[Hashable, Series]] = [dict() for _ in range(3)]
    for ell in range(3):
        for key, s in Psi[ell].comps.items():
            strata: Dict[int, Dict[tuple, Scalar]] = {}
            for exp, c in s.coeffs.items():
                strata.setdefault(exp[it], {})[(exp[iz],)] = c
            for m2, zco in strata.items():
                prod = Series(zf, {e: c for e, c in zco.items()
                                   if zf.admits(e)}) * uipow[m2]
                for (m1,), c in prod.coeffs.items():
                    a = m1 - 2 * m2
                    if a < 0:
                        row = rows_pole.setdefault((ell, a, m2), {})
                        row[key] = row.get(key, Scalar(0)) + c
                    elif a + 2 * m2 <= kphi:
                        comp = Kcomps[ell].setdefault(key, Series.zero(mf))
                        Kcomps[ell][key] = comp + Series.monomial(
                            mf, (a, m2), c)
    rows_pole = {idx: {k: v for k, v in row.items() if not v.is_zero()}
                 for idx, row in rows_pole.items()}
    rows_pole = {idx: row for idx, row in rows_pole.items() if row}
    K = [LinSeries(mf, {k: s for k, s in comps.items() if not s.is_zero()})
         for comps in Kcomps]

    rows_jet: Dict[Tuple[int, int, int], Row] = {}
    for ell in range(3):
        for m in range(5):
            for n in range(5 - m):
                row = dict(K[ell].coefficient_row((m, n)))
                if (m, n) != (0, 0):
                    tag = ("jet", ell, m, n)
                    row[tag] = row.get(tag, Scalar(0)) - Scalar(1)
                row = {k: v for k, v in row.items() if not v.is_zero()}
                if row:
                    rows_jet[(ell, m, n)] = row
    return JetConditions(keys, K, rows_pole, rows_jet, phi, fiber)


def residual_rows(cond: JetConditions, H: MapGerm, source: Source,
                  target: Target, order: int) -> Dict[tuple, Row]:
    """Condition (iii): the candidate K re-inserted into the linearized
    equation on the complexified germ, harvested to the given weighted
    order.  Rows involve both the jet and its conjugate."""
    frm = source.zct_frame(order)
    r_on, rb_on = _pulled_back_gradients(H, target, frm, True, source)
    wstar = source.w_on_zct(frm)
    zv = Series.variable(frm, "z")
    cv = Series.variable(frm, "chi")
    tv = Series.variable(frm, "tau")
    res = LinSeries.zero(frm)
    for ell in range(3):
        Kc = cond.K[ell].substitute({"z": zv, "w": wstar})
        Kb = cond.K[ell].conj(keymap=bar_key).substitute(
            {"z": cv, "w": tv})
        res = res + _lin_map(Kc, lambda s: s * r_on[ell]) \
                  + _lin_map(Kb, lambda s: s * rb_on[ell])
    out: Dict[tuple, Row] = {}
    for exp in sorted(res.support(), key=lambda e: frm.wdeg(e)):
        row = res.coefficient_row(exp)
        if row:
            out[exp] = row
    return out


# -- assembled solver -------------------------------------------------

@dataclass
class DeformationSolve:
    conditions: JetConditions
    residuals: Dict[int, Dict[tuple, Row]]   # per harvested order
    dims: Dict[int, int]
    dim: int
    stabilized: bool
    kernel_real: List[Row]
    jet_keys: List[Hashable]


def solve_deformation(H: MapGerm, source: Source, target: Target,
                      work_order: int = 17,
                      cond_orders: Optional[Tuple[int, int]] = None
                      ) -> DeformationSolve:
    """Dimension of the space of infinitesimal deformations of H.

    The pole and jet rows are complex-linear in the 4-jet; the residual
    rows also involve the conjugate jet.  Everything is realified over the
    84 real 4-jet coordinates and the kernel dimension is reported, with
    stabilization over two consecutive residual harvest orders.
    """
    if cond_orders is None:
        cond_orders = (work_order - 1, work_order)
    if max(cond_orders) > work_order:
        raise ValueError("residual orders cannot exceed the working order")
    cond = jet_conditions(H, source, target, work_order)
    keys = cond.jet_keys
    col = {k: i for i, k in enumerate(keys)}
    ncols = 2 * len(keys)

    dims: Dict[int, int] = {}
    residuals: Dict[int, Dict[tuple, Row]] = {}
    kernel_real: List[Row] = []
    last = max(cond_orders)
    res_rows = residual_rows(cond, H, source, target, last)
    residuals[last] = res_rows
    for korder in sorted(cond_orders):
        elim = Eliminator(ncols)
        for row in cond.rows_pole.values():
            for r in _realify_row(row, col):
                elim.add_row(r)
        for row in cond.rows_jet.values():
            for r in _realify_row(row, col):
                elim.add_row(r)
        frm_w = source.zct_frame(korder)
        for exp, row in res_rows.items():
            if sum(e * w for e, w in zip(exp, frm_w.weights)) > korder:
                continue
            for r in _realify_row(row, col):
                elim.add_row(r)
        kernel = elim.kernel_basis()
        dims[korder] = len(kernel)
        if korder == last:
            kernel_real = rref(kernel, ncols)
    stabilized = len(set(dims.values())) == 1
    return DeformationSolve(cond, residuals, dims, dims[last], stabilized,
                            kernel_real, keys)
