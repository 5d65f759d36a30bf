"""Holomorphic map germs and their CR-geometric analysis.

A :class:`MapGerm` is a tuple of truncated series in the source variables
(z, w) (or (z1, .., w1) for self-maps of the target side), vanishing at 0.
This module provides composition and inversion of germs, the
transversality and finite-nondegeneracy certificates, 4-jet extraction,
and the isotropy actions of the sphere and hyperquadric automorphism
groups on embeddings.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

from crrigid.scalars import Scalar, I as IMAG, scalar
from crrigid.series import Frame, Series, frame
from crrigid.geometry import Source, Target, target_frame
from crrigid.linalg import rank_of

# frames --------------------------------------------------------------

def map_frame(order: int) -> Frame:
    """Frame of source variables (z, w) with CR weights (1, 2)."""
    return frame("z", "w", order=order, weights=(1, 2))


def self_map_frame(n: int, order: int) -> Frame:
    """Frame of target-side variables (z1, .., z_{n-1}, w1)."""
    names = tuple(f"z{i+1}" for i in range(n - 1)) + ("w1",)
    return Frame(names, order, (1,) * (n - 1) + (2,))


class MapGerm:
    """A germ of a holomorphic map vanishing at the origin."""

    def __init__(self, components: Sequence[Series]):
        self.components = tuple(components)
        if not self.components:
            raise ValueError("empty map germ")
        self.frame = self.components[0].frame
        for c in self.components:
            if c.frame != self.frame:
                raise ValueError("map components in mismatched frames")
            if not c.constant_term().is_zero():
                raise ValueError("map germ must vanish at the origin")

    def __len__(self) -> int:
        return len(self.components)

    def __getitem__(self, i: int) -> Series:
        return self.components[i]

    def __eq__(self, other) -> bool:
        return isinstance(other, MapGerm) and self.components == other.components

    @staticmethod
    def identity(frm: Frame) -> "MapGerm":
        return MapGerm([Series.variable(frm, v) for v in frm.vars])

    def jacobian0(self) -> List[List[Scalar]]:
        """Differential at 0 (rows = components, columns = variables)."""
        nv = len(self.frame.vars)
        rows = []
        for comp in self.components:
            row = []
            for i in range(nv):
                exp = tuple(1 if j == i else 0 for j in range(nv))
                row.append(comp.coefficient(exp))
            rows.append(row)
        return rows

    def is_immersion(self) -> bool:
        jac = self.jacobian0()
        rows = [{j: v for j, v in enumerate(r) if not v.is_zero()} for r in jac]
        return rank_of(rows, len(self.frame.vars)) == len(self.frame.vars)

    def compose(self, inner: "MapGerm") -> "MapGerm":
        """self o inner; the inner germ must land in this germ's variables."""
        if len(inner) != len(self.frame.vars):
            raise ValueError("composition dimension mismatch")
        bindings = dict(zip(self.frame.vars, inner.components))
        return MapGerm([c.substitute(bindings) for c in self.components])

    def inverse(self) -> "MapGerm":
        """Inverse germ of a self-map with invertible triangular linear part.

        For weighted frames the linear part must not mix a weight-2 slot
        into weight-1 slots (true for all hypersurface-preserving germs in
        normal coordinates).
        """
        frm = self.frame
        nv = len(frm.vars)
        if len(self) != nv:
            raise ValueError("only self-maps can be inverted")
        jac = self.jacobian0()
        inv = _invert_matrix(jac)
        ident = MapGerm.identity(frm)
        phi = _matvec_germ(inv, ident)
        for _ in range(frm.order + 2):
            err = [c - i for c, i in zip(self.compose(phi).components,
                                         ident.components)]
            if all(e.is_zero() for e in err):
                return phi
            corr = _matvec_series(inv, err)
            phi = MapGerm([p - c for p, c in zip(phi.components, corr)])
        raise ArithmeticError("germ inversion did not converge")


def _invert_matrix(m: List[List[Scalar]]) -> List[List[Scalar]]:
    n = len(m)
    aug = [[m[i][j] for j in range(n)] + [Scalar(1 if k == i else 0) for k in range(n)]
           for i, _ in enumerate(m)]
    for col in range(n):
        piv = next((r for r in range(col, n) if not aug[r][col].is_zero()), None)
        if piv is None:
            raise ValueError("singular linear part")
        aug[col], aug[piv] = aug[piv], aug[col]
        inv = aug[col][col].inverse()
        aug[col] = [v * inv for v in aug[col]]
        for r in range(n):
            if r != col and not aug[r][col].is_zero():
                f = aug[r][col]
                aug[r] = [a - f * b for a, b in zip(aug[r], aug[col])]
    return [row[n:] for row in aug]


def _matvec_series(m: List[List[Scalar]], vec: Sequence[Series]) -> List[Series]:
    out = []
    for row in m:
        acc = Series.zero(vec[0].frame)
        for c, s in zip(row, vec):
            if not c.is_zero():
                acc = acc + s.scale(c)
        out.append(acc)
    return out


def _matvec_germ(m: List[List[Scalar]], germ: MapGerm) -> MapGerm:
    return MapGerm(_matvec_series(m, germ.components))


# -- analysis of embeddings M -> M' -----------------------------------

def transversality(H: MapGerm) -> bool:
    """CR transversality: (dH_w'/dz, dH_w'/dw)(0) != (0, 0) for the last
    component (the target normal direction)."""
    last = H.components[-1]
    return not (last.coefficient((1, 0)).is_zero()
                and last.coefficient((0, 1)).is_zero())


def embedding_residual(H: MapGerm, source: Source, target: Target,
                       order: int) -> Series:
    """rho'(H, Hbar) restricted to the complexified source germ; zero iff
    H maps M into M' (to the working order)."""
    frm = source.zct_frame(order)
    wstar = source.w_on_zct(frm)
    zvar = Series.variable(frm, "z")
    cvar = Series.variable(frm, "chi")
    tvar = Series.variable(frm, "tau")
    Hc = [c.substitute({"z": zvar, "w": wstar}) for c in H.components]
    Hb = [c.conj().substitute({"z": cvar, "w": tvar}) for c in H.components]
    bind: Dict[str, Series] = {}
    for i in range(target.n - 1):
        bind[f"z{i+1}"] = Hc[i]
        bind[f"bz{i+1}"] = Hb[i]
    bind["w1"] = Hc[-1]
    bind["bw1"] = Hb[-1]
    return target.rho.substitute(bind)


@dataclass
class NondegeneracyCheck:
    """Finite nondegeneracy data of an embedding at 0."""
    span_dims: List[int]          # dim E_k(0) for k = 0, 1, 2, ...
    k0: Optional[int]             # first k with full span, None if not reached
    s0: Scalar                    # det(r, Lr, L^2 r)(0)
    two_nondegenerate: bool


def gradient_rows_on_M(H: MapGerm, source: Source, target: Target,
                       order: int, kmax: int):
    """The pulled-back gradient r(H, Hbar) and its chi-derivatives on the
    (z, chi, w) parametrization of the complexified source germ.

    Returns (rows, frame): rows[k][j] = (d/dchi)^k applied to r_j(H, Hbar).
    """
    frm = source.zcw_frame(order)
    taustar = source.tau_on_zcw(frm)
    zvar = Series.variable(frm, "z")
    cvar = Series.variable(frm, "chi")
    wvar = Series.variable(frm, "w")
    Hc = [c.substitute({"z": zvar, "w": wvar}) for c in H.components]
    Hb = [c.conj().substitute({"z": cvar, "w": taustar}) for c in H.components]
    bind: Dict[str, Series] = {}
    for i in range(target.n - 1):
        bind[f"z{i+1}"] = Hc[i]
        bind[f"bz{i+1}"] = Hb[i]
    bind["w1"] = Hc[-1]
    bind["bw1"] = Hb[-1]
    r_on = [g.substitute(bind) for g in target.gradient()]
    rows = [r_on]
    for _ in range(kmax):
        rows.append([s.partial("chi") for s in rows[-1]])
    return rows, frm


def nondegeneracy(H: MapGerm, source: Source, target: Target,
                  order: int = 8, kmax: int = 4) -> NondegeneracyCheck:
    from crrigid.linalg import det3, Eliminator
    rows, frm = gradient_rows_on_M(H, source, target, order, kmax)
    n = target.n
    elim = Eliminator(n)
    dims = []
    k0 = None
    for k, row in enumerate(rows):
        vec = {j: s.constant_term() for j, s in enumerate(row)
               if not s.constant_term().is_zero()}
        elim.add_row(vec)
        dims.append(elim.rank)
        if k0 is None and elim.rank == n:
            k0 = k
    s0 = Scalar(0)
    if n == 3:
        mat = [[rows[k][j].constant_term() for j in range(3)] for k in range(3)]
        s0 = det3(mat)
    return NondegeneracyCheck(dims, k0, s0, not s0.is_zero())


# -- normal form of the embedding (z, F(z, w), w) ----------------------

@dataclass
class MapNormalForm:
    F: Series                 # the graphing component, frame (z, w)
    normalized: MapGerm       # (z, F(z, w), w)
    source_change: MapGerm    # psi with normalized o psi = (possibly swapped) H
    swapped: bool             # True if z1' and z2' were exchanged


def normalize_map(H: MapGerm) -> MapNormalForm:
    """Bring a transversal embedding into the form (z, F(z, w), w).

    Inverts (H1, H3) as a self-map of the source; if its linear part is
    singular, exchanges the first two target coordinates and inverts
    (H2, H3) instead.
    """
    if len(H) != 3:
        raise ValueError("normalize_map expects a map into C^3")
    if not transversality(H):
        raise ValueError("map is not transversal")
    frm = H.frame
    for swapped, (a, b) in ((False, (0, 1)), (True, (1, 0))):
        first = H.components[a]
        if first.coefficient((1, 0)).is_zero():
            continue
        psi = MapGerm([first, H.components[2]])
        psi_inv = psi.inverse()
        F = H.components[b].substitute(dict(zip(("z", "w"), psi_inv.components)))
        normalized = MapGerm([Series.variable(frm, "z"), F,
                              Series.variable(frm, "w")])
        return MapNormalForm(F, normalized, psi, swapped)
    raise ValueError("map cannot be graphed over (z, w): degenerate tangent")


# -- jets -------------------------------------------------------------

def jet_keys(n: int, kmax: int = 4) -> List[Tuple[int, int, int]]:
    """Ordered index set (component j, m, l) of the k-jet coordinates,
    1 <= m + l <= kmax, graded-lexicographic."""
    out = []
    for total in range(1, kmax + 1):
        for m in range(total, -1, -1):
            l = total - m
            for j in range(n):
                out.append((j, m, l))
    return sorted(out, key=lambda t: (t[1] + t[2], -t[1], t[0]))


def jet_vector(H: MapGerm, kmax: int = 4) -> Dict[Tuple[int, int, int], Scalar]:
    """Taylor coefficients H_j at z^m w^l for 1 <= m + l <= kmax."""
    out = {}
    for (j, m, l) in jet_keys(len(H), kmax):
        out[(j, m, l)] = H.components[j].coefficient((m, l))
    return out


# -- isotropies -------------------------------------------------------

def source_isotropy(lam, r, u, c, order: int) -> MapGerm:
    """Automorphism of the sphere germ {Im w = |z|^2} fixing 0:

        sigma(z, w) = (lam u (z + c w), lam^2 w) / (1 - 2 i cbar z + (r - i |c|^2) w)

    with lam > 0 rational, r rational, |u| = 1, c in Q(i, sqrt d).
    """
    lam, r, u, c = (x if isinstance(x, Scalar) else scalar(x) for x in (lam, r, u, c))
    if not (lam.is_real() and lam.sign() > 0 and r.is_real()):
        raise ValueError("lam must be positive real, r real")
    if not (u * u.conjugate() - Scalar(1)).is_zero():
        raise ValueError("u must be unimodular")
    frm = map_frame(order)
    z = Series.variable(frm, "z")
    w = Series.variable(frm, "w")
    den = Series.const(frm, 1) - z.scale(2 * IMAG * c.conjugate()) \
        + w.scale(r - IMAG * (c * c.conjugate()))
    dinv = den.invert_unit()
    return MapGerm([(z + w.scale(c)).scale(lam * u) * dinv,
                    w.scale(lam * lam) * dinv])


def target_isotropy(lam, r, U: Sequence[Sequence], c: Sequence, eps: int,
                    order: int) -> MapGerm:
    """Automorphism of the hyperquadric {Im w = |z1|^2 + eps |z2|^2} fixing 0:

        sigma'(z', w') = (lam U (z' + c w'), lam^2 w') / delta,
        delta = 1 - 2 i <cbar, z'>_eps + (r - i ||c||^2_eps) w',

    with U an eps-unitary 2x2 matrix (U* J U = J, J = diag(1, eps))."""
    lam = lam if isinstance(lam, Scalar) else scalar(lam)
    r = r if isinstance(r, Scalar) else scalar(r)
    U = [[x if isinstance(x, Scalar) else scalar(x) for x in row] for row in U]
    c = [x if isinstance(x, Scalar) else scalar(x) for x in c]
    if not (lam.is_real() and lam.sign() > 0 and r.is_real()):
        raise ValueError("lam must be positive real, r real")
    _check_eps_unitary(U, eps)
    frm = self_map_frame(3, order)
    z1 = Series.variable(frm, "z1")
    z2 = Series.variable(frm, "z2")
    w = Series.variable(frm, "w1")
    zc = [z1 + w.scale(c[0]), z2 + w.scale(c[1])]
    norm2 = c[0] * c[0].conjugate() + c[1] * c[1].conjugate() * eps
    pairing = z1.scale(c[0].conjugate()) + z2.scale(c[1].conjugate() * eps)
    den = Series.const(frm, 1) - pairing.scale(2 * IMAG) \
        + w.scale(r - IMAG * norm2)
    dinv = den.invert_unit()
    top = [zc[0].scale(U[0][0]) + zc[1].scale(U[0][1]),
           zc[0].scale(U[1][0]) + zc[1].scale(U[1][1])]
    return MapGerm([(top[0] * dinv).scale(lam), (top[1] * dinv).scale(lam),
                    (w * dinv).scale(lam * lam)])


def _check_eps_unitary(U, eps: int) -> None:
    J = [[Scalar(1), Scalar(0)], [Scalar(0), scalar(eps)]]
    for i in range(2):
        for j in range(2):
            acc = Scalar(0)
            for k in range(2):
                acc = acc + U[k][i].conjugate() * J[k][k] * U[k][j]
            if not (acc - J[i][j]).is_zero():
                raise ValueError("U is not eps-unitary")


def apply_isotropy(H: MapGerm, sigma: MapGerm, sigma_prime: MapGerm) -> MapGerm:
    """The action H -> sigma' o H o sigma^{-1} on embeddings."""
    return sigma_prime.compose(H.compose(sigma.inverse()))
