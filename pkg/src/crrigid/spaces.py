"""Deformation spaces, trivial subspaces, and rigidity verdicts.

Pulls the pieces together: the dimension of the space of infinitesimal
deformations of an embedding (from the jet parametrization or the brute
truncation solver), the subspace of trivial deformations obtained by
restricting infinitesimal automorphisms of the target along the map, the
two sufficient rigidity criteria, and a genericity certificate for the
full-rank property of the condition system.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, Hashable, List, Optional, Sequence, Tuple

from crrigid.scalars import Scalar, I as IMAG
from crrigid.series import Frame, Series, frame
from crrigid.linseries import bar_key
from crrigid.linalg import Row, in_span, rank_of, rref, span_rank
from crrigid.geometry import Source, Target
from crrigid.maps import MapGerm, map_frame, nondegeneracy, \
    embedding_residual, transversality
from crrigid.oracle import AutomorphismResult, DirectSolveResult, \
    direct_solve, infinitesimal_automorphisms, jet_unknowns
from crrigid.pipeline import DeformationSolve, DegenerateMapError, \
    jet_conditions, residual_rows, solve_deformation


class NotMappedError(ValueError):
    """The germ does not send the source hypersurface into the target."""


# -- closed-form automorphism algebra of the hyperquadrics ------------

def hyperquadric_hol0_basis(eps: int, order: int = 8) -> List[List[Series]]:
    """Real basis (10 fields) of the infinitesimal automorphisms fixing 0
    of the hyperquadric Im w' = |z1'|^2 + eps |z2'|^2.

    Fields are returned as component triples over (z1, z2, w1); all are
    polynomial of degree <= 2.  Parameters: a real dilation t, real
    rotations h11, h22, a complex rotation h12, complex parabolic
    directions b1, b2 and a real parabolic direction s.
    """
    f = frame("z1", "z2", "w1", order=order, weights=(1, 1, 2))
    z1, z2, w = (Series.variable(f, v) for v in ("z1", "z2", "w1"))
    zero = Series.zero(f)
    e = Scalar(eps)
    basis = [
        # dilation t and rotations h11, h22
        [z1, z2, w.scale(Scalar(2))],
        [z1.scale(IMAG), zero, zero],
        [zero, z2.scale(IMAG), zero],
        # complex rotation h12 = 1 and h12 = i
        [z2, z1.scale(-e), zero],
        [z2.scale(IMAG), z1.scale(e * IMAG), zero],
        # parabolic s
        [z1 * w, z2 * w, w * w],
    ]
    # parabolic b1 in {1, i} and b2 in {1, i}
    ih = Scalar(0, 0, Fraction(1, 2))
    for j, bval in ((0, Scalar(1)), (0, IMAG), (1, Scalar(1)), (1, IMAG)):
        lead = [zero, zero]
        lead[j] = w.scale(bval.conjugate() * ih)
        mix = z1.scale(bval) if j == 0 else z2.scale(bval * e)
        basis.append([lead[0] + z1 * mix, lead[1] + z2 * mix, w * mix])
    _verify_tangent(Target.hyperquadric(eps, order), basis)
    return basis


def _verify_tangent(target: Target, fields: Sequence[Sequence[Series]]) -> None:
    """Check Re sum_j rho_{Z_j} V_j = 0 on the target germ, exactly."""
    n = target.n
    frm = target.graph_frame(fields[0][0].frame.order)
    W = target.graph(frm)
    bind = {v: Series.variable(frm, v) for v in frm.vars}
    bind["w1"] = W
    swap = {}
    for i in range(n - 1):
        swap[f"z{i+1}"] = f"bz{i+1}"
        swap[f"bz{i+1}"] = f"z{i+1}"
    swap["w1"] = "bw1"
    swap["bw1"] = "w1"
    grad = target.gradient()
    r_on = [g.substitute(bind) for g in grad]
    rb_on = [g.conj(rename=swap).substitute(bind) for g in grad]
    names = [f"z{i+1}" for i in range(n - 1)] + ["w1"]
    holo_vars = [bind[v] for v in names]
    anti_vars = [Series.variable(frm, "b" + v) for v in names]
    for V in fields:
        res = Series.zero(frm)
        for j in range(n):
            holo = Series.zero(frm)
            anti = Series.zero(frm)
            for exp, c in V[j].coeffs.items():
                h = Series.const(frm, c)
                a = Series.const(frm, c.conjugate())
                for i, e in enumerate(exp):
                    for _ in range(e):
                        h = h * holo_vars[i]
                        a = a * anti_vars[i]
                holo = holo + h
                anti = anti + a
            res = res + r_on[j] * holo + rb_on[j] * anti
        if not res.is_zero():
            raise ArithmeticError("field is not tangent to the target germ")


# -- explicit deformation fields --------------------------------------

def source_hol0_basis(order: int = 8) -> List[List[Series]]:
    """Real basis (5 fields) of the infinitesimal automorphisms fixing 0
    of the source hyperquadric Im w = |z|^2, as (z, w) component pairs."""
    f = map_frame(order)
    z, w = Series.variable(f, "z"), Series.variable(f, "w")
    zero = Series.zero(f)
    ih = Scalar(0, 0, Fraction(1, 2))
    basis = [
        [z, w.scale(Scalar(2))],          # dilation
        [z.scale(IMAG), zero],            # rotation
        [z * w, w * w],                   # parabolic s
    ]
    for b in (Scalar(1), IMAG):           # parabolic b
        basis.append([w.scale(b.conjugate() * ih) + (z * z).scale(b),
                      (z * w).scale(b)])
    return basis


def pushforward(H: MapGerm, X: Sequence[Series]) -> List[Series]:
    """The field dH(X) along H, for X a field in the source variables."""
    mf = H.frame
    Xs = [x.rebase(mf) for x in X]
    out = []
    for comp in H.components:
        s = Series.zero(mf)
        for var, x in zip(mf.vars, Xs):
            s = s + comp.partial(var) * x
        out.append(s)
    return out


def field_residual(V: Sequence[Series], H: MapGerm, source: Source,
                   target: Target, order: int) -> Series:
    """Re sum_j rho_{Z_j}(H, conj H) V_j on the complexified source germ;
    zero (to the working order) iff V is an infinitesimal deformation."""
    frm = source.zct_frame(order)
    wstar = source.w_on_zct(frm)
    zv = Series.variable(frm, "z")
    cv = Series.variable(frm, "chi")
    tv = Series.variable(frm, "tau")
    Hc = [c.substitute({"z": zv, "w": wstar}) for c in H.components]
    Hb = [c.conj().substitute({"z": cv, "w": tv}) for c in H.components]
    bind: Dict[str, Series] = {}
    swap = {}
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
    res = Series.zero(frm)
    for j in range(target.n):
        Vc = V[j].substitute({"z": zv, "w": wstar})
        Vb = V[j].conj().substitute({"z": cv, "w": tv})
        res = res + r_on[j] * Vc + rb_on[j] * Vb
    return res


def jet_row_of_field(V: Sequence[Series], n: int = 3) -> Row:
    """Realified 4-jet vector of a field, in the solver's column order."""
    keys = jet_unknowns(n, (1, 2), 4)
    out: Row = {}
    for k, key in enumerate(keys):
        _, j, m, nn = key
        c = V[j].coefficient((m, nn))
        rp, ip = c.real_part(), c.imag_part()
        if not rp.is_zero():
            out[2 * k] = rp
        if not ip.is_zero():
            out[2 * k + 1] = ip
    return out


# -- trivial deformations: automorphisms restricted along the map -----

@dataclass
class TrivialSubspace:
    rows: List[Row]          # 4-jet vectors of V o H, realified
    dim: int                 # rank of the restriction
    aut: AutomorphismResult  # the target automorphism computation


def _compose_jet_vector(vec: Row, aut_keys: List[Hashable], H: MapGerm,
                        target: Target, jet_keys: List[Hashable]) -> Row:
    """4-jet of V o H as a real vector, V given by a realified jet vector."""
    mf = map_frame(8)
    comps = [Series(mf, {e: v for e, v in c.coeffs.items() if mf.admits(e)})
             for c in H.components]
    names = [f"z{i+1}" for i in range(target.n - 1)] + ["w1"]
    Vh = [Series.zero(mf) for _ in range(target.n)]
    mono_cache: Dict[Tuple[int, ...], Series] = {(0,) * target.n:
                                                 Series.const(mf, 1)}

    def mono(exp: Tuple[int, ...]) -> Series:
        if exp in mono_cache:
            return mono_cache[exp]
        i = next(k for k, e in enumerate(exp) if e > 0)
        prev = tuple(e - (1 if k == i else 0) for k, e in enumerate(exp))
        out = mono(prev) * comps[i]
        mono_cache[exp] = out
        return out

    for k, key in enumerate(aut_keys):
        re = vec.get(2 * k, Scalar(0))
        im = vec.get(2 * k + 1, Scalar(0))
        lam = re + im * IMAG
        if lam.is_zero():
            continue
        j, exp = key[1], tuple(key[2:])
        Vh[j] = Vh[j] + mono(exp).scale(lam)
    out: Row = {}
    for k, key in enumerate(jet_keys):
        _, j, m, n = key
        c = Vh[j].coefficient((m, n))
        rp, ip = c.real_part(), c.imag_part()
        if not rp.is_zero():
            out[2 * k] = rp
        if not ip.is_zero():
            out[2 * k + 1] = ip
    return out


def trivial_subspace(H: MapGerm, source: Source, target: Target,
                     aut_keq: int = 9) -> TrivialSubspace:
    """The trivial deformations V o H, V an infinitesimal automorphism of
    the target fixing 0, as 4-jet vectors of the embedding."""
    aut = infinitesimal_automorphisms(target, keq=aut_keq, proj_order=4)
    keys = jet_unknowns(target.n, (1, 2), 4)
    rows = []
    for vec in aut.kernel_real:
        row = _compose_jet_vector(vec, aut.jet_keys, H, target, keys)
        if row:
            rows.append(row)
    dim = rank_of(rows, 2 * len(keys))
    return TrivialSubspace(rref(rows, 2 * len(keys)), dim, aut)


# -- rigidity verdicts ------------------------------------------------

VERDICT_RIGID_VANISHING = "rigid (no nontrivial infinitesimal deformations)"
VERDICT_RIGID_TRIVIAL = "rigid (all infinitesimal deformations trivial)"
VERDICT_INCONCLUSIVE = "inconclusive"


@dataclass
class RigidityReport:
    dim: int                       # dim_R hol_0(H)
    stabilized: bool
    aut_dim: Optional[int]         # dim_R hol_0(M'), when computed
    aut_stabilized: Optional[bool]
    trivial_dim: Optional[int]     # rank of the restricted automorphisms
    trivial_contained: Optional[bool]
    levi_nondegenerate: bool
    verdict: str
    deformations: object           # DeformationSolve or DirectSolveResult
    trivial: Optional[TrivialSubspace]


def validate_embedding(H: MapGerm, source: Source, target: Target,
                       order: int = 10) -> None:
    """Raise if H is not a transversal 2-nondegenerate embedding of the
    source germ into the target germ."""
    if not H.is_immersion():
        raise DegenerateMapError("map is not an immersion at 0")
    if not transversality(H):
        raise DegenerateMapError("map is not transversal at 0")
    if not embedding_residual(H, source, target, order).is_zero():
        raise NotMappedError(
            "map does not send the source germ into the target germ")
    nd = nondegeneracy(H, source, target)
    if not nd.two_nondegenerate:
        raise DegenerateMapError("embedding is not 2-nondegenerate at 0")


def decide_rigidity(H: MapGerm, source: Source, target: Target,
                    work_order: int = 17, use_oracle: bool = False,
                    oracle_keq: int = 16, aut_keq: int = 9
                    ) -> RigidityReport:
    """Compute dim_R hol_0(H) and apply the sufficient rigidity criteria.

    Verdicts: dimension zero is rigid; if the target is Levi-nondegenerate
    and the dimension equals dim_R hol_0(M'), with the restricted
    automorphisms spanning the whole kernel, the map is rigid; otherwise
    the criteria are silent.
    """
    validate_embedding(H, source, target)
    if use_oracle:
        sol = direct_solve(H, source, target, keq=oracle_keq)
    else:
        sol = solve_deformation(H, source, target, work_order=work_order)
    dim = sol.dim
    ncols = 2 * len(sol.jet_keys)
    levi = target.levi_nondegenerate()

    aut_dim = aut_stab = triv_dim = contained = None
    triv = None
    if levi:
        triv = trivial_subspace(H, source, target, aut_keq=aut_keq)
        aut_dim = triv.aut.dim
        aut_stab = triv.aut.stabilized
        triv_dim = triv.dim
        contained = all(in_span(r, sol.kernel_real, ncols)
                        for r in triv.rows)

    if dim == 0 and sol.stabilized:
        verdict = VERDICT_RIGID_VANISHING
    elif (levi and sol.stabilized and aut_stab and contained
          and dim == aut_dim):
        verdict = VERDICT_RIGID_TRIVIAL
    else:
        verdict = VERDICT_INCONCLUSIVE
    return RigidityReport(dim, sol.stabilized, aut_dim, aut_stab,
                          triv_dim, contained, levi, verdict, sol, triv)


# -- genericity certificate -------------------------------------------

#: The ten jet slots that stay free in the model quadric case; the
#: condition system is full-rank on their complement.
FREE_SLOTS: Tuple[Hashable, ...] = (
    ("jet", 0, 1, 0), ("jetbar", 0, 1, 0),
    ("jet", 0, 0, 1), ("jetbar", 0, 0, 1),
    ("jet", 1, 1, 0), ("jetbar", 1, 1, 0),
    ("jet", 1, 0, 1), ("jetbar", 1, 0, 1),
    ("jet", 0, 1, 1), ("jet", 1, 2, 0),
)


@dataclass
class GenericityCertificate:
    rank: int
    ncols: int            # number of complement columns
    certified: bool       # full column rank on the complement
    free_slots: Tuple[Hashable, ...]


def genericity_certificate(H: MapGerm, source: Source, target: Target,
                           work_order: int = 17,
                           free_slots: Sequence[Hashable] = FREE_SLOTS
                           ) -> GenericityCertificate:
    """Full-rank certificate of the condition system.

    The jet and its formal conjugate are treated as independent complex
    unknowns; the pole, jet and residual rows together with their formal
    conjugates are collected, the columns of ``free_slots`` are deleted,
    and the remaining matrix must have full column rank.  When it does,
    every solution of the system is determined by the free slots alone,
    which is the linear-algebra content of the genericity statement for
    perturbations of the model embedding.
    """
    cond = jet_conditions(H, source, target, work_order)
    res = residual_rows(cond, H, source, target, work_order)
    keys = list(cond.jet_keys) + [bar_key(k) for k in cond.jet_keys]
    drop = set(free_slots)
    col = {k: i for i, k in enumerate(keys)}

    rows: List[Row] = []

    def push(crow: Dict[Hashable, Scalar]) -> None:
        for source_row in (crow,
                           {bar_key(k): v.conjugate()
                            for k, v in crow.items()}):
            r = {col[k]: v for k, v in source_row.items()
                 if k not in drop and not v.is_zero()}
            if r:
                rows.append(r)

    for row in cond.rows_pole.values():
        push(row)
    for row in cond.rows_jet.values():
        push(row)
    for row in res.values():
        push(row)
    ncols = len(keys) - len(drop)
    rank = rank_of(rows, len(keys))
    return GenericityCertificate(rank, ncols, rank == ncols,
                                 tuple(free_slots))
