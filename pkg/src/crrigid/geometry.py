"""CR geometry of real-analytic hypersurface germs.

Source germs M in C^2 are kept in normal coordinates {w = Q(z, chi, tau)}
with Q(z, 0, tau) = Q(0, chi, tau) = tau, where (chi, tau) are the
complexifications of (conj z, conj w).  Target germs M' in C^N' are kept
as complexified defining functions rho(Z, zeta) normalized so that the
linear part is (w - bw) / 2i.

Functions on the complexified germ of M can be parametrized either by
(z, chi, w) (eliminating tau = Qbar(chi, z, w)) or by (z, chi, tau)
(eliminating w = Q(z, chi, tau)).  In the first parametrization the CR
vector fields L, T, S act as the coordinate derivatives d/dchi, d/dw,
d/dz; in the second Lbar, Tbar, Sbar act as d/dz, d/dtau, d/dchi.  All
vector-field applications in this package use this device.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Dict, List, Optional, Tuple

from crrigid.scalars import Scalar, I as IMAG
from crrigid.series import Frame, Series, frame, solve_implicit

# canonical frames ----------------------------------------------------

def source_frame(order: int) -> Frame:
    """Frame for Q(z, chi, tau) with the CR weights (1, 1, 2)."""
    return frame("z", "chi", "tau", order=order, weights=(1, 1, 2))


def defining_frame(order: int) -> Frame:
    """Frame for a complexified defining function rho(z, w, chi, tau)."""
    return frame("z", "w", "chi", "tau", order=order, weights=(1, 2, 1, 2))


def target_vars(n: int) -> Tuple[str, ...]:
    zs = tuple(f"z{i+1}" for i in range(n - 1))
    return zs + ("w1",) + tuple("b" + v for v in zs) + ("bw1",)


def target_frame(n: int, order: int) -> Frame:
    zs = n - 1
    w = (1,) * zs + (2,) + (1,) * zs + (2,)
    return Frame(target_vars(n), order, w)


# source germs --------------------------------------------------------

class Source:
    """A hypersurface germ M in C^2 in normal coordinates w = Q(z, chi, tau)."""

    def __init__(self, Q: Series, check: bool = True):
        self.Q = Q
        self.frame = Q.frame
        if check:
            self.verify_normal_form()

    @property
    def order(self) -> int:
        return self.frame.order

    # -- construction -------------------------------------------------

    @staticmethod
    def hyperquadric(order: int) -> "Source":
        """The sphere germ {Im w = |z|^2}, i.e. Q = tau + 2 i z chi."""
        frm = source_frame(order)
        Q = Series.variable(frm, "tau") \
            + Series.monomial(frm, (1, 1, 0), IMAG * 2)
        return Source(Q)

    @staticmethod
    def from_defining(rho: Series) -> "Source":
        """Normalize a complexified defining function rho(z, w, chi, tau).

        rho must vanish at 0, be real (rho(z, w, chi, tau) =
        conj-rho(chi, tau, z, w)) and have linear part (w - tau) / 2i.
        """
        res = normalize_defining(rho)
        return Source(res.Q)

    # -- invariant checks ---------------------------------------------

    def verify_normal_form(self) -> None:
        frm = self.frame
        z0 = Series.zero(frm)
        zv = Series.variable(frm, "z")
        cv = Series.variable(frm, "chi")
        tv = Series.variable(frm, "tau")
        if self.Q.substitute({"z": zv, "chi": z0, "tau": tv}) != tv:
            raise ValueError("normal form violated: Q(z, 0, tau) != tau")
        if self.Q.substitute({"z": z0, "chi": cv, "tau": tv}) != tv:
            raise ValueError("normal form violated: Q(0, chi, tau) != tau")
        # reality: Q(z, chi, Qbar(chi, z, w)) = w, checked in the
        # (z, chi, w) parametrization.
        wfrm = self.zcw_frame(self.order)
        qbar = self.tau_on_zcw(wfrm)
        q = self.Q.substitute({
            "z": Series.variable(wfrm, "z"),
            "chi": Series.variable(wfrm, "chi"),
            "tau": qbar,
        })
        if q != Series.variable(wfrm, "w"):
            raise ValueError("normal form violated: reality identity fails")

    # -- parametrizations of the complexified germ --------------------

    def zcw_frame(self, order: int, zcap: Optional[int] = None) -> Frame:
        caps = {"z": zcap} if zcap is not None else None
        return frame("z", "chi", "w", order=order, weights=(1, 1, 2), caps=caps)

    def zct_frame(self, order: int, zcap: Optional[int] = None) -> Frame:
        caps = {"z": zcap} if zcap is not None else None
        return frame("z", "chi", "tau", order=order, weights=(1, 1, 2), caps=caps)

    def Q_in(self, frm: Frame) -> Series:
        """Q expanded in a (z, chi, tau) frame (possibly capped/truncated)."""
        return self.Q.substitute({
            "z": Series.variable(frm, "z"),
            "chi": Series.variable(frm, "chi"),
            "tau": Series.variable(frm, "tau"),
        })

    def w_on_zct(self, frm: Frame) -> Series:
        """w = Q(z, chi, tau) in a (z, chi, tau) frame."""
        return self.Q_in(frm)

    def tau_on_zcw(self, frm: Frame) -> Series:
        """tau = Qbar(chi, z, w) in a (z, chi, w) frame."""
        qbar = self.Q.conj(rename={"z": "chi", "chi": "z"})
        return qbar.substitute({
            "z": Series.variable(frm, "z"),
            "chi": Series.variable(frm, "chi"),
            "tau": Series.variable(frm, "w"),
        })

    # -- extracted data -----------------------------------------------

    def segre_coefficients(self, zfrm: Frame) -> Dict[int, Series]:
        """A_j(z) with Q(z, chi, 0) = sum_j A_j(z) chi^j, as series in z."""
        out: Dict[int, Series] = {}
        iz = self.frame.index("z")
        ic = self.frame.index("chi")
        it = self.frame.index("tau")
        for exp, c in self.Q.coeffs.items():
            if exp[it] != 0:
                continue
            j = exp[ic]
            a = exp[iz]
            if j == 0:
                continue
            mono = Series.monomial(zfrm, (a,), c)
            out[j] = out.get(j, Series.zero(zfrm)) + mono
        return out

    def levi_nondegenerate(self) -> bool:
        """Levi nondegeneracy at 0 (coefficient of z chi in Q)."""
        iz = self.frame.index("z")
        ic = self.frame.index("chi")
        it = self.frame.index("tau")
        exp = [0, 0, 0]
        exp[iz] = 1
        exp[ic] = 1
        return not self.Q.coefficient(tuple(exp)).is_zero()

    def segre_map(self, q: int, frm: Frame):
        """The Segre maps S^1(x1) = (x1, 0) and S^2(x1, x2) =
        (x1, Q(x1, x2, 0)) over a frame containing x1 (and x2)."""
        x1 = Series.variable(frm, "x1")
        if q == 1:
            return (x1, Series.zero(frm))
        if q == 2:
            x2 = Series.variable(frm, "x2")
            w = self.Q.substitute({"z": x1, "chi": x2, "tau": Series.zero(frm)})
            return (x1, w)
        raise ValueError("only Segre sets of order 1 and 2 are provided")


# CR vector fields in the two standard parametrizations ---------------

def L(f: Series) -> Series:
    """L = d/dchi + Qbar_chi d/dtau, on the (z, chi, w) parametrization."""
    return f.partial("chi")


def T(f: Series) -> Series:
    """T = d/dw + Qbar_w d/dtau, on the (z, chi, w) parametrization."""
    return f.partial("w")


def S(f: Series) -> Series:
    """S = d/dz + Qbar_z d/dtau, on the (z, chi, w) parametrization."""
    return f.partial("z")


def Lbar(f: Series) -> Series:
    """Lbar = d/dz + Q_z d/dw, on the (z, chi, tau) parametrization."""
    return f.partial("z")


def Sbar(f: Series) -> Series:
    """Sbar = d/dchi + Q_chi d/dw, on the (z, chi, tau) parametrization."""
    return f.partial("chi")


def Tbar(f: Series) -> Series:
    """Tbar = d/dtau + Q_tau d/dw, on the (z, chi, tau) parametrization."""
    return f.partial("tau")


# normalization -------------------------------------------------------

@dataclass
class Normalization:
    Q: Series        # normal-coordinates graph, frame (z, chi, tau)
    Qtilde: Series   # raw graph before straightening
    g: Series        # coordinate change (z, w) -> (z, w + i g(z, w))
    already_normal: bool


def check_defining_reality(rho: Series) -> None:
    if rho.conj(rename={"z": "chi", "chi": "z", "w": "tau", "tau": "w"}) != rho:
        raise ValueError("defining function is not real")


def normalize_defining(rho: Series) -> Normalization:
    """Straighten a complexified defining function into normal coordinates.

    Solves rho = 0 for w, then constructs the unique change of coordinates
    (z, w) -> (z, w + i g(z, w)) with g = O(2), g(0, w) real, that makes
    the graph satisfy Q(z, 0, tau) = Q(0, chi, tau) = tau.
    """
    if not rho.constant_term().is_zero():
        raise ValueError("defining function must vanish at 0")
    check_defining_reality(rho)
    order = rho.frame.order
    sfrm = source_frame(order)
    qtilde = solve_implicit(rho, "w", ("z", "chi", "tau"), sfrm)

    # does it already satisfy the normality conditions?
    zv = Series.variable(sfrm, "z")
    cv = Series.variable(sfrm, "chi")
    tv = Series.variable(sfrm, "tau")
    z0 = Series.zero(sfrm)
    if qtilde.substitute({"z": zv, "chi": z0, "tau": tv}) == tv \
            and qtilde.substitute({"z": z0, "chi": cv, "tau": tv}) == tv:
        return Normalization(qtilde, qtilde, Series.zero(frame("z", "w", order=order, weights=(1, 2))), True)

    # step 1: G(w) = g(0, w) from  w + i G - Qtilde(0, 0, w - i G) = 0
    gfrm = frame("w", "y", order=order, weights=(2, 2))
    wv = Series.variable(gfrm, "w")
    yv = Series.variable(gfrm, "y")
    qt00 = qtilde.substitute({
        "z": Series.zero(gfrm), "chi": Series.zero(gfrm),
        "tau": wv - yv.scale(IMAG),
    })
    FG = wv + yv.scale(IMAG) - qt00
    wfrm = frame("w", order=order, weights=(2,))
    G = solve_implicit(FG, "y", ("w",), wfrm)
    if G.conj() != G:
        raise ArithmeticError("normalization produced a non-real gauge G")

    # step 2: g(z, w) = -i (Qtilde(z, 0, w - i G(w)) - w)
    zwfrm = frame("z", "w", order=order, weights=(1, 2))
    zz = Series.variable(zwfrm, "z")
    ww = Series.variable(zwfrm, "w")
    Gw = G.substitute({"w": ww})
    qt_z0 = qtilde.substitute({
        "z": zz, "chi": Series.zero(zwfrm), "tau": ww - Gw.scale(IMAG),
    })
    g = (qt_z0 - ww).scale(-IMAG)

    # step 3: solve  y + i g(z, y) = Qtilde(z, chi, tau - i gbar(chi, tau))
    qfrm = frame("z", "chi", "tau", "y", order=order, weights=(1, 1, 2, 2))
    zq = Series.variable(qfrm, "z")
    cq = Series.variable(qfrm, "chi")
    tq = Series.variable(qfrm, "tau")
    yq = Series.variable(qfrm, "y")
    gbar = g.conj()  # gbar(chi, tau) = conj coefficients, args renamed below
    gbar_ct = gbar.substitute({"z": cq, "w": tq})
    g_zy = g.substitute({"z": zq, "w": yq})
    FQ = yq + g_zy.scale(IMAG) - qtilde.substitute({
        "z": zq, "chi": cq, "tau": tq - gbar_ct.scale(IMAG),
    })
    Q = solve_implicit(FQ, "y", ("z", "chi", "tau"), sfrm)
    return Normalization(Q, qtilde, g, False)


# target germs --------------------------------------------------------

class Target:
    """A hypersurface germ M' in C^n given by a complexified defining
    function rho(Z, zeta) with linear part (w1 - bw1) / 2i."""

    def __init__(self, rho: Series, n: int, check: bool = True):
        self.rho = rho
        self.n = n
        self.frame = rho.frame
        if tuple(self.frame.vars) != target_vars(n):
            raise ValueError("target frame variables must be " + str(target_vars(n)))
        if check:
            self.verify()

    @property
    def order(self) -> int:
        return self.frame.order

    @staticmethod
    def hyperquadric(eps: int, order: int, n: int = 3) -> "Target":
        """{Im w = sum_j eps_j |z_j|^2} with eps_1 = 1, eps_2 = eps."""
        frm = target_frame(n, order)
        rho = (Series.variable(frm, "w1") - Series.variable(frm, "bw1")) \
            .scale(Scalar(0, 0, -1, 0) / 2)
        signs = [1] + [eps] * (n - 2)
        for j in range(n - 1):
            zj = Series.variable(frm, f"z{j+1}")
            bzj = Series.variable(frm, f"bz{j+1}")
            rho = rho - (zj * bzj).scale(signs[j])
        return Target(rho, n)

    def verify(self) -> None:
        if not self.rho.constant_term().is_zero():
            raise ValueError("target defining function must vanish at 0")
        swap = {}
        for i in range(self.n - 1):
            swap[f"z{i+1}"] = f"bz{i+1}"
            swap[f"bz{i+1}"] = f"z{i+1}"
        swap["w1"] = "bw1"
        swap["bw1"] = "w1"
        if self.rho.conj(rename=swap) != self.rho:
            raise ValueError("target defining function is not real")
        # linear part must be (w1 - bw1)/2i
        nvars = len(self.frame.vars)
        mihalf = Scalar(0, 0, -1, 0) / 2
        for i, v in enumerate(self.frame.vars):
            exp = tuple(1 if k == i else 0 for k in range(nvars))
            c = self.rho.coefficient(exp)
            if v == "w1":
                want = mihalf
            elif v == "bw1":
                want = -mihalf
            else:
                want = Scalar(0)
            if c != want:
                raise ValueError("target linear part must be (w1 - bw1)/2i")

    # -- derived data --------------------------------------------------

    def gradient(self) -> List[Series]:
        """r_j = d rho / d Z_j for Z = (z1, .., z_{n-1}, w1)."""
        names = [f"z{i+1}" for i in range(self.n - 1)] + ["w1"]
        return [self.rho.partial(v) for v in names]

    def graph(self, frm: Frame) -> Series:
        """w1 = W(z', zeta') solving rho = 0, over the given frame whose
        variables are the target variables except w1."""
        xvars = tuple(v for v in self.frame.vars if v != "w1")
        return solve_implicit(self.rho, "w1", xvars, frm)

    def graph_frame(self, order: int) -> Frame:
        xvars = tuple(v for v in self.frame.vars if v != "w1")
        weights = tuple(w for v, w in zip(self.frame.vars, self.frame.weights)
                        if v != "w1")
        return Frame(xvars, order, weights)

    def levi_matrix(self) -> List[List[Scalar]]:
        """Hermitian matrix h with rho = (w1-bw1)/2i - sum h_jk z_j bz_k + ..."""
        m = self.n - 1
        nvars = len(self.frame.vars)
        out = []
        for j in range(m):
            row = []
            for k in range(m):
                exp = [0] * nvars
                exp[self.frame.index(f"z{j+1}")] += 1
                exp[self.frame.index(f"bz{k+1}")] += 1
                row.append(-self.rho.coefficient(tuple(exp)))
            out.append(row)
        return out

    def levi_signature(self) -> Tuple[int, int]:
        """(positive, negative) eigenvalue counts of the Levi matrix."""
        h = self.levi_matrix()
        m = len(h)
        if m == 1:
            s = h[0][0].sign()
            return (1, 0) if s > 0 else ((0, 1) if s < 0 else (0, 0))
        if m == 2:
            det = h[0][0] * h[1][1] - h[0][1] * h[1][0]
            if det.sign() < 0:
                return (1, 1)
            if det.sign() > 0:
                return (2, 0) if h[0][0].sign() > 0 else (0, 2)
            # rank <= 1
            for diag in (h[0][0], h[1][1]):
                s = diag.sign()
                if s:
                    return (1, 0) if s > 0 else (0, 1)
            if not h[0][1].is_zero():
                return (1, 1)
            return (0, 0)
        raise ValueError("levi_signature supports targets in C^2 and C^3")

    def levi_nondegenerate(self) -> bool:
        p, q = self.levi_signature()
        return p + q == self.n - 1

    def hyperquadric_eps(self) -> Optional[int]:
        """If M' is exactly a hyperquadric {Im w = |z1|^2 + eps |z2|^2},
        return eps; otherwise None."""
        if self.n != 3:
            return None
        for eps in (1, -1):
            model = Target.hyperquadric(eps, self.order, self.n)
            if model.rho == self.rho:
                return eps
        return None
