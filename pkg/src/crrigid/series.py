"""Truncated multivariate power series over Q(i, sqrt(d)).

A :class:`Series` is a sparse hash-map from exponent tuples to
:class:`~crrigid.scalars.Scalar` coefficients, truncated to a fixed total
(weighted) degree recorded in its :class:`Frame`.  Frames may additionally
impose per-variable degree caps and may allow bounded negative exponents
("controlled Laurent extension") in designated variables.

Two series are compatible only if their frames agree exactly; all binary
operations check this.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, Iterable, Mapping, Optional, Tuple

from crrigid.scalars import Scalar, scalar

Exponent = Tuple[int, ...]

NO_CAP = -1


@dataclass(frozen=True)
class Frame:
    """Variable frame: names, truncation order, weights, caps, floors."""

    vars: Tuple[str, ...]
    order: int
    weights: Tuple[int, ...] = None  # type: ignore[assignment]
    caps: Tuple[int, ...] = None  # type: ignore[assignment]
    floors: Tuple[int, ...] = None  # type: ignore[assignment]

    def __post_init__(self):
        n = len(self.vars)
        if self.weights is None:
            object.__setattr__(self, "weights", (1,) * n)
        if self.caps is None:
            object.__setattr__(self, "caps", (NO_CAP,) * n)
        if self.floors is None:
            object.__setattr__(self, "floors", (0,) * n)
        if len(set(self.vars)) != n:
            raise ValueError("duplicate variable names")

    def index(self, var: str) -> int:
        return self.vars.index(var)

    def wdeg(self, exp: Exponent) -> int:
        return sum(e * w for e, w in zip(exp, self.weights))

    def admits(self, exp: Exponent) -> bool:
        for e, cap, floor in zip(exp, self.caps, self.floors):
            if e < floor or (cap != NO_CAP and e > cap):
                return False
        return self.wdeg(exp) <= self.order

    def zero_exp(self) -> Exponent:
        return (0,) * len(self.vars)

    def with_order(self, order: int) -> "Frame":
        return Frame(self.vars, order, self.weights, self.caps, self.floors)

    def renamed(self, mapping: Mapping[str, str]) -> "Frame":
        return Frame(tuple(mapping.get(v, v) for v in self.vars),
                     self.order, self.weights, self.caps, self.floors)


def frame(*vars: str, order: int, weights: Optional[Iterable[int]] = None,
          caps: Optional[Mapping[str, int]] = None,
          floors: Optional[Mapping[str, int]] = None) -> Frame:
    """Convenience constructor for :class:`Frame`."""
    n = len(vars)
    w = tuple(weights) if weights is not None else (1,) * n
    c = tuple((caps or {}).get(v, NO_CAP) for v in vars)
    f = tuple((floors or {}).get(v, 0) for v in vars)
    return Frame(tuple(vars), order, w, c, f)


class Series:
    """Sparse truncated power series with exact coefficients."""

    __slots__ = ("frame", "coeffs")

    def __init__(self, frm: Frame, coeffs: Optional[Dict[Exponent, Scalar]] = None):
        self.frame = frm
        self.coeffs = coeffs if coeffs is not None else {}

    # -- constructors -------------------------------------------------

    @staticmethod
    def zero(frm: Frame) -> "Series":
        return Series(frm, {})

    @staticmethod
    def const(frm: Frame, value) -> "Series":
        v = scalar(value) if not isinstance(value, Scalar) else value
        if v.is_zero():
            return Series(frm, {})
        return Series(frm, {frm.zero_exp(): v})

    @staticmethod
    def variable(frm: Frame, name: str) -> "Series":
        i = frm.index(name)
        exp = tuple(1 if j == i else 0 for j in range(len(frm.vars)))
        if not frm.admits(exp):
            raise ValueError(f"variable {name} not admitted by frame")
        return Series(frm, {exp: Scalar(1)})

    @staticmethod
    def monomial(frm: Frame, exp: Exponent, coeff) -> "Series":
        v = scalar(coeff) if not isinstance(coeff, Scalar) else coeff
        if v.is_zero() or not frm.admits(exp):
            return Series(frm, {})
        return Series(frm, {tuple(exp): v})

    # -- basic queries ------------------------------------------------

    def is_zero(self) -> bool:
        return not self.coeffs

    def coefficient(self, exp: Exponent) -> Scalar:
        return self.coeffs.get(tuple(exp), Scalar(0))

    def constant_term(self) -> Scalar:
        return self.coeffs.get(self.frame.zero_exp(), Scalar(0))

    def vanishing_order(self) -> int:
        """Minimal weighted degree of a nonzero term (order+1 if zero)."""
        if not self.coeffs:
            return self.frame.order + 1
        return min(self.frame.wdeg(e) for e in self.coeffs)

    def support(self):
        return self.coeffs.keys()

    def __eq__(self, other) -> bool:
        if not isinstance(other, Series):
            return NotImplemented
        return self.frame == other.frame and self.coeffs == other.coeffs

    def __hash__(self):
        return hash((self.frame, frozenset(self.coeffs.items())))

    # -- linear structure ---------------------------------------------

    def _assert_compatible(self, other: "Series") -> None:
        if self.frame != other.frame:
            raise ValueError("incompatible series frames")

    def __add__(self, other: "Series") -> "Series":
        self._assert_compatible(other)
        out = dict(self.coeffs)
        for exp, c in other.coeffs.items():
            prev = out.get(exp)
            s = c if prev is None else prev + c
            if s.is_zero():
                out.pop(exp, None)
            else:
                out[exp] = s
        return Series(self.frame, out)

    def __neg__(self) -> "Series":
        return Series(self.frame, {e: -c for e, c in self.coeffs.items()})

    def __sub__(self, other: "Series") -> "Series":
        return self + (-other)

    def scale(self, value) -> "Series":
        v = scalar(value) if not isinstance(value, Scalar) else value
        if v.is_zero():
            return Series(self.frame, {})
        return Series(self.frame, {e: c * v for e, c in self.coeffs.items()})

    # -- multiplication -----------------------------------------------

    def __mul__(self, other) -> "Series":
        if isinstance(other, (int, Fraction, Scalar)):
            return self.scale(other)
        self._assert_compatible(other)
        frm = self.frame
        if not self.coeffs or not other.coeffs:
            return Series(frm, {})
        a = sorted(((frm.wdeg(e), e, c) for e, c in self.coeffs.items()))
        b = sorted(((frm.wdeg(e), e, c) for e, c in other.coeffs.items()))
        if len(a) > len(b):
            a, b = b, a
        order = frm.order
        admits = frm.admits
        out: Dict[Exponent, Scalar] = {}
        for wa, ea, ca in a:
            limit = order - wa
            for wb, eb, cb in b:
                if wb > limit:
                    break
                exp = tuple(x + y for x, y in zip(ea, eb))
                if not admits(exp):
                    continue
                prod = ca * cb
                if prod.is_zero():
                    continue
                prev = out.get(exp)
                s = prod if prev is None else prev + prod
                if s.is_zero():
                    out.pop(exp, None)
                else:
                    out[exp] = s
        return Series(frm, out)

    __rmul__ = __mul__

    def __pow__(self, n: int) -> "Series":
        if n < 0:
            raise ValueError("negative power; use invert_unit")
        result = Series.const(self.frame, 1)
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base if n > 1 else base
            n >>= 1
        return result

    # -- calculus -----------------------------------------------------

    def partial(self, var: str) -> "Series":
        i = self.frame.index(var)
        floor = self.frame.floors[i]
        out: Dict[Exponent, Scalar] = {}
        for exp, c in self.coeffs.items():
            k = exp[i]
            if k == 0:
                continue
            nexp = exp[:i] + (k - 1,) + exp[i + 1:]
            if nexp[i] < floor:
                continue
            out[nexp] = c * k
        return Series(self.frame, out)

    def conj(self, rename: Optional[Mapping[str, str]] = None) -> "Series":
        """Conjugate coefficients; optionally rename variables.

        The rename map must be a bijection on the variable set (e.g.
        z <-> chi, w <-> tau); the frame keeps its variable order, so the
        exponent tuples are permuted accordingly.
        """
        frm = self.frame
        if not rename:
            return Series(frm, {e: c.conjugate() for e, c in self.coeffs.items()})
        new_names = [rename.get(v, v) for v in frm.vars]
        if sorted(new_names) != sorted(frm.vars):
            raise ValueError("rename must permute the variable set")
        perm = [new_names.index(v) for v in frm.vars]
        # position j of the new exponent tuple (variable frm.vars[j]) takes the
        # exponent of the source variable that renames to frm.vars[j].
        for j, p in enumerate(perm):
            if frm.weights[j] != frm.weights[p] or frm.caps[j] != frm.caps[p] \
                    or frm.floors[j] != frm.floors[p]:
                raise ValueError("rename must respect weights/caps/floors")
        out: Dict[Exponent, Scalar] = {}
        for exp, c in self.coeffs.items():
            nexp = tuple(exp[p] for p in perm)
            out[nexp] = c.conjugate()
        return Series(frm, out)

    # -- substitution -------------------------------------------------

    def substitute(self, bindings: Mapping[str, "Series"]) -> "Series":
        """Substitute a series for every variable.

        Every variable of this frame must be bound.  Each binding must have
        zero constant term and weighted vanishing order at least the weight
        of the variable it replaces (this keeps truncation exact).  All
        bindings must share one target frame.
        """
        frm = self.frame
        if set(bindings) != set(frm.vars):
            raise ValueError("substitute requires a binding for every variable")
        target = None
        for v in frm.vars:
            b = bindings[v]
            if target is None:
                target = b.frame
            elif b.frame != target:
                raise ValueError("bindings with mismatched frames")
            if not b.constant_term().is_zero():
                raise ValueError(f"binding for {v} has nonzero constant term")
            if b.vanishing_order() < frm.weights[frm.index(v)]:
                raise ValueError(f"binding for {v} vanishes to too low an order")
        assert target is not None
        one = Series.const(target, 1)
        # cached powers per variable
        maxexp = [0] * len(frm.vars)
        for exp in self.coeffs:
            for i, e in enumerate(exp):
                if e < 0:
                    raise ValueError("cannot substitute into a Laurent series")
                maxexp[i] = max(maxexp[i], e)
        powers = []
        for i, v in enumerate(frm.vars):
            p = [one]
            b = bindings[v]
            for _ in range(maxexp[i]):
                p.append(p[-1] * b)
            powers.append(p)
        out = Series.zero(target)
        for exp, c in sorted(self.coeffs.items()):
            term = None
            for i, e in enumerate(exp):
                if e == 0:
                    continue
                term = powers[i][e] if term is None else term * powers[i][e]
            if term is None:
                out = out + Series.const(target, c)
            else:
                out = out + term.scale(c)
        return out

    def rebase(self, target: Frame,
               rename: Optional[Mapping[str, str]] = None) -> "Series":
        """Reinterpret in another frame over (a superset of) the variables.

        Coefficients outside the target truncation are dropped only if the
        target is at least as wide on this series' support; otherwise raises.
        """
        pos = {}
        for i, v in enumerate(self.frame.vars):
            name = (rename or {}).get(v, v)
            pos[i] = target.index(name)
        out: Dict[Exponent, Scalar] = {}
        n = len(target.vars)
        for exp, c in self.coeffs.items():
            nexp = [0] * n
            for i, e in enumerate(exp):
                nexp[pos[i]] = e
            t = tuple(nexp)
            if not target.admits(t):
                raise ValueError(f"exponent {t} not admitted by target frame")
            out[t] = c
        return Series(target, out)

    # -- units --------------------------------------------------------

    def invert_unit(self) -> "Series":
        c0 = self.constant_term()
        if c0.is_zero():
            raise ValueError("invert_unit needs a nonzero constant term")
        g = Series.const(self.frame, c0.inverse())
        two = Series.const(self.frame, 2)
        steps = max(1, math.ceil(math.log2(self.frame.order + 2)) + 1)
        for _ in range(steps):
            g = g * (two - self * g)
        return g

    def sqrt_unit(self) -> "Series":
        """Principal square root of a unit whose constant term is a positive
        rational square."""
        c0 = self.constant_term()
        root = c0.sqrt_rational()
        if root.is_zero():
            raise ValueError("sqrt_unit needs a nonzero constant term")
        g = Series.const(self.frame, root)
        half = Scalar(Fraction(1, 2))
        steps = max(1, math.ceil(math.log2(self.frame.order + 2)) + 1)
        for _ in range(steps):
            g = (g + self * g.invert_unit()).scale(half)
        return g


def solve_implicit(F: Series, yvar: str, xvars: Tuple[str, ...],
                   target: Frame) -> Series:
    """Solve F(x, y) = 0 for y = g(x), g(0) = 0, by Newton iteration.

    ``F`` lives in a frame over ``xvars + (yvar,)``; ``target`` is the frame
    of the result over ``xvars``.  Requires F(0) = 0 and dF/dy(0) invertible.
    """
    if not F.constant_term().is_zero():
        raise ValueError("solve_implicit requires F(0) = 0")
    Fy = F.partial(yvar)
    if Fy.constant_term().is_zero():
        raise ValueError("solve_implicit requires dF/dy(0) != 0")
    g = Series.zero(target)
    xbind = {v: Series.variable(target, v) for v in xvars}
    steps = max(1, math.ceil(math.log2(target.order + 2)) + 2)
    for _ in range(steps):
        bind = dict(xbind)
        bind[yvar] = g
        val = F.substitute(bind)
        if val.is_zero():
            break
        dval = Fy.substitute(bind)
        g = g - val * dval.invert_unit()
    bind = dict(xbind)
    bind[yvar] = g
    if not F.substitute(bind).is_zero():
        raise ArithmeticError("implicit solve did not converge")
    return g


def reversion(psihat: Series, zvars: Tuple[str, ...], uvar: str,
              tvar: str, target: Frame) -> Series:
    """Invert psihat(z, u) = u + O(u^2 and z u) in u.

    Returns psi over ``zvars + (tvar,)`` with psihat(z, psi(z, t)) = t.
    The coefficient of u in psihat at z = 0 must be 1.
    """
    uidx = psihat.frame.index(uvar)
    uexp = tuple(1 if i == uidx else 0 for i in range(len(psihat.frame.vars)))
    if psihat.coefficient(uexp) != Scalar(1):
        raise ValueError("reversion requires unit linear coefficient in u")
    # F(z, t, y) = psihat(z, y) - t over vars zvars + (tvar, yvar)
    yvar = "__y"
    work = Frame(tuple(zvars) + (tvar, yvar), psihat.frame.order,
                 psihat.frame.weights[:len(zvars)]
                 + (psihat.frame.weights[uidx], psihat.frame.weights[uidx]))
    bind = {v: Series.variable(work, v) for v in zvars}
    bind[uvar] = Series.variable(work, yvar)
    F = psihat.substitute(bind) - Series.variable(work, tvar)
    return solve_implicit(F, yvar, tuple(zvars) + (tvar,), target)


def laurent_split(series: Series, lvar: str):
    """Split a Laurent-in-``lvar`` series into its regular part and the
    coefficients of the negative powers.

    Returns ``(regular, obstructions)`` where ``regular`` shares the frame
    (with only nonnegative exponents populated) and ``obstructions`` maps
    exponent tuples with negative ``lvar`` exponent to their coefficients.
    """
    i = series.frame.index(lvar)
    reg: Dict[Exponent, Scalar] = {}
    obs: Dict[Exponent, Scalar] = {}
    for exp, c in series.coeffs.items():
        (reg if exp[i] >= 0 else obs)[exp] = c
    return Series(series.frame, reg), obs


def pretty(series: Series) -> str:
    """Deterministic human-readable form (graded lexicographic order)."""
    frm = series.frame
    if not series.coeffs:
        return "0"
    items = sorted(series.coeffs.items(), key=lambda kv: (frm.wdeg(kv[0]), kv[0]))
    parts = []
    for exp, c in items:
        mono = "*".join(
            (v if e == 1 else f"{v}^{e}")
            for v, e in zip(frm.vars, exp) if e != 0)
        cs = str(c)
        if any(op in cs[1:] for op in (" + ", " - ")):
            cs = f"({cs})"
        parts.append(f"{cs}*{mono}" if mono else cs)
    return " + ".join(parts)
