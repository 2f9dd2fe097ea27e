"""Pre-Saito structures: families, checkers, deformations, tensor and wedge.

A pre-Saito family over a base with coordinates x_1..x_m is the matrix data

    (B_inf, B_0(x), C^(1)(x), ..., C^(m)(x))          all d x d,

subject to the flatness relations (checked by ``check_pre_saito``)

    d_j C^(i) = d_i C^(j),   [C^(i), C^(j)] = 0,   [B_0, C^(i)] = 0,
    C^(i) + d_i B_0 = [B_inf, C^(i)],               B_inf constant,

and optionally a constant metric G of some weight w (``check_metric``).
Operators act on basis row vectors from the right, so these matrices are the
ordinary column-coordinate matrices; the residue endomorphism R_inf has
matrix -B_inf and R_0 has matrix B_0.

Base coordinates come in three kinds.  A "q" coordinate is an invertible
Laurent variable whose attached derivation is q*d/dq (the exponentiated flat
coordinate of a quantum parameter); a "laurent" coordinate is an invertible
variable with the plain derivation d/dlambda; a "series" coordinate is a
formal deformation variable truncated in total degree.  Entries of the
matrices live in Laurent polynomials over the q-type coordinates (plus any
declared parameters), wrapped in truncated power series when series
coordinates are present.
"""

from __future__ import annotations

import json
from fractions import Fraction
from typing import Iterable, NamedTuple, Sequence

from .linalg import (
    Mat,
    Ring,
    inv_field,
    inv_series,
    kron,
    kron_sum,
    laurent_ring,
    lift_qfrac,
    wedge_indices,
    wedge_metric,
    wedge_of_sum,
)
from .rings import (
    Exponents,
    Laurent,
    QFrac,
    Series,
    as_fraction,
    fraction_from_str,
    fraction_to_str,
)

VAR_KINDS = ("q", "laurent", "series")


class BaseVar(NamedTuple):
    name: str
    kind: str


class NotPrimitive(Exception):
    """The period map of the proposed primitive section is not invertible."""


class PreSaitoFamily:
    """Matrix data of a pre-Saito structure over a coordinatized base.

    ``base`` is the ordered tuple of BaseVar directions; ``params`` names
    Laurent parameters that appear in entries without being directions (no
    C-matrix, no derivation).  ``order`` is the series truncation order and
    is required exactly when a series direction is present.
    """

    __slots__ = ("base", "params", "d", "Binf", "B0", "C", "G", "w", "order")

    def __init__(self, base: Sequence, d: int, Binf: Mat, B0: Mat,
                 C: dict[str, Mat], G: Mat | None = None,
                 w: Fraction | None = None, order: int | None = None,
                 params: tuple[str, ...] = ()):
        self.base = tuple(v if isinstance(v, BaseVar) else BaseVar(*v) for v in base)
        self.params = tuple(params)
        for v in self.base:
            if v.kind not in VAR_KINDS:
                raise ValueError(f"unknown base variable kind {v.kind!r}")
        names = [v.name for v in self.base]
        if len(set(names)) != len(names):
            raise ValueError("duplicate base variable names")
        if set(C) != set(names):
            raise ValueError("C matrices must be keyed by the base variable names")
        self.d = d
        self.Binf = Binf
        self.B0 = B0
        self.C = dict(C)
        self.G = G
        self.w = as_fraction(w) if w is not None else None
        if (w is None) != (G is None):
            raise ValueError("metric G and weight w must be supplied together")
        self.order = order
        if self.svars and order is None:
            raise ValueError("series directions require a truncation order")
        for name, M in [("Binf", Binf), ("B0", B0)] + list(C.items()):
            if M.shape != (d, d):
                raise ValueError(f"{name} must be {d}x{d}, got {M.shape}")
        if G is not None and G.shape != (d, d):
            raise ValueError("G has the wrong shape")

    # -- coordinate bookkeeping ------------------------------------------------

    @property
    def qvars(self) -> tuple[str, ...]:
        """Laurent variables of the entry ring: parameters, then q-type directions."""
        return self.params + tuple(v.name for v in self.base if v.kind != "series")

    @property
    def svars(self) -> tuple[str, ...]:
        return tuple(v.name for v in self.base if v.kind == "series")

    def kind_of(self, name: str) -> str:
        for v in self.base:
            if v.name == name:
                return v.kind
        raise KeyError(name)

    def ring(self) -> Ring:
        if self.svars:
            zero = Series.zero(self.svars, self.order)
            one = Series.const(self.svars, self.order, Laurent.const(self.qvars, 1))
            return Ring(zero, one)
        return laurent_ring(self.qvars)

    def const(self, value: int | Fraction):
        """The constant scalar of the entry ring with rational value."""
        c = Laurent.const(self.qvars, value)
        if self.svars:
            return Series.const(self.svars, self.order, c)
        return c

    def lift_fraction_matrix(self, M: Mat) -> Mat:
        return M.map(lambda a: self.const(as_fraction(a)))

    # -- derivations -------------------------------------------------------------

    def dscalar(self, x, name: str):
        kind = self.kind_of(name)
        if kind == "series":
            if not isinstance(x, Series):
                raise TypeError("series derivation on a non-series entry")
            return x.deriv(name)
        if self.svars:
            if kind == "q":
                return x.map_coeffs(lambda c: c.log_deriv(name))
            return x.map_coeffs(lambda c: c.deriv(name))
        if kind == "q":
            return x.log_deriv(name)
        return x.deriv(name)

    def dmat(self, M: Mat, name: str) -> Mat:
        return M.map(lambda x: self.dscalar(x, name))

    # -- structural helpers --------------------------------------------------------

    def entry_is_constant(self, x) -> bool:
        """Constant in every base direction (parameters allowed to remain)."""
        direction_qvars = tuple(v.name for v in self.base if v.kind != "series")
        if isinstance(x, Series):
            if any(any(e) for e in x.terms):
                return False
            c = x.constant_slice()
            x = c if c is not None else Laurent.zero(self.qvars)
        return all(x.degree_range(v) == (0, 0) for v in direction_qvars)

    def matrix_is_constant(self, M: Mat) -> bool:
        return all(self.entry_is_constant(x) for r in M.rows for x in r)

    def constant_fraction_matrix(self, M: Mat) -> Mat:
        """Extract the rational matrix underlying a constant matrix."""
        def down(x) -> Fraction:
            if isinstance(x, Series):
                c = x.constant_slice()
                x = c if c is not None else Laurent.zero(self.qvars)
            return x.as_fraction()
        return M.map(down)

    def reorder_base(self, names: Sequence[str]) -> "PreSaitoFamily":
        """Permute the declared base order (series entries are re-indexed)."""
        if sorted(names) != sorted(v.name for v in self.base):
            raise ValueError("reorder must permute the existing base variables")
        new_base = tuple(next(v for v in self.base if v.name == n) for n in names)
        out = PreSaitoFamily(new_base, self.d, self.Binf, self.B0, self.C,
                             self.G, self.w, self.order, self.params)
        if out.svars != self.svars:
            def remap(M: Mat) -> Mat:
                return M.map(lambda s: s.promote(out.svars, self.order))
            out = PreSaitoFamily(new_base, self.d, remap(self.Binf), remap(self.B0),
                                 {k: remap(v) for k, v in self.C.items()},
                                 remap(self.G) if self.G is not None else None,
                                 self.w, self.order, self.params)
        return out

    def restrict_zero(self, names: Iterable[str]) -> "PreSaitoFamily":
        """Set series directions to zero and remove them from the base."""
        names = tuple(names)
        for n in names:
            if self.kind_of(n) != "series":
                raise ValueError(f"{n} is not a series direction")
        kept = tuple(v for v in self.base if v.name not in names)
        kept_svars = tuple(v.name for v in kept if v.kind == "series")

        def restrict(M: Mat) -> Mat:
            def entry(s: Series):
                s0 = s.restrict_zero(names)
                if kept_svars:
                    return s0.promote(kept_svars, self.order)
                c = s0.constant_slice()
                return c if c is not None else Laurent.zero(self.qvars)
            return M.map(entry)

        return PreSaitoFamily(
            kept, self.d, restrict(self.Binf), restrict(self.B0),
            {v.name: restrict(self.C[v.name]) for v in kept},
            restrict(self.G) if self.G is not None else None,
            self.w, self.order if kept_svars else None, self.params)


# ---------------------------------------------------------------------------
# Reports
# ---------------------------------------------------------------------------


class Report:
    """Accumulated pass/fail results with a witness for each failure."""

    def __init__(self, title: str):
        self.title = title
        self.checks: list[tuple[str, bool, str]] = []

    def record(self, name: str, ok: bool, witness: str = "") -> None:
        self.checks.append((name, bool(ok), witness))

    @property
    def ok(self) -> bool:
        return all(ok for _, ok, _ in self.checks)

    def first_witness(self) -> str:
        for name, ok, witness in self.checks:
            if not ok:
                return f"{name}: {witness}" if witness else name
        return ""

    def lines(self) -> list[str]:
        out = []
        for name, ok, witness in self.checks:
            tag = "PASS" if ok else "FAIL"
            suffix = f"  [{witness}]" if (witness and not ok) else ""
            out.append(f"{tag}  {name}{suffix}")
        return out

    def to_json(self) -> dict:
        return {
            "title": self.title,
            "status": "pass" if self.ok else "fail",
            "witness": self.first_witness(),
            "checks": [{"name": n, "status": "pass" if ok else "fail",
                        "witness": w} for n, ok, w in self.checks],
        }

    def __str__(self) -> str:
        return "\n".join([self.title] + self.lines())


def _entry_zero(x) -> bool:
    if isinstance(x, (int, Fraction)):
        return x == 0
    return x.is_zero()


def _truncated(x, k: int | None):
    if k is None or not isinstance(x, Series):
        return x
    return Series(x.vars, x.order, {e: c for e, c in x.terms.items() if sum(e) <= k})


def _diff_witness(A: Mat, B: Mat, k: int | None = None) -> str | None:
    """First nonzero coefficient of A - B, truncated to total degree k."""
    for i in range(A.nrows):
        for j in range(A.ncols):
            x = _truncated(A[i, j] - B[i, j], k)
            if _entry_zero(x):
                continue
            if isinstance(x, Series):
                e, c = x.sorted_terms()[0]
                return f"entry ({i},{j}), deformation exponent {list(e)}: {c}"
            return f"entry ({i},{j}): {x}"
    return None


# ---------------------------------------------------------------------------
# Checkers
# ---------------------------------------------------------------------------


def check_pre_saito(F: PreSaitoFamily, order: int | None = None) -> Report:
    """Verify the flatness relations, to total degree ``order`` when truncated.

    A derivative in a series direction is only known one order below the
    truncation, so relations involving one are compared at order-1.
    """
    rep = Report("pre-Saito relations")
    if F.svars:
        K = F.order if order is None else order
        if K > F.order:
            raise ValueError(
                f"requested order {K} exceeds the family's truncation {F.order}")
    else:
        K = None

    def drop(*names: str) -> int | None:
        if K is None:
            return None
        if any(F.kind_of(n) == "series" for n in names):
            return K - 1
        return K

    const_w = None
    if not F.matrix_is_constant(F.Binf):
        const_w = "Binf has non-constant entries"
    rep.record("Binf constant", const_w is None, const_w or "")

    names = [v.name for v in F.base]
    for a in range(len(names)):
        for b in range(a + 1, len(names)):
            i, j = names[a], names[b]
            lhs = F.dmat(F.C[i], j)
            rhs = F.dmat(F.C[j], i)
            w = _diff_witness(lhs, rhs, drop(i, j))
            rep.record(f"d_{j} C({i}) = d_{i} C({j})", w is None, w or "")
            w = _diff_witness(F.C[i] @ F.C[j], F.C[j] @ F.C[i], drop())
            rep.record(f"[C({i}), C({j})] = 0", w is None, w or "")
    for i in names:
        w = _diff_witness(F.B0 @ F.C[i], F.C[i] @ F.B0, drop())
        rep.record(f"[B0, C({i})] = 0", w is None, w or "")
        lhs = F.C[i] + F.dmat(F.B0, i)
        rhs = F.Binf @ F.C[i] - F.C[i] @ F.Binf
        w = _diff_witness(lhs, rhs, drop(i))
        rep.record(f"C({i}) + d_{i} B0 = [Binf, C({i})]", w is None, w or "")
    return rep


def _adjoint(F: PreSaitoFamily, M: Mat, Ginv_frac: Mat) -> Mat:
    """G^{-1} M^T G for the family's constant metric."""
    Gl = F.lift_fraction_matrix(F.constant_fraction_matrix(F.G))
    Ginv = F.lift_fraction_matrix(Ginv_frac)
    return Ginv @ M.transpose() @ Gl


def check_metric(F: PreSaitoFamily, order: int | None = None) -> Report:
    """Verify the metric axioms: constancy, symmetry, adjointness, weight."""
    rep = Report("metric relations")
    if F.G is None:
        raise ValueError("family carries no metric")
    K = (F.order if order is None else order) if F.svars else None

    ok_const = F.matrix_is_constant(F.G)
    rep.record("G constant", ok_const, "" if ok_const else "non-constant entry")
    if not ok_const:
        return rep
    G0 = F.constant_fraction_matrix(F.G)
    ok_sym = G0 == G0.transpose()
    rep.record("G symmetric", ok_sym, "" if ok_sym else "G != G^T")
    try:
        Ginv = inv_field(G0)
        rep.record("G invertible", True)
    except ZeroDivisionError:
        rep.record("G invertible", False, "singular metric")
        return rep

    wI = Mat.identity(F.d, F.ring()).scale(F.const(F.w))
    lhs = F.Binf + _adjoint(F, F.Binf, Ginv)
    w = _diff_witness(lhs, wI, K)
    rep.record("Binf + Binf* = w id", w is None, w or "")

    w = _diff_witness(_adjoint(F, F.B0, Ginv), F.B0, K)
    rep.record("B0* = B0", w is None, w or "")
    for name in (v.name for v in F.base):
        w = _diff_witness(_adjoint(F, F.C[name], Ginv), F.C[name], K)
        rep.record(f"C({name})* = C({name})", w is None, w or "")
    return rep


# ---------------------------------------------------------------------------
# Point structures
# ---------------------------------------------------------------------------


class PointStructure:
    """A pre-Saito structure on a point: (R_inf, R_0), optional metric and omega.

    Entries are Laurent polynomials in ``params`` (possibly none).  ``family``
    optionally carries an induced one-parameter family (used by the wedge
    construction to transport the diagonal q-line).
    """

    __slots__ = ("d", "R0", "Rinf", "G", "w", "omega", "delta0", "params",
                 "family", "labels")

    def __init__(self, d: int, R0: Mat, Rinf: Mat, G: Mat | None = None,
                 w: Fraction | None = None, omega: tuple | None = None,
                 delta0: Fraction | None = None, params: tuple[str, ...] = (),
                 family: PreSaitoFamily | None = None,
                 labels: tuple | None = None):
        self.d = d
        self.R0 = R0
        self.Rinf = Rinf
        self.G = G
        self.w = as_fraction(w) if w is not None else None
        self.omega = tuple(omega) if omega is not None else None
        self.delta0 = delta0
        self.params = tuple(params)
        self.family = family
        self.labels = labels
        for name, M in (("R0", R0), ("Rinf", Rinf)):
            if M.shape != (d, d):
                raise ValueError(f"{name} must be {d}x{d}")

    def const(self, value: int | Fraction) -> Laurent:
        return Laurent.const(self.params, value)

    def as_family(self) -> PreSaitoFamily:
        """View as a family over the empty base (B_inf = -R_inf, B_0 = R_0)."""
        return PreSaitoFamily(
            base=(), d=self.d, Binf=-self.Rinf, B0=self.R0, C={},
            G=self.G, w=self.w, params=self.params)

    def rinf_integer_diagonal(self) -> list[int]:
        """The diagonal of R_inf as integers; raises when not of that shape."""
        for i in range(self.d):
            for j in range(self.d):
                if i != j and not _entry_zero(self.Rinf[i, j]):
                    raise ValueError("R_inf is not diagonal")
        out = []
        for i in range(self.d):
            v = self.Rinf[i, i]
            f = v.as_fraction() if isinstance(v, Laurent) else as_fraction(v)
            if f.denominator != 1:
                raise ValueError("R_inf has a non-integer eigenvalue; "
                                 "the exponential uniformization is unsupported")
            out.append(int(f))
        return out


# ---------------------------------------------------------------------------
# The trivial one-parameter deformation
# ---------------------------------------------------------------------------


def trivial_deformation(P: PointStructure, var: str = "lambda") -> PreSaitoFamily:
    """Spread a point structure over the lambda-line along its R_inf grading.

    With integer R_inf eigenvalues d_i, the deformed matrix is
    B_0(lambda)_{ij} = (R_0)_{ij} * lambda^(1 + d_i - d_j) and the Higgs
    matrix in the lambda coordinate is C = -B_0(lambda)/lambda.  At
    lambda = 1 the family restricts to the point structure.
    """
    dvals = P.rinf_integer_diagonal()
    if var in P.params:
        raise ValueError(f"variable name {var} collides with a parameter")
    qvars = P.params + (var,)
    lam = Laurent.gen(qvars, var)

    def spread(i: int, j: int) -> Laurent:
        x = P.R0[i, j]
        if _entry_zero(x):
            return Laurent.zero(qvars)
        return x.promote(qvars) * lam ** (1 + dvals[i] - dvals[j])

    B0 = Mat([[spread(i, j) for j in range(P.d)] for i in range(P.d)])
    C = (-B0).scale(lam ** -1)
    Binf = (-P.Rinf).map(lambda x: x.promote(qvars))
    G = P.G.map(lambda x: x.promote(qvars)) if P.G is not None else None
    return PreSaitoFamily(
        base=((var, "laurent"),), d=P.d, Binf=Binf, B0=B0, C={var: C},
        G=G, w=P.w, params=P.params)


# ---------------------------------------------------------------------------
# Tensor product of families
# ---------------------------------------------------------------------------


def _promote_entries(F: PreSaitoFamily, qvars: tuple[str, ...],
                     svars: tuple[str, ...], order: int | None):
    def up(x):
        if isinstance(x, Series):
            y = x.map_coeffs(lambda c: c.promote(qvars))
            return y.promote(svars, order)
        y = x.promote(qvars)
        if svars:
            return Series.const(svars, order, y)
        return y
    return up


def tensor(F1: PreSaitoFamily, F2: PreSaitoFamily) -> PreSaitoFamily:
    """External tensor product on the disjoint union of the two bases.

    B_inf and B_0 become Kronecker sums, the Higgs matrices act in their own
    factor, the metrics multiply and the weights add.
    """
    names1 = {v.name for v in F1.base} | set(F1.params)
    names2 = {v.name for v in F2.base} | set(F2.params)
    if names1 & names2:
        raise ValueError(f"bases must be disjoint; shared: {names1 & names2}")
    if F1.svars and F2.svars and F1.order != F2.order:
        raise ValueError("mismatched truncation orders")
    order = F1.order if F1.order is not None else F2.order
    qvars = F1.qvars + F2.qvars
    svars = F1.svars + F2.svars
    up1 = _promote_entries(F1, qvars, svars, order)
    up2 = _promote_entries(F2, qvars, svars, order)
    ring = _ring_for(qvars, svars, order)
    id1 = Mat.identity(F1.d, ring)
    id2 = Mat.identity(F2.d, ring)
    C = {}
    for v in F1.base:
        C[v.name] = kron(F1.C[v.name].map(up1), id2)
    for v in F2.base:
        C[v.name] = kron(id1, F2.C[v.name].map(up2))
    return PreSaitoFamily(
        F1.base + F2.base, F1.d * F2.d,
        kron_sum(F1.Binf.map(up1), F2.Binf.map(up2), ring),
        kron_sum(F1.B0.map(up1), F2.B0.map(up2), ring),
        C,
        (kron(F1.G.map(up1), F2.G.map(up2))
         if F1.G is not None and F2.G is not None else None),
        (F1.w + F2.w if F1.w is not None and F2.w is not None else None),
        order, F1.params + F2.params)


def _ring_for(qvars: tuple[str, ...], svars: tuple[str, ...],
              order: int | None) -> Ring:
    if svars:
        return Ring(Series.zero(svars, order),
                    Series.const(svars, order, Laurent.const(qvars, 1)))
    return laurent_ring(qvars)


# ---------------------------------------------------------------------------
# Wedge (anti-invariant) restriction
# ---------------------------------------------------------------------------


def wedge_restrict(P: PointStructure, r: int,
                   family: PreSaitoFamily | None = None) -> PointStructure:
    """The induced structure on the r-th wedge power of a point structure.

    The wedge basis is e_I = e_{i_1} ^ ... ^ e_{i_r} over strictly increasing
    index tuples I (no 1/r! normalization), on which the tensor-power
    operators sum_p 1 (x) .. R (x) .. 1 restrict; the metric picks up the
    alternation factor (-1)^(r(r-1)/2) in front of det[G(u_i, v_j)].

    When ``family`` is the one-parameter family inducing P along a q-line,
    the result carries ``.family``: the same construction applied to the
    family matrices, which is its restriction to the diagonal q-line.
    """
    if r > P.d:
        raise ValueError(f"wedge degree {r} exceeds the rank {P.d}")
    ring = laurent_ring(P.params)
    basis = wedge_indices(P.d, r)
    R0w = wedge_of_sum(P.R0, r, ring)
    Rinfw = wedge_of_sum(P.Rinf, r, ring)
    Gw = wedge_metric(P.G, r, ring) if P.G is not None else None
    ww = P.w * r if P.w is not None else None
    omega = tuple(ring.one if I == tuple(range(r)) else ring.zero for I in basis)
    delta0 = None
    if P.delta0 is not None:
        unit_pos = basis.index(tuple(range(r)))
        ev = Rinfw[unit_pos, unit_pos]
        delta0 = ev.as_fraction() if isinstance(ev, Laurent) else as_fraction(ev)

    wedge_family = None
    if family is not None:
        if family.d != P.d:
            raise ValueError("family rank does not match the point structure")
        if family.svars:
            raise ValueError("diagonal wedge restriction expects a Laurent family")
        fring = laurent_ring(family.qvars)
        wedge_family = PreSaitoFamily(
            base=family.base, d=len(basis),
            Binf=wedge_of_sum(family.Binf, r, fring),
            B0=wedge_of_sum(family.B0, r, fring),
            C={name: wedge_of_sum(M, r, fring) for name, M in family.C.items()},
            G=(wedge_metric(family.G, r, fring) if family.G is not None else None),
            w=(family.w * r if family.w is not None else None),
            params=family.params)
    return PointStructure(len(basis), R0w, Rinfw, Gw, ww, omega, delta0,
                          P.params, wedge_family, labels=tuple(basis))


# ---------------------------------------------------------------------------
# Frobenius data from a primitive section
# ---------------------------------------------------------------------------


class FrobeniusData:
    """Flat-frame product data extracted from a family and a primitive omega."""

    __slots__ = ("names", "phi", "products", "unit", "euler", "gmat", "ring_desc")

    def __init__(self, names, phi, products, unit, euler, gmat, ring_desc):
        self.names = names
        self.phi = phi
        self.products = products
        self.unit = unit
        self.euler = euler
        self.gmat = gmat
        self.ring_desc = ring_desc

    def product_matrix(self, name: str) -> Mat:
        return self.products[name]

    def c_upper(self, i: str, j: str, k: str):
        """Structure constant c_{ij}^k with indices given by variable names."""
        jj, kk = self.names.index(j), self.names.index(k)
        return self.products[i][kk, jj]

    def c_lower(self, i: str, j: str, k: str):
        """The g-lowered constant c_{ijk} = g(d_i * d_j, d_k)."""
        if self.gmat is None:
            raise ValueError("no metric available")
        jj, kk = self.names.index(j), self.names.index(k)
        return (self.gmat @ self.products[i])[kk, jj]


def _demote_qfrac_mat(M: Mat) -> Mat:
    def down_coeff(c):
        if isinstance(c, QFrac):
            v = c.try_laurent()
            return v if v is not None else c
        return c

    def down(x):
        if isinstance(x, Series):
            return x.map_coeffs(down_coeff)
        return down_coeff(x)
    return M.map(down)


def frobenius_data(F: PreSaitoFamily, omega: Sequence) -> FrobeniusData:
    """Extract products, unit and Euler field from a primitive flat section.

    The period map phi sends the coordinate field d_i to -C^(i)(omega); it
    must be square (one base direction per rank) and invertible, otherwise
    ``NotPrimitive`` is raised.  Products satisfy
    phi(d_i * d_j) = -C^(i) phi(d_j); the unit is phi^{-1}(omega) and the
    Euler field is phi^{-1}(B_0 omega).
    """
    names = [v.name for v in F.base]
    if len(names) != F.d:
        raise NotPrimitive(
            f"need {F.d} base directions for a rank-{F.d} family, have {len(names)}")
    ring = F.ring()
    omega_col = Mat.column([x if not isinstance(x, (int, Fraction)) else F.const(x)
                            for x in omega])
    phi = Mat.from_columns([((-F.C[n]) @ omega_col).column_vector() for n in names])
    if F.svars:
        try:
            phi_inv = inv_series(phi)
        except ZeroDivisionError:
            raise NotPrimitive("period map is singular at the origin") from None
    else:
        try:
            phi_inv = _demote_qfrac_mat(inv_field(lift_qfrac(phi)))
        except ZeroDivisionError:
            raise NotPrimitive("period map is singular") from None
    products = {}
    for n in names:
        Pn = phi_inv @ (-F.C[n]) @ phi
        products[n] = _demote_qfrac_mat(Pn)
    unit = _demote_qfrac_mat(phi_inv @ omega_col).column_vector()
    euler = _demote_qfrac_mat(phi_inv @ (F.B0 @ omega_col)).column_vector()
    gmat = None
    if F.G is not None:
        gmat = _demote_qfrac_mat(phi.transpose() @ F.G @ phi)
    return FrobeniusData(names, phi, products, unit, euler, gmat, ring)


# ---------------------------------------------------------------------------
# JSON serialization
# ---------------------------------------------------------------------------


def _encode_laurent(x: Laurent) -> list:
    out = []
    for e, c in x.sorted_terms():
        if len(x.vars) == 0:
            key = 0
        elif len(x.vars) == 1:
            key = e[0]
        else:
            key = list(e)
        out.append([key, fraction_to_str(c)])
    return out


def _decode_laurent(data: list, qvars: tuple[str, ...]) -> Laurent:
    terms: dict[Exponents, Fraction] = {}
    for key, cs in data:
        if isinstance(key, list):
            e = tuple(key)
        elif len(qvars) == 0:
            if key != 0:
                raise ValueError("nonzero q-power in a parameter-free entry")
            e = ()
        elif len(qvars) == 1:
            e = (key,)
        else:
            raise ValueError("multivariate entries need exponent lists")
        terms[e] = fraction_from_str(cs)
    return Laurent(qvars, terms)


def _encode_entry(x) -> object:
    if isinstance(x, Series):
        return [{"exps": list(e), "coef": _encode_laurent(c)}
                for e, c in x.sorted_terms()]
    return _encode_laurent(x)


def _decode_entry(data, qvars, svars, order):
    if svars:
        terms = {tuple(item["exps"]): _decode_laurent(item["coef"], qvars)
                 for item in data}
        return Series(svars, order, terms)
    return _decode_laurent(data, qvars)


def _encode_matrix(M: Mat) -> list:
    return [[_encode_entry(x) for x in row] for row in M.rows]


def _encode_fraction_matrix(M: Mat) -> list:
    return [[fraction_to_str(x) for x in row] for row in M.rows]


def family_to_json(F: PreSaitoFamily) -> dict:
    """Serialize to the interchange dict (deterministic, exact)."""
    doc = {
        "rank": F.d,
        "vars": [v.name for v in F.base],
        "kinds": [v.kind for v in F.base],
        "Binf": _encode_fraction_matrix(F.constant_fraction_matrix(F.Binf)),
        "B0": _encode_matrix(F.B0),
        "C": {v.name: _encode_matrix(F.C[v.name]) for v in F.base},
        "G": (_encode_fraction_matrix(F.constant_fraction_matrix(F.G))
              if F.G is not None else None),
        "w": fraction_to_str(F.w) if F.w is not None else None,
    }
    if F.order is not None:
        doc["order"] = F.order
    if F.params:
        doc["params"] = list(F.params)
    return doc


def family_from_json(doc: dict) -> PreSaitoFamily:
    names = list(doc["vars"])
    kinds = list(doc.get("kinds") or ["q"] * len(names))
    base = tuple(BaseVar(n, k) for n, k in zip(names, kinds))
    params = tuple(doc.get("params", ()))
    order = doc.get("order")
    d = doc["rank"]
    qvars = params + tuple(n for n, k in zip(names, kinds) if k != "series")
    svars = tuple(n for n, k in zip(names, kinds) if k == "series")

    def dec_matrix(rows) -> Mat:
        return Mat([[_decode_entry(x, qvars, svars, order) for x in row]
                    for row in rows])

    def dec_fraction_matrix(rows) -> Mat:
        out = []
        for row in rows:
            out_row = []
            for x in row:
                c = Laurent.const(qvars, fraction_from_str(x))
                if svars:
                    out_row.append(Series.const(svars, order, c))
                else:
                    out_row.append(c)
            out.append(out_row)
        return Mat(out)

    return PreSaitoFamily(
        base=base, d=d,
        Binf=dec_fraction_matrix(doc["Binf"]),
        B0=dec_matrix(doc["B0"]),
        C={n: dec_matrix(doc["C"][n]) for n in names},
        G=(dec_fraction_matrix(doc["G"]) if doc.get("G") is not None else None),
        w=(fraction_from_str(doc["w"]) if doc.get("w") is not None else None),
        order=order, params=params)


def dumps_family(F: PreSaitoFamily) -> str:
    return json.dumps(family_to_json(F), sort_keys=True, indent=2) + "\n"


def loads_family(text: str) -> PreSaitoFamily:
    return family_from_json(json.loads(text))
