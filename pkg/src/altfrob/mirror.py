"""Gauss-Manin side: torus mirrors, Jacobian algebras, and wedge spectra.

The mirror of projective n-space is f = u_1 + ... + u_n + q/(u_1...u_n) on
the n-torus over Q[q].  Its Jacobian algebra is computed exactly by linear
algebra in a growing exponent box, multiplication by f in a dressed monomial
basis reproduces the small quantum connection matrix, and exterior powers of
the resulting lattice are compared against the wedge of the quantum side
through characteristic polynomials.  A separate Newton-identity route
computes subset-sum characteristic polynomials straight from eigenvalue
symmetric functions, so the wedge spectra are checked twice.
"""

from __future__ import annotations

import math
from fractions import Fraction
from functools import lru_cache
from itertools import combinations, product
from typing import NamedTuple, Sequence

from .linalg import (RATIONAL_RING, Mat, charpoly, det, kron_sum,
                     laurent_ring, rank_field, wedge_indices, wedge_of_sum)
from .presaito import Report, wedge_restrict
from .projective import build_pn, pn_small_family
from .rings import Laurent, QFrac, fraction_from_str, fraction_to_str

QVARS = ("q",)


def _as_qlaurent(value) -> Laurent:
    if isinstance(value, Laurent):
        if value.vars != QVARS:
            raise ValueError(f"coefficients must live over {QVARS}")
        return value
    return Laurent.const(QVARS, value)


# ---------------------------------------------------------------------------
# Laurent polynomials on the torus
# ---------------------------------------------------------------------------


class LaurentPoly:
    """A Laurent polynomial in u_1..u_n with coefficients in Q[q]."""

    __slots__ = ("n", "terms")

    def __init__(self, n: int, terms: dict):
        self.n = n
        clean = {}
        for exps, coef in terms.items():
            exps = tuple(int(e) for e in exps)
            if len(exps) != n:
                raise ValueError(f"exponent {exps} has length != {n}")
            coef = _as_qlaurent(coef)
            if not coef.is_zero():
                clean[exps] = coef
        self.terms = clean

    @classmethod
    def zero(cls, n: int) -> "LaurentPoly":
        return cls(n, {})

    @classmethod
    def monomial(cls, n: int, exps: Sequence[int], coef=1) -> "LaurentPoly":
        return cls(n, {tuple(exps): coef})

    def is_zero(self) -> bool:
        return not self.terms

    def support(self) -> list[tuple[int, ...]]:
        return sorted(self.terms)

    def __add__(self, other: "LaurentPoly") -> "LaurentPoly":
        if self.n != other.n:
            raise ValueError("mixed variable counts")
        terms = dict(self.terms)
        for e, c in other.terms.items():
            terms[e] = terms.get(e, Laurent.zero(QVARS)) + c
        return LaurentPoly(self.n, terms)

    def __neg__(self) -> "LaurentPoly":
        return LaurentPoly(self.n, {e: -c for e, c in self.terms.items()})

    def __sub__(self, other: "LaurentPoly") -> "LaurentPoly":
        return self + (-other)

    def __mul__(self, other: "LaurentPoly") -> "LaurentPoly":
        if self.n != other.n:
            raise ValueError("mixed variable counts")
        terms = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                prod = c1 * c2
                terms[e] = terms.get(e, Laurent.zero(QVARS)) + prod
        return LaurentPoly(self.n, terms)

    def shift(self, m: Sequence[int]) -> "LaurentPoly":
        """Multiply by the monomial u^m."""
        return LaurentPoly(self.n, {
            tuple(a + b for a, b in zip(e, m)): c
            for e, c in self.terms.items()})

    def scale(self, coef) -> "LaurentPoly":
        coef = _as_qlaurent(coef)
        return LaurentPoly(self.n, {e: c * coef for e, c in self.terms.items()})

    def logderiv(self, i: int) -> "LaurentPoly":
        """u_i * d/du_i, the torus-invariant derivative."""
        return LaurentPoly(self.n, {e: c * e[i] for e, c in self.terms.items()
                                    if e[i] != 0})

    def __eq__(self, other):
        if not isinstance(other, LaurentPoly):
            return NotImplemented
        return self.n == other.n and self.terms == other.terms

    def __hash__(self):
        return hash((self.n, tuple(sorted(self.terms.items()))))

    def __str__(self):
        if not self.terms:
            return "0"
        parts = []
        for e, c in sorted(self.terms.items()):
            mono = "*".join(f"u{i + 1}^{x}" for i, x in enumerate(e) if x != 0)
            parts.append(f"({c})" + (f"*{mono}" if mono else ""))
        return " + ".join(parts)

    def to_json(self) -> dict:
        items = []
        for e, c in sorted(self.terms.items()):
            items.append({"exp": list(e),
                          "coef": [[p, fraction_to_str(v)]
                                   for (p,), v in c.sorted_terms()]})
        return {"n": self.n, "terms": items}

    @classmethod
    def from_json(cls, doc: dict) -> "LaurentPoly":
        terms = {}
        for item in doc["terms"]:
            coef = Laurent(QVARS, {(p,): fraction_from_str(v)
                                   for p, v in item["coef"]})
            terms[tuple(item["exp"])] = coef
        return cls(doc["n"], terms)


def mirror_f(n: int) -> LaurentPoly:
    """u_1 + ... + u_n + q/(u_1...u_n), the torus mirror of projective n-space."""
    if n < 1:
        raise ValueError("n must be at least 1")
    terms = {}
    for i in range(n):
        e = [0] * n
        e[i] = 1
        terms[tuple(e)] = 1
    terms[(-1,) * n] = Laurent.gen(QVARS, "q")
    return LaurentPoly(n, terms)


def torus_relations(f: LaurentPoly) -> list[LaurentPoly]:
    """The generators u_i df/du_i (times u_i) of the Jacobian ideal."""
    return [f.logderiv(i) for i in range(f.n)]


# ---------------------------------------------------------------------------
# Convenience of the Newton polytope
# ---------------------------------------------------------------------------


def _kernel_vector(rows: list[tuple[Fraction, ...]], n: int):
    """One kernel generator of an (n-1)-row system, or None if rank < n-1."""
    mat = [list(r) for r in rows]
    pivots: list[int] = []
    rr = 0
    for col in range(n):
        piv = next((i for i in range(rr, len(mat)) if mat[i][col] != 0), None)
        if piv is None:
            continue
        mat[rr], mat[piv] = mat[piv], mat[rr]
        pv = mat[rr][col]
        mat[rr] = [x / pv for x in mat[rr]]
        for i in range(len(mat)):
            if i != rr and mat[i][col] != 0:
                fac = mat[i][col]
                mat[i] = [a - fac * b for a, b in zip(mat[i], mat[rr])]
        pivots.append(col)
        rr += 1
    if rr != n - 1:
        return None
    free = next(c for c in range(n) if c not in pivots)
    vec = [Fraction(0)] * n
    vec[free] = Fraction(1)
    for row, col in enumerate(pivots):
        vec[col] = -mat[row][free]
    return tuple(vec)


def convenience_witness(f: LaurentPoly) -> str | None:
    """None when 0 is interior to the Newton polytope, else a witness message.

    The test is exact and complete: the positive hull of the support is all
    of R^n iff the support has full rank and no hyperplane spanned by n-1
    support points has the whole support on one closed side.  Any violated
    hyperplane is an extreme ray certificate.
    """
    n = f.n
    S = [s for s in f.terms if any(s)]
    if not S:
        return "empty support"
    rank = rank_field(Mat([[Fraction(x) for x in s] for s in S]))
    if rank < n:
        return f"support spans rank {rank} < {n}"
    for sub in combinations(S, n - 1):
        c = _kernel_vector([tuple(Fraction(x) for x in s) for s in sub], n)
        if c is None:
            continue
        dots = [sum(ci * si for ci, si in zip(c, s)) for s in S]
        for normal in (c, tuple(-x for x in c)):
            if all(d <= 0 for d in dots):
                pretty = "(" + ",".join(fraction_to_str(x) for x in normal) + ")"
                return f"support on one side of the hyperplane with normal {pretty}"
            dots = [-d for d in dots]
    return None


def is_convenient(f: LaurentPoly) -> bool:
    return convenience_witness(f) is None


def kouchnirenko_bound(f: LaurentPoly) -> int:
    """n! times the Newton volume, for supports that are full simplices."""
    S = [s for s in f.terms]
    n = f.n
    if len(S) != n + 1:
        raise ValueError("the volume shortcut needs a simplex support "
                         f"(n+1 points), got {len(S)}")
    base = S[0]
    M = Mat([[Fraction(s[j] - base[j]) for j in range(n)] for s in S[1:]])
    vol = det(M, RATIONAL_RING)
    if vol == 0:
        raise ValueError("degenerate simplex support")
    return abs(int(vol))


# ---------------------------------------------------------------------------
# Jacobian algebra in an exponent box
# ---------------------------------------------------------------------------


def _flag_monomials(n: int) -> list[tuple[int, ...]]:
    flags = [(0,) * n]
    for k in range(1, n + 1):
        flags.append((0,) * (k - 1) + (-1,) * (n - k + 1))
    return flags


class _Echelon(NamedTuple):
    dim: int
    free: list[tuple[int, ...]]
    rewrites: dict
    reach: int


def _box_echelon(rels: Sequence[LaurentPoly], n: int, B: int) -> _Echelon:
    """Row-reduce all relation shifts supported in the padded box [-B-1,B+1]^n.

    Columns are ranked most-preferred first: flag monomials, then the rest
    of the inner box [-B,B]^n by graded lex, then the padding shell.  Each
    row pivots on its least preferred column, so the surviving free columns
    of the inner box form the greedy monomial basis and the quotient
    dimension is read off from the inner box alone.  The one-shell padding
    is what lets relation chains leave the inner box and come back.
    """
    R = B + 1

    def grading(e):
        return (sum(map(abs, e)), e)

    flags = _flag_monomials(n)
    flagset = set(flags)
    inner = list(product(range(-B, B + 1), repeat=n))
    shell = [m for m in product(range(-R, R + 1), repeat=n)
             if max(map(abs, m)) > B]
    order = flags + sorted((m for m in inner if m not in flagset),
                           key=grading) + sorted(shell, key=grading)
    rank = {m: i for i, m in enumerate(order)}
    n_inner = len(inner)

    qzero = QFrac.const(QVARS, 0)
    rewrites: dict = {}
    uses: dict = {}

    def insert(row: dict) -> None:
        acc: dict = {}
        for col, val in row.items():
            if col in rewrites:
                for c2, v2 in rewrites[col].items():
                    acc[c2] = acc.get(c2, qzero) + val * v2
            else:
                acc[col] = acc.get(col, qzero) + val
        acc = {c: v for c, v in acc.items() if not v.is_zero()}
        if not acc:
            return
        piv = max(acc, key=rank.__getitem__)
        pval = acc.pop(piv)
        rw = {c: -(v / pval) for c, v in acc.items()}
        for user in list(uses.get(piv, ())):
            other = rewrites[user]
            coef = other.pop(piv)
            uses[piv].discard(user)
            for c, v in rw.items():
                new = other.get(c, qzero) + coef * v
                if new.is_zero():
                    if c in other:
                        del other[c]
                        uses[c].discard(user)
                else:
                    if c not in other:
                        uses.setdefault(c, set()).add(user)
                    other[c] = new
        rewrites[piv] = rw
        for c in rw:
            uses.setdefault(c, set()).add(piv)

    for rel in rels:
        supp = list(rel.terms)
        mins = [min(s[j] for s in supp) for j in range(n)]
        maxs = [max(s[j] for s in supp) for j in range(n)]
        ranges = [range(-R - mins[j], R - maxs[j] + 1) for j in range(n)]
        for m in product(*ranges):
            insert({tuple(a + b for a, b in zip(s, m)):
                    QFrac.from_laurent(c) for s, c in rel.terms.items()})

    free = [m for m in order[:n_inner] if m not in rewrites]
    return _Echelon(len(free), free, rewrites, R)


class JacobianAlgebra:
    """The quotient of the torus Laurent ring by a Jacobian ideal, in a box.

    ``basis`` lists the surviving monomial exponents, most preferred first;
    ``dressing[k]`` is the q-power attached to basis monomial k so that the
    dressed classes match the quantum normalization (0 on the unit, 1 on
    everything else).
    """

    __slots__ = ("f", "n", "dim", "basis", "dressing", "box", "_ech")

    def __init__(self, f: LaurentPoly, dim: int, basis, box: int,
                 ech: _Echelon):
        self.f = f
        self.n = f.n
        self.dim = dim
        self.basis = tuple(basis)
        self.dressing = tuple(0 if not any(m) else 1 for m in self.basis)
        self.box = box
        self._ech = ech

    def labels(self) -> tuple[str, ...]:
        out = []
        for m, a in zip(self.basis, self.dressing):
            if not any(m) and a == 0:
                out.append("1")
            else:
                head = "q*" if a == 1 else (f"q^{a}*" if a else "")
                out.append(head + "u^(" + ",".join(map(str, m)) + ")")
        return tuple(out)

    def _ensure_reach(self, norm: int) -> None:
        if norm <= self._ech.reach:
            return
        ech = _box_echelon(torus_relations(self.f), self.n, norm)
        if ech.dim != self.dim or ech.free != list(self.basis):
            raise ValueError("the quotient changed when the box grew; "
                             "the stabilized dimension was spurious")
        self._ech = ech

    def reduce_monomial(self, exps: Sequence[int]) -> dict:
        """Coordinates of the class of u^exps on the free monomials."""
        exps = tuple(exps)
        self._ensure_reach(max(map(abs, exps)) if exps else 0)
        rw = self._ech.rewrites.get(exps)
        if rw is None:
            return {exps: QFrac.const(QVARS, 1)}
        return dict(rw)

    def reduce_poly(self, g: LaurentPoly) -> dict:
        vec: dict = {}
        qzero = QFrac.const(QVARS, 0)
        for exps, coef in g.terms.items():
            lifted = QFrac.from_laurent(coef)
            for b, v in self.reduce_monomial(exps).items():
                vec[b] = vec.get(b, qzero) + lifted * v
        return {b: v for b, v in vec.items() if not v.is_zero()}


def jacobian_algebra(f: LaurentPoly, box: int = 1, box_max: int = 8,
                     expected_dim: int | None = None) -> JacobianAlgebra:
    """The Jacobian quotient of f, computed exactly by box stabilization.

    The quotient dimension is evaluated in growing exponent boxes until
    three consecutive boxes agree; the support must be convenient (0 in the
    interior of the Newton polytope) for the quotient to be finite at all.
    When ``expected_dim`` is given (for example the Kouchnirenko volume
    bound), a mismatch with the stabilized dimension raises.
    """
    witness = convenience_witness(f)
    if witness is not None:
        raise ValueError(f"f is not convenient: {witness}")
    rels = torus_relations(f)
    dims: list[int] = []
    last: _Echelon | None = None
    for B in range(box, box_max + 1):
        ech = _box_echelon(rels, f.n, B)
        dims.append(ech.dim)
        last = ech
        if len(dims) >= 3 and dims[-1] == dims[-2] == dims[-3]:
            if expected_dim is not None and ech.dim != expected_dim:
                raise ValueError(
                    f"stabilized dimension {ech.dim} does not match the "
                    f"expected value {expected_dim}")
            return JacobianAlgebra(f, ech.dim, ech.free, B, ech)
    raise ValueError(f"not tame in box [-{box_max},{box_max}]^{f.n}: "
                     f"dimensions {dims} did not stabilize")


def mult_f_matrix(J: JacobianAlgebra, g: LaurentPoly | None = None) -> Mat:
    """The matrix of multiplication by g (default: by f) on the dressed basis.

    Column j holds the coordinates of g * q^(a_j) u^(m_j); the dressing
    powers cancel the q-denominators of the raw monomial classes, so for
    the mirror of projective n-space the entries land in Q[q].
    """
    if g is None:
        g = J.f
    if g.n != J.n:
        raise ValueError("variable counts differ")
    cols = []
    index = {m: k for k, m in enumerate(J.basis)}
    for j, (mj, aj) in enumerate(zip(J.basis, J.dressing)):
        vec = J.reduce_poly(g.shift(mj))
        col = [Laurent.zero(QVARS)] * J.dim
        for b, v in vec.items():
            if b not in index:
                raise ValueError(f"the product leaves the basis at {b}; "
                                 "the box is too small for this multiplier")
            k = index[b]
            diff = aj - J.dressing[k]
            dressed = v if diff == 0 else \
                v * Laurent(QVARS, {(diff,): Fraction(1)})
            lau = dressed.try_laurent()
            if lau is None:
                raise ValueError(f"entry ({k},{j}) has a q denominator: "
                                 f"{dressed}")
            col[k] = lau
        cols.append(col)
    return Mat.from_columns(cols)


# ---------------------------------------------------------------------------
# Lattice points and their tensor / wedge calculus
# ---------------------------------------------------------------------------


class BrieskornPoint(NamedTuple):
    """A free Q[q]-lattice with its connection pair (R0, Rinf)."""

    rank: int
    R0: Mat
    Rinf: Mat
    labels: tuple[str, ...]


@lru_cache(maxsize=None)
def mirror_brieskorn(n: int, box_max: int = 8) -> BrieskornPoint:
    """The lattice of the mirror of projective n-space.

    R0 is multiplication by f on the dressed Jacobian basis; the residue at
    infinity is -diag(0..n) on the same basis, matching the cohomological
    grading of the flag classes.
    """
    f = mirror_f(n)
    J = jacobian_algebra(f, box_max=box_max, expected_dim=kouchnirenko_bound(f))
    R0 = mult_f_matrix(J)
    ring = laurent_ring(QVARS)
    Rinf = Mat.diag([Laurent.const(QVARS, -k) for k in range(n + 1)], ring)
    return BrieskornPoint(n + 1, R0, Rinf, J.labels())


def ts_tensor(A: BrieskornPoint, B: BrieskornPoint) -> BrieskornPoint:
    """External product of lattices: both connection matrices Kronecker-add."""
    ring = laurent_ring(QVARS)
    labels = tuple(f"{a}|{b}" for a in A.labels for b in B.labels)
    return BrieskornPoint(A.rank * B.rank,
                          kron_sum(A.R0, B.R0, ring),
                          kron_sum(A.Rinf, B.Rinf, ring),
                          labels)


def gm_wedge(B: BrieskornPoint, r: int) -> BrieskornPoint:
    """The r-th wedge power, with both matrices acting as derivations."""
    if not 0 < r <= B.rank:
        raise ValueError(f"wedge degree {r} out of range for rank {B.rank}")
    ring = laurent_ring(QVARS)
    labels = tuple("^".join(B.labels[i] for i in I)
                   for I in wedge_indices(B.rank, r))
    return BrieskornPoint(math.comb(B.rank, r),
                          wedge_of_sum(B.R0, r, ring),
                          wedge_of_sum(B.Rinf, r, ring),
                          labels)


# ---------------------------------------------------------------------------
# Subset-sum characteristic polynomials by Newton identities
# ---------------------------------------------------------------------------


def _bimul(a: dict, b: dict, zmax: int, tmax: int) -> dict:
    out: dict = {}
    for (za, ta), ca in a.items():
        for (zb, tb), cb in b.items():
            z, t = za + zb, ta + tb
            if z > zmax or t > tmax:
                continue
            prod = ca * cb
            key = (z, t)
            out[key] = out.get(key, Laurent.zero(QVARS)) + prod
    return {k: v for k, v in out.items() if not v.is_zero()}


def subset_sum_charpoly(p: Sequence, r: int) -> list[Laurent]:
    """Characteristic polynomial of the r-subset-sum spectrum of p's roots.

    Given the monic charpoly coefficients [1, c_1, ..., c_N] of some matrix,
    returns the same encoding for the operator whose eigenvalues are sums
    over r-element subsets of the original eigenvalues, without ever
    constructing a matrix: Newton's identities produce power sums, a
    bivariate exponential generating function extracts the subset-sum power
    sums, and Newton's identities run backwards.
    """
    coeffs = [_as_qlaurent(c) for c in p]
    N = len(coeffs) - 1
    if not 0 <= r <= N:
        raise ValueError(f"subset size {r} out of range for degree {N}")
    M = math.comb(N, r)
    one = Laurent.const(QVARS, 1)
    zero = Laurent.zero(QVARS)

    # elementary symmetric functions of the roots: c_k = (-1)^k e_k
    e = [coeffs[k] * ((-1) ** k) for k in range(N + 1)]
    # power sums P as far as we need them
    P = [Laurent.const(QVARS, N)]
    for k in range(1, M + 1):
        acc = zero
        for i in range(1, k):
            if i <= N:
                acc = acc + e[i] * P[k - i] * ((-1) ** (i - 1))
        if k <= N:
            acc = acc + e[k] * (((-1) ** (k - 1)) * k)
        P.append(acc)

    # F(z, t) = sum_m (-1)^(m+1) z^m/m * sum_k P(k) m^k t^k / k!
    F: dict = {}
    for m in range(1, r + 1):
        sign = Fraction((-1) ** (m + 1), m)
        for k in range(M + 1):
            val = P[k] * (sign * m ** k / math.factorial(k))
            if not val.is_zero():
                F[(m, k)] = F.get((m, k), zero) + val

    # exp(F) truncated to z-degree r, t-degree M
    total = {(0, 0): one}
    power = {(0, 0): one}
    for j in range(1, r + 1):
        power = _bimul(power, F, r, M)
        inv = Fraction(1, math.factorial(j))
        for key, val in power.items():
            total[key] = total.get(key, zero) + val * inv

    Q = [total.get((r, k), zero) * math.factorial(k) for k in range(M + 1)]

    # Newton back-substitution for the subset-sum spectrum
    enew = [one]
    for k in range(1, M + 1):
        acc = zero
        for i in range(1, k + 1):
            acc = acc + enew[k - i] * Q[i] * ((-1) ** (i - 1))
        enew.append(acc * Fraction(1, k))

    return [enew[k] * ((-1) ** k) for k in range(M + 1)]


# ---------------------------------------------------------------------------
# Quantum vs Gauss-Manin comparison
# ---------------------------------------------------------------------------


def compare_quantum_gm(r: int, n: int, box_max: int = 8) -> Report:
    """Wedge of the mirror lattice against the wedge of the quantum family.

    Records whether the characteristic polynomials of the two induced
    multiplication operators agree over Q[q], whether the subset-sum route
    reproduces the same polynomial, and whether the integer spectra of the
    residues at infinity match.
    """
    if not 0 < r <= n:
        raise ValueError("need 0 < r <= n")
    rep = Report(f"quantum vs Gauss-Manin, wedge {r} of the n={n} mirror")
    ring = laurent_ring(QVARS)

    mirror = mirror_brieskorn(n, box_max=box_max)
    Wm = gm_wedge(mirror, r)
    quantum = wedge_restrict(build_pn(n), r, family=pn_small_family(n))

    rep.record("wedge ranks agree", Wm.rank == quantum.d,
               witness=f"{Wm.rank} vs {quantum.d}")

    cp_mirror = charpoly(Wm.R0, ring)
    cp_quantum = charpoly(quantum.family.B0, ring)
    rep.record("multiplication charpolys agree over Q[q]",
               cp_mirror == cp_quantum,
               witness=" vs ".join(_poly_str(c)
                                   for c in (cp_mirror, cp_quantum)))

    cp_subset = subset_sum_charpoly(charpoly(mirror.R0, ring), r)
    rep.record("subset-sum route reproduces the wedge charpoly",
               cp_subset == cp_mirror,
               witness=_poly_str(cp_subset))

    spec_m = sorted(Wm.Rinf[i, i].as_fraction() for i in range(Wm.rank))
    spec_q = sorted(quantum.Rinf[i, i].as_fraction()
                    for i in range(quantum.d))
    rep.record("integer spectra at infinity agree", spec_m == spec_q,
               witness=f"{spec_m} vs {spec_q}")
    return rep


def _poly_str(coeffs: Sequence[Laurent]) -> str:
    d = len(coeffs) - 1
    parts = []
    for k, c in enumerate(coeffs):
        if c.is_zero():
            continue
        body = str(c)
        power = d - k
        if power == 0:
            parts.append(body)
        else:
            head = "" if body == "1" else f"({body})*"
            parts.append(f"{head}z^{power}" if power > 1 else f"{head}z")
    return " + ".join(parts) if parts else "0"
