"""Order-by-order extension of pre-Saito families by new deformation variables.

Given a family with a cyclic (pre-primitive) flat section omega and period
data Psi prescribing how omega moves in the new directions, the extension is
reconstructed one variable at a time, one order at a time, following the
Hertling-Manin correspondence: at each order the new Higgs matrix D' is the
unique operator that sends P(C, B_0) omega to P(C, B_0) D'(omega) for every
word P in the known matrices, and the next-order slices of the old matrices
are recovered by integrating

    dC'^(i)/dy = d_i D',        dB_0'/dy = [B_inf, D'] - D'.

The word basis is found once per variable by a greedy shortlex Krylov search
at the closed point (all deformation variables zero, generic q), which also
certifies the cyclicity of omega.  Internal commutation invariants are
asserted at every order; their failure means inconsistent input data.

The same machinery specializes to the universal big-quantum family of
projective space (tautological period data) and, with the potential and the
WDVV recursion, to rational Gromov-Witten numbers of the plane.
"""

from __future__ import annotations

import json
import math
from collections import deque
from fractions import Fraction
from typing import NamedTuple, Sequence

from .linalg import Mat, inv_series
from .presaito import BaseVar, PreSaitoFamily, _demote_qfrac_mat, frobenius_data
from .projective import pn_small_family
from .rings import (
    Laurent,
    QFrac,
    Series,
    as_fraction,
    fraction_from_str,
    fraction_to_str,
)


class NotPrePrimitive(Exception):
    """omega is not cyclic for the Higgs and residue matrices at the closed point."""


class InvariantViolation(Exception):
    """An internal commutation identity failed: the input data is inconsistent."""


class DeformationProblem(NamedTuple):
    """Extension data: initial family, new variables, period data, order.

    ``psi`` is the coordinate vector of the section Psi in the initial frame:
    a tuple of Series over all deformation variables (the initial family's
    series variables followed by ``new_vars``) truncated at ``order``, with
    Psi = 0 when all new variables vanish.  ``omega`` is the flat section
    being deformed, as a tuple of rationals.
    """

    initial: PreSaitoFamily
    new_vars: tuple[str, ...]
    psi: tuple[Series, ...]
    omega: tuple[Fraction, ...]
    order: int


def _validate_problem(p: DeformationProblem) -> tuple[str, ...]:
    svars_all = p.initial.svars + tuple(p.new_vars)
    if len(set(svars_all)) != len(svars_all):
        raise ValueError("new variable names collide")
    if len(p.psi) != p.initial.d:
        raise ValueError("psi must have one coordinate per rank")
    for s in p.psi:
        if s.vars != svars_all or s.order != p.order:
            raise ValueError("psi coordinates must live in the full "
                             "deformation ring at the requested order")
        for e in s.terms:
            if all(e[s.vars.index(v)] == 0 for v in p.new_vars):
                raise ValueError("psi must vanish when the new variables do")
    if len(p.omega) != p.initial.d:
        raise ValueError("omega must have one coordinate per rank")
    return svars_all


# ---------------------------------------------------------------------------
# Word basis at the closed point
# ---------------------------------------------------------------------------


def _closed_point_matrix(M: Mat, qvars: tuple[str, ...]) -> Mat:
    def down(x):
        if isinstance(x, Series):
            c = x.constant_slice()
            x = c if c is not None else Laurent.zero(qvars)
        return QFrac.from_laurent(x)
    return M.map(down)


def _reduce_against(vec: list[QFrac], rows: list[tuple[int, list[QFrac]]]):
    v = list(vec)
    for piv, row in rows:
        c = v[piv]
        if not c.is_zero():
            v = [a - c * b for a, b in zip(v, row)]
    return v


def word_basis(generators: Sequence[Mat], omega: Sequence[QFrac],
               d: int) -> list[tuple[int, ...]]:
    """Greedy shortlex Krylov search for d independent words applied to omega.

    Words are tuples of generator indices, applied right-to-left; the empty
    word (omega itself) is examined first, then children of each accepted
    word in generator order.  Raises NotPrePrimitive when the span closes
    before reaching full rank.
    """
    rows: list[tuple[int, list[QFrac]]] = []
    words: list[tuple[int, ...]] = []
    queue: deque[tuple[tuple[int, ...], list[QFrac]]] = deque()
    queue.append(((), list(omega)))
    while queue and len(words) < d:
        w, vec = queue.popleft()
        res = _reduce_against(vec, rows)
        piv = next((i for i, a in enumerate(res) if not a.is_zero()), None)
        if piv is None:
            continue
        inv = res[piv].inverse()
        rows.append((piv, [a * inv for a in res]))
        words.append(w)
        for gi, M in enumerate(generators):
            child = [sum((M[i, j] * vec[j] for j in range(d)),
                         QFrac.const(M[0, 0].num.vars, 0)) for i in range(d)]
            queue.append(((gi,) + w, child))
    if len(words) < d:
        raise NotPrePrimitive(
            f"omega generates a proper invariant subspace of dimension {len(words)}")
    return words


def _apply_word(generators: Sequence[Mat], word: tuple[int, ...],
                vec: Mat) -> Mat:
    out = vec
    for gi in reversed(word):
        out = generators[gi] @ out
    return out


# ---------------------------------------------------------------------------
# The extension recursion
# ---------------------------------------------------------------------------


def _dscalar_by_kind(x: Series, var: BaseVar) -> Series:
    if var.kind == "series":
        return x.deriv(var.name)
    if var.kind == "q":
        return x.map_coeffs(lambda c: c.log_deriv(var.name))
    return x.map_coeffs(lambda c: c.deriv(var.name))


def _trunc_var(x: Series, name: str, k: int) -> Series:
    i = x.vars.index(name)
    return Series(x.vars, x.order, {e: c for e, c in x.terms.items() if e[i] <= k})


def _assert_commutes(D: Mat, M: Mat, name: str, yvar: str, k: int) -> None:
    comm = D @ M - M @ D
    for i in range(comm.nrows):
        for j in range(comm.ncols):
            if not _trunc_var(comm[i, j], yvar, k).is_zero():
                raise InvariantViolation(
                    f"[D', {name}] != 0 at order {k} of {yvar}, entry ({i},{j})")


def hm_extend(problem: DeformationProblem,
              reverse_generators: bool = False) -> PreSaitoFamily:
    """Extend the initial family by the new variables, one at a time.

    ``reverse_generators`` reverses the generator alphabet of the word-basis
    search; by the uniqueness of the correspondence the output family must
    not depend on it (exercised in tests).
    """
    F0 = problem.initial
    K = problem.order
    svars_all = _validate_problem(problem)
    qvars = F0.qvars
    d = F0.d

    def up(x) -> Series:
        if isinstance(x, Series):
            return x.promote(svars_all, K)
        return Series.const(svars_all, K, x)

    base: list[BaseVar] = list(F0.base)
    C: dict[str, Mat] = {v.name: F0.C[v.name].map(up) for v in base}
    B0 = F0.B0.map(up)
    Binf = F0.Binf.map(up)
    omega_col = Mat.column([Series.const(svars_all, K,
                                         Laurent.const(qvars, as_fraction(c)))
                            for c in problem.omega])
    omega_qf = [QFrac.const(qvars, as_fraction(c)) for c in problem.omega]

    for stage, yname in enumerate(problem.new_vars):
        later = problem.new_vars[stage + 1:]
        data = Mat.column([(-problem.psi[i].deriv(yname)).restrict_zero(later)
                           for i in range(d)])
        gens = [C[v.name] for v in base] + [B0]
        gen_names = [f"C({v.name})" for v in base] + ["B0"]
        if reverse_generators:
            gens, gen_names = gens[::-1], gen_names[::-1]
        gens_qf = [_closed_point_matrix(M, qvars) for M in gens]
        words = word_basis(gens_qf, omega_qf, d)

        D = None
        for k in range(K + 1):
            T = Mat.from_columns(
                [_apply_word(gens, w, omega_col).column_vector() for w in words])
            U = Mat.from_columns(
                [_apply_word(gens, w, data).column_vector() for w in words])
            D = _demote_qfrac_mat(U @ inv_series(T))
            for M, name in zip(gens, gen_names):
                _assert_commutes(D, M, name, yname, k)
            if k == K:
                break
            Dk = D.map(lambda s: s.coeff_of_var(yname, k))
            scale = Fraction(1, k + 1)
            for v in base:
                piece = Dk.map(lambda s, _v=v: _dscalar_by_kind(s, _v))
                C[v.name] = C[v.name] + piece.map(
                    lambda s: s.times_var(yname, k + 1)).scale(scale)
            bpiece = (Binf @ Dk - Dk @ Binf) - Dk
            B0 = B0 + bpiece.map(
                lambda s: s.times_var(yname, k + 1)).scale(scale)
            gens = [C[v.name] for v in base] + [B0]
            if reverse_generators:
                gens = gens[::-1]
        newvar = BaseVar(yname, "series")
        base.append(newvar)
        C[yname] = D

    G = F0.G.map(up) if F0.G is not None else None
    return PreSaitoFamily(tuple(base), d, Binf, B0, C, G, F0.w, K, F0.params)


# ---------------------------------------------------------------------------
# Closed-form problems
# ---------------------------------------------------------------------------


def trivial_deformation_problem(P, order: int, var: str = "y") -> DeformationProblem:
    """Period data whose extension is the trivial deformation in y = log(lambda).

    The section moves by the exponential of the grading:
    dPsi/dy = B_0 exp-rescaled, i.e. the coordinate at basis index i is
    (R_0 omega)_i * (e^{m y} - 1)/m with m = 1 + d_i - d_0 (y itself when
    m = 0), truncated at the requested order.
    """
    dvals = P.rinf_integer_diagonal()
    fam = P.as_family()
    svars = (var,)
    if P.omega is None:
        raise ValueError("point structure carries no distinguished section")
    omega = tuple(x.as_fraction() for x in P.omega)
    degs = {dvals[i] for i, c in enumerate(omega) if c != 0}
    if len(degs) != 1:
        raise ValueError("omega must be concentrated in one grading degree "
                         "for the closed-form period data")
    d0 = degs.pop()
    r0w = (P.R0 @ Mat.column(list(P.omega))).column_vector()
    psi = []
    for i in range(P.d):
        coord = r0w[i].as_fraction()
        m = 1 + dvals[i] - d0
        terms = {}
        if coord != 0:
            if m == 0:
                terms[(1,)] = Laurent.const(P.params, coord)
            else:
                for j in range(1, order + 1):
                    terms[(j,)] = Laurent.const(
                        P.params, coord * Fraction(m) ** (j - 1) / math.factorial(j))
        psi.append(Series(svars, order, terms))
    return DeformationProblem(fam, (var,), tuple(psi), omega, order)


def expand_trivial_in_log(P, order: int, var: str = "y") -> PreSaitoFamily:
    """The trivial deformation written in the coordinate y = log(lambda).

    Closed form: B_0(y)_{ij} = (R_0)_{ij} e^{(1 + d_i - d_j) y} truncated,
    C^(y) = -B_0(y).  Used as the exact target for the extension recursion.
    """
    dvals = P.rinf_integer_diagonal()
    svars = (var,)

    def exp_series(m: int) -> Series:
        terms = {(j,): Laurent.const(P.params, Fraction(m) ** j / math.factorial(j))
                 for j in range(order + 1)}
        return Series(svars, order, terms)

    def entry(i: int, j: int) -> Series:
        x = P.R0[i, j]
        if x.is_zero():
            return Series.zero(svars, order)
        return exp_series(1 + dvals[i] - dvals[j]).scale(x)

    B0 = Mat([[entry(i, j) for j in range(P.d)] for i in range(P.d)])
    C = -B0
    Binf = (-P.Rinf).map(lambda x: Series.const(svars, order, x))
    G = P.G.map(lambda x: Series.const(svars, order, x)) if P.G is not None else None
    return PreSaitoFamily(((var, "series"),), P.d, Binf, B0, {var: C},
                          G, P.w, order, P.params)


def universal_big_quantum(F: PreSaitoFamily, order: int) -> PreSaitoFamily:
    """The full big-quantum family over (t_0, q, t_2, ..., t_n).

    The input is the small q-line family of projective n-space; the period
    data is tautological (Psi = sum_{j != 1} t_j omega_j), and the output
    base is reordered so that the flat coordinates come in cohomological
    order with q sitting in the degree-2 slot.
    """
    if order < 2:
        raise ValueError("order must be at least 2")
    n = F.d - 1
    new_vars = tuple(f"t{j}" for j in range(n + 1) if j != 1)
    svars = F.svars + new_vars
    psi = []
    for i in range(F.d):
        if i == 1:
            psi.append(Series.zero(svars, order))
        else:
            psi.append(Series.gen(svars, order, f"t{i}",
                                  Laurent.const(F.qvars, 1)))
    omega = tuple(Fraction(1 if i == 0 else 0) for i in range(F.d))
    problem = DeformationProblem(F, new_vars, tuple(psi), omega, order)
    big = hm_extend(problem)
    flat_order = ["t0", "q"] + [f"t{j}" for j in range(2, n + 1)]
    return big.reorder_base(flat_order)


# ---------------------------------------------------------------------------
# Potential and Gromov-Witten numbers
# ---------------------------------------------------------------------------


def _qpow_split(x: Laurent) -> dict[int, Fraction]:
    if len(x.vars) != 1:
        raise ValueError("potential extraction expects a single quantum variable")
    return {e[0]: c for e, c in x.terms.items()}


def potential(F: PreSaitoFamily, omega: Sequence, order: int | None = None) -> Series:
    """The Frobenius potential: a series whose triple derivatives are c_{ijk}.

    Base directions are the flat coordinates; the q-direction derivative is
    q*d/dq, so a monomial q^d t^alpha is detected by q-derivatives as long
    as d != 0.  Purely classical monomials involving the never-materialized
    degree-2 coordinate cannot be represented; accordingly the result is
    normalized to have no q^0 terms of total degree <= 2, and the
    integrability verification skips exactly the q^0 sectors with a
    q-direction witness.
    """
    K = F.order if order is None else order
    if F.order is None or K > F.order:
        raise ValueError("potential extraction needs a truncated family "
                         "covering the requested order")
    fd = frobenius_data(F, list(omega))
    names = fd.names
    if fd.gmat is None:
        raise ValueError("potential extraction needs a metric")
    qdirs = [n for n in names if F.kind_of(n) != "series"]
    if len(qdirs) != 1:
        raise ValueError("exactly one quantum direction is supported")
    qdir = qdirs[0]
    tvars = F.svars

    # check total symmetry of c_{ijk} and of its first derivatives
    low: dict[tuple[str, str, str], Series] = {}
    for a in names:
        for b in names:
            for c in names:
                low[(a, b, c)] = fd.c_lower(a, b, c)
    for a in names:
        for b in names:
            for c in names:
                for perm in ((b, a, c), (a, c, b)):
                    if not (low[(a, b, c)] - low[perm]).is_zero():
                        raise InvariantViolation(
                            f"c_{{{a}{b}{c}}} is not symmetric")
    for a in names:
        for b in names:
            for c in names:
                for l_ in names:
                    lhs = _dscalar_by_kind(low[(a, b, c)], _basevar(F, l_))
                    rhs = _dscalar_by_kind(low[(l_, b, c)], _basevar(F, a))
                    # a derivative in a formal direction is exact only one
                    # order below the family truncation
                    m = K
                    if "series" in (F.kind_of(l_), F.kind_of(a)):
                        m -= 1
                    if not _truncate_total(lhs - rhs, m).is_zero():
                        raise InvariantViolation(
                            f"nabla c is not symmetric at ({a},{b},{c},{l_})")

    # collect candidate potential monomials (d, alpha) from all c-monomials
    candidates: set[tuple[int, tuple[int, ...]]] = set()
    tindex = {v: i for i, v in enumerate(tvars)}

    def bump(alpha: tuple[int, ...], name: str) -> tuple[int, ...]:
        if name == qdir:
            return alpha
        lst = list(alpha)
        lst[tindex[name]] += 1
        return tuple(lst)

    for (a, b, c), mat_c in low.items():
        for exps, coeff in mat_c.terms.items():
            for dpow in _qpow_split(coeff):
                alpha = tuple(exps)
                for nm in (a, b, c):
                    alpha = bump(alpha, nm)
                candidates.add((dpow, alpha))

    def witness(dpow: int, alpha: tuple[int, ...]) -> tuple[str, ...] | None:
        flat: list[str] = []
        for v, m in zip(tvars, alpha):
            flat.extend([v] * m)
        need = 3 - len(flat)
        if need > 0:
            if dpow == 0:
                return None  # classical low-degree sector: not representable
            flat = [qdir] * need + flat
        return tuple(flat[:3])

    def triple_factor(dpow: int, alpha: tuple[int, ...],
                      idx: tuple[str, ...]) -> Fraction:
        counts = list(alpha)
        factor = Fraction(1)
        for nm in idx:
            if nm == qdir:
                factor *= dpow
            else:
                i = tindex[nm]
                factor *= counts[i]
                counts[i] -= 1
        return factor

    phi_terms: dict[tuple[int, ...], Laurent] = {}
    phi_order = K + 3
    for dpow, alpha in sorted(candidates):
        if dpow == 0 and sum(alpha) <= 2:
            continue
        idx = witness(dpow, alpha)
        if idx is None:
            continue
        rem = list(alpha)
        for nm in idx:
            if nm != qdir:
                rem[tindex[nm]] -= 1
        cv = low[idx].coeff(tuple(rem))
        coeff = Fraction(0)
        if cv is not None:
            coeff = _qpow_split(cv).get(dpow, Fraction(0))
        value = coeff / triple_factor(dpow, alpha, idx)
        if value != 0:
            key = tuple(alpha)
            prev = phi_terms.get(key, Laurent.zero(F.qvars))
            phi_terms[key] = prev + Laurent(F.qvars, {(dpow,): value})
    phi = Series(tvars, phi_order, phi_terms)

    # verify all triple derivatives against the structure constants
    for (a, b, c), mat_c in low.items():
        dd = phi
        for nm in (a, b, c):
            dd = _dscalar_by_kind(dd, _basevar(F, nm))
        keys = set(mat_c.terms) | {e for e in dd.terms if sum(e) <= K}
        for exps in sorted(keys):
            cv = mat_c.coeff(exps)
            want = _qpow_split(cv) if cv is not None else {}
            gv = dd.coeff(exps)
            got = _qpow_split(gv) if gv is not None else {}
            for dpow in sorted(set(want) | set(got)):
                if dpow == 0 and qdir in (a, b, c):
                    continue  # classical sector through the q-direction
                if want.get(dpow, Fraction(0)) != got.get(dpow, Fraction(0)):
                    raise InvariantViolation(
                        f"d3 potential mismatch at c_{{{a}{b}{c}}}, "
                        f"q^{dpow} t^{list(exps)}")
    return phi


def _basevar(F: PreSaitoFamily, name: str) -> BaseVar:
    return next(v for v in F.base if v.name == name)


def _truncate_total(s: Series, k: int) -> Series:
    return Series(s.vars, s.order,
                  {e: c for e, c in s.terms.items() if sum(e) <= k})


def gw_pn2(dmax: int) -> list[int]:
    """Degree-d counts of rational plane curves through 3d-1 points, d <= dmax.

    Read off the potential of the big-quantum plane:
    N_d = (3d-1)! * [q^d t_2^(3d-1)] Phi.
    """
    if dmax < 1:
        raise ValueError("dmax must be at least 1")
    K = max(2, 3 * dmax - 1)
    F = universal_big_quantum(pn_small_family(2), K)
    phi = potential(F, (1, 0, 0))
    out = []
    t2 = F.svars.index("t2")
    for dd in range(1, dmax + 1):
        exps = tuple((3 * dd - 1) if i == t2 else 0 for i in range(len(F.svars)))
        if sum(exps) > phi.order:
            raise ValueError("truncation order too small for the requested degree")
        cv = phi.coeff(exps)
        split = _qpow_split(cv) if cv is not None else {}
        nd = split.get(dd, Fraction(0)) * math.factorial(3 * dd - 1)
        if nd.denominator != 1:
            raise InvariantViolation(f"non-integer curve count at degree {dd}")
        out.append(int(nd))
    return out


def wdvv_oracle(dmax: int) -> list[int]:
    """The classical associativity recursion for plane curve counts.

    N_1 = 1 and, for d >= 2,
    N_d = sum over d1 + d2 = d of N_{d1} N_{d2} d1^2 d2
          (d2 C(3d-4, 3d1-2) - d1 C(3d-4, 3d1-1)).
    """
    if dmax < 1:
        raise ValueError("dmax must be at least 1")
    N = {1: 1}
    for dd in range(2, dmax + 1):
        acc = 0
        for d1 in range(1, dd):
            d2 = dd - d1
            acc += (N[d1] * N[d2] * d1 * d1 * d2
                    * (d2 * math.comb(3 * dd - 4, 3 * d1 - 2)
                       - d1 * math.comb(3 * dd - 4, 3 * d1 - 1)))
        N[dd] = acc
    return [N[i] for i in range(1, dmax + 1)]


# ---------------------------------------------------------------------------
# Serialization
# ---------------------------------------------------------------------------


def potential_to_json(phi: Series) -> dict:
    monomials = []
    for exps, coeff in sorted(phi.terms.items()):
        for (dpow,), cval in sorted(coeff.terms.items()):
            monomials.append({"qpow": dpow, "exps": list(exps),
                              "coef": fraction_to_str(cval)})
    monomials.sort(key=lambda m: (m["qpow"], m["exps"]))
    return {"monomials": monomials}


def problem_to_json(p: DeformationProblem) -> dict:
    from .presaito import _encode_entry  # shared scalar encoding
    return {
        "newVars": list(p.new_vars),
        "order": p.order,
        "omega": [fraction_to_str(as_fraction(c)) for c in p.omega],
        "psi": [_encode_entry(s) for s in p.psi],
    }


def problem_from_json(initial: PreSaitoFamily, doc: dict) -> DeformationProblem:
    from .presaito import _decode_entry
    new_vars = tuple(doc["newVars"])
    order = doc["order"]
    svars_all = initial.svars + new_vars
    psi = tuple(_decode_entry(item, initial.qvars, svars_all, order)
                for item in doc["psi"])
    omega = tuple(fraction_from_str(x) for x in doc["omega"])
    return DeformationProblem(initial, new_vars, psi, omega, order)
