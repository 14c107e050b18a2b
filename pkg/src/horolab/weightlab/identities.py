"""A suite of exact matrix and module identities, all over the rationals.

Every item either passes with zero residue or reports the first offending
entry.  Nothing here uses floats, tolerances, or randomness; sample data is
small and deterministic.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction as Q
from typing import Optional, Tuple

from .. import exact
from ..exact import Mat
from .cartan import h_block, h_principal, h_last_row
from .groups import (
    a_x,
    corner_log_lower,
    lower_ones,
    sigma,
    sigma_kappa,
    u_elem,
    u_top,
    upper_ones,
)
from .modules import ModuleVector, WeightModule, act, build_module, vector


@dataclass
class IdentityItem:
    name: str
    description: str
    passed: bool
    detail: str = ""


@dataclass
class IdentitySuiteReport:
    n: int
    items: Tuple[IdentityItem, ...]

    @property
    def passed(self) -> bool:
        return all(item.passed for item in self.items)

    def summary(self) -> str:
        lines = [f"identity suite, n={self.n}"]
        for item in self.items:
            status = "ok" if item.passed else "FAIL"
            extra = f" ({item.detail})" if item.detail else ""
            lines.append(f"  [{status}] {item.name}{extra}")
        return "\n".join(lines)


def _mat_equal_detail(a: Mat, b: Mat) -> Optional[str]:
    for i, (ra, rb) in enumerate(zip(a, b)):
        for j, (x, y) in enumerate(zip(ra, rb)):
            if x != y:
                return f"entry ({i},{j}): {x} vs {y}"
    return None


def _exp_nilpotent(x: Mat) -> Mat:
    """exp of a nilpotent rational matrix by its finite series."""
    m = len(x)
    out = exact.identity(m)
    term = exact.identity(m)
    for k in range(1, m + 1):
        term = exact.scale(Q(1, k), exact.matmul(term, x))
        if exact.is_zero(term):
            break
        out = exact.add(out, term)
    return out


def _conj_principal_scaling(m: Mat, h: Q) -> Mat:
    """Conjugation by the principal scaling with ratio h.

    Entry (a, b) picks up the factor h^(a-b); exact for rational h != 0.
    """
    size = len(m)
    return tuple(
        tuple(m[a][b] * h ** (a - b) for b in range(size)) for a in range(size)
    )


def _ones_factorization(n: int) -> IdentityItem:
    lhs = u_top(tuple(Q(1) for _ in range(n)))
    rhs = exact.matmul(
        exact.matmul(sigma(n), exact.inverse(upper_ones(n))), lower_ones(n)
    )
    detail = _mat_equal_detail(lhs, rhs)
    return IdentityItem(
        name="ones_factorization",
        description="all-ones top unipotent equals corner rotation times "
        "inverse upper-ones times lower-ones",
        passed=detail is None,
        detail=detail or "",
    )


def _corner_reflection_conjugate(n: int) -> IdentityItem:
    s = sigma(n)
    hc = exact.diag(h_principal(n))
    hn = exact.diag(h_block(n, n))
    lhs = exact.sub(hn, hc)
    rhs = exact.scale(-1, exact.matmul(exact.matmul(s, hc), exact.inverse(s)))
    detail = _mat_equal_detail(lhs, rhs)
    return IdentityItem(
        name="corner_reflection_conjugate",
        description="full block element minus principal element equals minus "
        "the corner-rotated principal element",
        passed=detail is None,
        detail=detail or "",
    )


def _scaling_normalizes_tail(n: int) -> IdentityItem:
    failures = []
    for h in (Q(1, 2), Q(3, 7), Q(-2, 5)):
        for c_seed in (1, 2):
            c = tuple(Q((-1) ** (i + c_seed) * (i + c_seed), i + 2) for i in range(1, n + 1))
            tail = tuple(ci * h ** i for i, ci in enumerate(c, start=1))
            conj = _conj_principal_scaling(u_top(tail), h)
            detail = _mat_equal_detail(conj, u_top(c))
            if detail is not None:
                failures.append(f"h={h}: {detail}")
    # the exponent shift a - b is exactly the coordinate degree, which is
    # what makes the h powers cancel; record that the shift matches the
    # principal values too
    hp = h_principal(n)
    for i in range(1, n + 1):
        if hp[0] - hp[i] != i:
            failures.append(f"principal value at slot {i} is {hp[0] - hp[i]}, not {i}")
    return IdentityItem(
        name="scaling_normalizes_tail",
        description="conjugating the degree-weighted top unipotent by the "
        "principal scaling strips all scale factors",
        passed=not failures,
        detail="; ".join(failures),
    )


def _diagonal_rescaling(n: int) -> IdentityItem:
    failures = []
    samples = [
        tuple(Q(i + 1) for i in range(n)),
        tuple(Q((-1) ** i * (2 * i + 1), 2) for i in range(n)),
        tuple(Q(3, i + 2) for i in range(n)),
    ]
    for x in samples:
        d = a_x(x)
        d_inv = exact.inverse(d)
        lhs = exact.matmul(exact.matmul(d, u_top(tuple(Q(1) for _ in range(n)))), d_inv)
        detail = _mat_equal_detail(lhs, u_top(x))
        if detail is not None:
            failures.append(f"x={x}: {detail}")
        # elementary scaling factors under the same conjugation
        ext = (Q(1),) + tuple(d[i][i] for i in range(1, n + 1))
        for i in range(n + 1):
            for j in range(n + 1):
                if i == j:
                    continue
                got = exact.matmul(exact.matmul(d, exact.elementary(n + 1, i, j)), d_inv)
                want = exact.elementary(n + 1, i, j, ext[i] / ext[j])
                detail = _mat_equal_detail(got, want)
                if detail is not None:
                    failures.append(f"x={x}, E({i},{j}): {detail}")
    return IdentityItem(
        name="diagonal_rescaling",
        description="conjugation by diag(1, 1/x) turns the all-ones top row "
        "into x and scales each elementary matrix by the slot ratio",
        passed=not failures,
        detail="; ".join(failures),
    )


def _corner_to_bottom_row(n: int) -> IdentityItem:
    if n < 2:
        return IdentityItem(
            name="corner_to_bottom_row",
            description="corner rotation carries the slot-1 top unipotent to "
            "a bottom-row unipotent",
            passed=True,
            detail="vacuous for n=1 (slot 1 and the bottom row coincide)",
        )
    failures = []
    for kappa in (Q(1), Q(2, 3), Q(-5, 4)):
        for zeta in (Q(1), Q(-3, 2)):
            s = sigma_kappa(n, kappa)
            lhs = exact.matmul(
                exact.matmul(s, u_elem(n, 0, 1, zeta)), exact.inverse(s)
            )
            rhs = u_elem(n, n, 1, -zeta / kappa)
            detail = _mat_equal_detail(lhs, rhs)
            if detail is not None:
                failures.append(f"kappa={kappa}, zeta={zeta}: {detail}")
    return IdentityItem(
        name="corner_to_bottom_row",
        description="corner rotation carries the slot-1 top unipotent to a "
        "bottom-row unipotent with ratio -zeta/kappa",
        passed=not failures,
        detail="; ".join(failures),
    )


def _bottom_row_brackets(n: int) -> IdentityItem:
    failures = []
    x = corner_log_lower(n)
    # x really is the log of the all-ones lower unipotent
    detail = _mat_equal_detail(_exp_nilpotent(x), lower_ones(n))
    if detail is not None:
        failures.append(f"exp mismatch: {detail}")
    h = exact.diag(h_last_row(n))
    y = exact.scale(Q(-1, n + 1), exact.commutator(h, x))
    expected_first = tuple(
        tuple(
            Q(1, n - j) if (i == n and j < n) else Q(0)
            for j in range(n + 1)
        )
        for i in range(n + 1)
    )
    detail = _mat_equal_detail(y, expected_first)
    if detail is not None:
        failures.append(f"first bracket: {detail}")
    ys = [y]
    for k in range(2, n + 1):
        prev = ys[-1]
        if not exact.is_zero(exact.matmul(x, prev)):
            failures.append(f"x * y_{k-1} is nonzero")
        nxt = exact.commutator(prev, x)
        for i in range(n):
            if any(c != 0 for c in nxt[i]):
                failures.append(f"y_{k} has support off the bottom row (row {i})")
                break
        for j in range(n + 1 - k, n + 1):
            if nxt[n][j] != 0:
                failures.append(f"y_{k} column {j} should vanish")
        if nxt[n][n - k] != 1:
            failures.append(f"y_{k} entry (n, n-{k}) is {nxt[n][n - k]}, not 1")
        ys.append(nxt)
    span = tuple(tuple(yk[n][j] for j in range(n)) for yk in ys)
    if exact.det(span) == 0:
        failures.append("bottom-row vectors do not span")
    # the bottom row is exactly the strictly contracted part of the grading
    d = h_last_row(n)
    for i in range(n + 1):
        for j in range(n + 1):
            if i == j:
                continue
            negative = d[i] - d[j] < 0
            if negative != (i == n and j < n):
                failures.append(f"grading sign unexpected at ({i},{j})")
    return IdentityItem(
        name="bottom_row_brackets",
        description="iterated brackets of the lower-ones log against the "
        "last-row grading element sweep out the whole bottom row",
        passed=not failures,
        detail="; ".join(failures),
    )


def _extreme_level(v: ModuleVector, minimum: bool) -> Tuple[Q, ModuleVector]:
    hp = h_principal(v.module.n)
    vals = [
        w.evaluate(hp) for w, c in zip(v.module.weights, v.coords) if c != 0
    ]
    lev = min(vals) if minimum else max(vals)
    coords = tuple(
        c if (c != 0 and w.evaluate(hp) == lev) else Q(0)
        for c, w in zip(v.coords, v.module.weights)
    )
    return lev, ModuleVector(v.module, coords)


def _triangular_preserves_extreme_level(n: int) -> IdentityItem:
    failures = []
    kinds = ["standard", "exterior(2)", "adjoint"] if n >= 2 else ["standard", "adjoint"]
    uppers = [
        u_top(tuple(Q(1) for _ in range(n))),
        u_top(tuple(Q(-2 + i, 3) if i != 2 - n else Q(1, 2) for i in range(n))),
    ]
    if n >= 2:
        uppers.append(exact.matmul(u_elem(n, 0, 1, Q(3, 2)), u_elem(n, 1, 2, Q(-1))))
    lowers = [exact.transpose(g) for g in uppers]
    for kind in kinds:
        mod = build_module(kind, n)
        samples = [
            vector(mod, tuple(Q(1) if i == 0 else Q(0) for i in range(mod.dim))),
            vector(mod, tuple(Q((-1) ** i * (i + 1), 2) for i in range(mod.dim))),
            vector(
                mod,
                tuple(Q(1) if i % 3 == 0 else Q(0) for i in range(mod.dim)),
            ),
        ]
        for v in samples:
            if v.is_zero():
                continue
            for g in uppers:
                lev_before, comp_before = _extreme_level(v, minimum=True)
                moved = act(g, v)
                lev_after, comp_after = _extreme_level(moved, minimum=True)
                if lev_before != lev_after or not (comp_after - comp_before).is_zero():
                    failures.append(f"{kind}: upper move shifted the bottom level")
            for g in lowers:
                lev_before, comp_before = _extreme_level(v, minimum=False)
                moved = act(g, v)
                lev_after, comp_after = _extreme_level(moved, minimum=False)
                if lev_before != lev_after or not (comp_after - comp_before).is_zero():
                    failures.append(f"{kind}: lower move shifted the top level")
    return IdentityItem(
        name="triangular_preserves_extreme_level",
        description="upper unipotents fix the lowest level and its component; "
        "lower unipotents fix the highest",
        passed=not failures,
        detail="; ".join(sorted(set(failures))),
    )


def identity_suite(n: int) -> IdentitySuiteReport:
    """Run every identity check for the given rank, 1 <= n <= 6."""
    if not 1 <= n <= 6:
        raise ValueError("suite supports 1 <= n <= 6")
    items = (
        _ones_factorization(n),
        _corner_reflection_conjugate(n),
        _scaling_normalizes_tail(n),
        _diagonal_rescaling(n),
        _corner_to_bottom_row(n),
        _bottom_row_brackets(n),
        _triangular_preserves_extreme_level(n),
    )
    return IdentitySuiteReport(n=n, items=items)
