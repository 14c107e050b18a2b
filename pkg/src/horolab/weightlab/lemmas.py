"""Exact weight-combinatorics checks for unipotent translates.

The central object: given an eigenvector v of the principal diagonal element
and a translation u(x) with all x_i nonzero, classify which weights survive
in u(x) v and certify the sign and equality structure of their values
against the block diagonal elements.  Everything is exact rational
arithmetic; conclusions about invariance are cross-checked by the derived
action, never inferred.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction as Q
from typing import Dict, List, Optional, Sequence, Tuple, Union

import numpy as np

from .. import exact
from ..exact import Mat
from .cartan import Weight, h_block, h_principal, sl2_coroot
from .groups import u_elem, u_top
from .modules import (
    ModuleVector,
    WeightModule,
    act,
    act_algebra,
    weight_component,
    weight_support,
)

SubgroupSpec = Union[str, Tuple[str, int], Sequence[Mat]]


def subgroup_generators(n: int, spec: SubgroupSpec) -> Tuple[Mat, ...]:
    """Lie algebra generators (as matrices) for the named subgroup.

    "G" is the full group; ("G", n0) the block upper subgroup whose rows past
    n0 are standard basis rows; "Q" the stabilizer of the last basis vector;
    ("Q", n0) the intersection of the two; ("sl2", i) the rank one subgroup
    through slot i.  A sequence of matrices passes through unchanged.
    """
    if isinstance(spec, str):
        if spec == "G":
            return tuple(
                exact.elementary(n + 1, i, j)
                for i in range(n + 1)
                for j in range(n + 1)
                if i != j
            )
        if spec == "Q":
            return tuple(
                exact.elementary(n + 1, i, j)
                for i in range(n + 1)
                for j in range(n)
                if i != j
            )
        raise ValueError(f"unknown subgroup: {spec!r}")
    if (
        isinstance(spec, tuple)
        and len(spec) == 2
        and isinstance(spec[0], str)
        and isinstance(spec[1], int)
    ):
        name, m = spec
        if name == "G":
            if not 0 <= m <= n:
                raise ValueError(f"block size {m} out of range")
            return tuple(
                exact.elementary(n + 1, i, j)
                for i in range(m + 1)
                for j in range(n + 1)
                if i != j
            )
        if name == "Q":
            if not 0 <= m <= n:
                raise ValueError(f"block size {m} out of range")
            return tuple(
                exact.elementary(n + 1, i, j)
                for i in range(m + 1)
                for j in range(n)
                if i != j
            )
        if name == "sl2":
            if not 1 <= m <= n:
                raise ValueError(f"slot {m} out of range")
            return (exact.elementary(n + 1, 0, m), exact.elementary(n + 1, m, 0))
        raise ValueError(f"unknown subgroup: {spec!r}")
    return tuple(exact.mat(x) for x in spec)


def fixed_check(v: ModuleVector, subgroup: SubgroupSpec) -> bool:
    """Whether the derived action of every generator kills v (exact)."""
    for x in subgroup_generators(v.module.n, subgroup):
        if not act_algebra(x, v).is_zero():
            return False
    return True


# -- S-set classification -------------------------------------------------------


@dataclass
class SSetReport:
    """Outcome of the weight-support classification of u(x) v.

    ``support`` lists the distinct weights of u(x) v; ``levels[i]`` is the
    value of support[i] on the principal element minus the eigenvalue b, and
    ``margins[i][k-1]`` the value on the size-k block element minus that
    level.  The s_k sets hold indices into ``support``.
    """

    n: int
    b: Q
    x: Tuple[Q, ...]
    support: Tuple[Weight, ...]
    levels: Tuple[Q, ...]
    margins: Tuple[Tuple[Q, ...], ...]
    s_k: Dict[int, Tuple[int, ...]]
    s_all: Tuple[int, ...]
    nonneg_levels: bool
    s_n_nonempty: bool
    s_all_nonempty: bool
    flat_hypothesis: bool
    fixed_full: Optional[bool]
    block_pairs: Tuple[Tuple[int, int], ...]
    fixed_parabolic_block: Dict[Tuple[int, int], bool]
    zero_level_pairs: Tuple[Tuple[int, int], ...]
    fixed_block: Dict[Tuple[int, int], bool]
    consistent: bool

    @property
    def ok(self) -> bool:
        return (
            self.nonneg_levels
            and self.s_n_nonempty
            and self.s_all_nonempty
            and self.consistent
        )


def s_sets(v: ModuleVector, x: Sequence) -> SSetReport:
    """Classify the weight support of u(x) v for an eigenvector v.

    Preconditions checked exactly: v nonzero, v an eigenvector of the
    principal diagonal element, all entries of x nonzero.
    """
    mod = v.module
    n = mod.n
    xs = tuple(Q(c) for c in x)
    if len(xs) != n:
        raise ValueError(f"x must have length {n}")
    if any(c == 0 for c in xs):
        raise ValueError("all entries of x must be nonzero")
    if v.is_zero():
        raise ValueError("v must be nonzero")
    hp = h_principal(n)
    own_levels = {w.evaluate(hp) for w in weight_support(v)}
    if len(own_levels) != 1:
        raise ValueError("v is not an eigenvector of the principal element")
    b = own_levels.pop()

    w = act(u_top(xs), v)
    support = weight_support(w)
    blocks = [h_block(n, k) for k in range(1, n + 1)]
    levels = tuple(mu.evaluate(hp) - b for mu in support)
    margins = tuple(
        tuple(mu.evaluate(blocks[k - 1]) - lev for k in range(1, n + 1))
        for mu, lev in zip(support, levels)
    )

    s_k: Dict[int, Tuple[int, ...]] = {}
    for k in range(1, n + 1):
        s_k[k] = tuple(
            i for i in range(len(support)) if margins[i][k - 1] >= 0
        )
    s_all = tuple(
        i for i in range(len(support)) if all(margins[i][k - 1] >= 0 for k in range(1, n + 1))
    )

    nonneg = all(lev >= 0 for lev in levels)
    s_n = s_k[n]
    s_n_nonempty = len(s_n) > 0
    s_all_nonempty = len(s_all) > 0

    # flat case: every index of s_n has zero block-n margin and zero level
    flat = s_n_nonempty and all(
        margins[i][n - 1] == 0 and levels[i] == 0 for i in s_n
    )
    fixed_full = fixed_check(v, "G") if flat else None

    # equality pairs over the full intersection
    block_pairs: List[Tuple[int, int]] = []
    zero_level_pairs: List[Tuple[int, int]] = []
    fixed_parabolic: Dict[Tuple[int, int], bool] = {}
    fixed_block: Dict[Tuple[int, int], bool] = {}
    if s_all_nonempty:
        for j in range(1, n):
            for n0 in range(j, n + 1):
                if all(
                    margins[i][j - 1] == 0 and margins[i][n0 - 1] == 0
                    for i in s_all
                ):
                    block_pairs.append((j, n0))
                    fixed_parabolic[(j, n0)] = fixed_check(v, ("Q", n0))
                    if all(levels[i] == 0 for i in s_all):
                        zero_level_pairs.append((j, n0))
                        fixed_block[(j, n0)] = fixed_check(v, ("G", n0))

    consistent = True
    if flat and fixed_full is False:
        consistent = False
    if any(not val for val in fixed_parabolic.values()):
        consistent = False
    if any(not val for val in fixed_block.values()):
        consistent = False

    return SSetReport(
        n=n,
        b=b,
        x=xs,
        support=support,
        levels=levels,
        margins=margins,
        s_k=s_k,
        s_all=s_all,
        nonneg_levels=nonneg,
        s_n_nonempty=s_n_nonempty,
        s_all_nonempty=s_all_nonempty,
        flat_hypothesis=flat,
        fixed_full=fixed_full,
        block_pairs=tuple(block_pairs),
        fixed_parabolic_block=fixed_parabolic,
        zero_level_pairs=tuple(zero_level_pairs),
        fixed_block=fixed_block,
        consistent=consistent,
    )


# -- rank one max-level check ----------------------------------------------------


@dataclass
class Sl2Report:
    slot: int
    r: Q
    lam_max_v: Q
    lam_max_w: Q
    inequality_ok: bool
    equality: bool
    recovery_ok: bool
    rotated_top_ok: bool
    characterization_ok: bool
    eigenvector: bool
    fixed_lower: Optional[bool] = None
    fixed_upper: Optional[bool] = None
    eigen_equality_ok: Optional[bool] = None
    eigen_same_level_ok: Optional[bool] = None
    eigen_both_zero_ok: Optional[bool] = None

    @property
    def ok(self) -> bool:
        checks = [self.inequality_ok, self.characterization_ok]
        if self.eigenvector:
            checks += [
                bool(self.eigen_equality_ok),
                bool(self.eigen_same_level_ok),
                bool(self.eigen_both_zero_ok),
            ]
        return all(checks)


def _sigma1(n: int, i: int, r: Q) -> Mat:
    rows = [[Q(1) if a == b else Q(0) for b in range(n + 1)] for a in range(n + 1)]
    rows[0][0] = Q(0)
    rows[i][i] = Q(0)
    rows[0][i] = r
    rows[i][0] = -1 / r
    return exact.mat(rows)


def _level_max(v: ModuleVector, a_diag) -> Q:
    vals = [w.evaluate(a_diag) for w, c in zip(v.module.weights, v.coords) if c != 0]
    if not vals:
        raise ValueError("zero vector has no top level")
    return max(vals)


def _level_component(v: ModuleVector, a_diag, level: Q) -> ModuleVector:
    coords = tuple(
        c if (c != 0 and w.evaluate(a_diag) == level) else Q(0)
        for c, w in zip(v.coords, v.module.weights)
    )
    return ModuleVector(v.module, coords)


def sl2_maxweight_check(i: int, r, v: ModuleVector) -> Sl2Report:
    """Certify the top-level inequality for the rank one subgroup at slot i.

    Computes the top level of v and of u(r e_i) v for the grading by the slot
    coroot, checks that the two top levels sum to something nonnegative, and
    checks that equality happens exactly when v is recovered from the lower
    unipotent applied to its own top component while the translate's top
    component is the rotated top component.
    """
    rq = Q(r)
    if rq == 0:
        raise ValueError("r must be nonzero")
    mod = v.module
    n = mod.n
    if v.is_zero():
        raise ValueError("v must be nonzero")
    a = sl2_coroot(n, i)
    lam_v = _level_max(v, a)
    w = act(u_elem(n, 0, i, rq), v)
    lam_w = _level_max(w, a)
    inequality_ok = lam_w + lam_v >= 0
    equality = lam_w + lam_v == 0

    v_max = _level_component(v, a, lam_v)
    w_max = _level_component(w, a, lam_w)
    recovery_ok = (act(u_elem(n, i, 0, -1 / rq), v_max) - v).is_zero()
    rotated_top_ok = (act(_sigma1(n, i, rq), v_max) - w_max).is_zero()
    characterization_ok = equality == (recovery_ok and rotated_top_ok)

    support_levels = {
        w0.evaluate(a) for w0, c in zip(mod.weights, v.coords) if c != 0
    }
    eigen = len(support_levels) == 1
    report = Sl2Report(
        slot=i,
        r=rq,
        lam_max_v=lam_v,
        lam_max_w=lam_w,
        inequality_ok=inequality_ok,
        equality=equality,
        recovery_ok=recovery_ok,
        rotated_top_ok=rotated_top_ok,
        characterization_ok=characterization_ok,
        eigenvector=eigen,
    )
    if eigen:
        fixed_lower = act_algebra(exact.elementary(n + 1, i, 0), v).is_zero()
        fixed_upper = act_algebra(exact.elementary(n + 1, 0, i), v).is_zero()
        rotated_full = (act(_sigma1(n, i, rq), v) - w_max).is_zero()
        report.fixed_lower = fixed_lower
        report.fixed_upper = fixed_upper
        report.eigen_equality_ok = (equality == fixed_lower) and (
            equality == rotated_full
        )
        report.eigen_same_level_ok = (lam_w == lam_v) == fixed_upper
        both_zero = lam_v == 0 and lam_w == 0
        report.eigen_both_zero_ok = both_zero == (fixed_lower and fixed_upper)
    return report


# -- lower estimate for the surviving component ------------------------------------


def delta_plus_indices(module: WeightModule, b: Q) -> Tuple[int, ...]:
    """Basis indices whose weight mu has mu(principal) - b >= 0 and
    nonnegative margin against every block element."""
    hp = h_principal(module.n)
    blocks = [h_block(module.n, k) for k in range(1, module.n + 1)]
    out = []
    for idx, mu in enumerate(module.weights):
        lev = mu.evaluate(hp) - b
        if lev < 0:
            continue
        if all(mu.evaluate(hb) - lev >= 0 for hb in blocks):
            out.append(idx)
    return tuple(out)


def level_indices(module: WeightModule, b: Q) -> Tuple[int, ...]:
    hp = h_principal(module.n)
    return tuple(
        idx for idx, mu in enumerate(module.weights) if mu.evaluate(hp) == b
    )


@dataclass
class D1Estimate:
    value: float
    dim: int
    grid_points: int
    face_density: int


def estimate_D1(
    module: WeightModule, b, x: Sequence, grid_density: int = 7
) -> D1Estimate:
    """Grid estimate of the smallest surviving component norm.

    Over unit sup-norm vectors v in the level-b eigenspace, estimates the
    minimum of the sup norm of the projection of u(x) v onto the weights
    with nonnegative level and nonnegative block margins.  The grid walks
    the faces of the unit cube (one coordinate pinned to +-1, the others on
    a uniform grid), so the returned value is an upper estimate of the true
    infimum; the infimum is positive whenever x has no zero entries.
    """
    bq = Q(b)
    rows = delta_plus_indices(module, bq)
    cols = level_indices(module, bq)
    if not cols:
        raise ValueError("no weights at the requested level")
    if not rows:
        raise ValueError("no admissible weights at this level")
    xs = tuple(Q(c) for c in x)
    if any(c == 0 for c in xs):
        raise ValueError("all entries of x must be nonzero")
    rho = module.group_action(u_top(xs))
    m = np.array(
        [[float(rho[a][c]) for c in cols] for a in rows]
    )
    dim = len(cols)
    if dim == 1:
        vals = np.abs(m[:, 0])
        return D1Estimate(value=float(vals.max()), dim=1, grid_points=2, face_density=1)

    density = max(2, int(grid_density))
    # keep the face grid affordable for wide levels
    while 2 * dim * density ** (dim - 1) > 250_000 and density > 2:
        density -= 1
    ticks = np.linspace(-1.0, 1.0, density)
    best = np.inf
    count = 0
    for face in range(dim):
        for sign in (1.0, -1.0):
            for rest in itertools.product(ticks, repeat=dim - 1):
                vec = np.empty(dim)
                vec[face] = sign
                pos = 0
                for j in range(dim):
                    if j == face:
                        continue
                    vec[j] = rest[pos]
                    pos += 1
                val = np.abs(m @ vec).max()
                count += 1
                if val < best:
                    best = val
    return D1Estimate(
        value=float(best), dim=dim, grid_points=count, face_density=density
    )
