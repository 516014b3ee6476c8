"""Iteration ladder for second-order linear ODE eigenproblems.

The equation under study is ``y'' = L(x) y' + S(x) y`` with coefficient
functions supplied as expressions in ``x`` and one spectral parameter.
Repeated differentiation produces the ladder

    L[n] = L[n-1]' + L * L[n-1] + S[n-1]
    S[n] = S[n-1]' + S * L[n-1]

carried here in truncated Taylor arithmetic about a user-chosen point x0.
The termination quantity

    delta[n] = L[n](x0) * S[n-1](x0) - L[n-1](x0) * S[n](x0)

vanishes at eigenvalues of problems whose ladder terminates, which is what
:func:`find_eigenvalues` scans and bisects for.  The same ladder can be
generated column by column from Taylor coefficients alone
(:func:`aim_matrix_iterate`), using the 2x2 companion-form coefficient
convolution; both routes must agree, and tests hold them to that.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from .errors import (
    ConditioningWarning,
    DegenerateDeltaWarning,
    DepthRecheckWarning,
    GridPointSkippedWarning,
    IndexOutOfRange,
    OrderExhausted,
    SingularPivot,
    ValidationError,
)
from .series import (
    EPS_PIVOT,
    Expression,
    TaylorSeries,
    parse_expression,
    series_from_expr,
)


@dataclass(frozen=True)
class ProblemSpec:
    """A fully specified eigenproblem in ``y'' = L y' + S y`` form.

    Attributes:
        lambda0: expression for the first-derivative coefficient L(x).
        s0: expression for the zeroth-order coefficient S(x).
        param_name: name of the spectral parameter appearing in the
            expressions (conventionally the energy).
        x0: expansion/evaluation point for the ladder.
        order: Taylor order carried by the ladder; must be >= n_max + 2 so
            that the deepest ladder entries keep usable coefficients.
        n_max: default ladder depth.
    """

    lambda0: Expression
    s0: Expression
    param_name: str
    x0: float
    order: int
    n_max: int

    def __post_init__(self):
        if self.n_max < 1:
            raise ValidationError("n_max must be at least 1")
        if self.order < self.n_max + 2:
            raise ValidationError(
                f"order ({self.order}) must be >= n_max + 2 ({self.n_max + 2})"
            )

    @classmethod
    def from_strings(
        cls,
        lambda0: str,
        s0: str,
        param_name: str = "E",
        x0: float = 0.0,
        order: int = 40,
        n_max: int = 20,
    ) -> "ProblemSpec":
        return cls(
            lambda0=parse_expression(lambda0, param_name),
            s0=parse_expression(s0, param_name),
            param_name=param_name,
            x0=x0,
            order=order,
            n_max=n_max,
        )

    def series_pair(self, param_value: float) -> tuple[TaylorSeries, TaylorSeries]:
        """Evaluate (L, S) as series at x0 at the problem's truncation order."""
        lam = series_from_expr(self.lambda0, param_value, self.x0, self.order)
        s = series_from_expr(self.s0, param_value, self.x0, self.order)
        return lam, s


@dataclass(frozen=True)
class AIMSequences:
    """Ladder output: series lists plus scalar diagnostics at x0.

    ``lam[n]`` and ``s[n]`` hold the depth-n series (order decreasing by
    one per level).  ``delta[i]`` is the termination quantity at depth
    ``i + 1``.  ``alpha[n]`` is ``s[n](x0) / lam[n](x0)`` where the
    denominator is nonzero and NaN elsewhere.
    """

    lam: tuple[TaylorSeries, ...]
    s: tuple[TaylorSeries, ...]
    delta: np.ndarray
    alpha: np.ndarray
    x0: float

    @property
    def depth(self) -> int:
        return len(self.lam) - 1


def aim_iterate(spec: ProblemSpec, param_value: float, depth: int | None = None) -> AIMSequences:
    """Run the differentiation ladder to ``depth`` levels.

    Each level costs one Taylor order, so ``depth`` may not exceed
    ``spec.order - 2``.  The coefficient L need not be nonzero at x0 (the
    ladder itself never divides); a vanishing L(x0) only makes the ratio
    diagnostics at x0 undefined, so it is reported as a warning.
    """
    if depth is None:
        depth = spec.n_max
    if depth < 1:
        raise ValidationError("depth must be at least 1")
    if depth > spec.order - 2:
        raise OrderExhausted(
            f"depth {depth} needs order >= {depth + 2}, have {spec.order}"
        )
    lam0, s0 = spec.series_pair(param_value)
    scale = max(float(np.max(np.abs(lam0.coeffs))), float(np.max(np.abs(s0.coeffs))), 1.0)
    if abs(lam0.at_center) < 1e-12 * scale:
        warnings.warn(
            f"L(x0) = {lam0.at_center:.3e} vanishes at x0 = {spec.x0}; "
            "ratio diagnostics at x0 will be undefined",
            ConditioningWarning,
            stacklevel=2,
        )
    lam = [lam0]
    s = [s0]
    for _ in range(depth):
        prev_l, prev_s = lam[-1], s[-1]
        new_l = (prev_l.diff() + lam0 * prev_l) + prev_s
        new_s = prev_s.diff() + s0 * prev_l
        lam.append(new_l)
        s.append(new_s)
    lam_at = np.array([t.at_center for t in lam])
    s_at = np.array([t.at_center for t in s])
    delta = lam_at[1:] * s_at[:-1] - lam_at[:-1] * s_at[1:]
    with np.errstate(divide="ignore", invalid="ignore"):
        alpha = np.where(lam_at != 0.0, s_at / lam_at, np.nan)
    return AIMSequences(
        lam=tuple(lam), s=tuple(s), delta=delta, alpha=alpha, x0=spec.x0
    )


def delta_n(seqs: AIMSequences, n: int) -> float:
    """Termination quantity at depth n (1-based)."""
    if not 1 <= n <= seqs.depth:
        raise IndexOutOfRange(f"delta index {n} outside 1..{seqs.depth}")
    return float(seqs.delta[n - 1])


def alpha_at(seqs: AIMSequences, n: int) -> float:
    """Ratio s[n](x0) / lam[n](x0); raises if the denominator vanishes."""
    if not 0 <= n <= seqs.depth:
        raise IndexOutOfRange(f"alpha index {n} outside 0..{seqs.depth}")
    denom = seqs.lam[n].at_center
    if abs(denom) < EPS_PIVOT:
        raise SingularPivot(
            f"lam[{n}](x0) = {denom!r} vanishes; ratio undefined",
            classification="small-pivot",
        )
    return seqs.s[n].at_center / denom


# ----------------------------------------------------------------------
# coefficient-table route


@dataclass(frozen=True)
class CoeffTable:
    """Taylor-coefficient table of the ladder in companion form.

    ``C[m, n]`` is the 2-vector of the m-th Taylor coefficients of
    (L[n], S[n]).  ``A[k]`` is the 2x2 matrix of the k-th Taylor
    coefficients of the companion matrix [[L, 1], [S, 0]].
    """

    C: np.ndarray  # shape (m_max + 1, n_max + 1, 2)
    A: np.ndarray  # shape (order + 1, 2, 2)
    x0: float = field(default=0.0)


def aim_matrix_iterate(
    spec: ProblemSpec,
    param_value: float,
    m_max: int,
    n_max: int | None = None,
) -> CoeffTable:
    """Fill the coefficient table column by column.

    Column n + 1 is built from column n by one index shift (the
    differentiation part) plus a convolution against the companion-matrix
    coefficients.  Filling rows 0..m_max at depth n_max consumes initial
    rows up to m_max + n_max, so that sum must not exceed the problem order.
    """
    if n_max is None:
        n_max = spec.n_max
    if m_max < 0 or n_max < 0:
        raise ValidationError("m_max and n_max must be non-negative")
    if m_max + n_max > spec.order:
        raise OrderExhausted(
            f"m_max + n_max = {m_max + n_max} exceeds order {spec.order}"
        )
    lam0, s0 = spec.series_pair(param_value)
    order = spec.order
    a = np.zeros((order + 1, 2, 2))
    a[:, 0, 0] = lam0.coeffs
    a[0, 0, 1] = 1.0
    a[:, 1, 0] = s0.coeffs
    table = np.empty((m_max + 1, n_max + 1, 2))
    # working column, trimmed by one row per level
    col0 = lam0.coeffs[: m_max + n_max + 1].copy()
    col1 = s0.coeffs[: m_max + n_max + 1].copy()
    table[:, 0, 0] = col0[: m_max + 1]
    table[:, 0, 1] = col1[: m_max + 1]
    for n in range(n_max):
        length = col0.size - 1  # rows of the next column
        m = np.arange(1, length + 1, dtype=float)
        # accumulation order mirrors the series route exactly:
        # (shift + L-convolution) + companion term
        new0 = (m * col0[1 : length + 1] + np.convolve(a[:length, 0, 0], col0[:length])[:length]) + col1[:length]
        new1 = m * col1[1 : length + 1] + np.convolve(a[:length, 1, 0], col0[:length])[:length]
        col0, col1 = new0, new1
        rows = min(m_max + 1, length)
        table[:rows, n + 1, 0] = col0[:rows]
        table[:rows, n + 1, 1] = col1[:rows]
        if rows < m_max + 1:  # cannot happen under the order precondition
            table[rows:, n + 1, :] = np.nan
    return CoeffTable(C=table, A=a, x0=spec.x0)


# ----------------------------------------------------------------------
# eigenvalue scan


class Root(NamedTuple):
    """One located eigenvalue candidate."""

    value: float
    residual: float
    n_used: int


def _delta_at(spec: ProblemSpec, e: float, depth: int) -> float:
    seqs = aim_iterate(spec, e, depth=depth)
    return float(seqs.delta[depth - 1])


def _bisect(f, lo: float, hi: float, flo: float, fhi: float, tol: float) -> float:
    """Plain bisection on a sign change; returns the midpoint estimate."""
    for _ in range(200):
        if hi - lo <= tol:
            break
        mid = 0.5 * (lo + hi)
        fmid = f(mid)
        if fmid == 0.0:
            return mid
        if (flo < 0.0) != (fmid < 0.0):
            hi, fhi = mid, fmid
        else:
            lo, flo = mid, fmid
    return 0.5 * (lo + hi)


def find_eigenvalues(
    spec: ProblemSpec,
    e_min: float,
    e_max: float,
    grid_points: int,
    n: int | None = None,
    tol: float = 1e-10,
) -> list[Root]:
    """Scan delta[n] over a parameter grid and bisect its sign changes.

    Every root found at depth n is re-located at depth n + 2 inside the
    same grid cell; the reported residual is the movement between the two
    depths (infinite, with a warning, if the deeper level cannot be
    re-bracketed).  Grid points where the ladder cannot be evaluated are
    skipped with a warning.  An identically vanishing delta (for example
    S = 0) yields no brackets and an empty result.
    """
    if n is None:
        n = spec.n_max
    if not 1 <= n <= spec.n_max:
        raise ValidationError(f"depth n = {n} outside 1..n_max = {spec.n_max}")
    if e_min >= e_max:
        raise ValidationError("e_min must be < e_max")
    if grid_points < 2:
        raise ValidationError("grid_points must be >= 2")
    if tol <= 0.0:
        raise ValidationError("tol must be positive")
    if n + 2 > spec.order - 2:
        raise OrderExhausted(
            f"depth recheck needs order >= {n + 4}, have {spec.order}"
        )

    grid = np.linspace(e_min, e_max, grid_points)
    vals = np.full(grid_points, np.nan)
    # the per-point conditioning chatter is not useful during a scan; other
    # warning categories still reach the caller's handlers
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", ConditioningWarning)
        for i, e in enumerate(grid):
            try:
                vals[i] = _delta_at(spec, float(e), n)
            except SingularPivot as exc:
                warnings.warn(
                    f"grid point E = {e:g} skipped: {exc}",
                    GridPointSkippedWarning,
                    stacklevel=2,
                )
        finite = np.isfinite(vals)
        if not finite.any() or np.max(np.abs(vals[finite])) < EPS_PIVOT:
            warnings.warn(
                "termination quantity vanishes on the whole grid; "
                "no bracketing possible",
                DegenerateDeltaWarning,
                stacklevel=2,
            )
            return []

        roots: list[Root] = []

        def locate(depth: int, lo: float, hi: float) -> float | None:
            flo = _delta_at(spec, lo, depth)
            if flo == 0.0:
                return lo
            fhi = _delta_at(spec, hi, depth)
            if fhi == 0.0:
                return hi
            if (flo < 0.0) == (fhi < 0.0):
                return None
            return _bisect(
                lambda e: _delta_at(spec, e, depth), lo, hi, flo, fhi, tol
            )

        def recheck(lo: float, hi: float, e_found: float) -> float:
            deeper = locate(n + 2, lo, hi)
            if deeper is None:
                warnings.warn(
                    f"root near E = {e_found:.12g}: no sign change at depth "
                    f"{n + 2} inside the original bracket",
                    DepthRecheckWarning,
                    stacklevel=2,
                )
                return float("inf")
            return abs(deeper - e_found)

        for i in range(grid_points):
            if not finite[i]:
                continue
            if vals[i] == 0.0:
                e_found = float(grid[i])
                lo = float(grid[max(i - 1, 0)])
                hi = float(grid[min(i + 1, grid_points - 1)])
                roots.append(Root(e_found, recheck(lo, hi, e_found), n))
        for i in range(grid_points - 1):
            if not (finite[i] and finite[i + 1]):
                continue
            if vals[i] == 0.0 or vals[i + 1] == 0.0:
                continue
            if (vals[i] < 0.0) == (vals[i + 1] < 0.0):
                continue
            lo, hi = float(grid[i]), float(grid[i + 1])
            e_found = _bisect(
                lambda e: _delta_at(spec, e, n), lo, hi, vals[i], vals[i + 1], tol
            )
            roots.append(Root(e_found, recheck(lo, hi, e_found), n))
    roots.sort(key=lambda r: r.value)
    return roots
