"""Enumerate Taylor polynomials of odd order passing through a point.

For a point ``P = (s, t)`` the center ``c`` is a tangency center when the
*offset* ``h(c) = P_c(s) - t`` vanishes. Its derivative telescopes to
``h'(c) = f^(r+1)(c) (s - c)^r / r!``.

The search runs over windows ``[s - W, s + W]`` of doubling half-width. A
window is *closed* at an endpoint when ``h`` is bounded away from zero there
and moving further from zero outward, i.e. ``h < 0`` with ``f^(r+1) > 0`` or
``h > 0`` with ``f^(r+1) < 0``. The index is reported as finite only when two
consecutive windows are closed at both ends and see the same number of roots;
otherwise the count is window-limited.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Union

import numpy as np

from .errors import NonFiniteError, PointOnGraph
from .expr import Expr, as_expr
from .jet import evaluate, jet_coeffs
from .taylor import TaylorPoly, check_odd_order, taylor_poly

_GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0


@dataclass(frozen=True)
class SolverConfig:
    """Search and tolerance settings. ``None`` widths resolve per query."""

    initial_half_width: Optional[float] = None  # default max(1, 2|s|)
    max_half_width: Optional[float] = None  # default 2**20 * initial
    scan_points: int = 4096
    root_abs_tol: float = 1e-12
    dedup_tol: float = 1e-8
    index_cap: int = 64
    on_graph_eps: float = 1e-9

    def __post_init__(self):
        for name in ("initial_half_width", "max_half_width"):
            v = getattr(self, name)
            if v is not None and not (v > 0 and math.isfinite(v)):
                raise ValueError(f"{name} must be positive and finite")
        if self.scan_points < 16:
            raise ValueError("scan_points must be at least 16")
        if self.index_cap < 1:
            raise ValueError("index_cap must be at least 1")
        for name in ("root_abs_tol", "dedup_tol", "on_graph_eps"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be positive")

    def windows(self, s: float) -> tuple[float, float]:
        w0 = self.initial_half_width
        if w0 is None:
            w0 = max(1.0, 2.0 * abs(s))
        wmax = self.max_half_width
        if wmax is None:
            wmax = 2.0**20 * w0
        return w0, max(w0, wmax)


@dataclass(frozen=True)
class IlluminationQuery:
    f: Expr
    order: int
    s: float
    t: float
    config: SolverConfig = field(default_factory=SolverConfig)

    def __post_init__(self):
        object.__setattr__(self, "f", as_expr(self.f))
        object.__setattr__(self, "order", check_odd_order(self.order))
        object.__setattr__(self, "s", float(self.s))
        object.__setattr__(self, "t", float(self.t))
        if not (math.isfinite(self.s) and math.isfinite(self.t)):
            raise ValueError("query point must be finite")


@dataclass(frozen=True)
class Finite:
    k: int

    @property
    def count(self) -> int:
        return self.k

    is_finite = True


@dataclass(frozen=True)
class WindowLimited:
    count: int
    half_width: float
    suspected_unbounded: bool

    is_finite = False


Classification = Union[Finite, WindowLimited]


@dataclass(frozen=True)
class TangencySolution:
    c: float
    residual: float
    poly: TaylorPoly
    dedup_group: int


@dataclass(frozen=True)
class IlluminationReport:
    classification: Classification
    solutions: tuple
    distinct_tangent_count: int
    window: tuple
    # (half_width, raw root count) for every window scanned, in order
    history: tuple = ()


@dataclass(frozen=True)
class HypothesisReport:
    r: int
    sampled_min_derivative: float
    sign_changes: int
    tail_lower_bound: float
    T_est: float
    verdict: str  # "Applicable" | "NotNonnegative" | "NoPositiveTailBound"


class Offset:
    """Vectorised ``c -> P_c(s) - t`` together with its derivative in ``c``."""

    def __init__(self, f, r, s, t):
        self.f = as_expr(f)
        self.r = r
        self.s = float(s)
        self.t = float(t)

    def _horner(self, coeffs, c):
        d = self.s - c
        acc = coeffs[self.r].copy()
        for k in range(self.r - 1, -1, -1):
            acc = acc * d + coeffs[k]
        return acc - self.t

    def __call__(self, c):
        c = np.atleast_1d(np.asarray(c, dtype=float))
        return self._horner(jet_coeffs(self.f, c, self.r), c)

    def with_slope(self, c):
        """Returns ``(h, h', f^(r+1)/(r+1)!)`` at every ``c``."""
        c = np.atleast_1d(np.asarray(c, dtype=float))
        coeffs = jet_coeffs(self.f, c, self.r + 1)
        top = coeffs[self.r + 1]
        slope = (self.r + 1) * top * (self.s - c) ** self.r
        return self._horner(coeffs, c), slope, top


def offset(f, r: int, s: float, t: float, c: float) -> float:
    """``P_c(s) - t`` for the order-``r`` Taylor polynomial ``P_c`` of ``f``."""
    return float(Offset(f, check_odd_order(r), s, t)(c)[0])


def offset_derivative(f, r: int, s: float, c: float) -> float:
    """``d/dc [P_c(s)] = f^(r+1)(c) (s - c)^r / r!``."""
    return float(Offset(f, check_odd_order(r), s, 0.0).with_slope(c)[1][0])


# -- scanning ------------------------------------------------------------------


@dataclass
class _Scan:
    half_width: float
    lo: np.ndarray
    hi: np.ndarray
    h_lo: np.ndarray
    exact: np.ndarray
    touches: np.ndarray
    touch_residuals: np.ndarray

    @property
    def count(self) -> int:
        return len(self.lo) + len(self.exact) + len(self.touches)


def _golden_min(g, a, b, iterations=200):
    """Minimise ``g`` on each interval ``[a_i, b_i]`` by golden-section search."""
    a = a.astype(float).copy()
    b = b.astype(float).copy()
    x1 = b - _GOLDEN * (b - a)
    x2 = a + _GOLDEN * (b - a)
    f1 = g(x1)
    f2 = g(x2)
    for _ in range(iterations):
        if np.all(b - a <= 4e-16 * np.maximum(1.0, np.abs(a))):
            break
        left = f1 < f2
        b = np.where(left, x2, b)
        a = np.where(left, a, x1)
        keep = np.where(left, x1, x2)
        fkeep = np.where(left, f1, f2)
        new = np.where(left, b - _GOLDEN * (b - a), a + _GOLDEN * (b - a))
        fnew = g(new)
        x1 = np.where(left, new, keep)
        f1 = np.where(left, fnew, fkeep)
        x2 = np.where(left, keep, new)
        f2 = np.where(left, fkeep, fnew)
    best = f1 <= f2
    return np.where(best, x1, x2), np.where(best, f1, f2)


def _runs(indices):
    """Split sorted indices into runs of consecutive integers."""
    if len(indices) == 0:
        return []
    breaks = np.nonzero(np.diff(indices) > 1)[0] + 1
    return np.split(indices, breaks)


def _dips(vals, threshold):
    """Grid points where ``|h|`` has a local minimum whose parabolic vertex
    comes within ``threshold`` of zero or crosses it."""
    sgn = np.sign(vals[1:-1])
    lower, mid, upper = vals[:-2], vals[1:-1], vals[2:]
    d2 = sgn * (upper - 2.0 * mid + lower)
    d1 = 0.5 * (upper - lower)
    out = np.zeros(len(vals), bool)
    with np.errstate(all="ignore"):
        shift = -sgn * d1 / d2
        vertex = sgn * mid - 0.5 * d1 * d1 / d2
    out[1:-1] = (d2 > 0) & (np.abs(shift) <= 1.0) & (vertex <= threshold)
    return out


def _scan(h, s, half_width, cfg: SolverConfig) -> _Scan:
    grid = np.linspace(s - half_width, s + half_width, cfg.scan_points)
    vals = h(grid)
    sign = np.sign(vals)
    crossing = np.nonzero(sign[:-1] * sign[1:] < 0)[0]
    exact = np.nonzero(vals == 0)[0]
    lo, hi, h_lo = grid[crossing], grid[crossing + 1], vals[crossing]

    threshold = math.sqrt(cfg.root_abs_tol)
    suspicious = (np.abs(vals) < threshold) | _dips(vals, threshold)
    blocked = vals == 0
    blocked[crossing] = blocked[crossing + 1] = True
    for idx in exact:
        blocked[max(idx - 1, 0) : idx + 2] = True
    candidates = np.nonzero(suspicious & ~blocked)[0]

    touches = np.empty(0)
    touch_res = np.empty(0)
    runs = _runs(candidates)
    if runs:
        a = np.array([grid[max(run[0] - 1, 0)] for run in runs])
        b = np.array([grid[min(run[-1] + 1, len(grid) - 1)] for run in runs])
        side = np.array([sign[run[0]] for run in runs])
        # minimise h signed toward zero: a negative minimum means two roots the grid skipped
        xs, fs = _golden_min(lambda c: side * h(c), a, b)
        dipped = fs < 0
        if dipped.any():
            lo = np.concatenate([lo, a[dipped], xs[dipped]])
            hi = np.concatenate([hi, xs[dipped], b[dipped]])
            h_lo = np.concatenate([h_lo, side[dipped], -side[dipped]])
        # a minimiser stuck at an endpoint means |h| is monotone there (e.g. decaying tails)
        edge = 1e-6 * (b - a)
        interior = (xs - a > edge) & (b - xs > edge)
        ok = ~dipped & interior & (fs <= 10.0 * cfg.root_abs_tol)
        touches, touch_res = xs[ok], fs[ok]

    return _Scan(half_width, lo, hi, h_lo, grid[exact], touches, touch_res)


def _closed(offset_fn: Offset, s, half_width, margin) -> bool:
    ends = np.array([s - half_width, s + half_width])
    h, _, top = offset_fn.with_slope(ends)
    away = ((h < -margin) & (top > 0)) | ((h > margin) & (top < 0))
    return bool(away.all())


def _refine(offset_fn: Offset, scan: _Scan, cfg: SolverConfig) -> np.ndarray:
    """Bisect every sign-change bracket, then polish with guarded Newton steps."""
    lo, hi, h_lo = scan.lo.copy(), scan.hi.copy(), scan.h_lo.copy()
    if len(lo) == 0:
        return lo
    for _ in range(200):
        width_tol = cfg.root_abs_tol * np.maximum(1.0, np.abs(lo))
        active = (hi - lo) > width_tol
        if not active.any():
            break
        mid = 0.5 * (lo + hi)
        hm = offset_fn(mid)
        hit = hm == 0
        move_lo = active & ~hit & (np.sign(hm) == np.sign(h_lo))
        move_hi = active & ~hit & ~move_lo
        lo = np.where(move_lo | (active & hit), mid, lo)
        h_lo = np.where(move_lo, hm, h_lo)
        hi = np.where(move_hi | (active & hit), mid, hi)
    c = 0.5 * (lo + hi)
    for _ in range(8):
        h, slope, _ = offset_fn.with_slope(c)
        with np.errstate(all="ignore"):
            step = np.where(slope != 0, h / slope, 0.0)
        cand = c - step
        ok = np.isfinite(cand) & (cand >= lo) & (cand <= hi)
        if not ok.any() or not np.any(step[ok] != 0):
            break
        c = np.where(ok, cand, c)
    return c


def _dedup(canonical: np.ndarray, tol: float) -> np.ndarray:
    """Single-linkage grouping of polynomials with nearly equal coefficients."""
    m = canonical.shape[0]
    parent = list(range(m))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    mags = np.abs(canonical).max(axis=1) if m else np.empty(0)
    for i in range(m):
        for j in range(i + 1, m):
            scale = max(1.0, mags[i], mags[j])
            if np.max(np.abs(canonical[i] - canonical[j])) <= tol * scale:
                parent[find(j)] = find(i)
    groups = {}
    out = np.empty(m, dtype=int)
    for i in range(m):
        out[i] = groups.setdefault(find(i), len(groups))
    return out


def _suspected_unbounded(history) -> bool:
    counts = [n for _, n in history[-3:]]
    return len(counts) >= 2 and all(a < b for a, b in zip(counts, counts[1:]))


def find_tangencies(query: IlluminationQuery) -> IlluminationReport:
    """All centers whose Taylor polynomial passes through the query point.

    Raises
    ------
    PointOnGraph
        ``|t - f(s)|`` does not exceed ``config.on_graph_eps``.
    DomainError
        ``f`` is not smooth somewhere in the first search window.
    """
    f, r, s, t, cfg = query.f, query.order, query.s, query.t, query.config
    gap = abs(t - evaluate(f, s))
    if gap <= cfg.on_graph_eps:
        raise PointOnGraph(s, t, gap)

    h = Offset(f, r, s, t)
    margin = max(1.0, abs(t)) * 1e-6
    w0, wmax = cfg.windows(s)

    history = []
    prev = None  # (scan, closed) of the previous window
    final = None
    finite = capped = False
    width = w0
    while True:
        try:
            scan = _scan(h, s, width, cfg)
            closed = _closed(h, s, width, margin)
        except NonFiniteError:
            # the function overflows beyond here; the last window is the widest usable one
            if prev is None:
                raise
            final = prev[0]
            break
        history.append((width, scan.count))
        if scan.count >= cfg.index_cap:
            final, capped = scan, True
            break
        if closed and prev is not None and prev[1] and prev[0].count == scan.count:
            final, finite = scan, True
            break
        if width >= wmax:
            final = scan
            break
        prev = (scan, closed)
        width = min(2.0 * width, wmax)

    roots = np.concatenate([_refine(h, final, cfg), final.exact, final.touches])
    if len(roots) > cfg.index_cap:
        roots = roots[np.argsort(np.abs(roots - s), kind="stable")[: cfg.index_cap]]
    roots = np.sort(roots)

    residuals = np.abs(h(roots)) if len(roots) else np.empty(0)
    polys = [taylor_poly(f, float(c), r) for c in roots]
    canonical = np.array([p.canonical_coeffs for p in polys]).reshape(len(polys), r + 1)
    groups = _dedup(canonical, cfg.dedup_tol)
    solutions = tuple(
        TangencySolution(float(c), float(res), p, int(g))
        for c, res, p, g in zip(roots, residuals, polys, groups)
    )
    distinct = int(groups.max() + 1) if len(groups) else 0

    if finite:
        classification = Finite(distinct)
    else:
        classification = WindowLimited(
            distinct, final.half_width, capped or _suspected_unbounded(history)
        )
    return IlluminationReport(
        classification,
        solutions,
        distinct,
        (s - final.half_width, s + final.half_width),
        tuple(history),
    )


def illumination_index(query: IlluminationQuery) -> Classification:
    """``Finite(k)`` or a ``WindowLimited`` marker; both expose ``.count``."""
    return find_tangencies(query).classification


def check_hypotheses(f, r: int, half_width: float, samples: int = 1024,
                     threshold: float = 1e-8) -> HypothesisReport:
    """Sample ``f^(r+1)`` on ``[-W, W]`` and judge the convexity-type hypotheses.

    The tail bound is the minimum over ``W/2 <= |x| <= W``; it must exceed
    ``threshold`` for the verdict ``Applicable``. This is a diagnostic, not a
    proof: sampling cannot certify finitely many zeros.
    """
    r = check_odd_order(r)
    if not half_width > 0:
        raise ValueError("half_width must be positive")
    if samples < 64:
        raise ValueError("samples must be at least 64")
    x = np.linspace(-half_width, half_width, samples)
    deriv = jet_coeffs(f, x, r + 1)[r + 1] * math.factorial(r + 1)
    signs = np.sign(deriv)
    nonzero = signs[signs != 0]
    sign_changes = int(np.count_nonzero(nonzero[:-1] != nonzero[1:]))
    t_est = half_width / 2.0
    tail = deriv[np.abs(x) >= t_est]
    minimum = float(deriv.min())
    tail_bound = float(tail.min())
    if minimum < 0:
        verdict = "NotNonnegative"
    elif tail_bound > threshold:
        verdict = "Applicable"
    else:
        verdict = "NoPositiveTailBound"
    return HypothesisReport(r, minimum, sign_changes, tail_bound, t_est, verdict)
