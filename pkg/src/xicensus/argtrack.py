"""Continuous argument of analytic functions along polylines.

Functions passed here must accept a numpy array of complex points and return
an array of values (every evaluator in :mod:`xicensus.specfun` does; wrap
scalar callables with :func:`xicensus.specfun.vectorize`).
"""

from __future__ import annotations

import contextlib
import math
import threading
from dataclasses import dataclass, field
from typing import Callable, Iterator, NamedTuple, Sequence

import numpy as np

from .errors import MaxDepthExceeded, NonIntegerWinding, ZeroAtCenter, ZeroOnPath

ArrayFunc = Callable[[np.ndarray], np.ndarray]

HALF_PI = 0.5 * math.pi
TWO_PI = 2.0 * math.pi


@dataclass(frozen=True)
class TrackOptions:
    """Sampling controls for :func:`track_argument`.

    ``density`` adds initial samples per unit of segment length on top of the
    17-point start; callers that know how fast the argument of ``f`` turns
    (about log(t/2pi)/2 per unit height for xi) set it accordingly.
    """

    initial_samples: int = 17
    density: float = 0.0
    max_depth: int = 40
    zero_guard: float = 1e-10
    dip_ratio: float = 0.5

    def __post_init__(self):
        if self.initial_samples < 2:
            raise ValueError("initial_samples must be at least 2")
        if self.density < 0:
            raise ValueError("density must be non-negative")


DEFAULT_TRACK = TrackOptions()


@dataclass(frozen=True)
class Segment:
    start: complex
    end: complex

    def __post_init__(self):
        a, b = complex(self.start), complex(self.end)
        if not (np.isfinite(a) and np.isfinite(b)):
            raise ValueError("segment endpoints must be finite")
        if a == b:
            raise ValueError("segment endpoints must differ")
        object.__setattr__(self, "start", a)
        object.__setattr__(self, "end", b)

    @property
    def length(self) -> float:
        return abs(self.end - self.start)

    def point(self, u):
        return self.start + (self.end - self.start) * np.asarray(u, dtype=np.float64)

    def reversed(self) -> "Segment":
        return Segment(self.end, self.start)


def _segments_cross(p: Segment, q: Segment) -> bool:
    """Proper or touching intersection test for two closed segments."""

    def orient(a, b, c):
        v = (b - a).conjugate() * (c - a)
        return v.imag

    def on_seg(a, b, c):
        return (min(a.real, b.real) - 1e-15 <= c.real <= max(a.real, b.real) + 1e-15
                and min(a.imag, b.imag) - 1e-15 <= c.imag <= max(a.imag, b.imag) + 1e-15)

    a, b, c, d = p.start, p.end, q.start, q.end
    o1, o2, o3, o4 = orient(a, b, c), orient(a, b, d), orient(c, d, a), orient(c, d, b)
    if o1 * o2 < 0 and o3 * o4 < 0:
        return True
    return ((o1 == 0 and on_seg(a, b, c)) or (o2 == 0 and on_seg(a, b, d))
            or (o3 == 0 and on_seg(c, d, a)) or (o4 == 0 and on_seg(c, d, b)))


@dataclass(frozen=True)
class Contour:
    """Oriented polyline; a closed contour returns from the last vertex to the first."""

    vertices: tuple[complex, ...]
    closed: bool = True

    def __post_init__(self):
        verts = tuple(complex(v) for v in self.vertices)
        if len(verts) < 2:
            raise ValueError("a contour needs at least two vertices")
        object.__setattr__(self, "vertices", verts)
        segs = self.segments()  # raises on repeated consecutive vertices
        if self.closed:
            n = len(segs)
            for i in range(n):
                for j in range(i + 1, n):
                    if j == i + 1 or (i == 0 and j == n - 1):
                        continue
                    if _segments_cross(segs[i], segs[j]):
                        raise ValueError("closed contour intersects itself")

    def segments(self) -> list[Segment]:
        v = self.vertices
        segs = [Segment(v[i], v[i + 1]) for i in range(len(v) - 1)]
        if self.closed:
            segs.append(Segment(v[-1], v[0]))
        return segs

    @classmethod
    def rectangle(cls, vertices: Sequence[complex]) -> "Contour":
        return cls(tuple(vertices), closed=True)


@dataclass
class ArgTrace:
    """Continuous argument of f along one segment.

    ``params`` are positions in [0, 1] measured from ``segment.start``;
    ``unwrapped_arg`` changes by less than pi/2 between neighbouring samples.
    """

    segment: Segment
    params: np.ndarray
    values: np.ndarray
    unwrapped_arg: np.ndarray
    refinement_depth: int
    evaluations: int
    re_sign_changes: int = field(init=False)

    def __post_init__(self):
        self.re_sign_changes = _count_sign_changes(self.values.real)

    @property
    def modulus(self) -> np.ndarray:
        return np.abs(self.values)

    @property
    def delta_arg(self) -> float:
        return float(self.unwrapped_arg[-1] - self.unwrapped_arg[0])

    @property
    def min_modulus(self) -> float:
        return float(np.min(np.abs(self.values)))

    @property
    def samples(self) -> list[tuple[float, float, float]]:
        return list(zip(self.params.tolist(), self.modulus.tolist(), self.unwrapped_arg.tolist()))

    def reversed(self) -> "ArgTrace":
        return ArgTrace(self.segment.reversed(), (1.0 - self.params)[::-1].copy(),
                        self.values[::-1].copy(), self.unwrapped_arg[::-1].copy(),
                        self.refinement_depth, self.evaluations)


def _count_sign_changes(x: np.ndarray) -> int:
    sgn = np.sign(x)
    sgn = sgn[sgn != 0]
    return int(np.count_nonzero(sgn[1:] != sgn[:-1]))


# ------------------------------------------------------------------ audit

_audit_lock = threading.Lock()
_auditors: list["TraceAudit"] = []


@dataclass
class TraceAudit:
    """Collects the sign-change inequality |delta_arg| <= (m+1) pi + 1e-6 for
    every trace produced while active."""

    traces: int = 0
    violations: list[tuple[float, int]] = field(default_factory=list)
    worst_slack: float = math.inf

    def record(self, trace: ArgTrace):
        bound = (trace.re_sign_changes + 1) * math.pi + 1e-6
        slack = bound - abs(trace.delta_arg)
        self.traces += 1
        self.worst_slack = min(self.worst_slack, slack)
        if slack < 0:
            self.violations.append((trace.delta_arg, trace.re_sign_changes))

    @property
    def ok(self) -> bool:
        return not self.violations


@contextlib.contextmanager
def audit_traces() -> Iterator[TraceAudit]:
    audit = TraceAudit()
    with _audit_lock:
        _auditors.append(audit)
    try:
        yield audit
    finally:
        with _audit_lock:
            _auditors.remove(audit)


def _publish(trace: ArgTrace):
    with _audit_lock:
        for audit in _auditors:
            audit.record(trace)


# ------------------------------------------------------------------ tracking


def _canonical(seg: Segment) -> tuple[Segment, bool]:
    a, b = seg.start, seg.end
    if (a.real, a.imag) <= (b.real, b.imag):
        return seg, False
    return seg.reversed(), True


def _eval(f: ArrayFunc, z: np.ndarray) -> np.ndarray:
    vals = np.asarray(f(z), dtype=np.complex128).reshape(z.shape)
    if not np.all(np.isfinite(vals)):
        raise ZeroOnPath("function value not finite on the path")
    return vals


def _track_canonical(f: ArrayFunc, seg: Segment, opts: TrackOptions) -> ArgTrace:
    n0 = max(opts.initial_samples, int(math.ceil(opts.density * seg.length)) + 1)
    u0 = np.linspace(0.0, 1.0, n0)
    v0 = _eval(f, seg.point(u0))
    evaluations = n0
    if np.any(v0 == 0):
        where = complex(seg.point(u0[np.argmin(np.abs(v0))]))
        raise ZeroOnPath(f"function vanishes on the path at {where}", where)
    params = [u0]
    values = [v0]
    scale = float(np.max(np.abs(v0)))
    # pending intervals: left/right params and values, depth
    ua, ub = u0[:-1], u0[1:]
    fa, fb = v0[:-1], v0[1:]
    depth = np.zeros(ua.shape, dtype=np.int64)
    max_depth = 0
    while ua.size:
        um = 0.5 * (ua + ub)
        fm = _eval(f, seg.point(um))
        evaluations += um.size
        params.append(um)
        values.append(fm)
        afm = np.abs(fm)
        if np.any(afm == 0):
            where = complex(seg.point(um[np.argmin(afm)]))
            raise ZeroOnPath(f"function vanishes on the path at {where}", where)
        d1 = np.angle(fm * np.conj(fa))
        d2 = np.angle(fb * np.conj(fm))
        d = np.angle(fb * np.conj(fa))
        ok = (np.abs(d1) < HALF_PI) & (np.abs(d2) < HALF_PI) & (np.abs(d) < HALF_PI)
        ok &= afm >= opts.dip_ratio * np.minimum(np.abs(fa), np.abs(fb))
        bad = ~ok
        if not np.any(bad):
            break
        stuck = bad & (depth + 1 >= opts.max_depth)
        if np.any(stuck):
            k = int(np.argmin(np.where(stuck, afm, np.inf)))
            where = complex(seg.point(um[k]))
            if afm[k] < opts.zero_guard * scale:
                raise ZeroOnPath(f"function vanishes on the path near {where}", where)
            raise MaxDepthExceeded(f"argument refinement exceeded depth {opts.max_depth} near {where}")
        ua = np.concatenate([ua[bad], um[bad]])
        ub = np.concatenate([um[bad], ub[bad]])
        fa, fb = np.concatenate([fa[bad], fm[bad]]), np.concatenate([fm[bad], fb[bad]])
        depth = np.concatenate([depth[bad], depth[bad]]) + 1
        max_depth = max(max_depth, int(depth.max()))
    u = np.concatenate(params)
    v = np.concatenate(values)
    order = np.argsort(u, kind="stable")
    u, v = u[order], v[order]
    steps = np.angle(v[1:] * np.conj(v[:-1]))
    if np.any(np.abs(steps) >= HALF_PI):  # pragma: no cover - refinement contract
        raise MaxDepthExceeded("argument steps not resolved below pi/2")
    unwrapped = np.concatenate([[np.angle(v[0])], np.angle(v[0]) + np.cumsum(steps)])
    return ArgTrace(seg, u, v, unwrapped, max_depth, evaluations)


def track_argument(f: ArrayFunc, seg: Segment, opts: TrackOptions = DEFAULT_TRACK) -> ArgTrace:
    """Adaptive continuous argument of ``f`` along ``seg``.

    Every interval is bisected and accepted only when both halves and the
    whole turn by less than pi/2 consistently and the midpoint shows no
    modulus dip; rejected intervals are split until depth ``opts.max_depth``.
    The segment is always sampled from its lexicographically smaller endpoint
    so that a reversed segment yields exactly the negated change.
    """
    canon, flipped = _canonical(seg)
    trace = _track_canonical(f, canon, opts)
    if flipped:
        trace = trace.reversed()
    _publish(trace)
    return trace


def contour_traces(f: ArrayFunc, contour: Contour, opts: TrackOptions = DEFAULT_TRACK,
                   threads: int = 1) -> list[ArgTrace]:
    segs = contour.segments()
    if threads > 1 and len(segs) > 1:
        from concurrent.futures import ThreadPoolExecutor

        with ThreadPoolExecutor(max_workers=threads) as pool:
            return list(pool.map(lambda s: track_argument(f, s, opts), segs))
    return [track_argument(f, s, opts) for s in segs]


def winding_number(f: ArrayFunc, c: Contour, opts: TrackOptions = DEFAULT_TRACK,
                   threads: int = 1) -> int:
    """Number of zeros of f enclosed by the closed contour (counterclockwise positive)."""
    if not c.closed:
        raise ValueError("winding_number needs a closed contour")
    traces = contour_traces(f, c, opts, threads)
    total = 0.0
    for tr in traces:  # sequential reduction in vertex order
        total += tr.delta_arg
    w = total / TWO_PI
    k = round(w)
    if abs(w - k) > 1e-3:
        raise NonIntegerWinding(f"winding {w:.6f} is not close to an integer", w)
    return int(k)


class SignChanges(NamedTuple):
    m: int
    bound: float
    crossings: np.ndarray
    trace: ArgTrace


def sign_change_count(f: ArrayFunc, seg: Segment, opts: TrackOptions = DEFAULT_TRACK,
                      tol: float = 1e-9) -> SignChanges:
    """Points where Re f vanishes inside the segment, and the bound (m+1) pi
    on the argument change that they imply."""
    trace = track_argument(f, seg, opts)
    re = trace.values.real
    sgn = np.sign(re)
    nz = np.nonzero(sgn)[0]
    pairs = [(nz[i], nz[i + 1]) for i in range(nz.size - 1) if sgn[nz[i]] != sgn[nz[i + 1]]]
    if not pairs:
        return SignChanges(0, math.pi, np.empty(0), trace)
    lo = np.array([trace.params[i] for i, _ in pairs], dtype=float)
    hi = np.array([trace.params[j] for _, j in pairs], dtype=float)
    slo = np.array([sgn[i] for i, _ in pairs])
    # all brackets are halved together
    while np.max(hi - lo) > tol:
        mid = 0.5 * (lo + hi)
        val = np.asarray(f(seg.point(mid))).real
        same = np.sign(val) == slo
        lo = np.where(same, mid, lo)
        hi = np.where(same, hi, mid)
        hit = val == 0
        lo = np.where(hit, mid, lo)
        hi = np.where(hit, mid, hi)
    crossings = list(0.5 * (lo + hi))
    m = len(crossings)
    return SignChanges(m, (m + 1) * math.pi, np.array(crossings), trace)


def _circle_max(g: Callable[[np.ndarray], np.ndarray], z0: complex, R: float,
                n_samples: int, passes: int) -> float:
    theta = np.linspace(0.0, TWO_PI, n_samples, endpoint=False)
    vals = np.asarray(g(z0 + R * np.exp(1j * theta)), dtype=float)
    best = int(np.argmax(vals))
    M, theta_best = float(vals[best]), float(theta[best])
    width = TWO_PI / n_samples
    for _ in range(passes):
        local = theta_best + np.linspace(-width, width, 33)
        lv = np.asarray(g(z0 + R * np.exp(1j * local)), dtype=float)
        k = int(np.argmax(lv))
        if lv[k] > M:
            M, theta_best = float(lv[k]), float(local[k])
        width /= 8.0
    return M


def max_modulus_on_circle(f: ArrayFunc, z0: complex, R: float, n_samples: int = 720,
                          passes: int = 3) -> float:
    """Sampled maximum of |f| on |z - z0| = R, refined around the running maximum."""
    return _circle_max(lambda z: np.abs(np.asarray(f(z))), z0, R, n_samples, passes)


def disk_zero_bound(f: ArrayFunc, z0: complex, r: float, R: float, n_samples: int = 720,
                    safety: float = 1.0, *, log_abs: bool = False) -> int:
    """Upper bound floor(log(M/|f(z0)|)/log(R/r)) on the zeros of f in |z - z0| <= r.

    ``safety`` multiplies the sampled maximum M (a lower bound on the true one).
    With ``log_abs`` the callable returns log|f| instead of f, for functions
    whose modulus leaves binary64 range on the circle.
    A non-positive logarithm yields 0.
    """
    if not 0 < r < R:
        raise ValueError("need 0 < r < R")
    g = (lambda z: np.asarray(f(z), dtype=float)) if log_abs else (lambda z: np.log(np.abs(np.asarray(f(z)))))
    with np.errstate(divide="ignore"):
        log_f0 = float(g(np.array([complex(z0)]))[0])
        if log_f0 == -math.inf:
            raise ZeroAtCenter("f vanishes at the disk centre")
        log_M = math.log(safety) + _circle_max(g, z0, R, n_samples, 3)
    ratio = (log_M - log_f0) / math.log(R / r)
    return max(0, int(math.floor(ratio)))
