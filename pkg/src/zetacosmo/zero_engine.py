"""Zeros and stationary points of Z(t) on the critical line.

Zeros are located by a sign-change scan of Z on a grid seeded with Gram
points, refined by a bracketed Newton iteration, and cross-checked block
by block against the exact zero count N(T) obtained from the argument
principle. Tables are immutable and can be written to / read from the
one-ordinate-per-line text format used by published zero tables.
"""

from __future__ import annotations

import hashlib
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from scipy.special import lambertw

from ._parallel import ordered_map
from .errors import ConfigError, IoError, MissedZeros, OrderViolation, ParseError, SanityError
from .riemann_siegel import DEFAULT_CONFIG, EvalConfig, theta_values, z_values, zeta_values

SOURCES = ("computed", "ingested", "merged")
FIRST_ORDINATE = 14.134725141734693
GRAM_SEED_MIN_T = 18.0
MAX_SCAN_STEP = 0.05
REFINE_TOL = 1e-12
REFINE_MAXIT = 200
ORDINATE_ABS_ERROR = 1e-9
STATIONARY_TOL = 1e-8
SUBDIVIDE = 16
MAX_RESCANS = 3
BLOCK_ZEROS = 200
WRITE_DIGITS = 12


def config_hash(cfg: EvalConfig) -> str:
    return hashlib.sha256(cfg.digest().encode()).hexdigest()[:16]


@dataclass(frozen=True)
class ZeroTable:
    """Sorted positive ordinates of critical-line zeros.

    The table claims completeness on ``(h_min, h_max]``.
    """

    ordinates: np.ndarray
    h_max: float
    source: str = "computed"
    abs_error: float = ORDINATE_ABS_ERROR
    h_min: float = 0.0
    config_hash: str = ""

    def __post_init__(self):
        arr = np.array(self.ordinates, dtype=float)
        arr.setflags(write=False)
        object.__setattr__(self, "ordinates", arr)
        if self.source not in SOURCES:
            raise ConfigError(f"unknown table source {self.source!r}")
        if arr.size:
            if np.any(np.diff(arr) <= 0):
                raise OrderViolation(int(np.argmax(np.diff(arr) <= 0)) + 2)
            if arr[0] <= 14.0:
                raise SanityError(f"ordinate {arr[0]!r} below the first zero")
            if arr[-1] > self.h_max:
                raise SanityError(f"ordinate {arr[-1]!r} exceeds h_max={self.h_max!r}")

    def __len__(self):
        return int(self.ordinates.size)

    def __eq__(self, other):
        if not isinstance(other, ZeroTable):
            return NotImplemented
        return (
            np.array_equal(self.ordinates, other.ordinates)
            and self.h_max == other.h_max
            and self.h_min == other.h_min
            and self.source == other.source
            and self.abs_error == other.abs_error
            and self.config_hash == other.config_hash
        )

    __hash__ = None

    def covers(self, height: float) -> bool:
        return self.h_max >= height

    def upto(self, height: float) -> np.ndarray:
        return self.ordinates[: np.searchsorted(self.ordinates, height, side="right")]

    def nearest(self, t: float) -> tuple[float, float]:
        """Nearest ordinate to |t| (including the mirrored -gamma) and its distance."""
        if not self.ordinates.size:
            return math.nan, math.inf
        a = abs(t)
        i = int(np.searchsorted(self.ordinates, a))
        best = (math.nan, math.inf)
        for j in (i - 1, i):
            if 0 <= j < self.ordinates.size:
                d = abs(a - self.ordinates[j])
                if d < best[1]:
                    best = (float(self.ordinates[j]) * (1 if t >= 0 else -1), d)
        return best


@dataclass(frozen=True)
class CriticalPoint:
    t0: float
    kind: str
    gap: tuple[float, float]
    z_at: float
    dz_at: float = math.nan


@dataclass
class VerifyReport:
    overlap: tuple[float, float]
    count_a: int
    count_b: int
    overlap_count_a: int
    overlap_count_b: int
    max_abs_delta: float
    n_beyond_tol: int
    tol: float
    deltas: np.ndarray = field(repr=False, default_factory=lambda: np.empty(0))

    @property
    def count_mismatch(self) -> int:
        return abs(self.count_a - self.count_b)

    @property
    def overlap_count_mismatch(self) -> int:
        return abs(self.overlap_count_a - self.overlap_count_b)

    @property
    def ok(self) -> bool:
        return self.count_mismatch == 0 and self.overlap_count_mismatch == 0 and self.n_beyond_tol == 0


# ---------------------------------------------------------------------------
# counting
# ---------------------------------------------------------------------------

def counting_estimate(T: float) -> float:
    """theta(T)/pi + 1, the smooth part of the zero-counting function."""
    return float(theta_values(np.array([T]))[0][0]) / math.pi + 1.0


def arg_zeta(T: float, cfg: EvalConfig = DEFAULT_CONFIG, sigma_start: float = 2.5) -> float:
    """arg zeta(1/2+iT) by continuous variation along Im s = T from sigma_start.

    zeta has positive real part for Re s >= 2.5, so the principal value there
    anchors the branch.
    """
    offsets = np.concatenate([np.geomspace(sigma_start - 0.5, 1e-9, 160), [0.0]])
    sig = 0.5 + offsets
    for _ in range(8):
        vals = zeta_values(sig, np.full(sig.shape, float(T)), cfg)
        ang = np.unwrap(np.angle(vals))
        jumps = np.abs(np.diff(ang))
        if jumps.max() < math.pi / 4:
            return float(ang[-1])
        bad = np.nonzero(jumps >= math.pi / 4)[0]
        extra = 0.5 * (sig[bad] + sig[bad + 1])
        sig = np.sort(np.concatenate([sig, extra]))[::-1]
    return float(ang[-1])


def zero_count(T: float, cfg: EvalConfig = DEFAULT_CONFIG) -> int:
    """Number of zeros with 0 < gamma <= T, via N(T) = theta/pi + 1 + S(T).

    T must not coincide with an ordinate.
    """
    if T <= 0:
        return 0
    val = counting_estimate(T) + arg_zeta(T, cfg) / math.pi
    n = int(round(val))
    return max(n, 0)


# ---------------------------------------------------------------------------
# scanning
# ---------------------------------------------------------------------------

def gram_points(t_lo: float, t_hi: float) -> np.ndarray:
    """Gram points g_n, n >= 0 (theta(g_n) = n*pi), inside (t_lo, t_hi]."""
    # theta is increasing beyond t ~ 6.3 and negative at 10, so g_0 > 10
    lo = max(t_lo, 10.0)
    if t_hi <= lo:
        return np.empty(0)
    th = theta_values(np.array([lo, t_hi]))[0]
    n = np.arange(max(math.ceil(th[0] / math.pi), 0), math.floor(th[1] / math.pi) + 1, dtype=float)
    if n.size == 0:
        return n
    x = (n + 0.125) / math.e
    g = 2 * math.pi * (n + 0.125) / np.real(lambertw(x))
    for _ in range(8):
        v, dv, _ = theta_values(g)
        g = g - (v - n * math.pi) / dv
    return g[(g > t_lo) & (g <= t_hi)]


def scan_grid(t_lo: float, t_hi: float, step_scale: float = 1.0) -> np.ndarray:
    """Gram-seeded grid on [t_lo, t_hi] with local step min(half mean gap, 0.05)."""
    knots = np.unique(np.concatenate([[t_lo], gram_points(t_lo, t_hi), [t_hi]]))
    pieces = []
    for a, b in zip(knots[:-1], knots[1:]):
        mid = 0.5 * (a + b)
        mean_gap = 2 * math.pi / math.log(mid / (2 * math.pi)) if mid > 2 * math.pi * math.e else math.inf
        step = min(0.5 * mean_gap, MAX_SCAN_STEP) * step_scale
        m = max(int(math.ceil((b - a) / step)), 1)
        pieces.append(np.linspace(a, b, m + 1)[:-1])
    pieces.append([t_hi])
    return np.concatenate(pieces)


def _scan_cfg(cfg: EvalConfig) -> EvalConfig:
    return EvalConfig(
        target_abs_error=max(cfg.target_abs_error, 1e-7),
        em_terms=cfg.em_terms,
        rs_correction_order=cfg.rs_correction_order,
        fd_step_scale=cfg.fd_step_scale,
        allow_fallback=True,
    )


def _brackets(grid: np.ndarray, cfg: EvalConfig, depth: int = 0) -> list[tuple[float, float]]:
    """Sign-change brackets of Z on ``grid``; cells where |Z| turns without crossing are subdivided."""
    z, dz, _ = z_values(grid, _scan_cfg(cfg))
    sz = np.where(z >= 0, 1, -1)
    change = sz[:-1] != sz[1:]
    out = [(float(a), float(b)) for a, b in zip(grid[:-1][change], grid[1:][change])]
    if depth < MAX_RESCANS:
        turning = (~change) & (z[:-1] * dz[:-1] < 0) & (z[1:] * dz[1:] > 0)
        for i in np.nonzero(turning)[0]:
            sub = np.linspace(grid[i], grid[i + 1], SUBDIVIDE + 1)
            out.extend(_brackets(sub, cfg, depth + 1))
    return sorted(out)


def bracketed_newton(fun, a, b, tol: float = REFINE_TOL, maxit: int = REFINE_MAXIT) -> np.ndarray:
    """Vectorised safeguarded Newton on brackets [a, b] with sign(f(a)) != sign(f(b)).

    ``fun(x)`` returns ``(f, df)`` arrays. Steps leaving the bracket fall back
    to bisection. Stops when the step or bracket width drops below
    ``max(tol, 4 ulp)`` or after ``maxit`` iterations.
    """
    a = np.array(a, dtype=float)
    b = np.array(b, dtype=float)
    fa = fun(a)[0]
    x = 0.5 * (a + b)
    done = np.zeros(a.shape, dtype=bool)
    for _ in range(maxit):
        act = np.nonzero(~done)[0]
        if act.size == 0:
            break
        f, df = fun(x[act])
        same = np.sign(f) == np.sign(fa[act])
        a[act] = np.where(same, x[act], a[act])
        fa[act] = np.where(same, f, fa[act])
        b[act] = np.where(same, b[act], x[act])
        with np.errstate(divide="ignore", invalid="ignore"):
            xn = x[act] - f / df
        lo = np.minimum(a[act], b[act])
        hi = np.maximum(a[act], b[act])
        bad = ~np.isfinite(xn) | (xn <= lo) | (xn >= hi)
        xn = np.where(bad, 0.5 * (lo + hi), xn)
        tol_eff = np.maximum(tol, 4 * np.spacing(np.abs(xn)))
        fin = (np.abs(xn - x[act]) <= tol_eff) | (hi - lo <= tol_eff) | (f == 0)
        x[act] = np.where(f == 0, x[act], xn)
        done[act] = fin
    return x


def _refine_zeros(brackets, cfg: EvalConfig) -> np.ndarray:
    if not brackets:
        return np.empty(0)
    a = np.array([p[0] for p in brackets])
    b = np.array([p[1] for p in brackets])
    za = z_values(a, cfg)[0]
    zb = z_values(b, cfg)[0]
    # the scan runs at a looser tolerance; re-check signs with the accurate path
    for _ in range(4):
        same = np.sign(za) == np.sign(zb)
        if not same.any():
            break
        w = b - a
        a = np.where(same & (np.abs(za) < np.abs(zb)), a - 0.5 * w, a)
        b = np.where(same & (np.abs(za) >= np.abs(zb)), b + 0.5 * w, b)
        za = z_values(a, cfg)[0]
        zb = z_values(b, cfg)[0]

    def fun(x):
        z, dz, _ = z_values(x, cfg)
        return z, dz

    roots = bracketed_newton(fun, a, b)
    return np.unique(roots)


def _scan_block(lo: float, hi: float, cfg: EvalConfig, step_scale: float) -> np.ndarray:
    grid = scan_grid(lo, hi, step_scale)
    roots = _refine_zeros(_brackets(grid, cfg), cfg)
    return roots[(roots > lo) & (roots <= hi)]


def _block_edges(t_lo: float, t_hi: float) -> np.ndarray:
    n_lo = counting_estimate(max(t_lo, 1.0))
    n_hi = counting_estimate(t_hi)
    if t_hi < GRAM_SEED_MIN_T + 1 or n_hi - n_lo < 1.5 * BLOCK_ZEROS:
        return np.array([t_lo, t_hi])
    g = gram_points(t_lo, t_hi)
    edges = g[BLOCK_ZEROS::BLOCK_ZEROS]
    edges = edges[edges < t_hi - 50]
    return np.concatenate([[t_lo], edges, [t_hi]])


def _safe_count_point(T: float, roots: np.ndarray, cfg: EvalConfig) -> tuple[float, int]:
    """A point near T at which N(.) can be evaluated, and the number of roots <= it."""
    i = int(np.searchsorted(roots, T, side="right"))
    near = [roots[j] for j in (i - 1, i) if 0 <= j < roots.size]
    point = T
    if near and min(abs(T - r) for r in near) < 1e-4:
        left = roots[i - 1] if i >= 1 else T - 0.1
        right = roots[i] if i < roots.size else T + 0.1
        point = 0.5 * (left + right) if (right - left) < 0.2 else T + (1e-3 if T - left < 1e-4 else -1e-3)
    return point, int(np.searchsorted(roots, point, side="right"))


def find_zeros(
    t_lo: float,
    t_hi: float,
    cfg: EvalConfig = DEFAULT_CONFIG,
    threads: int | None = 1,
) -> ZeroTable:
    """All zeros of Z in (t_lo, t_hi], refined to ~1e-12 and count-verified.

    Each block of about 200 zeros is checked against the argument-principle
    count; a mismatching block is rescanned with a 16x finer grid, at most
    three times, before :class:`MissedZeros` is raised.
    """
    if not (0 <= t_lo < t_hi):
        raise ConfigError(f"need 0 <= t_lo < t_hi, got ({t_lo!r}, {t_hi!r})")
    if t_hi > 1e5:
        raise ConfigError("heights above 1e5 are outside the supported range")
    scan_lo = max(t_lo, 1.0)
    edges = _block_edges(scan_lo, t_hi)
    blocks = list(zip(edges[:-1], edges[1:]))

    def work(block):
        lo, hi = block
        return _scan_block(lo, hi, cfg, 1.0)

    found = ordered_map(work, blocks, threads)
    roots = np.concatenate(found) if found else np.empty(0)

    # count verification block by block
    checks = [_safe_count_point(e, roots, cfg) for e in edges]
    expected = ordered_map(lambda c: zero_count(c[0], cfg) if c[0] > 14.0 else 0, checks, threads)
    for j, (lo, hi) in enumerate(blocks):
        want = expected[j + 1] - expected[j]
        p_lo, p_hi = checks[j][0], checks[j + 1][0]
        got = int(np.sum((roots > p_lo) & (roots <= p_hi)))
        scale = 1.0
        attempts = 0
        while got != want:
            if attempts == MAX_RESCANS:
                raise MissedZeros((float(lo), float(hi)), found=got, expected=want)
            attempts += 1
            scale /= SUBDIVIDE
            fresh = _scan_block(p_lo, p_hi, cfg, scale)
            keep = (roots <= p_lo) | (roots > p_hi)
            roots = np.sort(np.concatenate([roots[keep], fresh]))
            got = fresh.size
    roots = roots[(roots > t_lo) & (roots <= t_hi)]
    return ZeroTable(
        ordinates=roots,
        h_max=float(t_hi),
        h_min=float(t_lo),
        source="computed",
        abs_error=ORDINATE_ABS_ERROR,
        config_hash=config_hash(cfg),
    )


# ---------------------------------------------------------------------------
# stationary points and gap midpoints
# ---------------------------------------------------------------------------

def find_stationary_points(table: ZeroTable, cfg: EvalConfig = DEFAULT_CONFIG, samples: int = 16) -> list[CriticalPoint]:
    """Every sign change of Z' inside each gap of consecutive ordinates."""
    g = table.ordinates
    if g.size < 2:
        return []
    lo, hi = g[:-1], g[1:]
    frac = np.linspace(0.0, 1.0, samples + 1)
    grid = lo[:, None] + (hi - lo)[:, None] * frac[None, :]
    dz = z_values(grid.ravel(), cfg)[1].reshape(grid.shape)
    sd = np.where(dz >= 0, 1, -1)
    change = sd[:, :-1] != sd[:, 1:]
    gap_idx, cell = np.nonzero(change)
    missing = np.setdiff1d(np.arange(lo.size), gap_idx)
    extra_gaps, extra_a, extra_b = [], [], []
    for i in missing:
        fine = np.linspace(lo[i], hi[i], samples * SUBDIVIDE + 1)
        d = z_values(fine, cfg)[1]
        s = np.where(d >= 0, 1, -1)
        ch = np.nonzero(s[:-1] != s[1:])[0]
        if ch.size == 0:
            raise MissedZeros((float(lo[i]), float(hi[i])))
        extra_gaps.extend([i] * ch.size)
        extra_a.extend(fine[ch])
        extra_b.extend(fine[ch + 1])
    a = np.concatenate([grid[gap_idx, cell], extra_a])
    b = np.concatenate([grid[gap_idx, cell + 1], extra_b])
    owner = np.concatenate([gap_idx, np.array(extra_gaps, dtype=int)])

    def fun(x):
        _, dz_, d2z_ = z_values(x, cfg)
        return dz_, d2z_

    roots = bracketed_newton(fun, a, b)
    order = np.lexsort((roots, owner))
    roots, owner = roots[order], owner[order]
    z, dz_at, _ = z_values(roots, cfg)
    return [
        CriticalPoint(t0=float(r), kind="stationary", gap=(float(lo[i]), float(hi[i])), z_at=float(zz), dz_at=float(d))
        for r, i, zz, d in zip(roots, owner, z, dz_at)
    ]


def gap_midpoints(table: ZeroTable, cfg: EvalConfig = DEFAULT_CONFIG) -> list[CriticalPoint]:
    g = table.ordinates
    if g.size < 2:
        raise ConfigError("gap midpoints need at least two ordinates")
    mids = 0.5 * (g[:-1] + g[1:])
    z, dz, _ = z_values(mids, cfg)
    return [
        CriticalPoint(t0=float(m), kind="gap_midpoint", gap=(float(a), float(b)), z_at=float(zz), dz_at=float(d))
        for m, a, b, zz, d in zip(mids, g[:-1], g[1:], z, dz)
    ]


# ---------------------------------------------------------------------------
# file format
# ---------------------------------------------------------------------------

def parse_ordinates(lines) -> np.ndarray:
    values = []
    lines = list(lines)
    while lines and not lines[-1].strip():
        lines.pop()
    if not lines:
        raise ParseError(1, "empty zero table")
    for num, raw in enumerate(lines, start=1):
        text = raw.strip()
        try:
            v = float(text)
        except ValueError:
            raise ParseError(num, f"cannot parse {text!r}") from None
        if not math.isfinite(v) or v <= 0:
            raise ParseError(num, f"ordinate {text!r} is not a positive finite number")
        if values and v <= values[-1]:
            raise OrderViolation(num)
        values.append(v)
    return np.array(values)


def ingest_zero_table(path, h_max_hint: float | None = None, abs_error: float = 1e-8) -> ZeroTable:
    """Read a published zero table (one ordinate per line, ascending)."""
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise IoError(f"cannot read zero table {path}: {exc}") from exc
    values = parse_ordinates(text.splitlines())
    if abs(values[0] - FIRST_ORDINATE) > 1e-3:
        raise SanityError(f"first ordinate {values[0]!r} is not near {FIRST_ORDINATE:.6f}")
    h_max = float(values[-1]) if h_max_hint is None else float(h_max_hint)
    if h_max < values[-1]:
        raise SanityError(f"h_max hint {h_max!r} is below the last ordinate {values[-1]!r}")
    return ZeroTable(ordinates=values, h_max=h_max, source="ingested", abs_error=abs_error)


def format_ordinate(g: float) -> str:
    return f"{g:.{WRITE_DIGITS}f}"


def write_zero_table(table: ZeroTable, path) -> Path:
    """Write ordinates plus a ``<path>.meta`` key=value sidecar."""
    path = Path(path)
    body = "".join(format_ordinate(g) + "\n" for g in table.ordinates)
    meta = (
        f"h_max={table.h_max!r}\n"
        f"h_min={table.h_min!r}\n"
        f"abs_error={table.abs_error!r}\n"
        f"source={table.source}\n"
        f"config_hash={table.config_hash}\n"
    )
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(body, encoding="utf-8")
        sidecar(path).write_text(meta, encoding="utf-8")
    except OSError as exc:
        raise IoError(f"cannot write zero table {path}: {exc}") from exc
    return path


def sidecar(path) -> Path:
    path = Path(path)
    return path.with_name(path.name + ".meta")


def read_zero_table(path, cfg: EvalConfig | None = None) -> ZeroTable:
    """Read a table written by :func:`write_zero_table`.

    A table whose recorded config hash differs from ``cfg`` is returned with
    ``source="ingested"``.
    """
    path = Path(path)
    try:
        lines = path.read_text(encoding="utf-8").splitlines()
        meta_lines = sidecar(path).read_text(encoding="utf-8").splitlines()
    except OSError as exc:
        raise IoError(f"cannot read cached table {path}: {exc}") from exc
    values = parse_ordinates(lines)
    meta = {}
    for num, line in enumerate(meta_lines, start=1):
        if not line.strip():
            continue
        key, sep, val = line.partition("=")
        if not sep:
            raise ParseError(num, f"bad metadata line {line!r}")
        meta[key.strip()] = val.strip()
    try:
        h_max = float(meta["h_max"])
        h_min = float(meta.get("h_min", "0.0"))
        abs_error = float(meta.get("abs_error", "1e-8"))
    except (KeyError, ValueError) as exc:
        raise ParseError(0, f"bad metadata: {exc}") from None
    source = meta.get("source", "ingested")
    chash = meta.get("config_hash", "")
    if cfg is not None and chash != config_hash(cfg):
        source = "ingested"
    return ZeroTable(ordinates=values, h_max=h_max, h_min=h_min, source=source, abs_error=abs_error, config_hash=chash)


def verify_against(table_a: ZeroTable, table_b: ZeroTable, tol: float) -> VerifyReport:
    """Compare two tables ordinate by ordinate on their common range."""
    lo = max(table_a.h_min, table_b.h_min)
    hi = min(table_a.h_max, table_b.h_max)
    a = table_a.ordinates
    b = table_b.ordinates
    # edges widened by tol so rounding of a table's last ordinate cannot drop it
    oa = a[(a > lo - tol) & (a <= hi + tol)]
    ob = b[(b > lo - tol) & (b <= hi + tol)]
    n = min(oa.size, ob.size)
    deltas = np.abs(oa[:n] - ob[:n])
    return VerifyReport(
        overlap=(float(lo), float(hi)),
        count_a=int(a.size),
        count_b=int(b.size),
        overlap_count_a=int(oa.size),
        overlap_count_b=int(ob.size),
        max_abs_delta=float(deltas.max()) if n else 0.0,
        n_beyond_tol=int(np.sum(deltas > tol)),
        tol=tol,
        deltas=deltas,
    )
