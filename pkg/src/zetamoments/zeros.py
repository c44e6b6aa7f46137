"""Zero ordinates 0 < gamma <= T: computation, import, and on-disk cache.

``find_zeros`` scans Hardy's Z for sign changes on a grid tied to the
local zero density, refines each bracket by bisection plus Newton, and
verifies the count against the Riemann-von Mangoldt estimate, rescanning
suspicious gaps at halved spacing when zeros appear to be missing.

All zeros are treated as simple (every known zero is); ordinates where
|Z'(gamma)| < SIMPLICITY_FLOOR are loudly flagged with a warning, never
dropped.

The import format is a plain text file of ascending decimal ordinates,
one or more per line, which is how published zero tables are usually
distributed.  The cache is CSV ``index,gamma`` with a JSON sidecar
carrying count, height and a content checksum.
"""

import hashlib
import json
import math
import os
import tempfile
import warnings
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import CacheInvalidError, EvaluationRangeError, MissedZerosError, ZeroImportError
from .parallel import deterministic_map, resolve_threads
from .zeta import TWO_PI, hardy_z, hardy_z_prime, theta

#: Default |Z(gamma)| tolerance for refined zeros.
REFINE_TOLERANCE = 1.0e-9

#: |Z'(gamma)| below this is flagged as a possible multiple zero.
SIMPLICITY_FLOOR = 1.0e-6

#: Count-band constant: |count - rvm| must stay within 2 + C log T, C = 1.
COUNT_BAND_C = 1.0

#: Scan starts below the first zero ordinate (14.13...) with margin.
_SCAN_START = 6.0

_ENV_CACHE_DIR = "ZETAMOMENTS_CACHE_DIR"


@dataclass(frozen=True)
class ZeroSet:
    """Ordered zero ordinates in (0, T] with provenance metadata.

    Attributes:
        T: height of the search window.
        gammas: strictly increasing float64 ordinates.
        provenance: "computed" or "imported".
        refine_tolerance: |Z(gamma)| bound for computed sets (None if imported).
    """

    T: float
    gammas: np.ndarray
    provenance: str
    refine_tolerance: float | None = None

    def __len__(self) -> int:
        return int(self.gammas.size)

    def __iter__(self):
        return iter(self.gammas)


def count_zeros_rvm(T: float) -> float:
    """Riemann-von Mangoldt estimate (T/2pi) log(T/2pi) - T/2pi + 7/8.

    The 7/8 is the standard constant refinement of the O(log T) term.
    Requires T > 2 pi (the log would otherwise go negative).
    """
    if T <= TWO_PI:
        raise EvaluationRangeError(f"count_zeros_rvm requires T > 2*pi, got {T}")
    x = T / TWO_PI
    return x * math.log(x) - x + 0.875


def _count_band(T: float) -> float:
    return 2.0 + COUNT_BAND_C * math.log(T)


def _validate_zero_set(zs: ZeroSet) -> ZeroSet:
    g = zs.gammas
    if g.size:
        if np.any(g <= 0.0) or np.any(g > zs.T):
            raise ZeroImportError(f"ordinates must lie in (0, {zs.T}]")
        if np.any(np.diff(g) <= 0.0):
            bad = int(np.nonzero(np.diff(g) <= 0.0)[0][0])
            raise ZeroImportError(f"ordinates not strictly increasing near entry {bad + 1}")
    if zs.T > TWO_PI:
        expected = count_zeros_rvm(zs.T)
        if abs(g.size - expected) > _count_band(zs.T):
            raise ZeroImportError(
                f"{g.size} zeros up to T={zs.T:g} is outside the Riemann-von Mangoldt "
                f"band {expected:.2f} +/- {_count_band(zs.T):.2f}"
            )
    return zs


# ---------------------------------------------------------------------------
# Direct computation
# ---------------------------------------------------------------------------

def _scan_block(args) -> np.ndarray:
    """Sign-change brackets of Z on one slice of the global grid.

    The grid is anchored at (origin, step) shared by all blocks, and each
    block includes its right neighbour's first point, so bracket pairs
    cover block boundaries and the scanned floats are identical for any
    blocking.  Returns bracket left endpoints.
    """
    origin, step, i0, i1 = args
    grid = origin + step * np.arange(i0, i1 + 1, dtype=np.float64)
    z = hardy_z(grid)
    flips = np.nonzero(np.sign(z[:-1]) * np.sign(z[1:]) < 0)[0]
    return grid[flips]


def _scan_range(lo: float, hi: float, step: float, threads: int) -> np.ndarray:
    """Bracket left ends for sign changes of Z on [lo, hi] at the given step."""
    n_points = int(math.ceil((hi - lo) / step))
    if n_points < 1:
        return np.empty(0)
    block = 16384
    jobs = [(lo, step, i, min(i + block, n_points)) for i in range(0, n_points, block)]
    return np.concatenate(deterministic_map(_scan_block, jobs, threads))


def _refine_brackets(left: np.ndarray, step: float, tol: float) -> np.ndarray:
    """Bisection then Newton on each bracket [left, left + step], vectorised."""
    a = left.copy()
    b = left + step
    za = hardy_z(a)
    for _ in range(26):
        mid = 0.5 * (a + b)
        zm = hardy_z(mid)
        go_left = np.sign(zm) == np.sign(za)
        a = np.where(go_left, mid, a)
        za = np.where(go_left, zm, za)
        b = np.where(go_left, b, mid)
    x = 0.5 * (a + b)
    h = 1.0e-6
    for _ in range(4):
        zx = hardy_z(x)
        if np.all(np.abs(zx) < tol):
            break
        slope = (hardy_z(x + h) - hardy_z(x - h)) / (2.0 * h)
        slope = np.where(np.abs(slope) < 1.0e-12, 1.0e-12, slope)
        x = np.clip(x - zx / slope, a, b)
    bad = np.abs(hardy_z(x)) >= tol
    for i in np.nonzero(bad)[0]:
        # stubborn bracket: bisect to the float32-width floor
        aa, bb = a[i], b[i]
        zaa = hardy_z(aa)
        for _ in range(30):
            mm = 0.5 * (aa + bb)
            if np.sign(hardy_z(mm)) == np.sign(zaa):
                aa = mm
            else:
                bb = mm
        x[i] = 0.5 * (aa + bb)
    return x


def _normalized_gap(a: float, b: float) -> float:
    """Gap width in units of the local mean zero spacing pi / theta'(t)."""
    return (theta(b) - theta(a)) / math.pi


def find_zeros(T: float, threads=1, refine_tolerance: float = REFINE_TOLERANCE) -> ZeroSet:
    """All zero ordinates in (0, T], located on the critical line.

    Scans Z on a grid of spacing min(0.05, 1/(4 log T)) -- four-fold
    oversampling of the mean gap -- refines each sign change to
    |Z(gamma)| < refine_tolerance, and checks completeness against the
    Riemann-von Mangoldt count.  On a deficit, gaps wider than 1.8 mean
    spacings are rescanned at halved spacing, up to three rounds.

    Raises:
        MissedZerosError: count still short after three rescan rounds.
    """
    if not (10.0 <= T <= 1.0e5):
        raise EvaluationRangeError(f"find_zeros supports 10 <= T <= 1e5, got {T}")
    threads = resolve_threads(threads)
    step = min(0.05, 1.0 / (4.0 * math.log(T)))

    found = _scan_range(_SCAN_START, T, step, threads)
    gammas = _refine_brackets(found, step, refine_tolerance) if found.size else np.empty(0)
    gammas = np.sort(gammas)
    gammas = gammas[(gammas > 0.0) & (gammas <= T)]

    expected = count_zeros_rvm(T)
    fine = step
    for _ in range(3):
        if gammas.size - expected > -1.2:
            break
        fine *= 0.5
        ends = np.concatenate(([_SCAN_START], gammas, [T]))
        extra = []
        for a, b in zip(ends[:-1], ends[1:]):
            if b - a < 4.0 * fine or _normalized_gap(max(a, 1.0), b) < 1.8:
                continue
            lefts = _scan_range(a + 1.0e-9, b - 1.0e-9, fine, 1)
            if lefts.size:
                extra.append(_refine_brackets(lefts, fine, refine_tolerance))
        if extra:
            merged = np.concatenate([gammas] + extra)
            merged = np.sort(merged)
            keep = np.concatenate(([True], np.diff(merged) > 1.0e-8))
            gammas = merged[keep]
    if gammas.size - expected <= -1.2:
        ends = np.concatenate(([_SCAN_START], gammas, [T]))
        widths = [_normalized_gap(max(a, 1.0), b) for a, b in zip(ends[:-1], ends[1:])]
        widest = int(np.argmax(widths))
        raise MissedZerosError(
            f"found {gammas.size} zeros, Riemann-von Mangoldt predicts {expected:.2f}",
            (float(ends[widest]), float(ends[widest + 1])),
        )

    slopes = np.array([abs(hardy_z_prime(g)) for g in gammas])
    weak = np.nonzero(slopes < SIMPLICITY_FLOOR)[0]
    for i in weak:
        warnings.warn(
            f"|Z'({gammas[i]:.9f})| = {slopes[i]:.2e} < {SIMPLICITY_FLOOR:g}: "
            "possible multiple zero, kept and flagged",
            stacklevel=2,
        )
    return _validate_zero_set(ZeroSet(float(T), gammas, "computed", refine_tolerance))


# ---------------------------------------------------------------------------
# Import / export
# ---------------------------------------------------------------------------

def import_zeros(path, T: float) -> ZeroSet:
    """Parse a whitespace-separated ascending ordinate table, truncated at T.

    Raises:
        ZeroImportError: malformed token (with line number), non-monotone
            data, or a count outside the Riemann-von Mangoldt band.
    """
    values = []
    with open(path) as fh:
        for lineno, line in enumerate(fh, start=1):
            for token in line.split():
                try:
                    g = float(token)
                except ValueError:
                    raise ZeroImportError(f"cannot parse ordinate {token!r}", lineno) from None
                if not math.isfinite(g):
                    raise ZeroImportError(f"non-finite ordinate {token!r}", lineno)
                if values and g <= values[-1]:
                    raise ZeroImportError(
                        f"ordinate {g!r} not above predecessor {values[-1]!r}", lineno
                    )
                values.append(g)
    gammas = np.array([g for g in values if 0.0 < g <= T], dtype=np.float64)
    return _validate_zero_set(ZeroSet(float(T), gammas, "imported", None))


def export_zeros(zeros: ZeroSet, path) -> None:
    """Write ordinates one per line, shortest round-trip decimal form."""
    with open(path, "w") as fh:
        for g in zeros.gammas:
            fh.write(repr(float(g)) + "\n")


# ---------------------------------------------------------------------------
# Cache
# ---------------------------------------------------------------------------

def cache_dir(override=None) -> Path:
    """Cache directory: explicit argument, else $ZETAMOMENTS_CACHE_DIR, else ~/.cache."""
    if override is not None:
        return Path(override)
    env = os.environ.get(_ENV_CACHE_DIR)
    if env:
        return Path(env)
    return Path.home() / ".cache" / "zetamoments"


def _cache_paths(T: float, directory: Path) -> tuple[Path, Path]:
    stem = f"zeros_T{T:.6g}"
    return directory / f"{stem}.csv", directory / f"{stem}.meta.json"


def _atomic_write(path: Path, data: str) -> None:
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=path.name, suffix=".tmp")
    try:
        with os.fdopen(fd, "w") as fh:
            fh.write(data)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def cache_store(zeros: ZeroSet, directory=None) -> Path:
    """Write ``index,gamma`` CSV plus a checksum sidecar; returns the CSV path."""
    directory = cache_dir(directory)
    directory.mkdir(parents=True, exist_ok=True)
    csv_path, meta_path = _cache_paths(zeros.T, directory)
    rows = ["index,gamma"]
    rows += [f"{i},{repr(float(g))}" for i, g in enumerate(zeros.gammas, start=1)]
    body = "\n".join(rows) + "\n"
    meta = {
        "schema": 1,
        "T": zeros.T,
        "count": len(zeros),
        "provenance": zeros.provenance,
        "refine_tolerance": zeros.refine_tolerance,
        "sha256": hashlib.sha256(body.encode()).hexdigest(),
    }
    _atomic_write(csv_path, body)
    _atomic_write(meta_path, json.dumps(meta, sort_keys=True, indent=2) + "\n")
    return csv_path


def cache_load(T: float, directory=None) -> ZeroSet:
    """Load cached zeros for height >= T, truncated to (0, T].

    Picks the smallest cached height covering T.  Every validation
    failure raises CacheInvalidError so callers can fall back to a
    recompute.
    """
    directory = cache_dir(directory)
    candidates = []
    for meta_path in sorted(directory.glob("zeros_T*.meta.json")):
        try:
            meta = json.loads(meta_path.read_text())
        except (OSError, json.JSONDecodeError):
            continue
        if isinstance(meta, dict) and meta.get("T", -1.0) >= T:
            candidates.append((float(meta["T"]), meta_path, meta))
    if not candidates:
        raise CacheInvalidError(f"no cached zero set covers T={T:g} in {directory}")
    _, meta_path, meta = min(candidates)
    csv_path = meta_path.with_name(meta_path.name.replace(".meta.json", ".csv"))
    try:
        body = csv_path.read_text()
    except OSError as exc:
        raise CacheInvalidError(f"cannot read {csv_path}: {exc}") from exc
    if hashlib.sha256(body.encode()).hexdigest() != meta.get("sha256"):
        raise CacheInvalidError(f"checksum mismatch for {csv_path}")
    lines = body.splitlines()
    if not lines or lines[0] != "index,gamma":
        raise CacheInvalidError(f"bad header in {csv_path}")
    gammas = []
    for lineno, row in enumerate(lines[1:], start=2):
        parts = row.split(",")
        try:
            idx, g = int(parts[0]), float(parts[1])
        except (ValueError, IndexError):
            raise CacheInvalidError(f"{csv_path} line {lineno}: bad row {row!r}") from None
        if idx != lineno - 1:
            raise CacheInvalidError(f"{csv_path} line {lineno}: index {idx} out of sequence")
        gammas.append(g)
    if len(gammas) != meta.get("count"):
        raise CacheInvalidError(f"{csv_path}: count mismatch with sidecar")
    arr = np.array([g for g in gammas if 0.0 < g <= T], dtype=np.float64)
    zs = ZeroSet(float(T), arr, meta.get("provenance", "computed"),
                 meta.get("refine_tolerance"))
    try:
        return _validate_zero_set(zs)
    except ZeroImportError as exc:
        raise CacheInvalidError(str(exc)) from exc


def load_or_compute(T: float, threads=1, directory=None) -> ZeroSet:
    """Cache hit if valid, else find_zeros + cache_store."""
    try:
        return cache_load(T, directory)
    except CacheInvalidError:
        zeros = find_zeros(T, threads=threads)
        cache_store(zeros, directory)
        return zeros
