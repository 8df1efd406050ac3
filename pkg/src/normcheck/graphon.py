"""Step graphons: block-constant symmetric kernels on [0,1]^2."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

WEIGHT_TOL = 1e-12
CUT_MERGE_TOL = 1e-12
FILE_SYMMETRY_TOL = 1e-9


class GraphonFormatError(ValueError):
    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


def _frozen(a) -> np.ndarray:
    arr = np.array(a, dtype=float)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class StepGraphon:
    """Kernel equal to ``values[a, b]`` on block ``a`` x block ``b``.

    Blocks are consecutive intervals of [0,1] with lengths ``weights``.
    """

    weights: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        w = _frozen(self.weights).reshape(-1)
        v = _frozen(self.values)
        q = w.size
        if q == 0:
            raise ValueError("at least one block required")
        if v.shape != (q, q):
            raise ValueError(f"values must be {q}x{q}, got {v.shape}")
        if np.any(w <= 0) or not np.all(np.isfinite(w)):
            raise ValueError("block weights must be positive and finite")
        if abs(math.fsum(w) - 1.0) > WEIGHT_TOL:
            raise ValueError(f"block weights sum to {math.fsum(w)!r}, not 1")
        if not np.all(np.isfinite(v)):
            raise ValueError("kernel values must be finite")
        if not np.array_equal(v, v.T):
            raise ValueError("kernel values must be symmetric")
        object.__setattr__(self, "weights", w)
        object.__setattr__(self, "values", v)

    @property
    def q(self) -> int:
        return self.weights.size

    def is_nonnegative(self) -> bool:
        return bool(np.all(self.values >= 0))

    def cuts(self) -> np.ndarray:
        """Interior cut points of the partition."""
        return np.cumsum(self.weights)[:-1]

    def same_function(self, other: "StepGraphon", tol: float = 0.0) -> bool:
        a, b = common_refinement([self, other])
        return bool(np.all(np.abs(a.values - b.values) <= tol))


@dataclass(frozen=True)
class SeparationCertificate:
    delta: float


def constant_graphon(c: float) -> StepGraphon:
    if not math.isfinite(c):
        raise ValueError("constant must be finite")
    return StepGraphon(np.ones(1), np.full((1, 1), float(c)))


ONE = constant_graphon(1.0)
ZERO = constant_graphon(0.0)


def shift(h: StepGraphon, eps: float) -> StepGraphon:
    """``h + eps * 1``."""
    return StepGraphon(h.weights, h.values + eps)


def scale(h: StepGraphon, c: float) -> StepGraphon:
    return StepGraphon(h.weights, h.values * c)


def separation_from_zero(h: StepGraphon) -> Optional[SeparationCertificate]:
    m = float(h.values.min())
    return SeparationCertificate(m) if m > 0 else None


def pointwise_abs(h: StepGraphon) -> StepGraphon:
    return StepGraphon(h.weights, np.abs(h.values))


def common_refinement(hs: Sequence[StepGraphon]) -> list[StepGraphon]:
    """Re-express every kernel on the union of all cut points."""
    if not hs:
        raise ValueError("need at least one graphon")
    first = hs[0].weights
    if all(h.q == first.size and np.array_equal(h.weights, first) for h in hs):
        return list(hs)
    cuts = sorted(c for h in hs for c in h.cuts())
    merged: list[float] = []
    for c in cuts:
        if c <= CUT_MERGE_TOL or c >= 1 - CUT_MERGE_TOL:
            continue
        if merged and c - merged[-1] <= CUT_MERGE_TOL:
            continue
        merged.append(c)
    bounds = np.array([0.0] + merged + [1.0])
    weights = np.diff(bounds)
    weights = weights / math.fsum(weights)
    mids = (bounds[:-1] + bounds[1:]) / 2
    out = []
    for h in hs:
        # block of each refined cell: midpoints avoid ambiguity at merged cuts
        idx = np.searchsorted(np.cumsum(h.weights)[:-1], mids, side="right")
        out.append(StepGraphon(weights, h.values[np.ix_(idx, idx)]))
    return out


def l1_distance(h1: StepGraphon, h2: StepGraphon) -> float:
    a, b = common_refinement([h1, h2])
    w = a.weights
    return math.fsum((np.outer(w, w) * np.abs(a.values - b.values)).ravel())


def random_graphon(q: int, lo: float, hi: float, seed: int) -> StepGraphon:
    """Equal blocks, symmetric values iid uniform on [lo, hi]."""
    if q < 1:
        raise ValueError("block count must be positive")
    if not lo <= hi:
        raise ValueError(f"invalid range [{lo}, {hi}]")
    rng = np.random.default_rng(seed)
    return _random_from(rng, q, lo, hi)


def _random_from(rng: np.random.Generator, q: int, lo: float, hi: float) -> StepGraphon:
    upper = np.triu(rng.uniform(lo, hi, size=(q, q)))
    vals = upper + np.triu(upper, 1).T
    return StepGraphon(np.full(q, 1.0 / q), vals)


# -- text format ----------------------------------------------------------


def parse_graphon(text: str) -> StepGraphon:
    """Parse ``q`` / weights / ``q`` value rows; '#' comments.

    Asymmetry up to 1e-9 is tolerated and averaged away.
    """
    rows: list[tuple[int, list[str]]] = []
    for lineno, line in enumerate(text.splitlines(), 1):
        body = line.split("#", 1)[0].split()
        if body:
            rows.append((lineno, body))
    if not rows:
        raise GraphonFormatError("empty graphon file")
    lineno, head = rows[0]
    if len(head) != 1:
        raise GraphonFormatError("first line must hold the block count", lineno)
    try:
        q = int(head[0])
    except ValueError:
        raise GraphonFormatError(f"bad block count {head[0]!r}", lineno) from None
    if q < 1:
        raise GraphonFormatError("block count must be positive", lineno)
    if len(rows) != q + 2:
        raise GraphonFormatError(f"expected {q + 2} data lines, found {len(rows)}", rows[-1][0])

    def numbers(lineno, toks):
        if len(toks) != q:
            raise GraphonFormatError(f"expected {q} numbers, found {len(toks)}", lineno)
        try:
            return [float(t) for t in toks]
        except ValueError as exc:
            raise GraphonFormatError(str(exc), lineno) from None

    weights = np.array(numbers(*rows[1]))
    values = np.array([numbers(ln, toks) for ln, toks in rows[2:]])
    if not np.all(np.isfinite(values)):
        raise GraphonFormatError("non-finite kernel value")
    if np.any(np.abs(values - values.T) > FILE_SYMMETRY_TOL):
        raise GraphonFormatError("value matrix is not symmetric")
    values = (values + values.T) / 2
    try:
        return StepGraphon(weights, values)
    except ValueError as exc:
        raise GraphonFormatError(str(exc)) from None


def format_graphon(h: StepGraphon) -> str:
    lines = [str(h.q), " ".join(repr(float(w)) for w in h.weights)]
    lines += [" ".join(repr(float(x)) for x in row) for row in h.values]
    return "\n".join(lines) + "\n"
