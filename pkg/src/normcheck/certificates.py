"""Plain-text certificate files and their independent re-verification.

Layout: ``key=value`` metadata lines, then one ``[kernel i]`` section per
kernel in graphon text format. Lines starting with ``#`` before the first
section are comments. Floats are written with ``repr`` so they round-trip.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Union

from .analyzer import VIOLATION_TOL, HolderCertificate, LemmaCertificate
from .density import (
    EdgeAssignment,
    brute_force_density,
    brute_force_multilinear,
    density,
    multilinear_density,
)
from .graphon import GraphonFormatError, StepGraphon, format_graphon, parse_graphon
from .graphs import GraphFormatError, delete_edge, parse_graph6, to_graph6

VERIFY_TOL = 1e-8
ORACLE_FEASIBLE = 10**6

Certificate = Union[LemmaCertificate, HolderCertificate]


class CertificateFormatError(ValueError):
    pass


def dumps(cert: Certificate) -> str:
    if isinstance(cert, LemmaCertificate):
        meta = {
            "kind": "lemma",
            "graph6": to_graph6(cert.graph),
            "edge_lo": cert.edge_lo,
            "edge_hi": cert.edge_hi,
            "t_lo": repr(cert.t_lo),
            "t_hi": repr(cert.t_hi),
            "gap": repr(cert.gap),
        }
        kernels = [cert.kernel]
    else:
        a = cert.assignment
        meta = {
            "kind": "holder",
            "graph6": to_graph6(a.graph),
            "k": a.graph.k,
            "lhs": repr(cert.lhs),
            "rhs": repr(cert.rhs),
            "violation": repr(cert.violation),
        }
        kernels = list(a.kernels)
    lines = ["# normcheck certificate; edge indices are 0-based in graph6 row-major order"]
    lines += [f"{k}={v}" for k, v in meta.items()]
    for i, h in enumerate(kernels):
        lines.append(f"[kernel {i}]")
        lines.append(format_graphon(h).rstrip("\n"))
    return "\n".join(lines) + "\n"


@dataclass
class ParsedCertificate:
    meta: dict[str, str]
    kernels: list[StepGraphon] = field(default_factory=list)


def loads(text: str) -> ParsedCertificate:
    meta: dict[str, str] = {}
    sections: list[list[str]] = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if line.startswith("[kernel"):
            sections.append([])
        elif sections:
            sections[-1].append(raw)
        elif not line or line.startswith("#"):
            continue
        elif "=" in line:
            key, value = line.split("=", 1)
            meta[key.strip()] = value.strip()
        else:
            raise CertificateFormatError(f"line {lineno}: expected key=value, got {line!r}")
    if meta.get("kind") not in ("lemma", "holder"):
        raise CertificateFormatError("missing or unknown 'kind'")
    if "graph6" not in meta:
        raise CertificateFormatError("missing 'graph6'")
    try:
        kernels = [parse_graphon("\n".join(sec)) for sec in sections]
    except GraphonFormatError as exc:
        raise CertificateFormatError(f"bad kernel: {exc}") from None
    if not kernels:
        raise CertificateFormatError("no kernel sections")
    return ParsedCertificate(meta, kernels)


@dataclass
class VerifyResult:
    ok: bool
    kind: str
    method: str
    messages: list[str] = field(default_factory=list)
    values: dict[str, float] = field(default_factory=dict)


def _close(claimed: float, actual: float) -> bool:
    return abs(claimed - actual) <= VERIFY_TOL * max(1.0, abs(actual))


def _float(meta: dict[str, str], key: str) -> float:
    try:
        return float(meta[key])
    except KeyError:
        raise CertificateFormatError(f"missing {key!r}") from None
    except ValueError:
        raise CertificateFormatError(f"{key!r} is not a number") from None


def _int(meta: dict[str, str], key: str) -> int:
    try:
        return int(meta[key])
    except KeyError:
        raise CertificateFormatError(f"missing {key!r}") from None
    except ValueError:
        raise CertificateFormatError(f"{key!r} is not an integer") from None


def verify(text: str, force_oracle: bool = False) -> VerifyResult:
    """Recompute every claimed quantity from scratch.

    Brute-force enumeration is used when q^n is small (always, with
    ``force_oracle``); contraction otherwise.
    """
    cert = loads(text)
    try:
        g = parse_graph6(cert.meta["graph6"])
    except GraphFormatError as exc:
        raise CertificateFormatError(f"bad graph6: {exc}") from None
    if cert.meta["kind"] == "holder" and len(cert.kernels) == g.k and g.k:
        q = EdgeAssignment(g, tuple(cert.kernels)).weights.size
    else:
        q = cert.kernels[0].q
    # lemma values are densities of G - e, which has the same vertex set
    use_oracle = force_oracle or q**g.n <= ORACLE_FEASIBLE

    def single(graph, h):
        if use_oracle:
            return brute_force_density(graph, h).value
        return density(graph, h).value

    def multi(a):
        return brute_force_multilinear(a).value if use_oracle else multilinear_density(a).value

    method = "oracle" if use_oracle else "contraction"
    kind = cert.meta["kind"]
    res = VerifyResult(True, kind, method)

    def require(cond: bool, msg: str):
        if not cond:
            res.ok = False
            res.messages.append(msg)

    if kind == "holder":
        k = _int(cert.meta, "k")
        require(k == g.k == len(cert.kernels), f"kernel count {len(cert.kernels)} != edge count {g.k}")
        if not res.ok:
            return res
        for i, h in enumerate(cert.kernels):
            require(h.is_nonnegative(), f"kernel {i} has negative values")
        a = EdgeAssignment(g, tuple(cert.kernels))
        lhs = multi(a) ** g.k
        rhs = math.prod(single(g, h) for h in cert.kernels)
        res.values.update(lhs=lhs, rhs=rhs, violation=lhs - rhs)
        require(_close(_float(cert.meta, "lhs"), lhs), f"lhs mismatch: claimed {cert.meta['lhs']}, got {lhs!r}")
        require(_close(_float(cert.meta, "rhs"), rhs), f"rhs mismatch: claimed {cert.meta['rhs']}, got {rhs!r}")
        require(
            _close(_float(cert.meta, "violation"), lhs - rhs),
            f"violation mismatch: claimed {cert.meta['violation']}, got {lhs - rhs!r}",
        )
        require(lhs - rhs > VIOLATION_TOL, f"violation {lhs - rhs!r} not above {VIOLATION_TOL}")
    else:
        h = cert.kernels[0]
        require(h.is_nonnegative(), "kernel has negative values")
        lo, hi = _int(cert.meta, "edge_lo"), _int(cert.meta, "edge_hi")
        require(0 <= lo < g.k and 0 <= hi < g.k and lo != hi, "edge indices out of range")
        if not res.ok:
            return res
        t_lo = single(delete_edge(g, lo), h)
        t_hi = single(delete_edge(g, hi), h)
        res.values.update(t_lo=t_lo, t_hi=t_hi, gap=t_hi - t_lo)
        require(_close(_float(cert.meta, "t_lo"), t_lo), f"t_lo mismatch: claimed {cert.meta['t_lo']}, got {t_lo!r}")
        require(_close(_float(cert.meta, "t_hi"), t_hi), f"t_hi mismatch: claimed {cert.meta['t_hi']}, got {t_hi!r}")
        require(
            _close(_float(cert.meta, "gap"), t_hi - t_lo),
            f"gap mismatch: claimed {cert.meta['gap']}, got {t_hi - t_lo!r}",
        )
        require(t_hi - t_lo > VIOLATION_TOL, f"gap {t_hi - t_lo!r} not above {VIOLATION_TOL}")
    return res
