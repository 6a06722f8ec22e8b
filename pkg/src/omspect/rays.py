"""Rays (lines through the origin) with canonical integer representatives.

Canonical form: scale the vector so the first nonzero coordinate is positive,
all coordinate parts are integers, and their collective gcd is 1. Proportional
inputs collapse to one representative, including proportionality by irrational
factors like sqrt(m).
"""
from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from math import gcd, lcm

from .linalg import Vector, dot
from .scalars import QuadScalar


class ZeroRayError(ValueError):
    pass


@dataclass(frozen=True)
class Ray:
    entries: Vector

    @property
    def dim(self) -> int:
        return len(self.entries)

    def __str__(self):
        return "(" + ",".join(str(x) for x in self.entries) + ")"


def _as_entry(x, m: int) -> QuadScalar:
    if isinstance(x, QuadScalar):
        return x
    if isinstance(x, tuple):
        return QuadScalar(x[0], x[1], m)
    return QuadScalar(x)


def canonicalize_ray(v, m: int = 0) -> Ray:
    entries = [_as_entry(x, m) for x in v]
    first = next((x for x in entries if x), None)
    if first is None:
        raise ZeroRayError("zero ray")
    unit = [x / first for x in entries]  # first nonzero becomes 1 (positive)
    dens = [f.denominator for x in unit for f in (x.a, x.b)]
    nums = [abs(f.numerator) for x in unit for f in (x.a, x.b) if f.numerator]
    scale = Fraction(lcm(*dens), gcd(*nums))
    return Ray(tuple(x * scale for x in unit))


def orthogonal(r1: Ray, r2: Ray) -> bool:
    return not dot(r1.entries, r2.entries)


_ENTRY_RE = re.compile(r"^(-?\d+)(?:\+(-?\d+)\*r)?$")
_HEADER_RE = re.compile(r"^dim=(\d+)\s+ring=(\d+)$")


def parse_ray_file(text: str):
    """Parse a ray file: header ``dim=<d> ring=<m>``, then one ray per line."""
    lines = [ln.strip() for ln in text.splitlines()]
    lines = [ln for ln in lines if ln and not ln.startswith("#")]
    if not lines:
        raise ValueError("empty ray file")
    header = _HEADER_RE.match(lines[0])
    if not header:
        raise ValueError(f"bad header line {lines[0]!r}, expected 'dim=<d> ring=<m>'")
    d, m = int(header.group(1)), int(header.group(2))
    rays = []
    for ln in lines[1:]:
        parts = ln.split()
        if len(parts) != d:
            raise ValueError(f"ray {ln!r} has {len(parts)} entries, expected {d}")
        entries = []
        for p in parts:
            mt = _ENTRY_RE.match(p)
            if not mt:
                raise ValueError(f"bad ray entry {p!r}, expected 'a' or 'a+b*r'")
            a = int(mt.group(1))
            b = int(mt.group(2)) if mt.group(2) else 0
            if b and m == 0:
                raise ValueError(f"entry {p!r} uses sqrt but ring=0")
            entries.append(QuadScalar(a, b, m))
        rays.append(canonicalize_ray(entries, m))
    return d, m, rays


def format_entry(x: QuadScalar) -> str:
    a = x.a
    if a.denominator != 1 or x.b.denominator != 1:
        raise ValueError("ray files carry integer entries only")
    if x.b == 0:
        return str(a.numerator)
    return f"{a.numerator}+{x.b.numerator}*r"


def format_ray_file(d: int, m: int, rays) -> str:
    out = [f"dim={d} ring={m}"]
    for r in rays:
        out.append(" ".join(format_entry(x) for x in r.entries))
    return "\n".join(out) + "\n"
