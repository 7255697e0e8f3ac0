"""Flat cone with deficit angle ``theta``: cut-and-identify chart, geodesics, phase shift.

Intrinsic coordinates are polar ``(r, phi)`` about the apex with
``phi in [0, beta)``, ``beta = 2 pi - theta``.  A chart with wedge orientation
``omega`` draws the cone as the plane with the wedge of opening ``theta``
bisected by direction ``omega`` removed; intrinsic angle ``phi`` sits at chart
angle ``omega + theta/2 + phi``.  Geodesics between two points are straight
chords in the unrolled chart towards the images of the end point rotated by
multiples of ``beta``, restricted to angular separations of at most ``pi``.
"""
from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field

import numpy as np

from .errors import ContractError, DomainError, RegimeError, SingularityError

ANGLE_SLACK = 1e-12


@dataclass(frozen=True)
class ConeGeometry:
    deficit: float = 0.0
    G: float = 1.0
    apex: tuple = (0.0, 0.0)
    orientation: float = 0.0

    def __post_init__(self):
        if not 0 <= self.deficit < 2 * np.pi:
            raise ContractError(f"deficit angle must lie in [0, 2 pi), got {self.deficit}")
        if not self.G > 0:
            raise ContractError("G must be positive")
        object.__setattr__(self, "apex", tuple(float(a) for a in self.apex))
        object.__setattr__(self, "orientation", float(self.orientation) % (2 * np.pi))

    @classmethod
    def from_mass(cls, mu: float, G: float = 1.0, **kwargs) -> "ConeGeometry":
        """``theta = 8 pi G mu``."""
        return cls(8 * np.pi * G * mu, G, **kwargs)

    @property
    def mass_per_length(self) -> float:
        return self.deficit / (8 * np.pi * self.G)

    @property
    def total_angle(self) -> float:
        return 2 * np.pi - self.deficit

    def rotated(self, orientation: float) -> "ConeGeometry":
        return ConeGeometry(self.deficit, self.G, self.apex, orientation)

    # chart <-> intrinsic

    def to_intrinsic(self, point) -> tuple:
        p = np.asarray(point, dtype=float) - np.asarray(self.apex)
        r = float(np.hypot(*p))
        if r < 1e-14:
            raise SingularityError("point coincides with the apex")
        edge = self.orientation + 0.5 * self.deficit
        phi = (np.arctan2(p[1], p[0]) - edge) % (2 * np.pi)
        if phi >= self.total_angle + ANGLE_SLACK:
            raise DomainError("point lies inside the removed wedge")
        return r, float(min(phi, self.total_angle))

    def to_chart(self, r: float, phi: float) -> np.ndarray:
        """Chart position of intrinsic ``(r, phi)``; ``phi`` outside ``[0, beta)`` gives the unrolled image."""
        ang = self.orientation + 0.5 * self.deficit + phi
        return np.asarray(self.apex) + r * np.array([np.cos(ang), np.sin(ang)])


@dataclass(frozen=True)
class Geodesic:
    length: float
    side: str
    polyline: np.ndarray = field(repr=False)
    sweep: float = 0.0


@dataclass(frozen=True)
class GeodesicSet:
    geodesics: tuple

    @property
    def lengths(self) -> np.ndarray:
        return np.array([g.length for g in self.geodesics])

    def __len__(self):
        return len(self.geodesics)

    def to_csv(self) -> str:
        """Polylines as ``geodesic_id,vertex_index,x,y`` rows (unrolled chart)."""
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["geodesic_id", "vertex_index", "x", "y"])
        for gid, g in enumerate(self.geodesics):
            for vid, (x, y) in enumerate(g.polyline):
                w.writerow([gid, vid, format(x, ".17g"), format(y, ".17g")])
        return buf.getvalue()


def _chord(r1, r2, delta):
    return float(np.sqrt(max(r1 * r1 + r2 * r2 - 2 * r1 * r2 * np.cos(delta), 0.0)))


def geodesics_between(cone: ConeGeometry, A, B, cap_radius: float | None = None) -> GeodesicSet:
    """All apex-free geodesics from chart point ``A`` to chart point ``B``, shortest first.

    Sides: ``left`` when the apex is on the left of the direction of travel
    (counter-clockwise sweep), ``right`` otherwise, ``apex`` for a chord that
    grazes the apex (sweep of exactly ``pi``).  ``cap_radius`` adds the
    length-only estimate of a path over a smoothed cap when no grazing chord
    exists.
    """
    rA, pA = cone.to_intrinsic(A)
    rB, pB = cone.to_intrinsic(B)
    beta = cone.total_angle
    found = []
    kmax = int(np.ceil(np.pi / beta)) + 1
    start = cone.to_chart(rA, pA)
    for k in range(-kmax, kmax + 1):
        delta = pB - pA + k * beta
        if abs(delta) > np.pi + ANGLE_SLACK:
            continue
        if cone.deficit == 0 and found:
            break  # all images coincide on the plane
        if abs(abs(delta) - np.pi) <= ANGLE_SLACK:
            side, length = "apex", rA + rB
        else:
            side, length = ("left" if delta > 0 else "right"), _chord(rA, rB, delta)
        poly = np.array([start, cone.to_chart(rB, pA + delta)])
        found.append(Geodesic(length, side, poly, float(delta)))
    if cap_radius is not None and not any(g.side == "apex" for g in found):
        if cap_radius <= 0:
            raise ContractError("cap radius must be positive")
        poly = np.array([start, np.asarray(cone.apex), cone.to_chart(rB, pB)])
        found.append(Geodesic(rA + rB, "through-cap", poly, float("nan")))
    found.sort(key=lambda g: g.length)
    return GeodesicSet(tuple(found))


def wedge_invariance_defect(cone: ConeGeometry, A, B, orientations) -> float:
    """Largest change of any geodesic length when the same points are re-charted with other wedge orientations.

    ``A`` and ``B`` are chart points for ``cone.orientation``.
    """
    rA, pA = cone.to_intrinsic(A)
    rB, pB = cone.to_intrinsic(B)
    ref = geodesics_between(cone, A, B).lengths
    worst = 0.0
    for omega in orientations:
        other = cone.rotated(omega)
        lengths = geodesics_between(other, other.to_chart(rA, pA), other.to_chart(rB, pB)).lengths
        if lengths.shape != ref.shape:
            return float("inf")
        worst = max(worst, float(np.max(np.abs(lengths - ref), initial=0.0)))
    return worst


def focus_point(cone: ConeGeometry, l1: float, l2: float):
    """Meeting point ``I`` and distances ``(d1, d2) = (AI, BI)``.

    ``A`` and ``B`` sit at distances ``l1`` and ``l2`` on either side of the
    apex on a geodesic through it and move perpendicular to it, towards the
    side of opening ``pi - theta``.  Returns chart points ``(A, B, I)`` and the
    two path lengths.
    """
    theta = cone.deficit
    if theta == 0:
        raise RegimeError("no focusing without a deficit angle")
    if theta >= np.pi:
        raise RegimeError("deficit angle too large for a focusing pair")
    if l1 <= 0 or l2 <= 0:
        raise ContractError("distances to the apex must be positive")
    # unrolled sector of opening pi - theta starting at intrinsic angle phiB
    phiB = 0.5 * (cone.total_angle - (np.pi - theta))
    phiA = phiB + np.pi - theta
    B = cone.to_chart(l2, phiB)
    A = cone.to_chart(l1, phiA)
    base = cone.orientation + 0.5 * theta
    uB = np.array([np.cos(base + phiB + np.pi / 2), np.sin(base + phiB + np.pi / 2)])
    uA = np.array([np.cos(base + phiA - np.pi / 2), np.sin(base + phiA - np.pi / 2)])
    M = np.column_stack([uA, -uB])
    d1, d2 = np.linalg.solve(M, B - A)
    I = A + d1 * uA
    return A, B, I, float(d1), float(d2)


def string_phase_shift(cone: ConeGeometry, p0: float, l1: float, l2: float) -> float:
    """``Delta phi = p0 (d1 - d2)`` with exact focusing distances; 0 for ``theta = 0``."""
    if cone.deficit == 0:
        return 0.0
    _, _, _, d1, d2 = focus_point(cone, l1, l2)
    return float(p0 * (d1 - d2))


def small_angle_phase_shift(cone: ConeGeometry, p0: float, l1: float, l2: float) -> float:
    """Leading small-``theta`` law ``4 pi G mu p0 (l2 - l1)``."""
    return float(4 * np.pi * cone.G * cone.mass_per_length * p0 * (l2 - l1))


def transport_holonomy(cone: ConeGeometry, loop_points) -> tuple:
    """Rotation picked up by a vector carried around a closed polygon of chart points.

    Each edge is the straight chord in the unrolled chart with angular sweep
    below ``pi``.  Returns ``(winding, angle, rotation_matrix)`` with
    ``angle = winding * theta`` reduced to ``(-pi, pi]``.
    """
    pts = [cone.to_intrinsic(p) for p in loop_points]
    if len(pts) < 3:
        raise ContractError("a loop needs at least three vertices")
    beta = cone.total_angle
    total = 0.0
    for (r1, p1), (r2, p2) in zip(pts, pts[1:] + pts[:1]):
        d = (p2 - p1 + 0.5 * beta) % beta - 0.5 * beta
        if abs(d) >= np.pi - 1e-9:
            raise SingularityError("loop edge passes through the apex")
        total += d
    winding = int(np.round(total / beta))
    angle = (winding * cone.deficit + np.pi) % (2 * np.pi) - np.pi
    c, s = np.cos(angle), np.sin(angle)
    return winding, float(angle), np.array([[c, -s], [s, c]])
