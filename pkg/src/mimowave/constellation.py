"""Discrete phase alphabet, similarity-restricted point sets, and their convex hulls.

Each waveform entry lives on a circle of radius 1/sqrt(N_T*N) in the complex
plane. The alphabet is the set of ``order`` equally spaced points on that
circle; the similarity set around a reference entry keeps the ``span + 1``
alphabet points whose phase lies within half the similarity arc on either
side of the reference. The convex hull of those points is a polygon whose
edges admit a closed-form half-plane description: the outward normal of every
chord of a circle centred at the origin is the chord's midpoint.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np

#: slack used when testing half-plane feasibility
FEASIBILITY_SLACK = 1e-10


@dataclass(frozen=True)
class Constellation:
    """Global discrete phase alphabet: ``order`` points on the modulus circle."""

    order: int
    modulus: float

    def __post_init__(self):
        if self.order < 2:
            raise ValueError("alphabet order must be >= 2")
        if self.modulus <= 0:
            raise ValueError("modulus must be positive")

    @property
    def step(self) -> float:
        """Phase spacing between adjacent alphabet points."""
        return 2.0 * np.pi / self.order

    @property
    def points(self) -> np.ndarray:
        rho = np.arange(1, self.order + 1)
        return np.exp(1j * rho * self.step) * self.modulus


def build_alphabet(order: int, n_tx: int, n_samples: int) -> Constellation:
    return Constellation(order=order, modulus=1.0 / np.sqrt(n_tx * n_samples))


def quantize_entry(value: complex, c: Constellation) -> complex:
    """Nearest alphabet point to ``value`` (Euclidean; ties go to smaller index)."""
    pts = c.points
    d = np.abs(pts - value)
    return complex(pts[int(np.argmin(d))])


def quantize_reference(s0, c: Constellation):
    """Map every entry of a constant-modulus waveform onto the alphabet grid."""
    from .model import Waveform

    entries = np.array([quantize_entry(z, c) for z in s0.entries])
    return Waveform(entries, modulus=c.modulus, constant_modulus=True)


@dataclass(frozen=True)
class SimilaritySet:
    """The span+1 alphabet points allowed for one waveform dimension.

    ``base_angle`` is the phase of the first (lowest-angle) allowed point;
    the points march counter-clockwise in alphabet steps, the middle one
    coinciding with the reference entry.
    """

    dimension_index: int
    span: int                 # even number of steps covered by the arc
    base_angle: float
    step: float
    modulus: float

    def __post_init__(self):
        if self.span < 2 or self.span % 2 != 0:
            raise ValueError("span must be a positive even integer >= 2")

    @property
    def arc(self) -> float:
        """Total phase arc covered by the allowed points."""
        return self.span * self.step

    @property
    def tolerance(self) -> float:
        """Worst-case Euclidean distance to the reference over the allowed points."""
        return float(np.sqrt(2.0 * (1.0 - np.cos(self.arc / 2.0))))

    @property
    def points(self) -> np.ndarray:
        mu = np.arange(self.span + 1)
        return np.exp(1j * (self.base_angle + mu * self.step)) * self.modulus

    @property
    def reference(self) -> complex:
        return complex(np.exp(1j * (self.base_angle + self.arc / 2.0)) * self.modulus)


def build_similarity_set(q0_entry: complex, k: int, span: int, c: Constellation) -> SimilaritySet:
    """Similarity set of ``span + 1`` alphabet points centred on a reference entry."""
    if span % 2 != 0 or span < 2:
        raise ValueError("span must be a positive even integer >= 2")
    if span > c.order:
        raise ValueError(f"span {span} exceeds alphabet order {c.order}")
    if abs(abs(q0_entry) - c.modulus) > 1e-9:
        raise ValueError("reference entry must lie on the modulus circle")
    base = float(np.angle(q0_entry)) - span * c.step / 2.0
    return SimilaritySet(dimension_index=k, span=span, base_angle=base,
                         step=c.step, modulus=c.modulus)


@dataclass(frozen=True)
class HalfPlane:
    """One hull edge: f(s) = Re(normal^* (s - anchor)), feasible when
    sign * f(s) <= 0. For non-degenerate edges normal == anchor == the chord
    midpoint; for a diameter chord the midpoint vanishes and a unit normal
    pointing away from the polygon interior is used instead.
    """

    anchor: complex
    normal: complex
    sign: float  # +1 encodes f <= 0, -1 encodes f >= 0

    def value(self, s: complex) -> float:
        return float(np.real(np.conj(self.normal) * (s - self.anchor)))

    def satisfied(self, s: complex, slack: float = FEASIBILITY_SLACK) -> bool:
        return self.sign * self.value(s) <= slack


@dataclass(frozen=True)
class HullRegion:
    """Convex hull of a similarity set as vertices plus half-plane constraints."""

    vertices: np.ndarray
    half_planes: tuple[HalfPlane, ...]
    wide_arc: bool  # True when the similarity arc reaches at least pi

    @cached_property
    def _signed_normals(self) -> np.ndarray:
        return np.array([hp.sign * hp.normal for hp in self.half_planes])

    @cached_property
    def _signed_offsets(self) -> np.ndarray:
        return np.array([
            hp.sign * np.real(np.conj(hp.normal) * hp.anchor) for hp in self.half_planes
        ])

    @cached_property
    def _edges(self) -> tuple[np.ndarray, np.ndarray]:
        loop = self.vertices
        if abs(loop[0] - loop[-1]) >= 1e-12:
            loop = np.concatenate([loop, loop[:1]])
        a, b = loop[:-1], loop[1:]
        keep = np.abs(b - a) >= 1e-12
        return a[keep], b[keep]

    def contains(self, s: complex, slack: float = FEASIBILITY_SLACK) -> bool:
        vals = (self._signed_normals.real * s.real
                + self._signed_normals.imag * s.imag) - self._signed_offsets
        return bool(np.all(vals <= slack))


def build_hull(ss: SimilaritySet) -> HullRegion:
    """Half-plane description of the similarity polygon.

    The span ordinary edges always carry f <= 0. The closing edge (last
    vertex back to the first) flips orientation once the arc reaches pi,
    because the origin then moves to the feasible side of that chord. When
    the arc is the full circle the closing edge is zero length and dropped.
    """
    pts = ss.points
    if len(pts) < 3:
        raise ValueError("hull needs at least 3 vertices")
    planes: list[HalfPlane] = []
    for mu in range(len(pts) - 1):
        m = 0.5 * (pts[mu] + pts[mu + 1])
        planes.append(HalfPlane(anchor=complex(m), normal=complex(m), sign=+1.0))

    wide = ss.arc >= np.pi - 1e-12
    closing = 0.5 * (pts[-1] + pts[0])
    chord = pts[0] - pts[-1]
    if abs(chord) < 1e-12:
        # full-circle arc: closing edge degenerates to a point, polygon closed
        pass
    elif abs(closing) < 1e-12:
        # diameter chord: midpoint is the origin, so take the unit normal to
        # the chord oriented away from the reference point
        n = 1j * chord / abs(chord)
        if np.real(np.conj(n) * ss.reference) > 0:
            n = -n
        planes.append(HalfPlane(anchor=complex(closing), normal=complex(n), sign=+1.0))
    else:
        sign = +1.0 if wide else -1.0
        planes.append(HalfPlane(anchor=complex(closing), normal=complex(closing), sign=sign))
    return HullRegion(vertices=pts, half_planes=tuple(planes), wide_arc=wide)


def hull_contains(point: complex, h: HullRegion, slack: float = FEASIBILITY_SLACK) -> bool:
    return h.contains(point, slack)


def project_onto_hull(point: complex, h: HullRegion) -> complex:
    """Euclidean projection onto the polygon: interior points are fixed,
    exterior points map to the nearest edge foot or vertex."""
    if h.contains(point):
        return complex(point)
    a, b = h._edges
    e = b - a
    w = point - a
    t = np.clip((e.real * w.real + e.imag * w.imag) / np.abs(e) ** 2, 0.0, 1.0)
    feet = a + t * e
    return complex(feet[int(np.argmin(np.abs(point - feet)))])


def quantize_nearest(value: complex, ss: SimilaritySet) -> complex:
    """Nearest similarity-set point to ``value``; ties go to the smaller index."""
    pts = ss.points
    d = np.abs(pts - value)
    return complex(pts[int(np.argmin(d))])
