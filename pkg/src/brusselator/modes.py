"""Neumann mode pairs admitted by a rectangle (or interval), with exact arithmetic.

Domain lengths are given as multiples of pi, e.g. ``"2"``, ``"2*sqrt(3)"``,
``"3/2"``. Only ``(L/pi)^2`` is needed to form squared wavenumbers, and it
is rational for every such length, so degeneracy is decided exactly.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, field
from fractions import Fraction

from . import linstab
from .model import NondimParams


class NoAdmissibleMode(RuntimeError):
    pass


_SQRT = re.compile(r"^sqrt\((\d+(?:/\d+)?)\)$")


@dataclass(frozen=True)
class DomainLength:
    """A length ``L = pi * sqrt(ratio2)`` with ``ratio2 = (L/pi)^2`` rational."""

    ratio2: Fraction
    text: str = ""

    @classmethod
    def parse(cls, text: str | int | float | Fraction | "DomainLength") -> "DomainLength":
        if isinstance(text, DomainLength):
            return text
        if isinstance(text, (int, Fraction)):
            return cls(Fraction(text) ** 2, str(text))
        if isinstance(text, float):
            return cls(Fraction(text).limit_denominator(10**6) ** 2, repr(text))
        raw = str(text)
        s = raw.replace(" ", "").replace("π", "").lower()
        s = re.sub(r"\*?pi", "", s)
        if not s:
            return cls(Fraction(1), raw)
        ratio2 = Fraction(1)
        for factor in s.split("*"):
            if not factor:
                continue
            mt = _SQRT.match(factor)
            if mt:
                ratio2 *= Fraction(mt.group(1))
            else:
                try:
                    ratio2 *= Fraction(factor) ** 2
                except ValueError:
                    raise ValueError(f"cannot parse domain length {raw!r}") from None
        if ratio2 <= 0:
            raise ValueError(f"domain length must be positive, got {raw!r}")
        return cls(ratio2, raw)

    @property
    def value(self) -> float:
        return math.pi * math.sqrt(self.ratio2)

    def mode_k2(self, p: int) -> Fraction:
        """``(p pi / L)^2`` as an exact rational."""
        return Fraction(p * p) / self.ratio2


@dataclass(frozen=True)
class ModePair:
    p: int
    q: int
    k2: Fraction
    phi_x2: Fraction
    phi_y2: Fraction

    @property
    def phi_x(self) -> float:
        return math.sqrt(self.phi_x2)

    @property
    def phi_y(self) -> float:
        return math.sqrt(self.phi_y2)

    @property
    def index(self) -> tuple[int, int]:
        return (self.p, self.q)


@dataclass(frozen=True)
class ModeSet:
    modes: tuple[ModePair, ...]
    k2: Fraction
    resonance: str  # "none" | "resonant"
    growth: float
    Lx: DomainLength
    Ly: DomainLength | None = None
    others: tuple[tuple[Fraction, tuple[tuple[int, int], ...], float], ...] = field(default=())

    @property
    def multiplicity(self) -> int:
        return len(self.modes)

    @property
    def indices(self) -> list[tuple[int, int]]:
        return [m.index for m in self.modes]

    @property
    def k2_float(self) -> float:
        return float(self.k2)


def is_resonant_pair(a: ModePair, b: ModePair) -> bool:
    """Quadratic resonance: one planform's self-product excites the other.

    Holds when (phi_i = 2 phi_j and psi_i = 0) or (phi_i = 0 and psi_i = 2 psi_j)
    for some ordering; compared on squares, exactly.
    """
    for i, j in ((a, b), (b, a)):
        if i.phi_x2 == 4 * j.phi_x2 and i.phi_y2 == 0 and j.phi_y2 != 0:
            return True
        if i.phi_y2 == 4 * j.phi_y2 and i.phi_x2 == 0 and j.phi_x2 != 0:
            return True
    return False


def _order_resonant(a: ModePair, b: ModePair) -> tuple[ModePair, ModePair]:
    # mode 1 is the oblique planform, mode 2 the roll it excites
    if a.phi_y2 == 0 or a.phi_x2 == 0:
        return b, a
    return a, b


def enumerate_modes(Lx: DomainLength, Ly: DomainLength | None, k2_max: float) -> list[ModePair]:
    """All ``(p, q) != (0, 0)`` with ``k^2 <= k2_max``."""
    pmax = int(math.floor(math.sqrt(k2_max * float(Lx.ratio2)))) + 1
    qmax = 0 if Ly is None else int(math.floor(math.sqrt(k2_max * float(Ly.ratio2)))) + 1
    out = []
    for p in range(pmax + 1):
        fx = Lx.mode_k2(p)
        for q in range(qmax + 1):
            if p == 0 and q == 0:
                continue
            fy = Fraction(0) if Ly is None else Ly.mode_k2(q)
            k2 = fx + fy
            if float(k2) <= k2_max:
                out.append(ModePair(p, q, k2, fx, fy))
    return out


def admissible_modes(p: NondimParams, Lx, Ly=None, b: float | None = None) -> ModeSet:
    """Unstable Neumann modes at ``b`` grouped by exact ``k^2``.

    Returns the group with the largest growth rate; remaining unstable groups
    are listed in ``others``.
    """
    Lx = DomainLength.parse(Lx)
    Ly = None if Ly is None else DomainLength.parse(Ly)
    band = linstab.unstable_band(p, b)
    if band is None:
        raise NoAdmissibleMode("steady state is not Turing unstable at this b")
    k1s, k2s = band
    groups: dict[Fraction, list[ModePair]] = {}
    for mp in enumerate_modes(Lx, Ly, k2s):
        kf = float(mp.k2)
        if k1s < kf < k2s:
            groups.setdefault(mp.k2, []).append(mp)
    scored = []
    for k2, members in groups.items():
        s = float(linstab.max_growth(p, float(k2), b))
        if s > 0:
            scored.append((s, k2, members))
    if not scored:
        raise NoAdmissibleMode(f"no admissible unstable mode in band ({k1s:.6g}, {k2s:.6g})")
    scored.sort(key=lambda t: -t[0])
    s, k2, members = scored[0]
    members = sorted(members, key=lambda mp: (mp.p, mp.q))
    resonance = "none"
    if len(members) == 2 and is_resonant_pair(*members):
        resonance = "resonant"
        members = list(_order_resonant(*members))
    elif len(members) > 2 and any(is_resonant_pair(a, c) for a in members for c in members if a is not c):
        resonance = "resonant"
    others = tuple((k, tuple(mm.index for mm in mem), g) for g, k, mem in scored[1:])
    return ModeSet(tuple(members), k2, resonance, s, Lx, Ly, others)
