"""Core types for the stochastic six vertex particle system.

Conventions used throughout the package:

* Lattice sites are plain Python ints.
* A *location configuration* is a strictly increasing tuple of occupied
  sites, listed left to right.  The forward process updates these from the
  leftmost particle onward and particles only ever jump right.
* A *reversed configuration* is strictly decreasing (rightmost first); the
  reversed process updates from the rightmost particle and jumps left.
* Every probability on the exact code path is a ``fractions.Fraction``.
  Floats appear only in the Monte Carlo estimator.

Parameters are the per-site jump probabilities ``b1`` (probability that an
unconstrained particle holds still) and ``b2`` (probability of passing
through one more empty site), tied together by the asymmetry ratio
``q = b1 / b2`` which is shared by all sites.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from typing import Iterable, Mapping

# A strictly increasing tuple of occupied sites (forward process order).
LocationConfig = tuple[int, ...]
# A strictly decreasing tuple of occupied sites (reversed process order).
ReversedConfig = tuple[int, ...]


def parse_rational(text: str) -> Fraction:
    """Parse ``"num/den"`` (or a bare integer string) into a Fraction.

    Floats and float-looking strings are rejected: the exact code path
    never goes through binary floating point.
    """
    if isinstance(text, Fraction):
        return text
    if not isinstance(text, str):
        raise ValueError(f"rational must be a 'num/den' string, got {text!r}")
    s = text.strip()
    if "." in s or "e" in s.lower():
        raise ValueError(f"rational {text!r} looks like a float; use num/den")
    try:
        return Fraction(s)
    except (ValueError, ZeroDivisionError) as exc:
        raise ValueError(f"cannot parse rational {text!r}: {exc}") from None


def format_rational(value: Fraction) -> str:
    """Render a Fraction as ``num/den`` with the denominator always spelled out."""
    return f"{value.numerator}/{value.denominator}"


def _check_prob_open(name: str, value: Fraction) -> None:
    if not isinstance(value, Fraction):
        raise ValueError(f"{name} must be a Fraction, got {type(value).__name__}")
    if not (0 < value < 1):
        raise ValueError(f"{name} must lie strictly between 0 and 1, got {value}")


@dataclass(frozen=True)
class Params:
    """Jump parameters, possibly varying by site.

    ``q`` is the ratio b1/b2 common to every site.  ``b2`` is the default
    pass-through probability and ``b2_sites`` lists ``(site, value)``
    overrides; ``b1`` at a site is always derived as ``q * b2_at(site)``,
    so the coupling b1 = q*b2 holds by construction.  Use
    :meth:`from_b1_b2` to build from explicit b1 values (it rejects inputs
    where the coupling fails at any declared site).
    """

    q: Fraction
    b2: Fraction
    b2_sites: tuple[tuple[int, Fraction], ...] = ()

    def __post_init__(self) -> None:
        if not isinstance(self.q, Fraction) or self.q <= 0:
            raise ValueError(f"q must be a positive Fraction, got {self.q!r}")
        _check_prob_open("b2", self.b2)
        _check_prob_open("b1 = q*b2", self.q * self.b2)
        seen: set[int] = set()
        for site, value in self.b2_sites:
            if not isinstance(site, int):
                raise ValueError(f"b2_sites keys must be ints, got {site!r}")
            if site in seen:
                raise ValueError(f"duplicate b2 override for site {site}")
            seen.add(site)
            _check_prob_open(f"b2 at site {site}", value)
            _check_prob_open(f"b1 = q*b2 at site {site}", self.q * value)
        # Canonical order so equal parameter sets hash equally.
        object.__setattr__(self, "b2_sites", tuple(sorted(self.b2_sites)))

    @classmethod
    def homogeneous(cls, q: Fraction | str, b2: Fraction | str) -> "Params":
        return cls(q=parse_rational(q), b2=parse_rational(b2))

    @classmethod
    def from_b1_b2(
        cls,
        b1: Fraction | str,
        b2: Fraction | str,
        b1_sites: Mapping[int, Fraction] | None = None,
        b2_sites: Mapping[int, Fraction] | None = None,
    ) -> "Params":
        """Build from explicit b1/b2, enforcing b1 = q*b2 at every site."""
        b1 = parse_rational(b1)
        b2 = parse_rational(b2)
        _check_prob_open("b1", b1)
        _check_prob_open("b2", b2)
        q = b1 / b2
        b1_sites = dict(b1_sites or {})
        b2_sites = dict(b2_sites or {})
        for site in sorted(set(b1_sites) | set(b2_sites)):
            want_b1 = b1_sites.get(site, b1)
            have_b2 = b2_sites.get(site, b2)
            if want_b1 != q * have_b2:
                raise ValueError(
                    f"b1 at site {site} is {want_b1}, but q*b2 = {q * have_b2}; "
                    f"sites must share the ratio q = {q}"
                )
        return cls(q=q, b2=b2, b2_sites=tuple(sorted(b2_sites.items())))

    @property
    def b1(self) -> Fraction:
        """Default hold probability, q * b2."""
        return self.q * self.b2

    def b2_at(self, site: int) -> Fraction:
        for s, value in self.b2_sites:
            if s == site:
                return value
        return self.b2

    def b1_at(self, site: int) -> Fraction:
        return self.q * self.b2_at(site)

    def is_homogeneous(self) -> bool:
        return all(value == self.b2 for _, value in self.b2_sites)

    def to_json_obj(self) -> dict:
        obj: dict = {"q": format_rational(self.q)}
        if self.b2_sites:
            obj["b2_default"] = format_rational(self.b2)
            obj["b2_sites"] = {
                str(site): format_rational(value) for site, value in self.b2_sites
            }
        else:
            obj["b2"] = format_rational(self.b2)
        return obj

    @classmethod
    def from_json_obj(cls, obj: Mapping) -> "Params":
        q = parse_rational(obj["q"])
        if "b2_sites" in obj:
            default = parse_rational(obj["b2_default"])
            sites = tuple(
                sorted((int(k), parse_rational(v)) for k, v in obj["b2_sites"].items())
            )
            return cls(q=q, b2=default, b2_sites=sites)
        return cls(q=q, b2=parse_rational(obj["b2"]))


def validate_location(positions: Iterable[int]) -> LocationConfig:
    """Normalize to a strictly increasing tuple; reject disorder or repeats."""
    pos = tuple(positions)
    for p in pos:
        if not isinstance(p, int) or isinstance(p, bool):
            raise ValueError(f"positions must be ints, got {p!r}")
    if any(a >= b for a, b in zip(pos, pos[1:])):
        raise ValueError(f"location configuration must be strictly increasing: {pos}")
    return pos


def validate_reversed(positions: Iterable[int]) -> ReversedConfig:
    """Normalize to a strictly decreasing tuple (reversed process order)."""
    pos = tuple(positions)
    for p in pos:
        if not isinstance(p, int) or isinstance(p, bool):
            raise ValueError(f"positions must be ints, got {p!r}")
    if any(a <= b for a, b in zip(pos, pos[1:])):
        raise ValueError(f"reversed configuration must be strictly decreasing: {pos}")
    return pos


@dataclass(frozen=True)
class OccupationConfig:
    """Occupation variables g on a finite window [lo, hi].

    ``bits[i]`` is the occupancy of site ``lo + i``.  Particles that have
    left the window to the right are only counted, not placed; the total
    particle number is preserved by construction.
    """

    lo: int
    hi: int
    bits: tuple[int, ...]
    escaped_right: int = 0

    def __post_init__(self) -> None:
        if self.hi < self.lo - 1:
            raise ValueError(f"bad window [{self.lo}, {self.hi}]")
        if len(self.bits) != self.hi - self.lo + 1:
            raise ValueError(
                f"window [{self.lo}, {self.hi}] needs {self.hi - self.lo + 1} bits, "
                f"got {len(self.bits)}"
            )
        if any(b not in (0, 1) for b in self.bits):
            raise ValueError("occupancies must be 0 or 1")
        if self.escaped_right < 0:
            raise ValueError("escaped_right must be >= 0")

    def occupancy(self, site: int) -> int:
        """g at ``site``; sites left of the window are empty, right is an error."""
        if site > self.hi:
            raise ValueError(
                f"site {site} lies right of the window [{self.lo}, {self.hi}]; "
                "occupancy there is not tracked"
            )
        if site < self.lo:
            return 0
        return self.bits[site - self.lo]

    def particle_count(self) -> int:
        return sum(self.bits) + self.escaped_right


def to_occupation(x: LocationConfig, lo: int, hi: int) -> OccupationConfig:
    """Project a location configuration onto the window [lo, hi].

    Particles right of ``hi`` fold into ``escaped_right``; a particle left
    of ``lo`` is an error (its position can no longer be represented).
    """
    x = validate_location(x)
    bits = [0] * (hi - lo + 1)
    escaped = 0
    for p in x:
        if p < lo:
            raise ValueError(f"particle at {p} lies left of the window [{lo}, {hi}]")
        if p > hi:
            escaped += 1
        else:
            bits[p - lo] = 1
    return OccupationConfig(lo=lo, hi=hi, bits=tuple(bits), escaped_right=escaped)


def to_location(g: OccupationConfig) -> LocationConfig:
    """Inverse of :func:`to_occupation`; undefined once particles escaped."""
    if g.escaped_right > 0:
        raise ValueError(
            f"{g.escaped_right} particle(s) escaped right of the window; "
            "their positions are unknown"
        )
    return tuple(g.lo + i for i, b in enumerate(g.bits) if b)


def height(g: OccupationConfig, site: int) -> int:
    """Number of particles at or left of ``site``: N_site = sum_{i <= site} g_i."""
    if site > g.hi:
        raise ValueError(
            f"height at {site} is not determined by the window [{g.lo}, {g.hi}]"
        )
    if site < g.lo:
        return 0
    return sum(g.bits[: site - g.lo + 1])


class VertexType(Enum):
    """The six local arrow configurations, numbered in the conventional order."""

    I = 1
    II = 2
    III = 3
    IV = 4
    V = 5
    VI = 6


def vertex_weight(vtype: VertexType, params: Params, site: int = 0) -> Fraction:
    """Stochastic weight of a vertex type at ``site``.

    Types I and II are frozen (weight 1); III/IV carry the pass-through
    probability and V/VI the hold probability.  Complementary pairs sum
    to 1, which is what makes the row-to-row update a Markov kernel.
    """
    b1 = params.b1_at(site)
    b2 = params.b2_at(site)
    table = {
        VertexType.I: Fraction(1),
        VertexType.II: Fraction(1),
        VertexType.III: b2,
        VertexType.IV: 1 - b2,
        VertexType.V: b1,
        VertexType.VI: 1 - b1,
    }
    return table[vtype]
