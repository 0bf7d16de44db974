"""One-step transition kernels of the forward and reversed particle processes.

The forward process updates particles left to right.  A particle whose left
neighbour did NOT land on it holds with probability b1 (case a); otherwise it
is pushed and must move (case b).  A moving particle passes each empty site
with probability b2, stops on an interior site with the extra landing factor
(1 - b2), and the jump that saturates the gap — landing exactly on the next
particle's pre-update position — carries no landing factor (that mass is
what the next particle's push absorbs).  All factors are read at the sites
actually traversed, so one implementation serves both the homogeneous and
the site-dependent law.

The reversed process is the spatial mirror: the rightmost particle updates
first and everything moves left.

Exactness device: distributions are *lumped* at a boundary.  Mass where a
particle crosses the boundary (forward: > R, reversed: < L) is aggregated
per prefix into a single outcome carrying only a particle count.  The
crossing mass is a closed-form product of pass-through factors, so the
distribution stays finite and exactly rational — nothing is truncated.
"""

from __future__ import annotations

import hashlib
import random
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from typing import Iterator

from sixv.model import (
    LocationConfig,
    Params,
    ReversedConfig,
    format_rational,
    validate_location,
    validate_reversed,
)


class Mutation(Enum):
    """Deliberate single-point defects used to prove the checkers can fail.

    LANDING_FACTOR: pushed particles keep the (1-b2) landing factor on the
    gap-saturating jump, leaking probability mass.
    PUSH_TRIGGER: a particle is pushed whenever its neighbour moved at all,
    not only when the neighbour landed on it.
    INVERTED_Q: functionals are evaluated with 1/q in place of q (dynamics
    untouched).
    """

    LANDING_FACTOR = "landing_factor"
    PUSH_TRIGGER = "push_trigger"
    INVERTED_Q = "inverted_q"


@dataclass(frozen=True)
class LumpedOutcome:
    """Resolved particle positions plus a count of particles beyond the boundary.

    Forward outcomes keep positions strictly increasing and ≤ R with
    ``lumped`` particles somewhere right of R; reversed outcomes are strictly
    decreasing and ≥ L with ``lumped`` particles left of L.
    """

    positions: tuple[int, ...]
    lumped: int = 0

    def __post_init__(self) -> None:
        if self.lumped < 0:
            raise ValueError("lumped count must be >= 0")


@dataclass(frozen=True)
class StepDistribution:
    """Exact finite one-step law over lumped outcomes.

    ``descending`` tells which ordering the resolved positions obey (the
    reversed process lists positions right to left).  Unless
    ``mass_deficit`` is set (only the landing-factor mutation does that),
    construction enforces that probabilities are positive, outcomes unique
    and the total is exactly 1.
    """

    entries: tuple[tuple[LumpedOutcome, Fraction], ...]
    lump_boundary: int
    descending: bool = False
    mass_deficit: bool = field(default=False, compare=False)

    def __post_init__(self) -> None:
        seen: set[LumpedOutcome] = set()
        for outcome, prob in self.entries:
            if prob <= 0:
                raise ValueError(f"non-positive probability {prob} for {outcome}")
            if outcome in seen:
                raise ValueError(f"duplicate outcome {outcome}")
            seen.add(outcome)
            step = -1 if self.descending else 1
            pos = outcome.positions
            if any((b - a) * step <= 0 for a, b in zip(pos, pos[1:])):
                raise ValueError(f"outcome positions out of order: {pos}")
            if pos:
                edge = max(pos) if not self.descending else -min(pos)
                bound = self.lump_boundary if not self.descending else -self.lump_boundary
                if edge > bound:
                    raise ValueError(
                        f"resolved position crosses the lump boundary: {outcome}"
                    )
        total = self.total_mass()
        if not self.mass_deficit and total != 1:
            raise ValueError(f"probabilities sum to {total}, not 1")
        if self.mass_deficit and total > 1:
            raise ValueError(f"probabilities sum to {total} > 1")

    def total_mass(self) -> Fraction:
        return sum((p for _, p in self.entries), Fraction(0))

    def to_json_obj(self) -> list[dict]:
        return [
            {
                "positions": list(outcome.positions),
                "lumped": outcome.lumped,
                "prob": format_rational(prob),
            }
            for outcome, prob in self.entries
        ]


def one_particle_kernel(x: int, y: int, params: Params) -> Fraction:
    """Transition probability of a lone forward particle from x to y.

    b1 to hold; to land at y > x, depart (1-b1), pass each intermediate site
    with its b2, and stop with (1-b2) at y.  Homogeneous case reduces to
    (1-b1)(1-b2) b2^(y-x-1).
    """
    if y < x:
        return Fraction(0)
    if y == x:
        return params.b1_at(x)
    prob = 1 - params.b1_at(x)
    for site in range(x + 1, y):
        prob *= params.b2_at(site)
    return prob * (1 - params.b2_at(y))


def _sorted_entries(
    acc: dict[LumpedOutcome, Fraction], boundary: int, descending: bool, deficit: bool
) -> StepDistribution:
    entries = tuple(
        sorted(acc.items(), key=lambda item: (item[0].positions, item[0].lumped))
    )
    return StepDistribution(
        entries=entries,
        lump_boundary=boundary,
        descending=descending,
        mass_deficit=deficit,
    )


def _walk_landings(
    u: int,
    cap: int | None,
    lump_after: int,
    params: Params,
    step: int,
    pushed: bool,
    mutation: Mutation | None,
) -> Iterator[tuple[int | None, Fraction]]:
    """Enumerate landings of one departed particle (mass conditioned on leaving u).

    ``step`` is +1 (forward) or -1 (reversed); ``cap`` is the pre-update
    position of the constraining neighbour (None when unconstrained);
    ``lump_after`` is the last site still resolved.  Yields (site, prob)
    pairs and finally (None, tail_mass) when the walk can cross the
    boundary.  Probabilities are conditional on departure.
    """
    through = Fraction(1)
    z = u + step
    while True:
        if cap is not None and z == cap:
            prob = through
            if mutation is Mutation.LANDING_FACTOR and pushed:
                prob *= 1 - params.b2_at(z)
            yield z, prob
            return
        if (z - lump_after) * step > 0:
            yield None, through
            return
        yield z, through * (1 - params.b2_at(z))
        through *= params.b2_at(z)
        z += step


def _step_distribution(
    start: tuple[int, ...],
    params: Params,
    boundary: int,
    step: int,
    mutation: Mutation | None,
) -> StepDistribution:
    """Shared forward/reversed enumeration; ``step`` fixes the direction."""
    descending = step < 0
    acc: dict[LumpedOutcome, Fraction] = {}

    def record(prefix: tuple[int, ...], lumped: int, prob: Fraction) -> None:
        outcome = LumpedOutcome(positions=prefix, lumped=lumped)
        acc[outcome] = acc.get(outcome, Fraction(0)) + prob

    def recurse(
        i: int, prev_landing: int | None, prefix: tuple[int, ...], prob: Fraction
    ) -> None:
        if i == len(start):
            record(prefix, 0, prob)
            return
        u = start[i]
        if mutation is Mutation.PUSH_TRIGGER:
            pushed = prev_landing is not None and prev_landing != start[i - 1]
        else:
            pushed = prev_landing is not None and prev_landing == u
        cap = start[i + 1] if i + 1 < len(start) else None
        if not pushed:
            hold = prob * params.b1_at(u)
            recurse(i + 1, u, prefix + (u,), hold)
            depart = prob * (1 - params.b1_at(u))
        else:
            depart = prob
        if not depart:
            return
        for site, p in _walk_landings(u, cap, boundary, params, step, pushed, mutation):
            if site is None:
                # Everything from here on is beyond the boundary; remaining
                # particles (there are none unless the input was all-beyond)
                # would be capped beyond it too.
                record(prefix, len(start) - i, depart * p)
            else:
                recurse(i + 1, site, prefix + (site,), depart * p)

    beyond = [(p - boundary) * step > 0 for p in start]
    if any(beyond):
        if not all(beyond):
            raise ValueError(
                "initial positions straddle the lump boundary; move the boundary "
                f"past {start}"
            )
        record((), len(start), Fraction(1))
    else:
        recurse(0, None, (), Fraction(1))
    deficit = mutation is Mutation.LANDING_FACTOR
    return _sorted_entries(acc, boundary, descending, deficit)


def forward_step_distribution(
    x: LocationConfig, params: Params, R: int, mutation: Mutation | None = None
) -> StepDistribution:
    """Exact one-step law of the forward process, lumped beyond R.

    Requires R ≥ max(x) (so every particle is resolved) or every particle
    already > R (one fully lumped outcome).
    """
    x = validate_location(x)
    return _step_distribution(x, params, R, +1, mutation)


def reversed_step_distribution(
    y: ReversedConfig, params: Params, L: int, mutation: Mutation | None = None
) -> StepDistribution:
    """Exact one-step law of the reversed process, lumped below L.

    Spatial mirror of :func:`forward_step_distribution`: the rightmost
    particle updates first, motion is leftward, and the kernel reads its
    site factors at the sites traversed, so in the homogeneous case each
    one-particle transition y -> v has the forward probability of v -> y.
    """
    y = validate_reversed(y)
    return _step_distribution(y, params, L, -1, mutation)


# --- samplers -----------------------------------------------------------------


def trajectory_rng(seed: int, stream: int | str) -> random.Random:
    """Independent generator for (seed, stream): reproducible and splittable."""
    digest = hashlib.sha256(f"{seed}:{stream}".encode()).digest()
    return random.Random(int.from_bytes(digest[:8], "big"))


def _sample_landing(
    u: int, cap: int | None, params: Params, step: int, pushed: bool, rng: random.Random
) -> int:
    """Draw one landing site by walking the geometric passage site by site."""
    if not pushed:
        if rng.random() < params.b1_at(u):
            return u
    z = u + step
    while True:
        if cap is not None and z == cap:
            return z
        if rng.random() < 1 - params.b2_at(z):
            return z
        z += step


def _sample_step(
    start: tuple[int, ...], params: Params, step: int, rng: random.Random
) -> tuple[int, ...]:
    out: list[int] = []
    prev: int | None = None
    for i, u in enumerate(start):
        pushed = prev is not None and prev == u
        cap = start[i + 1] if i + 1 < len(start) else None
        prev = _sample_landing(u, cap, params, step, pushed, rng)
        out.append(prev)
    return tuple(out)


def sample_forward_step(
    x: LocationConfig, params: Params, rng: random.Random
) -> LocationConfig:
    """One unlumped draw from the forward law (geometric tails unbounded)."""
    return _sample_step(validate_location(x), params, +1, rng)


def sample_reversed_step(
    y: ReversedConfig, params: Params, rng: random.Random
) -> ReversedConfig:
    """One unlumped draw from the reversed (leftward) law."""
    return _sample_step(validate_reversed(y), params, -1, rng)
