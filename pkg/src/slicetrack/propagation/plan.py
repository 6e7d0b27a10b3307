"""Slice-order plans: which slice seeds a run and how the rest are visited.

bottom-to-top seeds at the lowest tumor slice and walks up; top-to-bottom
mirrors it; center-outward seeds at the center slice and walks both ways,
re-using the single center prediction for both chains.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass


class Strategy(enum.Enum):
    BOTTOM_TO_TOP = "bottom-to-top"
    TOP_TO_BOTTOM = "top-to-bottom"
    CENTER_OUTWARD = "center-outward"

    def __str__(self) -> str:
        return self.value


ALL_STRATEGIES = (Strategy.BOTTOM_TO_TOP, Strategy.TOP_TO_BOTTOM, Strategy.CENTER_OUTWARD)


@dataclass(frozen=True)
class PropagationPlan:
    strategy: Strategy
    seed_z: int
    chains: tuple[tuple[int, ...], ...]
    z_range: tuple[int, int]  # inclusive

    def __post_init__(self):
        z_lo, z_hi = self.z_range
        if not z_lo <= self.seed_z <= z_hi:
            raise ValueError(f"seed {self.seed_z} outside range {self.z_range}")
        visited = {self.seed_z}
        for chain in self.chains:
            if not chain:
                raise ValueError("empty chain")
            if abs(chain[0] - self.seed_z) != 1:
                raise ValueError(f"chain must start next to the seed, got {chain[0]}")
            step = chain[1] - chain[0] if len(chain) > 1 else chain[0] - self.seed_z
            for prev, cur in zip(chain, chain[1:]):
                if cur - prev != step:
                    raise ValueError("chain indices must step by a constant +-1")
            for z in chain:
                if not z_lo <= z <= z_hi or z in visited:
                    raise ValueError(f"slice {z} outside range or visited twice")
                visited.add(z)
        if visited != set(range(z_lo, z_hi + 1)):
            raise ValueError("chains plus seed must cover the range exactly once")

    @property
    def coverage_size(self) -> int:
        return 1 + sum(len(c) for c in self.chains)

    @property
    def max_step_index(self) -> int:
        return max((len(c) for c in self.chains), default=0)


def build_plan(
    strategy: Strategy,
    z_first: int,
    z_last: int,
    z_center: int | None = None,
) -> PropagationPlan:
    """Construct the slice ordering for one strategy over [z_first, z_last].

    z_center applies to center-outward only and defaults to the midpoint
    rule floor((z_first + z_last) / 2).
    """
    if z_first > z_last:
        raise ValueError(f"z_first {z_first} > z_last {z_last}")
    if strategy is Strategy.BOTTOM_TO_TOP:
        seed = z_first
        chains = [tuple(range(z_first + 1, z_last + 1))]
    elif strategy is Strategy.TOP_TO_BOTTOM:
        seed = z_last
        chains = [tuple(range(z_last - 1, z_first - 1, -1))]
    elif strategy is Strategy.CENTER_OUTWARD:
        seed = (z_first + z_last) // 2 if z_center is None else z_center
        if not z_first <= seed <= z_last:
            raise ValueError(f"center {seed} outside extent [{z_first}, {z_last}]")
        chains = [
            tuple(range(seed + 1, z_last + 1)),
            tuple(range(seed - 1, z_first - 1, -1)),
        ]
    else:
        raise ValueError(f"unknown strategy {strategy}")
    return PropagationPlan(
        strategy=strategy,
        seed_z=seed,
        chains=tuple(c for c in chains if c),
        z_range=(z_first, z_last),
    )
