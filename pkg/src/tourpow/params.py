"""Threshold profiles.

Every numeric threshold used by the constructive procedures lives in a
:class:`ParameterProfile`. ``strict`` reproduces the asymptotic constants
(2^{6k}, 2^{20k}, 2^{200k}, ...), which are vacuous at any n a computer can
hold; ``desk`` replaces fractions n/2^{f(k)} by ``max(strict value, floor)``
and cardinality gates 2^{g(k)} by ``gate`` (default ``max(4k, 16)``).
Every constructed object is validated independently, so a desk threshold
can only cost success rate, never soundness.
"""
from __future__ import annotations

import dataclasses
import json
from dataclasses import dataclass, field
from typing import Any

MODES = ("strict", "desk")


@dataclass(frozen=True)
class ParameterProfile:
    k: int
    delta: float = 0.1
    head_tail_fraction: float = 0.0
    apart_radius: int = 0
    link_neighborhood_fraction: float = 0.0
    chain_residual_cap: int = 0
    drc_s: int = 0
    drc_m: int = 0
    bridge_c: float = 0.0
    mode: str = "desk"
    rng_seed: int = 0
    # desk knobs
    head_tail_floor: int = 1
    gate: int = 0
    transitive_pool: int = 0
    long_path_floor: int = 1
    chain_order: int = 0
    dispatch_density: float = 0.05
    exact_cut_cap: int = 22
    cut_restarts: int = 32
    sampling_retries: int = 64
    link_max_layers: int = 8
    deletion_rule: str = ""
    pipeline_attempts: int = 3
    bridge_d_base: int = 1
    crossing_floor: float = 1.0
    extras: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        if self.k < 1:
            raise ValueError("k must be >= 1")
        if self.mode not in MODES:
            raise ValueError(f"mode must be one of {MODES}")
        for name in ("head_tail_fraction", "link_neighborhood_fraction"):
            val = getattr(self, name)
            if not 0 < val <= 1:
                raise ValueError(f"{name} must lie in (0, 1], got {val}")
        if not 0 < self.delta <= 1:
            raise ValueError("delta must lie in (0, 1]")
        for name in ("apart_radius", "chain_residual_cap", "drc_s", "drc_m", "gate",
                     "transitive_pool", "chain_order"):
            if getattr(self, name) < 1:
                raise ValueError(f"{name} must be >= 1")
        if self.deletion_rule not in ("", "radius", "exact"):
            raise ValueError("deletion_rule must be 'radius' or 'exact'")
        if self.bridge_d_base < 1 or self.crossing_floor <= 0:
            raise ValueError("bridge_d_base must be >= 1 and crossing_floor > 0")
        if self.bridge_c < 1:
            raise ValueError("bridge_c must be >= 1")

    # -- constructors -------------------------------------------------

    @classmethod
    def strict(cls, k: int, delta: float = 0.1, rng_seed: int = 0) -> "ParameterProfile":
        return cls(
            k=k,
            delta=delta,
            head_tail_fraction=2.0 ** (-6 * k),
            apart_radius=10 * k,
            link_neighborhood_fraction=2.0 ** (-20 * k),
            chain_residual_cap=2 ** (200 * k),
            drc_s=2 ** (30 * k),
            drc_m=2 ** (30 * k),
            bridge_c=2.0 ** (30 * k),
            mode="strict",
            rng_seed=rng_seed,
            head_tail_floor=0,
            gate=2 ** (30 * k),
            transitive_pool=30 * k,
            long_path_floor=1,
            chain_order=3 * k,
            bridge_d_base=2 ** (200 * k),
            crossing_floor=2.0 ** 10,
        )

    @classmethod
    def desk(cls, k: int, delta: float = 0.1, rng_seed: int = 0, **overrides: Any) -> "ParameterProfile":
        gate = max(4 * k, 16)
        base = dict(
            k=k,
            delta=delta,
            head_tail_fraction=2.0 ** (-6 * k),
            apart_radius=3 * k,
            link_neighborhood_fraction=2.0 ** (-20 * k),
            chain_residual_cap=gate,
            drc_s=gate,
            drc_m=gate,
            bridge_c=float(gate),
            mode="desk",
            rng_seed=rng_seed,
            head_tail_floor=k,
            gate=gate,
            transitive_pool=4 * k,
            long_path_floor=1,
            chain_order=2 * k,
        )
        base.update(overrides)
        return cls(**base)

    # -- derived thresholds ------------------------------------------

    @property
    def strict_mode(self) -> bool:
        return self.mode == "strict"

    @property
    def deletion(self) -> str:
        """How chain interiors may be consumed by covers and links.

        ``radius``: every used set is kept ``apart_radius``-apart in the chain
        ordering (forbidding the interval hull of each used set); ``exact``:
        a set is admissible iff every affected chain minus all deletions still
        verifies as a k-th power.
        """
        if self.deletion_rule:
            return self.deletion_rule
        return "radius" if self.strict_mode else "exact"

    def head_tail_threshold(self, ground_size: int, size: int | None = None) -> float:
        """Minimum common-neighbourhood size for a head/tail of ``size`` vertices."""
        size = self.k if size is None else size
        frac = self.head_tail_fraction ** (size / self.k)
        value = frac * ground_size
        if self.strict_mode:
            return value
        return max(value, float(self.head_tail_floor))

    def link_threshold(self, n: int) -> float:
        value = self.link_neighborhood_fraction * n
        if self.strict_mode:
            return value
        return max(value, float(self.head_tail_floor))

    def with_k(self, k: int) -> "ParameterProfile":
        """Same profile re-derived for another power order."""
        if self.strict_mode:
            return dataclasses.replace(ParameterProfile.strict(k, self.delta, self.rng_seed),
                                       extras=self.extras)
        scale = dict(
            head_tail_fraction=self.head_tail_fraction ** (k / self.k),
            link_neighborhood_fraction=self.link_neighborhood_fraction ** (k / self.k),
            apart_radius=max(1, self.apart_radius * k // self.k),
            chain_order=max(1, self.chain_order * k // self.k),
            transitive_pool=max(1, self.transitive_pool * k // self.k),
            head_tail_floor=max(0, self.head_tail_floor * k // self.k) if self.head_tail_floor else 0,
        )
        return dataclasses.replace(self, k=k, **scale)

    def replace(self, **changes: Any) -> "ParameterProfile":
        return dataclasses.replace(self, **changes)

    # -- serialisation -----------------------------------------------

    def to_dict(self) -> dict:
        d = dataclasses.asdict(self)
        # 2**(200k) does not fit in a JSON double; keep exact ints as strings
        for key, val in d.items():
            if isinstance(val, int) and not isinstance(val, bool) and val.bit_length() > 53:
                d[key] = str(val)
            elif isinstance(val, float) and val > 2.0 ** 1000:
                d[key] = repr(val)
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "ParameterProfile":
        fields = {f.name: f for f in dataclasses.fields(cls)}
        kwargs = {}
        for key, val in d.items():
            if key not in fields:
                raise ValueError(f"unknown profile field {key!r}")
            ftype = str(fields[key].type)
            if isinstance(val, str) and ftype in ("int", "float"):
                val = float(val) if ftype == "float" else int(val)
            kwargs[key] = val
        return cls(**kwargs)

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)
