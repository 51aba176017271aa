"""Gridworld of UAV base stations serving ground users.

UAVs move on an integer grid; static users associate to the nearest UAV
in coverage range and receive capacity-split, distance-decayed service.
All operations are pure functions of their inputs, so concurrent rollouts
can share nothing but the config.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

POMDP = "pomdp"
FOMDP = "fomdp"
MDP_MODES = (POMDP, FOMDP)

USER_GRID_BINS = 5  # per axis; the local user-density feature is 5x5


class ConfigError(ValueError):
    """Invalid configuration; message names the offending field."""


class EpisodeOver(RuntimeError):
    """step() called on a state whose episode clock is exhausted."""


class Move(enum.IntEnum):
    STAY = 0
    POS_X = 1
    NEG_X = 2
    POS_Y = 3
    NEG_Y = 4


_MOVE_DELTA = {
    Move.STAY: (0, 0),
    Move.POS_X: (1, 0),
    Move.NEG_X: (-1, 0),
    Move.POS_Y: (0, 1),
    Move.NEG_Y: (0, -1),
}

UNIFORM_RANDOM = "uniform_random"
CLUSTERED = "clustered"


@dataclass(frozen=True)
class EnvConfig:
    width: int = 20
    height: int = 20
    num_uavs: int = 4
    num_users: int = 20
    coverage_radius: float = 4.0
    sensing_radius: float = 5.0
    uav_capacity: float = 10.0
    episode_length: int = 40
    user_layout_seed: int = 0
    user_layout: str = UNIFORM_RANDOM
    k_clusters: int = 3
    cluster_std: float = 2.0

    def __post_init__(self) -> None:
        if self.width <= 0:
            raise ConfigError(f"width must be > 0, got {self.width}")
        if self.height <= 0:
            raise ConfigError(f"height must be > 0, got {self.height}")
        if self.num_uavs < 1:
            raise ConfigError(f"num_uavs must be >= 1, got {self.num_uavs}")
        if self.num_uavs > self.width:
            # starting cells are distinct cells of the center row
            raise ConfigError(
                f"num_uavs must be <= width ({self.width}), got {self.num_uavs}"
            )
        if self.num_users < 0:
            raise ConfigError(f"num_users must be >= 0, got {self.num_users}")
        if not 0 < self.coverage_radius <= max(self.width, self.height):
            raise ConfigError(
                f"coverage_radius must be in (0, {max(self.width, self.height)}], "
                f"got {self.coverage_radius}"
            )
        if not 0 < self.sensing_radius <= max(self.width, self.height):
            raise ConfigError(
                f"sensing_radius must be in (0, {max(self.width, self.height)}], "
                f"got {self.sensing_radius}"
            )
        if self.uav_capacity <= 0:
            raise ConfigError(f"uav_capacity must be > 0, got {self.uav_capacity}")
        if self.episode_length <= 0:
            raise ConfigError(
                f"episode_length must be > 0, got {self.episode_length}"
            )
        if self.user_layout not in (UNIFORM_RANDOM, CLUSTERED):
            raise ConfigError(
                f"user_layout must be '{UNIFORM_RANDOM}' or '{CLUSTERED}', "
                f"got {self.user_layout!r}"
            )
        if self.user_layout == CLUSTERED:
            if self.k_clusters < 1:
                raise ConfigError(f"k_clusters must be >= 1, got {self.k_clusters}")
            if self.cluster_std < 0:
                raise ConfigError(
                    f"cluster_std must be >= 0, got {self.cluster_std}"
                )


@dataclass(frozen=True, eq=False)
class WorldState:
    """Ground truth: integer cell positions plus the episode clock.

    Arrays are never mutated; step() returns a fresh state.
    """

    uav_pos: np.ndarray  # (num_uavs, 2) int64
    user_pos: np.ndarray  # (num_users, 2) int64, fixed until the next reset
    t: int


@dataclass(frozen=True)
class QosReport:
    per_user_qos: np.ndarray  # (num_users,)
    per_uav_serving_qos: np.ndarray  # (num_uavs,)
    total_qos: float
    association: np.ndarray  # (num_users,) int64, -1 when out of range


@dataclass(frozen=True)
class ObservationSet:
    features: np.ndarray  # (num_uavs, obs_dim), all entries in [-1, 1]
    mode: str


def obs_dim(config: EnvConfig) -> int:
    """Feature width: own position + per-other-UAV triple + 5x5 user grid."""
    return 2 + 3 * (config.num_uavs - 1) + USER_GRID_BINS * USER_GRID_BINS


def _seed_rng(config: EnvConfig, seed: int) -> np.random.Generator:
    # SeedSequence wants non-negative entropy words
    mask = (1 << 63) - 1
    return np.random.default_rng(
        np.random.SeedSequence([config.user_layout_seed & mask, seed & mask])
    )


def reset(config: EnvConfig, seed: int) -> WorldState:
    """Place UAVs on the center row and sample a fresh user layout.

    UAV i starts at x = floor((2i+1) * width / (2 * num_uavs)) on the center
    row: distinct cells for num_uavs <= width. Users are drawn from a
    generator seeded by (user_layout_seed, seed), so the same pair always
    yields the same layout.
    """
    n = config.num_uavs
    xs = ((2 * np.arange(n, dtype=np.int64) + 1) * config.width) // (2 * n)
    ys = np.full(n, config.height // 2, dtype=np.int64)
    uav_pos = np.stack([xs, ys], axis=1)

    rng = _seed_rng(config, seed)
    m = config.num_users
    if m == 0:
        user_pos = np.zeros((0, 2), dtype=np.int64)
    elif config.user_layout == UNIFORM_RANDOM:
        user_pos = rng.integers(
            0, [config.width, config.height], size=(m, 2), dtype=np.int64
        )
    else:
        centers = rng.uniform(
            [0.0, 0.0], [config.width, config.height], size=(config.k_clusters, 2)
        )
        which = rng.integers(0, config.k_clusters, size=m)
        jitter = rng.normal(0.0, config.cluster_std, size=(m, 2))
        raw = np.floor(centers[which] + jitter)
        user_pos = np.clip(
            raw, [0, 0], [config.width - 1, config.height - 1]
        ).astype(np.int64)
    return WorldState(uav_pos=uav_pos, user_pos=user_pos, t=0)


def step(
    config: EnvConfig, state: WorldState, joint_action: tuple[Move, ...] | list[Move]
) -> tuple[WorldState, QosReport]:
    """Move every UAV one cell (clamped at the boundary) and score the result.

    The QoS report is computed on the new positions; its total is the shared
    team reward. UAVs may co-locate.
    """
    if state.t >= config.episode_length:
        raise EpisodeOver(
            f"episode exhausted: t={state.t} >= episode_length={config.episode_length}"
        )
    if len(joint_action) != config.num_uavs:
        raise ValueError(
            f"joint_action has length {len(joint_action)}, expected {config.num_uavs}"
        )
    delta = np.array([_MOVE_DELTA[Move(a)] for a in joint_action], dtype=np.int64)
    new_pos = np.clip(
        state.uav_pos + delta, [0, 0], [config.width - 1, config.height - 1]
    )
    new_state = WorldState(uav_pos=new_pos, user_pos=state.user_pos, t=state.t + 1)
    return new_state, compute_qos(config, new_state)


def compute_qos(config: EnvConfig, state: WorldState) -> QosReport:
    """Associate users to the nearest in-range UAV and split capacity.

    A user at distance d from its UAV gets (capacity / n_users_on_that_uav)
    * (1 - d / coverage_radius); equidistant ties go to the lowest UAV index.
    Sums accumulate in ascending user index order.
    """
    m = state.user_pos.shape[0]
    n = state.uav_pos.shape[0]
    if m == 0:
        return QosReport(
            per_user_qos=np.zeros(0),
            per_uav_serving_qos=np.zeros(n),
            total_qos=0.0,
            association=np.zeros(0, dtype=np.int64),
        )
    diff = state.user_pos[:, None, :] - state.uav_pos[None, :, :]  # (m, n, 2)
    d2 = np.einsum("uni,uni->un", diff, diff).astype(np.float64)
    # argmin picks the lowest index on ties
    nearest = np.argmin(d2, axis=1)
    nearest_d2 = d2[np.arange(m), nearest]
    r2 = config.coverage_radius * config.coverage_radius
    in_range = nearest_d2 <= r2

    association = np.where(in_range, nearest, -1)
    counts = np.bincount(nearest[in_range], minlength=n)
    per_user = np.zeros(m)
    if in_range.any():
        d = np.sqrt(nearest_d2[in_range])
        share = config.uav_capacity / counts[nearest[in_range]]
        per_user[in_range] = share * (1.0 - d / config.coverage_radius)
    per_uav = np.bincount(
        nearest[in_range], weights=per_user[in_range], minlength=n
    )
    return QosReport(
        per_user_qos=per_user,
        per_uav_serving_qos=per_uav,
        total_qos=float(np.sum(per_user)),
        association=association,
    )


def observe(config: EnvConfig, state: WorldState, mode: str) -> ObservationSet:
    """Encode per-agent feature vectors under partial or full observability.

    Per agent: own position scaled to [-1, 1]; for each other UAV (ascending
    index) a [visible, dx, dy] triple with offsets normalized by
    max(width, height), zeroed when out of sensing range under POMDP; and a
    5x5 user-count grid normalized by num_users. Under POMDP the grid spans
    the square of side 2*sensing_radius centered on the agent, under FOMDP
    the whole world. Flattened x-major (index = ix*5 + iy).
    """
    if mode not in MDP_MODES:
        raise ValueError(f"mode must be one of {MDP_MODES}, got {mode!r}")
    n = config.num_uavs
    m = state.user_pos.shape[0]
    big = float(max(config.width, config.height))
    feats = np.zeros((n, obs_dim(config)))

    pos = state.uav_pos.astype(np.float64)
    wspan = config.width - 1
    hspan = config.height - 1
    feats[:, 0] = 2.0 * pos[:, 0] / wspan - 1.0 if wspan > 0 else 0.0
    feats[:, 1] = 2.0 * pos[:, 1] / hspan - 1.0 if hspan > 0 else 0.0

    offsets = pos[None, :, :] - pos[:, None, :]  # (i, j, 2) = pos_j - pos_i
    if mode == POMDP:
        d2 = np.einsum("ijk,ijk->ij", offsets, offsets)
        visible = d2 <= config.sensing_radius * config.sensing_radius
    else:
        visible = np.ones((n, n), dtype=bool)

    others = [np.concatenate([np.arange(i), np.arange(i + 1, n)]) for i in range(n)]
    for i in range(n):
        js = others[i]
        vis = visible[i, js]
        triples = np.zeros((n - 1, 3))
        triples[vis, 0] = 1.0
        triples[vis, 1:] = offsets[i, js][vis] / big
        feats[i, 2 : 2 + 3 * (n - 1)] = triples.ravel()

    if m > 0:
        grid_off = 2 + 3 * (n - 1)
        users = state.user_pos.astype(np.float64)
        b = USER_GRID_BINS
        if mode == POMDP:
            s = config.sensing_radius
            cell = 2.0 * s / b
            for i in range(n):
                rel = users - pos[i]
                inside = (np.abs(rel[:, 0]) <= s) & (np.abs(rel[:, 1]) <= s)
                bx = np.clip((rel[inside, 0] + s) // cell, 0, b - 1).astype(np.int64)
                by = np.clip((rel[inside, 1] + s) // cell, 0, b - 1).astype(np.int64)
                counts = np.bincount(bx * b + by, minlength=b * b)
                counts = np.minimum(counts, m)
                feats[i, grid_off:] = counts / m
        else:
            bx = np.clip(
                users[:, 0] // (config.width / b), 0, b - 1
            ).astype(np.int64)
            by = np.clip(
                users[:, 1] // (config.height / b), 0, b - 1
            ).astype(np.int64)
            counts = np.minimum(np.bincount(bx * b + by, minlength=b * b), m)
            feats[:, grid_off:] = counts / m

    return ObservationSet(features=feats, mode=mode)
