"""Round loop and whole-run orchestration.

One round: threshold, sleep/awake, election, association, traffic,
energy deduction and death, then metrics.  A run repeats rounds until
every node is dead or ``max_rounds`` is reached.
"""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass, field

import numpy as np

from . import ehorm, kernels, metrics, protocols
from .ehorm import EhormConfig, SleepQueue
from .errors import ConfigError
from .metrics import SavingsRecord, kdt
from .protocols import ClusterAssignment, ElectionState, Kind, ProtocolKind
from .radio_model import RadioParams
from .topology import Network, deploy

# heterogeneity used when the config leaves it unset
DEFAULT_HETERO = {Kind.LEACH: (0.0, 0.0), Kind.SEP: (0.1, 1.0), Kind.DEEC: (0.1, 1.0)}


@dataclass(frozen=True)
class SimConfig:
    n: int = 100
    width: float = 100.0
    height: float = 100.0
    e0: float = 0.5
    p: float = 0.1
    hetero_m: float | None = None
    hetero_a: float | None = None
    packet_bits: int = 4000
    protocol: Kind = Kind.LEACH
    ehorm: bool = False
    ns_cap: int = 10
    max_rounds: int = 5000
    seed: int = 0
    radio: RadioParams = field(default_factory=RadioParams)

    def __post_init__(self):
        if isinstance(self.protocol, str):
            try:
                object.__setattr__(self, "protocol", Kind(self.protocol.lower()))
            except ValueError:
                raise ConfigError(f"protocol: expected leach, sep or deec, got {self.protocol!r}") from None
        m, a = DEFAULT_HETERO[self.protocol]
        if self.hetero_m is None:
            object.__setattr__(self, "hetero_m", m)
        if self.hetero_a is None:
            object.__setattr__(self, "hetero_a", a)
        if self.max_rounds < 1:
            raise ConfigError(f"max_rounds: must be >= 1, got {self.max_rounds}")
        if self.n < 1:
            raise ConfigError(f"n: node count must be >= 1, got {self.n}")
        if not (self.width > 0 and self.height > 0):
            raise ConfigError(f"width_m/height_m: must be > 0, got {self.width} x {self.height}")
        if not self.e0 > 0:
            raise ConfigError(f"e0_j: must be > 0, got {self.e0}")
        if not 0 <= self.hetero_m <= 1:
            raise ConfigError(f"hetero_m: must be in [0, 1], got {self.hetero_m}")
        if not self.hetero_a >= 0:
            raise ConfigError(f"hetero_a: must be >= 0, got {self.hetero_a}")
        # validated by their own constructors
        self.protocol_kind
        self.ehorm_config

    @property
    def protocol_kind(self) -> ProtocolKind:
        return ProtocolKind(self.protocol, self.p, self.hetero_m, self.hetero_a)

    @property
    def ehorm_config(self) -> EhormConfig:
        return EhormConfig(enabled=self.ehorm, ns_cap=self.ns_cap, packet_bits=self.packet_bits)

    @property
    def variant_name(self) -> str:
        return ("i" if self.ehorm else "") + self.protocol.name

    def replace(self, **changes) -> "SimConfig":
        return dataclasses.replace(self, **changes)

    def as_dict(self) -> dict:
        return {
            "n": self.n,
            "width_m": self.width,
            "height_m": self.height,
            "e0_j": self.e0,
            "p": self.p,
            "hetero_m": self.hetero_m,
            "hetero_a": self.hetero_a,
            "packet_bits": self.packet_bits,
            "protocol": self.protocol.value,
            "ehorm": "on" if self.ehorm else "off",
            "ns_cap": self.ns_cap,
            "max_rounds": self.max_rounds,
            "seed": self.seed,
            "radio": {
                "e_elec": self.radio.e_elec,
                "e_fs": self.radio.e_fs,
                "e_mp": self.radio.e_mp,
                "e_da": self.radio.e_da,
                "d0": self.radio.d0,
            },
        }


@dataclass(frozen=True)
class RoundRecord:
    round: int
    alive: int
    sleeping: int
    heads: int
    e_th: float | None
    consumed: float
    residual: float
    savings: SavingsRecord


@dataclass
class SimResult:
    """Outcome of one run.  ``records`` is empty when the run kept only alive counts."""

    records: list[RoundRecord]
    alive_series: list[int]
    fnd: int | None
    hnd: int | None
    and_: int | None
    config: SimConfig
    seed: int
    lifetime_estimate: float | None = None

    @property
    def rounds(self) -> int:
        return len(self.alive_series)

    def kdt(self, k: float) -> int | None:
        return kdt(self.alive_series, k, self.config.n)

    @property
    def total_saved(self) -> float:
        return float(sum(r.savings.e_save_total for r in self.records))


@dataclass(frozen=True)
class RoundTrace:
    """Everything one round decided; returned by :func:`play_round` for inspection."""

    record: RoundRecord
    assignment: ClusterAssignment
    can_send: np.ndarray
    requested: np.ndarray
    deducted: np.ndarray
    died: np.ndarray


def play_round(net: Network, cfg: SimConfig, state: ElectionState, queue: SleepQueue, rng) -> RoundTrace:
    radio = cfg.radio
    bits = cfg.packet_bits
    ecfg = cfg.ehorm_config
    proto = cfg.protocol_kind

    e_th = None
    if ecfg.enabled:
        e_th = ehorm.compute_threshold(net, radio, bits)
        ehorm.schedule(net, queue, e_th, ecfg, net.round)

    if proto.kind is Kind.DEEC:
        prob = protocols.node_probabilities(net, proto, state)
    else:
        # class-based probabilities never change within a run
        if state.fixed_prob is None:
            state.fixed_prob = protocols.node_probabilities(net, proto, state)
        prob = state.fixed_prob
    draws = rng.random(net.n)
    heads, member_of, can_send, requested, deducted, died, _, saved, c_total, c_size = kernels.play(
        net, state.barred, prob, draws, e_th, bits, radio
    )
    assignment = ClusterAssignment(heads, member_of)
    sleepers = np.flatnonzero(net.asleep)
    savings = metrics.savings_record(
        sleepers, saved[sleepers], assignment, deducted, net.n, clusters=(c_total, c_size)
    )
    net.round += 1
    record = RoundRecord(
        round=net.round,
        alive=int(np.count_nonzero(net.alive)),
        sleeping=len(queue),
        heads=len(heads),
        e_th=e_th,
        consumed=float(deducted.sum()),
        residual=float(net.energy.sum()),
        savings=savings,
    )
    return RoundTrace(record, assignment, can_send, requested, deducted, died)


def step(net: Network, cfg: SimConfig, state: ElectionState, queue: SleepQueue, rng) -> RoundRecord:
    """Advance ``net`` by one round in place and return its record."""
    return play_round(net, cfg, state, queue, rng).record


class Simulation:
    """One seeded run: owns its network, election state, sleep queue and generator."""

    def __init__(self, cfg: SimConfig, keep_records: bool = True):
        self.cfg = cfg
        self.keep_records = keep_records
        self.rng = np.random.default_rng(cfg.seed)
        self.net = deploy(
            cfg.n, cfg.width, cfg.height, cfg.e0, (cfg.hetero_m, cfg.hetero_a), rng=self.rng
        )
        self.lifetime_estimate = None
        if cfg.protocol is Kind.DEEC:
            self.lifetime_estimate = protocols.estimate_lifetime(
                self.net, cfg.protocol_kind, cfg.radio, cfg.packet_bits, cfg.seed
            )
        self.state = ElectionState.fresh(self.net, self.lifetime_estimate)
        self.queue = SleepQueue()
        self.records: list[RoundRecord] = []
        self.alive_series: list[int] = []

    @property
    def finished(self) -> bool:
        return self.net.round >= self.cfg.max_rounds or not self.net.alive.any()

    def play(self) -> RoundTrace:
        trace = play_round(self.net, self.cfg, self.state, self.queue, self.rng)
        self.alive_series.append(trace.record.alive)
        if self.keep_records:
            self.records.append(trace.record)
        return trace

    def step(self) -> RoundRecord:
        return self.play().record

    def run(self) -> SimResult:
        while not self.finished:
            trace = self.play()
            if not self.keep_records and self.cfg.ehorm and not trace.can_send.any():
                # Nobody passed the gate: energies, the alive set and the
                # threshold are now fixed, and no sleeper can be woken, so no
                # node will transmit again.  Alive counts stay constant.
                self._fast_forward()
        return self.result()

    def _fast_forward(self):
        remaining = self.cfg.max_rounds - self.net.round
        self.alive_series.extend([self.alive_series[-1]] * remaining)
        self.net.round = self.cfg.max_rounds

    def result(self) -> SimResult:
        n = self.cfg.n
        alive = self.alive_series
        return SimResult(
            records=self.records,
            alive_series=alive,
            fnd=metrics.first_death(alive, n),
            hnd=kdt(alive, 50, n),
            and_=kdt(alive, 100, n),
            config=self.cfg,
            seed=self.cfg.seed,
            lifetime_estimate=self.lifetime_estimate,
        )


def run(cfg: SimConfig, keep_records: bool = True) -> SimResult:
    return Simulation(cfg, keep_records).run()


def _run_lean(cfg: SimConfig) -> SimResult:
    return run(cfg, keep_records=False)


def run_many(configs, jobs: int = 1, keep_records: bool = True) -> list[SimResult]:
    """Run independent configurations, in input order, optionally across processes."""
    configs = list(configs)
    worker = run if keep_records else _run_lean
    if jobs <= 1 or len(configs) <= 1:
        return [worker(c) for c in configs]
    from concurrent.futures import ProcessPoolExecutor

    with ProcessPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(worker, configs))


def median_round(values) -> float | None:
    """Median of lifetime rounds where None means "not reached" (ranks above every round).

    Returns None when the median itself falls on an unreached value.
    """
    ranked = sorted(float("inf") if v is None else float(v) for v in values)
    if not ranked:
        return None
    mid = len(ranked) // 2
    med = ranked[mid] if len(ranked) % 2 else (ranked[mid - 1] + ranked[mid]) / 2
    return None if med == float("inf") else med


def lifetime_medians(results) -> dict:
    results = list(results)
    return {
        "fnd": median_round(r.fnd for r in results),
        "hnd": median_round(r.hnd for r in results),
        "and": median_round(r.and_ for r in results),
        "runs": len(results),
    }
