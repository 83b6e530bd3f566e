"""Harness-level entry points: build the nodes, run them, collect outputs."""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from ..params import MultParams, Reduction
from ..schedules import EvolvingSchedule
from ..simulator import DEFAULT_ROUND_CAP, Engine, RunResult
from .alltoall import AllToAllNode
from .broadcast import BroadcastNode
from .inputs import InputMessage
from .multiplicity import MultiplicityNode
from .rmc import EpochRecord, RmcNode, estimate_path


@dataclass(frozen=True)
class SystemConfig:
    n: int
    ell: int
    T: int
    epsilon: int = 1
    i_min_hint: Fraction | None = None
    reduction: Reduction | None = None

    def __post_init__(self) -> None:
        if self.n < 2:
            raise ValueError("need n >= 2")
        if not 0 < self.ell < self.n:
            raise ValueError(f"need 0 < ell < n (ell={self.ell}, n={self.n})")
        if self.T < 1:
            raise ValueError("T must be >= 1")
        if not isinstance(self.epsilon, int) or self.epsilon < 1:
            raise ValueError("epsilon must be a positive integer")


@dataclass
class RmcOutcome:
    result: RunResult
    records: list[list[EpochRecord]] = field(default_factory=list)

    @property
    def outputs(self) -> list[int]:
        return self.result.outputs

    @property
    def rounds(self) -> int:
        return self.result.rounds


def supervisor_flags(n: int, ell: int) -> list[bool]:
    """Nodes 0..ell-1 are supervisors (a labelling known only to the harness)."""
    return [u < ell for u in range(n)]


def rmc_nodes(config: SystemConfig, supervisors: Sequence[bool] | None = None) -> list[RmcNode]:
    flags = supervisors if supervisors is not None else supervisor_flags(config.n, config.ell)
    return [RmcNode(f, config.ell, config.T, config.epsilon, config.i_min_hint, config.reduction)
            for f in flags]


def rmc_run(config: SystemConfig, schedule: EvolvingSchedule,
            round_cap: int = DEFAULT_ROUND_CAP, supervisors: Sequence[bool] | None = None,
            **engine_kwargs) -> RmcOutcome:
    _check(config, schedule)
    nodes = rmc_nodes(config, supervisors)
    accelerate = engine_kwargs.pop("accelerate", True)
    result = Engine(schedule, accelerate=accelerate).run(nodes, round_cap, **engine_kwargs)
    lead = next(nd for nd in nodes if nd.supervisor)
    result.estimate_path = estimate_path(lead.records)
    return RmcOutcome(result, [nd.records for nd in nodes])


def multiplicity_run(messages: Sequence[InputMessage], target: InputMessage, n: int,
                     schedule: EvolvingSchedule, params: MultParams,
                     round_cap: int = DEFAULT_ROUND_CAP, **engine_kwargs) -> list[int]:
    return multiplicity_result(messages, target, n, schedule, params, round_cap,
                               **engine_kwargs).outputs


def multiplicity_result(messages: Sequence[InputMessage], target: InputMessage, n: int,
                        schedule: EvolvingSchedule, params: MultParams,
                        round_cap: int = DEFAULT_ROUND_CAP, **engine_kwargs) -> RunResult:
    if len(messages) != schedule.n:
        raise ValueError("one message per node required")
    delta = sum(1 for m in messages if m == target)
    if not 1 <= delta <= len(messages):
        raise ValueError("target must be held by at least one node")
    nodes = [MultiplicityNode(m == target, params, n) for m in messages]
    accelerate = engine_kwargs.pop("accelerate", True)
    return Engine(schedule, accelerate=accelerate).run(nodes, round_cap, **engine_kwargs)


def broadcast_or(bits: Sequence[bool], schedule: EvolvingSchedule, start: int, rounds: int,
                 **engine_kwargs) -> list[bool]:
    if rounds < 1:
        raise ValueError("rounds must be >= 1")
    nodes = [BroadcastNode(bool(b), rounds) for b in bits]
    return Engine(schedule, accelerate=False).run(nodes, rounds, start=start,
                                                  **engine_kwargs).outputs


def all_to_all_result(messages: Sequence[InputMessage], config: SystemConfig,
                      schedule: EvolvingSchedule, round_cap: int = DEFAULT_ROUND_CAP,
                      supervisors: Sequence[bool] | None = None,
                      **engine_kwargs) -> tuple[RunResult, list[AllToAllNode]]:
    _check(config, schedule)
    if len(messages) != config.n:
        raise ValueError("one message per node required")
    flags = supervisors if supervisors is not None else supervisor_flags(config.n, config.ell)
    nodes = [AllToAllNode(f, m, config.ell, config.T, config.epsilon, config.i_min_hint,
                          config.reduction) for f, m in zip(flags, messages)]
    accelerate = engine_kwargs.pop("accelerate", True)
    result = Engine(schedule, accelerate=accelerate).run(nodes, round_cap, **engine_kwargs)
    lead = next(nd for nd in nodes if nd.supervisor)
    result.estimate_path = estimate_path(lead.rmc.records)
    return result, nodes


def all_to_all(messages: Sequence[InputMessage], config: SystemConfig,
               schedule: EvolvingSchedule, round_cap: int = DEFAULT_ROUND_CAP,
               **engine_kwargs) -> list[dict[str, int]]:
    result, _ = all_to_all_result(messages, config, schedule, round_cap, **engine_kwargs)
    return result.outputs


def _check(config: SystemConfig, schedule: EvolvingSchedule) -> None:
    if schedule.n != config.n:
        raise ValueError(f"schedule has {schedule.n} nodes, config says {config.n}")
    if schedule.T != config.T:
        raise ValueError(f"schedule T={schedule.T} differs from config T={config.T}")
