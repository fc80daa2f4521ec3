"""Maximally parallel, seed-reproducible step semantics.

One step of a membrane system:

1. Enumerate every individually applicable rule instance: each binding of a
   rule to concrete membranes whose consumed multiset fits the relevant
   pre-step contents and whose promoter (if any) is present in the subject.
2. Select a *maximal* multiset of instances: the chosen instances are
   jointly applicable (their combined consumption fits every membrane's
   pre-step contents, and no membrane takes part in more than one endo/exo
   move, as subject or as host), and no further applicable instance can be
   added.  Selection shuffles the instance list with the seeded generator
   and then adds greedily, so a given seed always reproduces the same
   choice; the distribution over maximal multisets is *not* uniform.
3. Apply the effects: all consumptions are charged against the pre-step
   state, productions are added, and membrane moves are carried out with
   their targets resolved against the pre-step tree.  Membrane ids never
   change, no rule creates or destroys membranes.

The mover-lock in (2) is what makes (3) well defined: because a membrane is
in at most one structural role per step, the post-step parent assignment
can be shown to be cycle-free.

If no instance is applicable the step reports ``halted`` and returns the
configuration unchanged.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

from .core import (
    Configuration,
    Membrane,
    Multiset,
    Rule,
    RuleForm,
    RuleInstance,
    iter_membranes,
    validate,
)
from .parser import Model
from .rng import RNG_ALGORITHM, SplitMix64

__all__ = [
    "EngineError",
    "InstanceBoundExceeded",
    "SelfCheckViolation",
    "EngineOptions",
    "StepResult",
    "AppliedRule",
    "TraceStep",
    "Trace",
    "enumerate_instances",
    "is_jointly_applicable",
    "step",
    "run",
    "label_totals",
]


class EngineError(RuntimeError):
    pass


class InstanceBoundExceeded(EngineError):
    """More candidate applications than the configured safety bound."""


class SelfCheckViolation(EngineError):
    """A post-step maximality or validity assertion failed (engine bug)."""


@dataclass(frozen=True)
class EngineOptions:
    seed: int = 0
    max_instances_per_step: int = 1_000_000
    self_check: bool = True

    def __post_init__(self) -> None:
        if self.max_instances_per_step < 1:
            raise ValueError("max_instances_per_step must be >= 1")


@dataclass(frozen=True)
class StepResult:
    """Outcome of one step. ``halted`` implies the configuration is the
    input object and ``applied`` is empty."""

    config: Configuration
    applied: tuple[tuple[RuleInstance, int], ...]
    halted: bool


@dataclass(frozen=True)
class AppliedRule:
    """One applied instance in a trace, with its multiplicity."""

    rule: str
    subject: int
    host: int | None
    count: int


@dataclass(frozen=True)
class TraceStep:
    index: int
    applied: tuple[AppliedRule, ...]
    halted: bool
    # Post-step object totals aggregated per membrane label.
    state: dict[str, dict[str, int]]


@dataclass(frozen=True)
class Trace:
    """Seeded, replayable record of a run."""

    seed: int
    rng: str
    steps: tuple[TraceStep, ...]
    final: Configuration

    @property
    def halted(self) -> bool:
        return bool(self.steps) and self.steps[-1].halted


# ---------------------------------------------------------------------------
# Instance enumeration

def enumerate_instances(config: Configuration, rules: Sequence[Rule]) -> list[RuleInstance]:
    """Every individually applicable binding of the rules to the tree.

    Order is deterministic: rule order, then subject id, then host id.
    """
    parents: dict[int, Membrane | None] = {config.skin.id: None}
    by_label: dict[str, list[Membrane]] = {}
    for m in iter_membranes(config.skin):
        by_label.setdefault(m.label, []).append(m)
        for child in m.children:
            parents[child.id] = m

    out: list[RuleInstance] = []
    for rule_index, rule in enumerate(rules):
        for subject in by_label.get(rule.subject, ()):
            if rule.promoter is not None and not subject.contents.contains(rule.promoter):
                continue
            parent = parents[subject.id]
            form = rule.form
            if form is RuleForm.REWRITE:
                if subject.contents.contains(rule.consumed):
                    out.append(RuleInstance(rule, subject.id,
                                            parent_id=parent.id if parent else None))
            elif form is RuleForm.ENDO:
                if parent is None or not subject.contents.contains(rule.consumed):
                    continue
                for host in parent.children:
                    if host.id != subject.id and host.label == rule.host:
                        out.append(RuleInstance(rule, subject.id, host_id=host.id,
                                                parent_id=parent.id))
            elif form is RuleForm.EXO:
                # The subject leaves its parent and becomes the parent's
                # sibling; the root has no siblings, so exo out of the skin
                # is never applicable.
                if (parent is not None and parent.label == rule.host
                        and parents[parent.id] is not None
                        and subject.contents.contains(rule.consumed)):
                    out.append(RuleInstance(rule, subject.id, host_id=parent.id,
                                            parent_id=parent.id))
            elif form is RuleForm.SEND_IN:
                if parent is not None and parent.contents.contains(rule.consumed):
                    out.append(RuleInstance(rule, subject.id, parent_id=parent.id))
            else:  # SEND_OUT
                if parent is not None and subject.contents.contains(rule.consumed):
                    out.append(RuleInstance(rule, subject.id, parent_id=parent.id))

    index_of = {id(rule): i for i, rule in enumerate(rules)}
    out.sort(key=lambda inst: (index_of[id(inst.rule)], inst.subject_id,
                               -1 if inst.host_id is None else inst.host_id))
    return out


# ---------------------------------------------------------------------------
# Joint applicability and maximal selection

def is_jointly_applicable(config: Configuration, instances: Iterable[RuleInstance]) -> bool:
    """Resource and mover-lock compatibility of a multiset of instances.

    Each instance must already be individually applicable.  True iff the
    summed consumption per membrane fits its pre-step contents and no
    membrane occurs twice across the structural roles of endo/exo moves.
    """
    demand: dict[int, dict[str, int]] = {}
    locked: set[int] = set()
    for inst in instances:
        src = demand.setdefault(inst.consumes_from, {})
        for sym, n in inst.rule.consumed.items():
            src[sym] = src.get(sym, 0) + n
        for mid in inst.structural_ids:
            if mid in locked:
                return False
            locked.add(mid)
    for mid, needs in demand.items():
        contents = config.by_id[mid].contents
        if any(contents[sym] < n for sym, n in needs.items()):
            return False
    return True


class _Selection:
    """Mutable accounting while building a maximal instance multiset."""

    def __init__(self, config: Configuration, limit: int):
        self.residual = {m.id: dict(m.contents.items()) for m in iter_membranes(config.skin)}
        self.locked: set[int] = set()
        self.chosen: dict[RuleInstance, int] = {}
        self.total = 0
        self.limit = limit

    def addable(self, inst: RuleInstance) -> int:
        """How many more copies of *inst* fit right now."""
        if inst.rule.moves_membrane and not self.locked.isdisjoint(inst.structural_ids):
            return 0
        left = self.residual[inst.consumes_from]
        k = None
        for sym, n in inst.rule.consumed.items():
            avail = left.get(sym, 0) // n
            k = avail if k is None else min(k, avail)
            if k == 0:
                return 0
        assert k is not None  # consumed is never empty
        return 1 if inst.rule.moves_membrane else k

    def take(self, inst: RuleInstance, k: int) -> None:
        self.total += k
        if self.total > self.limit:
            raise InstanceBoundExceeded(
                f"step would apply more than {self.limit} instances; runaway model?")
        left = self.residual[inst.consumes_from]
        for sym, n in inst.rule.consumed.items():
            left[sym] -= k * n
        self.locked.update(inst.structural_ids)
        self.chosen[inst] = self.chosen.get(inst, 0) + k


def _select_maximal(config: Configuration, instances: list[RuleInstance],
                    rng: SplitMix64, options: EngineOptions) -> _Selection:
    order = list(instances)
    rng.shuffle(order)
    sel = _Selection(config, options.max_instances_per_step)
    # Consumption only accumulates, so one greedy pass that takes the largest
    # multiplicity each time already reaches a maximal multiset; the loop
    # runs until a pass adds nothing, which doubles as a cheap invariant.
    added = True
    while added:
        added = False
        for inst in order:
            k = sel.addable(inst)
            if k > 0:
                sel.take(inst, k)
                added = True
    return sel


# ---------------------------------------------------------------------------
# Effect application

def _apply(config: Configuration, applied: Sequence[tuple[RuleInstance, int]]) -> Configuration:
    labels: dict[int, str] = {}
    contents: dict[int, dict[str, int]] = {}
    children: dict[int, list[int]] = {}
    parent: dict[int, int | None] = {config.skin.id: None}
    for m in iter_membranes(config.skin):
        labels[m.id] = m.label
        contents[m.id] = dict(m.contents.items())
        children[m.id] = [c.id for c in m.children]
        for c in m.children:
            parent[c.id] = m.id
    pre_parent = dict(parent)

    moves: list[tuple[int, int]] = []
    for inst, k in applied:
        src = contents[inst.consumes_from]
        for sym, n in inst.rule.consumed.items():
            src[sym] = src.get(sym, 0) - k * n
            if src[sym] < 0:
                raise EngineError(
                    f"internal underflow applying {inst.rule.id!r}: joint check missed it")
        dst = contents[inst.produces_into]
        for sym, n in inst.rule.produced.items():
            dst[sym] = dst.get(sym, 0) + k * n
        if inst.rule.moves_membrane:
            if inst.rule.form is RuleForm.ENDO:
                target = inst.host_id
            else:  # EXO: out of the host, under the host's pre-step parent
                target = pre_parent[inst.host_id]  # type: ignore[index]
            assert target is not None
            moves.append((inst.subject_id, target))

    for child_id, new_parent in moves:
        children[parent[child_id]].remove(child_id)  # type: ignore[index]
        children[new_parent].append(child_id)
        parent[child_id] = new_parent

    def rebuild(mid: int) -> Membrane:
        counts = {sym: n for sym, n in contents[mid].items() if n != 0}
        return Membrane(mid, labels[mid], Multiset(counts),
                        tuple(rebuild(c) for c in children[mid]))

    return Configuration(rebuild(config.skin.id))


# ---------------------------------------------------------------------------
# The step relation and runs

def step(config: Configuration, rules: Sequence[Rule], rng: SplitMix64,
         options: EngineOptions = EngineOptions()) -> StepResult:
    """One maximally parallel step; halts when nothing is applicable."""
    instances = enumerate_instances(config, rules)
    if len(instances) > options.max_instances_per_step:
        raise InstanceBoundExceeded(
            f"{len(instances)} candidate instances exceed the bound "
            f"{options.max_instances_per_step}")
    if not instances:
        return StepResult(config, (), True)

    sel = _select_maximal(config, instances, rng, options)
    index_of = {id(rule): i for i, rule in enumerate(rules)}
    applied = tuple(sorted(
        sel.chosen.items(),
        key=lambda item: (index_of[id(item[0].rule)], item[0].subject_id,
                          -1 if item[0].host_id is None else item[0].host_id),
    ))
    new_config = _apply(config, applied)

    if options.self_check:
        leftover = [inst for inst in instances if sel.addable(inst) > 0]
        if leftover:
            raise SelfCheckViolation(
                f"step is not maximal: {len(leftover)} instances still addable")
        violations = validate(new_config)
        if violations:
            raise SelfCheckViolation(f"post-step configuration invalid: {violations}")

    return StepResult(new_config, applied, False)


def label_totals(config: Configuration) -> dict[str, dict[str, int]]:
    """Object counts of the whole tree, aggregated per membrane label."""
    totals: dict[str, dict[str, int]] = {}
    for m in iter_membranes(config.skin):
        agg = totals.setdefault(m.label, {})
        for sym, n in m.contents.items():
            agg[sym] = agg.get(sym, 0) + n
    return totals


def _summarize(applied: tuple[tuple[RuleInstance, int], ...]) -> tuple[AppliedRule, ...]:
    return tuple(AppliedRule(inst.rule.id, inst.subject_id, inst.host_id, k)
                 for inst, k in applied)


def run(model: Model, options: EngineOptions = EngineOptions(),
        max_steps: int = 10_000) -> Trace:
    """Run a model until it halts or *max_steps* steps were taken.

    The generator is seeded from ``options.seed`` and threaded through all
    steps, so equal inputs give equal traces.  The final, empty ``halted``
    step is recorded in the trace when the run reaches it.
    """
    if max_steps < 0:
        raise ValueError("max_steps must be >= 0")
    rng = SplitMix64(options.seed)
    config = model.config
    steps: list[TraceStep] = []
    for index in range(max_steps):
        result = step(config, model.rules, rng, options)
        config = result.config
        steps.append(TraceStep(index, _summarize(result.applied), result.halted,
                               label_totals(config)))
        if result.halted:
            break
    return Trace(options.seed, RNG_ALGORITHM, tuple(steps), config)
