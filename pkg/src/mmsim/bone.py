"""Two-scale bone remodelling built on the carrier coupling protocol.

Bone tissue is modelled as patches whose mineralisation density in [0, 1]
is encoded as a token count out of a capacity ``D``: a patch at density
0.5 with D = 20 holds ten ``c`` tokens.  Remodelling happens at the cell
scale inside BMU ("bone multicellular unit") membranes stocked with
consumable actor tokens:

    resorption   _oc, _cb -> _f     an osteoclast token removes one
                                    delivered mineral token, leaving a
                                    free slot
    formation    _ob, _f  -> _cn    an osteoblast token fills a free slot
                                    with new mineral

Each tissue patch T_i is paired with a coupling membrane CU_i holding its
BMU_i and a carrier V_i.  The carrier drains the patch's tokens, delivers
them to the BMU, waits two steps while the rules above run, picks up what
is left plus what was formed, and deposits the result back in the patch;
one round trip per cycle token.  Because formation needs a free slot, net
growth is capped by prior resorption within the run.

Everything here returns plain models and rules; serialization is
``mmsim.parser``'s job and execution is ``mmsim.engine``'s.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .core import Configuration, Membrane, Multiset, Rule, rewrite
from .coupling import CouplingSpec, generate_carrier_protocol
from .engine import Trace
from .parser import Model

__all__ = [
    "BoneParams",
    "encode_density",
    "decode_density",
    "micro_rules",
    "build_bone_model",
    "unit_spec",
    "density_series",
    "transit_total",
    "OSTEOCLAST",
    "OSTEOBLAST",
    "FREE_SLOT",
]

OSTEOCLAST = "_oc"
OSTEOBLAST = "_ob"
FREE_SLOT = "_f"


@dataclass(frozen=True)
class BoneParams:
    """Build parameters for an n-unit bone model.

    ``capacity`` is the token count representing full mineralisation;
    ``density`` is the initial mineralisation of every tissue unit;
    ``oc``/``ob`` stock each BMU with osteoclast/osteoblast tokens;
    ``cycles`` is the number of carrier round trips per unit.
    """

    capacity: int = 20
    density: float = 0.5
    oc: int = 0
    ob: int = 0
    cycles: int = 1
    units: int = 1

    def __post_init__(self) -> None:
        if self.capacity < 1:
            raise ValueError("capacity must be >= 1")
        if not 0.0 <= self.density <= 1.0:
            raise ValueError(f"density must be within [0, 1], got {self.density}")
        if self.oc < 0 or self.ob < 0:
            raise ValueError("oc and ob must be >= 0")
        if self.cycles < 0:
            raise ValueError("cycles must be >= 0")
        if self.units < 1:
            raise ValueError("units must be >= 1")


def encode_density(density: float, capacity: int) -> int:
    """Token count for a density, rounding ties away from zero."""
    if capacity < 1:
        raise ValueError("capacity must be >= 1")
    if not 0.0 <= density <= 1.0:
        raise ValueError(f"density must be within [0, 1], got {density}")
    return min(capacity, math.floor(density * capacity + 0.5))


def decode_density(tokens: int, capacity: int) -> float:
    """Density for a token count; inverse of encode on the 1/capacity grid."""
    if capacity < 1:
        raise ValueError("capacity must be >= 1")
    if not 0 <= tokens <= capacity:
        raise ValueError(f"token count must be within [0, {capacity}], got {tokens}")
    return tokens / capacity


def micro_rules(micro_label: str = "BMU", *, delivered: str = "_cb",
                remodelled: str = "_cn") -> tuple[Rule, Rule]:
    """The BMU-scale resorption and formation rules.

    Both actor tokens are consumed on use, so ``oc``/``ob`` stocks bound
    the total remodelling work a unit can do across all cycles.
    """
    return (
        rewrite(f"{micro_label}_resorb", micro_label,
                {OSTEOCLAST: 1, delivered: 1}, {FREE_SLOT: 1}),
        rewrite(f"{micro_label}_form", micro_label,
                {OSTEOBLAST: 1, FREE_SLOT: 1}, {remodelled: 1}),
    )


def unit_spec(unit: int, cycles: int) -> CouplingSpec:
    """The coupling spec of tissue unit *unit* (1-based)."""
    return CouplingSpec(
        macro_label=f"T{unit}",
        micro_label=f"BMU{unit}",
        coupling_label=f"CU{unit}",
        carrier_label=f"V{unit}",
        payload_symbol="c",
        cycle_symbol="cyc",
        cycles=cycles,
    )


def build_bone_model(params: BoneParams) -> Model:
    """Compose ``params.units`` independent tissue/BMU pairs into one model.

    Units share symbol names but no labels, and every rule is anchored to
    unit-indexed labels, so no token can ever flow between units.
    """
    tokens = encode_density(params.density, params.capacity)
    next_id = 1  # pre-order after the skin, matching the parser's numbering
    skin_children: list[Membrane] = []
    rules: list[Rule] = []

    def membrane(label: str, contents, children=()) -> Membrane:
        nonlocal next_id
        m = Membrane(next_id, label, Multiset(contents), tuple(children))
        next_id += 1
        return m

    for unit in range(1, params.units + 1):
        spec = unit_spec(unit, params.cycles)
        tissue = membrane(spec.macro_label,
                          {spec.payload_symbol: tokens} if tokens else {})
        cu_id = next_id
        next_id += 1
        bmu_stock = {sym: n for sym, n in
                     ((OSTEOCLAST, params.oc), (OSTEOBLAST, params.ob)) if n}
        carrier_start = {spec.phase_symbols[0]: 1}
        if params.cycles:
            carrier_start[spec.cycle_symbol] = params.cycles
        bmu = membrane(spec.micro_label, bmu_stock)
        carrier = membrane(spec.carrier_label, carrier_start)
        coupling = Membrane(cu_id, spec.coupling_label, Multiset(), (bmu, carrier))
        skin_children.extend((tissue, coupling))
        rules.extend(generate_carrier_protocol(spec))
        rules.extend(micro_rules(spec.micro_label,
                                 delivered=spec.cargo_delivered,
                                 remodelled=spec.cargo_remodelled))

    skin = Membrane(0, "skin", Multiset(), tuple(skin_children))
    return Model(Configuration(skin), tuple(rules), name="bone")


def density_series(trace: Trace, unit: int, capacity: int) -> list[tuple[int, float]]:
    """Per-cycle tissue density of one unit, sampled at each deposit step.

    A cycle completes at the step where the carrier sits in its final
    phase and the returned cargo (if any) lands back in the tissue; the
    sample is the tissue's payload count right after that step.  Runs cut
    off by a step bound yield samples only for the cycles they completed.
    """
    if not trace.steps:
        return []
    spec = unit_spec(unit, 0)
    tissue, carrier = spec.macro_label, spec.carrier_label
    if tissue not in trace.steps[0].state:
        raise ValueError(f"unit {unit} out of range for this trace")
    deposit_id = spec.rule_id("deposit")
    restart_id = spec.rule_id("restart")
    final_phase = spec.phase_symbols[13]

    series: list[tuple[int, float]] = []
    sampled_prev = False
    for step in trace.steps:
        fired = {a.rule for a in step.applied}
        take = deposit_id in fired or restart_id in fired
        if not take and step.halted and not sampled_prev:
            # A last cycle with nothing to deposit fires no rule at all;
            # the parked carrier phase identifies it.
            take = step.state.get(carrier, {}).get(final_phase, 0) > 0
        if take:
            tokens = step.state.get(tissue, {}).get(spec.payload_symbol, 0)
            series.append((len(series) + 1, decode_density(tokens, capacity)))
        sampled_prev = take
    return series


def transit_total(state: dict[str, dict[str, int]], unit: int) -> int:
    """Payload-or-slot token total of one unit in a trace state snapshot.

    Sums the payload symbol and every cargo form plus free slots over the
    unit's four labels; the carrier protocol and the micro rules each
    preserve this number, so it is constant over every run.
    """
    spec = unit_spec(unit, 0)
    symbols = {spec.payload_symbol, *spec.cargo_symbols, FREE_SLOT}
    labels = (spec.macro_label, spec.micro_label, spec.coupling_label, spec.carrier_label)
    return sum(state.get(label, {}).get(sym, 0) for label in labels for sym in symbols)
