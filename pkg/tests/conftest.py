"""Shared fixtures: corpus access and a seeded random-system generator."""

from __future__ import annotations

from pathlib import Path

import pytest

from mmsim.core import Configuration, Membrane, Multiset, Rule, RuleForm
from mmsim.rng import SplitMix64

CORPUS = Path(__file__).parent / "corpus"

LABEL_POOL = ("L0", "L1", "L2")
SYMBOL_POOL = ("s0", "s1", "s2", "s3", "s4", "s5")


@pytest.fixture
def corpus_valid() -> list[Path]:
    return sorted((CORPUS / "valid").glob("*.mm"))


@pytest.fixture
def corpus_invalid() -> list[Path]:
    return sorted((CORPUS / "invalid").glob("*.mm"))


def random_system(seed: int) -> tuple[Configuration, list[Rule]]:
    """A pseudo-random small system: at most 3 membranes, 4 rules,
    6 symbols, and per-symbol counts at most 3.

    Rule anchors and trigger symbols are biased towards labels and symbols
    actually present, so most generated systems have live steps while some
    bindings still miss on purpose.
    """
    rng = SplitMix64(seed)

    def pick(pool):
        return pool[rng.below(len(pool))]

    n_membranes = 1 + rng.below(3)
    labels = [pick(LABEL_POOL) for _ in range(n_membranes)]
    parents = [None] + [rng.below(i) for i in range(1, n_membranes)]
    children: dict[int, list[int]] = {i: [] for i in range(n_membranes)}
    for i in range(1, n_membranes):
        children[parents[i]].append(i)

    contents: list[dict[str, int]] = []
    present_symbols: list[str] = []
    for _ in range(n_membranes):
        picks: dict[str, int] = {}
        for _ in range(1 + rng.below(3)):
            sym = pick(SYMBOL_POOL)
            picks[sym] = min(3, picks.get(sym, 0) + 1 + rng.below(3))
        contents.append(picks)
        present_symbols.extend(picks)

    def build(i: int) -> Membrane:
        return Membrane(i, labels[i], Multiset(contents[i]),
                        tuple(build(c) for c in children[i]))

    config = Configuration(build(0))

    def rule_label() -> str:
        return pick(labels) if rng.below(4) else pick(LABEL_POOL)

    def rule_symbol() -> str:
        return pick(present_symbols) if rng.below(4) else pick(SYMBOL_POOL)

    def multiset(max_entries: int, max_count: int, min_entries: int = 0) -> Multiset:
        n = min_entries + rng.below(max_entries - min_entries + 1)
        picks: dict[str, int] = {}
        for _ in range(n):
            picks[rule_symbol()] = 1 + rng.below(max_count)
        return Multiset(picks)

    forms = (RuleForm.REWRITE, RuleForm.ENDO, RuleForm.EXO, RuleForm.SEND_IN,
             RuleForm.SEND_OUT)
    rules: list[Rule] = []
    for r in range(1 + rng.below(4)):
        form = pick(forms)
        host = rule_label() if form in (RuleForm.ENDO, RuleForm.EXO) else None
        consumed = multiset(2, 2, min_entries=1)
        produced = multiset(2, 2)
        promoter = multiset(1, 1, min_entries=1) if rng.below(4) == 0 else None
        rules.append(Rule(f"r{r}", form, rule_label(), consumed, produced,
                          host=host, promoter=promoter))
    return config, rules
