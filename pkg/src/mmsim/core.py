"""Core value types for mobile membrane systems.

A system state (:class:`Configuration`) is a finite tree of labelled
membranes, each holding a :class:`Multiset` of symbol tokens.  Dynamics are
expressed by :class:`Rule` values of five forms:

* ``in`` (rewrite)  - replace objects inside a membrane with a given label
* ``endo``          - a membrane consumes trigger objects and moves inside a
                      sibling membrane, carrying its whole subtree
* ``exo``           - a membrane consumes trigger objects and moves out of
                      its parent, becoming the parent's sibling
* ``send-in``       - objects cross the wall from a parent into a child
* ``send-out``      - objects cross the wall from a child into its parent

A rule may carry a promoter multiset: the rule applies only where the
promoter is present in the subject membrane, but the promoter is never
consumed.

All types here are immutable values; operations return new values, so
configurations and rules can be shared freely between threads.
"""

from __future__ import annotations

import re
from collections.abc import Iterable, Iterator, Mapping
from dataclasses import dataclass
from enum import Enum
from functools import cached_property

__all__ = [
    "MAX_COUNT",
    "Symbolish",
    "is_symbol",
    "check_symbol",
    "is_reserved_symbol",
    "MultisetUnderflow",
    "Multiset",
    "EMPTY",
    "as_multiset",
    "multiset_contains",
    "multiset_add",
    "multiset_sub",
    "RuleForm",
    "Rule",
    "rewrite",
    "endo",
    "exo",
    "send_in",
    "send_out",
    "RuleInstance",
    "Membrane",
    "InvalidConfigurationError",
    "Configuration",
    "iter_membranes",
    "find_membranes",
    "validate",
    "structural_violations",
    "structurally_equal",
    "build_configuration",
    "total_objects",
    "render_tree",
]

# Counts are kept inside the signed 64-bit range so serialized traces stay
# exact in every JSON reader; exceeding it raises instead of wrapping.
MAX_COUNT = (1 << 63) - 1

# Symbols and membrane labels: optional leading underscores, then a letter,
# then letters/digits/underscores.  A leading underscore marks the reserved
# namespace used for machine-generated symbols (see mmsim.coupling).
_SYMBOL_RE = re.compile(r"\A_*[A-Za-z][A-Za-z0-9_]*\Z")

Symbolish = str


def is_symbol(name: object) -> bool:
    """True if *name* is a well-formed symbol or label token."""
    return isinstance(name, str) and _SYMBOL_RE.match(name) is not None


def check_symbol(name: object) -> str:
    if not is_symbol(name):
        raise ValueError(f"invalid symbol {name!r}")
    return name  # type: ignore[return-value]


def is_reserved_symbol(name: str) -> bool:
    """Symbols starting with an underscore belong to generated rule sets."""
    return name.startswith("_")


class MultisetUnderflow(ArithmeticError):
    """Subtraction of a multiset that is not contained in the minuend.

    Reaching this from the engine signals an engine bug, not a user error.
    """


class Multiset(Mapping):
    """An immutable finite multiset of symbols.

    Lookup of an absent symbol returns 0 (like ``collections.Counter``);
    iteration yields symbols in sorted order so that every derived
    rendering is deterministic.  Entries always have count >= 1.
    """

    __slots__ = ("_counts", "_hash")

    def __init__(self, entries: Mapping[str, int] | Iterable[tuple[str, int]] | None = None):
        counts: dict[str, int] = {}
        if entries is not None:
            items = entries.items() if isinstance(entries, Mapping) else entries
            for sym, n in items:
                check_symbol(sym)
                if isinstance(n, bool) or not isinstance(n, int):
                    raise ValueError(f"count for {sym!r} must be an int, got {n!r}")
                if n <= 0:
                    raise ValueError(f"count for {sym!r} must be >= 1, got {n}")
                total = counts.get(sym, 0) + n
                if total > MAX_COUNT:
                    raise OverflowError(f"count for {sym!r} exceeds {MAX_COUNT}")
                counts[sym] = total
        self._counts = counts
        self._hash: int | None = None

    def __getitem__(self, sym: str) -> int:
        return self._counts.get(sym, 0)

    def __iter__(self) -> Iterator[str]:
        return iter(sorted(self._counts))

    def __len__(self) -> int:
        return len(self._counts)

    def __contains__(self, sym: object) -> bool:
        return sym in self._counts

    def __bool__(self) -> bool:
        return bool(self._counts)

    def total(self) -> int:
        """Total number of objects, counting multiplicity."""
        return sum(self._counts.values())

    def contains(self, other: "Multiset") -> bool:
        """Multiset containment: every count in *other* fits inside self."""
        counts = self._counts
        return all(counts.get(s, 0) >= n for s, n in other._counts.items())

    def __add__(self, other: "Multiset") -> "Multiset":
        if not isinstance(other, Multiset):
            return NotImplemented
        out = dict(self._counts)
        for s, n in other._counts.items():
            total = out.get(s, 0) + n
            if total > MAX_COUNT:
                raise OverflowError(f"count for {s!r} exceeds {MAX_COUNT}")
            out[s] = total
        return _wrap(out)

    def __sub__(self, other: "Multiset") -> "Multiset":
        if not isinstance(other, Multiset):
            return NotImplemented
        out = dict(self._counts)
        for s, n in other._counts.items():
            left = out.get(s, 0) - n
            if left < 0:
                raise MultisetUnderflow(f"cannot remove {s}*{n}: only {out.get(s, 0)} present")
            if left == 0:
                out.pop(s, None)
            else:
                out[s] = left
        return _wrap(out)

    def __eq__(self, other: object) -> bool:
        if isinstance(other, Multiset):
            return self._counts == other._counts
        return NotImplemented

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash(frozenset(self._counts.items()))
        return self._hash

    def __str__(self) -> str:
        return ", ".join(s if n == 1 else f"{s}*{n}" for s, n in sorted(self._counts.items()))

    def __repr__(self) -> str:
        return f"Multiset({{{', '.join(f'{s!r}: {n}' for s, n in sorted(self._counts.items()))}}})"


def _wrap(counts: dict[str, int]) -> Multiset:
    # Internal constructor for already-validated count dicts.
    ms = Multiset.__new__(Multiset)
    ms._counts = counts
    ms._hash = None
    return ms


EMPTY = Multiset()


def as_multiset(value: Multiset | Mapping[str, int] | Iterable[tuple[str, int]] | None) -> Multiset:
    """Coerce dict-like values (or None) to a Multiset."""
    if value is None:
        return EMPTY
    if isinstance(value, Multiset):
        return value
    return Multiset(value)


def multiset_contains(a: Multiset, b: Multiset) -> bool:
    """True iff every symbol occurs in *a* at least as often as in *b*."""
    return a.contains(b)


def multiset_add(a: Multiset, b: Multiset) -> Multiset:
    return a + b


def multiset_sub(a: Multiset, b: Multiset) -> Multiset:
    """Multiset difference; requires ``multiset_contains(a, b)``."""
    return a - b


class RuleForm(Enum):
    REWRITE = "in"
    ENDO = "endo"
    EXO = "exo"
    SEND_IN = "send-in"
    SEND_OUT = "send-out"


_MOVE_FORMS = (RuleForm.ENDO, RuleForm.EXO)


@dataclass(frozen=True)
class Rule:
    """One rewriting or movement rule, anchored to membrane labels.

    ``subject`` is the label the rule binds to: the rewritten membrane for
    ``in``, the moving membrane for ``endo``/``exo``, and the child whose
    wall is crossed for ``send-in``/``send-out``.  ``host`` names the
    movement target (endo) or the membrane being exited (exo) and must be
    absent for the other forms.  ``consumed`` must be non-empty: there are
    no spontaneous rules.
    """

    id: str
    form: RuleForm
    subject: str
    consumed: Multiset
    produced: Multiset
    host: str | None = None
    promoter: Multiset | None = None

    def __post_init__(self) -> None:
        check_symbol(self.id)
        check_symbol(self.subject)
        object.__setattr__(self, "consumed", as_multiset(self.consumed))
        object.__setattr__(self, "produced", as_multiset(self.produced))
        if not self.consumed:
            raise ValueError(f"rule {self.id!r}: consumed multiset must be non-empty")
        if self.form in _MOVE_FORMS:
            if self.host is None:
                raise ValueError(f"rule {self.id!r}: {self.form.value} requires a host label")
            check_symbol(self.host)
        elif self.host is not None:
            raise ValueError(f"rule {self.id!r}: {self.form.value} does not take a host label")
        if self.promoter is not None:
            prom = as_multiset(self.promoter)
            object.__setattr__(self, "promoter", prom if prom else None)

    @property
    def moves_membrane(self) -> bool:
        return self.form in _MOVE_FORMS


def rewrite(rule_id: str, subject: str, consumed, produced, promoter=None) -> Rule:
    return Rule(rule_id, RuleForm.REWRITE, subject, as_multiset(consumed),
                as_multiset(produced), promoter=_opt(promoter))


def endo(rule_id: str, subject: str, host: str, consumed, produced, promoter=None) -> Rule:
    return Rule(rule_id, RuleForm.ENDO, subject, as_multiset(consumed),
                as_multiset(produced), host=host, promoter=_opt(promoter))


def exo(rule_id: str, subject: str, host: str, consumed, produced, promoter=None) -> Rule:
    return Rule(rule_id, RuleForm.EXO, subject, as_multiset(consumed),
                as_multiset(produced), host=host, promoter=_opt(promoter))


def send_in(rule_id: str, subject: str, consumed, produced, promoter=None) -> Rule:
    return Rule(rule_id, RuleForm.SEND_IN, subject, as_multiset(consumed),
                as_multiset(produced), promoter=_opt(promoter))


def send_out(rule_id: str, subject: str, consumed, produced, promoter=None) -> Rule:
    return Rule(rule_id, RuleForm.SEND_OUT, subject, as_multiset(consumed),
                as_multiset(produced), promoter=_opt(promoter))


def _opt(promoter) -> Multiset | None:
    if promoter is None:
        return None
    ms = as_multiset(promoter)
    return ms if ms else None


@dataclass(frozen=True)
class RuleInstance:
    """A rule bound to concrete membrane ids; the unit of step selection."""

    rule: Rule
    subject_id: int
    host_id: int | None = None
    parent_id: int | None = None

    @property
    def consumes_from(self) -> int:
        """Membrane id the consumed multiset is taken from."""
        if self.rule.form is RuleForm.SEND_IN:
            assert self.parent_id is not None
            return self.parent_id
        return self.subject_id

    @property
    def produces_into(self) -> int:
        """Membrane id the produced multiset is added to."""
        if self.rule.form is RuleForm.SEND_OUT:
            assert self.parent_id is not None
            return self.parent_id
        return self.subject_id

    @property
    def structural_ids(self) -> frozenset[int]:
        """Ids locked by the mover-lock: subject and host of endo/exo."""
        if self.rule.moves_membrane:
            assert self.host_id is not None
            return frozenset((self.subject_id, self.host_id))
        return frozenset()


@dataclass(frozen=True)
class Membrane:
    """A labelled compartment: objects plus nested child membranes.

    Ids must be unique across a whole configuration (checked by
    :class:`Configuration`).  Child order carries no meaning; it is kept
    stable only so serializations and traces are deterministic.
    """

    id: int
    label: str
    contents: Multiset = EMPTY
    children: tuple["Membrane", ...] = ()

    def __post_init__(self) -> None:
        if isinstance(self.id, bool) or not isinstance(self.id, int) or self.id < 0:
            raise ValueError(f"membrane id must be a non-negative int, got {self.id!r}")
        check_symbol(self.label)
        object.__setattr__(self, "contents", as_multiset(self.contents))
        object.__setattr__(self, "children", tuple(self.children))


class InvalidConfigurationError(ValueError):
    def __init__(self, violations: list[str]):
        super().__init__("invalid configuration: " + "; ".join(violations))
        self.violations = violations


@dataclass(frozen=True)
class Configuration:
    """A rooted tree of membranes; the skin is the root."""

    skin: Membrane

    def __post_init__(self) -> None:
        violations = structural_violations(self.skin)
        if violations:
            raise InvalidConfigurationError(violations)

    @classmethod
    def unchecked(cls, skin: Membrane) -> "Configuration":
        """Skip construction checks. For tests seeding deliberate faults."""
        cfg = object.__new__(cls)
        object.__setattr__(cfg, "skin", skin)
        return cfg

    @cached_property
    def by_id(self) -> dict[int, Membrane]:
        return {m.id: m for m in iter_membranes(self.skin)}

    @cached_property
    def parent_ids(self) -> dict[int, int | None]:
        parents: dict[int, int | None] = {self.skin.id: None}
        for m in iter_membranes(self.skin):
            for child in m.children:
                parents[child.id] = m.id
        return parents

    def membrane(self, membrane_id: int) -> Membrane:
        return self.by_id[membrane_id]


def iter_membranes(root: Membrane) -> Iterator[Membrane]:
    """Pre-order walk, children in stored order."""
    stack = [root]
    while stack:
        m = stack.pop()
        yield m
        stack.extend(reversed(m.children))


def find_membranes(config: Configuration, label: str) -> tuple[int, ...]:
    """Ids of all membranes with the given label, in pre-order."""
    return tuple(m.id for m in iter_membranes(config.skin) if m.label == label)


def structural_violations(root: Membrane) -> list[str]:
    """All structural faults in a membrane tree.

    Checks id uniqueness, tree-ness (no membrane object reachable twice)
    and the absence of non-positive object counts.  An empty list means
    the tree is valid.
    """
    violations: list[str] = []
    seen_ids: set[int] = set()
    seen_objects: set[int] = set()
    stack = [root]
    while stack:
        m = stack.pop()
        if id(m) in seen_objects:
            violations.append(f"shared-membrane: membrane id {m.id} reachable twice")
            continue
        seen_objects.add(id(m))
        if m.id in seen_ids:
            violations.append(f"duplicate-id: {m.id}")
        seen_ids.add(m.id)
        if not is_symbol(m.label):
            violations.append(f"bad-label: membrane {m.id} has label {m.label!r}")
        for sym, n in m.contents._counts.items():
            if not isinstance(n, int) or isinstance(n, bool) or n <= 0:
                violations.append(f"zero-count: membrane {m.id} stores {sym}*{n}")
        stack.extend(reversed(m.children))
    return violations


def validate(config: Configuration) -> list[str]:
    """Structural violations of a configuration; empty list means ok."""
    return structural_violations(config.skin)


def structurally_equal(a: Membrane | Configuration, b: Membrane | Configuration) -> bool:
    """Equality up to membrane ids: labels, contents and tree shape."""
    ma = a.skin if isinstance(a, Configuration) else a
    mb = b.skin if isinstance(b, Configuration) else b
    if ma.label != mb.label or ma.contents != mb.contents:
        return False
    if len(ma.children) != len(mb.children):
        return False
    return all(structurally_equal(ca, cb) for ca, cb in zip(ma.children, mb.children))


NestedTree = tuple  # (label, contents-mapping-or-None, [child trees])


def build_configuration(tree: NestedTree) -> Configuration:
    """Build a configuration from nested ``(label, contents, children)``
    tuples, assigning ids in pre-order starting at 0."""
    counter = 0

    def build(node: NestedTree) -> Membrane:
        nonlocal counter
        label, contents, children = node
        mid = counter
        counter += 1
        return Membrane(mid, label, as_multiset(contents), tuple(build(c) for c in children))

    return Configuration(build(tree))


def total_objects(config: Configuration) -> int:
    """Total object count over every membrane in the tree."""
    return sum(m.contents.total() for m in iter_membranes(config.skin))


def render_tree(root: Membrane, indent: str = "") -> str:
    """A small indented rendering of a membrane tree, for demos and logs."""
    body = str(root.contents)
    lines = [f"{indent}{root.label}#{root.id} {{{body}}}"]
    for child in root.children:
        lines.append(render_tree(child, indent + "  "))
    return "\n".join(lines)
