"""MDP graphs, validation and the line-oriented ``.mdp`` text format.

Format::

    states <n>
    player1 <id> <id> ...        # remaining states are random
    edge <u> <v> [<prob>]        # prob only for random u
    target <id> <id> ...         # may repeat; union taken

``#`` starts a comment. States are dense ids ``0..n-1``.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

PROB_TOLERANCE = 1e-9


class MdpFormatError(ValueError):
    """Raised for malformed or invalid ``.mdp`` documents."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        super().__init__(f"line {line}: {message}" if line is not None else message)


def _transpose(n: int, succ: Sequence[Sequence[int]]) -> tuple[tuple[int, ...], ...]:
    pred: list[list[int]] = [[] for _ in range(n)]
    for u in range(n):
        for v in succ[u]:
            pred[v].append(u)
    return tuple(tuple(sorted(p)) for p in pred)


@dataclass(frozen=True)
class Digraph:
    """Directed graph on states ``0..n-1`` with sorted adjacency lists."""

    n: int
    succ: tuple[tuple[int, ...], ...]
    pred: tuple[tuple[int, ...], ...]

    @classmethod
    def from_edges(cls, n: int, edges: Iterable[tuple[int, int]]) -> "Digraph":
        succ = _succ_lists(n, edges)
        return cls(n, succ, _transpose(n, succ))

    @property
    def m(self) -> int:
        return sum(len(s) for s in self.succ)

    def edges(self) -> list[tuple[int, int]]:
        return [(u, v) for u in range(self.n) for v in self.succ[u]]


def _succ_lists(n: int, edges: Iterable[tuple[int, int]]) -> tuple[tuple[int, ...], ...]:
    succ: list[set[int]] = [set() for _ in range(n)]
    for u, v in edges:
        succ[u].add(v)
    return tuple(tuple(sorted(s)) for s in succ)


@dataclass(frozen=True)
class MdpGraph(Digraph):
    """An MDP graph: digraph plus the (player-1, random) owner partition.

    ``player1[s]`` is True for player-1 states. ``probs`` maps a random state
    to its successor weights; solvers never read it. ``target`` is the Büchi
    set attached by the file format (solvers take the target explicitly).
    """

    player1: tuple[bool, ...] = ()
    probs: Mapping[int, Mapping[int, Fraction]] = field(default_factory=dict)
    target: frozenset[int] = frozenset()

    @classmethod
    def build(
        cls,
        n: int,
        edges: Iterable[tuple[int, int]],
        player1: Iterable[int] = (),
        target: Iterable[int] = (),
        probs: Mapping[int, Mapping[int, Fraction]] | None = None,
    ) -> "MdpGraph":
        succ = _succ_lists(n, edges)
        p1 = set(player1)
        owner = tuple(s in p1 for s in range(n))
        return cls(n, succ, _transpose(n, succ), owner, dict(probs or {}), frozenset(target))

    @property
    def player1_states(self) -> list[int]:
        return [s for s in range(self.n) if self.player1[s]]

    @property
    def random_states(self) -> list[int]:
        return [s for s in range(self.n) if not self.player1[s]]

    def with_target(self, target: Iterable[int]) -> "MdpGraph":
        return MdpGraph(self.n, self.succ, self.pred, self.player1, self.probs, frozenset(target))


@dataclass(frozen=True)
class MemorylessStrategy:
    """Pure memoryless strategy: one chosen successor per player-1 state."""

    choice: Mapping[int, int]

    def check(self, g: MdpGraph) -> list[str]:
        errors = []
        for s, t in sorted(self.choice.items()):
            if not g.player1[s]:
                errors.append(f"state {s}: strategy defined on a random state")
            elif t not in g.succ[s]:
                errors.append(f"state {s}: chosen successor {t} is not an edge")
        return errors


def validate(g: Digraph) -> list[str]:
    """Return one message per violated invariant; empty means valid."""
    errors = []
    if len(g.succ) != g.n or len(g.pred) != g.n:
        return [f"adjacency length mismatch: n={g.n}"]
    for s in range(g.n):
        for v in g.succ[s]:
            if not 0 <= v < g.n:
                errors.append(f"edge {s}->{v}: state id out of range")
        if not g.succ[s]:
            errors.append(f"state {s}: sink state (no outgoing edge)")
        if list(g.succ[s]) != sorted(set(g.succ[s])):
            errors.append(f"state {s}: successor list not sorted/unique")
    if not errors and _transpose(g.n, g.succ) != tuple(tuple(p) for p in g.pred):
        bad = [s for s, (a, b) in enumerate(zip(_transpose(g.n, g.succ), g.pred)) if tuple(a) != tuple(b)]
        errors.append(f"transpose mismatch at states {bad}")
    if isinstance(g, MdpGraph):
        if len(g.player1) != g.n:
            errors.append("owner vector length mismatch")
        for t in sorted(g.target):
            if not 0 <= t < g.n:
                errors.append(f"target {t}: state id out of range")
        for s in sorted(g.probs):
            weights = g.probs[s]
            if not 0 <= s < g.n:
                errors.append(f"probabilities on unknown state {s}")
                continue
            if g.player1[s]:
                errors.append(f"state {s}: probabilities on a player-1 state")
                continue
            if set(weights) != set(g.succ[s]):
                errors.append(f"state {s}: probabilities not given exactly on E({s})")
            if any(w <= 0 for w in weights.values()):
                errors.append(f"state {s}: non-positive probability")
            total = sum(weights.values())
            if abs(total - 1) > PROB_TOLERANCE:
                errors.append(f"state {s}: probabilities sum {float(total):g}")
    return errors


def _int(tok: str, lineno: int) -> int:
    try:
        return int(tok)
    except ValueError:
        raise MdpFormatError(f"expected integer, got {tok!r}", lineno) from None


def parse_mdp(text: str) -> MdpGraph:
    n = None
    player1: set[int] = set()
    target: set[int] = set()
    edges: list[tuple[int, int]] = []
    seen: set[tuple[int, int]] = set()
    probs: dict[int, dict[int, Fraction]] = {}

    def check_id(s: int, lineno: int) -> int:
        if n is None:
            raise MdpFormatError("'states' must come first", lineno)
        if not 0 <= s < n:
            raise MdpFormatError(f"state id {s} out of range 0..{n - 1}", lineno)
        return s

    for lineno, raw in enumerate(text.splitlines(), start=1):
        toks = raw.split("#", 1)[0].split()
        if not toks:
            continue
        head, args = toks[0], toks[1:]
        if head == "states":
            if n is not None:
                raise MdpFormatError("duplicate 'states' directive", lineno)
            if len(args) != 1:
                raise MdpFormatError("'states' takes one argument", lineno)
            n = _int(args[0], lineno)
            if n < 1:
                raise MdpFormatError("need at least one state", lineno)
        elif head == "player1":
            player1.update(check_id(_int(a, lineno), lineno) for a in args)
        elif head == "target":
            target.update(check_id(_int(a, lineno), lineno) for a in args)
        elif head == "edge":
            if len(args) not in (2, 3):
                raise MdpFormatError("'edge' takes <u> <v> [<prob>]", lineno)
            u, v = (check_id(_int(a, lineno), lineno) for a in args[:2])
            if (u, v) in seen:
                raise MdpFormatError(f"duplicate edge {u} {v}", lineno)
            seen.add((u, v))
            edges.append((u, v))
            if len(args) == 3:
                try:
                    probs.setdefault(u, {})[v] = Fraction(args[2])
                except (ValueError, ZeroDivisionError):
                    raise MdpFormatError(f"bad probability {args[2]!r}", lineno) from None
        else:
            raise MdpFormatError(f"unknown directive {head!r}", lineno)
    if n is None:
        raise MdpFormatError("missing 'states' directive")
    for u in probs:
        if u in player1:
            raise MdpFormatError(f"probability given on player-1 state {u}")
    g = MdpGraph.build(n, edges, player1, target, probs)
    errors = validate(g)
    if errors:
        raise MdpFormatError("; ".join(errors))
    return g


def serialize_mdp(g: MdpGraph) -> str:
    lines = [f"states {g.n}"]
    p1 = g.player1_states
    if p1:
        lines.append("player1 " + " ".join(map(str, p1)))
    for u in range(g.n):
        weights = g.probs.get(u)
        for v in g.succ[u]:
            if weights is not None:
                lines.append(f"edge {u} {v} {weights[v]}")
            else:
                lines.append(f"edge {u} {v}")
    if g.target:
        lines.append("target " + " ".join(map(str, sorted(g.target))))
    return "\n".join(lines) + "\n"


def read_mdp(path) -> MdpGraph:
    with open(path, encoding="utf-8") as fh:
        return parse_mdp(fh.read())


def write_mdp(g: MdpGraph, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(serialize_mdp(g))


def m1() -> MdpGraph:
    """Four-state example used throughout the docs and tests."""
    return MdpGraph.build(
        4,
        [(0, 1), (0, 2), (1, 0), (1, 3), (2, 2), (3, 3)],
        player1=[0, 2],
        target=[2],
    )
