"""Set-of-states engine with symbolic-step accounting.

Every call to :meth:`SymbolicEngine.pre`, ``post``, ``cpre`` or ``cpre1`` is one
symbolic step, whatever the size of its argument. Boolean set algebra is free.
Cardinality tests are tallied separately in ``cardinality_ops``.

Sets are word-packed bitsets (Python ints, bit ``s`` = state ``s``). The image
operators are delegated to a backend; two are provided and both must produce
identical results and identical ledgers:

``bitset``
    neighbour bitmasks for small graphs, vectorised CSR gathers for large ones.
``scan``
    plain adjacency scans over member lists (slow reference).
"""
from __future__ import annotations

from dataclasses import asdict, dataclass
from typing import Iterable, Iterator, Sequence

import numpy as np

from .model import Digraph, MdpGraph

MASK_LIMIT = 4096  # above this many states the bitset backend switches to CSR gathers
_SMALL = 48  # member counts below this are extracted bit by bit


class UniverseMismatch(ValueError):
    pass


@dataclass
class StepLedger:
    pre_steps: int = 0
    post_steps: int = 0
    cpre_steps: int = 0
    cpre1_steps: int = 0
    cardinality_ops: int = 0
    peak_live_sets: int = 0

    @property
    def image_steps(self) -> int:
        return self.pre_steps + self.post_steps + self.cpre_steps + self.cpre1_steps

    def snapshot(self) -> "StepLedger":
        return StepLedger(**asdict(self))

    def as_dict(self) -> dict:
        d = asdict(self)
        d["image_steps"] = self.image_steps
        return d

    def __sub__(self, other: "StepLedger") -> "StepLedger":
        a, b = asdict(self), asdict(other)
        d = {k: a[k] - b[k] for k in a}
        d["peak_live_sets"] = self.peak_live_sets
        return StepLedger(**d)


@dataclass(frozen=True)
class Exact:
    count: int
    members: tuple[int, ...] = ()


@dataclass(frozen=True)
class MoreThan:
    budget: int


CardinalityVerdict = Exact | MoreThan


class StateSet:
    """Immutable set of states bound to one engine.

    Supports ``|``, ``&``, ``-``, ``^``, ``==``, ``<=`` and truthiness; mixing
    sets from different engines raises :class:`UniverseMismatch`.
    """

    __slots__ = ("engine", "bits")

    def __init__(self, engine: "SymbolicEngine", bits: int):
        self.engine = engine
        self.bits = bits
        engine._alive += 1
        if engine._alive > engine.ledger.peak_live_sets:
            engine.ledger.peak_live_sets = engine._alive

    def __del__(self):
        self.engine._alive -= 1

    def _other(self, other: "StateSet") -> int:
        if not isinstance(other, StateSet):
            return NotImplemented
        if other.engine is not self.engine:
            raise UniverseMismatch("state sets belong to different engines")
        return other.bits

    def __or__(self, other):
        return StateSet(self.engine, self.bits | self._other(other))

    def __and__(self, other):
        return StateSet(self.engine, self.bits & self._other(other))

    def __sub__(self, other):
        return StateSet(self.engine, self.bits & ~self._other(other))

    def __xor__(self, other):
        return StateSet(self.engine, self.bits ^ self._other(other))

    def __eq__(self, other):
        if not isinstance(other, StateSet):
            return NotImplemented
        return self.bits == self._other(other)

    def __le__(self, other):
        return self.bits & ~self._other(other) == 0

    def __bool__(self):
        return self.bits != 0

    def __hash__(self):
        return hash(self.bits)

    def __contains__(self, s: int) -> bool:
        return (self.bits >> s) & 1 == 1

    def __iter__(self) -> Iterator[int]:
        return iter(self.engine.ids(self))

    @property
    def size(self) -> int:
        """Exact cardinality; for reports and tests only, solvers use ``count_at_most``."""
        return self.bits.bit_count()

    def __repr__(self):
        ids = self.engine.ids(self)
        shown = ", ".join(map(str, ids[:12])) + (", ..." if len(ids) > 12 else "")
        return f"StateSet({{{shown}}})"


def _bit_ids(bits: int, limit: int | None = None) -> list[int]:
    out = []
    while bits and (limit is None or len(out) < limit):
        low = bits & -bits
        out.append(low.bit_length() - 1)
        bits ^= low
    return out


class _Packer:
    """Conversions between int bitsets and numpy index arrays for ``n`` states."""

    def __init__(self, n: int):
        self.n = n
        self.nbytes = (n + 7) // 8

    def ids(self, bits: int) -> np.ndarray:
        if bits.bit_count() < _SMALL:
            return np.array(_bit_ids(bits), dtype=np.int64)
        raw = np.frombuffer(bits.to_bytes(self.nbytes, "little"), dtype=np.uint8)
        return np.flatnonzero(np.unpackbits(raw, bitorder="little")[: self.n])

    def mask(self, bits: int) -> np.ndarray:
        raw = np.frombuffer(bits.to_bytes(self.nbytes, "little"), dtype=np.uint8)
        return np.unpackbits(raw, bitorder="little")[: self.n].astype(bool)

    def pack_ids(self, ids: np.ndarray) -> int:
        if len(ids) < _SMALL:
            bits = 0
            for v in ids.tolist():
                bits |= 1 << v
            return bits
        mask = np.zeros(self.n, dtype=bool)
        mask[ids] = True
        return int.from_bytes(np.packbits(mask, bitorder="little").tobytes(), "little")

    def pack_mask(self, mask: np.ndarray) -> int:
        return int.from_bytes(np.packbits(mask, bitorder="little").tobytes(), "little")


def _csr(n: int, adj: Sequence[Sequence[int]]) -> tuple[np.ndarray, np.ndarray]:
    indptr = np.zeros(n + 1, dtype=np.int64)
    indptr[1:] = np.cumsum([len(a) for a in adj])
    indices = np.fromiter((v for a in adj for v in a), dtype=np.int64, count=int(indptr[-1]))
    return indptr, indices


def _gather(indptr: np.ndarray, indices: np.ndarray, rows: np.ndarray) -> np.ndarray:
    starts = indptr[rows]
    lens = indptr[rows + 1] - starts
    total = int(lens.sum())
    if total == 0:
        return np.empty(0, dtype=np.int64)
    offsets = np.repeat(starts - np.cumsum(lens) + lens, lens)
    return indices[offsets + np.arange(total)]


class BitsetBackend:
    """Default backend. Results are ints (bitsets)."""

    name = "bitset"

    def __init__(self, g: Digraph, player1_bits: int):
        self.n = g.n
        self.p1 = player1_bits
        self.packer = _Packer(g.n)
        self.small = g.n <= MASK_LIMIT
        if self.small:
            self.succ_mask = [sum(1 << v for v in s) for s in g.succ]
            self.pred_mask = [sum(1 << u for u in p) for p in g.pred]
        else:
            self.s_ptr, self.s_idx = _csr(g.n, g.succ)
            self.p_ptr, self.p_idx = _csr(g.n, g.pred)

    def _image(self, bits: int, masks, ptr, idx) -> int:
        if not bits:
            return 0
        if self.small:
            out = 0
            if bits.bit_count() < _SMALL:
                for v in _bit_ids(bits):
                    out |= masks[v]
            else:
                for v in self.packer.ids(bits).tolist():
                    out |= masks[v]
            return out
        return self.packer.pack_ids(_gather(ptr, idx, self.packer.ids(bits)))

    def pre(self, bits: int) -> int:
        if self.small:
            return self._image(bits, self.pred_mask, None, None)
        return self._image(bits, None, self.p_ptr, self.p_idx)

    def post(self, bits: int) -> int:
        if self.small:
            return self._image(bits, self.succ_mask, None, None)
        return self._image(bits, None, self.s_ptr, self.s_idx)

    def _all_succ_in(self, cand: int, bits: int) -> int:
        """States of ``cand`` whose every successor lies in ``bits``."""
        if not cand:
            return 0
        if self.small:
            out = 0
            outside = ~bits
            for v in (_bit_ids(cand) if cand.bit_count() < _SMALL else self.packer.ids(cand).tolist()):
                if not self.succ_mask[v] & outside:
                    out |= 1 << v
            return out
        rows = self.packer.ids(cand)
        member = self.packer.mask(bits)
        starts = self.s_ptr[rows]
        lens = self.s_ptr[rows + 1] - starts
        ok = np.ones(len(rows), dtype=bool)
        nz = lens > 0
        if nz.any():
            hit = member[_gather(self.s_ptr, self.s_idx, rows[nz])].astype(np.int64)
            bounds = np.concatenate(([0], np.cumsum(lens[nz])[:-1]))
            ok[nz] = np.minimum.reduceat(hit, bounds) == 1
        return self.packer.pack_ids(rows[ok])

    def cpre(self, bits: int) -> int:
        pre = self.pre(bits)
        return (pre & ~self.p1) | self._all_succ_in(pre & self.p1, bits)

    def cpre1(self, bits: int) -> int:
        pre = self.pre(bits)
        return (pre & self.p1) | self._all_succ_in(pre & ~self.p1, bits)


class ScanBackend:
    """Reference backend: direct adjacency scans, no vectorisation."""

    name = "scan"

    def __init__(self, g: Digraph, player1_bits: int):
        self.g = g
        self.p1 = player1_bits

    def pre(self, bits: int) -> int:
        out = 0
        for v in _bit_ids(bits):
            for u in self.g.pred[v]:
                out |= 1 << u
        return out

    def post(self, bits: int) -> int:
        out = 0
        for u in _bit_ids(bits):
            for v in self.g.succ[u]:
                out |= 1 << v
        return out

    def _cpre(self, bits: int, existential: int) -> int:
        out = 0
        for s in range(self.g.n):
            succ = self.g.succ[s]
            if (existential >> s) & 1:
                if any((bits >> t) & 1 for t in succ):
                    out |= 1 << s
            elif succ and all((bits >> t) & 1 for t in succ):
                out |= 1 << s
        return out

    def cpre(self, bits: int) -> int:
        return self._cpre(bits, ~self.p1 & ((1 << self.g.n) - 1))

    def cpre1(self, bits: int) -> int:
        return self._cpre(bits, self.p1)


BACKENDS = {"bitset": BitsetBackend, "scan": ScanBackend}


class SymbolicEngine:
    """Image operators over one graph, charging each call to ``ledger``.

    With ``trace=True`` every image invocation is appended to ``trace`` as
    ``(op, |arg|, |result|)``.
    """

    def __init__(self, g: Digraph, backend: str = "bitset", trace: bool = False):
        self.graph = g
        self.n = g.n
        self.ledger = StepLedger()
        self._alive = 0
        self.trace: list[tuple[str, int, int]] | None = [] if trace else None
        p1 = 0
        if isinstance(g, MdpGraph):
            for s in g.player1_states:
                p1 |= 1 << s
        self._p1_bits = p1
        self._full_bits = (1 << g.n) - 1
        self.backend = BACKENDS[backend](g, p1)

    # construction (free)
    def empty(self) -> StateSet:
        return StateSet(self, 0)

    def full(self) -> StateSet:
        return StateSet(self, self._full_bits)

    def singleton(self, s: int) -> StateSet:
        self._check_id(s)
        return StateSet(self, 1 << s)

    def from_ids(self, ids: Iterable[int]) -> StateSet:
        bits = 0
        for s in ids:
            self._check_id(s)
            bits |= 1 << s
        return StateSet(self, bits)

    def player1(self) -> StateSet:
        return StateSet(self, self._p1_bits)

    def random(self) -> StateSet:
        return StateSet(self, self._full_bits & ~self._p1_bits)

    def _check_id(self, s: int) -> None:
        if not 0 <= s < self.n:
            raise UniverseMismatch(f"state {s} outside universe 0..{self.n - 1}")

    def _own(self, x: StateSet) -> int:
        if x.engine is not self:
            raise UniverseMismatch("state set belongs to a different engine")
        return x.bits

    # set algebra (free)
    def union(self, a: StateSet, b: StateSet) -> StateSet:
        return a | b

    def intersect(self, a: StateSet, b: StateSet) -> StateSet:
        return a & b

    def minus(self, a: StateSet, b: StateSet) -> StateSet:
        return a - b

    def equals(self, a: StateSet, b: StateSet) -> bool:
        return a == b

    def is_empty(self, a: StateSet) -> bool:
        return not a

    def pick(self, x: StateSet) -> StateSet:
        """Singleton of the smallest member (empty stays empty)."""
        bits = self._own(x)
        return StateSet(self, bits & -bits)

    def ids(self, x: StateSet) -> list[int]:
        """Members in ascending order. Free: for results and diagnostics."""
        bits = self._own(x)
        if bits.bit_count() < _SMALL:
            return _bit_ids(bits)
        return _Packer(self.n).ids(bits).tolist()

    # image operators (one symbolic step each)
    def _record(self, op: str, arg: int, res: int) -> None:
        if self.trace is not None:
            self.trace.append((op, arg.bit_count(), res.bit_count()))

    def pre(self, x: StateSet) -> StateSet:
        bits = self._own(x)
        self.ledger.pre_steps += 1
        res = self.backend.pre(bits)
        self._record("pre", bits, res)
        return StateSet(self, res)

    def post(self, x: StateSet) -> StateSet:
        bits = self._own(x)
        self.ledger.post_steps += 1
        res = self.backend.post(bits)
        self._record("post", bits, res)
        return StateSet(self, res)

    def cpre(self, x: StateSet) -> StateSet:
        """Random states with some successor in ``x``; player-1 states with all."""
        bits = self._own(x)
        self.ledger.cpre_steps += 1
        res = self.backend.cpre(bits)
        self._record("cpre", bits, res)
        return StateSet(self, res)

    def cpre1(self, x: StateSet) -> StateSet:
        """Player-1 states with some successor in ``x``; random states with all."""
        bits = self._own(x)
        self.ledger.cpre1_steps += 1
        res = self.backend.cpre1(bits)
        self._record("cpre1", bits, res)
        return StateSet(self, res)

    # cardinality (tallied apart from image steps)
    def count_at_most(self, x: StateSet, k: int) -> CardinalityVerdict:
        """``Exact`` (with the members) if ``|x| <= k`` else ``MoreThan(k)``.

        Enumerates members with an early stop; charges one cardinality op per
        member visited, at most ``k + 1``.
        """
        if k < 0:
            raise ValueError("budget must be non-negative")
        members = _bit_ids(self._own(x), limit=k + 1)
        self.ledger.cardinality_ops += len(members)
        if len(members) > k:
            return MoreThan(k)
        return Exact(len(members), tuple(members))

    def reset(self) -> None:
        self.ledger = StepLedger(peak_live_sets=self._alive)
        if self.trace is not None:
            self.trace.clear()
