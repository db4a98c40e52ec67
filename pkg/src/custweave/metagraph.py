"""Metagraph algebra: set-to-set edges, adjacency and closure matrices.

A metagraph is a generating set of elements plus directed edges whose
endpoints are *sets* of elements (invertex -> outvertex). The adjacency
matrix cell (x, y) collects one triple per edge leading from x to y; the
closure matrix extends this to every simple path (no repeated edge) of any
length. All values here are immutable and every operation is a pure
function, so they can be shared freely across threads.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Iterator, Mapping, Optional, Sequence

from .errors import (
    DomainMismatch,
    DuplicateEdgeId,
    EmptyEdge,
    NotInVertex,
    UnknownEdge,
    UnknownElement,
)


@dataclass(frozen=True)
class Edge:
    """A directed set-to-set edge. Either vertex set may be empty, not both."""

    id: str
    invertex: frozenset[str]
    outvertex: frozenset[str]

    def __repr__(self) -> str:
        return (
            f"Edge({self.id!r}, "
            f"{{{', '.join(sorted(self.invertex))}}} -> "
            f"{{{', '.join(sorted(self.outvertex))}}})"
        )


def edge(edge_id: str, invertex: Iterable[str], outvertex: Iterable[str]) -> Edge:
    """Build an Edge from any iterables of element ids."""
    return Edge(edge_id, frozenset(invertex), frozenset(outvertex))


@dataclass(frozen=True)
class Metagraph:
    """An immutable metagraph: generating set plus edges, indexed by edge id."""

    elements: frozenset[str]
    edges: tuple[Edge, ...]

    def __post_init__(self):
        object.__setattr__(self, "_by_id", {e.id: e for e in self.edges})

    def edge(self, edge_id: str) -> Edge:
        try:
            return self._by_id[edge_id]
        except KeyError:
            raise UnknownEdge(edge_id) from None

    def has_edge(self, edge_id: str) -> bool:
        return edge_id in self._by_id

    @property
    def edge_ids(self) -> tuple[str, ...]:
        return tuple(e.id for e in self.edges)

    def __eq__(self, other) -> bool:
        if not isinstance(other, Metagraph):
            return NotImplemented
        return self.elements == other.elements and set(self.edges) == set(other.edges)

    def __hash__(self) -> int:
        return hash((self.elements, frozenset(self.edges)))


def new_metagraph(elements: Iterable[str], edges: Iterable[Edge]) -> Metagraph:
    """Validate and construct a metagraph.

    Raises EmptyEdge when an edge has both vertex sets empty, UnknownElement
    when an edge references an element outside the generating set, and
    DuplicateEdgeId on edge id collisions. Elements must be non-empty strings.
    """
    element_set = frozenset(elements)
    for x in element_set:
        if not isinstance(x, str) or not x:
            raise UnknownElement(f"invalid element id {x!r}")
    seen: dict[str, Edge] = {}
    for e in edges:
        if not e.id:
            raise UnknownEdge("edge with empty id")
        if e.id in seen:
            raise DuplicateEdgeId(e.id)
        seen[e.id] = e
        if not e.invertex and not e.outvertex:
            raise EmptyEdge(e.id)
        for x in e.invertex | e.outvertex:
            if x not in element_set:
                raise UnknownElement(f"edge {e.id} references {x!r}")
    ordered = tuple(sorted(seen.values(), key=lambda e: e.id))
    return Metagraph(element_set, ordered)


def coinput(x: str, e: Edge) -> frozenset[str]:
    """The other elements alongside x in e's invertex."""
    if x not in e.invertex:
        raise NotInVertex(f"{x} not in invertex of {e.id}")
    return e.invertex - {x}


def cooutput(x: str, e: Edge) -> frozenset[str]:
    """The other elements alongside x in e's outvertex."""
    if x not in e.outvertex:
        raise NotInVertex(f"{x} not in outvertex of {e.id}")
    return e.outvertex - {x}


@dataclass(frozen=True)
class Triple:
    """One adjacency/closure matrix entry: coinput, cooutput, edge sequence."""

    coinput: frozenset[str]
    cooutput: frozenset[str]
    path: tuple[str, ...]

    @property
    def length(self) -> int:
        return len(self.path)

    def sort_key(self) -> tuple:
        return (len(self.path), self.path)

    def __repr__(self) -> str:
        return (
            f"<{{{', '.join(sorted(self.coinput))}}}; "
            f"{{{', '.join(sorted(self.cooutput))}}}; "
            f"{','.join(self.path)}>"
        )


Cell = frozenset[Triple]
CellMap = Mapping[tuple[str, str], Cell]


@dataclass(frozen=True)
class TripleMatrix:
    """Sparse element-by-element matrix of triple sets.

    Absent cells mean the empty set. `truncated` marks a closure that hit its
    path-length cap before reaching a fixpoint.
    """

    elements: frozenset[str]
    cells: Mapping[tuple[str, str], Cell]
    truncated: bool = False

    def cell(self, source: str, target: str) -> Cell:
        return self.cells.get((source, target), frozenset())

    def sorted_keys(self) -> list[tuple[str, str]]:
        return sorted(self.cells)

    def iter_triples(self) -> Iterator[tuple[str, str, Triple]]:
        """All triples in deterministic (source, target, length, path) order."""
        for source, target in self.sorted_keys():
            for t in sorted(self.cells[(source, target)], key=Triple.sort_key):
                yield source, target, t

    def triple_count(self) -> int:
        return sum(len(c) for c in self.cells.values())

    def __eq__(self, other) -> bool:
        if not isinstance(other, TripleMatrix):
            return NotImplemented
        return (
            self.elements == other.elements
            and dict(self.cells) == dict(other.cells)
            and self.truncated == other.truncated
        )

    def __hash__(self):
        return hash((self.elements, frozenset(self.cells.items()), self.truncated))


def _freeze_cells(raw: dict[tuple[str, str], set[Triple]]) -> dict[tuple[str, str], Cell]:
    return {key: frozenset(triples) for key, triples in raw.items() if triples}


def build_adjacency(s: Metagraph) -> TripleMatrix:
    """Adjacency matrix: cell (x, y) holds one triple per edge from x to y."""
    raw: dict[tuple[str, str], set[Triple]] = {}
    for e in s.edges:
        for x in e.invertex:
            for y in e.outvertex:
                t = Triple(e.invertex - {x}, e.outvertex - {y}, (e.id,))
                raw.setdefault((x, y), set()).add(t)
    return TripleMatrix(s.elements, _freeze_cells(raw))


def adjacency_column(s: Metagraph, x: str) -> dict[tuple[str, str], Cell]:
    """Column x of the adjacency matrix without materializing the rest."""
    if x not in s.elements:
        raise UnknownElement(x)
    raw: dict[tuple[str, str], set[Triple]] = {}
    for e in s.edges:
        if x in e.outvertex:
            for src in e.invertex:
                t = Triple(e.invertex - {src}, e.outvertex - {x}, (e.id,))
                raw.setdefault((src, x), set()).add(t)
    return _freeze_cells(raw)


def adjacency_row(s: Metagraph, x: str) -> dict[tuple[str, str], Cell]:
    """Row x of the adjacency matrix without materializing the rest."""
    if x not in s.elements:
        raise UnknownElement(x)
    raw: dict[tuple[str, str], set[Triple]] = {}
    for e in s.edges:
        if x in e.invertex:
            for tgt in e.outvertex:
                t = Triple(e.invertex - {x}, e.outvertex - {tgt}, (e.id,))
                raw.setdefault((x, tgt), set()).add(t)
    return _freeze_cells(raw)


def sum_adjacency(a: TripleMatrix, b: TripleMatrix) -> TripleMatrix:
    """Cellwise union of two matrices over the same generating set."""
    if a.elements != b.elements:
        raise DomainMismatch("matrices have different generating sets")
    raw: dict[tuple[str, str], set[Triple]] = {k: set(v) for k, v in a.cells.items()}
    for key, triples in b.cells.items():
        raw.setdefault(key, set()).update(triples)
    return TripleMatrix(a.elements, _freeze_cells(raw), a.truncated or b.truncated)


def _path_triple(
    source: str,
    target: str,
    path: tuple[str, ...],
    union_in: frozenset[str],
    union_out: frozenset[str],
    last_edge: Edge,
) -> Triple:
    # Length-1 triples keep the edge-form coinput/cooutput so the closure
    # contains the adjacency verbatim even when an edge's vertex sets overlap.
    if len(path) == 1:
        return Triple(last_edge.invertex - {source}, last_edge.outvertex - {target}, path)
    return Triple((union_in - union_out) - {source}, union_out - {target}, path)


def closure(s: Metagraph, max_path_len: Optional[int] = None) -> TripleMatrix:
    """All simple paths up to max_path_len (default |E|), cell by cell.

    Grows paths by composition: each path from x ending at element k is
    extended with every edge leaving k that the path does not already use,
    recomputing coinput/cooutput from the whole edge sequence. Simple means
    no repeated edge id, which bounds path length by |E|; a lower cap only
    sets `truncated` when it actually cut the fixpoint short.
    """
    cap = len(s.edges) if max_path_len is None else max_path_len
    if cap < 1:
        cap = 0

    # Outgoing edges per element, in deterministic order.
    leaving: dict[str, list[Edge]] = {x: [] for x in s.elements}
    for e in s.edges:
        for x in e.invertex:
            leaving[x].append(e)

    raw: dict[tuple[str, str], set[Triple]] = {}
    # Frontier entries: (source, end element, path, union of invertices,
    # union of outvertices). A path sits in one frontier slot per end element.
    frontier: list[tuple[str, str, tuple[str, ...], frozenset[str], frozenset[str]]] = []
    seen: set[tuple[str, str, tuple[str, ...]]] = set()

    if cap >= 1:
        for e in s.edges:
            for x in sorted(e.invertex):
                for y in sorted(e.outvertex):
                    key = (x, y, (e.id,))
                    if key in seen:
                        continue
                    seen.add(key)
                    raw.setdefault((x, y), set()).add(
                        _path_triple(x, y, (e.id,), e.invertex, e.outvertex, e)
                    )
                    frontier.append((x, y, (e.id,), e.invertex, e.outvertex))

    length = 1
    truncated = False
    while frontier:
        if length >= cap:
            # Cap reached: report truncation only if another round would
            # produce at least one longer path.
            truncated = any(
                e.id not in path and e.outvertex
                for _, end, path, _, _ in frontier
                for e in leaving[end]
            )
            break
        next_frontier = []
        for source, end, path, union_in, union_out in frontier:
            for e in leaving[end]:
                if e.id in path:
                    continue
                new_path = path + (e.id,)
                new_in = union_in | e.invertex
                new_out = union_out | e.outvertex
                for y in sorted(e.outvertex):
                    key = (source, y, new_path)
                    if key in seen:
                        continue
                    seen.add(key)
                    raw.setdefault((source, y), set()).add(
                        _path_triple(source, y, new_path, new_in, new_out, e)
                    )
                    next_frontier.append((source, y, new_path, new_in, new_out))
        frontier = next_frontier
        length += 1

    return TripleMatrix(s.elements, _freeze_cells(raw), truncated)


@dataclass(frozen=True)
class PathCheck:
    """Result of testing an edge sequence as a simple path."""

    holds: bool
    coinput: frozenset[str]
    cooutput: frozenset[str]
    length: int


def is_simple_path(s: Metagraph, seq: Sequence[str], source: str, target: str) -> PathCheck:
    """Test whether `seq` is a simple path from source to target.

    Holds when source is in the first invertex, target in the last outvertex,
    consecutive edges share at least one element (outvertex with the next
    invertex), and no edge repeats. Coinput/cooutput follow the path formulas
    (net inputs minus the source; all outputs minus the target).
    """
    edges = [s.edge(eid) for eid in seq]
    empty = frozenset()
    if not edges:
        return PathCheck(False, empty, empty, 0)
    holds = (
        source in edges[0].invertex
        and target in edges[-1].outvertex
        and len({e.id for e in edges}) == len(edges)
        and all(edges[i].outvertex & edges[i + 1].invertex for i in range(len(edges) - 1))
    )
    if not holds:
        return PathCheck(False, empty, empty, len(edges))
    union_in = frozenset().union(*(e.invertex for e in edges))
    union_out = frozenset().union(*(e.outvertex for e in edges))
    return PathCheck(True, (union_in - union_out) - {source}, union_out - {target}, len(edges))


def is_metapath(
    s: Metagraph,
    edge_ids: Iterable[str],
    sources: Iterable[str],
    targets: Iterable[str],
) -> bool:
    """Test whether an edge set jointly connects `sources` to `targets`.

    True when every edge lies on some simple path from a source element to a
    target element using only these edges, all net inputs of the edge set are
    sources, and every target is produced by some edge.
    """
    chosen = [s.edge(eid) for eid in sorted(set(edge_ids))]
    b = frozenset(sources)
    c = frozenset(targets)
    for x in b | c:
        if x not in s.elements:
            raise UnknownElement(x)

    union_in = frozenset().union(*(e.invertex for e in chosen)) if chosen else frozenset()
    union_out = frozenset().union(*(e.outvertex for e in chosen)) if chosen else frozenset()
    if not (union_in - union_out) <= b:
        return False
    if not c <= union_out:
        return False

    # Cover check: enumerate simple paths (within the chosen edges) from a
    # source to a target, collecting traversed edges until all are covered.
    # Exponential in the worst case; callers pass small edge sets.
    uncovered = {e.id for e in chosen}

    def extend(path: list[Edge], used: set[str]):
        if not uncovered:
            return
        last = path[-1]
        if last.outvertex & c:
            uncovered.difference_update(e.id for e in path)
            if not uncovered:
                return
        for e in chosen:
            if e.id in used or not (last.outvertex & e.invertex):
                continue
            path.append(e)
            used.add(e.id)
            extend(path, used)
            used.discard(e.id)
            path.pop()

    for e in chosen:
        if not uncovered:
            break
        if e.invertex & b:
            extend([e], {e.id})
    return not uncovered


def is_submetagraph(s1: Metagraph, s2: Metagraph) -> bool:
    """True when s1's elements and edges are both contained in s2's."""
    return s1.elements <= s2.elements and set(s1.edges) <= set(s2.edges)


def _pure_inputs(s: Metagraph) -> frozenset[str]:
    produced = frozenset().union(*(e.outvertex for e in s.edges)) if s.edges else frozenset()
    return s.elements - produced


def _pure_outputs(s: Metagraph) -> frozenset[str]:
    used = frozenset().union(*(e.invertex for e in s.edges)) if s.edges else frozenset()
    return s.elements - used


def is_input_independent(s1: Metagraph, s2: Metagraph) -> bool:
    """Every non-pure-input element of s1 is produced only by s1's own edges.

    Pure-input status is judged against the host s2.
    """
    if not is_submetagraph(s1, s2):
        return False
    own = {e.id for e in s1.edges}
    pure = _pure_inputs(s2)
    for x in s1.elements - pure:
        for e in s2.edges:
            if x in e.outvertex and e.id not in own:
                return False
    return True


def is_output_independent(s1: Metagraph, s2: Metagraph) -> bool:
    """Every non-pure-output element of s1 is used only by s1's own edges.

    Pure-output status is judged against the host s2.
    """
    if not is_submetagraph(s1, s2):
        return False
    own = {e.id for e in s1.edges}
    pure = _pure_outputs(s2)
    for x in s1.elements - pure:
        for e in s2.edges:
            if x in e.invertex and e.id not in own:
                return False
    return True


def is_independent(s1: Metagraph, s2: Metagraph) -> bool:
    """Both input and output independent inside the host s2."""
    return is_input_independent(s1, s2) and is_output_independent(s1, s2)
