"""Folded subgroup automata for finitely generated subgroups of free groups.

A :class:`SubgroupAutomaton` is the core graph of the Stallings folding
of a wedge of generator loops: a connected, folded, labeled graph whose
reduced loops at the base state spell exactly the subgroup.  Queries are
pure; automata are immutable after construction.
"""

from __future__ import annotations

from typing import Iterator, Sequence

from .words import Word, letter_key, iter_reduced_words


class SubgroupAutomaton:
    """Membership automaton for the subgroup generated by a word list."""

    def __init__(self, generators: Sequence[Word]):
        self.generators = tuple(generators)
        adj = _fold(self.generators)
        self._adj = adj
        self.base = 0

    # -- structure -----------------------------------------------------------

    @property
    def num_states(self) -> int:
        return len(self._adj)

    @property
    def num_edges(self) -> int:
        return sum(1 for table in self._adj for letter in table if letter > 0)

    def rank(self) -> int:
        """Euler characteristic count: edges - states + 1."""
        return self.num_edges - self.num_states + 1

    def is_rose(self, ambient_rank: int) -> bool:
        return self.num_states == 1 and self.rank() == ambient_rank

    def signature(self) -> tuple:
        """Canonical form: isomorphic folded automata share a signature.

        States are already numbered by breadth-first order from the base
        with letters sorted, which is canonical for folded graphs.
        """
        return tuple(
            tuple(sorted(table.items(), key=lambda kv: letter_key(kv[0])))
            for table in self._adj
        )

    # -- queries ---------------------------------------------------------------

    def step(self, state: int, letter: int) -> int | None:
        return self._adj[state].get(letter)

    def walk(self, word: Word, start: int = 0) -> int | None:
        """End state of reading a reduced word, or None if it leaves the graph."""
        state = start
        for letter in word:
            nxt = self._adj[state].get(letter)
            if nxt is None:
                return None
            state = nxt
        return state

    def contains(self, w: Word) -> bool:
        return self.walk(w) == self.base

    def iter_members(self, max_len: int) -> Iterator[Word]:
        """All subgroup elements of length <= max_len, by length then lex.

        Enumerates reduced words readable from the base (paths in the
        folded graph), yielding the loops; the enumeration never builds
        words the automaton cannot read.
        """
        for length in range(max_len + 1):
            yield from self._iter_loops(length)

    def _iter_loops(self, length: int) -> Iterator[Word]:
        adj = self._adj
        base = self.base
        current: list[int] = []

        def rec(state: int, remaining: int) -> Iterator[Word]:
            if remaining == 0:
                if state == base:
                    yield Word._unsafe(tuple(current))
                return
            for letter in sorted(adj[state], key=letter_key):
                if current and current[-1] == -letter:
                    continue
                current.append(letter)
                yield from rec(adj[state][letter], remaining - 1)
                current.pop()

        yield from rec(base, length)

    # -- basis rewriting ---------------------------------------------------

    def _tree_and_basis(self):
        if not hasattr(self, "_tree_edges"):
            tree: set[tuple[int, int, int]] = set()
            seen = {self.base}
            queue = [self.base]
            while queue:
                s = queue.pop(0)
                for letter in sorted(self._adj[s], key=letter_key):
                    t = self._adj[s][letter]
                    if t not in seen:
                        seen.add(t)
                        queue.append(t)
                        tree.add((s, letter, t) if letter > 0 else (t, -letter, s))
            index: dict[tuple[int, int, int], int] = {}
            for s in range(self.num_states):
                for letter in sorted(self._adj[s], key=letter_key):
                    if letter < 0:
                        continue
                    edge = (s, letter, self._adj[s][letter])
                    if edge not in tree and edge not in index:
                        index[edge] = len(index) + 1
            self._tree_edges = tree
            self._basis_index = index
        return self._tree_edges, self._basis_index

    def rewrite(self, w: Word) -> Word:
        """Express a subgroup element in the Stallings basis of the subgroup.

        Tree edges of the breadth-first spanning tree contribute nothing;
        each crossing of a non-tree edge emits that basis letter.  The
        result lives in a free group of rank == self.rank().
        """
        tree, index = self._tree_and_basis()
        state = self.base
        out: list[int] = []
        for letter in w:
            nxt = self._adj[state].get(letter)
            if nxt is None:
                raise ValueError(f"{w} is not in the subgroup")
            edge = (state, letter, nxt) if letter > 0 else (nxt, -letter, state)
            if edge not in tree:
                out.append(index[edge] if letter > 0 else -index[edge])
            state = nxt
        if state != self.base:
            raise ValueError(f"{w} is not in the subgroup")
        return Word(out)

    def __repr__(self) -> str:
        return (
            f"SubgroupAutomaton(states={self.num_states}, "
            f"edges={self.num_edges}, rank={self.rank()})"
        )


def _fold(generators: Sequence[Word]) -> list[dict[int, int]]:
    """Fold the wedge of generator loops into a core graph.

    The wedge is kept as a flat edge list; folding repeatedly merges the
    two targets of any pair of equally-labeled edges at one state until
    none remain.  Quadratic in the input size, which is tiny here.
    """
    edges: list[tuple[int, int, int]] = []
    n_states = 1
    for w in generators:
        if w.is_identity:
            continue
        letters = w.letters
        prev = 0
        for letter in letters[:-1]:
            edges.append((prev, letter, n_states))
            prev = n_states
            n_states += 1
        edges.append((prev, letters[-1], 0))

    parent = list(range(n_states))

    def find(x: int) -> int:
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    while True:
        seen: dict[tuple[int, int], int] = {}
        merge: tuple[int, int] | None = None
        for s, letter, t in edges:
            s, t = find(s), find(t)
            for key, target in (((s, letter), t), ((t, -letter), s)):
                other = seen.get(key)
                if other is None:
                    seen[key] = target
                elif other != target:
                    merge = (other, target)
                    break
            if merge:
                break
        if merge is None:
            break
        a, b = merge
        if b == find(0):
            a, b = b, a
        parent[find(b)] = find(a)

    tables: dict[int, dict[int, int]] = {}
    for s, letter, t in edges:
        s, t = find(s), find(t)
        tables.setdefault(s, {})[letter] = t
        tables.setdefault(t, {})[-letter] = s
    base = find(0)
    tables.setdefault(base, {})

    # trim hair: non-base states of degree <= 1 cannot lie on any loop
    changed = True
    while changed:
        changed = False
        for s in list(tables):
            if s != base and len(tables[s]) <= 1:
                for letter, t in tables[s].items():
                    del tables[t][-letter]
                del tables[s]
                changed = True

    # canonical renumbering: breadth-first from the base, letters sorted
    order: dict[int, int] = {base: 0}
    queue = [base]
    while queue:
        s = queue.pop(0)
        for letter in sorted(tables[s], key=letter_key):
            t = tables[s][letter]
            if t not in order:
                order[t] = len(order)
                queue.append(t)
    out: list[dict[int, int]] = [{} for _ in order]
    for s, table in tables.items():
        out[order[s]] = {l: order[t] for l, t in table.items()}
    return out


def build(generators: Sequence[Word]) -> SubgroupAutomaton:
    return SubgroupAutomaton(generators)


def contains(automaton: SubgroupAutomaton, w: Word) -> bool:
    return automaton.contains(w)


def rank(automaton: SubgroupAutomaton) -> int:
    return automaton.rank()


def is_basis(generators: Sequence[Word], ambient_rank: int) -> bool:
    """Whether the list is a basis of the rank-`ambient_rank` free group.

    A generating set whose size equals the rank is a basis (free groups
    are Hopfian), so it suffices that the list has exactly ambient_rank
    entries and folds to the full rose.
    """
    if any(w.max_generator() > ambient_rank for w in generators):
        raise ValueError("generator uses an index beyond the ambient rank")
    if len(generators) != ambient_rank:
        return False
    return SubgroupAutomaton(generators).is_rose(ambient_rank)


def is_root_closed_bounded(
    automaton: SubgroupAutomaton, max_len: int, max_exp: int
) -> tuple[bool, tuple[Word, int] | None]:
    """Check w**m in A implies w in A over |w| <= max_len, 2 <= m <= max_exp.

    Returns (True, None) if no violation exists in the box, otherwise
    (False, (w, m)) for the first violating pair in the enumeration
    order.  Candidates are enumerated as w = z * core * z^-1 and pruned
    by readability: if the path for z or for the first copy of the core
    is missing, no power of w can read as a loop, so the implication is
    vacuous there.
    """
    if max_len < 1 or max_exp < 2:
        raise ValueError("need max_len >= 1 and max_exp >= 2")
    adj = automaton._adj
    base = automaton.base

    def candidate_check(w: Word) -> tuple[Word, int] | None:
        power = w
        for m in range(2, max_exp + 1):
            power = power * w
            if automaton.walk(power) == base and not automaton.contains(w):
                return (w, m)
        return None

    def iter_conjugators(length: int) -> Iterator[tuple[tuple[int, ...], int]]:
        current: list[int] = []

        def rec(state: int, remaining: int) -> Iterator[tuple[tuple[int, ...], int]]:
            if remaining == 0:
                yield tuple(current), state
                return
            for letter in sorted(adj[state], key=letter_key):
                if current and current[-1] == -letter:
                    continue
                current.append(letter)
                yield from rec(adj[state][letter], remaining - 1)
                current.pop()

        yield from rec(base, length)

    def iter_cores(start: int, length: int, z_last: int | None) -> Iterator[tuple[int, ...]]:
        current: list[int] = []

        def rec(state: int, remaining: int) -> Iterator[tuple[int, ...]]:
            if remaining == 0:
                # cyclically reduced, and z core z^-1 reduced as written
                if current[0] != -current[-1] or len(current) == 1:
                    if z_last is None or (
                        current[0] != -z_last and current[-1] != z_last
                    ):
                        yield tuple(current)
                return
            for letter in sorted(adj[state], key=letter_key):
                if current and current[-1] == -letter:
                    continue
                current.append(letter)
                yield from rec(adj[state][letter], remaining - 1)
                current.pop()

        yield from rec(start, length)

    for total in range(1, max_len + 1):
        for z_len in range(0, (total - 1) // 2 + 1):
            core_len = total - 2 * z_len
            for z, state in iter_conjugators(z_len):
                z_last = z[-1] if z else None
                for core in iter_cores(state, core_len, z_last):
                    w = Word._unsafe(z + core + tuple(-l for l in reversed(z)))
                    hit = candidate_check(w)
                    if hit is not None:
                        return False, hit
    return True, None
