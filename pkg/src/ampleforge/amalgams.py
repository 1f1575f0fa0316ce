"""Amalgamated free products of two free groups over a cyclic edge subgroup.

An :class:`Amalgam` glues a left free group (rank ``left_rank``, its own
alphabet e1..) and a right free group along ``<u> = <v>`` for nontrivial
non-proper-power edge words u, v.  Elements are kept in normal form: a
head exponent t (the edge element u^t) followed by alternating syllables,
each the canonical representative of its right coset of the edge group in
its factor (length-then-lexicographic minimum).

Multiplication on the right is the textbook recipe: decompose the new
factor element against the coset representatives, then push the carried
edge exponents leftward syllable by syllable until they land in the head.

Towers realize an ambient free group as an iterated amalgam whose layers
glue a surface-group factor over a commutator (or chained commutator)
edge word; factor membership there is decided by subgroup automata and
factor elements stay in ambient coordinates.

Conjugacy follows the amalgam conjugacy theorem: cyclically reduce, then
split on the syllable length of the cores.  Both cores in the edge group:
exponent equality (a free factor cannot conjugate u^s to a different
power of u, and chains through the factors preserve the exponent, so the
general conjugation-chain case collapses for cyclic edge groups).  Cores
of length <= 1: conjugacy inside a factor, plus the chain through the
edge group whose one exponent is pinned by cyclic length.  Longer cores:
equal even lengths, some cyclic permutation matching after conjugation
by a bounded power of the edge.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Sequence

from . import stallings
from .words import (
    IDENTITY,
    Word,
    commutator,
    cyclic_length,
    cyclic_reduce,
    gen,
    power_exponent_of,
    primitive_root,
)


class AmalgamError(ValueError):
    pass


class ConjugacyUndecided(AmalgamError):
    """Raised when a conjugacy search hits its exponent bound."""


class FactorizationError(AmalgamError):
    """A word admits no letter-aligned alternating syllable split."""


LEFT = "L"
RIGHT = "R"


class Amalgam:
    """Two abstract free factors glued along <u> = <v>."""

    def __init__(self, left_rank: int, right_rank: int, u: Word, v: Word):
        if left_rank < 1 or right_rank < 1:
            raise AmalgamError("factor ranks must be positive")
        for name, w, rank in (("u", u, left_rank), ("v", v, right_rank)):
            if w.is_identity:
                raise AmalgamError(f"edge word {name} must be nontrivial")
            if w.max_generator() > rank:
                raise AmalgamError(f"edge word {name} leaves its factor")
            if primitive_root(w)[1] != 1:
                raise AmalgamError(f"edge word {name} must not be a proper power")
        self.left_rank = left_rank
        self.right_rank = right_rank
        self.u = u
        self.v = v

    def edge(self, side: str) -> Word:
        return self.u if side == LEFT else self.v

    def check_factor(self, side: str, w: Word) -> None:
        rank = self.left_rank if side == LEFT else self.right_rank
        if w.max_generator() > rank:
            raise AmalgamError(f"word {w} is not in the {side} factor")

    def factor_coords(self, side: str, w: Word) -> Word:
        # factors are free on their own alphabets already
        return w

    def __repr__(self) -> str:
        return (
            f"Amalgam(L={self.left_rank}, R={self.right_rank}, "
            f"u={self.u}, v={self.v})"
        )


@dataclass(frozen=True)
class NormalFormElement:
    """Head exponent plus alternating non-edge coset representatives."""

    c_exp: int
    syllables: tuple[tuple[str, Word], ...] = ()

    def __post_init__(self):
        last = None
        for side, w in self.syllables:
            if side not in (LEFT, RIGHT):
                raise AmalgamError(f"bad factor tag {side!r}")
            if w.is_identity:
                raise AmalgamError("identity cannot appear as a syllable")
            if side == last:
                raise AmalgamError("adjacent syllables must alternate factors")
            last = side

    @property
    def is_identity(self) -> bool:
        return self.c_exp == 0 and not self.syllables

    def __str__(self) -> str:
        parts = [f"u^{self.c_exp}"]
        parts += [f"{side}:{w}" for side, w in self.syllables]
        return " . ".join(parts)


NF_IDENTITY = NormalFormElement(0, ())


def syllable_length(g: NormalFormElement) -> int:
    return len(g.syllables)


def coset_rep(G, side: str, a: Word) -> tuple[int, Word]:
    """Split a = edge^k * rep with rep the minimal element of the coset.

    The scan window is exact: any exponent k with |edge^-k * a| <= |a|
    satisfies |k| <= 2|a| / |edge core| since the cyclically reduced part
    of edge^-k survives in the product up to |a| cancellations.
    """
    G.check_factor(side, a)
    if a.is_identity:
        return 0, IDENTITY
    edge = G.edge(side)
    core_len = cyclic_length(edge)
    window = 2 * len(a) // core_len + 2
    best_k, best = 0, a
    candidate_up = a
    candidate_down = a
    inv_edge = ~edge
    for k in range(1, window + 1):
        candidate_up = inv_edge * candidate_up  # edge^-k * a
        if candidate_up.sort_key() < best.sort_key():
            best_k, best = k, candidate_up
        candidate_down = edge * candidate_down  # edge^k * a
        if candidate_down.sort_key() < best.sort_key():
            best_k, best = -k, candidate_down
    return best_k, best


def _absorb_leftward(
    G, syllables: list[tuple[str, Word]], carry: int
) -> tuple[int, list[tuple[str, Word]]]:
    # right-multiply the syllable chain by edge^carry, normalizing back
    # to coset representatives; the final carry joins the head exponent.
    out: list[tuple[str, Word]] = []
    i = len(syllables) - 1
    while i >= 0 and carry != 0:
        side, w = syllables[i]
        x = w * G.edge(side) ** carry
        carry, rep = coset_rep(G, side, x)
        out.append((side, rep))
        i -= 1
    result = syllables[: i + 1] + list(reversed(out))
    return carry, result


def normal_form(
    G, syllable_input: Iterable[tuple[str, Word]]
) -> NormalFormElement:
    """Unique normal form of a product of factor elements.

    Right-to-left representative extraction: first the input is
    flattened to an alternating sequence of non-edge factor elements
    (merging neighbors, absorbing edge-group items into their left
    neighbor, the leftmost residue going to the head), then each
    syllable is replaced by its coset representative, carrying edge
    exponents leftward.
    """
    items: list[tuple[str, Word]] = []
    head = 0
    for side, w in syllable_input:
        if side not in (LEFT, RIGHT):
            raise AmalgamError(f"bad factor tag {side!r}")
        G.check_factor(side, w)
        if not w.is_identity:
            items.append((side, w))

    changed = True
    while changed:
        changed = False
        i = 0
        while i < len(items):
            side, w = items[i]
            t = power_exponent_of(w, G.edge(side))
            if t is not None:  # edge-group item (or identity)
                del items[i]
                if t != 0:
                    if i > 0:
                        pside, pw = items[i - 1]
                        items[i - 1] = (pside, pw * G.edge(pside) ** t)
                    else:
                        head += t
                changed = True
                continue
            if i + 1 < len(items) and items[i + 1][0] == side:
                items[i] = (side, w * items[i + 1][1])
                del items[i + 1]
                changed = True
                continue
            i += 1

    carry = 0
    syllables: list[tuple[str, Word]] = []
    for side, w in reversed(items):
        x = w * G.edge(side) ** carry
        carry, rep = coset_rep(G, side, x)
        syllables.append((side, rep))
    return NormalFormElement(head + carry, tuple(reversed(syllables)))


def mult_right(G, g: NormalFormElement, a: Word, side: str) -> NormalFormElement:
    """Normal form of g * a for a single factor element a.

    Implements the two-case recipe: merge with the last syllable when a
    lies in the same factor (or absorb it outright when a is in the edge
    group), otherwise open a new syllable; in every case the carried
    edge exponents travel leftward through the representatives.
    """
    G.check_factor(side, a)
    if a.is_identity:
        return g
    t = power_exponent_of(a, G.edge(side))
    syllables = list(g.syllables)
    if t is not None:  # a in the edge group
        carry, syllables = _absorb_leftward(G, syllables, t)
        return NormalFormElement(g.c_exp + carry, tuple(syllables))
    if syllables and syllables[-1][0] == side:
        last_side, last_w = syllables.pop()
        x = last_w * a
        t2 = power_exponent_of(x, G.edge(side))
        if t2 is not None:  # merge collapsed into the edge group
            carry, syllables = _absorb_leftward(G, syllables, t2)
            return NormalFormElement(g.c_exp + carry, tuple(syllables))
        carry, rep = coset_rep(G, side, x)
        carry, syllables = _absorb_leftward(G, syllables, carry)
        return NormalFormElement(
            g.c_exp + carry, tuple(syllables) + ((side, rep),)
        )
    carry, rep = coset_rep(G, side, a)
    carry, syllables = _absorb_leftward(G, syllables, carry)
    return NormalFormElement(g.c_exp + carry, tuple(syllables) + ((side, rep),))


def _nf_items(G, g: NormalFormElement) -> list[tuple[str, Word]]:
    items: list[tuple[str, Word]] = []
    if g.c_exp:
        items.append((LEFT, G.edge(LEFT) ** g.c_exp))
    items.extend(g.syllables)
    return items


def nf_multiply(G, g: NormalFormElement, h: NormalFormElement) -> NormalFormElement:
    out = g
    if h.c_exp:
        out = mult_right(G, out, G.edge(LEFT) ** h.c_exp, LEFT)
    for side, w in h.syllables:
        out = mult_right(G, out, w, side)
    return out


def nf_invert(G, g: NormalFormElement) -> NormalFormElement:
    items = [(side, ~w) for side, w in reversed(g.syllables)]
    if g.c_exp:
        items.append((LEFT, G.edge(LEFT) ** -g.c_exp))
    return normal_form(G, items)


def cyclically_reduce_amalgam(
    G, g: NormalFormElement
) -> tuple[NormalFormElement, NormalFormElement]:
    """Split g = conjugator * core * conjugator^-1 with core cyclically reduced.

    A normal form is cyclically reduced when its syllable count is 0, 1,
    or even (ends in different factors); otherwise the outer syllables
    merge around the head and the count strictly drops.
    """
    core = g
    conj = NF_IDENTITY
    while len(core.syllables) >= 2 and core.syllables[0][0] == core.syllables[-1][0]:
        side1, s1 = core.syllables[0]
        siden, sn = core.syllables[-1]
        head_word = G.edge(side1) ** core.c_exp * s1
        conj = nf_multiply(G, conj, normal_form(G, [(side1, head_word)]))
        merged = sn * G.edge(siden) ** core.c_exp * s1
        middle = list(core.syllables[1:-1])
        core = normal_form(G, middle + [(siden, merged)])
    return core, conj


def _conjugate_into_edge_exponent(
    G, side: str, x: Word, exp_bound: int
) -> int | None:
    """s with x conjugate to edge^s inside its factor, else None.

    Works in factor coordinates, where cyclic length pins |s| exactly;
    the 'search' checks at most two candidates.  The bound is still
    honored per the operation contract.
    """
    from .imaginaries import eq_conjugacy

    edge = G.factor_coords(side, G.edge(side))
    x = G.factor_coords(side, x)
    core_len = cyclic_length(edge)
    x_len = cyclic_length(x)
    if x_len % core_len:
        return None
    s = x_len // core_len
    if s > exp_bound:
        raise ConjugacyUndecided(
            f"needed edge exponent {s} exceeds bound {exp_bound}"
        )
    for candidate in (s, -s):
        if eq_conjugacy(x, edge ** candidate):
            return candidate
    return None


def conjugate_in_amalgam(
    G, g: NormalFormElement, h: NormalFormElement, exp_bound: int = 64
) -> bool:
    from .imaginaries import eq_conjugacy

    if exp_bound < 1:
        raise AmalgamError("exp_bound must be >= 1")
    gc, _ = cyclically_reduce_amalgam(G, g)
    hc, _ = cyclically_reduce_amalgam(G, h)
    n, m = len(gc.syllables), len(hc.syllables)

    if n == 0 and m == 0:
        return gc.c_exp == hc.c_exp

    if n <= 1 and m <= 1:
        # factor elements; possibly linked through the edge group
        def as_factor(nf: NormalFormElement) -> tuple[str | None, Word | None]:
            if not nf.syllables:
                return None, None  # lives in the edge group
            side, w = nf.syllables[0]
            return side, G.edge(side) ** nf.c_exp * w

        g_side, g_word = as_factor(gc)
        h_side, h_word = as_factor(hc)
        if g_side is None:
            g_exp: int | None = gc.c_exp
        if h_side is None:
            h_exp: int | None = hc.c_exp
        if g_side is not None and h_side is not None and g_side == h_side:
            if eq_conjugacy(
                G.factor_coords(g_side, g_word), G.factor_coords(h_side, h_word)
            ):
                return True
        if g_side is not None:
            g_exp = _conjugate_into_edge_exponent(G, g_side, g_word, exp_bound)
        if h_side is not None:
            h_exp = _conjugate_into_edge_exponent(G, h_side, h_word, exp_bound)
        return g_exp is not None and g_exp == h_exp

    if n != m:
        return False

    # case (iii): even equal lengths; rotate, then conjugate by edge powers
    edge_l = G.edge(LEFT)
    rotations = []
    syls = list(gc.syllables)
    for r in range(n):
        rotated = syls[r:] + syls[:r]
        # conjugating by (u^t s_1 ... s_r) moves the head behind s_r
        items = list(rotated)
        items.insert(n - r, (LEFT, edge_l ** gc.c_exp))
        rotations.append(items)
    for s in range(-exp_bound, exp_bound + 1):
        pre = [(LEFT, edge_l ** -s)]
        post = [(LEFT, edge_l ** s)]
        for items in rotations:
            if normal_form(G, pre + items + post) == hc:
                return True
    return False


# --- towers -------------------------------------------------------------------


@dataclass(frozen=True)
class TowerLayer:
    """One amalgam A_l *_<edge> <right factor> inside the ambient group."""

    index: int
    edge_word: Word
    left_generators: tuple[Word, ...]
    right_generators: tuple[int, ...]
    left_automaton: stallings.SubgroupAutomaton = field(repr=False)
    right_automaton: stallings.SubgroupAutomaton = field(repr=False)

    def edge(self, side: str) -> Word:
        return self.edge_word

    def check_factor(self, side: str, w: Word) -> None:
        automaton = self.left_automaton if side == LEFT else self.right_automaton
        if not automaton.contains(w):
            raise AmalgamError(f"word {w} is not in the {side} factor of the layer")

    def membership(self, side: str, w: Word) -> bool:
        automaton = self.left_automaton if side == LEFT else self.right_automaton
        return automaton.contains(w)

    def factor_coords(self, side: str, w: Word) -> Word:
        # conjugacy inside the factor is conjugacy of the rewritten
        # words in the factor's Stallings basis, not ambient conjugacy
        automaton = self.left_automaton if side == LEFT else self.right_automaton
        return automaton.rewrite(w)

    def flatten(self, g: NormalFormElement) -> Word:
        out = self.edge_word ** g.c_exp
        for _, w in g.syllables:
            out = out * w
        return out


@dataclass(frozen=True)
class Tower:
    """Iterated amalgam realization of an ambient free group."""

    stage: int
    variant: str  # "fig1" | "fig2"
    ambient_rank: int
    layers: tuple[TowerLayer, ...]
    base_generators: tuple[Word, ...]
    base: stallings.SubgroupAutomaton = field(repr=False)

    @property
    def top(self) -> TowerLayer:
        return self.layers[0]


def _layer(index: int, left_gens: Sequence[Word], right_idx: Sequence[int], edge: Word) -> TowerLayer:
    right_gens = tuple(right_idx)
    return TowerLayer(
        index=index,
        edge_word=edge,
        left_generators=tuple(left_gens),
        right_generators=right_gens,
        left_automaton=stallings.SubgroupAutomaton(left_gens),
        right_automaton=stallings.SubgroupAutomaton([gen(i) for i in right_gens]),
    )


def build_tower(i: int, variant: str = "fig1") -> Tower:
    """The iterated amalgam with commutator edge words.

    fig1: ambient rank 2i+5, base <e1,e2,e3,[e4,e5],...,[e_{2i+4},e_{2i+5}]>,
    layers glue the two-generator factors back, innermost pair last.
    fig2: ambient rank 2i+7, base ends with the chained commutator
    [e_{2i+4},e_{2i+5}][e_{2i+6},e_{2i+7}] and the first layer glues the
    four-generator factor over it.
    """
    if i < 0:
        raise AmalgamError("tower stage must be >= 0")
    variant = variant.lower()
    free_part = [gen(1), gen(2), gen(3)]
    pairs = [(2 * l + 4, 2 * l + 5) for l in range(i + 1)]
    comms = [commutator(gen(p), gen(q)) for p, q in pairs]
    if variant == "fig1":
        ambient = 2 * i + 5
        base_gens = free_part + comms
        layers = []
        # layer l glues <e_{2(i-l)+4}, e_{2(i-l)+5}>; left factor is the
        # base with the later-glued pairs already expanded
        for l in range(i + 1):
            p, q = pairs[i - l]
            expanded = [x for pair in pairs[i - l + 1 :] for x in pair]
            left = (
                free_part
                + [commutator(gen(a), gen(b)) for a, b in pairs[: i - l + 1]]
                + [gen(x) for x in expanded]
            )
            layers.append(_layer(l, left, (p, q), commutator(gen(p), gen(q))))
    elif variant == "fig2":
        ambient = 2 * i + 7
        chained = commutator(gen(2 * i + 4), gen(2 * i + 5)) * commutator(
            gen(2 * i + 6), gen(2 * i + 7)
        )
        base_gens = (
            free_part
            + [commutator(gen(p), gen(q)) for p, q in pairs[:i]]
            + [chained]
        )
        layers = [
            _layer(
                0,
                base_gens,
                (2 * i + 4, 2 * i + 5, 2 * i + 6, 2 * i + 7),
                chained,
            )
        ]
        for l in range(1, i + 1):
            p, q = pairs[i - l]
            expanded = [x for pair in pairs[i - l + 1 : i] for x in pair]
            expanded += [2 * i + 4, 2 * i + 5, 2 * i + 6, 2 * i + 7]
            left = (
                free_part
                + [commutator(gen(a), gen(b)) for a, b in pairs[: i - l + 1]]
                + [gen(x) for x in expanded]
            )
            layers.append(_layer(l, left, (p, q), commutator(gen(p), gen(q))))
    else:
        raise AmalgamError(f"unknown tower variant {variant!r}")
    return Tower(
        stage=i,
        variant=variant,
        ambient_rank=ambient,
        layers=tuple(layers),
        base_generators=tuple(base_gens),
        base=stallings.SubgroupAutomaton(base_gens),
    )


def tower_syllables(
    T: Tower, layer: int, w: Word
) -> list[tuple[str, Word]]:
    """Letter-aligned split of w into alternating factor syllables.

    Complete memoized search over split positions (longest syllables
    first); every piece is verified by the layer's subgroup automata.
    Raises FactorizationError when no aligned alternating split exists.
    """
    lay = T.layers[layer]
    letters = w.letters
    n = len(letters)
    if n == 0:
        return []

    ends: dict[str, list[list[int]]] = {}
    for side, automaton in ((LEFT, lay.left_automaton), (RIGHT, lay.right_automaton)):
        table: list[list[int]] = []
        for start in range(n):
            state = automaton.base
            stops: list[int] = []
            for pos in range(start, n):
                state = automaton.step(state, letters[pos])
                if state is None:
                    break
                if state == automaton.base:
                    stops.append(pos + 1)
            table.append(stops)
        ends[side] = table

    dead: set[tuple[int, str]] = set()

    def search(pos: int, last: str | None) -> list[tuple[str, Word]] | None:
        if pos == n:
            return []
        if (pos, last or "") in dead:
            return None
        for side in (LEFT, RIGHT):
            if side == last:
                continue
            for stop in reversed(ends[side][pos]):
                rest = search(stop, side)
                if rest is not None:
                    return [(side, Word._unsafe(letters[pos:stop]))] + rest
        dead.add((pos, last or ""))
        return None

    result = search(0, None)
    if result is None:
        raise FactorizationError(
            f"{w} admits no alternating factorization in layer {layer}"
        )
    return result


# --- text formats -------------------------------------------------------------


def parse_amalgam_spec(text: str):
    """Parse "amalgam L=<rank> R=<rank> u=<word> v=<word>" or "tower i=<n> fig=<1|2>"."""
    from .words import parse as parse_word
    import re

    text = text.strip()
    if text.startswith("tower"):
        fields = dict(re.findall(r"(\w+)\s*=\s*(\S+)", text))
        try:
            stage = int(fields["i"])
            fig = fields.get("fig", "1")
        except (KeyError, ValueError) as exc:
            raise AmalgamError(f"bad tower spec {text!r}") from exc
        if fig not in ("1", "2"):
            raise AmalgamError(f"bad tower figure {fig!r}")
        return build_tower(stage, f"fig{fig}")
    if text.startswith("amalgam"):
        matches = list(re.finditer(r"\b([LRuv])\s*=", text))
        if {m.group(1) for m in matches} != {"L", "R", "u", "v"}:
            raise AmalgamError(f"amalgam spec needs L=, R=, u=, v=: {text!r}")
        fields = {}
        for idx, m in enumerate(matches):
            end = matches[idx + 1].start() if idx + 1 < len(matches) else len(text)
            fields[m.group(1)] = text[m.end() : end].strip()
        try:
            return Amalgam(
                int(fields["L"]),
                int(fields["R"]),
                parse_word(fields["u"]),
                parse_word(fields["v"]),
            )
        except ValueError as exc:
            raise AmalgamError(f"bad amalgam spec {text!r}: {exc}") from exc
    raise AmalgamError(f"expected 'amalgam ...' or 'tower ...', got {text!r}")
