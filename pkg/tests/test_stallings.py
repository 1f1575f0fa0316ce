import itertools
import random

import pytest

from ampleforge.stallings import (
    SubgroupAutomaton,
    build,
    contains,
    is_basis,
    is_root_closed_bounded,
    rank,
)
from ampleforge.words import IDENTITY, Word, commutator, gen, iter_reduced_words, parse

e1, e2, e3, e4, e5 = (gen(i) for i in range(1, 6))


def brute_members(generators, depth=4, max_len=8):
    """All products of <= depth generators/inverses, capped at max_len letters."""
    pool = {IDENTITY}
    gens_and_inverses = [g for w in generators for g in (w, ~w)]
    frontier = {IDENTITY}
    for _ in range(depth):
        nxt = set()
        for w in frontier:
            for g in gens_and_inverses:
                prod = w * g
                if len(prod) <= max_len and prod not in pool:
                    pool.add(prod)
                    nxt.add(prod)
        frontier = nxt
    return pool


def test_build_full_group_rose():
    aut = build([e1, e2])
    assert aut.is_rose(2)
    assert aut.rank() == 2
    for w in iter_reduced_words(2, 4):
        assert aut.contains(w)


def test_build_square_of_generator():
    aut = build([e1 ** 2])
    assert aut.num_states == 2
    assert not aut.contains(e1)
    members = {w for w in aut.iter_members(6)}
    expected = {e1 ** k for k in (-6, -4, -2, 0, 2, 4, 6)}
    assert members == expected


def test_build_with_commutator():
    aut = build([e1, commutator(e1, e2)])
    assert not aut.contains(e2)
    assert aut.contains(commutator(e1, e2))
    assert aut.contains(e1)


def test_contains_examples():
    aut = build([e1, e2, e3, commutator(e4, e5)])
    assert not aut.contains(e4)
    assert aut.contains(IDENTITY)
    assert aut.contains(commutator(e4, e5))
    assert aut.contains(e1 * commutator(e4, e5) * ~e3)


def test_contains_matches_brute_enumeration():
    cases = [
        [e1 ** 2],
        [e1, commutator(e1, e2)],
        [e1 * e2, e2 * e1],
        [parse("e1 e2 e1^-1"), e2 ** 3],
    ]
    for gens in cases:
        aut = build(gens)
        members = brute_members(gens)
        for w in iter_reduced_words(2, 5):
            if w in members:
                assert aut.contains(w), f"{w} missed in <{gens}>"
        for w in members:
            if len(w) <= 8:
                assert aut.contains(w)


def test_rank_examples():
    assert rank(build([e1, e2, e3])) == 3
    assert rank(build([e1 ** 2, e2, e1 * e2 * ~e1])) == 3
    assert rank(build([commutator(e1, e2)])) == 1


def test_rank_nielsen_schreier_for_cyclic_kernels():
    # kernel of F_n -> Z/k sending every generator to 1 has index k,
    # hence rank k(n-1) + 1
    for n, k in [(2, 2), (2, 3), (3, 2)]:
        gens = []
        base_gens = [gen(i) for i in range(1, n + 1)]
        gens.append(base_gens[0] ** k)
        for j in range(k):
            for h in base_gens[1:]:
                gens.append(base_gens[0] ** j * h * base_gens[0] ** -(j + 1))
        aut = build(gens)
        assert aut.rank() == k * (n - 1) + 1


def test_fold_order_independent():
    gens = [e1 * e2, commutator(e1, e2), e2 ** 2, parse("e2 e1^-1 e2")]
    reference = build(gens).signature()
    rng = random.Random(7)
    for _ in range(10):
        shuffled = gens[:]
        rng.shuffle(shuffled)
        assert build(shuffled).signature() == reference
    # idempotence: rebuilding from the same list changes nothing
    assert build(gens).signature() == reference


def test_is_basis_examples():
    assert is_basis([e1, e2], 2)
    assert is_basis([e1, e2, e3 * commutator(e4, e5), e4, e5], 5)
    assert is_basis([e1, e1 * e2], 2)
    assert not is_basis([e1, e2 * e1 * ~e2], 2)
    with pytest.raises(ValueError):
        is_basis([e3], 2)


def test_is_basis_size_mismatch():
    assert not is_basis([e1], 2)
    assert not is_basis([e1, e2, e1 * e2], 2)


def test_root_closed_examples():
    aut = build([e1, e2, e3, commutator(e4, e5)])
    ok, witness = is_root_closed_bounded(aut, 6, 3)
    assert ok and witness is None

    bad = build([e1 ** 2])
    ok, witness = is_root_closed_bounded(bad, 2, 2)
    assert not ok
    assert witness == (e1, 2)

    full = build([e1, e2])
    ok, witness = is_root_closed_bounded(full, 4, 3)
    assert ok


def test_root_closed_conjugated_witness():
    # <e2 e1^2 e2^-1> misses the conjugated root e2 e1 e2^-1
    aut = build([e2 * e1 ** 2 * ~e2])
    ok, witness = is_root_closed_bounded(aut, 4, 2)
    assert not ok
    w, m = witness
    assert m == 2
    assert aut.contains(w ** 2) and not aut.contains(w)
    assert w == e2 * e1 * ~e2


def test_root_closed_matches_naive_scan():
    # small enough to brute force directly over all reduced words
    cases = [[e1 ** 3], [e1 * e2], [commutator(e1, e2)], [e1 ** 2, e2 ** 2]]
    for gens in cases:
        aut = build(gens)
        ok, witness = is_root_closed_bounded(aut, 4, 3)
        naive = None
        for w in iter_reduced_words(2, 4, min_len=1):
            for m in (2, 3):
                if aut.contains(w ** m) and not aut.contains(w):
                    naive = (w, m)
                    break
            if naive:
                break
        assert ok == (naive is None)
        if naive:
            found_w, found_m = witness
            assert aut.contains(found_w ** found_m)
            assert not aut.contains(found_w)
