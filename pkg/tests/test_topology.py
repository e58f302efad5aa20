import itertools

import pytest
from hypothesis import given

from conftest import box_contained, elements, index_sets
from selgame.covers import coset_cover, meet_cover, random_cover, whole_cover, RefinementMeet, build_cover
from selgame.groups import BOX, IDENTITY, ComponentGroup, Element, GroupSpec, Window, inv, op, restrict
from selgame.topology import (
    WHOLE,
    BasicOpen,
    ContractError,
    CoverOracle,
    NbdSubgroup,
    ResourceError,
    compact_piece,
    coset,
    coset_count,
    coset_equal,
    coset_rep,
    enumerate_cosets,
    height_key,
    in_piece,
    intersect,
    lebesgue_compact,
    lebesgue_pgroup,
    member,
    open_subset,
    piece_size,
)

Z = GroupSpec.uniform(ComponentGroup.integers())
C2 = GroupSpec.uniform(ComponentGroup.cyclic(2))


def test_member_examples():
    assert member(IDENTITY, coset(IDENTITY, {0, 1}, Z), Z)
    assert member(Element([(0, 1)]), BasicOpen(((0, frozenset({1, 2})),)), Z)
    assert not member(Element([(0, 3)]), coset(Element([(0, 1)]), {0}, Z), Z)


def test_coset_examples():
    assert coset(Element([(0, 1)]), {0, 1}, Z).as_dict() == {0: {1}, 1: {0}}
    assert coset(IDENTITY, set(), Z) == WHOLE
    assert coset(Element([(2, 7)]), {0}, Z).as_dict() == {0: {0}}


def test_coset_equal_examples():
    assert coset_equal(Element([(0, 1)]), Element([(0, 1), (2, 7)]), {0, 1})
    assert not coset_equal(Element([(0, 1)]), Element([(0, 2)]), {0})
    assert coset_equal(Element([(0, 5)]), Element([(3, 1)]), set())


def test_compact_piece_examples():
    got = compact_piece(1, Window([0, 1]), Z)
    assert set(got) == {IDENTITY, Element([(0, 1)]), Element([(0, -1)]), Element([(1, 1)]), Element([(1, -1)])}
    assert len(got) == 5
    assert compact_piece(0, Window.first(5), Z) == [IDENTITY]
    assert set(compact_piece(2, Window([0]), C2)) == {IDENTITY, Element([(0, 1)])}
    with pytest.raises(ValueError):
        compact_piece(-1, Window([0]), Z)


def brute_piece(n, W, spec):
    """Independent oracle: filter every window element with small values."""
    out = set()
    comps = [spec.component(i) for i in W]
    ranges = [g.filtration(n) for g in comps]
    for vals in itertools.product(*ranges):
        x = spec.element(zip(W.indices, vals))
        if len(x) <= n:
            out.add(x)
    return out


@pytest.mark.parametrize("n", [0, 1, 2, 3])
@pytest.mark.parametrize("w", [1, 2, 3])
def test_compact_piece_matches_brute_force(n, w, spec):
    W = Window.first(w)
    got = compact_piece(n, W, spec)
    assert len(got) == len(set(got)) == piece_size(n, W, spec)
    assert set(got) == brute_piece(n, W, spec)
    assert set(got) <= set(compact_piece(n + 1, W, spec))


def test_piece_cap():
    with pytest.raises(ResourceError):
        compact_piece(3, Window.first(6), Z, cap=100)


def test_enumerate_cosets_examples():
    assert list(enumerate_cosets(set(), Z)) == [IDENTITY]
    assert list(enumerate_cosets({0}, C2)) == [IDENTITY, Element([(0, 1)])]
    first = list(itertools.islice(enumerate_cosets({0}, Z), 5))
    assert first == [IDENTITY, Element([(0, 1)]), Element([(0, -1)]), Element([(0, 2)]), Element([(0, -2)])]


@pytest.mark.parametrize("B", [(0,), (0, 2), (1, 2, 3)])
def test_enumerate_cosets_partition(spec, B):
    reps = list(itertools.islice(enumerate_cosets(B, spec), 400))
    assert len(set(reps)) == len(reps)
    for a, b in itertools.combinations(reps[:60], 2):
        assert not coset_equal(a, b, B)
    if coset_count(B, spec) is not None:
        assert len(reps) == coset_count(B, spec)
    # every window element with small values has its rep among the enumerated ones
    for x in brute_piece(2, Window.first(4), spec):
        assert restrict(x, B) in reps


@given(index_sets(range(5)), index_sets(range(5)))
def test_enumeration_monotone_in_B(B1, B2):
    small, big = B1, B1 | B2
    big_reps = set(itertools.islice(enumerate_cosets(big, Z), 3000))
    for x in itertools.islice(enumerate_cosets(small, Z), 50):
        assert x in big_reps or height_key(x, Z)[0] > 2


def test_height_key_matches_enumeration():
    reps = list(itertools.islice(enumerate_cosets({0, 1, 2}, Z), 300))
    assert reps == sorted(reps, key=lambda x: height_key(x, Z))


def test_coset_rep_and_open_subset():
    O = coset(Element([(0, 2)]), {0, 1}, Z)
    assert coset_rep(O, Z) == Element([(0, 2)])
    assert coset_rep(BasicOpen(((0, frozenset({1, 2})),)), Z) is None
    assert open_subset(O, coset(Element([(0, 2)]), {0}, Z), Z)
    assert not open_subset(coset(Element([(0, 2)]), {0}, Z), O, Z)
    assert intersect(coset(Element([(0, 1)]), {0}, Z), coset(Element([(0, 2)]), {0}, Z)) is None


@given(elements(Z), elements(Z), index_sets(), index_sets())
def test_coset_laws_integers(x, y, B, extra):
    check_coset_laws(Z, x, y, B, B | extra)


@given(elements(C2), elements(C2), index_sets(), index_sets())
def test_coset_laws_cyclic(x, y, B, extra):
    check_coset_laws(C2, x, y, B, B | extra)


def check_coset_laws(spec, x, y, B, B2):
    same = coset_equal(x, y, B)
    # three-way agreement
    assert same == member(x, coset(y, B, spec), spec) == member(op(inv(y, spec), x, spec), coset(IDENTITY, B, spec), spec)
    # equal or disjoint
    if same:
        assert coset(x, B, spec) == coset(y, B, spec)
    else:
        assert intersect(coset(x, B, spec), coset(y, B, spec)) is None
    # U_B is a symmetric subgroup
    U = coset(IDENTITY, B, spec)
    ux, uy = (restrict(z, set(z.support()) - B) for z in (x, y))
    assert member(ux, U, spec) and member(uy, U, spec)
    assert member(op(ux, uy, spec), U, spec)
    assert member(inv(ux, spec), U, spec)
    # antitone
    assert open_subset(coset(x, B2, spec), coset(x, B, spec), spec)
    if member(y, coset(IDENTITY, B2, spec), spec):
        assert member(y, U, spec)


def test_nbd_subgroup():
    N = NbdSubgroup(frozenset({0, 1}))
    assert Element([(2, 5)]) in N and Element([(0, 5)]) not in N
    assert N.refines(NbdSubgroup(frozenset({0})))
    assert NbdSubgroup.from_json(N.to_json()) == N


def test_lebesgue_compact_examples():
    W = Window([0, 1])
    cov = coset_cover({0, 1}, Z)
    N = lebesgue_compact(cov, 1, W, Z)
    assert N.B == {0, 1}
    for x in compact_piece(1, W, Z):
        assert box_contained(x, N.B, cov.choose(x), W, Z, 4)
    assert lebesgue_compact(whole_cover(), 2, W, Z).B == frozenset()
    mixed = CoverOracle(lambda x: coset(x, {0} if len(x) % 2 else {1}, Z))
    assert lebesgue_compact(mixed, 1, W, Z).B == {0, 1}


def test_lebesgue_compact_cap_and_fault():
    with pytest.raises(ResourceError):
        lebesgue_compact(CoverOracle(lambda x: WHOLE), 3, Window.first(6), Z, cap=50)
    bad = CoverOracle(lambda x: coset(Element([(0, 9)]), {0}, Z))
    with pytest.raises(ValueError):
        lebesgue_compact(bad, 1, Window([0]), Z)


def test_lebesgue_pgroup_examples():
    box = GroupSpec.uniform(ComponentGroup.cyclic(2), track=BOX)
    assert lebesgue_pgroup(coset_cover({0, 1, 2}, box)).B == {0, 1, 2}
    assert lebesgue_pgroup(whole_cover()).B == frozenset()
    with pytest.raises(ContractError):
        lebesgue_pgroup(CoverOracle(lambda x: WHOLE))


def test_random_cover_contract():
    W = Window.first(4)
    cov = random_cover(3, [0, 2], Z, p=0.7)
    for x in compact_piece(2, W, Z):
        O = cov.choose(x)
        assert member(x, O, Z) and O.indices <= {0, 2}
        assert cov.choose(x) == O
    again = build_cover(cov.descriptor(), Z)
    assert all(again.choose(x) == cov.choose(x) for x in compact_piece(2, W, Z))


def test_meet_refines_parts():
    W = Window.first(3)
    parts = [random_cover(s, [0, 1, 2], Z) for s in range(3)]
    meet = RefinementMeet()
    for c in parts:
        meet.extend(c)
    flat = meet_cover(parts)
    for x in compact_piece(2, W, Z):
        m = meet.choose(x)
        assert m == flat.choose(x)
        assert member(x, m, Z)
        assert all(open_subset(m, c.choose(x), Z) for c in parts)
    assert meet.bound == {0, 1, 2}


def test_open_json_round_trip():
    O = BasicOpen(((0, frozenset({1, -1})), (3, frozenset({2}))))
    assert BasicOpen.from_json(O.to_json()) == O
