import pytest
from hypothesis import assume, given, strategies as st

from mhecke.errors import InconsistentSquareCondition, SearchExhausted
from mhecke.field import kronecker
from mhecke.quadforms import (
    BQF, ClassList, UnimodularMatrix, act, all_classes, automorphs, betas, class_representatives,
    gamma0_equivalent, genus_character, is_reduced, omega, reduce, reduced_forms,
    represented_values, square_condition,
)

REFERENCE = {
    (52, 2): [(14, 2, 1), (7, 2, 2)],
    (52, -2): [(49, 12, 1), (7, -2, 2)],
    (468, 6): [(126, 6, 1), (63, 6, 2), (42, 6, 3), (21, 6, 6), (7, 6, 18),
               (154, 62, 7), (238, 90, 9), (77, 48, 9), (14, 6, 9), (98, 62, 11)],
    (468, -6): [(133, 8, 1), (119, 22, 2), (147, 36, 3), (21, -6, 6), (63, 36, 7),
                (7, -6, 18), (49, 36, 9), (14, -6, 9), (182, 78, 9), (266, 106, 11)],
}

S = UnimodularMatrix(0, -1, 1, 0)


def T(k):
    return UnimodularMatrix(1, k, 0, 1)


def L(k):
    return UnimodularMatrix(1, 0, k, 1)


@st.composite
def sl2(draw, N=1):
    """Words in generators; with N > 1 only generators of Gamma0(N)."""
    g = UnimodularMatrix(1, 0, 0, 1)
    for step in draw(st.lists(st.tuples(st.booleans(), st.integers(-3, 3)), max_size=6)):
        if N == 1 and step[0]:
            g = g @ S
        elif step[0]:
            g = g @ L(N * step[1])
        g = g @ T(step[1])
    if draw(st.booleans()):
        g = -g
    return g


@st.composite
def forms(draw):
    d = draw(st.sampled_from([3, 4, 15, 20, 23, 24, 52, 71, 84, 468]))
    R = draw(st.sampled_from(reduced_forms(d)))
    return act(R, draw(sl2()))


def brute_reduced(d):
    out = []
    for a in range(1, d + 1):
        for b in range(-a, a + 1):
            if (b * b + d) % (4 * a) == 0:
                c = (b * b + d) // (4 * a)
                if c >= a:
                    Q = BQF(a, b, c)
                    if not ((abs(b) == a or a == c) and b < 0):
                        out.append(Q)
    return sorted(out)


@pytest.mark.parametrize("d,h", [(3, 1), (4, 1), (23, 3), (47, 5), (71, 7), (167, 11), (52, 2), (20, 2)])
def test_reduced_forms_and_class_numbers(d, h):
    assert reduced_forms(d) == tuple(brute_reduced(d))
    assert len([Q for Q in reduced_forms(d) if Q.content() == 1]) == h


@given(forms(), sl2(), sl2())
def test_action_is_a_right_action(Q, g, h):
    assert act(act(Q, g), h) == act(Q, g @ h)
    assert act(Q, g).disc == Q.disc


@given(forms(), sl2())
def test_reduce(Q, g):
    R, m = reduce(Q)
    assert is_reduced(R) and act(Q, m) == R
    assert reduce(R)[0] == R
    assert reduce(act(Q, g))[0] == R


def test_automorphs_and_omega():
    for Q, n in ((BQF(1, 1, 1), 6), (BQF(1, 0, 1), 4), (BQF(2, 2, 7), 2)):
        auts = automorphs(Q)
        assert len(auts) == n and all(act(Q, g) == Q for g in auts)
    assert omega(BQF(1, 1, 1), 1) == 3
    assert omega(BQF(1, 0, 1), 1) == 2
    assert omega(BQF(7, 2, 2), 7) == 1
    assert omega(BQF(7, 7, 7), 7) == 1 and omega(BQF(7, 5, 1), 7) == 3


@pytest.mark.parametrize("N", [1, 2, 3, 5, 7, 9])
@given(data=st.data())
def test_equivalence_witness(N, data):
    d = data.draw(st.sampled_from([3, 4, 20, 52, 84, 468]))
    bs = betas(d, N)
    assume(bs)
    cl = class_representatives(d, N, data.draw(st.sampled_from(bs)))
    Q = data.draw(st.sampled_from(cl.forms()))
    g = data.draw(sl2(N))
    Q2 = act(Q, g)
    gamma = gamma0_equivalent(Q, Q2, N)
    assert gamma is not None and gamma.in_gamma0(N) and act(Q, gamma) == Q2
    for R in cl.forms():
        if R != Q:
            assert gamma0_equivalent(R, Q2, N) is None


@pytest.mark.parametrize("key", sorted(REFERENCE))
def test_reference_class_lists(key):
    d, beta = key
    cl = class_representatives(d, 7, beta)
    assert len(cl) == len(REFERENCE[key])
    for q in REFERENCE[key]:
        hits = [R for R in cl.forms() if gamma0_equivalent(BQF(*q), R, 7)]
        assert len(hits) == 1
    search = class_representatives(d, 7, beta, method="search")
    assert len(search) == len(cl)


@pytest.mark.parametrize("N", [1, 2, 3, 4, 5, 6, 7, 9, 11])
def test_coset_and_search_methods_agree(N):
    for d in range(3, 100):
        if d % 4 not in (0, 3):
            continue
        for beta in betas(d, N):
            a = class_representatives(d, N, beta)
            b = class_representatives(d, N, beta, method="search")
            assert len(a) == len(b), (d, N, beta)
            for Q in b.forms():
                assert sum(1 for R in a.forms() if gamma0_equivalent(Q, R, N)) == 1


def test_level1_classes_are_all_reduced_forms():
    for d in (3, 4, 23, 52, 468):
        assert len(class_representatives(d, 1, d % 2)) == len(reduced_forms(d))


def test_square_condition_error():
    with pytest.raises(InconsistentSquareCondition):
        class_representatives(52, 7, 1)


def test_genus_character_worked_example():
    chis = {str(e.form): e.chi for cl in all_classes(52, 7, 13) for e in cl.reps}
    assert chis == {"[7,2,2]": -1, "[14,2,1]": 1, "[7,-2,2]": -1, "[14,-2,1]": 1}


@pytest.mark.parametrize("D,d,N", [(13, 4, 7), (13, 36, 7), (8, 3, 1), (5, 4, 1), (5, 7, 2), (8, 7, 2), (12, 11, 3)])
def test_genus_character_is_a_class_function(D, d, N):
    for cl in all_classes(d * D, N, D):
        for e in cl.reps:
            Q = e.form
            first = genus_character(Q, D, N)
            assert first == genus_character(Q, D, N, strategy="last")
            for g in (T(1), L(N), L(N) @ T(-2), T(3) @ L(-2 * N) @ T(1)):
                assert genus_character(act(Q, g), D, N) == first


def test_genus_character_splittings_agree_when_square_condition_holds():
    checked = 0
    for D in (5, 8, 12, 13, 17):
        for N in (1, 2, 3, 4, 6):
            for d in range(3, 80):
                if not betas(d * D, N):
                    continue
                for cl in all_classes(d * D, N, D):
                    for e in cl.reps:
                        if not e.chi or not square_condition(e.form, D, N):
                            continue
                        vals = {kronecker(D, n) for n in represented_values(e.form, N, D, 8, all_splittings=True)}
                        assert vals == {e.chi}
                        checked += 1
    assert checked > 100


def test_genus_character_trivial_and_exhausted():
    assert genus_character(BQF(7, 2, 2), 1, 7) == 1
    with pytest.raises(SearchExhausted):
        genus_character(BQF(7, 2, 2), 13, 7, radius=0)
    assert genus_character(BQF(7, 2, 2), 5, 7) == 0  # 5 does not divide 52


def test_class_list_json():
    cl = all_classes(468, 7, 13)[0]
    assert ClassList.from_json(cl.to_json()) == cl
