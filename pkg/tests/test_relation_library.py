import pytest

from gr2.diagrammatic_bracket import bracket_vanishes
from gr2.errors import ClauseViolation, GenusMismatch, MembershipFailure
from gr2.relation_library import (
    ARITY, GENERATING_LIST, Family, clause_problem, enumerate_tuples, family_components, family_R,
    generating_list_size, make_relation, orbit_classification_U0, pair_element, quadruplet_orbits,
    rel_D, rel_IHX1, rel_IHX2, rel_IHX3, rel_IHX3p, rel_Sq, rel_T, verify_component,
    verify_relation_sweep, verify_theorem_K,
)


def test_D_element():
    element = rel_D("a1", "b1", "a2", "b2", "a3", "b3", genus=3)
    assert element.name == "D(a1,b1,a2,b2,a3,b3)"
    assert not element.value.is_zero()
    assert bracket_vanishes(element.value)


def test_D_is_antisymmetric_in_the_contracted_symbols():
    first = rel_D("a1", "b1", "a2", "b2", "a3", "b3", genus=3)
    second = rel_D("a1", "b1", "b2", "a2", "a3", "b3", genus=3)
    assert (first.value + second.value).is_zero()


def test_genus_3_constructors():
    for element in (
        rel_Sq("a1", "a2", "a2", "b1", "a3", "b3", genus=3),
        rel_IHX2("a1", "a2", "a3", "b1", genus=3),
        rel_IHX2("a1", "a2", "a3", "b2", genus=3),
        rel_IHX3("a1", "a2", "a3", genus=3),
        rel_D("a3", "a1", "b1", "a2", "a2", "a3", genus=3),
    ):
        assert not element.value.is_zero()
        assert bracket_vanishes(element.value)


def test_IHX2_has_two_terms():
    element = rel_IHX2("a1", "a2", "a3", "b1", genus=3)
    assert len(element.value.coords) == 2


def test_genus_4_constructors():
    assert bracket_vanishes(rel_T("a1", "a2", "a3", "a4", genus=4).value)
    assert bracket_vanishes(rel_IHX1("a1", "a2", "a3", "a4", "b1", genus=4).value)
    assert bracket_vanishes(rel_IHX3p("a1", "a2", "a3", "a4", genus=4).value)


def test_clause_violations():
    with pytest.raises(ClauseViolation) as info:
        rel_D("a1", "a2", "a1", "a3", "a3", "b3", genus=3)
    assert info.value.witness["coincident"] == ["a1"]
    with pytest.raises(ClauseViolation):
        rel_IHX3("a1", "b1", "a2", genus=3)
    with pytest.raises(ClauseViolation):
        rel_IHX2("a1", "a2", "a3", "a1", genus=3)
    assert clause_problem(Family.IHX3, (0, 2, 4)) is None
    assert clause_problem(Family.IHX3, (0, 1, 4)) == ["b1"]


def test_symbols_outside_the_genus():
    with pytest.raises(GenusMismatch):
        rel_T("a1", "a2", "a3", "a4", genus=3)


def test_pair_elements():
    assert pair_element(("a1", "b1", "a2"), ("a2", "a3", "b3"), genus=3).name == "<a1b1a2|a2a3b3>"
    with pytest.raises(MembershipFailure):
        pair_element(("a1", "a2", "a3"), ("b1", "b2", "b3"), genus=3)


def test_generating_list():
    assert sum(len(entries) for entries in GENERATING_LIST.values()) == 26
    assert [len(family_R(3, i)) for i in range(4)] == [1, 1, 2, 2]
    assert generating_list_size(3) == 6


def test_families_live_in_their_components():
    for i in range(4):
        for element in family_R(3, i):
            assert family_components(element) == [f"U{i}"]


def test_enumeration_counts():
    assert len(list(enumerate_tuples(Family.IHX3, 3))) == 48
    assert len(list(enumerate_tuples(Family.IHX2, 3))) == 96
    assert len(list(enumerate_tuples(Family.T, 3))) == 0


def test_relation_sweep_genus_3():
    report = verify_relation_sweep(3)
    assert report["counts"] == {
        "D": 720, "Sq": 720, "T": 0, "IHX1": 0, "IHX2": 96, "IHX3": 48, "IHX3p": 0,
    }


@pytest.mark.slow
def test_relation_sweep_genus_4():
    report = verify_relation_sweep(4)
    assert report["failures"] == 0
    assert set(report["counts"]) == {family.value for family in ARITY}
    assert all(count > 0 for count in report["counts"].values())


def test_theorem_K_genus_3():
    certificate = verify_theorem_K(3)
    assert certificate["result"] == "pass"
    assert certificate["hnf_digest_lhs"] == certificate["hnf_digest_rhs"]
    assert certificate["rank_lhs"] == 84


@pytest.mark.parametrize("i", range(4))
def test_components_genus_3(i):
    certificate = verify_component(3, i)
    assert certificate["result"] == "pass"


def test_U0_is_one_orbit_in_genus_3():
    report = orbit_classification_U0(3)
    assert report["orbits"] == 1
    assert report["covered"] == 6
    assert report["patterns"] == [["<a1b1a2|a2a3b3>"]]


def test_quadruplet_orbits():
    assert set(quadruplet_orbits(3)) == {("a1", "a1", "a2", "a2"), ("a1", "a1", "a2", "a3")}
    assert set(quadruplet_orbits(4)) == {
        ("a1", "a1", "a2", "a2"), ("a1", "a1", "a2", "a3"), ("a1", "a2", "a3", "a4"),
    }


def test_make_relation_checks_arity():
    with pytest.raises(ValueError):
        make_relation(Family.IHX3, ("a1", "a2"), 3)


@pytest.mark.slow
def test_theorem_K_genus_4():
    assert verify_theorem_K(4)["result"] == "pass"


@pytest.mark.slow
@pytest.mark.parametrize("i", range(4))
def test_components_genus_4(i):
    assert verify_component(4, i)["result"] == "pass"


@pytest.mark.slow
def test_generating_list_genus_6():
    assert generating_list_size(6) == 26
