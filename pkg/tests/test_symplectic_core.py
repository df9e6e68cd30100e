import pytest

from gr2.errors import GenusError, GenusMismatch, NonSymplectic, ParseError, SettingError
from gr2.symplectic_core import (
    BasisSymbol, GenusConfig, SpMatrix, SymVector, bar, check_genus, e_map, epsilon, f_map,
    g_generators, group_closure, is_symplectic, lemma_sp_maps, nmap, omega, omega_positions,
    partial_symplectic, random_symplectic, sp_inverse, transvection,
)


def test_positions():
    assert BasisSymbol.parse("a1").position == 0
    assert BasisSymbol.parse("b1").position == 1
    assert BasisSymbol.parse("a3").position == 4
    assert str(BasisSymbol.from_position(5)) == "b3"


def test_bar_and_epsilon():
    a2 = BasisSymbol.parse("a2")
    assert bar(a2) == BasisSymbol.parse("b2")
    assert bar(bar(a2)) == a2
    assert epsilon(a2) == 1
    assert epsilon(bar(a2)) == -1


def test_omega_on_positions():
    assert omega_positions(0, 1) == 1
    assert omega_positions(1, 0) == -1
    assert omega_positions(0, 2) == 0
    assert omega_positions(0, 0) == 0


def test_parse_vector():
    v = SymVector.parse("a1+2*b3-a2", 3)
    assert v.coords == (1, 0, -1, 0, 0, 2)
    assert str(v) == "a1-a2+2*b3"
    assert SymVector.parse("0", 3).is_zero()


@pytest.mark.parametrize("text", ["a1+c2", "a4", "", "a1 b1", "2*"])
def test_parse_rejects(text):
    with pytest.raises(ParseError):
        SymVector.parse(text, 3)


def test_omega_is_the_standard_form(h3):
    assert omega(h3["a1"], h3["b1"]) == 1
    assert omega(h3["b1"], h3["a1"]) == -1
    assert omega(h3["a1"] + h3["a2"], h3["b2"]) == 1
    assert omega(h3["a1"], h3["a2"]) == 0
    with pytest.raises(GenusMismatch):
        omega(h3["a1"], SymVector.basis(0, 4))


def test_genus_bounds():
    with pytest.raises(GenusError):
        check_genus(2)
    with pytest.raises(ValueError):
        GenusConfig(3, threads=0)
    with pytest.raises(SettingError):
        GenusConfig(3, seed=2 ** 64)
    assert GenusConfig(3).g == 3


def test_nmap():
    assert nmap(BasisSymbol.parse("a1")) == 1
    assert nmap(BasisSymbol.parse("b3")) == 3


def test_generators_are_symplectic():
    for m in g_generators(3):
        assert is_symplectic(m)
    e = e_map(1, 3)
    assert e @ SymVector.basis(0, 3) == -SymVector.basis(1, 3)
    assert e @ SymVector.basis(1, 3) == SymVector.basis(0, 3)
    f = f_map(1, 3, 3)
    assert f @ SymVector.basis(0, 3) == SymVector.basis(4, 3)


def test_group_G_has_order_384_in_genus_3():
    # signed permutations of three handles: 3! * 4^3
    assert len(group_closure(g_generators(3))) == 384


def test_sp_inverse():
    m = random_symplectic(3, 7)
    assert is_symplectic(m)
    assert sp_inverse(m) @ m == SpMatrix.identity(3)
    assert m @ m.inverse() == SpMatrix.identity(3)


def test_random_symplectic_is_deterministic():
    assert random_symplectic(3, 11) == random_symplectic(3, 11)
    assert random_symplectic(3, 0, steps=0) == SpMatrix.identity(3)


def test_partial_symplectic(h3):
    m = partial_symplectic({1: h3["b1"] + h3["a1"]}, 3)
    assert is_symplectic(m)
    assert m @ h3["b1"] == h3["a1"] + h3["b1"]
    assert m @ h3["a2"] == h3["a2"]


def test_partial_symplectic_reports_the_broken_pair(h3):
    with pytest.raises(NonSymplectic) as info:
        partial_symplectic({0: h3["a1"] + h3["a2"]}, 3)
    assert info.value.witness["pair"] == ["a1", "b2"]
    assert info.value.witness["expected"] == 0
    assert info.value.witness["actual"] == 1


def test_transvection(h3):
    t = transvection(h3["a1"] + h3["b2"], 3)
    assert is_symplectic(t)
    assert t @ h3["a3"] == h3["a3"]


def test_stabilizer_maps():
    maps = lemma_sp_maps(3)
    assert set(maps) == {"C1", "D1", "D2", "E1", "E3"}
    assert all(is_symplectic(m) for m in maps.values())
    assert "F34" in lemma_sp_maps(4)
