import pytest

from gr2.errors import SpaceMismatch
from gr2.multilinear_spaces import (
    ModuleVector, Space, apply_action, bracket_symbol, build_D2, build_D2prime, classify_pair,
    component_blocks, contraction_weight, d2_index, dimension, doubled, elementary_wedge2,
    embed_lambda4, half_square, in_D2, induced_action, label, mod2_target, product, sort_sign,
    tables, to_d2prime, wedge2, wedge3,
)
from gr2.symplectic_core import e_map, f_map, random_symplectic


def test_genus_3_dimensions():
    t = tables(3)
    assert len(t.wedge2) == 15
    assert len(t.trivectors) == 20
    assert len(t.pairs) == 190
    assert len(t.products) == 120
    assert dimension(Space.D2_PRIME, 3) == 105
    assert build_D2prime(3).torsion == ()


def test_sort_sign():
    assert sort_sign((2, 0, 1)) == (1, (0, 1, 2))
    assert sort_sign((1, 0)) == (-1, (0, 1))
    assert sort_sign((1, 1)) == (0, None)


def test_wedges_are_alternating(h3):
    assert elementary_wedge2(1, 0, 3) == -elementary_wedge2(0, 1, 3)
    assert wedge2(h3["a1"], h3["a1"]).is_zero()
    assert wedge3(h3["a1"], h3["b1"], h3["a1"]).is_zero()
    assert wedge3(h3["b1"], h3["a1"], h3["a2"]) == -wedge3(h3["a1"], h3["b1"], h3["a2"])
    assert str(wedge3(h3["a1"], h3["a2"], h3["b3"])) == "a1^a2^b3"


def test_bracket_symbol_is_antisymmetric():
    xs, ys = (0, 2, 4), (1, 3, 5)
    assert bracket_symbol(xs, ys, 3) == -bracket_symbol(ys, xs, 3)
    assert bracket_symbol(xs, xs, 3).is_zero()
    assert str(bracket_symbol(xs, ys, 3)) == "a1a2a3|b1b2b3"


def test_lambda4_vanishes_in_D2prime(h3):
    relation = embed_lambda4(h3["a1"], h3["b1"], h3["a2"], h3["b2"])
    assert not relation.is_zero()
    assert to_d2prime(relation).is_zero()


def test_D2_lattice(h3):
    w = wedge2(h3["a1"], h3["a2"])
    full = to_d2prime(product(w, w))
    assert in_D2(half_square(h3["a1"], h3["a2"]))
    assert in_D2(doubled(full))
    mixed = to_d2prime(product(wedge2(h3["a1"], h3["a2"]), wedge2(h3["b1"], h3["b2"])))
    assert not in_D2(ModuleVector(Space.D2, 3, mixed.coords))
    assert build_D2(3).rank == 105


def test_D2_index_in_genus_3():
    # one half-square per basis wedge
    assert d2_index(3) == 2 ** 15


def test_mod2_targets():
    s2h = mod2_target(Space.S2H_MOD2, 3)
    assert s2h.dimension == 21
    assert s2h.kernel_dimension == 20
    l2h = mod2_target(Space.LAMBDA2H_MOD2, 3)
    assert l2h.dimension == 15
    assert l2h.kernel_dimension == 14
    for bits in s2h.kernel:
        assert s2h.evaluate(bits) == 0
    with pytest.raises(SpaceMismatch):
        mod2_target(Space.LAMBDA3, 3)


def test_contraction_components():
    assert classify_pair(((0, 1, 2), (2, 4, 5))).component == "U0"
    assert classify_pair(((0, 2, 4), (1, 2, 4))).component == "U1"
    assert classify_pair(((0, 2, 3), (0, 1, 4))).component == "U2"
    assert classify_pair(((0, 2, 3), (1, 4, 5))).component == "U3"
    assert classify_pair(((0, 2, 4), (1, 3, 5))).component == "U3"
    assert classify_pair(((0, 2, 4), (1, 3, 5))).mixed == 3


def test_component_blocks_partition_the_pairs():
    blocks = component_blocks(3)
    assert sum(len(block) for block in blocks.values()) == 190
    assert len(blocks["U0"]) == 6
    assert {label(Space.LAMBDA2_LAMBDA3, 3, k) for k in blocks["U0"]} >= {"a1b1a2|a2a3b3"}


def test_contraction_weight():
    t = tables(3)

    def weight(e, f):
        e, f = t.wedge2_index[e], t.wedge2_index[f]
        return contraction_weight(t.product_index[(min(e, f), max(e, f))], 3)

    assert weight((0, 1), (2, 3)) == 2
    assert weight((0, 2), (1, 3)) == 2
    assert weight((0, 2), (4, 5)) == 1
    assert weight((0, 2), (0, 4)) == 0


def test_induced_action_is_functorial():
    m1, m2 = random_symplectic(3, 1), random_symplectic(3, 2)
    for space in (Space.LAMBDA3, Space.D2_PRIME):
        assert induced_action(m1 @ m2, space) == induced_action(m1, space) @ induced_action(m2, space)


def test_signed_permutations_act_on_pairs():
    v = bracket_symbol((0, 2, 4), (1, 3, 5), 3)
    moved = apply_action(f_map(1, 2, 3), v)
    assert moved == bracket_symbol((2, 0, 4), (3, 1, 5), 3)
    assert apply_action(e_map(1, 3) @ e_map(1, 3) @ e_map(1, 3) @ e_map(1, 3), v) == v
