from gr2.gf2 import Gf2Basis, bits, from_positions, gf2_rank


def test_rank_and_membership():
    basis = Gf2Basis([0b011, 0b110])
    assert basis.rank == 2
    assert 0b101 in basis
    assert 0b001 not in basis
    assert not basis.add(0b101)
    assert basis.add(0b001)
    assert gf2_rank([0b1, 0b1, 0b0]) == 1


def test_bits():
    assert bits(0b10110) == [1, 2, 4]
    assert from_positions([1, 2, 4]) == 0b10110
    assert from_positions([3, 3]) == 0
