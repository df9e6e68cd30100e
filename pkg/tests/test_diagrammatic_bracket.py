import pytest

from gr2 import diagrammatic_bracket
from gr2.diagrammatic_bracket import (
    assemble_B_matrix, b0, b0_decomposable, b2_x4, b2_x4_decomposable, bracket, bracket_vanishes,
    check_b0_grading, check_equivariance, check_K_decomposition, check_K_saturated, classify_support,
    compute_K, export_kernel, kernel_components, rank_certificate,
)
from gr2.errors import DecompositionFailure, SpaceMismatch
from gr2.exact_lattice import LatticeBasis
from gr2.multilinear_spaces import (
    ModuleVector, Space, bracket_symbol, to_d2prime, wedge3, wedge_pair,
)


def test_rank_anchors_genus_3():
    ranks = rank_certificate(3).ranks
    assert ranks == {"L3H": 20, "L2L3H": 190, "D2'": 105, "K": 84, "imB": 106}


@pytest.mark.slow
def test_rank_anchors_genus_4():
    ranks = rank_certificate(4).ranks
    assert ranks == {"L3H": 56, "L2L3H": 1540, "D2'": 336, "K": 1203, "imB": 337}


def test_image_rank_agrees_with_sympy():
    assert assemble_B_matrix(3).to_domain_matrix().rank() == 106


def test_bracket_of_the_dual_triples(h3):
    # x = a1^a2^a3, y = b1^b2^b3: only the diagonal pairings survive
    xs = (h3["a1"], h3["a2"], h3["a3"])
    ys = (h3["b1"], h3["b2"], h3["b3"])
    v = wedge_pair(wedge3(*xs), wedge3(*ys))
    assert b2_x4(v) == -1
    assert b2_x4_decomposable(xs, ys) == -1
    assert b0(v) == to_d2prime(b0_decomposable(xs, ys))
    assert not b0(v).is_zero()


def test_bracket_on_a_non_basis_pair(h3):
    xs = (h3["a1"] + h3["b2"], h3["a2"], 2 * h3["b3"])
    ys = (h3["b1"], h3["a3"] - h3["b2"], h3["b3"] + h3["a1"])
    v = wedge_pair(wedge3(*xs), wedge3(*ys))
    assert b0(v) == to_d2prime(b0_decomposable(xs, ys))
    assert b2_x4(v) == b2_x4_decomposable(xs, ys)


def test_U0_elements_are_killed():
    v = bracket_symbol((0, 1, 2), (2, 4, 5), 3)
    assert bracket_vanishes(v)
    assert classify_support(v) == ["U0"]


def test_bracket_rejects_other_spaces(h3):
    with pytest.raises(SpaceMismatch):
        bracket(wedge3(h3["a1"], h3["a2"], h3["a3"]))


def test_kernel_is_saturated_and_killed():
    kernel = compute_K(3)
    assert kernel.rank == 84
    assert check_K_saturated(3)
    for row in kernel.echelon_rows()[:20]:
        assert bracket_vanishes(ModuleVector(Space.LAMBDA2_LAMBDA3, 3, row))


def test_K_decomposition_genus_3():
    report = check_K_decomposition(3)
    assert report.passed
    assert report.ranks["K&U0"] == report.ranks["U0"] == 6
    assert sum(report.ranks[f"K&U{i}"] for i in range(4)) == 84


def test_grading_and_equivariance():
    assert check_b0_grading(3)["checked"]["U0"] == 6
    assert check_equivariance(3)["pairs"] == 190


def test_export_kernel():
    basis = export_kernel(3)
    assert len(basis) == 84
    assert all("|" in key for row in basis for key in row)


def test_decomposition_failure_names_the_components(monkeypatch):
    pieces = dict(kernel_components(3))
    rows = pieces["U1"].hnf_rows()
    doubled_first = {k: 2 * c for k, c in rows[0].items()}
    pieces["U1"] = LatticeBasis(pieces["U1"].ambient_rank, [doubled_first] + [dict(r) for r in rows[1:]])
    monkeypatch.setattr(diagrammatic_bracket, "kernel_components", lambda g: pieces)
    with pytest.raises(DecompositionFailure) as info:
        check_K_decomposition(3)
    assert info.value.witness["block"] == "sum"
    assert "U1" in info.value.witness["components"]


@pytest.mark.slow
def test_K_decomposition_genus_4():
    report = check_K_decomposition(4)
    assert report.passed
    assert report.ranks["K&U0"] == report.ranks["U0"]
    assert sum(report.ranks[f"K&U{i}"] for i in range(4)) == 1203
