import json

import pytest

from gr2.cli import main, parse_pairs, parse_triple
from gr2.errors import ParseError


def _json_run(capsys, argv):
    code = main(argv + ["--format", "json"])
    return code, json.loads(capsys.readouterr().out)


def test_rank(capsys):
    code, certificate = _json_run(capsys, ["rank", "--genus", "3"])
    assert code == 0
    assert certificate["result"] == "pass"
    assert certificate["details"] == {"L3H": 20, "L2L3H": 190, "D2'": 105, "K": 84, "imB": 106}


def test_genus_below_three_is_a_usage_error(capsys):
    assert main(["rank", "--genus", "2"]) == 2
    assert "genus" in capsys.readouterr().err


def test_seed_out_of_range_is_a_usage_error(capsys):
    assert main(["rank", "--seed", "-1"]) == 2
    assert "seed" in capsys.readouterr().err


def test_bad_thread_count():
    with pytest.raises(SystemExit) as info:
        main(["rank", "--threads", "0"])
    assert info.value.code == 2


def test_invariants_text_output(capsys):
    assert main(["invariants", "tau1-pb", "a1", "a2", "b3"]) == 0
    assert capsys.readouterr().out.strip() == "-a1^a2^b3"
    assert main(["invariants", "beta-bscc", "(a1,b1)"]) == 0
    assert capsys.readouterr().out.strip() == "a1*b1"
    assert main(["invariants", "beta-bp", "(a1,b1)", "a2"]) == 0
    assert capsys.readouterr().out.strip() == "a1*b1*a2 + a1*b1"


def test_cocycle_invariant(capsys):
    assert main(["invariants", "cocycle", "a1,a2,a3", "b1,b2,b3"]) == 0
    assert capsys.readouterr().out.strip().endswith(", -2)")


def test_invalid_subsurface_fails_with_a_witness(capsys):
    code, certificate = _json_run(capsys, ["invariants", "tau1-bp", "(a1,b1)", "a1"])
    assert code == 1
    assert certificate["result"] == "fail"
    assert certificate["details"]["error"] == "InvalidSubsurfaceBasis"
    assert certificate["details"]["witness"]["pairing"] == "omega(e, v1)"


def test_unparsable_input_is_a_usage_error():
    assert main(["invariants", "beta-bscc", "(a1,c1)"]) == 2
    assert main(["invariants", "tau1-pb", "a1", "a2"]) == 2


def test_verify_theorem_k(capsys):
    code, certificate = _json_run(capsys, ["verify", "theorem-k", "--genus", "3"])
    assert code == 0
    assert certificate["details"]["hnf_digest_lhs"] == certificate["details"]["hnf_digest_rhs"]


def test_results_do_not_depend_on_threads(capsys):
    runs = []
    for threads in ("1", "4"):
        code, certificate = _json_run(capsys, ["verify", "lemma-k", "--genus", "3", "--threads", threads])
        assert code == 0
        certificate.pop("timings_ms")
        runs.append(certificate)
    assert runs[0] == runs[1]


def test_out_writes_the_certificate(capsys, tmp_path):
    out = tmp_path / "abelianization.json"
    assert main(["abelianization", "--genus", "3", "--out", str(out)]) == 0
    capsys.readouterr()
    assert json.loads(out.read_text())["details"] == {"free_rank": 20, "torsion": [2] * 22}


def test_parse_pairs():
    pairs = parse_pairs("(a1,b1),(a2+a3,b2)", 3)
    assert len(pairs) == 2
    assert str(pairs[1][0]) == "a2+a3"
    with pytest.raises(ParseError):
        parse_pairs("(a1,b1,a2)", 3)
    with pytest.raises(ParseError):
        parse_pairs("a1,b1", 3)
    assert len(parse_triple("a1, a2 b3", 3)) == 3
