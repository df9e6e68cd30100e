# gr2/cli.py
import argparse
import logging
import math
import re
import sys
import time

from gr2 import VERSION, config
from gr2.birman_craggs import (
    abelianization_structure, beta_bp, beta_bscc, dim_B, generator_witnesses, verify_lemma_Sp,
    verify_stabilizer,
)
from gr2.certificates import Certificate
from gr2.diagrammatic_bracket import (
    check_b0_grading, check_equivariance, check_K_decomposition, check_K_saturated, compute_K,
    export_kernel, rank_certificate,
)
from gr2.errors import Gr2Error, ParseError, RankMismatch, UsageError, VerificationFailure
from gr2.johnson_invariants import (
    BPData, BSCCData, DecomposableTrivector, UPoint, bscc_cross_check, check_exact_rows,
    check_well_defined, cocycle_C, evaluation_record, in_U, in_Uprime, sweep_theta_discrepancy,
    tau1_bp, tau1_pb, tau2_bscc, verify_b_nonsingular, verify_cocycle, verify_d_identity,
    verify_theta_mod4, verify_uprime,
)
from gr2.multilinear_spaces import ModuleVector, Space, build_D2prime
from gr2.relation_library import (
    orbit_classification_U0, verify_component, verify_relation_sweep, verify_theorem_K,
)
from gr2.symplectic_core import GenusConfig, SymVector

logger = logging.getLogger("gr2")

THETA_BASIS_CHANGES = 100


# Verification suites. Each takes the parsed arguments and returns the details payload.

def _suite_theorem_k(args):
    return verify_theorem_K(args.genus)


def _suite_lemma_k(args):
    return check_K_decomposition(args.genus).to_dict()


def _suite_relations(args):
    return verify_relation_sweep(args.genus)


def _suite_components(args):
    details = {f"U{i}": verify_component(args.genus, i) for i in range(4)}
    details["U0_orbits"] = orbit_classification_U0(args.genus)
    return details


def _suite_exact_rows(args):
    details = check_exact_rows(args.genus)
    details["lambda4_vanishing"] = check_well_defined(args.genus)
    return details


def _suite_theta_mod4(args):
    return {
        "discrepancy": sweep_theta_discrepancy(args.genus, args.trials, args.seed),
        "basis_change": verify_theta_mod4(args.genus, min(args.trials, THETA_BASIS_CHANGES), args.seed),
    }


def _suite_d_identity(args):
    return {
        "random_pairs": verify_d_identity(args.genus, args.trials, args.seed),
        "bscc": [bscc_cross_check(h) for h in range(1, 6)],
    }


def _suite_uprime(args):
    g = args.genus
    details = verify_uprime(g)
    zero = ModuleVector.zero(Space.D2_PRIME, g)
    spots = {
        "(0,8) in U'": in_Uprime(UPoint(zero, 8)),
        "(0,4) in U'": in_Uprime(UPoint(zero, 4)),
        "(0,4) in U": in_U(UPoint(zero, 4)),
    }
    details["spot_checks"] = spots
    if spots != {"(0,8) in U'": True, "(0,4) in U'": False, "(0,4) in U": True}:
        raise VerificationFailure("congruence spot checks failed", {"spot_checks": spots})
    return details


def _suite_cocycle(args):
    return verify_cocycle(args.genus, args.trials, args.seed)


def _suite_b_form(args):
    return verify_b_nonsingular(args.genus)


def _suite_lemma_sp(args):
    details = verify_lemma_Sp(args.genus)
    details["generator_witnesses"] = generator_witnesses(args.genus)
    return details


def _suite_abelianization(args):
    g = args.genus
    free_rank, torsion = abelianization_structure(g)
    expected_free = math.comb(2 * g, 3)
    expected_torsion = dim_B(g, 2)
    details = {"free_rank": free_rank, "torsion": list(torsion), "expected_free_rank": expected_free,
               "expected_torsion_rank": expected_torsion}
    if free_rank != expected_free or len(torsion) != expected_torsion or any(d != 2 for d in torsion):
        raise RankMismatch("abelianization model has the wrong shape", details)
    return details


def _suite_torsion_free(args):
    quotient = build_D2prime(args.genus)
    details = {"D2_prime_torsion": list(quotient.torsion), "K_saturated": check_K_saturated(args.genus)}
    if quotient.torsion or not details["K_saturated"]:
        raise RankMismatch("unexpected torsion", details)
    return details


def _suite_stabilizer(args):
    return verify_stabilizer(args.genus)


def _suite_grading(args):
    return check_b0_grading(args.genus)


def _suite_equivariance(args):
    return check_equivariance(args.genus)


SUITES = {
    "theorem-k": _suite_theorem_k,
    "lemma-k": _suite_lemma_k,
    "relations": _suite_relations,
    "components": _suite_components,
    "exact-rows": _suite_exact_rows,
    "theta-mod4": _suite_theta_mod4,
    "d-identity": _suite_d_identity,
    "uprime": _suite_uprime,
    "cocycle": _suite_cocycle,
    "b-form": _suite_b_form,
    "lemma-sp": _suite_lemma_sp,
    "abelianization": _suite_abelianization,
    "torsion-free": _suite_torsion_free,
    "stabilizer": _suite_stabilizer,
    "grading": _suite_grading,
    "equivariance": _suite_equivariance,
}


# Argument parsing helpers.

_PAIR = re.compile(r"\(([^()]*)\)")


def parse_pairs(text, g):
    """'(a1,b1),(a2,b2)' -> [(SymVector, SymVector), ...]."""
    pairs = []
    for body in _PAIR.findall(text):
        parts = body.split(",")
        if len(parts) != 2:
            raise ParseError(f"expected a pair (u,v), got ({body})", {"input": text})
        pairs.append(tuple(SymVector.parse(part, g) for part in parts))
    leftover = _PAIR.sub("", text).replace(",", "").strip()
    if not pairs or leftover:
        raise ParseError(f"cannot parse pair list {text!r}", {"input": text})
    return tuple(pairs)


def parse_triple(text, g):
    parts = [p for p in re.split(r"[,\s]+", text.strip()) if p]
    if len(parts) != 3:
        raise ParseError(f"expected three vectors, got {text!r}", {"input": text})
    return tuple(SymVector.parse(part, g) for part in parts)


def _usage(condition, message):
    if not condition:
        raise UsageError(message)


def _invariant(args):
    g, kind, values = args.genus, args.kind, args.args
    if kind == "tau1-pb":
        _usage(len(values) == 3, "tau1-pb takes three vectors")
        value = tau1_pb(*(SymVector.parse(v, g) for v in values))
        return evaluation_record("tau1", values, value), str(value)
    if kind in ("tau1-bp", "beta-bp"):
        _usage(len(values) == 2, f"{kind} takes a pair list and the class e")
        data = BPData(parse_pairs(values[0], g), SymVector.parse(values[1], g))
        value = tau1_bp(data) if kind == "tau1-bp" else beta_bp(data)
        return evaluation_record("tau1" if kind == "tau1-bp" else "beta", values, value), str(value)
    if kind in ("tau2-bscc", "beta-bscc"):
        _usage(len(values) == 1, f"{kind} takes one pair list")
        data = BSCCData(parse_pairs(values[0], g))
        if kind == "tau2-bscc":
            value = tau2_bscc(data)
            return evaluation_record("tau2", values, value), str(value)
        value = beta_bscc(data)
        return evaluation_record("beta", values, str(value)), str(value)
    if kind == "cocycle":
        _usage(len(values) == 2, "cocycle takes two vector triples")
        u, v = (DecomposableTrivector(parse_triple(text, g)) for text in values)
        point = cocycle_C(u, v)
        return evaluation_record("cocycle", values, point), f"({point.T}, {point.z})"
    raise UsageError(f"unknown invariant kind {kind}")


# Commands.

def cmd_rank(args):
    return rank_certificate(args.genus).to_dict()["ranks"], None


def cmd_kernel(args):
    kernel = compute_K(args.genus)
    return {"rank": kernel.rank, "hnf_digest": kernel.digest(), "basis": export_kernel(args.genus)}, None


def cmd_verify(args):
    names = list(SUITES) if args.suite == "all" else [args.suite]
    details = {}
    for name in names:
        logger.info(f"Running suite {name} for genus {args.genus}")
        details[name] = SUITES[name](args)
    return (details if args.suite == "all" else details[args.suite]), None


def cmd_invariants(args):
    record, text = _invariant(args)
    return record, text


def cmd_abelianization(args):
    free_rank, torsion = abelianization_structure(args.genus)
    return {"free_rank": free_rank, "torsion": list(torsion)}, None


COMMANDS = {
    "rank": cmd_rank,
    "kernel": cmd_kernel,
    "verify": cmd_verify,
    "invariants": cmd_invariants,
    "abelianization": cmd_abelianization,
}


def build_parser():
    parser = argparse.ArgumentParser(
        prog="gr2", description="Exact checks for the quadratic part of the Torelli Lie algebra.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {VERSION}")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--genus", type=int, default=config.default_genus(), help="Surface genus (at least 3).")
    common.add_argument("--seed", type=int, default=config.default_seed(), help="Seed of every random draw.")
    common.add_argument("--trials", type=int, default=config.default_trials(), help="Random trials per check.")
    common.add_argument("--threads", type=int, default=None, help="Worker threads (else GR2_THREADS, else config).")
    common.add_argument("--format", choices=["text", "json"], default=config.default_format())
    common.add_argument("--out", default=None, help="Also write the JSON certificate to this path.")
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("rank", parents=[common], help="Ranks of L3H, L2L3H, D2', K and im B.")
    sub.add_parser("kernel", parents=[common], help="Export the kernel K of the bracket.")
    verify = sub.add_parser("verify", parents=[common], help="Run a verification suite.")
    verify.add_argument("suite", choices=list(SUITES) + ["all"])
    invariants = sub.add_parser("invariants", parents=[common], help="Evaluate an invariant.")
    invariants.add_argument("kind", choices=["tau1-bp", "tau1-pb", "tau2-bscc", "beta-bp", "beta-bscc", "cocycle"])
    invariants.add_argument("args", nargs="*")
    sub.add_parser("abelianization", parents=[common], help="Free rank and torsion of the abelianization model.")
    return parser


def _parameters(args):
    parameters = {"trials": args.trials}
    for name in ("suite", "kind"):
        if hasattr(args, name):
            parameters[name] = getattr(args, name)
    if getattr(args, "args", None):
        parameters["args"] = list(args.args)
    return parameters


def _emit(certificate, args, text=None):
    if args.format == "json":
        print(certificate.to_json())
    else:
        print(text if text is not None else certificate.render_text())
    if args.out:
        certificate.write(args.out)


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.threads is not None and args.threads < 1:
        parser.error(f"--threads must be positive, got {args.threads}")
    certificate = Certificate(args.command, args.genus, _parameters(args), seed=args.seed)
    started = time.perf_counter()
    try:
        config.set_threads(args.threads)
        GenusConfig(args.genus, args.seed, config.thread_count())
        details, text = COMMANDS[args.command](args)
        certificate.details = details if isinstance(details, dict) else {"value": details}
        exit_code = 0
    except UsageError as e:
        logger.error(f"Usage error: {e}")
        print(f"gr2: error: {e}", file=sys.stderr)
        return e.exit_code
    except Gr2Error as e:
        logger.error(f"{type(e).__name__}: {e}")
        certificate.result = "fail"
        certificate.details = {"error": type(e).__name__, "message": str(e), "witness": e.witness}
        text, exit_code = None, e.exit_code
    except Exception as e:
        logger.error(f"Unexpected error: {e}", exc_info=True)
        certificate.result = "error"
        certificate.details = {"error": type(e).__name__, "message": str(e)}
        text, exit_code = None, 1
    finally:
        config.set_threads(None)
    certificate.timings_ms = {"total": round((time.perf_counter() - started) * 1000, 3)}
    _emit(certificate, args, text)
    return exit_code
