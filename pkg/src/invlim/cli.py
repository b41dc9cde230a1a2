"""invlim: build presentations, run verification suites, emit JSON reports.

Exit codes: 0 when every check passes, 1 when a check fails, 2 on bad input.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import time
from dataclasses import dataclass
from typing import Callable, Sequence, TextIO

from invlim import suites
from invlim.atoms import Atom
from invlim.exact_arith import IntMatrix, format_rational, snf
from invlim.homs import Hom, HomTypeError, Identity, MultByInt, hom_from_json
from invlim.hull import build_injective_presentation, presentation_from_json
from invlim.ladder import (
    LADDER_SHAPES,
    DirectChain,
    InverseChain,
    LadderError,
    big_div_chain,
    divisibility_certificate,
    map_from_value,
    run_ladder,
)
from invlim.sums import Element, ModuleShape
from invlim.systems import EventuallyIntegerSeq, SetChain, ex6_divisibility
from invlim.suites import Check

COMMANDS = ("snf", "hull", "thm1", "zerolim", "thm2", "ladder", "bigdiv", "ex6", "selftest")
SEED_ENV = "INVLIM_SEED"
NO_INPUT = frozenset({"selftest"})  # never wait on stdin for these


class InputError(Exception):
    """Malformed input; ``path`` points into the JSON document."""

    def __init__(self, message: str, path: str = "$") -> None:
        self.path = path
        super().__init__(f"{path}: {message}")


@dataclass
class CommandSpec:
    command: str
    input: object = None
    seed: int = 0
    samples: int = 100
    stages: int = 4
    max_d: int = 4
    k: int = 3
    primes: tuple[int, ...] = (2, 3, 5)
    output: str = "json"


@dataclass
class Report:
    command: str
    seed: int
    checks: list[Check]
    result: object = None
    elapsed_ms: int = 0

    @property
    def status(self) -> str:
        return "pass" if all(c.status == "pass" for c in self.checks) else "fail"

    @property
    def exit_code(self) -> int:
        return 0 if self.status == "pass" else 1

    def to_json(self) -> dict:
        out = {
            "command": self.command,
            "seed": self.seed,
            "status": self.status,
            "checks": [c.to_json() for c in self.checks],
            "elapsed_ms": self.elapsed_ms,
        }
        if self.result is not None:
            out["result"] = self.result
        return out

    def render(self, fmt: str) -> str:
        if fmt == "json":
            return json.dumps(self.to_json(), sort_keys=True, separators=(",", ":"))
        lines = [f"{self.command} (seed {self.seed})"]
        for c in self.checks:
            lines.append(f"  {c.status.upper():4}  {c.name}  [{c.anchor}]  samples={c.samples}")
            if c.status == "fail":
                lines.append(f"        counterexample: {json.dumps(c.counterexample, sort_keys=True)}")
        if self.result is not None:
            lines.append("result: " + json.dumps(self.result, sort_keys=True))
        lines.append(f"status: {self.status}  elapsed: {self.elapsed_ms} ms")
        return "\n".join(lines)


# ---------------------------------------------------------------------------
# parsing


def _positive(text: str) -> int:
    value = int(text)
    if value < 0:
        raise argparse.ArgumentTypeError(f"{text} is negative")
    return value


def _primes(text: str) -> tuple[int, ...]:
    try:
        out = tuple(int(p) for p in text.split(",") if p.strip())
    except ValueError:
        raise argparse.ArgumentTypeError(f"{text!r} is not a comma-separated list of integers") from None
    if not out:
        raise argparse.ArgumentTypeError("need at least one prime")
    return out


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=None,
                        help=f"master seed (default 0, or ${SEED_ENV} when set)")
    common.add_argument("--samples", type=_positive, default=100)
    common.add_argument("--stages", type=_positive, default=4)
    common.add_argument("--max-d", "--max-D", dest="max_d", type=_positive, default=4)
    common.add_argument("--k", type=_positive, default=3)
    common.add_argument("--primes", type=_primes, default=(2, 3, 5))
    common.add_argument("--output", choices=("json", "text"), default="json")
    common.add_argument("--input", metavar="PATH", help="JSON input document ('-' for stdin)")

    parser = argparse.ArgumentParser(prog="invlim", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, metavar="command")
    helps = {
        "snf": "Smith normal form of a matrix, or the random SNF suite",
        "hull": "injective presentation 0 -> A -> M -> N of a presentation (input required)",
        "thm1": "intersection-system checks on a presentation or the built-in battery",
        "zerolim": "fiber-sum chain checks",
        "thm2": "surjective-stage checks on a presentation or the built-in battery",
        "ladder": "ladder factorization transcript",
        "bigdiv": "divisibility certificate over the prime lattice chain",
        "ex6": "checks for the limit of Q^n + (Q/Z)^omega, with an optional probe",
        "selftest": "every acceptance suite at full size",
    }
    for name in COMMANDS:
        sub.add_parser(name, parents=[common], help=helps[name])
    return parser


def _read_input(args: argparse.Namespace, stdin: TextIO | None) -> object:
    text = None
    if args.input and args.input != "-":
        try:
            with open(args.input, encoding="utf-8") as fh:
                text = fh.read()
        except OSError as exc:
            raise InputError(f"cannot read {args.input}: {exc.strerror}") from None
    elif stdin is not None and (args.input == "-" or not stdin.isatty()):
        text = stdin.read()
    if text is None or not text.strip():
        return None
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise InputError(f"invalid JSON at line {exc.lineno} column {exc.colno}: {exc.msg}") from None


def parse_spec(argv: Sequence[str], stdin: TextIO | None = None,
               environ: dict[str, str] | None = None) -> CommandSpec:
    """Raises SystemExit(2) for bad flags and InputError for bad documents."""
    args = build_parser().parse_args(list(argv))
    environ = os.environ if environ is None else environ
    seed = args.seed
    if seed is None:
        env = environ.get(SEED_ENV)
        try:
            seed = int(env) if env not in (None, "") else 0
        except ValueError:
            raise InputError(f"{SEED_ENV}={env!r} is not an integer") from None
    doc = None if args.command in NO_INPUT and not args.input else _read_input(args, stdin)
    return CommandSpec(args.command, doc, seed, args.samples, args.stages,
                       args.max_d, args.k, args.primes, args.output)


# ---------------------------------------------------------------------------
# input decoding


def _decode(path: str, fn: Callable[[], object]) -> object:
    try:
        return fn()
    except InputError:
        raise
    except HomTypeError as exc:
        raise InputError(str(exc).split(": ", 1)[-1], exc.path) from None
    except (KeyError, IndexError) as exc:
        raise InputError(f"missing field {exc}", path) from None
    except (ValueError, TypeError, ArithmeticError) as exc:
        raise InputError(str(exc), path) from None


def _presentation(doc: object):
    mat, ngens = _decode("$", lambda: presentation_from_json(doc))
    return _decode("$", lambda: build_injective_presentation(mat, ngens))


def _field(doc: object, key: str, default: object = None) -> object:
    if not isinstance(doc, dict):
        raise InputError("expected a JSON object")
    return doc.get(key, default)


def _shape(doc: object) -> ModuleShape:
    raw = _field(doc, "shape", "Q/Z")
    if isinstance(raw, str):
        if raw not in LADDER_SHAPES:
            raise InputError(f"unknown shape name {raw!r}; known: {sorted(LADDER_SHAPES)}", "$.shape")
        return LADDER_SHAPES[raw]
    return _decode("$.shape", lambda: ModuleShape.from_json(raw))


def _chain(doc: object, k: int, default_map: Callable[[ModuleShape], Hom]) -> InverseChain:
    """An inverse chain of length ``k`` from ``maps`` (one per step) or a repeated ``map``."""
    shape = _shape(doc)
    if _field(doc, "maps") is not None:
        raw = _field(doc, "maps")
        if not isinstance(raw, list) or len(raw) < k:
            raise InputError(f"need at least k={k} maps", "$.maps")
        maps = [_decode(f"$.maps[{i}]", lambda i=i, m=m: hom_from_json(m, f"$.maps[{i}]"))
                for i, m in enumerate(raw[:k])]
    elif _field(doc, "map") is not None:
        one = _decode("$.map", lambda: hom_from_json(_field(doc, "map"), "$.map"))
        maps = [one] * k
    else:
        maps = [default_map(shape)] * k
    try:
        return InverseChain((shape,) * (k + 1), tuple(maps))
    except HomTypeError as exc:
        raise InputError(str(exc).split(": ", 1)[-1], "$.maps") from None
    except LadderError as exc:
        raise InputError(f"a connecting map failed its surjectivity witnesses: {exc}", "$.maps") from None


def _target(doc: object, shape: ModuleShape, default: dict) -> Element:
    raw = _field(doc, "x", default)
    return _decode("$.x", lambda: Element.from_json(raw, shape))


# ---------------------------------------------------------------------------
# commands


def _cmd_snf(spec: CommandSpec) -> tuple[list[Check], object]:
    if spec.input is None:
        return suites.snf_suite(spec.seed, spec.samples), None
    raw = spec.input.get("matrix") if isinstance(spec.input, dict) else spec.input
    a = _decode("$", lambda: IntMatrix.from_json(raw))
    res = snf(a)
    d = res.diagonal
    checks = [
        Check("snf: u*A*v == s", "u A v = s with unimodular u, v",
              *(("pass", 1, None) if res.u @ a @ res.v == res.s else ("fail", 1, {"matrix": a.to_json()}))),
        Check("snf: nonnegative diagonal with d_i | d_{i+1}", "Smith normal form divisibility chain",
              *(("pass", 1, None) if all(x >= 0 for x in d) and all(
                  (d[i + 1] % d[i] == 0) if d[i] else d[i + 1] == 0 for i in range(len(d) - 1))
                else ("fail", 1, {"diagonal": [str(x) for x in d]}))),
        Check("snf: |det u| == |det v| == 1", "unimodular transforms",
              *(("pass", 1, None) if abs(res.u.det()) == 1 and abs(res.v.det()) == 1
                else ("fail", 1, {"matrix": a.to_json()}))),
    ]
    result = {"u": res.u.to_json(), "s": res.s.to_json(), "v": res.v.to_json(),
              "diagonal": [str(x) for x in d]}
    return checks, result


def _cmd_hull(spec: CommandSpec) -> tuple[list[Check], object]:
    if spec.input is None:
        raise InputError("hull needs a presentation document ({\"ngens\": n, \"presentation\": [[...]]})")
    pres = _presentation(spec.input)
    checks = suites.hull_suite(spec.seed, samples=spec.samples,
                               presentations=[(pres.presentation, pres.ngens)])
    if pres.decomposition.order is None or pres.decomposition.order > 64:
        checks = [c for c in checks if not c.name.startswith("hull: exhaustive")]
    return checks, pres.to_json()


def _battery_or_input(spec: CommandSpec):
    if spec.input is None:
        return None, None
    pres = _presentation(spec.input)
    return [("input", pres)], {"decomposition": pres.decomposition.to_json()}


def _cmd_thm1(spec: CommandSpec) -> tuple[list[Check], object]:
    battery, result = _battery_or_input(spec)
    return suites.thm1_suite(spec.seed, spec.samples, spec.max_d, battery), result


def _cmd_thm2(spec: CommandSpec) -> tuple[list[Check], object]:
    battery, result = _battery_or_input(spec)
    return suites.thm2_suite(spec.seed, spec.samples, max(spec.stages, 1), battery), result


def _cmd_zerolim(spec: CommandSpec) -> tuple[list[Check], object]:
    doc = spec.input
    atoms = chains = None
    if doc is not None:
        if _field(doc, "n") is not None:
            atoms = [_decode("$.n", lambda: Atom.from_json(_field(doc, "n")))]
        if _field(doc, "chain") is not None:
            chains = [_decode("$.chain", lambda: SetChain.from_json(_field(doc, "chain")))]
    checks = suites.zerolim_suite(spec.seed, count=spec.samples, max_len=max(spec.stages, 1),
                                  atoms=atoms, chains=chains)
    return checks, None


def _ladder_checks(result) -> Check:
    bad = [c.to_json() for c in result.checks if not c.ok]
    return Check("ladder: phi_0i o f_i o psi_i0 == f_0 for every stage", "f_0 = phi_01 f_1 psi_10, iterated",
                 "fail" if bad else "pass", len(result.checks), {"failed": bad} if bad else None)


def _cmd_ladder(spec: CommandSpec) -> tuple[list[Check], object]:
    doc = spec.input if spec.input is not None else {}
    inv = _chain(doc, spec.k, lambda s: MultByInt(s, 2))
    x = _target(doc, inv.stages[0], {"coords": [["a", 0, "1/3"]]})
    ms = _field(doc, "multipliers", [2] * spec.k)
    if not isinstance(ms, list) or len(ms) < spec.k:
        raise InputError(f"need at least k={spec.k} multipliers", "$.multipliers")
    direct = _decode("$.multipliers", lambda: DirectChain.from_multipliers([int(m) for m in ms[: spec.k]]))
    try:
        result = run_ladder(map_from_value(inv.stages[0], x), inv, direct, spec.k,
                            seed=suites.derive_seed(spec.seed, "ladder-cli"))
    except LadderError as exc:
        return [Check("ladder: every lift exists", "surjective connecting maps", "fail", 1,
                      {"stage": exc.stage, "error": str(exc)})], None
    return [_ladder_checks(result)], result.to_json()


def _cmd_bigdiv(spec: CommandSpec) -> tuple[list[Check], object]:
    doc = spec.input if spec.input is not None else {}
    try:
        chain = big_div_chain(spec.primes, spec.k)
    except ValueError as exc:
        raise InputError(str(exc), "--primes") from None
    inv = _chain(doc, spec.k, Identity)
    x = _target(doc, inv.stages[0], {"coords": [["a", 0, "1/5"]]})
    try:
        cert = divisibility_certificate(x, inv, spec.primes, spec.k)
    except LadderError as exc:
        return [Check("bigdiv: certificate exists", "surjective connecting maps", "fail", 1,
                      {"stage": exc.stage, "error": str(exc)})], None
    ok_index = cert.c * chain.generators[spec.k] == 1
    checks = [
        Check("bigdiv: c * phi_0k(y) == x", "M_div projects onto each M_alpha",
              "pass" if cert.check else "fail", 1, None if cert.check else cert.to_json()),
        Check("bigdiv: c == 1 / c_k for the chain p_1^-i ... p_i^-i Z", "the lattice chain in K",
              "pass" if ok_index else "fail", 1, None if ok_index else cert.to_json()),
        _ladder_checks(cert.ladder),
    ]
    result = {"certificate": cert.to_json(), "chain": [format_rational(c) for c in chain.generators],
              "transcript": cert.ladder.to_json()}
    return checks, result


def _cmd_ex6(spec: CommandSpec) -> tuple[list[Check], object]:
    checks = suites.ex6_suite(spec.seed, count=spec.samples, roundtrips=spec.samples,
                              max_n=max(spec.stages, 0))
    if spec.input is None:
        return checks, None
    doc = spec.input
    seq = _decode("$.seq", lambda: EventuallyIntegerSeq.from_json(_field(doc, "seq", doc)))
    k = _decode("$.k", lambda: int(_field(doc, "k", 2)))
    if k < 1:
        raise InputError("k must be >= 1", "$.k")
    res = ex6_divisibility(seq, k)
    divided = isinstance(res, EventuallyIntegerSeq)
    agrees = divided == (seq.tail % k == 0) and (not divided or res.scale(k) == seq)
    checks.append(Check("ex6: probe agrees with the tail law", "entries in Z not almost all divisible by k",
                        "pass" if agrees else "fail", 1,
                        None if agrees else {"seq": seq.to_json(), "k": str(k)}))
    key = "quotient" if divided else "refutation"
    return checks, {"seq": seq.to_json(), "k": str(k), key: res.to_json()}


def _cmd_selftest(spec: CommandSpec) -> tuple[list[Check], object]:
    return suites.run_all(spec.seed), None


HANDLERS: dict[str, Callable[[CommandSpec], tuple[list[Check], object]]] = {
    "snf": _cmd_snf,
    "hull": _cmd_hull,
    "thm1": _cmd_thm1,
    "zerolim": _cmd_zerolim,
    "thm2": _cmd_thm2,
    "ladder": _cmd_ladder,
    "bigdiv": _cmd_bigdiv,
    "ex6": _cmd_ex6,
    "selftest": _cmd_selftest,
}


def run_command(spec: CommandSpec) -> Report:
    """Run one command. Bad input raises InputError; anything else becomes a failing check."""
    start = time.perf_counter()
    try:
        checks, result = HANDLERS[spec.command](spec)
    except InputError:
        raise
    except Exception as exc:  # noqa: BLE001 -- surfaced in the report, never swallowed
        checks, result = [Check(f"{spec.command}: internal error", "runner", "fail", 0,
                                {"error": f"{type(exc).__name__}: {exc}"})], None
    elapsed = int((time.perf_counter() - start) * 1000)
    return Report(spec.command, spec.seed, checks, result, elapsed)


def main(argv: Sequence[str] | None = None, stdin: TextIO | None = None, stdout: TextIO | None = None) -> int:
    argv = sys.argv[1:] if argv is None else argv
    stdin = sys.stdin if stdin is None else stdin
    stdout = sys.stdout if stdout is None else stdout
    try:
        spec = parse_spec(argv, stdin)
        report = run_command(spec)
    except SystemExit as exc:
        return int(exc.code or 0)
    except InputError as exc:
        print(f"invlim: error: {exc}", file=sys.stderr)
        return 2
    print(report.render(spec.output), file=stdout)
    return report.exit_code


if __name__ == "__main__":
    raise SystemExit(main())
