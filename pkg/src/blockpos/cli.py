"""Command-line front end: ``blockpos certify|search|complexity|verify|witness``.

Exit codes: 0 certified / success, 1 refuted / check failure, 2 inconclusive,
64 malformed input, 65 resource cap exceeded.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import asdict, dataclass
from pathlib import Path

from .errors import DomainError, ResourceError, dense_cap
from .tensor_lab import HermitianOperator

FORMAT_VERSION = "blockpos-report/1"

EXIT_OK = 0
EXIT_REFUTED = 1
EXIT_INCONCLUSIVE = 2
EXIT_USAGE = 64
EXIT_CAP = 65


@dataclass
class RunConfig:
    seed: int = 0
    tol_cert: float = 1e-6
    tol_refute: float = 1e-6
    sdp_gap: float = 1e-7
    restarts: int = 64
    n_max: int = 3
    threads: int = 1
    fmt: str = "json"
    out: str | None = None

    def __post_init__(self) -> None:
        if min(self.tol_cert, self.tol_refute, self.sdp_gap) <= 0:
            raise DomainError("tolerances must be positive")
        if self.n_max < 1:
            raise DomainError("--n-max must be at least 1")
        if self.restarts < 1 or self.threads < 1:
            raise DomainError("--restarts and --threads must be positive")

    def to_json(self) -> dict:
        data = asdict(self)
        data.pop("out")
        data["cap"] = dense_cap()
        return data


class _Parser(argparse.ArgumentParser):
    def error(self, message: str):  # argparse would exit 2, which means "inconclusive" here
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _emit(payload: dict | str, config: RunConfig, text: str | None = None) -> None:
    if isinstance(payload, str):
        body = payload
    elif config.fmt == "text" and text is not None:
        body = text
    else:
        body = json.dumps(payload, indent=2, sort_keys=True) + "\n"
    if config.out:
        Path(config.out).write_text(body)
    else:
        sys.stdout.write(body)


def _config(args: argparse.Namespace) -> RunConfig:
    return RunConfig(
        seed=args.seed, tol_cert=args.tol_cert, tol_refute=args.tol_refute, sdp_gap=args.sdp_gap,
        restarts=args.restarts, n_max=args.n_max, threads=args.threads, fmt=args.format, out=args.out,
    )


def cmd_certify(operator_file: str, k: int, config: RunConfig) -> int:
    from .reduced_sdp import Tolerances, certify

    X = HermitianOperator.load(operator_file)
    verdict = certify(X, k, n_max=config.n_max, seed=config.seed, restarts=config.restarts, threads=config.threads,
                      tol=Tolerances(config.tol_cert, config.tol_refute, config.sdp_gap))
    report = {"format": FORMAT_VERSION, "command": "certify", "config": config.to_json(), **verdict.to_json()}
    lines = [f"verdict: {verdict.verdict}"]
    def g(v):
        return "-" if v is None else f"{v:.6g}"

    for lv in verdict.levels:
        lines.append(f"  n={lv['n']} N={lv['N']} S={g(lv['S'])} W={g(lv['W'])} ({lv['status']})")
    if verdict.witness:
        lines.append(f"  witness f={verdict.witness['f']:.6g} violation={verdict.witness['violation']:.6g}")
    _emit(report, config, "\n".join(lines) + "\n")
    return {"certified": EXIT_OK, "refuted": EXIT_REFUTED}.get(verdict.verdict, EXIT_INCONCLUSIVE)


def cmd_search(operator_file: str, k: int, config: RunConfig) -> int:
    from .witness_search import check_bounds, minimize_f, minimize_schmidt_rank_k

    X = HermitianOperator.load(operator_file)
    if not 1 <= k <= X.d:
        raise DomainError(f"need 1 <= k <= d={X.d}")
    v = minimize_schmidt_rank_k(X, k, config.restarts, config.seed, config.threads)
    vk = minimize_f(X, k, config.restarts, config.seed, config.threads)
    checks = check_bounds(v.value, vk.value, k)
    report = {
        "format": FORMAT_VERSION, "command": "search", "config": config.to_json(), "k": k, "d": X.d,
        "V": v.to_json(), "V_k": vk.to_json(), "bound_checks": [c.to_json() for c in checks],
    }
    text = f"V={v.value:.9g} V_k={vk.value:.9g}\n" + "".join(
        f"  {c.name}: {'ok' if c.holds else 'FAIL'} (slack {c.slack:.3g})\n" for c in checks)
    _emit(report, config, text)
    return EXIT_OK if all(c.holds for c in checks) else EXIT_REFUTED


def cmd_complexity(d: int, k: int, n_range: range, config: RunConfig) -> int:
    from .complexity import complexity_table, table_to_csv

    rows = complexity_table(d, k, n_range)
    if config.fmt == "csv":
        _emit(table_to_csv(rows), config)
    elif config.fmt == "text":
        _emit("".join(f"n={r['n']:>4}  C={r['C']}  unreduced={r['C_unreduced']}\n" for r in rows), config)
    else:
        _emit({"format": FORMAT_VERSION, "command": "complexity", "config": config.to_json(), "rows": rows}, config)
    return EXIT_OK


def cmd_verify(suite_name: str, config: RunConfig) -> int:
    from .verify import SUITES, run_suite

    names = list(SUITES) if suite_name == "all" else [suite_name]
    results = {name: run_suite(name, config.seed) for name in names}
    failed = any(not c.passed and not c.informational for checks in results.values() for c in checks)
    report = {
        "format": FORMAT_VERSION, "command": "verify", "config": config.to_json(),
        "suites": {n: [c.to_json() for c in cs] for n, cs in results.items()}, "passed": not failed,
    }
    lines = []
    for name, checks in results.items():
        for c in checks:
            tag = "PASS" if c.passed else ("INFO" if c.informational else "FAIL")
            lines.append(f"[{tag}] {name}: {c.name} {c.detail}".rstrip())
    _emit(report, config, "\n".join(lines) + "\n")
    return EXIT_REFUTED if failed else EXIT_OK


def cmd_witness(k: int, d: int, config: RunConfig) -> int:
    from .witness_search import witness_operator

    _emit(json.dumps(witness_operator(k, d).to_json()) + "\n", config)
    return EXIT_OK


def _n_range(text: str) -> range:
    try:
        if ":" in text:
            lo, hi = (int(x) for x in text.split(":"))
        else:
            lo = hi = int(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected N or LO:HI, got {text!r}") from exc
    if lo < 1 or hi < lo:
        raise argparse.ArgumentTypeError("range must satisfy 1 <= LO <= HI")
    return range(lo, hi + 1)


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--restarts", type=int, default=64)
    common.add_argument("--n-max", type=int, default=3)
    common.add_argument("--tol-cert", type=float, default=1e-6)
    common.add_argument("--tol-refute", type=float, default=1e-6)
    common.add_argument("--sdp-gap", type=float, default=1e-7)
    common.add_argument("--format", choices=("json", "text", "csv"), default="json")
    common.add_argument("--out", default=None, help="write the report here instead of stdout")
    common.add_argument("--threads", type=int, default=1)

    parser = _Parser(prog="blockpos", description="k-block-positivity via symmetry-reduced extendibility SDPs")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("certify", parents=[common], help="run the rectangular hierarchy on an operator file")
    p.add_argument("operator")
    p.add_argument("--k", type=int, required=True)

    p = sub.add_parser("search", parents=[common], help="pure-state searches and their bound check")
    p.add_argument("operator")
    p.add_argument("--k", type=int, required=True)

    p = sub.add_parser("complexity", parents=[common], help="table of reduced block sizes")
    p.add_argument("--d", type=int, required=True)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--n", type=_n_range, default=range(1, 9), help="N or LO:HI (default 1:8)")

    p = sub.add_parser("verify", parents=[common], help="run a property suite")
    p.add_argument("suite", choices=("all", "projectors", "schur", "dualization", "objective-identity",
                                     "branching", "complexity-oracles", "bounds"))

    p = sub.add_parser("witness", parents=[common], help="write the operator (k/d)1 - |φ̂_d⟩⟨φ̂_d| as JSON")
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--d", type=int, required=True)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        config = _config(args)
        if args.command == "certify":
            return cmd_certify(args.operator, args.k, config)
        if args.command == "search":
            return cmd_search(args.operator, args.k, config)
        if args.command == "complexity":
            return cmd_complexity(args.d, args.k, args.n, config)
        if args.command == "verify":
            return cmd_verify(args.suite, config)
        return cmd_witness(args.k, args.d, config)
    except ResourceError as exc:
        print(f"blockpos: {exc}", file=sys.stderr)
        return EXIT_CAP
    except DomainError as exc:
        print(f"blockpos: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
