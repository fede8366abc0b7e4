"""Command-line driver.

    kcert verify    --spec spec.json [--seed N] [--samples N] [--max-size N]
    kcert boundary  --spec spec.json
    kcert exactness --spec spec.json [--seed N] [--samples N]

Reports are byte-identical for equal (spec, seed): wall-clock goes to
stderr, never into the report.  Exit codes: 0 all checks pass, 1 a check
failed, 2 spec error."""

import argparse
import hashlib
import json
import sys
import time

from .matrices import CertificateFailure, InvertibleCert, MatrixError
from .drivers import boundary_report, exactness_report, verify_report
from .specdoc import SpecDocument, SpecError


def _render_text(report):
    lines = []
    cmd = report.get("command", {})
    lines.append(f"command: {cmd.get('name')}")
    for key in ("spec_sha256", "seed", "samples", "max_size", "m", "size",
                "corrupt_witness"):
        if key in cmd:
            lines.append(f"{key}: {cmd[key]}")
    for check in report.get("checks", ()):
        status = "PASS" if check["ok"] else "FAIL"
        extra = []
        if "samples" in check:
            extra.append(f"samples={check['samples']}")
        if check.get("min_level_slack") is not None:
            extra.append(f"min_level_slack={check['min_level_slack']}")
        suffix = f" ({', '.join(extra)})" if extra else ""
        lines.append(f"check {check['name']}: {status}{suffix}")
        if not check["ok"]:
            for failure in check.get("failures", ()):
                lines.append(f"  failure: {failure}")
            if check.get("residual"):
                lines.append(f"  residual: {check['residual']}")
    for seg in report.get("segments", ()):
        status = seg["status"].upper()
        extra = f" (samples={seg['samples']})" if "samples" in seg else ""
        if seg["status"] == "skipped":
            extra = f" ({seg['reason']})"
        lines.append(f"segment {seg['segment']}: {status}{extra}")
        if seg["status"] == "fail":
            for check in seg.get("checks", ()):
                mark = "ok" if check["ok"] else "FAIL"
                res = f" residual: {check['residual']}" if check.get("residual") else ""
                lines.append(f"  {mark} {check['name']}{res}")
    if "levels" in report:
        ledger = ", ".join(f"{k}={v}" for k, v in sorted(report["levels"].items()))
        lines.append(f"levels: {ledger}")
    lines.append(f"result: {report['result']}")
    return "\n".join(lines) + "\n"


def _emit(report, fmt, path):
    if fmt == "json":
        text = json.dumps(report, sort_keys=True, indent=2) + "\n"
    else:
        text = _render_text(report)
    if path:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _int_param(args, doc, key, default):
    value = getattr(args, key.replace("-", "_"), None)
    if value is not None:
        return value
    value = doc.command.get(key, default)
    if not isinstance(value, int) or value < 0:
        raise SpecError(f"command.{key} must be a nonnegative integer")
    return value


def _run_verify(args, doc):
    if doc.algebra is None:
        raise SpecError("verify requires an 'algebra' section")
    seed = _int_param(args, doc, "seed", 0)
    samples = _int_param(args, doc, "samples", 100)
    max_size = max(1, _int_param(args, doc, "max_size", 3))
    return verify_report(doc.algebra, seed, samples, max_size)


def _run_boundary(args, doc):
    if doc.diagram is None:
        raise SpecError("boundary requires a 'diagram' section")
    if not doc.diagram.j1.surjective:
        raise SpecError("boundary requires a surjective j1 with a section")
    name = doc.command.get("u")
    if not isinstance(name, str):
        raise SpecError("command.u must name a matrix over lambda_prime")
    u = doc.matrix(name, want_cert=True)
    if u.algebra != doc.diagram.lambda_prime:
        raise SpecError(f"matrix {name!r} must live over lambda_prime")
    lift_a = lift_b = None
    if "lift_a" in doc.command:
        lift_a = doc.matrix(doc.command["lift_a"])
        lift_a = lift_a.m if isinstance(lift_a, InvertibleCert) else lift_a
    if "lift_b" in doc.command:
        lift_b = doc.matrix(doc.command["lift_b"])
        lift_b = lift_b.m if isinstance(lift_b, InvertibleCert) else lift_b
    perturb_a = doc.matrices.get(doc.command.get("perturb_a", ""))
    perturb_b = doc.matrices.get(doc.command.get("perturb_b", ""))
    m = doc.command.get("m", 0)
    if not isinstance(m, int) or m < 0:
        raise SpecError("command.m must be a nonnegative integer")
    try:
        return boundary_report(
            doc.diagram, u, lift_a=lift_a, lift_b=lift_b, m=m,
            perturb_a=perturb_a, perturb_b=perturb_b,
        )
    except (CertificateFailure, MatrixError, ValueError) as exc:
        raise SpecError(f"boundary inputs rejected: {exc}") from exc


def _run_exactness(args, doc):
    if doc.diagram is None:
        raise SpecError("exactness requires a 'diagram' section")
    seed = _int_param(args, doc, "seed", 0)
    samples = _int_param(args, doc, "samples", 25)
    corrupt = bool(doc.command.get("corrupt_witness", False))
    return exactness_report(doc.diagram, seed, samples, corrupt_witness=corrupt)


COMMANDS = {
    "verify": _run_verify,
    "boundary": _run_boundary,
    "exactness": _run_exactness,
}


def main(argv=None):
    parser = argparse.ArgumentParser(
        prog="kcert",
        description="exact certificate checks for glued idempotents, "
                    "connecting maps and six-term exactness witnesses",
    )
    sub = parser.add_subparsers(dest="subcommand", required=True)
    for name in COMMANDS:
        p = sub.add_parser(name)
        p.add_argument("--spec", required=True, help="path to a spec document")
        p.add_argument("--seed", type=int, default=None)
        p.add_argument("--samples", type=int, default=None)
        p.add_argument("--max-size", type=int, default=None)
        p.add_argument("--report", default=None, help="write the report here")
        p.add_argument("--format", choices=("text", "json"), default="text")
    args = parser.parse_args(argv)
    started = time.monotonic()
    try:
        doc = SpecDocument.from_path(args.spec)
        with open(args.spec, "rb") as fh:
            digest = hashlib.sha256(fh.read()).hexdigest()
        report = COMMANDS[args.subcommand](args, doc)
        report["command"]["spec_sha256"] = digest
    except SpecError as exc:
        print(f"spec error: {exc}", file=sys.stderr)
        return 2
    _emit(report, args.format, args.report)
    elapsed = time.monotonic() - started
    print(f"wall-clock: {elapsed:.3f}s", file=sys.stderr)
    return 0 if report["result"] == "pass" else 1


if __name__ == "__main__":
    sys.exit(main())
