"""Command line interface: evaluate, enumerate, sample, verify, contract, render.

Exit codes: 0 success, 1 parse error, 2 semantic error (unknown names,
out-of-range indices, invalid inputs), 3 verification failure, 4 resource
cap exceeded. All numeric output uses 12-significant-digit scientific
notation so command output is byte-identical across runs for the same
document, command, and seed.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

import numpy as np

from . import dsl, linalg, measure, pathsum, tensornet
from .formatting import pair12, sci12

EXIT_OK = 0
EXIT_PARSE = 1
EXIT_SEMANTIC = 2
EXIT_VERIFY = 3
EXIT_CAP = 4

#: Absolute amplitude deviation allowed between the path and matrix routes.
VERIFY_TOL = 1e-10


class CommandError(Exception):
    def __init__(self, exit_code: int, message: str):
        super().__init__(message)
        self.exit_code = exit_code


def _circuit_diagram(doc: dsl.Document, name: str, input_index: int) -> pathsum.PathDiagram:
    if name not in doc.circuits:
        raise CommandError(EXIT_SEMANTIC, f"unknown circuit '{name}'")
    if not 0 <= input_index < doc.dim:
        raise CommandError(
            EXIT_SEMANTIC, f"input index {input_index} out of range for dimension {doc.dim}"
        )
    layers = doc.circuit_layers(name)
    return pathsum.PathDiagram(doc.dim, tuple(layers), input_index)


def _cmd_eval(doc: dsl.Document, options: dict) -> tuple[str, int]:
    pd = _circuit_diagram(doc, options["circuit"], options["input"])
    state = linalg.basis_ket(doc.dim, pd.input)
    for layer in pd.layers:
        state = layer @ state
    lines = [f"{i} {pair12(state[i])}" for i in range(doc.dim)]
    return "\n".join(lines) + "\n", EXIT_OK


def _cmd_paths(doc: dsl.Document, options: dict) -> tuple[str, int]:
    pd = _circuit_diagram(doc, options["circuit"], options["input"])
    output = options.get("output")
    if output is not None:
        if not 0 <= output < doc.dim:
            raise CommandError(
                EXIT_SEMANTIC, f"output index {output} out of range for dimension {doc.dim}"
            )
        pd = pathsum.PathDiagram(pd.dim, pd.layers, pd.input, output)
    try:
        paths = pathsum.enumerate_paths(pd)
    except pathsum.PathCapExceeded as exc:
        raise CommandError(EXIT_CAP, str(exc)) from exc
    lines = []
    running = 0j
    for path in paths:
        running += path.weight
        indices = ",".join(str(k) for k in path.indices)
        lines.append(f"{indices} {pair12(path.weight)} {pair12(running)}")
    return "\n".join(lines) + "\n", EXIT_OK


def _cmd_sample(doc: dsl.Document, options: dict) -> tuple[str, int]:
    pd = _circuit_diagram(doc, options["circuit"], options["input"])
    u = pathsum.composition_matrix(pd)
    psi = linalg.basis_ket(doc.dim, pd.input)
    try:
        probs = measure.born_probabilities(u, psi)
        record = measure.sample(probs, options["shots"], options["seed"])
    except ValueError as exc:
        raise CommandError(EXIT_SEMANTIC, str(exc)) from exc
    return record.render(), EXIT_OK


def _cmd_verify(doc: dsl.Document, options: dict) -> tuple[str, int]:
    name = options["circuit"]
    if name not in doc.circuits:
        raise CommandError(EXIT_SEMANTIC, f"unknown circuit '{name}'")
    layers = tuple(doc.circuit_layers(name))
    worst = 0.0
    for i in range(doc.dim):
        pd = pathsum.PathDiagram(doc.dim, layers, i)
        u = pathsum.composition_matrix(pd)
        for j in range(doc.dim):
            try:
                amplitude = pathsum.path_sum_amplitude(pd, j)
            except pathsum.PathCapExceeded as exc:
                raise CommandError(EXIT_CAP, str(exc)) from exc
            worst = max(worst, abs(amplitude - u[j, i]))
    ok = worst <= VERIFY_TOL
    text = f"{'PASS' if ok else 'FAIL'} max_deviation {sci12(worst)}\n"
    return text, EXIT_OK if ok else EXIT_VERIFY


def _cmd_contract(doc: dsl.Document, options: dict) -> tuple[str, int]:
    if not doc.has_network():
        raise CommandError(EXIT_SEMANTIC, "document declares no network nodes")
    try:
        result = doc.network().contract()
    except tensornet.NetworkError as exc:
        raise CommandError(EXIT_SEMANTIC, str(exc)) from exc
    lines = ["legs" + "".join(f" {name}" for name, _ in result.legs)]
    data = np.asarray(result.data)
    for idx in np.ndindex(*data.shape):
        key = ",".join(str(k) for k in idx) if idx else "-"
        lines.append(f"{key} {pair12(data[idx])}")
    return "\n".join(lines) + "\n", EXIT_OK


def _cmd_dot(doc: dsl.Document, options: dict) -> tuple[str, int]:
    pd = _circuit_diagram(doc, options["circuit"], options["input"])
    return pathsum.to_dot(pathsum.emit_lab_diagram(pd)), EXIT_OK


def _cmd_hadamard_test(doc: dsl.Document, options: dict) -> tuple[str, int]:
    gate_name = options["gate"]
    state_name = options["state"]
    if gate_name not in doc.gates:
        raise CommandError(EXIT_SEMANTIC, f"unknown gate '{gate_name}'")
    if state_name not in doc.states:
        raise CommandError(EXIT_SEMANTIC, f"unknown state '{state_name}'")
    part = {"re": "real", "im": "imag"}[options["part"]]
    try:
        result = measure.hadamard_test(
            doc.gates[gate_name],
            doc.states[state_name],
            part,
            options["shots"],
            options["seed"],
        )
    except ValueError as exc:
        raise CommandError(EXIT_SEMANTIC, str(exc)) from exc
    lines = [
        f"part {options['part']}",
        f"shots {options['shots']}",
        f"seed {options['seed']}",
        f"exact_p0 {sci12(result.exact_p0)}",
        f"sampled_p0 {sci12(result.sampled_p0)}",
        f"estimate {sci12(result.estimate)}",
    ]
    return "\n".join(lines) + "\n", EXIT_OK


_COMMANDS = {
    "eval": _cmd_eval,
    "paths": _cmd_paths,
    "sample": _cmd_sample,
    "verify": _cmd_verify,
    "contract": _cmd_contract,
    "dot": _cmd_dot,
    "hadamard-test": _cmd_hadamard_test,
}


def run_command(doc: dsl.Document, command: str, options: dict) -> tuple[str, int]:
    """Run one subcommand over a parsed document.

    Returns (output text, exit code); raises CommandError for semantic and
    resource problems.
    """
    if command not in _COMMANDS:
        raise CommandError(EXIT_SEMANTIC, f"unknown command '{command}'")
    return _COMMANDS[command](doc, options)


def _build_arg_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="qpath",
        description="Evaluate circuits and networks declared in a .qpd document.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, **flags):
        p = sub.add_parser(name)
        p.add_argument("file", help="path to a .qpd document")
        for flag, kwargs in flags.items():
            p.add_argument(f"--{flag}", **kwargs)
        return p

    add("eval", circuit={"required": True}, input={"required": True, "type": int})
    add(
        "paths",
        circuit={"required": True},
        input={"required": True, "type": int},
        output={"type": int, "default": None},
    )
    add(
        "sample",
        circuit={"required": True},
        input={"required": True, "type": int},
        shots={"required": True, "type": int},
        seed={"required": True, "type": int},
    )
    add("verify", circuit={"required": True})
    contract = add("contract")
    contract.add_argument("--network", action="store_true", help="contract the declared network (default action)")
    add("dot", circuit={"required": True}, input={"required": True, "type": int})
    add(
        "hadamard-test",
        gate={"required": True},
        state={"required": True},
        part={"required": True, "choices": ["re", "im"]},
        shots={"required": True, "type": int},
        seed={"required": True, "type": int},
    )
    return parser


def main(argv=None) -> int:
    args = _build_arg_parser().parse_args(argv)
    path = Path(args.file)
    try:
        data = path.read_bytes()
    except OSError as exc:
        print(f"qpath: cannot read {path}: {exc}", file=sys.stderr)
        return EXIT_SEMANTIC

    result = dsl.parse_bytes(data)
    if not result.ok:
        for diag in result.diagnostics:
            print(f"{path}:{diag.line}:{diag.column}: {diag.severity}: {diag.message}", file=sys.stderr)
            if diag.excerpt:
                print(f"  {diag.excerpt}", file=sys.stderr)
                print("  " + " " * (diag.column - 1) + "^", file=sys.stderr)
        return EXIT_PARSE

    options = {k: v for k, v in vars(args).items() if k not in ("command", "file")}
    try:
        text, code = run_command(result.document, args.command, options)
    except CommandError as exc:
        print(f"qpath: {exc}", file=sys.stderr)
        return exc.exit_code
    sys.stdout.write(text)
    return code


if __name__ == "__main__":
    raise SystemExit(main())
