"""Command-line front end: clause listings, synthesis reports, verification.

Exit codes: 0 success, 1 verification mismatch, 2 input error.
"""
from __future__ import annotations

import argparse
import math
import sys
import time
from dataclasses import dataclass, fields
from typing import Sequence, TextIO

from dagquery import library, simulator, synth
from dagquery import topology as topo
from dagquery.circuit import CircuitError
from dagquery.clauses import ClauseFormatError, catalog_match, format_clauses
from dagquery.topology import SetGraph, TopologyError

EXIT_OK = 0
EXIT_MISMATCH = 1
EXIT_INPUT = 2

DEFAULT_SEED = 0
BASELINE_LABEL = "MCX-style baseline"


class InputError(Exception):
    pass


@dataclass(frozen=True)
class RunConfig:
    topology: str
    seed: int = DEFAULT_SEED
    opt_budget: int = synth.DEFAULT_BUDGET
    max_qubits: int = simulator.DEFAULT_MAX_QUBITS
    fmt: str = "table"
    baseline: bool = False
    check_fixture: bool = False
    simulate: bool = False


@dataclass(frozen=True)
class ReportRow:
    name: str
    eloops: int
    clauses: int
    edges: int
    pad: int
    ancillas: int
    baseline_ancillas: int
    total_qubits: int
    depth_unordered: int
    depth_ordered: int
    r: int
    N: int
    theta: float
    t: int
    area: int

    def __post_init__(self) -> None:
        if self.total_qubits != self.edges + self.pad + self.ancillas + 1:
            raise ValueError(f"{self.name}: qubit total does not add up")

    @property
    def ancilla_gain(self) -> float:
        """Fractional ancilla saving against the baseline."""
        return 1.0 - self.ancillas / self.baseline_ancillas


def _load(source: str) -> SetGraph:
    try:
        return library.resolve(source)
    except OSError as exc:
        raise InputError(f"cannot read topology {source!r}: {exc.strerror or exc}") from None


@dataclass
class Synthesis:
    graph: SetGraph
    clauses: object
    winners: frozenset[int]
    params: synth.GroverParams
    spec: synth.OracleSpec
    unordered: synth.OracleSpec
    row: ReportRow


def synthesize(cfg: RunConfig) -> Synthesis:
    g = _load(cfg.topology)
    cs = topo.oracle_clauses(g)
    if len(cs) == 0:
        raise InputError(f"{g.name}: no cycles, nothing to search for")
    winners = topo.brute_force_winners(g, cs)
    N = 1 << g.n
    pad = 1 if synth.needs_padding(len(winners), N) else 0
    p = synth.compute_grover_params(len(winners), N << pad)
    unordered = synth.plan(cs, pad)
    spec = synth.optimize_order(unordered, g, cs, p, seed=cfg.seed, budget=cfg.opt_budget)
    base = synth.baseline_spec(cs, pad)
    d_ordered = synth.full_depth(g, cs, spec, p)
    total = g.n + pad + spec.n_ancillas + 1
    row = ReportRow(
        name=g.name,
        eloops=g.cycle_rank,
        clauses=len(cs),
        edges=g.n,
        pad=pad,
        ancillas=spec.n_ancillas,
        baseline_ancillas=base.n_ancillas,
        total_qubits=total,
        depth_unordered=synth.full_depth(g, cs, unordered, p),
        depth_ordered=d_ordered,
        r=len(winners),
        N=N << pad,
        theta=p.theta,
        t=p.t,
        area=d_ordered * total,
    )
    return Synthesis(g, cs, winners, p, spec, unordered, row)


# -- rendering ---------------------------------------------------------------------


def _cell(v) -> str:
    if isinstance(v, float):
        return f"{v:.6f}"
    return str(v)


def _columns(baseline: bool) -> list[str]:
    cols = [f.name for f in fields(ReportRow)]
    return cols + ["ancilla_gain"] if baseline else cols


def _values(row: ReportRow, baseline: bool) -> list[str]:
    vals = [_cell(getattr(row, f.name)) for f in fields(ReportRow)]
    if baseline:
        vals.append(f"{100 * row.ancilla_gain:.1f}%")
    return vals


def render_rows(rows: Sequence[ReportRow], fmt: str, baseline: bool, errors: Sequence[str] = ()) -> str:
    cols = _columns(baseline)
    if fmt == "records":
        lines = [
            " ".join(f"{k}={v}" for k, v in zip(cols, _values(r, baseline))) for r in rows
        ]
        lines += [f"error {e}" for e in errors]
        return "".join(line + "\n" for line in lines)
    table = [cols] + [_values(r, baseline) for r in rows]
    widths = [max(len(row[i]) for row in table) for i in range(len(cols))]
    lines = ["  ".join(v.rjust(w) for v, w in zip(row, widths)).rstrip() for row in table]
    lines.insert(1, "  ".join("-" * w for w in widths))
    if baseline:
        lines.append(f"ancilla_gain is measured against the {BASELINE_LABEL}")
    lines += [f"! {e}" for e in errors]
    return "\n".join(lines) + "\n"


# -- commands -----------------------------------------------------------------------


def cmd_clauses(cfg: RunConfig, out: TextIO) -> int:
    g = _load(cfg.topology)
    full = topo.generate_clauses(g)
    cs = topo.oracle_clauses(g)
    out.write(f"# {g.name}: {len(full)} clauses before fixing s{g.fixed_set}, {len(cs)} after\n")
    out.write(format_clauses(full))
    out.write(f"# after fixing e{g.fixed_edge} and dropping chord-implied clauses\n")
    out.write(format_clauses(cs))
    if not cfg.check_fixture:
        return EXIT_OK
    fixture = library.FIXTURES.get(g.name)
    if fixture is None:
        out.write(f"fixture: none stored for {g.name}\n")
        return EXIT_OK
    ok, missing, unexpected = catalog_match(cs, fixture.clauses(True))
    out.write(f"fixture: {'match' if ok else 'MISMATCH'}\n")
    for c in missing:
        out.write(f"  missing {c}\n")
    for c in unexpected:
        out.write(f"  unexpected {c}\n")
    return EXIT_OK if ok else EXIT_MISMATCH


def _simulate(s: Synthesis, cfg: RunConfig, out: TextIO) -> int:
    c = synth.emit_circuit(s.graph, s.clauses, s.spec, s.params)
    if c.n_qubits > cfg.max_qubits:
        out.write(
            f"simulation skipped: synthesis only, {c.n_qubits} qubits exceeds the budget of {cfg.max_qubits}\n"
        )
        return EXIT_OK
    rep = simulator.grover_verify(s.graph, c, s.params, s.winners, cfg.max_qubits)
    out.write(rep.to_text(list_states=False))
    return EXIT_OK if rep.ok else EXIT_MISMATCH


def cmd_synth(cfg: RunConfig, out: TextIO) -> int:
    s = synthesize(cfg)
    out.write(synth.format_spec(s.spec, s.graph.name))
    out.write(render_rows([s.row], cfg.fmt, cfg.baseline))
    if cfg.simulate:
        return _simulate(s, cfg, out)
    return EXIT_OK


def cmd_verify(cfg: RunConfig, out: TextIO) -> int:
    s = synthesize(cfg)
    by_cycles = topo.cycle_detect_winners(s.graph)
    agree = by_cycles == s.winners
    out.write(f"clause winners {len(s.winners)}\n")
    out.write(f"cycle-detection winners {len(by_cycles)}\n")
    out.write(f"classical oracles {'agree' if agree else 'DISAGREE'}\n")
    code = _simulate(s, cfg, out)
    return EXIT_OK if agree and code == EXIT_OK else EXIT_MISMATCH


def cmd_report(cfgs: Sequence[RunConfig], out: TextIO, fmt: str, baseline: bool) -> int:
    rows, errors = [], []
    for cfg in cfgs:
        try:
            rows.append(synthesize(cfg).row)
        except (InputError, TopologyError, synth.SynthesisError, CircuitError) as exc:
            errors.append(f"{cfg.topology}: {exc}")
    out.write(render_rows(rows, fmt, baseline, errors))
    return EXIT_INPUT if errors else EXIT_OK


# -- argument parsing ------------------------------------------------------------------


def _common(p: argparse.ArgumentParser, many: bool = False) -> None:
    if many:
        p.add_argument("--topology", action="append", default=[], metavar="SRC",
                       help="path or builtin:NAME, repeatable")
        p.add_argument("--all-builtins", action="store_true", help="report every builtin topology")
    else:
        p.add_argument("--topology", required=True, metavar="SRC", help="path or builtin:NAME")
    p.add_argument("--seed", type=int, default=DEFAULT_SEED)
    p.add_argument("--opt-budget", type=int, default=synth.DEFAULT_BUDGET, metavar="EVALS")
    p.add_argument("--max-qubits", type=int, default=simulator.DEFAULT_MAX_QUBITS, metavar="N")
    p.add_argument("--format", choices=("table", "records"), default="table")
    p.add_argument("--baseline", action="store_true", help=f"add gains against the {BASELINE_LABEL}")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="dagquery", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="command", required=True)
    p = sub.add_parser("clauses", help="list eloop clauses before and after edge fixing")
    _common(p)
    p.add_argument("--check-fixture", action="store_true")
    p = sub.add_parser("synth", help="synthesise the oracle and print its resources")
    _common(p)
    p.add_argument("--simulate", action="store_true", help="also run the statevector check")
    p = sub.add_parser("verify", help="compare classical oracles and simulate Grover")
    _common(p)
    p = sub.add_parser("report", help="resource table over several topologies")
    _common(p, many=True)
    return ap


def _config(ns: argparse.Namespace, source: str) -> RunConfig:
    if ns.seed < 0 or ns.seed >= 1 << 64:
        raise InputError("--seed must fit in an unsigned 64-bit integer")
    if ns.opt_budget < 1:
        raise InputError("--opt-budget must be positive")
    return RunConfig(
        topology=source,
        seed=ns.seed,
        opt_budget=ns.opt_budget,
        max_qubits=ns.max_qubits,
        fmt=ns.format,
        baseline=ns.baseline,
        check_fixture=getattr(ns, "check_fixture", False),
        simulate=getattr(ns, "simulate", False),
    )


def main(argv: Sequence[str] | None = None, out: TextIO | None = None) -> int:
    out = out or sys.stdout
    try:
        ns = build_parser().parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_INPUT
    try:
        if ns.command == "report":
            sources = list(ns.topology)
            if ns.all_builtins:
                sources += [f"builtin:{b}" for b in library.BUILTINS]
            cfgs = [_config(ns, s) for s in sources]
            return cmd_report(cfgs, out, ns.format, ns.baseline)
        cfg = _config(ns, ns.topology)
        started = time.perf_counter()
        code = {"clauses": cmd_clauses, "synth": cmd_synth, "verify": cmd_verify}[ns.command](cfg, out)
        if cfg.fmt == "table":
            out.write(f"# {time.perf_counter() - started:.2f}s\n")
        return code
    except (InputError, TopologyError, ClauseFormatError, synth.SynthesisError) as exc:
        print(f"dagquery: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except simulator.SimulationError as exc:
        print(f"dagquery: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
