"""Command-line front end.

Every command prints one JSON document (or a CSV table) and exits with
0 on success, 1 on domain or resource errors, 2 when a verification check
fails and 64 on malformed flags.
"""

import argparse
import csv
import io
import json
import math
import sys
from dataclasses import dataclass, field

from . import analytic, basis, physics, verify
from .errors import ChainEigenError, DomainError
from .operators import ChainConfig

SCHEMA = "chain-eigen/1"
EXIT_OK, EXIT_DOMAIN, EXIT_VERIFY, EXIT_USAGE = 0, 1, 2, 64
COMMANDS = ("spectrum", "state", "verify", "dark", "evolve", "dims")

ENERGY_NOTE = (
    "Energies are reported as E = M*omega0 + 2*coupling*sum_i cos(g_i*pi/(N+1)) "
    "(hbar = 1). The S^z Hamiltonian omega0*sum_i S_i^z differs from this by the "
    "constant -N*omega0/2, which is added back before reporting."
)


class UsageError(Exception):
    reported = False


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        sys.stderr.write(f"{self.prog}: error: {message}\n")
        exc = UsageError(message)
        exc.reported = True
        raise exc


@dataclass
class RunConfig:
    command: str
    n_atoms: int
    n_excitations: int | None = None
    omega0: float = 0.0
    omega: float = 1.0
    mode: tuple | None = None
    output_format: str = "json"
    output_path: str | None = None
    tolerance: float | None = None
    time: float = 0.0
    initial_state: list = field(default_factory=list)
    all_levels: bool = False
    normalize: bool = True

    def __post_init__(self):
        if self.command not in COMMANDS:
            raise UsageError(f"unknown command {self.command!r}")
        if self.command == "state" and self.mode is None:
            raise UsageError("state requires --mode")
        if self.command == "verify" and self.n_excitations is None and not self.all_levels:
            raise UsageError("verify requires --excitations or --all")
        if self.command == "evolve" and not self.initial_state:
            raise UsageError("evolve requires --initial")


def _mode_list(text):
    try:
        return tuple(int(x) for x in text.split(",") if x.strip())
    except ValueError:
        raise argparse.ArgumentTypeError(f"mode must be a comma list of integers, got {text!r}")


def _finite(text):
    try:
        value = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}")
    if not math.isfinite(value):
        raise argparse.ArgumentTypeError(f"must be finite: {text!r}")
    return value


def build_parser():
    common = _Parser(add_help=False)
    common.add_argument("-n", "--atoms", type=int, required=True, help="number of atoms N")
    common.add_argument("--omega0", type=_finite, default=0.0, help="transition frequency (default 0)")
    common.add_argument("--coupling", type=_finite, default=1.0, help="dipole coupling Omega (default 1)")
    common.add_argument("--format", choices=("json", "csv"), default="json")
    common.add_argument("--out", metavar="PATH", help="write output here instead of stdout")

    parser = _Parser(
        prog="chain-eigen",
        description="Exact eigenstates of an open chain of dipole-coupled two-level atoms.",
        epilog=ENERGY_NOTE,
    )
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("spectrum", parents=[common], help="energies of every mode", epilog=ENERGY_NOTE)
    p.add_argument("-m", "--excitations", type=int, help="restrict to level M (default: all)")

    p = sub.add_parser("state", parents=[common], help="amplitudes of one eigenstate", epilog=ENERGY_NOTE)
    p.add_argument("--mode", type=_mode_list, required=True, help="g1,g2,... strictly increasing")
    p.add_argument("--unnormalized", action="store_true", help="raw sine-determinant amplitudes")

    p = sub.add_parser("verify", parents=[common], help="run verification checks")
    p.add_argument("-m", "--excitations", type=int)
    p.add_argument("--all", action="store_true", help="every check for every level")
    p.add_argument("--tol", type=_finite, help="override every check tolerance")

    sub.add_parser("dark", parents=[common], help="ground-transition dipoles of single-excitation states")

    p = sub.add_parser("evolve", parents=[common], help="spectral time evolution", epilog=ENERGY_NOTE)
    p.add_argument("--time", type=_finite, default=0.0)
    p.add_argument("--initial", metavar="PATH", required=True,
                   help="JSON list of [[k...], re, im] or a document written by `state`")

    sub.add_parser("dims", parents=[common], help="subspace dimensions")
    return parser


def load_initial(path):
    """Read ``[[k...], re, im]`` triples, or the rows of a ``state``/``evolve`` document."""
    with open(path, encoding="utf-8") as fh:
        doc = json.load(fh)
    return parse_initial(doc)


def parse_initial(doc):
    triples = []
    if isinstance(doc, dict):
        for row in doc.get("rows", []):
            if "amplitude" in row:
                triples.append((tuple(row["k"]), float(row["amplitude"]), 0.0))
            else:
                triples.append((tuple(row["k"]), float(row["re"]), float(row["im"])))
    elif isinstance(doc, list):
        for item in doc:
            if not (isinstance(item, list) and len(item) == 3 and isinstance(item[0], list)):
                raise DomainError(f"initial-state entry must be [[k...], re, im], got {item!r}")
            triples.append((tuple(item[0]), float(item[1]), float(item[2])))
    else:
        raise DomainError("initial state must be a JSON list or a state document")
    if not triples:
        raise DomainError("initial state is empty")
    return triples


def parse_args(argv):
    args = build_parser().parse_args(argv)
    mode = getattr(args, "mode", None)
    initial = []
    if args.command == "evolve":
        try:
            initial = load_initial(args.initial)
        except (OSError, ValueError) as exc:
            raise UsageError(f"cannot read --initial: {exc}")
    return RunConfig(
        command=args.command,
        n_atoms=args.atoms,
        n_excitations=getattr(args, "excitations", None),
        omega0=args.omega0,
        omega=args.coupling,
        mode=mode,
        output_format=args.format,
        output_path=args.out,
        tolerance=getattr(args, "tol", None),
        time=getattr(args, "time", 0.0),
        initial_state=initial,
        all_levels=getattr(args, "all", False),
        normalize=not getattr(args, "unnormalized", False),
    )


def _header(config, cfg):
    return {
        "schema": SCHEMA,
        "command": config.command,
        "N": cfg.n_atoms,
        "omega0": cfg.omega0,
        "coupling": cfg.omega,
    }


def _levels(config):
    if config.n_excitations is None:
        return range(config.n_atoms + 1)
    basis.subspace_dimension(config.n_atoms, config.n_excitations)
    return [config.n_excitations]


def _spectrum(config, cfg):
    rows = []
    for m in _levels(config):
        rows += [{"g": list(g), "energy": e} for g, e in analytic.full_spectrum(cfg, m)]
    doc = _header(config, cfg) | {"M": config.n_excitations, "rows": rows}
    return doc, ["g", "energy"], EXIT_OK


def _state(config, cfg):
    st = analytic.eigenstate(config.mode, cfg, normalize=config.normalize)
    pats = basis.enumerate_patterns(cfg.n_atoms, len(st.mode))
    rows = [{"k": list(p), "amplitude": float(a)} for p, a in zip(pats, st.amplitudes)]
    doc = _header(config, cfg) | {
        "mode": list(st.mode), "energy": st.energy, "normalized": st.normalized, "rows": rows,
    }
    return doc, ["k", "amplitude"], EXIT_OK


def _verify(config, cfg, report_hook):
    levels = None if config.all_levels else _levels(config)
    reports = verify.run_suite(cfg, levels, config.tolerance)
    if report_hook is not None:
        reports = [report_hook(r) for r in reports]
    passed = all(r.passed for r in reports)
    rows = [r.to_dict() for r in reports]
    doc = _header(config, cfg) | {"passed": passed, "reports": rows}
    return doc, ["check", "N", "M", "max_deviation", "tolerance", "passed"], (
        EXIT_OK if passed else EXIT_VERIFY
    )


def _dark(config, cfg):
    rows = [r.to_dict() for r in physics.dark_scan(cfg.n_atoms)]
    doc = _header(config, cfg) | {"threshold": physics.dark_threshold(cfg.n_atoms), "rows": rows}
    return doc, ["g1", "amplitude", "is_dark"], EXIT_OK


def _evolve(config, cfg):
    amplitudes = {}
    for pattern, re, im in config.initial_state:
        if pattern in amplitudes:
            raise DomainError(f"pattern {list(pattern)} listed twice in the initial state")
        amplitudes[pattern] = complex(re, im)
    evolved = physics.evolve_mixed(amplitudes, config.time, cfg)
    rows = [{"k": list(p), "re": a.real, "im": a.imag} for p, a in evolved.items()]
    norm = math.sqrt(math.fsum(abs(a) ** 2 for a in evolved.values()))
    doc = _header(config, cfg) | {"time": config.time, "norm": norm, "rows": rows}
    return doc, ["k", "re", "im"], EXIT_OK


def _dims(config, cfg):
    levels = [basis.subspace_dimension(cfg.n_atoms, m) for m in range(cfg.n_atoms + 1)]
    doc = _header(config, cfg) | {"levels": levels, "total": sum(levels)}
    doc["rows"] = [{"M": m, "dimension": d} for m, d in enumerate(levels)]
    return doc, ["M", "dimension"], EXIT_OK


def _csv_cell(value):
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, list):
        return " ".join(str(x) for x in value)
    if value is None:
        return ""
    if isinstance(value, float):
        return repr(value)
    return str(value)


def render(doc, columns, output_format):
    if output_format == "json":
        return json.dumps(doc, ensure_ascii=False) + "\n"
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(columns)
    for row in doc.get("reports", doc.get("rows", [])):
        writer.writerow([_csv_cell(row[c]) for c in columns])
    return buf.getvalue()


def _error_doc(exc):
    return json.dumps({"schema": SCHEMA, "error": {"type": exc.kind, "message": str(exc)}}) + "\n"


def run(config, stdout=None, report_hook=None):
    """Execute one command; returns the process exit code.

    ``report_hook`` maps each verification report before pass/fail is decided.
    """
    stdout = sys.stdout if stdout is None else stdout
    try:
        cfg = ChainConfig(config.n_atoms, config.omega0, config.omega)
        if config.command == "verify":
            doc, columns, code = _verify(config, cfg, report_hook)
        else:
            handler = {
                "spectrum": _spectrum, "state": _state, "dark": _dark,
                "evolve": _evolve, "dims": _dims,
            }[config.command]
            doc, columns, code = handler(config, cfg)
    except ChainEigenError as exc:
        stdout.write(_error_doc(exc))
        return EXIT_DOMAIN
    text = render(doc, columns, config.output_format)
    if config.output_path:
        with open(config.output_path, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        stdout.write(text)
    return code


def main(argv=None, stdout=None, report_hook=None):
    try:
        config = parse_args(sys.argv[1:] if argv is None else argv)
    except UsageError as exc:
        if not exc.reported:
            sys.stderr.write(f"chain-eigen: {exc}\n")
        return EXIT_USAGE
    return run(config, stdout, report_hook)


def main_entry():
    sys.exit(main())
