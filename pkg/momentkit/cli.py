"""momentkit command line: ingest moments, run an analysis, emit a report."""

import argparse
import csv
import io
import json
import logging
import sys
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence, Tuple

from rich import box
from rich.console import Console
from rich.logging import RichHandler
from rich.table import Table

from . import __version__
from .config import Config
from .determinacy import classify
from .errors import InvalidPrecision, MomentError, NumericalError, SchemaError
from .hankel import Verdict, existence_check
from .jacobi import eigensystem, section
from .moments import (
    FAMILIES, Kind, MomentSequence, even_embed, generate, index_shift, normalize,
    reciprocal_moments, shift_moments,
)
from .nevanlinna import abcd, vonneumann_G, weyl_disk
from .orthopoly import recursion_coeffs
from .pade import pade_table
from .scalars import INFINITY, MIN_PRECISION, Arithmetic, imag_part, parse_complex, parse_scalar

logger = logging.getLogger(__name__)

COMMANDS = ('analyze', 'jacobi', 'quadrature', 'pade', 'nevanlinna', 'transform', 'classify')
TABULAR = ('pade', 'quadrature')
TRANSFORMS = ('shift', 'index-shift', 'even-embed', 'reciprocal')


@dataclass
class JobSpec:
    """One CLI invocation: where the moments come from and what to compute."""
    command: str
    file: Optional[str] = None
    generator: Optional[str] = None
    terms: Optional[int] = None
    params: Dict[str, Any] = field(default_factory=dict)
    precision_bits: int = 256
    output_format: str = 'json'

    def validate(self) -> None:
        """Reject the job before any computation runs."""
        if self.command not in COMMANDS:
            raise SchemaError(f"unknown command {self.command!r}", command=self.command)
        if not isinstance(self.precision_bits, int) or self.precision_bits < MIN_PRECISION:
            raise InvalidPrecision(f"precision must be at least {MIN_PRECISION} bits",
                                   precision=self.precision_bits)
        if (self.file is None) == (self.generator is None):
            raise SchemaError("give exactly one of --file and --generator")
        if self.generator is not None and self.terms is None:
            raise SchemaError("--generator needs --terms")
        if self.output_format not in ('json', 'csv'):
            raise SchemaError("format must be json or csv", format=self.output_format)
        if self.output_format == 'csv' and self.command not in TABULAR:
            raise SchemaError(f"csv output is only available for {', '.join(TABULAR)}",
                              command=self.command)
        p = self.params
        if self.command == 'pade':
            for key in ('x', 'nmax'):
                if p.get(key) is None:
                    raise SchemaError(f"pade needs --{key}", field=key)
            try:
                _parse_shapes(p.get('shapes'))
            except ValueError as e:
                raise SchemaError("--shapes must be comma-separated integers",
                                  shapes=p.get('shapes')) from e
        if self.command == 'nevanlinna':
            for key in ('z', 'depth'):
                if p.get(key) is None:
                    raise SchemaError(f"nevanlinna needs --{key}", field=key)
        if self.command == 'transform':
            op = p.get('op')
            if op not in TRANSFORMS:
                raise SchemaError(f"transform needs --op in {', '.join(TRANSFORMS)}", op=op)
            if op == 'shift' and p.get('c') is None:
                raise SchemaError("--op shift needs --c", field='c')
            if op == 'index-shift' and p.get('ell') is None:
                raise SchemaError("--op index-shift needs --ell", field='ell')
        if p.get('variant') is not None and p['variant'] not in ('F', 'K'):
            raise SchemaError("variant must be F or K", variant=p['variant'])


def ingest(path: str, precision: int = 256) -> MomentSequence:
    """Read a moment file: {"kind": ..., "moments": ["1", "1/2", "0.75", ...], "label": ...}."""
    try:
        text = Path(path).read_text(encoding='utf-8')
    except OSError as e:
        raise SchemaError(f"cannot read {path}: {e}", path=path) from e
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as e:
        raise SchemaError(f"{path}:{e.lineno}:{e.colno}: {e.msg}", path=path,
                          line=e.lineno, column=e.colno) from e
    if not isinstance(doc, dict):
        raise SchemaError(f"{path}: top level must be an object", path=path)
    moments = doc.get('moments')
    if not isinstance(moments, list):
        raise SchemaError(f"{path}: field 'moments' must be an array of strings",
                          path=path, field='moments')
    values = []
    for i, item in enumerate(moments):
        if not isinstance(item, str):
            raise SchemaError(f"{path}: moments[{i}] must be a string, got {type(item).__name__}",
                              path=path, field=f'moments[{i}]')
        try:
            values.append(parse_scalar(item, precision))
        except SchemaError as e:
            raise SchemaError(f"{path}: moments[{i}]: {e.message}", path=path,
                              field=f'moments[{i}]') from e
    kind = doc.get('kind', Kind.UNKNOWN.value)
    try:
        kind = Kind(kind)
    except ValueError as e:
        raise SchemaError(f"{path}: field 'kind' must be one of hamburger, stieltjes, unknown",
                          path=path, field='kind') from e
    label = doc.get('label', '')
    if not isinstance(label, str):
        raise SchemaError(f"{path}: field 'label' must be a string", path=path, field='label')
    return normalize(values, kind, label, precision)


def load_sequence(job: JobSpec) -> MomentSequence:
    if job.file is not None:
        return ingest(job.file, job.precision_bits)
    if job.generator not in FAMILIES:
        raise SchemaError(f"unknown generator {job.generator!r}", generator=job.generator)
    return generate(job.generator, job.terms, job.precision_bits)


def _depth(job: JobSpec, default: int) -> int:
    depth = job.params.get('depth')
    return default if depth is None else int(depth)


def _parse_shapes(text: Any) -> List[int]:
    return [int(s) for s in str(text or '0,1').split(',') if s.strip()]


def _parse_t(text: str, precision: int) -> Any:
    if str(text).strip().lower() in ('inf', 'infinity'):
        return INFINITY
    return parse_scalar(text, precision)


def _analyze(seq: MomentSequence, job: JobSpec, config: Config) -> Dict[str, Any]:
    report = existence_check(seq)
    result: Dict[str, Any] = {'hankel': report.to_dict(seq.arithmetic)}
    if report.verdict in (Verdict.HAMBURGER_OK, Verdict.STIELTJES_OK):
        result['coefficients'] = recursion_coeffs(seq).to_dict()
    return result


def _jacobi(seq: MomentSequence, job: JobSpec, config: Config) -> Dict[str, Any]:
    coeffs = recursion_coeffs(seq)
    sec = section(coeffs, _depth(job, coeffs.N), job.params.get('variant') or 'F')
    return {'coefficients': coeffs.to_dict(), 'section': sec.to_dict(),
            'determinant': sec.arithmetic.render(sec.determinant())}


def _quadrature(seq: MomentSequence, job: JobSpec, config: Config) -> Dict[str, Any]:
    coeffs = recursion_coeffs(seq)
    sec = section(coeffs, _depth(job, coeffs.N), job.params.get('variant') or 'F')
    doc = eigensystem(sec).to_dict()
    rows = [['node', 'weight']] + [list(pair) for pair in zip(doc['nodes'], doc['weights'])]
    return {'quadrature': doc, '_rows': rows}


def _pade(seq: MomentSequence, job: JobSpec, config: Config) -> Dict[str, Any]:
    p = job.params
    x = parse_scalar(p['x'], job.precision_bits)
    shapes = _parse_shapes(p.get('shapes'))
    table = pade_table(seq, x, int(p['nmax']), shapes, config.ell_max)
    arith = seq.arithmetic.promote(x)
    return {'pade': table.to_dict(arith), '_rows': table.to_rows(arith)}


def _nevanlinna(seq: MomentSequence, job: JobSpec, config: Config) -> Dict[str, Any]:
    p = job.params
    z = parse_complex(p['z'], job.precision_bits)
    depth = int(p['depth'])
    coeffs = recursion_coeffs(seq)
    m = abcd(coeffs, z, depth)
    result: Dict[str, Any] = {'abcd': m.to_dict()}
    arith = m.arithmetic
    if arith.sign(imag_part(m.z)) > 0:
        result['weyl_disk'] = weyl_disk(coeffs, z, depth + 1).to_dict()
    ts = [t for t in str(p.get('t') or '').split(',') if t.strip()]
    values = {}
    for text in ts:
        g = vonneumann_G(coeffs, _parse_t(text, job.precision_bits), z, depth)
        values[text.strip()] = arith.render(g)
    if values:
        result['vonneumann_G'] = values
    return result


def _transform(seq: MomentSequence, job: JobSpec, config: Config) -> Dict[str, Any]:
    p = job.params
    op = p['op']
    if op == 'shift':
        out = shift_moments(seq, parse_scalar(p['c'], job.precision_bits))
    elif op == 'index-shift':
        out = index_shift(seq, int(p['ell']))
    elif op == 'even-embed':
        out = even_embed(seq)
    else:
        out = reciprocal_moments(seq)
    return {'moments': out.to_document(), 'digest': out.digest()}


def _classify(seq: MomentSequence, job: JobSpec, config: Config) -> Dict[str, Any]:
    settings = config.get_determinacy_settings()
    depth = job.params.get('depth')
    report = classify(seq, None if depth is None else int(depth),
                      settings['cauchy_fraction'], settings['divergence_ratio'],
                      settings['tail_exponent_guard'])
    return {'determinacy': report.to_dict()}


HANDLERS = {
    'analyze': _analyze,
    'jacobi': _jacobi,
    'quadrature': _quadrature,
    'pade': _pade,
    'nevanlinna': _nevanlinna,
    'transform': _transform,
    'classify': _classify,
}


def run(job: JobSpec, config: Optional[Config] = None) -> Tuple[int, Dict[str, Any]]:
    """Run one job.

    Returns:
        (exit code, report document). Exit 0 on success, 2 for validation
        errors and 3 for numerical failures; failures carry an error record.
    """
    config = config or Config()
    document: Dict[str, Any] = {
        'tool': {'name': 'momentkit', 'version': __version__},
        'command': job.command,
        'parameters': {
            'file': job.file,
            'generator': job.generator,
            'terms': job.terms,
            'precision_bits': job.precision_bits,
            'format': job.output_format,
            'params': {k: str(v) for k, v in sorted(job.params.items()) if v is not None},
        },
    }
    try:
        job.validate()
        seq = load_sequence(job)
        document['input'] = {
            'digest': seq.digest(),
            'label': seq.label,
            'kind': seq.kind.value,
            'K': seq.K,
        }
        document['mode'] = Arithmetic(seq.exact, job.precision_bits).mode
        document['result'] = HANDLERS[job.command](seq, job, config)
    except MomentError as e:
        logger.error("%s: %s", e.__class__.__name__, e.message)
        document['error'] = e.to_record()
        return e.exit_code, document
    except (ArithmeticError, TypeError, ValueError) as e:
        # anything the library did not classify is a numerical breakdown
        logger.error("%s: %s", e.__class__.__name__, e)
        failure = NumericalError(str(e) or e.__class__.__name__, cause=e.__class__.__name__)
        document['error'] = failure.to_record()
        return failure.exit_code, document
    return 0, document


def render_document(document: Dict[str, Any], output_format: str = 'json') -> str:
    """Serialize deterministically: sorted JSON with two-space indent, or CSV rows."""
    result = document.get('result', {})
    rows = result.get('_rows') if isinstance(result, dict) else None
    if output_format == 'csv' and rows is not None and 'error' not in document:
        buf = io.StringIO()
        csv.writer(buf, lineterminator='\n').writerows(rows)
        return buf.getvalue()
    clean = dict(document)
    if isinstance(result, dict) and '_rows' in result:
        clean['result'] = {k: v for k, v in result.items() if k != '_rows'}
    return json.dumps(clean, sort_keys=True, indent=2) + '\n'


def setup_logging(level: str) -> None:
    """One RichHandler on the root logger, writing to stderr."""
    logging.basicConfig(
        level=getattr(logging, str(level).upper(), logging.INFO),
        format="%(message)s",
        datefmt="[%X]",
        handlers=[RichHandler(console=Console(stderr=True), show_path=False)],
        force=True,
    )


# options whose values may start with '-'
_SIGNED_OPTIONS = ('--x', '--z', '--c', '--t', '--shapes', '--ell')


def _join_signed(argv: Sequence[str]) -> List[str]:
    out: List[str] = []
    it = iter(argv)
    for token in it:
        if token in _SIGNED_OPTIONS:
            value = next(it, None)
            out.append(token if value is None else f"{token}={value}")
        else:
            out.append(token)
    return out


class MomentCLI:
    """Argument parsing and report output for momentkit."""

    def __init__(self, console: Optional[Console] = None):
        self.console = console or Console()

    def build_parser(self) -> argparse.ArgumentParser:
        parser = argparse.ArgumentParser(
            prog="momentkit",
            description="momentkit - classical moment problems from finite moment prefixes"
        )
        parser.add_argument("--version", action="version", version=f"momentkit {__version__}")

        common = argparse.ArgumentParser(add_help=False)
        source = common.add_mutually_exclusive_group()
        source.add_argument("--file", help="Moment file (JSON)")
        source.add_argument("--generator", choices=FAMILIES, help="Named moment family")
        common.add_argument("--terms", type=int, help="K for --generator (gamma_0..gamma_K)")
        common.add_argument("--precision", type=int, help="Float precision in bits")
        common.add_argument("--depth", type=int, help="Truncation depth N")
        common.add_argument("--out", help="Write the report to this path")
        common.add_argument("--format", choices=("json", "csv"), help="Report format")
        common.add_argument("--config", help="YAML configuration file")
        common.add_argument("--log-level", help="DEBUG, INFO, WARNING or ERROR")

        subparsers = parser.add_subparsers(dest="command", help="Available commands")

        subparsers.add_parser("analyze", parents=[common], help="Hankel determinants and verdict")

        for name, help_text in (("jacobi", "Jacobi section of size --depth"),
                                ("quadrature", "Nodes and weights of a section")):
            p = subparsers.add_parser(name, parents=[common], help=help_text)
            p.add_argument("--variant", choices=("F", "K"), default="F", help="Section variant")

        pade = subparsers.add_parser("pade", parents=[common], help="Padé staircase table")
        pade.add_argument("--x", help="Evaluation point x >= 0")
        pade.add_argument("--nmax", type=int, help="Largest denominator degree")
        pade.add_argument("--shapes", default="0,1", help="Comma-separated ell values")

        nev = subparsers.add_parser("nevanlinna", parents=[common],
                                    help="A, B, C, D, Weyl disk and von Neumann values")
        nev.add_argument("--z", help="Point, e.g. 1+1i")
        nev.add_argument("--t", help="Comma-separated real parameters (or inf)")

        transform = subparsers.add_parser("transform", parents=[common],
                                          help="Transform a moment sequence")
        transform.add_argument("--op", choices=TRANSFORMS, help="Transform to apply")
        transform.add_argument("--c", help="Translation for --op shift")
        transform.add_argument("--ell", type=int, help="Index shift for --op index-shift")

        subparsers.add_parser("classify", parents=[common], help="Determinacy evidence")
        return parser

    def job_from_args(self, args: argparse.Namespace, config: Config) -> JobSpec:
        params = {}
        for key in ('depth', 'variant', 'x', 'nmax', 'shapes', 'z', 't', 'op', 'c', 'ell'):
            value = getattr(args, key, None)
            if value is not None:
                params[key] = value
        return JobSpec(
            command=args.command,
            file=args.file,
            generator=args.generator,
            terms=args.terms,
            params=params,
            precision_bits=args.precision if args.precision is not None else config.precision_bits,
            output_format=args.format or config.output_format,
        )

    def run(self, argv: Optional[Sequence[str]] = None) -> int:
        parser = self.build_parser()
        args = parser.parse_args(_join_signed(sys.argv[1:] if argv is None else argv))
        if args.command is None:
            parser.print_help()
            return 0

        try:
            config = Config(args.config) if args.config else Config()
        except MomentError as e:
            setup_logging('ERROR')
            logger.error("%s", e.message)
            return e.exit_code
        setup_logging(args.log_level or config.log_level)

        job = self.job_from_args(args, config)
        code, document = run(job, config)
        text = render_document(document, job.output_format)
        if args.out:
            Path(args.out).write_text(text, encoding='utf-8')
            self._summary(document, args.out)
        else:
            sys.stdout.write(text)
        return code

    def _summary(self, document: Dict[str, Any], path: str) -> None:
        table = Table(title=f"momentkit {document['command']}", box=box.ROUNDED)
        table.add_column("Field", style="cyan")
        table.add_column("Value")
        table.add_row("report", path)
        if 'input' in document:
            table.add_row("input", document['input']['digest'][:16])
            table.add_row("mode", document.get('mode', ''))
        if 'error' in document:
            table.add_row("error", f"[red]{document['error']['error']}[/red]: "
                                   f"{document['error']['message']}")
        else:
            result = document['result']
            if 'hankel' in result:
                table.add_row("verdict", result['hankel']['verdict'])
            if 'determinacy' in result:
                table.add_row("verdict", result['determinacy']['verdict'])
            if 'pade' in result:
                table.add_row("bracket", ", ".join(str(v) for v in result['pade']['bracket']))
        self.console.print(table)


def main(argv: Optional[Sequence[str]] = None) -> int:
    """Main entry point."""
    return MomentCLI().run(argv)


if __name__ == "__main__":
    sys.exit(main())
