"""Command-line front end: ``dstab <command> [options]``.

Exit codes: 0 certified/consistent, 1 falsified, 2 inconclusive; 64 usage,
65 malformed input, 66 missing file, 67 dimension mismatch, 68 unsupported
exact-mode angle or region, 69 matrix precondition violated (singular),
70 eigenvalue failure.
"""

import argparse
import csv
from fractions import Fraction
import hashlib
import json
import math
from pathlib import Path
import sys
import time

import numpy as np

from . import __version__, certify, config
from .classes import ENUMERATION_GUARD, classify
from .compound import second_additive_compound
from .criteria import (PerturbationClass, boundary_tests_sector, dstab_check,
                       falsify_sweep)
from .exceptions import (DimensionGuardError, EigenvalueError, MatrixFormatError,
                         MatrixShapeError, PerturbationClassError, RegionError,
                         SingularMatrixError, UnsupportedError)
from .formats import matrix_to_rows, parse_matrix
from .linalg import as_float, eigenvalues
from .regions import (RegionKind, boundary_samples, make_half_plane, make_sector, make_shifted,
                      region_from_dict, region_to_dict, spectrum_in_region)
from .systems import (DirectFormSystem, FractionalSystem, SecondOrderSystem, frac_order_to_sector,
                      frac_system_dstab, relative_dstab_check, system_from_dict, to_first_order)

SCHEMA = 'dstab-report/1'

EXIT_OK, EXIT_FALSIFIED, EXIT_INCONCLUSIVE = 0, 1, 2
EXIT_USAGE, EXIT_MALFORMED, EXIT_NO_FILE, EXIT_DIMENSION = 64, 65, 66, 67
EXIT_UNSUPPORTED, EXIT_PRECONDITION, EXIT_EIGEN = 68, 69, 70


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _global_flags():
    p = argparse.ArgumentParser(add_help=False)
    g = p.add_argument_group('global options')
    g.add_argument('--tol', type=float, default=config.DEFAULT_TOLERANCE,
                   help='numerical tolerance (default %(default)g)')
    g.add_argument('--seed', type=int, default=0, help='sampling seed (default 0)')
    g.add_argument('--budget', type=int, default=1000, help='number of sampled perturbations')
    g.add_argument('--workers', type=int, default=None, help='threads for sampling sweeps')
    g.add_argument('--exact', action='store_true', help='rational ingestion and arithmetic')
    g.add_argument('--out', help='write the JSON report here instead of stdout')
    g.add_argument('--plot-data', help='write eigenvalue and boundary points as CSV')
    g.add_argument('--cert-out', help='certificate file (default: <out>.cert.json)')
    return p


def _region_flags(p, required=False):
    p.add_argument('--region', required=required, default=None if required else 'halfplane',
                   help='halfplane | shifted | sector | path to region JSON')
    p.add_argument('--alpha', type=float, help='shift of the half-plane')
    p.add_argument('--theta', type=float, help='sector half-angle in (0, pi/2]')
    p.add_argument('--two-cos', help='exact 2cos(theta) as p/q')
    p.add_argument('--class', dest='cls', choices=[c.value for c in PerturbationClass],
                   help='perturbation class (default inferred from the region)')


def build_parser():
    common = _global_flags()
    parser = _Parser(prog='dstab',
                     description='Stability and D-stability analysis over LMI regions.')
    parser.add_argument('--version', action='version', version=f'dstab {__version__}')
    sub = parser.add_subparsers(dest='command', parser_class=_Parser, metavar='command')
    sub.required = True

    def cmd(name, help_):
        return sub.add_parser(name, parents=[common], help=help_)

    c = cmd('eig', 'spectrum with residual')
    c.add_argument('--matrix', required=True)

    c = cmd('classes', 'Q, P, P0 and P0+ membership')
    c.add_argument('--matrix', required=True)
    c.add_argument('--guard', type=int, default=ENUMERATION_GUARD)

    c = cmd('compound', 'second additive compound')
    c.add_argument('--matrix', required=True)

    c = cmd('region-check', 'locate the spectrum relative to a region')
    c.add_argument('--matrix', required=True)
    _region_flags(c)

    c = cmd('boundary', 'six boundary conditions for one diagonal D')
    c.add_argument('--matrix', required=True)
    c.add_argument('--d', required=True, help='comma separated diagonal entries')
    c.add_argument('--theta', type=float, default=math.pi / 2)
    c.add_argument('--mirrored', action='store_true',
                   help='use the rays bounding the sector about the negative real axis')

    c = cmd('check', 'full D-stability pipeline')
    c.add_argument('--matrix', required=True)
    c.add_argument('--multiplier', type=int, default=6,
                   help='largest Polya-type multiplier degree tried by the certificate')
    _region_flags(c)

    c = cmd('certify', 'exact parametric polynomial and orthant certificate')
    c.add_argument('--matrix', required=True)
    c.add_argument('--multiplier', type=int, default=0)
    c.add_argument('--charpoly-sum', action='store_true',
                   help='emit the cleared characteristic polynomial of A D^-1 + D A^-1 instead')
    _region_flags(c)

    c = cmd('mech', 'second-order mechanical system')
    c.add_argument('--system', required=True)
    c.add_argument('--zeta', type=float, help='minimal damping ratio in (0, 1)')
    _region_flags(c)

    c = cmd('frac', 'fractional-order system')
    c.add_argument('--matrix')
    c.add_argument('--system')
    c.add_argument('--gamma', help='fractional order in [1, 2); p/q keeps exact angles')

    c = cmd('sweep', 'falsification sweep only')
    c.add_argument('--matrix', required=True)
    _region_flags(c)
    return parser


# --------------------------------------------------------------------------
# Input handling
# --------------------------------------------------------------------------

def _read_matrix(path, exact):
    p = Path(path)
    if not p.is_file():
        raise FileNotFoundError(path)
    return parse_matrix(p, exact)


def _digest(*paths):
    h = hashlib.sha256()
    for path in paths:
        if path:
            h.update(Path(path).read_bytes())
    return h.hexdigest()


def parse_region(args):
    """Region from ``--region`` (a name or a JSON path) plus the angle/shift flags."""
    spec = args.region
    if spec in ('halfplane', 'half_plane', 'half-plane'):
        return make_half_plane()
    if spec == 'shifted':
        if args.alpha is None:
            raise UsageError('--region shifted needs --alpha')
        return make_shifted(args.alpha)
    if spec == 'sector':
        if args.theta is None and args.two_cos is None:
            raise UsageError('--region sector needs --theta or --two-cos')
        two_cos = None
        if args.two_cos is not None:
            try:
                two_cos = Fraction(args.two_cos)
            except ValueError as exc:
                raise UsageError(f'invalid --two-cos {args.two_cos!r}') from exc
        return make_sector(args.theta, two_cos)
    p = Path(spec)
    if p.suffix.lower() == '.json' or p.exists():
        if not p.is_file():
            raise FileNotFoundError(spec)
        try:
            doc = json.loads(p.read_text())
        except json.JSONDecodeError as exc:
            raise MatrixFormatError(f"invalid JSON: {exc.msg}", exc.lineno, exc.colno, spec) from exc
        return region_from_dict(doc)
    raise UsageError(f'unknown region {spec!r}')


def _require_exact_region(region, args):
    if not args.exact:
        return
    exact_ok = (region.kind is RegionKind.LEFT_HALF_PLANE
                or (region.kind is RegionKind.SHIFTED and region.alpha == 0)
                or (region.kind is RegionKind.SECTOR and region.two_cos is not None))
    if not exact_ok:
        raise UnsupportedError(
            f"exact mode supports the half-plane and sectors with rational 2cos(theta); got {region!r}")


def parse_system(path, exact):
    p = Path(path)
    if not p.is_file():
        raise FileNotFoundError(path)
    try:
        doc = json.loads(p.read_text())
    except json.JSONDecodeError as exc:
        raise MatrixFormatError(f"invalid JSON: {exc.msg}", exc.lineno, exc.colno, path) from exc
    return system_from_dict(doc, exact, source=str(path))


# --------------------------------------------------------------------------
# Report assembly
# --------------------------------------------------------------------------

def _complex_list(values):
    return [[float(np.real(v)), float(np.imag(v))] for v in values]


class Report:
    def __init__(self, args, inputs):
        self.args = args
        self.doc = {
            'schema': SCHEMA,
            'toolVersion': __version__,
            'command': args.command,
            'inputDigest': _digest(*inputs),
            'parameters': {'seed': args.seed, 'budget': args.budget, 'tolerance': args.tol,
                           'exact': args.exact},
            'verdict': None,
            'result': None,
            'spectra': [],
            'timings': {},
            'certificatePath': None,
        }
        self.plot = []

    def timed(self, name, fn, *a, **kw):
        t0 = time.perf_counter()
        out = fn(*a, **kw)
        self.doc['timings'][name] = round(time.perf_counter() - t0, 6)
        return out

    def spectrum(self, label, M):
        spec = self.timed(f'eig:{label}', eigenvalues, M)
        self.doc['spectra'].append({'label': label, 'eigenvalues': _complex_list(spec.eigenvalues),
                                    'residual': spec.residual})
        self.plot.extend((label, v) for v in spec.eigenvalues)
        return spec

    def boundary(self, region):
        radius = 1.5 * max([abs(v) for _, v in self.plot] + [1.0])
        self.plot.extend(('boundary', v) for v in boundary_samples(region, radius, 101))

    def verdict(self, v):
        self.doc['verdict'] = v.to_dict(include_certificate=False)
        self.doc['timings'].update(v.timings())
        if v.witness is not None:
            self.plot.append(('witness', v.witness.eigenvalue))
        if v.certificate is not None:
            self.certificate(v.certificate)
        return v.exit_code

    def certificate(self, doc):
        path = self.args.cert_out or (f"{self.args.out}.cert.json" if self.args.out else None)
        if path:
            Path(path).write_text(json.dumps(doc, indent=2) + '\n')
            self.doc['certificatePath'] = str(path)
        else:
            self.doc['certificate'] = doc

    def emit(self):
        text = json.dumps(self.doc, indent=2, default=str) + '\n'
        if self.args.out:
            Path(self.args.out).write_text(text)
        else:
            sys.stdout.write(text)
        if self.args.plot_data:
            with open(self.args.plot_data, 'w', newline='') as fh:
                w = csv.writer(fh)
                w.writerow(['label', 're', 'im'])
                for label, v in self.plot:
                    w.writerow([label, repr(float(np.real(v))), repr(float(np.imag(v)))])


# --------------------------------------------------------------------------
# Commands
# --------------------------------------------------------------------------

def _cmd_eig(args, rep):
    A = _read_matrix(args.matrix, args.exact)
    spec = rep.spectrum('A', A)
    rep.doc['result'] = {'abscissa': spec.abscissa, 'residual': spec.residual}
    return EXIT_OK


def _cmd_classes(args, rep):
    A = _read_matrix(args.matrix, args.exact)
    report = rep.timed('classes', classify, A, args.tol, args.guard)
    rep.doc['result'] = report.to_dict()
    return EXIT_OK


def _cmd_compound(args, rep):
    A = _read_matrix(args.matrix, args.exact)
    comp = rep.timed('compound', second_additive_compound, A)
    rep.spectrum('A', A)
    rep.spectrum('A^[2]', comp.matrix)
    rep.doc['result'] = {'index': [[i + 1, j + 1] for i, j in comp.index],
                         'rows': matrix_to_rows(comp.matrix)}
    return EXIT_OK


def _cmd_region_check(args, rep):
    A = _read_matrix(args.matrix, args.exact)
    region = parse_region(args)
    spec = rep.spectrum('A', A)
    loc = spectrum_in_region(spec, region, args.tol)
    rep.boundary(region)
    rep.doc['parameters']['region'] = region_to_dict(region)
    rep.doc['result'] = {'allInside': loc.all_inside,
                         'boundaryHits': _complex_list(loc.boundary_hits),
                         'outside': _complex_list(loc.outside)}
    return EXIT_OK if loc.all_inside else EXIT_FALSIFIED


def _cmd_boundary(args, rep):
    A = _read_matrix(args.matrix, args.exact)
    try:
        d = [float(x) for x in args.d.split(',')]
    except ValueError as exc:
        raise UsageError(f'invalid --d {args.d!r}') from exc
    if len(d) != A.shape[0]:
        raise MatrixShapeError(f"--d has {len(d)} entries, matrix has dimension {A.shape[0]}")
    bundle = rep.timed('boundary', boundary_tests_sector, A, d, args.theta, args.tol, args.mirrored)
    rep.spectrum('DA', np.asarray(d)[:, None] * as_float(A))
    rep.doc['parameters'].update({'d': d, 'theta': args.theta, 'mirrored': args.mirrored})
    rep.doc['result'] = bundle.to_dict()
    return EXIT_OK if bundle.agreement else EXIT_INCONCLUSIVE


def _cls(args):
    return None if args.cls is None else PerturbationClass(args.cls)


def _cmd_check(args, rep):
    A = _read_matrix(args.matrix, args.exact)
    region = parse_region(args)
    _require_exact_region(region, args)
    rep.spectrum('A', A)
    rep.doc['parameters']['region'] = region_to_dict(region)
    v = dstab_check(A, region, _cls(args), args.budget, args.seed, args.tol, args.workers,
                    args.multiplier)
    code = rep.verdict(v)
    rep.boundary(region)
    return code


def _cmd_sweep(args, rep):
    A = _read_matrix(args.matrix, args.exact)
    region = parse_region(args)
    rep.spectrum('A', A)
    rep.doc['parameters']['region'] = region_to_dict(region)
    v = rep.timed('falsifySweep', falsify_sweep, A, region, _cls(args), args.budget, args.seed,
                  args.tol, args.workers)
    code = rep.verdict(v)
    rep.boundary(region)
    return code


def _cmd_certify(args, rep):
    A = _read_matrix(args.matrix, True)
    region = parse_region(args)
    rep.doc['parameters']['region'] = region_to_dict(region)
    if args.charpoly_sum:
        poly = rep.timed('charpolySum', certify.parametric_charpoly_sum, A)
        kind, c2 = 'charpolySum', None
        cert = certify.orthant_positivity(poly, args.multiplier)
    else:
        if region.kind is RegionKind.SECTOR:
            if region.two_cos is None:
                raise UnsupportedError(
                    f"no rational 2cos(theta) for theta = {region.theta!r}; use --two-cos")
            c2 = -region.two_cos
        elif region.kind is RegionKind.LEFT_HALF_PLANE or (
                region.kind is RegionKind.SHIFTED and region.alpha == 0):
            c2 = 0
        else:
            raise UnsupportedError(f"no exact certificate for {region!r}")
        poly = rep.timed('blockDeterminant', certify.parametric_block_det, A, c2)
        kind = 'blockDeterminant'
        cert = certify.orthant_positivity(poly, args.multiplier)
    doc = certify.certificate_document(poly, cert, kind=kind,
                                       twoCos=None if c2 is None else str(c2),
                                       matrix=matrix_to_rows(A),
                                       constantTerm=str(cert.constant_term))
    rep.doc['result'] = {'certificateId': certify.certificate_id(doc), **cert.to_dict(),
                         'terms': len(poly)}
    rep.certificate(doc)
    return EXIT_OK if cert.certified else EXIT_INCONCLUSIVE


def _cmd_mech(args, rep):
    sysm = parse_system(args.system, args.exact)
    if isinstance(sysm, DirectFormSystem):
        T = sysm.first_order()
        region = parse_region(args)
        rep.spectrum('first-order', T)
        rep.doc['parameters']['region'] = region_to_dict(region)
        rep.doc['parameters']['notion'] = 'D-stability of the first-order matrix [[B, C], [I, O]]'
        code = rep.verdict(dstab_check(T, region, _cls(args), args.budget, args.seed, args.tol,
                                       args.workers))
        rep.boundary(region)
        return code
    if not isinstance(sysm, SecondOrderSystem):
        raise MatrixFormatError('mech expects a mechanical system JSON', source=args.system)
    if args.zeta is None:
        raise UsageError('mech with a mass/damping/stiffness system needs --zeta')
    T = to_first_order(sysm)
    rep.spectrum('first-order', T)
    theta = math.acos(args.zeta) if 0 < args.zeta < 1 else None
    rep.doc['parameters'].update({'zeta': args.zeta, 'theta': theta,
                                  'notion': 'sector stability of diag(D, I) times the first-order matrix'})
    code = rep.verdict(relative_dstab_check(sysm, args.zeta, args.budget, args.seed, args.tol,
                                            args.workers))
    rep.boundary(make_sector(theta))
    return code


def _parse_gamma(text):
    if text is None:
        return None
    try:
        return Fraction(text) if '/' in text else float(text)
    except ValueError as exc:
        raise UsageError(f'invalid --gamma {text!r}') from exc


def _cmd_frac(args, rep):
    if args.system:
        sysm = parse_system(args.system, args.exact)
        if not isinstance(sysm, FractionalSystem):
            raise MatrixFormatError('frac expects {"matrix": ..., "gamma": ...}', source=args.system)
        A, gamma = sysm.matrix, sysm.gamma
        if args.gamma is not None:
            gamma = _parse_gamma(args.gamma)
    elif args.matrix:
        A, gamma = _read_matrix(args.matrix, args.exact), _parse_gamma(args.gamma)
        if gamma is None:
            raise UsageError('frac needs --gamma')
    else:
        raise UsageError('frac needs --matrix or --system')
    theta = frac_order_to_sector(gamma)
    rep.spectrum('A', A)
    rep.doc['parameters'].update({'gamma': str(gamma), 'theta': theta})
    code = rep.verdict(frac_system_dstab(A, gamma, args.budget, args.seed, args.tol, args.workers))
    rep.boundary(make_sector(theta))
    return code


COMMANDS = {
    'eig': _cmd_eig, 'classes': _cmd_classes, 'compound': _cmd_compound,
    'region-check': _cmd_region_check, 'boundary': _cmd_boundary, 'check': _cmd_check,
    'certify': _cmd_certify, 'mech': _cmd_mech, 'frac': _cmd_frac, 'sweep': _cmd_sweep,
}


def _inputs(args):
    out = [getattr(args, k, None) for k in ('matrix', 'system')]
    region = getattr(args, 'region', None)
    if region and Path(region).is_file():
        out.append(region)
    return [p for p in out if p and Path(p).is_file()]


def _fail(code, message):
    sys.stderr.write(f"dstab: error: {message}\n")
    return code


def run(argv=None) -> int:
    """Parse ``argv``, run the command and return the exit code."""
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if args.budget <= 0:
            raise UsageError('--budget must be positive')
        if args.tol <= 0:
            raise UsageError('--tol must be positive')
        with config.tolerance(args.tol):
            rep = Report(args, _inputs(args))
            code = COMMANDS[args.command](args, rep)
            rep.emit()
        return code
    except UsageError as exc:
        parser.print_usage(sys.stderr)
        return _fail(EXIT_USAGE, exc)
    except FileNotFoundError as exc:
        return _fail(EXIT_NO_FILE, f"file not found: {exc.filename or exc}")
    except MatrixFormatError as exc:
        return _fail(EXIT_MALFORMED, exc)
    except (MatrixShapeError, DimensionGuardError) as exc:
        return _fail(EXIT_DIMENSION, exc)
    except UnsupportedError as exc:
        return _fail(EXIT_UNSUPPORTED, exc)
    except (RegionError, PerturbationClassError) as exc:
        return _fail(EXIT_USAGE, exc)
    except SingularMatrixError as exc:
        return _fail(EXIT_PRECONDITION, exc)
    except EigenvalueError as exc:
        return _fail(EXIT_EIGEN, exc)


def main(argv=None) -> int:
    return run(argv)


if __name__ == '__main__':
    sys.exit(main())
