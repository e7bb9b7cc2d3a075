"""Operations behind the gstcheck subcommands.

Every cmd_* function takes a RunConfig and returns (report, table, code):
a report dictionary, an optional list of row dictionaries for csv output,
and the process exit code.
"""

# stdlib imports
from dataclasses import dataclass, field
from fractions import Fraction
import json
import logging
import os
import warnings

# third party imports
import numpy as np
import pandas as pd

# local imports
from gstn.components import count_components
from gstn.config import get_config, get_expectations
from gstn.constants import DEFAULT_SEED, SEED_VARIABLE
from gstn.errors import (DifferentComponents, EnumerationCapExceeded,
        InvalidN, NoStablePlateau, ValidationFailed)
from gstn.geometry import cylinder_separation, sample_gst, write_cloud
from gstn.model import (GamePoint, independence_residual,
        influence_bruteforce, influence_margin, random_rational_point)
from gstn.paths import build_path, random_pair, write_waypoints
from gstn.quadratic import (build_form, eliminate_variable, exact_inertia,
        format_fraction, format_polynomial, format_square, kernel_basis,
        lift, perfect_square_check, restrict_to_symmetric,
        restricted_polynomial)
from gstn.spectral import (collision_space, compare_b_vector,
        diagonalization_residual, eigendecompose, orthogonality_residual,
        slice_type)

logger = logging.getLogger(__name__)

FORMATS = ['json', 'csv', 'text']

EXIT_OK = 0
EXIT_FAILURE = 1
EXIT_USAGE = 2
EXIT_DIFFERENT_COMPONENTS = 3


@dataclass
class RunConfig(object):
    """Options of one gstcheck run.

    Attributes left as None fall back to the config file.
    """
    command: str
    n: int = None
    nmax: int = 10
    seed: int = None
    samples: int = None
    trials: int = None
    eps_min: float = None
    eps_max: float = None
    eps_steps: int = None
    format: str = 'json'
    out: str = None
    check: bool = False
    x: str = None
    p: str = None
    q: str = None
    random_pair: bool = False
    opposite_cylinders: bool = False
    waypoints: str = None
    cloud: str = None
    config: dict = field(default_factory=get_config)

    def __post_init__(self):
        if self.seed is None:
            self.seed = int(os.environ.get(SEED_VARIABLE, DEFAULT_SEED))
        if self.samples is None:
            self.samples = self.config['sampling']['samples']
        if self.trials is None:
            self.trials = self.config['oracle']['trials']
        if self.eps_steps is not None:
            self.config['components']['eps_steps'] = self.eps_steps
        if self.format not in FORMATS:
            raise ValueError('Output format must be one of %r, got %r.'
                    % (FORMATS, self.format))
        for name in ('samples', 'trials', 'nmax', 'eps_min', 'eps_max',
                'eps_steps'):
            value = getattr(self, name)
            if value is not None and not value > 0:
                raise ValueError('Parameter %s must be positive, got %r.'
                        % (name, value))
        if self.seed < 0:
            raise ValueError('Seed must be nonnegative, got %r.' % self.seed)
        if self.n is not None and self.n < 3:
            raise InvalidN('Player count must be at least three, got %r.'
                    % self.n)


def run(cfg):
    """Dispatch a RunConfig to its command.

    Returns:
        tuple: (report, table, exit code).
    """
    commands = {'form': cmd_form, 'restricted': cmd_restricted,
            'oracle': cmd_oracle, 'components': cmd_components,
            'path': cmd_path, 'report': cmd_report}
    if cfg.command not in commands:
        raise ValueError('Unknown command %r.' % cfg.command)
    if cfg.command != 'report' and cfg.n is None:
        raise ValueError('Command %r needs --n.' % cfg.command)
    return commands[cfg.command](cfg)


def cmd_form(cfg):
    """Exact matrix, eigenvalues, inertia and slice type of Q_n."""
    n = cfg.n
    form = build_form(n)
    spectrum = eigendecompose(form, config=cfg.config['spectral'])
    exact = exact_inertia(form.Q)
    report = {'command': 'form', 'n': n,
            'Q': [[format_fraction(v) for v in row] for row in form.Q],
            'eigenvalues': spectrum.eigenvalues,
            'inertia': list(spectrum.inertia),
            'exact_inertia': list(exact.as_tuple()),
            'orthogonality_residual': orthogonality_residual(spectrum),
            'diagonalization_residual': diagonalization_residual(spectrum,
                    form),
            'sweeps': spectrum.sweeps}
    try:
        report['slice_type'] = slice_type(spectrum).description
    except ValueError as e:
        warnings.warn(str(e), Warning)
        report['slice_type'] = None
    table = [{'index': i + 1, 'eigenvalue': float(lam),
            'sign': _sign_name(v)} for i, (lam, v) in enumerate(zip(
            spectrum.eigenvalues, _classify(spectrum)))]
    code = EXIT_OK
    if cfg.check and spectrum.inertia != exact.as_tuple():
        code = EXIT_FAILURE
    return report, table, code


def cmd_restricted(cfg):
    """Restricted polynomial, kernel, perfect square and b2 comparison."""
    n = cfg.n
    analysis = _restricted_analysis(n, cfg.config)
    report = dict(command='restricted', **analysis['report'])
    table = [{'monomial': key, 'coefficient': value}
            for key, value in report['coefficients'].items()]
    code = EXIT_OK
    if cfg.check and not analysis['passed']:
        code = EXIT_FAILURE
    return report, table, code


def cmd_oracle(cfg):
    """Exact enumeration check of residual == -psi on random points."""
    n = cfg.n
    cap = cfg.config['oracle']['enumeration_cap']
    if n > cap:
        raise EnumerationCapExceeded('Exact enumeration is capped at n=%r, '
                'got n=%r.' % (cap, n))
    form = build_form(n)
    if cfg.x is not None:
        points = [GamePoint.fromStrings(cfg.x)]
        if points[0].n != n:
            raise ValueError('Point has %r entries but n=%r.'
                    % (points[0].n, n))
    else:
        rng = np.random.default_rng(cfg.seed)
        points = [random_rational_point(n, rng,
                cfg.config['oracle']['max_denominator'])
                for _ in range(cfg.trials)]
    table = []
    passed = 0
    influence_agrees = 0
    for point in points:
        result = independence_residual(point, cap=cap, form=form)
        influenced = influence_bruteforce(point, cap=cap)
        margin = influence_margin(point)
        passed += int(result.relation_ok)
        influence_agrees += int(influenced == (margin > 0))
        table.append({'x': ','.join(format_fraction(v) for v in point.x),
                'marginal': result.marginal, 'joint': result.joint,
                'residual': result.residual, 'psi': result.psi,
                'relation_ok': result.relation_ok,
                'influence': influenced, 'margin': margin})
    symmetric = _index_symmetry(points[0], cap, form)
    report = {'command': 'oracle', 'n': n, 'trials': len(points),
            'passed': passed, 'tally': '%d/%d' % (passed, len(points)),
            'influence_agrees': influence_agrees,
            'index_symmetry': symmetric}
    if cfg.x is not None:
        report['point'] = table[0]
    code = EXIT_OK
    if passed != len(points) or influence_agrees != len(points) or \
            not symmetric:
        code = EXIT_FAILURE
    return report, table, code


def cmd_components(cfg):
    """Sample GST_n and count its components along an epsilon sweep."""
    n = cfg.n
    spectrum = eigendecompose(build_form(n), config=cfg.config['spectral'])
    cloud = sample_gst(n, cfg.samples, cfg.seed,
            config=cfg.config['sampling'], spectrum=spectrum)
    if cfg.cloud:
        write_cloud(cloud, cfg.cloud,
                digits=cfg.config.get('output', {}).get('digits', 12))
    try:
        result = count_components(cloud, config=cfg.config['components'],
                eps_min=cfg.eps_min, eps_max=cfg.eps_max)
    except NoStablePlateau as e:
        warnings.warn(str(e), Warning)
        result = e.report
    report = {'command': 'components', 'n': n, 'seed': cfg.seed,
            'sample_count': result.sample_count,
            't_max': cloud.sampler_config['t_max'],
            't_min': cloud.sampler_config['t_min'],
            'epsilon_grid': result.epsilon_grid,
            'components_per_epsilon': result.components_per_epsilon,
            'significant_per_epsilon': result.significant_per_epsilon,
            'stable_count': result.stable_count,
            'stable_epsilon': result.stable_epsilon,
            'component_sizes': result.component_sizes,
            'unassigned': result.unassigned,
            'y_space_agrees': result.y_space_agrees}
    if cloud.cylinder_sign is not None:
        distance, bound = cylinder_separation(cloud, spectrum)
        report['cylinder_separation'] = distance
        report['separation_bound'] = bound
    expected = get_expectations()['components'].get(n)
    report['expected'] = expected if expected is not None else 'n/a'
    table = [{'epsilon': e, 'components': c, 'significant': s,
            'resolved': r} for e, c, s, r in zip(result.epsilon_grid,
            result.components_per_epsilon, result.significant_per_epsilon,
            result.resolved)]
    code = EXIT_OK
    if cfg.check and expected is not None and \
            result.stable_count != expected:
        code = EXIT_FAILURE
    return report, table, code


def cmd_path(cfg):
    """Build and validate a witness path between two GST_n points.

    Raises:
        ValueError: Unless exactly one of --random-pair or both --p and --q
            is given, or if an endpoint does not have n coordinates.
    """
    n = cfg.n
    given = [point is not None for point in (cfg.p, cfg.q)]
    if cfg.random_pair and any(given):
        raise ValueError('path takes either --random-pair or --p/--q, '
                'not both.')
    if not cfg.random_pair and not all(given):
        raise ValueError('path needs both --p and --q, or --random-pair.')
    form = build_form(n)
    spectrum = eigendecompose(form, config=cfg.config['spectral'])
    collision = _collision(form, spectrum)
    if cfg.random_pair:
        p, q = random_pair(n, spectrum, cfg.seed,
                opposite=cfg.opposite_cylinders,
                config=cfg.config['sampling'])
    else:
        p = GamePoint.fromStrings(cfg.p).as_float()
        q = GamePoint.fromStrings(cfg.q).as_float()
        for name, point in (('p', p), ('q', q)):
            if len(point) != n:
                raise ValueError('Endpoint %s has %r coordinates, expected '
                        '%r.' % (name, len(point), n))
    report = {'command': 'path', 'n': n, 'seed': cfg.seed, 'p': p, 'q': q}
    try:
        witness = build_path(p, q, spectrum, collision,
                config=cfg.config['path'], form=form)
    except DifferentComponents as e:
        report.update(passed=False, error=str(e))
        return report, [], EXIT_DIFFERENT_COMPONENTS
    except ValidationFailed as e:
        report.update(passed=False, error=str(e),
                index=getattr(e.diagnostics, 'index', None))
        return report, [], EXIT_FAILURE
    if cfg.waypoints:
        write_waypoints(witness, cfg.waypoints, spectrum=spectrum,
                digits=cfg.config.get('output', {}).get('digits', 12))
    report.update(_path_summary(witness))
    report['passed'] = True
    table = [dict(step=i, **{'x%d' % (j + 1): v for j, v in enumerate(x)})
            for i, x in enumerate(witness.waypoints)]
    return report, table, EXIT_OK


def cmd_report(cfg):
    """Run every check for n = 3..nmax and collect one document."""
    config = cfg.config
    expectations = get_expectations()
    cap = config['oracle']['enumeration_cap']
    pairs = config['path'].get('pairs', 10)
    nvalues = list(range(3, cfg.nmax + 1))
    checks = {}
    document = {'command': 'report', 'seed': cfg.seed, 'nmax': cfg.nmax,
            'samples': cfg.samples, 'trials': cfg.trials,
            'inertia': {}, 'exact_inertia': {}, 'slice_types': {},
            'restricted': {}, 'b_vectors': {}, 'oracle': {},
            'components': {}, 'paths': {}}
    table = []
    for n in nvalues:
        form = build_form(n)
        spectrum = eigendecompose(form, config=config['spectral'])
        exact = exact_inertia(form.Q).as_tuple()
        document['inertia'][n] = list(spectrum.inertia)
        document['exact_inertia'][n] = list(exact)
        document['slice_types'][n] = slice_type(spectrum).description
        checks['inertia_%d' % n] = spectrum.inertia == exact
        if n in expectations['inertia']:
            checks['inertia_%d' % n] = checks['inertia_%d' % n] and \
                    list(exact) == list(expectations['inertia'][n])

        analysis = _restricted_analysis(n, config)
        document['restricted'][n] = {
                'text': analysis['report']['text'],
                'kernel_dim': analysis['report']['kernel_dim'],
                'match': analysis['report']['published_match']}
        document['b_vectors'][n] = analysis['report']['b_vector']
        checks['restricted_%d' % n] = analysis['passed']

        if n <= cap:
            rng = np.random.default_rng(cfg.seed + n)
            passed = 0
            for _ in range(cfg.trials):
                point = random_rational_point(n, rng,
                        config['oracle']['max_denominator'])
                passed += int(independence_residual(point, cap=cap,
                        form=form).relation_ok)
            document['oracle'][n] = '%d/%d' % (passed, cfg.trials)
            checks['oracle_%d' % n] = passed == cfg.trials

        cloud = sample_gst(n, cfg.samples, cfg.seed,
                config=config['sampling'], spectrum=spectrum)
        try:
            result = count_components(cloud, config=config['components'],
                    eps_min=cfg.eps_min, eps_max=cfg.eps_max)
            stable = result.stable_count
        except NoStablePlateau as e:
            warnings.warn(str(e), Warning)
            stable = None
        document['components'][n] = stable
        expected = expectations['components'].get(n)
        if expected is not None:
            checks['components_%d' % n] = stable == expected

        stats = _path_statistics(n, form, spectrum, cfg.seed, pairs, config)
        document['paths'][n] = stats
        checks['paths_%d' % n] = stats['failed'] == 0
        table.append({'n': n, 'p': spectrum.inertia[0],
                'z': spectrum.inertia[1], 'q': spectrum.inertia[2],
                'slice_type': document['slice_types'][n],
                'components': stable,
                'oracle': document['oracle'].get(n, 'n/a'),
                'paths': '%d/%d' % (stats['passed'], stats['pairs'])})
    document['checks'] = checks
    document['passed'] = all(checks.values())
    code = EXIT_OK if document['passed'] else EXIT_FAILURE
    return document, table, code


def render(report, table, fmt, digits=12):
    """Serialize a report as json, csv or text."""
    clean = _clean_report(report, digits)
    if fmt == 'json':
        return json.dumps(clean, indent=2) + '\n'
    if fmt == 'csv':
        frame = pd.DataFrame(_clean_report(table or [], digits))
        return frame.to_csv(index=False)
    return '\n'.join(_text_lines(clean, 0)) + '\n'


def _restricted_analysis(n, config):
    expectations = get_expectations()
    form = build_form(n)
    spectrum = eigendecompose(form, config=config['spectral'])
    restricted = restrict_to_symmetric(form)
    terms = restricted_polynomial(restricted)
    square = perfect_square_check(restricted)
    inertia = exact_inertia(restricted.R)
    kernel = [lift(v, n) for v in kernel_basis(restricted.R)]
    text = format_square(square) if square else format_polynomial(terms)
    report = {'n': n, 'scale': restricted.scale,
            'polynomial': format_polynomial(terms), 'text': text,
            'coefficients': {'%d,%d' % key: value
                    for key, value in terms.items()},
            'inertia': list(inertia.as_tuple()),
            'kernel': [[int(v) for v in vector] for vector in kernel],
            'kernel_dim': len(kernel),
            'perfect_square': list(square) if square else None,
            'published_match': 'n/a', 'b_vector': 'n/a'}
    passed = True
    published = expectations['restricted'].get(n)
    if published is not None:
        passed = inertia.positive == 0
        wanted = {tuple(int(v) for v in key.split(',')): Fraction(value)
                for key, value in published['coefficients'].items()}
        match = restricted.scale == published['scale'] and terms == wanted
        if published['square'] is not None:
            c, a, b = published['square']
            match = match and square == (Fraction(c), (a, b))
        else:
            match = match and square is None
        kernel_match = sorted(report['kernel']) == \
                sorted(expectations['kernels'][n])
        report['published_match'] = bool(match and kernel_match)
        passed = passed and report['published_match']
    b_published = expectations['b_vectors'].get(n)
    if len(kernel) in (1, 2):
        collision = collision_space(spectrum, kernel)
        if collision.b2 is not None:
            report['b2'] = collision.b2
        if b_published is not None and collision.b2 is not None:
            result = compare_b_vector(spectrum, collision.b2, b_published,
                    tol=config['spectral']['b_vector_tol'],
                    degenerate_tol=config['spectral']['degenerate_tol'])
            report['b_vector'] = {'match': result.match,
                    'global_sign': result.global_sign,
                    'axis_sign': result.axis_sign,
                    'max_deviation': result.max_deviation,
                    'matched_up_to': result.agreement}
            if result.match and not result.global_sign:
                report['b_vector']['note'] = ('computed b2 matches the '
                        'published vector only up to %s'
                        % result.agreement)
            passed = passed and result.match
    elimination = expectations['eliminations'].get(n)
    if elimination is not None:
        step = eliminate_variable(restricted, elimination['index'])
        report['elimination'] = {'index': step.index,
                'leading': step.leading,
                'center': {'x%d' % k: v for k, v in step.center.items()},
                'discriminant_inertia': list(step.inertia.as_tuple()),
                'discriminant': format_square(step.square)
                        if step.square else None}
        wanted = {int(k): Fraction(v)
                for k, v in elimination['center'].items()}
        ok = step.center == wanted and step.square is not None and \
                -step.square[0] == Fraction(elimination['discriminant']) and \
                list(step.square[1]) == list(elimination['pair'])
        report['elimination']['match'] = bool(ok)
        passed = passed and ok
    return {'report': report, 'passed': bool(passed)}


def _collision(form, spectrum):
    restricted = restrict_to_symmetric(form)
    kernel = [lift(v, form.n) for v in kernel_basis(restricted.R)]
    return collision_space(spectrum, kernel)


def _path_statistics(n, form, spectrum, seed, pairs, config):
    """Seeded random pairs; opposite-sign pairs must be refused."""
    collision = _collision(form, spectrum)
    stats = {'pairs': pairs, 'passed': 0, 'failed': 0, 'refused': 0,
            'max_abs_psi': 0.0, 'min_margin': None, 'max_waypoints': 0}
    cloud = sample_gst(n, 2 * pairs, seed + 1, config=config['sampling'],
            spectrum=spectrum)
    for k in range(pairs):
        p, q = cloud.x[2 * k], cloud.x[2 * k + 1]
        opposite = cloud.cylinder_sign is not None and \
                cloud.cylinder_sign[2 * k] != cloud.cylinder_sign[2 * k + 1]
        try:
            witness = build_path(p, q, spectrum, collision,
                    config=config['path'], form=form)
        except DifferentComponents:
            stats['refused'] += 1
            if not opposite:
                stats['failed'] += 1
            continue
        except ValidationFailed:
            stats['failed'] += 1
            continue
        if opposite:
            stats['failed'] += 1
            continue
        stats['passed'] += 1
        stats['max_abs_psi'] = max(stats['max_abs_psi'], witness.max_abs_psi)
        margin = witness.min_influence_margin
        if stats['min_margin'] is None or margin < stats['min_margin']:
            stats['min_margin'] = margin
        stats['max_waypoints'] = max(stats['max_waypoints'],
                len(witness.waypoints))
    return stats


def _path_summary(witness):
    return {'waypoint_count': int(len(witness.waypoints)),
            'max_abs_psi': witness.max_abs_psi,
            'min_influence_margin': witness.min_influence_margin,
            'in_cube': witness.in_cube, 'max_step': witness.max_step,
            'step_bound': witness.step_bound,
            'min_clearance': witness.min_clearance,
            'clearance_bound': witness.clearance_bound, 'plan': witness.plan,
            't': witness.t}


def _index_symmetry(point, cap, form):
    """Residual is the same for several (i, j, k) choices."""
    n = point.n
    triples = [(0, 1, 2), (n - 1, 0, 1), (1, n - 1, 0)]
    residuals = {independence_residual(point, indices=triple, cap=cap,
            form=form).residual for triple in triples}
    return len(residuals) == 1


def _classify(spectrum):
    signs = np.zeros(spectrum.n, dtype=int)
    signs[spectrum.positive] = 1
    signs[spectrum.negative] = -1
    return signs


def _sign_name(sign):
    return {1: 'positive', 0: 'zero', -1: 'negative'}[int(sign)]


def _clean_report(value, digits):
    """Make a report JSON-ready.

    Floats are rounded to `digits` significant digits, NaN becomes None,
    Fractions become 'p/q' strings and numpy values become Python values.
    """
    if isinstance(value, dict):
        return {str(k): _clean_report(v, digits) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_clean_report(v, digits) for v in value]
    if isinstance(value, np.ndarray):
        return [_clean_report(v, digits) for v in value.tolist()]
    if isinstance(value, Fraction):
        return format_fraction(value)
    if isinstance(value, (bool, np.bool_)):
        return bool(value)
    if isinstance(value, (int, np.integer)):
        return int(value)
    if isinstance(value, (float, np.floating)):
        value = float(value)
        if np.isnan(value) or np.isinf(value):
            return None
        return float('%.*g' % (digits, value))
    return value


def _text_lines(value, depth):
    indent = '  ' * depth
    lines = []
    for key, item in value.items():
        if isinstance(item, dict):
            lines.append('%s%s:' % (indent, key))
            lines += _text_lines(item, depth + 1)
        else:
            if isinstance(item, list):
                item = ', '.join(str(v) for v in item)
            lines.append('%s%s: %s' % (indent, key, item))
    return lines
