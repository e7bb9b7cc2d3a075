"""Witness paths between two GST_n points.

A path has three legs. Each endpoint is first pulled radially toward
m = (1/2, ..., 1/2) onto a common slice that fits inside the cube; Psi is
homogeneous and Q m = 0, so those segments stay on the variety. Inside the
slice y1 moves linearly and each spherical block moves along great-circle
arcs in energy-normalized coordinates, avoiding T.
"""

# stdlib imports
from dataclasses import dataclass
import logging
import math

# third party imports
import numpy as np
import pandas as pd

# local imports
from gstn.config import get_config
from gstn.errors import DifferentComponents, ValidationFailed
from gstn.geometry import (chord_distance_to_T, distance_to_T, sample_gst,
        slice_fit_energy)
from gstn.quadratic import build_form
from gstn.spectral import collision_points, slice_energies

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class PathWitness(object):
    """Discretized path with its tolerance diagnostics.

    Attributes:
        n (int): Player count.
        waypoints (numpy.ndarray): (K, n) x vectors from p to q.
        y (numpy.ndarray): (K, n) diagonal coordinates of the waypoints.
        max_abs_psi (float): Largest |Psi| over the waypoints.
        min_influence_margin (float): Smallest influence margin.
        in_cube (bool): All waypoints inside [0, 1]^n.
        step_bound (float): Allowed distance between consecutive waypoints.
        max_step (float): Largest distance between consecutive waypoints.
        min_clearance (float): Smallest distance to T over sqrt(t) along the
            in-slice leg.
        clearance_bound (float): Clearance every waypoint must keep; zero
            for a constant path.
        plan (str): In-slice plan used.
        t (float): Common slice energy.
    """
    n: int
    waypoints: np.ndarray
    y: np.ndarray
    max_abs_psi: float
    min_influence_margin: float
    in_cube: bool
    step_bound: float
    max_step: float
    min_clearance: float = float('inf')
    clearance_bound: float = 0.0
    plan: str = 'none'
    t: float = 0.0


@dataclass(frozen=True)
class PathValidation(object):
    passed: bool
    index: int
    reason: str
    max_abs_psi: float
    min_margin: float
    in_cube: bool
    max_step: float
    min_clearance: float = float('inf')


def build_path(p, q, spectrum, collision, config=None, form=None):
    """Construct and validate a witness path from p to q.

    Args:
        p (array-like or GamePoint): Start point in GST_n.
        q (array-like or GamePoint): End point in GST_n.
        spectrum (Spectrum): Eigenstructure of Q_n.
        collision (CollisionSpace): Collision space of Q_n.
        config (dict): Path config section.
        form (QuadraticForm): Exact form; built when None.

    Returns:
        PathWitness: Validated witness.

    Raises:
        ValueError: If an endpoint is not in GST_n.
        DifferentComponents: If a block that is a pair of points holds
            opposite signs at p and q.
        ValidationFailed: If a waypoint violates a tolerance, or no in-slice
            plan keeps the required distance from T.
    """
    if config is None:
        config = get_config()['path']
    if form is None:
        form = build_form(spectrum.n)
    Qf = form.as_float()
    p, q = _as_vector(p), _as_vector(q)
    for name, point in (('p', p), ('q', q)):
        _check_endpoint(name, point, Qf, config)
    P = spectrum.P
    if np.max(np.abs(p - q)) <= config['endpoint_tol']:
        return _witness(spectrum, p[np.newaxis, :], Qf, config,
                plan='constant', t=0.0)
    yp, yq = P.T @ (p - 0.5), P.T @ (q - 0.5)
    pos, neg = spectrum.positive, spectrum.negative
    for name, block in (('positive', pos), ('negative', neg)):
        if len(block) == 1 and np.sign(yp[block[0]]) != np.sign(yq[block[0]]):
            raise DifferentComponents('Endpoints hold opposite signs on the '
                    'one dimensional %s block for n=%r.' % (name, spectrum.n))

    # common slice that fits in the cube
    half_width = config['shrink'] * math.sqrt(spectrum.n) / 2.0
    t_fit = slice_fit_energy(spectrum, half_width)
    energy_p = float(slice_energies(yp, spectrum)[0])
    energy_q = float(slice_energies(yq, spectrum)[0])
    gamma_p = _shrink_factor(yp[0], energy_p, half_width, t_fit)
    gamma_q = _shrink_factor(yq[0], energy_q, half_width, t_fit)
    t = min(gamma_p**2 * energy_p, gamma_q**2 * energy_q)
    gamma_p = math.sqrt(t / energy_p)
    gamma_q = math.sqrt(t / energy_q)
    step = config['step']

    leg_p = _radial(p, gamma_p, step)
    leg_q = _radial(q, gamma_q, step)[::-1]
    ys, clearance, plan, required = _slice_leg(gamma_p * yp, gamma_q * yq,
            t, spectrum, collision, config)
    middle = 0.5 + ys @ P.T
    waypoints = np.concatenate([leg_p, middle, leg_q])
    keep = np.ones(len(waypoints), dtype=bool)
    keep[1:] = np.linalg.norm(np.diff(waypoints, axis=0), axis=1) > 1e-15
    waypoints = waypoints[keep]
    waypoints[0] = p
    waypoints[-1] = q
    witness = _witness(spectrum, waypoints, Qf, config,
            min_clearance=clearance, clearance_bound=required, plan=plan,
            t=t)
    result = validate_path(witness, config, form=form, spectrum=spectrum,
            collision=collision)
    if not result.passed:
        raise ValidationFailed('Waypoint %r of the %s path fails: %s.'
                % (result.index, plan, result.reason), diagnostics=result)
    logger.debug('Path for n=%d: %d waypoints, plan %s', spectrum.n,
            len(waypoints), plan)
    return witness


def validate_path(witness, tolerances=None, form=None, spectrum=None,
        collision=None):
    """Recheck every waypoint of a witness.

    Clearance from T is the closest approach of each segment between
    waypoints, divided by sqrt(E) with E the smaller positive block energy at
    its ends. It is checked against witness.clearance_bound when both
    spectrum and collision are given.

    Args:
        witness (PathWitness): Path to check.
        tolerances (dict): Path config section (psi_tol, margin_floor,
                endpoint_tol, step).
        form (QuadraticForm): Exact form; built when None.
        spectrum (Spectrum): Eigenstructure of Q_n.
        collision (CollisionSpace): Collision space of Q_n.

    Returns:
        PathValidation: Pass flag, first offending index and reason.
    """
    if tolerances is None:
        tolerances = get_config()['path']
    if form is None:
        form = build_form(witness.n)
    X = np.atleast_2d(witness.waypoints)
    psi = np.abs(np.einsum('ij,jk,ik->i', X, form.as_float(), X))
    margin = np.max(np.abs(X - X[:, ::-1]), axis=1)
    tol = tolerances['endpoint_tol']
    inside = np.all((X >= -tol) & (X <= 1.0 + tol), axis=1)
    steps = np.zeros(len(X))
    steps[1:] = np.linalg.norm(np.diff(X, axis=0), axis=1)
    bound = witness.step_bound * (1.0 + 1e-9)
    clearance = np.full(len(X), np.inf)
    if spectrum is not None and collision is not None and \
            witness.clearance_bound > 0:
        Y = (X - 0.5) @ spectrum.P
        energy = slice_energies(Y, spectrum)[0]
        if energy[0] > 0:
            clearance[0] = distance_to_T(Y[0], collision) / \
                    math.sqrt(energy[0])
        # segment k-1 -> k is charged to waypoint k
        low = np.minimum(energy[:-1], energy[1:])
        scaled = np.flatnonzero(low > 0)
        chords = chord_distance_to_T(Y, collision)
        clearance[scaled + 1] = chords[scaled] / np.sqrt(low[scaled])
    floor = witness.clearance_bound * (1.0 - 1e-6)
    checks = [('|psi| above %r' % tolerances['psi_tol'],
            psi >= tolerances['psi_tol']),
            ('influence margin not above %r' % tolerances['margin_floor'],
            margin <= tolerances['margin_floor']),
            ('outside the cube', ~inside),
            ('clearance from T below %r' % witness.clearance_bound,
            clearance < floor),
            ('step longer than %r' % witness.step_bound, steps > bound)]
    index, reason = None, None
    for name, failed in checks:
        bad = np.flatnonzero(failed)
        if len(bad) and (index is None or bad[0] < index):
            index, reason = int(bad[0]), name
    return PathValidation(passed=index is None, index=index, reason=reason,
            max_abs_psi=float(np.max(psi)), min_margin=float(np.min(margin)),
            in_cube=bool(np.all(inside)), max_step=float(np.max(steps)),
            min_clearance=float(np.min(clearance)))


def random_pair(n, spectrum, rng_seed, opposite=False, count=64,
        config=None):
    """Draw two GST_n samples to use as path endpoints.

    When the positive block is a pair of points, the second sample has the
    same cylinder sign as the first, or the opposite one with `opposite`.

    Returns:
        tuple: (p, q) float vectors.
    """
    cloud = sample_gst(n, count, rng_seed, config=config, spectrum=spectrum)
    p = cloud.x[0]
    if cloud.cylinder_sign is None:
        return p, cloud.x[1]
    wanted = -cloud.cylinder_sign[0] if opposite else cloud.cylinder_sign[0]
    match = np.flatnonzero(cloud.cylinder_sign[1:] == wanted)
    if not len(match):
        raise ValueError('No sample with cylinder sign %r among %r draws.'
                % (int(wanted), count))
    return p, cloud.x[1 + match[0]]


def write_waypoints(witness, path, spectrum=None, digits=12):
    """Write waypoints with the cloud columns n,t,margin,x..,y..,cyl."""
    X, Y = witness.waypoints, witness.y
    n = witness.n
    frame = pd.DataFrame({'n': np.full(len(X), n, dtype=int),
            't': np.full(len(X), witness.t),
            'margin': np.max(np.abs(X - X[:, ::-1]), axis=1)})
    for i in range(n):
        frame['x%d' % (i + 1)] = X[:, i]
    for i in range(n):
        frame['y%d' % (i + 1)] = Y[:, i]
    if spectrum is not None and len(spectrum.positive) == 1:
        frame['cyl'] = np.sign(Y[:, spectrum.positive[0]]).astype(int)
    else:
        frame['cyl'] = pd.Series([None] * len(X), dtype=object)
    if path.endswith('.json'):
        frame.to_json(path, orient='records', indent=2,
                double_precision=min(digits, 15))
    else:
        frame.to_csv(path, index=False, float_format='%%.%dg' % digits)


def _as_vector(point):
    if hasattr(point, 'as_float'):
        return point.as_float()
    return np.asarray(point, dtype=float)


def _check_endpoint(name, x, Qf, config):
    psi = abs(float(x @ Qf @ x))
    margin = float(np.max(np.abs(x - x[::-1])))
    tol = config['endpoint_tol']
    if psi >= config['psi_tol'] or margin <= config['margin_floor'] or \
            np.any(x < -tol) or np.any(x > 1.0 + tol):
        raise ValueError('Endpoint %s is not in GST: |psi|=%r, margin=%r.'
                % (name, psi, margin))


def _shrink_factor(y1, energy, half_width, t_fit):
    gamma = 1.0
    if abs(y1) > half_width:
        gamma = half_width / abs(y1)
    if energy > 0 and gamma**2 * energy > t_fit:
        gamma = math.sqrt(t_fit / energy)
    return gamma


def _radial(x, gamma, step):
    """Segment from x to m + gamma (x - m), starting at x."""
    z = x - 0.5
    length = (1.0 - gamma) * np.linalg.norm(z)
    k = max(1, int(math.ceil(length / step)))
    factors = np.linspace(1.0, gamma, k + 1)
    return 0.5 + factors[:, np.newaxis] * z


def _slice_leg(y_start, y_end, t, spectrum, collision, config):
    """Waypoints inside the slice of energy t.

    Returns:
        tuple: (ys, clearance, plan, required clearance).

    Raises:
        ValidationFailed: If no plan keeps the required clearance.
    """
    pos, neg = spectrum.positive, spectrum.negative
    lam = spectrum.eigenvalues
    radius = {'pos': np.sqrt(t / lam[pos]), 'neg': np.sqrt(t / -lam[neg])}
    blocks = {'pos': pos, 'neg': neg}
    start = {name: _unit(y_start[blocks[name]] / radius[name])
            for name in blocks}
    end = {name: _unit(y_end[blocks[name]] / radius[name]) for name in blocks}
    step = config['step']
    sqrt_t = math.sqrt(t)

    def assemble(y1, state):
        y = np.zeros(spectrum.n)
        y[0] = y1
        for name in blocks:
            y[blocks[name]] = state[name] * radius[name]
        return y

    def clearance(ys):
        return distance_to_T(np.atleast_2d(ys), collision) / sqrt_t

    def chord_clearance(ys):
        return chord_distance_to_T(ys, collision) / sqrt_t

    # y1 first, its direction lies in T
    shift = abs(y_end[0] - y_start[0])
    k = max(1, int(math.ceil(shift / step)))
    y1_leg = [assemble(v, start) for v in
            np.linspace(y_start[0], y_end[0], k + 1)]
    required = config['t_clearance']
    first = assemble(y_end[0], start)
    ends = clearance(np.array([first, assemble(y_end[0], end)]))
    required = min(required, 0.5 * float(np.min(ends)))

    detours = _detours(start, end, t, spectrum, collision)
    plans = [('negative-first', [('neg', end['neg']), ('pos', end['pos'])]),
            ('positive-first', [('pos', end['pos']), ('neg', end['neg'])])]
    for name, block, other in (('negative-detour', 'neg', 'pos'),
            ('positive-detour', 'pos', 'neg')):
        if block in detours:
            plans.append((name, [(block, detours[block]),
                    (other, end[other]), (block, end[block])]))
    best = None
    for name, moves in plans:
        state = dict(start)
        ys = []
        for block, target in moves:
            rmax = float(np.max(radius[block]))
            for unit in _arc(state[block], target, step / rmax):
                state[block] = unit
                ys.append(assemble(y_end[0], state))
        ys = np.array(ys) if ys else np.zeros((0, spectrum.n))
        worst = float('inf')
        if len(ys):
            worst = float(np.min(chord_clearance(np.vstack([first, ys]))))
        if best is None or worst > best[1]:
            best = (ys, worst, name)
        if worst >= required:
            break
    ys, worst, name = best
    if worst < required:
        raise ValidationFailed('Best in-slice plan %s for n=%r keeps '
                'clearance %.3g from T, below %.3g.' % (name, spectrum.n,
                worst, required), diagnostics={'plan': name,
                'clearance': worst, 'required': required})
    leg = np.concatenate([np.array(y1_leg), ys]) if len(ys) else \
            np.array(y1_leg)
    return leg, min(worst, float(np.min(ends))), name, required


def _detours(start, end, t, spectrum, collision):
    """Block values orthogonal to the points where T meets the slice."""
    points = collision_points(collision, spectrum, t) if t > 0 else []
    if not points:
        return {}
    lam = spectrum.eigenvalues
    blocks = {'pos': (spectrum.positive, 1.0), 'neg': (spectrum.negative,
            -1.0)}
    detours = {}
    for name, (block, sign) in blocks.items():
        if len(block) < 2:
            continue
        star = _unit(points[0][block] * np.sqrt(sign * lam[block] / t))
        for candidate in (start[name], end[name]):
            off = candidate - (candidate @ star) * star
            if np.linalg.norm(off) > 1e-6:
                detours[name] = _unit(off)
                break
        else:
            basis = np.eye(len(block))[np.argmin(np.abs(star))]
            detours[name] = _unit(basis - (basis @ star) * star)
    return detours


def _arc(a, b, max_angle):
    """Unit vectors along the great circle from a to b, excluding a."""
    cos = float(np.clip(a @ b, -1.0, 1.0))
    theta = math.acos(cos)
    if theta < 1e-15:
        return []
    if math.pi - theta < 1e-9:
        # antipodal, go through an orthogonal midpoint
        basis = np.eye(len(a))[np.argmin(np.abs(a))]
        mid = _unit(basis - (basis @ a) * a)
        return _arc(a, mid, max_angle) + _arc(mid, b, max_angle)
    k = max(1, int(math.ceil(theta / max_angle)))
    units = []
    for tau in np.linspace(0.0, 1.0, k + 1)[1:]:
        v = (math.sin((1.0 - tau) * theta) * a +
                math.sin(tau * theta) * b) / math.sin(theta)
        units.append(_unit(v))
    return units


def _unit(v):
    v = np.asarray(v, dtype=float)
    return v / np.linalg.norm(v)


def _witness(spectrum, waypoints, Qf, config, min_clearance=float('inf'),
        clearance_bound=0.0, plan='none', t=0.0):
    X = np.atleast_2d(waypoints)
    psi = np.abs(np.einsum('ij,jk,ik->i', X, Qf, X))
    margin = np.max(np.abs(X - X[:, ::-1]), axis=1)
    tol = config['endpoint_tol']
    steps = np.linalg.norm(np.diff(X, axis=0), axis=1) if len(X) > 1 else \
            np.zeros(1)
    return PathWitness(n=spectrum.n, waypoints=X,
            y=(X - 0.5) @ spectrum.P, max_abs_psi=float(np.max(psi)),
            min_influence_margin=float(np.min(margin)),
            in_cube=bool(np.all((X >= -tol) & (X <= 1.0 + tol))),
            step_bound=config['step'], max_step=float(np.max(steps)),
            min_clearance=min_clearance, clearance_bound=clearance_bound,
            plan=plan, t=t)
