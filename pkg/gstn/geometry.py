"""Sampling GST_n through its slices in diagonal coordinates.

With m = (1/2, ..., 1/2) and x = m + P y, Psi(x) = sum_i lambda_i y_i^2, so
a point lies on the independence variety exactly when its positive and
negative block energies agree. A slice fixes that shared energy t and lets
y1 (the kernel coordinate) range over an interval.
"""

# stdlib imports
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
import json
import logging
import math

# third party imports
import numpy as np
import pandas as pd
from scipy.spatial import cKDTree

# local imports
from gstn.config import get_config
from gstn.constants import CSV_PREFIX
from gstn.errors import EmptySlice, SamplingStalled
from gstn.quadratic import build_form
from gstn.spectral import eigendecompose

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class SliceSpec(object):
    """Half width s of the y1 interval and shared block energy t."""
    s: float
    t: float

    def __post_init__(self):
        if not self.s > 0:
            raise ValueError('Slice half width must be positive, got %r.'
                    % self.s)
        if not self.t >= 0:
            raise ValueError('Slice energy must be nonnegative, got %r.'
                    % self.t)


@dataclass(frozen=True, eq=False)
class SampleCloud(object):
    """Accepted GST_n samples, stored column-wise.

    Attributes:
        n (int): Player count.
        x (numpy.ndarray): (N, n) probability vectors.
        y (numpy.ndarray): (N, n) diagonal coordinates, x = m + P y.
        t (numpy.ndarray): Slice energy of each sample.
        margin (numpy.ndarray): Influence margin of each sample.
        cylinder_sign (numpy.ndarray): Sign of y2 when the positive block is
            a pair of points (n = 3, 4), otherwise None.
        seed (int): Base seed.
        sampler_config (dict): Tuned t_max, t_min, s and shard count.
    """
    n: int
    x: np.ndarray
    y: np.ndarray
    t: np.ndarray
    margin: np.ndarray
    cylinder_sign: np.ndarray
    seed: int
    sampler_config: dict

    def __len__(self):
        return self.x.shape[0]

    def to_dataframe(self):
        """Cloud as a table with columns n,t,margin,x1..xn,y1..yn,cyl."""
        n = self.n
        frame = pd.DataFrame({'n': np.full(len(self), n, dtype=int),
                't': self.t, 'margin': self.margin})
        for i in range(n):
            frame['x%d' % (i + 1)] = self.x[:, i]
        for i in range(n):
            frame['y%d' % (i + 1)] = self.y[:, i]
        if self.cylinder_sign is None:
            frame['cyl'] = pd.Series([None] * len(self), dtype=object)
        else:
            frame['cyl'] = self.cylinder_sign.astype(int)
        return frame[CSV_PREFIX + list(frame.columns[len(CSV_PREFIX):])]


def sample_slice(spec, spectrum, count, rng_seed):
    """Draw points of one slice in diagonal coordinates.

    Args:
        spec (SliceSpec): Slice half width and energy (t > 0).
        spectrum (Spectrum): Eigenstructure.
        count (int): Number of points.
        rng_seed (int or numpy.random.Generator): Seed or generator.

    Returns:
        numpy.ndarray: (count, n) y vectors.

    Raises:
        EmptySlice: If either block is empty.
    """
    if not spec.t > 0:
        raise ValueError('Slice sampling needs t > 0, got %r.' % spec.t)
    _check_blocks(spectrum)
    rng = np.random.default_rng(rng_seed)
    return _draw(spectrum, spec.s, np.full(count, float(spec.t)), rng)


def slice_fit_energy(spectrum, half_width):
    """Largest energy whose slices fit in the cube for |y1| <= half_width.

    On a slice of energy t the coordinate x_k - 1/2 is bounded by
    |P_k1 y1| + sqrt(t) (sqrt(a_k) + sqrt(b_k)), with a_k and b_k the
    inverse-eigenvalue weighted squares of row k over each block.

    Args:
        spectrum (Spectrum): Eigenstructure.
        half_width (float): Bound on |y1|.

    Returns:
        float: The energy bound t' (0 when the y1 range alone leaves the
        cube).
    """
    n = spectrum.n
    headroom = 0.5 - half_width / math.sqrt(n)
    if headroom <= 0:
        return 0.0
    lam = spectrum.eigenvalues
    P = spectrum.P
    pos, neg = spectrum.positive, spectrum.negative
    a = np.sum(P[:, pos]**2 / lam[pos], axis=1)
    b = np.sum(P[:, neg]**2 / -lam[neg], axis=1)
    return float(np.min((headroom / (np.sqrt(a) + np.sqrt(b)))**2))


def sample_gst(n, count, rng_seed, config=None, spectrum=None):
    """Sample GST_n by rejection from randomly drawn slices.

    Each candidate draws its energy t uniformly on
    [t_min_fraction * t_max, t_max], a slice point y, and is accepted when
    x = m + P y lies in the cube with influence margin above margin_floor.
    t_max starts at t_max_start and is halved until the pilot acceptance
    exceeds min_acceptance and the central slices fit in the cube.

    Args:
        n (int): Player count.
        count (int): Number of accepted samples.
        rng_seed (int): Base seed; shard k uses rng_seed + k.
        config (dict): Sampling config section. Default from get_config().
        spectrum (Spectrum): Eigenstructure of Q_n; computed when None.

    Returns:
        SampleCloud: Accepted samples in shard order.

    Raises:
        SamplingStalled: If t_max cannot be tuned or a shard runs out of
            attempts.
    """
    if count < 1:
        raise ValueError('Sample count must be positive, got %r.' % count)
    if config is None:
        config = get_config()['sampling']
    if spectrum is None:
        spectrum = eigendecompose(build_form(n))
    _check_blocks(spectrum)
    s = math.sqrt(n) / 2.0
    t_max = _tune_t_max(spectrum, s, rng_seed, config)
    t_min = config['t_min_fraction'] * t_max
    shard_size = int(config['shard_size'])
    quotas = [min(shard_size, count - start)
            for start in range(0, count, shard_size)]
    tasks = [dict(eigenvalues=spectrum.eigenvalues, P=spectrum.P,
            positive=spectrum.positive, negative=spectrum.negative, s=s,
            t_min=t_min, t_max=t_max, quota=quota, seed=rng_seed + k,
            margin_floor=config['margin_floor'],
            attempt_factor=config['attempt_factor'])
            for k, quota in enumerate(quotas)]
    workers = int(config.get('workers', 1))
    if workers > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=workers) as executor:
            shards = list(executor.map(_sample_shard, tasks))
    else:
        shards = [_sample_shard(task) for task in tasks]
    x = np.concatenate([shard[0] for shard in shards])
    y = np.concatenate([shard[1] for shard in shards])
    t = np.concatenate([shard[2] for shard in shards])
    margin = np.max(np.abs(x - x[:, ::-1]), axis=1)
    cylinder_sign = None
    if len(spectrum.positive) == 1:
        cylinder_sign = np.sign(y[:, spectrum.positive[0]]).astype(int)
    sampler = {'s': s, 't_max': t_max, 't_min': t_min,
            'shards': len(quotas)}
    logger.info('Sampled %d points for n=%d with t in [%.3g, %.3g]',
            len(t), n, t_min, t_max)
    return SampleCloud(n=n, x=x, y=y, t=t, margin=margin,
            cylinder_sign=cylinder_sign, seed=rng_seed,
            sampler_config=sampler)


def distance_to_T(y, collision):
    """Euclidean distance from y (or each row of y) to span(y_basis)."""
    return np.linalg.norm(_residual_from_T(y, collision), axis=-1)


def chord_distance_to_T(ys, collision):
    """Closest approach to T along each segment between consecutive rows.

    The residual orthogonal to T is affine along a segment, so the minimum
    is at the clipped projection of the origin onto it.

    Args:
        ys (array-like): (K, n) diagonal coordinates.
        collision (CollisionSpace): Collision space of Q_n.

    Returns:
        numpy.ndarray: K - 1 distances.
    """
    residual = _residual_from_T(np.atleast_2d(ys), collision)
    start, delta = residual[:-1], np.diff(residual, axis=0)
    length = np.sum(delta**2, axis=1)
    s = np.zeros(len(delta))
    moving = length > 0
    s[moving] = np.clip(-np.sum(start[moving] * delta[moving], axis=1) /
            length[moving], 0.0, 1.0)
    return np.linalg.norm(start + s[:, np.newaxis] * delta, axis=1)


def _residual_from_T(y, collision):
    y = np.asarray(y, dtype=float)
    Q, _ = np.linalg.qr(collision.y_basis.T)
    return y - (y @ Q) @ Q.T


def cylinder_separation(cloud, spectrum):
    """Closest approach of samples with opposite cylinder sign.

    Args:
        cloud (SampleCloud): Cloud with cylinder signs.
        spectrum (Spectrum): Eigenstructure used for the cloud.

    Returns:
        tuple: (minimum cross distance, bound 2 sqrt(t_min / lambda_2)).
    """
    if cloud.cylinder_sign is None:
        raise ValueError('Cloud for n=%r has no cylinder labels.' % cloud.n)
    upper = cloud.x[cloud.cylinder_sign > 0]
    lower = cloud.x[cloud.cylinder_sign < 0]
    lam = spectrum.eigenvalues[spectrum.positive[0]]
    bound = 2.0 * math.sqrt(float(np.min(cloud.t)) / lam)
    if len(upper) == 0 or len(lower) == 0:
        return float('inf'), bound
    distances, _ = cKDTree(upper).query(lower, k=1)
    return float(np.min(distances)), bound


def write_cloud(cloud, path, digits=12):
    """Write a cloud as CSV, or JSON when path ends in .json."""
    frame = cloud.to_dataframe()
    if path.endswith('.json'):
        records = json.loads(frame.to_json(orient='records',
                double_precision=min(digits, 15)))
        with open(path, 'wt') as f:
            json.dump({'n': cloud.n, 'seed': cloud.seed,
                    'points': records}, f, indent=2)
    else:
        frame.to_csv(path, index=False, float_format='%%.%dg' % digits)


def _check_blocks(spectrum):
    if len(spectrum.positive) == 0 or len(spectrum.negative) == 0:
        raise EmptySlice('Slices for n=%r need both a positive and a '
                'negative block, inertia is %r.' % (spectrum.n,
                spectrum.inertia))


def _draw(spectrum, s, t, rng, eigenvalues=None, positive=None,
        negative=None):
    """Slice points with per-row energies t."""
    lam = spectrum.eigenvalues if eigenvalues is None else eigenvalues
    pos = spectrum.positive if positive is None else positive
    neg = spectrum.negative if negative is None else negative
    count = len(t)
    y = np.zeros((count, len(lam)))
    y[:, 0] = rng.uniform(-s, s, size=count)
    for block, sign in ((pos, 1.0), (neg, -1.0)):
        g = rng.standard_normal((count, len(block)))
        g /= np.linalg.norm(g, axis=1)[:, np.newaxis]
        y[:, block] = g * np.sqrt(t[:, np.newaxis] / (sign * lam[block]))
    return y


def _accept(x, margin_floor):
    inside = np.all((x >= 0.0) & (x <= 1.0), axis=1)
    margin = np.max(np.abs(x - x[:, ::-1]), axis=1)
    return inside & (margin > margin_floor)


def _tune_t_max(spectrum, s, rng_seed, config):
    t_cap = slice_fit_energy(spectrum, config['fit_fraction'] * s)
    t_max = float(config['t_max_start'])
    # pilot stream keyed by (seed, n), separate from the shard streams
    rng = np.random.default_rng([rng_seed, spectrum.n])
    pilot = int(config['pilot'])
    for halving in range(int(config['max_halvings']) + 1):
        if t_max <= t_cap:
            t_lo = config['t_min_fraction'] * t_max
            t = t_max - rng.uniform(0.0, t_max - t_lo, size=pilot)
            y = _draw(spectrum, s, t, rng)
            x = 0.5 + y @ spectrum.P.T
            acceptance = float(np.mean(_accept(x, config['margin_floor'])))
            logger.debug('t_max=%.4g pilot acceptance %.3f', t_max,
                    acceptance)
            if acceptance > config['min_acceptance']:
                return t_max
        t_max /= 2.0
    raise SamplingStalled('Could not tune t_max for n=%r after %r halvings.'
            % (spectrum.n, config['max_halvings']), attempts=pilot)


def _sample_shard(task):
    """Accepted (x, y, t) for one shard; module level so it pickles."""
    rng = np.random.default_rng(task['seed'])
    lam, P = task['eigenvalues'], task['P']
    quota = task['quota']
    max_attempts = quota * task['attempt_factor']
    batch = max(2 * quota, 256)
    xs, ys, ts = [], [], []
    accepted = attempts = 0
    while accepted < quota:
        if attempts >= max_attempts:
            raise SamplingStalled('Shard with seed %r accepted %r of %r '
                    'samples.' % (task['seed'], accepted, quota),
                    attempts=attempts, accepted=accepted)
        t = task['t_max'] - rng.uniform(0.0, task['t_max'] - task['t_min'],
                size=batch)
        y = _draw(None, task['s'], t, rng, eigenvalues=lam,
                positive=task['positive'], negative=task['negative'])
        x = 0.5 + y @ P.T
        keep = _accept(x, task['margin_floor'])
        xs.append(x[keep])
        ys.append(y[keep])
        ts.append(t[keep])
        accepted += int(np.sum(keep))
        attempts += batch
    x = np.concatenate(xs)[:quota]
    y = np.concatenate(ys)[:quota]
    t = np.concatenate(ts)[:quota]
    return x, y, t
