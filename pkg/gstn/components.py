"""Connected components of a sample cloud over a sweep of epsilon graphs.

Two samples are joined when their distance is at most epsilon. The sweep is
ascending, so one disjoint-set forest accumulates merges from grid point to
grid point and the raw component count can only decrease.
"""

# stdlib imports
from dataclasses import dataclass, field
import logging
import math

# third party imports
import numpy as np
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import connected_components
from scipy.spatial import cKDTree

# local imports
from gstn.config import get_config
from gstn.errors import NoStablePlateau

logger = logging.getLogger(__name__)

# Below this many components merges come from per-component nearest
# neighbour queries instead of ball queries.
FEW_COMPONENTS = 8


class DisjointSets(object):
    """Union-find over integer items with vectorized batch merges."""
    def __init__(self, size):
        self.parent = np.arange(size, dtype=np.int64)

    def labels(self):
        """Root of every item; compresses all paths."""
        parent = self.parent
        while True:
            grand = parent[parent]
            if np.array_equal(grand, parent):
                break
            parent = grand
        self.parent = parent
        return parent.copy()

    def count(self):
        return int(np.sum(self.labels() == np.arange(len(self.parent))))

    def merge_pairs(self, pairs):
        """Union every (a, b) row of pairs.

        Args:
            pairs (numpy.ndarray): (k, 2) item indices.

        Returns:
            int: Number of merges, i.e. the drop in the component count.
        """
        pairs = np.asarray(pairs, dtype=np.int64).reshape(-1, 2)
        roots = self.labels()
        a, b = roots[pairs[:, 0]], roots[pairs[:, 1]]
        keep = a != b
        if not np.any(keep):
            return 0
        a, b = a[keep], b[keep]
        involved = np.unique(np.concatenate([a, b]))
        index = np.searchsorted(involved, a), np.searchsorted(involved, b)
        size = len(involved)
        graph = coo_matrix((np.ones(len(a)), index), shape=(size, size))
        ncomp, comp = connected_components(graph, directed=False)
        representative = np.full(ncomp, np.iinfo(np.int64).max)
        np.minimum.at(representative, comp, involved)
        self.parent[involved] = representative[comp]
        return size - ncomp


@dataclass(frozen=True)
class ComponentReport(object):
    """Component counts along an epsilon sweep.

    Attributes:
        n (int): Player count.
        sample_count (int): Cloud size.
        epsilon_grid (list): Ascending epsilon values.
        components_per_epsilon (list): Raw component counts (nonincreasing).
        significant_per_epsilon (list): Components holding at least
            min_cluster_size samples.
        resolved (list): Whether significant components covered the cloud.
        stable_count (int): Significant count over the first plateau, or
            None.
        stable_epsilon (float): First epsilon of that plateau, or None.
        component_sizes (list): Significant component sizes at the stable
            epsilon, largest first.
        unassigned (int): Samples outside significant components there.
        y_space_agrees (bool): Raw count at the stable epsilon recomputed
            from y coordinates matches, or None.
        min_cluster_size (int): Size threshold for significance.
    """
    n: int
    sample_count: int
    epsilon_grid: list
    components_per_epsilon: list
    significant_per_epsilon: list
    resolved: list
    stable_count: int = None
    stable_epsilon: float = None
    component_sizes: list = field(default_factory=list)
    unassigned: int = 0
    y_space_agrees: bool = None
    min_cluster_size: int = 2


def epsilon_grid(points, config=None, rng_seed=0, eps_min=None,
        eps_max=None):
    """Geometric epsilon grid between percentiles of pair distances.

    Args:
        points (numpy.ndarray): (N, d) coordinates.
        config (dict): Components config section.
        rng_seed (int): Seed for the random distance pairs.
        eps_min (float): Lower end; overrides the low percentile.
        eps_max (float): Upper end; overrides the high percentile.

    Returns:
        numpy.ndarray: eps_steps ascending values.
    """
    if config is None:
        config = get_config()['components']
    steps = int(config['eps_steps'])
    if eps_min is None or eps_max is None:
        rng = np.random.default_rng(rng_seed)
        N = len(points)
        npairs = int(config['distance_pairs'])
        i = rng.integers(0, N, size=npairs)
        j = (i + rng.integers(1, max(N, 2), size=npairs)) % N
        distances = np.linalg.norm(points[i] - points[j], axis=1)
        distances = distances[distances > 0]
        if eps_min is None:
            eps_min = float(np.percentile(distances,
                    config['low_percentile']))
        if eps_max is None:
            eps_max = float(np.percentile(distances,
                    config['high_percentile']))
    if not 0 < eps_min < eps_max:
        raise ValueError('Epsilon range must satisfy 0 < min < max, got '
                '(%r, %r).' % (eps_min, eps_max))
    return np.geomspace(eps_min, eps_max, steps)


def count_components(cloud, grid=None, config=None, eps_min=None,
        eps_max=None):
    """Count components of the epsilon graphs of a cloud.

    A grid point is resolved when the components holding at least
    min_cluster_fraction of the samples cover `coverage` of the cloud. The
    stable count is the number of such components over the first run of
    plateau_length resolved grid points with equal counts.

    Args:
        cloud (SampleCloud): Samples.
        grid (array-like): Epsilon values; built by epsilon_grid when None.
        config (dict): Components config section.
        eps_min (float): Grid lower end override.
        eps_max (float): Grid upper end override.

    Returns:
        ComponentReport: Counts along the grid and the plateau reading.

    Raises:
        NoStablePlateau: If no plateau exists; the exception carries the
            report with stable_count None.
    """
    if config is None:
        config = get_config()['components']
    points = cloud.x
    N = len(points)
    if N == 0:
        raise ValueError('Cannot count components of an empty cloud.')
    if grid is None:
        if N < 2:
            grid = np.array([1.0])
        else:
            grid = epsilon_grid(points, config, rng_seed=cloud.seed,
                    eps_min=eps_min, eps_max=eps_max)
    grid = np.sort(np.asarray(grid, dtype=float))
    min_size = max(2, int(math.ceil(config['min_cluster_fraction'] * N)))
    sweep = _sweep(points, grid)
    raw, significant, resolved, sizes = [], [], [], []
    for labels in sweep:
        counts = np.bincount(labels, minlength=N)
        counts = np.sort(counts[counts > 0])[::-1]
        big = counts[counts >= min_size]
        raw.append(int(len(counts)))
        significant.append(int(len(big)))
        resolved.append(bool(len(big) >= 1 and
                big.sum() >= config['coverage'] * N))
        sizes.append([int(v) for v in big])
    logger.debug('Raw counts for n=%d: %r', cloud.n, raw)
    stable = None
    length = int(config['plateau_length'])
    if N >= config.get('min_samples', 0):
        for start in range(len(grid) - length + 1):
            window = range(start, start + length)
            if all(resolved[k] for k in window) and \
                    len({significant[k] for k in window}) == 1:
                stable = start
                break
    report = dict(n=cloud.n, sample_count=N,
            epsilon_grid=[float(e) for e in grid],
            components_per_epsilon=raw,
            significant_per_epsilon=significant, resolved=resolved,
            min_cluster_size=min_size)
    if stable is None:
        raise NoStablePlateau('No %r point plateau of resolved counts for '
                'n=%r; raw counts %r.' % (length, cloud.n, raw),
                report=ComponentReport(**report))
    eps = grid[stable]
    y_labels = list(_sweep(cloud.y, np.array([eps])))[0]
    y_raw = int(len(np.unique(y_labels)))
    return ComponentReport(stable_count=significant[stable],
            stable_epsilon=float(eps), component_sizes=sizes[stable],
            unassigned=int(N - sum(sizes[stable])),
            y_space_agrees=(y_raw == raw[stable]), **report)


def _sweep(points, grid):
    """Yield component labels of the epsilon graph for each grid value."""
    forest = DisjointSets(len(points))
    tree = cKDTree(points)
    for eps in grid:
        _merge_within(points, tree, forest, eps)
        yield forest.labels()


def _merge_within(points, tree, forest, eps):
    """Merge every pair of components closer than eps."""
    while True:
        labels = forest.labels()
        roots, sizes = np.unique(labels, return_counts=True)
        if len(roots) <= 1:
            return
        largest = roots[np.argmax(sizes)]
        if len(roots) > FEW_COMPONENTS:
            # every edge touches a point outside the largest component
            idx = np.flatnonzero(labels != largest)
            neighbours = tree.query_ball_point(points[idx], eps)
            lengths = np.array([len(v) for v in neighbours], dtype=np.int64)
            if lengths.sum() == 0:
                return
            src = np.repeat(idx, lengths)
            dst = np.concatenate([np.asarray(v, dtype=np.int64)
                    for v in neighbours])
            cross = labels[src] != labels[dst]
            forest.merge_pairs(np.column_stack([src[cross], dst[cross]]))
            return
        pairs = []
        for root in roots:
            if root == largest:
                continue
            inside = labels == root
            others = np.flatnonzero(~inside)
            distances, nearest = cKDTree(points[others]).query(
                    points[inside], k=1, distance_upper_bound=eps * 1.000001)
            close = distances <= eps
            if np.any(close):
                pairs.append(np.column_stack([np.flatnonzero(inside)[close],
                        others[nearest[close]]]))
        if not pairs:
            return
        forest.merge_pairs(np.concatenate(pairs))
