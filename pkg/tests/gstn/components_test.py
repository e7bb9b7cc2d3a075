#!/usr/bin/env python

# stdlib imports
import copy

# third party imports
import numpy as np
import pytest

# local imports
from gstn.components import (DisjointSets, count_components, epsilon_grid)
from gstn.config import get_expectations
from gstn.constants import DEFAULT_CONFIG
from gstn.errors import NoStablePlateau
from gstn.geometry import SampleCloud, cylinder_separation, sample_gst


def _blobs(centers, size, scale, seed=0):
    rng = np.random.default_rng(seed)
    x = np.concatenate([center + scale * rng.standard_normal((size,
            len(center))) for center in np.asarray(centers, dtype=float)])
    N = len(x)
    return SampleCloud(n=x.shape[1], x=x, y=x.copy(), t=np.zeros(N),
            margin=np.ones(N), cylinder_sign=None, seed=seed,
            sampler_config={})


def test_disjoint_sets():
    forest = DisjointSets(6)
    assert forest.count() == 6
    assert forest.merge_pairs([(0, 1), (2, 3)]) == 2
    assert forest.count() == 4
    assert forest.merge_pairs([(1, 3), (0, 2), (1, 0)]) == 1
    assert forest.count() == 3
    labels = forest.labels()
    assert len(set(labels[:4])) == 1
    assert labels[4] != labels[5]
    assert forest.merge_pairs(np.zeros((0, 2))) == 0
    # a chain collapses in one batch
    forest = DisjointSets(5)
    assert forest.merge_pairs([(3, 4), (2, 3), (1, 2), (0, 1)]) == 4
    assert forest.count() == 1


def test_epsilon_grid():
    cloud = _blobs([[0, 0, 0]], 200, 0.1)
    config = copy.deepcopy(DEFAULT_CONFIG['components'])
    grid = epsilon_grid(cloud.x, config)
    assert len(grid) == config['eps_steps']
    assert np.all(np.diff(grid) > 0)
    grid = epsilon_grid(cloud.x, config, eps_min=0.01, eps_max=1.0)
    np.testing.assert_allclose([grid[0], grid[-1]], [0.01, 1.0])
    try:
        epsilon_grid(cloud.x, config, eps_min=1.0, eps_max=0.5)
        success = True
    except ValueError:
        success = False
    assert success == False


def test_two_blobs():
    cloud = _blobs([[0, 0, 0], [1, 1, 1]], 300, 0.01)
    config = copy.deepcopy(DEFAULT_CONFIG['components'])
    grid = np.geomspace(0.1, 0.5, 10)
    report = count_components(cloud, grid=grid, config=config)
    assert report.stable_count == 2
    assert report.stable_epsilon == grid[0]
    assert report.component_sizes == [300, 300]
    assert report.unassigned == 0
    assert report.y_space_agrees
    assert report.min_cluster_size == 6
    # one more step that bridges the gap
    grid = np.append(grid, 2.0)
    report = count_components(cloud, grid=grid, config=config)
    assert report.components_per_epsilon[-1] == 1
    assert all(np.diff(report.components_per_epsilon) <= 0)


def test_no_plateau():
    cloud = _blobs([[0, 0], [3, 0], [10, 0]], 40, 0.01)
    config = copy.deepcopy(DEFAULT_CONFIG['components'])
    # three resolved points with different counts
    grid = [0.5, 4.0, 8.0]
    try:
        count_components(cloud, grid=grid, config=config)
        success = True
    except NoStablePlateau as e:
        success = False
        report = e.report
    assert success == False
    assert report.stable_count is None
    assert report.significant_per_epsilon == [3, 2, 1]
    assert report.resolved == [True, True, True]


def test_small_cloud(spectrum_for):
    cloud = sample_gst(4, 10, 1, spectrum=spectrum_for(4)[1])
    try:
        count_components(cloud)
        success = True
    except NoStablePlateau as e:
        success = False
        assert e.report.sample_count == 10
    assert success == False


def test_gst_components(spectrum_for):
    expectations = get_expectations()
    for n in (4, 5):
        cloud = sample_gst(n, 10000, 1, spectrum=spectrum_for(n)[1])
        report = count_components(cloud)
        assert report.stable_count == expectations['components'][n]
        assert report.y_space_agrees


@pytest.mark.slow
def test_gst_components_all(spectrum_for):
    expectations = get_expectations()
    for n in range(3, 11):
        cloud = sample_gst(n, 10000, 1, spectrum=spectrum_for(n)[1])
        report = count_components(cloud)
        assert report.stable_count == expectations['components'][n]
        if n == 4:
            # no edge between the cylinders below the guaranteed gap
            distance, bound = cylinder_separation(cloud, spectrum_for(4)[1])
            assert distance >= bound
            assert report.stable_epsilon < distance
