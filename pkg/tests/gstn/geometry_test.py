#!/usr/bin/env python

# stdlib imports
import copy
import json
import os.path
import tempfile

# third party imports
import numpy as np
import pandas as pd

# local imports
from gstn.constants import DEFAULT_CONFIG
from gstn.errors import EmptySlice
from gstn.geometry import (SliceSpec, chord_distance_to_T,
        cylinder_separation, distance_to_T, sample_gst, sample_slice,
        slice_fit_energy, write_cloud)
from gstn.quadratic import kernel_basis, lift, restrict_to_symmetric
from gstn.spectral import (Spectrum, collision_space, slice_energies)


def _sampling(**overrides):
    config = copy.deepcopy(DEFAULT_CONFIG['sampling'])
    config.update(overrides)
    return config


def test_slice_spec():
    SliceSpec(s=0.5, t=0.0)
    for s, t in ((0.0, 0.1), (-1.0, 0.1), (0.5, -0.1)):
        try:
            SliceSpec(s=s, t=t)
            success = True
        except ValueError:
            success = False
        assert success == False


def test_sample_slice(spectrum_for):
    spectrum = spectrum_for(5)[1]
    y = sample_slice(SliceSpec(s=0.5, t=0.01), spectrum, 200, 4)
    assert y.shape == (200, 5)
    assert np.all(np.abs(y[:, 0]) <= 0.5)
    positive, negative = slice_energies(y, spectrum)
    np.testing.assert_allclose(positive, 0.01, atol=1e-12)
    np.testing.assert_allclose(negative, 0.01, atol=1e-12)
    # the positive block of n=4 is a pair of points
    spectrum = spectrum_for(4)[1]
    y = sample_slice(SliceSpec(s=0.5, t=0.02), spectrum, 200, 4)
    pos = spectrum.positive[0]
    value = np.sqrt(0.02 / spectrum.eigenvalues[pos])
    np.testing.assert_allclose(np.abs(y[:, pos]), value, rtol=1e-12)
    assert np.any(y[:, pos] > 0) and np.any(y[:, pos] < 0)
    try:
        sample_slice(SliceSpec(s=0.5, t=0.0), spectrum, 10, 4)
        success = True
    except ValueError:
        success = False
    assert success == False


def test_empty_slice():
    spectrum = Spectrum(n=3, eigenvalues=np.array([0.0, 2.0, 1.0]),
            P=np.eye(3), inertia=(2, 1, 0), zero_tol=1e-10)
    try:
        sample_slice(SliceSpec(s=0.5, t=0.1), spectrum, 10, 1)
        success = True
    except EmptySlice:
        success = False
    assert success == False


def test_slice_fit_energy(spectrum_for):
    for n in (4, 5, 7):
        spectrum = spectrum_for(n)[1]
        half_width = 0.1
        t_fit = slice_fit_energy(spectrum, half_width)
        assert t_fit > 0
        y = sample_slice(SliceSpec(s=half_width, t=t_fit), spectrum, 500, n)
        x = 0.5 + y @ spectrum.P.T
        assert np.all(x >= -1e-12) and np.all(x <= 1 + 1e-12)
        assert slice_fit_energy(spectrum, np.sqrt(n) / 2.0) == 0.0


def test_sample_gst(spectrum_for):
    for n in (3, 4, 5, 6, 7):
        form, spectrum = spectrum_for(n)
        cloud = sample_gst(n, 500, 7, config=_sampling(),
                spectrum=spectrum)
        assert len(cloud) == 500
        Q = form.as_float()
        psi = np.einsum('ij,jk,ik->i', cloud.x, Q, cloud.x)
        assert np.max(np.abs(psi)) < 1e-10
        assert np.all(cloud.x >= 0.0) and np.all(cloud.x <= 1.0)
        assert np.all(cloud.margin > 0.0)
        np.testing.assert_allclose(cloud.x, 0.5 + cloud.y @ spectrum.P.T,
                atol=1e-14)
        np.testing.assert_allclose(np.linalg.norm(cloud.x - 0.5, axis=1),
                np.linalg.norm(cloud.y, axis=1), atol=1e-12)
        config = cloud.sampler_config
        assert np.all(cloud.t <= config['t_max'])
        assert np.all(cloud.t >= config['t_min'])
        if n in (3, 4):
            assert set(np.unique(cloud.cylinder_sign)) == {-1, 1}
        else:
            assert cloud.cylinder_sign is None


def test_sample_gst_seeded(spectrum_for):
    spectrum = spectrum_for(5)[1]
    config = _sampling(shard_size=100)
    first = sample_gst(5, 250, 3, config=config, spectrum=spectrum)
    second = sample_gst(5, 250, 3, config=config, spectrum=spectrum)
    np.testing.assert_array_equal(first.x, second.x)
    assert first.sampler_config['shards'] == 3
    other = sample_gst(5, 250, 4, config=config, spectrum=spectrum)
    assert not np.array_equal(first.x, other.x)
    try:
        sample_gst(5, 0, 3, config=config, spectrum=spectrum)
        success = True
    except ValueError:
        success = False
    assert success == False


def test_cylinder_separation(spectrum_for):
    spectrum = spectrum_for(4)[1]
    cloud = sample_gst(4, 1000, 11, config=_sampling(), spectrum=spectrum)
    distance, bound = cylinder_separation(cloud, spectrum)
    assert bound > 0
    assert distance >= bound - 1e-12
    cloud = sample_gst(5, 50, 11, config=_sampling(),
            spectrum=spectrum_for(5)[1])
    try:
        cylinder_separation(cloud, spectrum_for(5)[1])
        success = True
    except ValueError:
        success = False
    assert success == False


def test_distance_to_T(spectrum_for):
    form, spectrum = spectrum_for(5)
    kernel = [lift(v, 5) for v in
            kernel_basis(restrict_to_symmetric(form).R)]
    collision = collision_space(spectrum, kernel)
    y = 3.0 * collision.b1 - 0.2 * collision.b2
    assert distance_to_T(y, collision) < 1e-12
    Q, _ = np.linalg.qr(np.column_stack([collision.b1, collision.b2,
            np.eye(5)[:, 2]]))
    off = 0.7 * Q[:, 2]
    np.testing.assert_allclose(distance_to_T(off, collision), 0.7,
            atol=1e-12)
    rows = np.array([y, y + off])
    np.testing.assert_allclose(distance_to_T(rows, collision), [0.0, 0.7],
            atol=1e-12)
    # endpoints on either side of T, then a segment moving away from it
    rows = np.array([y + off, y - off, 2.0 * collision.b1 - off,
            collision.b1 - 3.0 * off])
    np.testing.assert_allclose(chord_distance_to_T(rows, collision),
            [0.0, 0.7, 0.7], atol=1e-12)
    assert len(chord_distance_to_T(rows[:1], collision)) == 0


def test_write_cloud(spectrum_for):
    cloud = sample_gst(4, 40, 2, config=_sampling(),
            spectrum=spectrum_for(4)[1])
    tmpdir = tempfile.mkdtemp()
    csvfile = os.path.join(tmpdir, 'cloud.csv')
    write_cloud(cloud, csvfile)
    frame = pd.read_csv(csvfile)
    assert list(frame.columns[:3]) == ['n', 't', 'margin']
    assert list(frame.columns[-1:]) == ['cyl']
    assert len(frame) == 40
    np.testing.assert_allclose(frame['x2'].values, cloud.x[:, 1],
            rtol=1e-10)
    jsonfile = os.path.join(tmpdir, 'cloud.json')
    write_cloud(cloud, jsonfile)
    with open(jsonfile, 'rt') as f:
        data = json.load(f)
    assert data['n'] == 4
    assert data['seed'] == 2
    assert len(data['points']) == 40
    assert set(data['points'][0]) >= {'x1', 'y4', 'cyl'}
