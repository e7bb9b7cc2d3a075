# stdlib imports
import copy
import os.path
import shutil
import tempfile

# third party imports
import yaml

# local imports
from gstn.config import _validate_config, get_config, get_expectations
from gstn.constants import DEFAULT_CONFIG


def test_config():
    config = copy.deepcopy(DEFAULT_CONFIG)
    _validate_config(config)
    # any subset is a valid config
    _validate_config({'path': {'step': 0.005}})
    _validate_config({'spectral': {'zero_tol': '1e-9'}})
    _validate_config({})

    # Test unknown parameters
    for bad in ({'spectra': {}}, {'path': {'stepsize': 0.1}}):
        try:
            _validate_config(bad)
            success = True
        except KeyError:
            success = False
        assert success == False
    # Test invalid types
    for bad in ([], None, {'path': 0.1}, {'path': {'step': 'small'}},
            {'oracle': {'trials': 2.5}}, {'sampling': {'workers': True}}):
        try:
            _validate_config(bad)
            success = True
        except TypeError:
            success = False
        assert success == False


def test_get_config():
    config = get_config()
    _validate_config(config)
    assert config['oracle']['enumeration_cap'] >= 3
    tmpdir = tempfile.mkdtemp()
    try:
        config_file = os.path.join(tmpdir, 'config.yml')
        with open(config_file, 'wt') as f:
            yaml.dump({'path': {'step': 0.005},
                    'spectral': {'zero_tol': '1e-9'},
                    'oracle': {'trials': 20.0}}, f)
        config = get_config(config_file)
        assert config['path']['step'] == 0.005
        assert config['path']['t_clearance'] == \
                DEFAULT_CONFIG['path']['t_clearance']
        assert config['spectral']['zero_tol'] == 1e-9
        assert config['oracle']['trials'] == 20
        assert isinstance(config['oracle']['trials'], int)
        assert config['output'] == DEFAULT_CONFIG['output']
        # the defaults are not touched
        assert DEFAULT_CONFIG['path']['step'] == 1e-2
        missing = os.path.join(tmpdir, 'missing.yml')
        assert get_config(missing) == DEFAULT_CONFIG
        with open(config_file, 'wt') as f:
            f.write('path:\n  steps: 0.1\n')
        try:
            get_config(config_file)
            success = True
        except KeyError:
            success = False
        assert success == False
    finally:
        shutil.rmtree(tmpdir)


def test_expectations():
    expectations = get_expectations()
    assert expectations['components'][4] == 2
    assert expectations['components'][8] == 1
    assert expectations['restricted'][6]['scale'] == 256
    assert sorted(expectations['b_vectors']) == [5, 7]
    for n, kernel in expectations['kernels'].items():
        for vector in kernel:
            assert len(vector) == n


if __name__ == '__main__':
    test_config()
    test_get_config()
    test_expectations()
