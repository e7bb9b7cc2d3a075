#!/usr/bin/env python

# stdlib imports
import copy
import os.path

# third party imports
import yaml

# local imports
from gstn.constants import CONFIG_FILE, DEFAULT_CONFIG, EXPECTATIONS_FILE


def get_config(config_file=None):
    """Gets the user defined config laid over the defaults.

    Notes:
        The user file may set any subset of the keys in DEFAULT_CONFIG; the
        others keep their default values. If no config file is present,
        default parameters are used.

    Args:
        config_file (str): YAML file to read. Default is ~/.gstn/config.yml.

    Returns:
        dictionary: Configuration parameters.
    """
    if config_file is None:
        config_file = os.path.join(os.path.expanduser('~'), CONFIG_FILE)
    config = copy.deepcopy(DEFAULT_CONFIG)
    if os.path.isfile(config_file):
        with open(config_file, 'rt') as f:
            user = yaml.safe_load(f)
        _validate_config(user)
        _merge_config(config, user)
    return config


def get_expectations():
    """Load the published expectation tables shipped with the package.

    Returns:
        dictionary: Component counts, restricted polynomials, inertia table,
        kernel patterns, b vectors and elimination steps keyed as in
        gstn/data/expectations.yml.
    """
    homedir = os.path.dirname(os.path.abspath(__file__))
    path = os.path.join(homedir, 'data', EXPECTATIONS_FILE)
    with open(path, 'rt') as f:
        expectations = yaml.safe_load(f)
    return expectations


def _validate_config(config):
    """Check a user config against the layout of DEFAULT_CONFIG.

    Args:
        config (dictionary): Parsed user config.

    Raises:
        TypeError: If config is not a dictionary, a section is not a
            dictionary, or a value cannot stand in for its default.
        KeyError: If config names sections or keys the defaults lack.
    """
    if not isinstance(config, dict):
        raise TypeError('Config is empty or is populated incorrectly.')
    unknown, mistyped = [], []
    _check_section(config, DEFAULT_CONFIG, '', unknown, mistyped)
    if unknown:
        raise KeyError('Unknown config parameters %r.' % unknown)
    if mistyped:
        raise TypeError('Config parameters of the wrong type %r.' % mistyped)


def _check_section(section, defaults, prefix, unknown, mistyped):
    for key, value in section.items():
        name = '%s%s' % (prefix, key)
        if key not in defaults:
            unknown.append(name)
        elif isinstance(defaults[key], dict):
            if isinstance(value, dict):
                _check_section(value, defaults[key], name + '.', unknown,
                        mistyped)
            else:
                mistyped.append(name)
        else:
            try:
                _coerce(value, defaults[key])
            except (TypeError, ValueError):
                mistyped.append(name)


def _merge_config(config, user):
    """Overlay validated user values on config in place."""
    for key, value in user.items():
        if isinstance(config[key], dict):
            _merge_config(config[key], value)
        else:
            config[key] = _coerce(value, config[key])


def _coerce(value, default):
    """Convert value to the type of its default.

    YAML reads 1e-10 (no decimal point) as a string, so numeric strings are
    accepted for float parameters.
    """
    if isinstance(value, bool):
        raise TypeError('Boolean %r given for a numeric parameter.' % value)
    if isinstance(default, int):
        if isinstance(value, float) and value.is_integer():
            return int(value)
        if not isinstance(value, int):
            raise TypeError('Expected an integer, got %r.' % value)
        return value
    return float(value)
