CONFIG_FILE = '.gstn/config.yml'

EXPECTATIONS_FILE = 'expectations.yml'

SEED_VARIABLE = 'GST_SEED'

DEFAULT_SEED = 1

# Constants the published restricted polynomials are multiplied through by.
PUBLISHED_SCALES = {4: 8, 5: 64, 6: 2**8, 7: 2**10}

CSV_PREFIX = ['n', 't', 'margin']

DEFAULT_CONFIG = {
        'oracle': {
                'enumeration_cap': 16,
                'trials': 100,
                'max_denominator': 1000
        },
        'spectral': {
                'zero_tol': 1e-10,
                'off_tol': 1e-13,
                'max_sweeps': 50,
                'degenerate_tol': 1e-8,
                'b_vector_tol': 1e-4
        },
        'sampling': {
                'samples': 10000,
                'shard_size': 2500,
                'workers': 1,
                't_max_start': 0.25,
                'min_acceptance': 0.1,
                'pilot': 400,
                't_min_fraction': 0.5,
                'fit_fraction': 0.25,
                'margin_floor': 1e-9,
                'attempt_factor': 50,
                'max_halvings': 40
        },
        'components': {
                'eps_steps': 20,
                'low_percentile': 5.0,
                'high_percentile': 95.0,
                'plateau_length': 3,
                'min_cluster_fraction': 0.01,
                'coverage': 0.95,
                'distance_pairs': 20000,
                'min_samples': 100
        },
        'path': {
                'step': 1e-2,
                't_clearance': 1e-3,
                'psi_tol': 1e-8,
                'endpoint_tol': 1e-12,
                'margin_floor': 0.0,
                'shrink': 0.25,
                'pairs': 10
        },
        'output': {
                'digits': 12
        }
}
