# stdlib imports
from dataclasses import dataclass, field
from fractions import Fraction
from math import comb

# third party imports
import numpy as np

# local imports
from gstn.config import get_config
from gstn.errors import EnumerationCapExceeded, InvalidN


@dataclass(frozen=True)
class GamePoint(object):
    """Effect probabilities of the symmetric n player game.

    x[k - 1] is the probability that a player's effect occurs given that
    exactly k players (the player included) chose the same cause state.
    """
    x: tuple
    probabilistic: bool = field(init=False)

    def __post_init__(self):
        values = tuple(Fraction(v) for v in self.x)
        if len(values) < 3:
            raise InvalidN('A game needs at least three players, got %r.'
                    % len(values))
        object.__setattr__(self, 'x', values)
        object.__setattr__(self, 'probabilistic',
                all(0 <= v <= 1 for v in values))

    @property
    def n(self):
        return len(self.x)

    @classmethod
    def fromStrings(cls, text):
        """Parse a comma separated list of rationals such as '1,1/3,0'.

        Args:
            text (str): Comma separated values.

        Returns:
            GamePoint: Parsed point.
        """
        return cls(tuple(Fraction(v.strip()) for v in text.split(',')))

    def as_float(self):
        return np.array([float(v) for v in self.x])


@dataclass(frozen=True)
class ResidualReport(object):
    n: int
    x: GamePoint
    marginal: Fraction
    joint: Fraction
    residual: Fraction
    psi: Fraction
    relation_ok: bool
    indices: tuple = (0, 1, 2)


def influence_margin(point):
    """Largest gap between mirrored effect probabilities.

    Args:
        point (GamePoint): Game point.

    Returns:
        Fraction: max over s of |x_s - x_(n-s+1)|. Zero exactly on the
        palindromic subspace where influence fails.
    """
    x = point.x
    n = len(x)
    return max(abs(x[s] - x[n - 1 - s]) for s in range(n))


def marginal_effect_prob(point):
    """Probability that a single effect occurs.

    A player's agreement count is 1 + Binomial(n - 1, 1/2), so this is the
    binomial average of the effect probabilities.

    Args:
        point (GamePoint): Game point.

    Returns:
        Fraction: Exact marginal probability.
    """
    n = point.n
    total = sum(comb(n - 1, k) * point.x[k] for k in range(n))
    return Fraction(total) / 2**(n - 1)


def agreement_counts(causes):
    """Number of players sharing each player's cause state.

    Args:
        causes (numpy.ndarray): Integer array (rows, n) of 0/1 cause states.

    Returns:
        numpy.ndarray: Integer array (rows, n); entry [r, i] counts the
        players j (i included) with causes[r, j] == causes[r, i].
    """
    causes = np.asarray(causes, dtype=np.int64)
    n = causes.shape[1]
    ones = causes.sum(axis=1)[:, np.newaxis]
    return np.where(causes == 1, ones, n - ones)


def random_rational_point(n, rng, max_denominator=None):
    """Draw a probability vector with rational entries k/d.

    Args:
        n (int): Player count.
        rng (numpy.random.Generator): Random generator.
        max_denominator (int): Largest denominator d. Default is the oracle
                max_denominator from the config.

    Returns:
        GamePoint: Random point in the probability cube.
    """
    if n < 3:
        raise InvalidN('Player count must be at least three, got %r.' % n)
    if max_denominator is None:
        max_denominator = get_config()['oracle']['max_denominator']
    denominators = rng.integers(1, max_denominator, size=n, endpoint=True)
    numerators = rng.integers(0, denominators, endpoint=True)
    return GamePoint(tuple(Fraction(int(k), int(d))
            for k, d in zip(numerators, denominators)))


def independence_residual(point, indices=(0, 1, 2), cap=None, form=None):
    """Exact conditional independence residual of two effects given a cause.

    All 2^(n-1) cause vectors with cause k fixed at 1 are enumerated. Given
    the causes the effects are independent, so the joint probability of
    effects i and j is the average of x[k_i] * x[k_j].

    Args:
        point (GamePoint): Game point.
        indices (tuple): Distinct player indices (i, j, k), zero based.
        cap (int): Largest n allowed. Default is the oracle
                enumeration_cap from the config.
        form (QuadraticForm): Prebuilt form for n; built when None.

    Returns:
        ResidualReport: Marginal, joint, residual and psi, all exact.

    Raises:
        EnumerationCapExceeded: If n exceeds the cap.
        ValueError: If the indices are not distinct players.
    """
    # local import, quadratic builds on this module's GamePoint
    from gstn.quadratic import build_form, eval_psi
    n = point.n
    _check_cap(n, cap)
    i, j, k = indices
    if len({i, j, k}) != 3 or not all(0 <= v < n for v in indices):
        raise ValueError('Indices must be three distinct players, got %r.'
                % (indices,))
    causes = _cause_vectors(n, k, 1)
    counts = agreement_counts(causes)
    # histogram of (k_i, k_j) pairs keeps the exact sum short and ordered
    codes = (counts[:, i] - 1) * n + (counts[:, j] - 1)
    unique, multiplicity = np.unique(codes, return_counts=True)
    total = Fraction(0)
    for code, mult in zip(unique, multiplicity):
        a, b = divmod(int(code), n)
        total += int(mult) * point.x[a] * point.x[b]
    joint = total / 2**(n - 1)
    marginal = marginal_effect_prob(point)
    residual = joint - marginal**2
    if form is None:
        form = build_form(n)
    psi = eval_psi(form, point.x)
    return ResidualReport(n=n, x=point, marginal=marginal, joint=joint,
            residual=residual, psi=psi, relation_ok=(residual == -psi),
            indices=tuple(indices))


def influence_table(point, cap=None):
    """Brute force influence of every cause on every effect.

    Args:
        point (GamePoint): Game point.
        cap (int): Largest n allowed.

    Returns:
        numpy.ndarray: Boolean (n, n); entry [c, e] is True when flipping
        cause c, for some assignment of the other causes, changes the
        probability of effect e.
    """
    n = point.n
    _check_cap(n, cap)
    # compare integer level ids instead of Fractions
    levels = {value: idx for idx, value in enumerate(sorted(set(point.x)))}
    level_ids = np.array([levels[v] for v in point.x], dtype=np.int64)
    table = np.zeros((n, n), dtype=bool)
    for cause in range(n):
        off = level_ids[agreement_counts(_cause_vectors(n, cause, 0)) - 1]
        on = level_ids[agreement_counts(_cause_vectors(n, cause, 1)) - 1]
        table[cause] = np.any(off != on, axis=0)
    return table


def influence_bruteforce(point, cap=None):
    """True when every cause influences every effect.

    Args:
        point (GamePoint): Game point.
        cap (int): Largest n allowed.

    Returns:
        bool: Whether influence holds for all cause/effect pairs.
    """
    return bool(influence_table(point, cap=cap).all())


def _check_cap(n, cap):
    if cap is None:
        cap = get_config()['oracle']['enumeration_cap']
    if n > cap:
        raise EnumerationCapExceeded('Exact enumeration is capped at n=%r, '
                'got n=%r.' % (cap, n))


def _cause_vectors(n, fixed, value):
    """All cause vectors with player `fixed` set to `value`.

    Rows are in binary counting order over the other players.
    """
    rows = np.arange(2**(n - 1), dtype=np.int64)[:, np.newaxis]
    others = (rows >> np.arange(n - 1, dtype=np.int64)) & 1
    return np.insert(others, fixed, value, axis=1)
