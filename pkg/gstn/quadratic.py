"""Exact rational algebra of the independence form Psi.

Matrices are numpy object arrays of fractions.Fraction, so that numpy
indexing and broadcasting work while every entry stays exact.
"""

# stdlib imports
from dataclasses import dataclass
from fractions import Fraction
from math import comb, lcm

# third party imports
import numpy as np

# local imports
from gstn.constants import PUBLISHED_SCALES
from gstn.errors import DimensionMismatch, InvalidN


@dataclass(frozen=True, eq=False)
class QuadraticForm(object):
    """Symmetric exact matrix Q with x^T Q x = Psi(x)."""
    n: int
    Q: np.ndarray

    def as_float(self):
        return self.Q.astype(float)


@dataclass(frozen=True, eq=False)
class RestrictedForm(object):
    """Psi on the palindromic subspace in the free coordinates x_1..x_m."""
    n: int
    m: int
    R: np.ndarray
    scale: int

    @property
    def scaled(self):
        return self.R * self.scale


@dataclass(frozen=True)
class ExactInertia(object):
    positive: int
    zero: int
    negative: int

    def as_tuple(self):
        return (self.positive, self.zero, self.negative)


@dataclass(frozen=True, eq=False)
class Elimination(object):
    """A quadratic solved for one variable.

    The scaled polynomial is written as a*v_k^2 + b*v_k + c with b linear and
    c quadratic in the remaining variables.

    Attributes:
        index (int): One based index of the eliminated variable.
        leading (Fraction): The coefficient a.
        center (dict): Root center -b/(2a) as {variable index: coefficient}.
        remaining (tuple): One based indices of the remaining variables.
        discriminant (numpy.ndarray): Exact symmetric matrix of b^2 - 4ac.
        inertia (ExactInertia): Inertia of the discriminant.
        square (tuple): (c, (a, b)) when the discriminant is -c(v_a - v_b)^2,
            otherwise None.
    """
    index: int
    leading: Fraction
    center: dict
    remaining: tuple
    discriminant: np.ndarray
    inertia: ExactInertia
    square: tuple


def build_form(n):
    """Build the exact matrix of Psi for n players.

    Psi(x) = (l . x)^2 - x^T B x, where l holds the binomial weights of the
    marginal effect probability and B is the symmetric matrix of the
    pairwise agreement term.

    Args:
        n (int): Player count.

    Returns:
        QuadraticForm: Exact form.

    Raises:
        InvalidN: If n < 3.
    """
    if n < 3:
        raise InvalidN('Player count must be at least three, got %r.' % n)
    denominator = 2**(n - 1)
    ell = np.array([Fraction(comb(n - 1, k), denominator) for k in range(n)],
            dtype=object)
    B = _zeros(n)
    for k in range(n - 1):
        weight = Fraction(comb(n - 2, k), denominator)
        B[k + 1, k + 1] += weight
        a, b = k, n - 2 - k
        # cross terms split evenly; a == b folds onto the diagonal
        B[a, b] += weight / 2
        B[b, a] += weight / 2
    Q = np.outer(ell, ell) - B
    return QuadraticForm(n=n, Q=Q)


def eval_psi(form, x):
    """Evaluate x^T Q x exactly.

    Args:
        form (QuadraticForm): Form of size n.
        x (sequence): n rationals.

    Returns:
        Fraction: Psi(x).

    Raises:
        DimensionMismatch: If len(x) != n.
    """
    values = _as_fractions(x)
    if len(values) != form.n:
        raise DimensionMismatch('Vector of length %r does not match n=%r.'
                % (len(values), form.n))
    return _quad(form.Q, values)


def psi_direct(x):
    """Evaluate Psi term by term from its two binomial sums.

    Args:
        x (sequence): n rationals, n >= 3.

    Returns:
        Fraction: Psi(x).
    """
    values = _as_fractions(x)
    n = len(values)
    if n < 3:
        raise InvalidN('Player count must be at least three, got %r.' % n)
    denominator = 2**(n - 1)
    linear = sum((comb(n - 1, k) * values[k] for k in range(n)), Fraction(0))
    pairs = sum((comb(n - 2, k) * (values[k + 1]**2 +
            values[k] * values[n - 2 - k]) for k in range(n - 1)),
            Fraction(0))
    return (linear / denominator)**2 - pairs / denominator


def lift(v, n):
    """Mirror restricted coordinates into x with x_i = x_(n-i+1)."""
    m = (n + 1) // 2
    if len(v) != m:
        raise DimensionMismatch('Restricted vector of length %r does not '
                'match n=%r.' % (len(v), n))
    return tuple(v[min(i, n - 1 - i)] for i in range(n))


def restrict_to_symmetric(form):
    """Substitute x_(n-i+1) := x_i into the form.

    Args:
        form (QuadraticForm): Form of size n.

    Returns:
        RestrictedForm: Exact m x m form, m = ceil(n/2), with the display
        scale (published constant for n = 4..7, otherwise the smallest power
        of two giving integer coefficients).
    """
    n = form.n
    m = (n + 1) // 2
    R = _zeros(m)
    for i in range(n):
        for j in range(n):
            R[min(i, n - 1 - i), min(j, n - 1 - j)] += form.Q[i, j]
    if n in PUBLISHED_SCALES:
        scale = PUBLISHED_SCALES[n]
    else:
        coefficients = [R[a, a] for a in range(m)]
        coefficients += [2 * R[a, b] for a in range(m)
                for b in range(a + 1, m)]
        scale = lcm(*[Fraction(c).denominator for c in coefficients])
    return RestrictedForm(n=n, m=m, R=R, scale=scale)


def restricted_polynomial(restricted):
    """Monomial coefficients of scale * v^T R v.

    Returns:
        dict: {(i, j): Fraction} for one based i <= j with nonzero
        coefficient; squares first, then cross terms, each in index order.
    """
    S = restricted.scaled
    m = restricted.m
    terms = {}
    for a in range(m):
        if S[a, a] != 0:
            terms[(a + 1, a + 1)] = Fraction(S[a, a])
    for a in range(m):
        for b in range(a + 1, m):
            if S[a, b] != 0:
                terms[(a + 1, b + 1)] = Fraction(2 * S[a, b])
    return terms


def format_polynomial(terms):
    """Render monomial coefficients as text, e.g. '-7x1^2 + 20x1x3'."""
    pieces = []
    for (i, j), coefficient in terms.items():
        monomial = 'x%d^2' % i if i == j else 'x%dx%d' % (i, j)
        magnitude = abs(coefficient)
        body = monomial if magnitude == 1 else '%s%s' % (
                format_fraction(magnitude), monomial)
        if not pieces:
            pieces.append(('-' if coefficient < 0 else '') + body)
        else:
            pieces.append(('- ' if coefficient < 0 else '+ ') + body)
    return ' '.join(pieces) if pieces else '0'


def format_square(square):
    """Render (c, (a, b)) as '-c(xa - xb)^2'."""
    coefficient, (a, b) = square
    return '-%s(x%d - x%d)^2' % (format_fraction(coefficient), a, b)


def format_fraction(value):
    value = Fraction(value)
    if value.denominator == 1:
        return '%d' % value.numerator
    return '%d/%d' % (value.numerator, value.denominator)


def perfect_square_check(restricted):
    """Detect scale * R == -c (x_a - x_b)^2.

    Args:
        restricted (RestrictedForm): Restricted form.

    Returns:
        tuple: (c, (a, b)) with c > 0 and one based a < b, or None.
    """
    return _negative_square(restricted.scaled,
            tuple(range(1, restricted.m + 1)))


def exact_inertia(matrix):
    """Count positive, zero and negative eigenvalues exactly.

    Symmetric Gaussian elimination (LDL^T) over the rationals. A nonzero
    diagonal entry is used as a 1x1 pivot; when the remaining diagonal is all
    zero a nonzero off-diagonal pair gives a 2x2 pivot, classified by the
    sign of its determinant.

    Args:
        matrix (array-like): Square symmetric matrix of rationals.

    Returns:
        ExactInertia: Eigenvalue sign counts (Sylvester's law of inertia).
    """
    A = [[Fraction(v) for v in row] for row in np.asarray(matrix)]
    positive = zero = negative = 0
    while A:
        size = len(A)
        pivot = next((i for i in range(size) if A[i][i] != 0), None)
        if pivot is not None:
            A = _permute(A, [pivot])
            d = A[0][0]
            if d > 0:
                positive += 1
            else:
                negative += 1
            A = [[A[i][j] - A[i][0] * A[0][j] / d for j in range(1, size)]
                    for i in range(1, size)]
            continue
        pair = next(((i, j) for i in range(size) for j in range(i + 1, size)
                if A[i][j] != 0), None)
        if pair is None:
            zero += size
            break
        A = _permute(A, list(pair))
        a, b, c = A[0][0], A[0][1], A[1][1]
        det = a * c - b * b
        if det < 0:
            positive += 1
            negative += 1
        elif a + c > 0:
            positive += 2
        else:
            negative += 2
        inverse = [[c / det, -b / det], [-b / det, a / det]]
        A = [[A[i][j] - sum(A[i][r] * inverse[r][s] * A[s][j]
                for r in range(2) for s in range(2))
                for j in range(2, size)] for i in range(2, size)]
    return ExactInertia(positive=positive, zero=zero, negative=negative)


def kernel_basis(matrix):
    """Exact null space basis from the reduced row echelon form.

    Pivots are taken leftmost first; one basis vector per free column, in
    column order, scaled to coprime integers with a positive leading entry.

    Args:
        matrix (array-like): Matrix of rationals.

    Returns:
        list: Tuples of Fraction with integer values.
    """
    rows = [[Fraction(v) for v in row] for row in np.asarray(matrix)]
    ncols = len(rows[0]) if rows else 0
    pivots = []
    r = 0
    for col in range(ncols):
        found = next((i for i in range(r, len(rows)) if rows[i][col] != 0),
                None)
        if found is None:
            continue
        rows[r], rows[found] = rows[found], rows[r]
        lead = rows[r][col]
        rows[r] = [v / lead for v in rows[r]]
        for i in range(len(rows)):
            if i != r and rows[i][col] != 0:
                factor = rows[i][col]
                rows[i] = [v - factor * w for v, w in zip(rows[i], rows[r])]
        pivots.append(col)
        r += 1
        if r == len(rows):
            break
    basis = []
    for free in [c for c in range(ncols) if c not in pivots]:
        vector = [Fraction(0)] * ncols
        vector[free] = Fraction(1)
        for row, col in enumerate(pivots):
            vector[col] = -rows[row][free]
        basis.append(_integer_vector(vector))
    return basis


def eliminate_variable(restricted, index):
    """Solve the scaled restricted polynomial for one variable.

    Args:
        restricted (RestrictedForm): Restricted form.
        index (int): One based variable index.

    Returns:
        Elimination: Leading coefficient, root center and discriminant.
    """
    S = restricted.scaled
    m = restricted.m
    k = index - 1
    if not 0 <= k < m:
        raise ValueError('Variable index %r outside 1..%r.' % (index, m))
    others = [j for j in range(m) if j != k]
    a = Fraction(S[k, k])
    if a == 0:
        raise ValueError('Variable x%r does not appear squared.' % index)
    s = np.array([Fraction(S[k, j]) for j in others], dtype=object)
    rest = S[np.ix_(others, others)]
    # b = 2 s.v', c = v'^T rest v', b^2 - 4ac = 4 v'^T (s s^T - a rest) v'
    discriminant = 4 * (np.outer(s, s) - a * rest)
    center = {j + 1: -Fraction(S[k, j]) / a for j in others
            if S[k, j] != 0}
    remaining = tuple(j + 1 for j in others)
    return Elimination(index=index, leading=a, center=center,
            remaining=remaining, discriminant=discriminant,
            inertia=exact_inertia(discriminant),
            square=_negative_square(discriminant, remaining))


def _negative_square(S, labels):
    """Return (c, (a, b)) when v^T S v == -c (v_a - v_b)^2, else None."""
    size = len(labels)
    support = [i for i in range(size) if S[i, i] != 0]
    if len(support) != 2:
        return None
    a, b = support
    c = -Fraction(S[a, a])
    if c <= 0 or S[b, b] != -c or S[a, b] != c:
        return None
    for i in range(size):
        for j in range(size):
            if {i, j} <= {a, b}:
                continue
            if S[i, j] != 0:
                return None
    return (c, (labels[a], labels[b]))


def _integer_vector(vector):
    scale = lcm(*[v.denominator for v in vector])
    ints = [int(v * scale) for v in vector]
    divisor = np.gcd.reduce([abs(v) for v in ints if v != 0])
    lead = next(v for v in ints if v != 0)
    sign = 1 if lead > 0 else -1
    return tuple(Fraction(sign * v // int(divisor)) for v in ints)


def _permute(A, front):
    order = list(front) + [i for i in range(len(A)) if i not in front]
    return [[A[i][j] for j in order] for i in order]


def _quad(M, values):
    n = len(values)
    return sum((values[i] * M[i, j] * values[j]
            for i in range(n) for j in range(n)), Fraction(0))


def _as_fractions(x):
    return tuple(Fraction(v) for v in x)


def _zeros(n):
    return np.array([[Fraction(0)] * n for _ in range(n)], dtype=object)
