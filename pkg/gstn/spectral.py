# stdlib imports
from dataclasses import dataclass
from fractions import Fraction
import logging

# third party imports
import numpy as np

# local imports
from gstn.config import get_config
from gstn.errors import DegenerateB2, NoConvergence, UnexpectedKernelDim

logger = logging.getLogger(__name__)

SUPERSCRIPTS = str.maketrans('0123456789', '⁰¹²³⁴⁵⁶⁷⁸⁹')


@dataclass(frozen=True, eq=False)
class Spectrum(object):
    """Eigenstructure of Q_n.

    Column 0 of P spans the kernel (the all-ones direction); the remaining
    columns follow in descending eigenvalue order.
    """
    n: int
    eigenvalues: np.ndarray
    P: np.ndarray
    inertia: tuple
    zero_tol: float
    sweeps: int = 0

    @property
    def positive(self):
        """Column indices of the positive eigenvalues."""
        return np.flatnonzero(self.eigenvalues > self._tol)

    @property
    def negative(self):
        return np.flatnonzero(self.eigenvalues < -self._tol)

    @property
    def _tol(self):
        return self.zero_tol * np.max(np.abs(self.eigenvalues))


@dataclass(frozen=True)
class SliceType(object):
    n: int
    p: int
    q: int

    @property
    def description(self):
        text = 'I × S%d × S%d' % (self.p - 1, self.q - 1)
        return text.translate(SUPERSCRIPTS)

    @property
    def ascii(self):
        return 'I x S%d x S%d' % (self.p - 1, self.q - 1)


@dataclass(frozen=True, eq=False)
class CollisionSpace(object):
    """Palindromic zeros of Psi and their image T in y coordinates.

    Attributes:
        n (int): Player count.
        x_basis (tuple): Exact integer vectors spanning Ind_n meet Inf_n^c.
        y_basis (numpy.ndarray): Rows b1 (= e1) and, when dim is 2, b2.
        dim (int): Dimension of the collision space.
    """
    n: int
    x_basis: tuple
    y_basis: np.ndarray
    dim: int

    @property
    def b1(self):
        return self.y_basis[0]

    @property
    def b2(self):
        return self.y_basis[1] if self.dim > 1 else None


@dataclass(frozen=True)
class BVectorMatch(object):
    global_sign: bool
    axis_sign: bool
    match: bool
    max_deviation: float
    degenerate: bool = False

    @property
    def agreement(self):
        """Strictest comparison the two vectors pass."""
        if self.global_sign:
            return 'global sign'
        if self.axis_sign:
            return 'per-column signs'
        if self.match:
            return 'eigenspace norms'
        return 'none'


def eigendecompose(form, zero_tol=None, config=None):
    """Diagonalize Q_n with cyclic Jacobi rotations.

    Args:
        form (QuadraticForm): Exact form, converted to floating point.
        zero_tol (float): Relative tolerance for zero eigenvalues. Default is
                the spectral zero_tol from the config.
        config (dict): Spectral config section.

    Returns:
        Spectrum: Canonically ordered and signed eigenpairs.

    Raises:
        NoConvergence: If the sweep cap is reached.
    """
    if config is None:
        config = get_config()['spectral']
    if zero_tol is None:
        zero_tol = config['zero_tol']
    A = form.as_float()
    n = A.shape[0]
    V = np.eye(n)
    threshold = config['off_tol'] * np.linalg.norm(A)
    negligible = threshold * 1e-3 / n
    for sweep in range(config['max_sweeps'] + 1):
        off = np.sqrt(2.0 * np.sum(np.triu(A, 1)**2))
        if off < threshold:
            break
        if sweep == config['max_sweeps']:
            raise NoConvergence('Jacobi did not converge in %r sweeps '
                    '(off-diagonal norm %r).' % (sweep, off))
        for p in range(n - 1):
            for q in range(p + 1, n):
                if abs(A[p, q]) < negligible:
                    continue
                theta = (A[q, q] - A[p, p]) / (2.0 * A[p, q])
                if theta == 0.0:
                    t = 1.0
                elif abs(theta) > 1e150:
                    # theta**2 would overflow
                    t = 0.5 / theta
                else:
                    t = np.sign(theta) / (abs(theta) +
                            np.sqrt(theta**2 + 1.0))
                c = 1.0 / np.sqrt(t**2 + 1.0)
                s = t * c
                _rotate(A, V, p, q, c, s)
    logger.debug('Jacobi for n=%d converged after %d sweeps', n, sweep)
    eigenvalues = np.diag(A).copy()
    tol = zero_tol * np.max(np.abs(eigenvalues))
    kernel = int(np.argmin(np.abs(eigenvalues)))
    rest = [i for i in np.argsort(-eigenvalues, kind='stable')
            if i != kernel]
    order = [kernel] + rest
    eigenvalues = eigenvalues[order]
    P = V[:, order]
    for col in range(n):
        lead = next(v for v in P[:, col] if abs(v) > 1e-10)
        if lead < 0:
            P[:, col] = -P[:, col]
    inertia = (int(np.sum(eigenvalues > tol)),
            int(np.sum(np.abs(eigenvalues) <= tol)),
            int(np.sum(eigenvalues < -tol)))
    return Spectrum(n=n, eigenvalues=eigenvalues, P=P, inertia=inertia,
            zero_tol=zero_tol, sweeps=sweep)


def orthogonality_residual(spectrum):
    P = spectrum.P
    return float(np.max(np.abs(P.T @ P - np.eye(spectrum.n))))


def diagonalization_residual(spectrum, form):
    D = spectrum.P.T @ form.as_float() @ spectrum.P
    return float(np.max(np.abs(D - np.diag(spectrum.eigenvalues))))


def slice_type(spectrum):
    """Homeomorphism type I x S^(p-1) x S^(q-1) of the slices.

    Raises:
        UnexpectedKernelDim: If the kernel is not one dimensional.
    """
    p, z, q = spectrum.inertia
    if z != 1:
        raise UnexpectedKernelDim('Expected a one dimensional kernel for '
                'n=%r, got %r.' % (spectrum.n, z))
    return SliceType(n=spectrum.n, p=p, q=q)


def collision_space(spectrum, kernel):
    """Map the exact collision basis into y coordinates.

    b1 is the unit y1 direction (the all-ones vector). For a two dimensional
    collision space, b2 is P^T applied to the alternating kernel vector
    (zero first coordinate) minus its projection onto the all-ones vector.

    Args:
        spectrum (Spectrum): Eigenstructure of Q_n.
        kernel (list): Exact lifted kernel vectors of the restricted form.

    Returns:
        CollisionSpace: Exact and y-space bases.

    Raises:
        UnexpectedKernelDim: If the kernel has more than two vectors.
    """
    n = spectrum.n
    dim = len(kernel)
    if dim not in (1, 2):
        raise UnexpectedKernelDim('Collision space of dimension %r for n=%r '
                'is not supported.' % (dim, n))
    b1 = np.zeros(n)
    b1[0] = 1.0
    rows = [b1]
    if dim == 2:
        u = _alternating_vector(kernel)
        mean = sum(u, Fraction(0)) / n
        centered = np.array([float(v - mean) for v in u])
        b2 = spectrum.P.T @ centered
        if abs(b2[0]) < 1e-10:
            b2[0] = 0.0
        rows.append(b2)
    return CollisionSpace(n=n, x_basis=tuple(tuple(v) for v in kernel),
            y_basis=np.array(rows), dim=dim)


def c_coefficient(spectrum, b2, t):
    """Multiple c with c*b2 on the slice of energy t.

    Args:
        spectrum (Spectrum): Eigenstructure.
        b2 (numpy.ndarray): y-space vector.
        t (float): Slice energy, t >= 0.

    Returns:
        float: +sqrt(t / sum_pos lambda_i b2_i^2); callers carry the sign.
    """
    if t < 0:
        raise ValueError('Slice energy must be nonnegative, got %r.' % t)
    pos = spectrum.positive
    denominator = float(np.sum(spectrum.eigenvalues[pos] * b2[pos]**2))
    if denominator <= 0:
        raise DegenerateB2('b2 has no positive energy (%r).' % denominator)
    if t == 0:
        return 0.0
    return float(np.sqrt(t / denominator))


def slice_energies(y, spectrum):
    """Positive and negative block energies of y (or rows of y)."""
    y = np.asarray(y, dtype=float)
    lam = spectrum.eigenvalues
    pos, neg = spectrum.positive, spectrum.negative
    positive = np.sum(lam[pos] * y[..., pos]**2, axis=-1)
    negative = np.sum(-lam[neg] * y[..., neg]**2, axis=-1)
    return positive, negative


def collision_points(collision, spectrum, t):
    """Points +c*b2 and -c*b2 where T meets the slice of energy t."""
    if collision.b2 is None:
        return []
    c = c_coefficient(spectrum, collision.b2, t)
    return [c * collision.b2, -c * collision.b2]


def compare_b_vector(spectrum, computed, published, tol=None,
        degenerate_tol=None):
    """Compare a computed b2 against published digits.

    Eigenvectors are only defined up to sign, so besides one global sign the
    comparison allows an independent sign per column. Columns whose
    eigenvalues coincide within degenerate_tol are compared through the norm
    of their block.

    Args:
        spectrum (Spectrum): Eigenstructure used for b2.
        computed (array-like): Computed vector.
        published (array-like): Published vector.
        tol (float): Componentwise tolerance.
        degenerate_tol (float): Eigenvalue coincidence tolerance.

    Returns:
        BVectorMatch: Match flags and the largest deviation.
    """
    config = get_config()['spectral']
    if tol is None:
        tol = config['b_vector_tol']
    if degenerate_tol is None:
        degenerate_tol = config['degenerate_tol']
    computed = np.asarray(computed, dtype=float)
    published = np.asarray(published, dtype=float)
    if computed.shape != published.shape:
        return BVectorMatch(False, False, False, float('inf'))
    global_dev = min(np.max(np.abs(computed - published)),
            np.max(np.abs(computed + published)))
    axis_dev = float(np.max(np.abs(np.abs(computed) - np.abs(published))))
    groups = _degenerate_groups(spectrum.eigenvalues, degenerate_tol)
    degenerate = any(len(g) > 1 for g in groups)
    if degenerate:
        block_dev = max(abs(np.linalg.norm(computed[g]) -
                np.linalg.norm(published[g])) for g in groups)
        match = block_dev <= tol
    else:
        match = axis_dev <= tol
    return BVectorMatch(global_sign=bool(global_dev <= tol),
            axis_sign=bool(axis_dev <= tol), match=bool(match),
            max_deviation=float(min(global_dev, axis_dev)),
            degenerate=degenerate)


def _degenerate_groups(eigenvalues, tol):
    groups = []
    for idx in np.argsort(eigenvalues):
        if groups and abs(eigenvalues[idx] - eigenvalues[groups[-1][-1]]) \
                <= tol:
            groups[-1].append(int(idx))
        else:
            groups.append([int(idx)])
    return groups


def _alternating_vector(kernel):
    first, second = kernel
    if first[0] == 0:
        return first
    if second[0] == 0:
        return second
    return tuple(second[0] * a - first[0] * b for a, b in zip(first, second))


def _rotate(A, V, p, q, c, s):
    Ap = A[:, p].copy()
    Aq = A[:, q].copy()
    A[:, p] = c * Ap - s * Aq
    A[:, q] = s * Ap + c * Aq
    Ap = A[p, :].copy()
    Aq = A[q, :].copy()
    A[p, :] = c * Ap - s * Aq
    A[q, :] = s * Ap + c * Aq
    Vp = V[:, p].copy()
    Vq = V[:, q].copy()
    V[:, p] = c * Vp - s * Vq
    V[:, q] = s * Vp + c * Vq
