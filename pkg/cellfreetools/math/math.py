#
# math.py
#
# cellfreetools developers
#
# Linear algebra kernels with explicit contracts: Hermitian eigendecomposition, PSD square root and Moore-Penrose
# pseudo-inverse, plus small matrix helpers. All matrix helpers act on the last two axes, so stacks of matrices
# (users, APs) go through them unchanged.
#

from dataclasses import dataclass
import numpy as np
import scipy as sp
import scipy.linalg
import cellfreetools.base.logger as logger
from cellfreetools.base.utilities import isArrayLike
from cellfreetools.base.check import checkType


class NotHermitianError(logger.CellFreeException): pass


HERMTOL  = 1e-8   # allowed ||A - A^H|| / ||A|| for inputs of the Hermitian kernels
PINVRTOL = 1e-10  # singular values below PINVRTOL*sigma_max count as zero
RANKRTOL = 1e-8   # eigenvalues below RANKRTOL*lambda_max count as zero in rank reports


# ----------------------------------------------------------------- MATRICES


def id(N) -> np.ndarray:
    """
    NxN complex identity matrix
    """
    checkType('int',N=N)
    return np.eye(N,dtype=complex)


def dagger(arr) -> np.ndarray:
    """
    Conjugate transpose of a matrix, or of every matrix in a stack.
    """
    arr = np.asarray(arr)
    return np.swapaxes(arr.conj(),-1,-2)


def checkSquare(mat):
    if np.ndim(mat) < 2 or np.shape(mat)[-1] != np.shape(mat)[-2]:
        logger.TBRaise('Expected square matrix. Got shape',np.shape(mat),frame=3)


def hermitianPart(mat) -> np.ndarray:
    """
    (X + X^H)/2. Hermitian products are passed through this before any inversion or factorization.
    """
    return 0.5*(mat + dagger(mat))


def hermitianResidual(mat) -> float:
    """
    ||A - A^H||_F / ||A||_F, or 0 for the zero matrix.
    """
    norm = np.linalg.norm(mat)
    if norm == 0:
        return 0.
    return np.linalg.norm(mat - dagger(mat))/norm


def isHermitian(mat,tol=HERMTOL) -> bool:
    checkSquare(mat)
    return hermitianResidual(mat) <= tol


def checkHermitian(mat,tol=HERMTOL):
    if not isHermitian(mat,tol):
        logger.TBRaise(f'Matrix is not Hermitian: residual {hermitianResidual(mat):.3e} > {tol:.1e}',
                       exception=NotHermitianError(f'non-Hermitian input, residual {hermitianResidual(mat):.3e}'))


def frob2(arr) -> float:
    """
    Squared Frobenius norm summed over everything in arr.
    """
    arr = np.asarray(arr)
    return float(np.sum(arr.real**2 + arr.imag**2))


def logDet(mat) -> float:
    """
    Logarithm of the determinant of a Hermitian positive-definite matrix.
    """
    checkSquare(mat)
    sign, ans = np.linalg.slogdet(hermitianPart(mat))
    if np.real(sign) <= 0:
        logger.TBRaise('log det of a matrix that is not positive definite')
    return float(ans)


def hermitianSolve(A, B) -> np.ndarray:
    """
    Solve A X = B for Hermitian positive-definite A.
    """
    checkSquare(A)
    return sp.linalg.solve(hermitianPart(A), B, assume_a='pos')


def invertPD(mat) -> np.ndarray:
    """
    Inverse of a Hermitian positive-definite matrix, re-symmetrized.
    """
    checkSquare(mat)
    return hermitianPart(sp.linalg.inv(hermitianPart(mat)))


# ----------------------------------------------------------------- FACTORIZATIONS


@dataclass(frozen=True)
class EigenPair:
    """
    Eigendecomposition A = V diag(values) V^H of a Hermitian matrix, eigenvalues in descending order.
    """
    values  : np.ndarray
    vectors : np.ndarray

    def __repr__(self) -> str:
        return "EigenPair"

    def reconstruct(self) -> np.ndarray:
        return (self.vectors*self.values) @ dagger(self.vectors)

    def rank(self,rtol=RANKRTOL) -> int:
        """
        Number of eigenvalues above rtol times the largest one.
        """
        if len(self.values)==0 or self.values[0] <= 0:
            return 0
        return int(np.sum(self.values > rtol*self.values[0]))


def hermitianEig(mat,tol=HERMTOL,clamp=True) -> EigenPair:
    """
    Eigendecomposition of a Hermitian (PSD) matrix through LAPACK's heevd.

    Args:
        mat (np.ndarray): Hermitian matrix; the symmetry residual must not exceed tol
        tol (float, optional): Hermiticity tolerance. Defaults to 1e-8.
        clamp (bool, optional): Set negative round-off eigenvalues to 0. Defaults to True.

    Returns:
        EigenPair: descending eigenvalues, unitary eigenvectors
    """
    checkSquare(mat)
    checkHermitian(mat,tol)
    values, vectors = sp.linalg.eigh(hermitianPart(mat))
    values  = values[::-1]
    vectors = vectors[:,::-1]
    if clamp:
        values = np.maximum(values,0.)
    return EigenPair(values=values, vectors=vectors)


def psdSqrt(mat,tol=HERMTOL) -> np.ndarray:
    """
    Hermitian PSD square root S = V diag(sqrt(lambda)) V^H, so that S S^H = S^2 = A.
    """
    eig = hermitianEig(mat,tol,clamp=True)
    return hermitianPart( (eig.vectors*np.sqrt(eig.values)) @ dagger(eig.vectors) )


def pinv(mat,rtol=PINVRTOL) -> np.ndarray:
    """
    Moore-Penrose pseudo-inverse through scipy.linalg.pinv. Singular values below rtol*sigma_max are treated as
    zero; the pseudo-inverse of the zero matrix is the zero matrix of transposed shape.

    Args:
        mat (np.ndarray): finite matrix
        rtol (float, optional): relative cutoff. Defaults to 1e-10.

    Returns:
        np.ndarray
    """
    mat = np.asarray(mat)
    if mat.ndim != 2:
        logger.TBRaise('Expected a matrix, got shape',mat.shape)
    if not np.all(np.isfinite(mat)):
        logger.TBRaise('pinv of a matrix with non-finite entries')
    m, n = mat.shape
    if min(m,n) == 0:
        return np.zeros((n,m),dtype=np.result_type(mat,complex))
    return sp.linalg.pinv(mat,atol=0.,rtol=rtol)


# ----------------------------------------------------------------- COMPARISONS


def rel_check(a, b, prec = 1e-6, abs_prec = 1e-14) -> bool:
    """
    Check whether a and b are equal within relative precision prec or absolute precision abs_prec. a and b can be
    array-like, float-like, or complex.
    """
    if isArrayLike(a):
        if np.shape(a) != np.shape(b):
            logger.TBRaise('a and b must have the same shape. Received a, b shapes =',np.shape(a),np.shape(b))
        return bool(np.allclose( a, b, rtol = prec, atol = abs_prec))
    return bool(np.isclose( a, b, rtol = prec, atol = abs_prec))


def relDiff(a, b) -> float:
    """
    |a - b| / max(|a|, |b|) for scalars, Frobenius norms for arrays; 0 when both vanish.
    """
    a = np.asarray(a)
    b = np.asarray(b)
    scale = max(np.linalg.norm(a), np.linalg.norm(b))
    if scale == 0:
        return 0.
    return float(np.linalg.norm(a-b)/scale)
