#
# metrics.py
#
# cellfreetools developers
#
# Figures of merit of a downlink precoder: interference-plus-noise covariances, the weighted sum rate, MSE
# matrices of linear receivers, per-AP transmit powers and the penalized WMMSE objective that the solvers monitor.
#
# Conventions: channels enter as the aggregated user channels, an array of shape (U, N_r, B*N_t) (a
# ChannelRealization is accepted as well); precoders enter as a PrecoderStack. Rates are in nats.
#

from dataclasses import dataclass
import numpy as np
import cellfreetools.base.logger as logger
from cellfreetools.base.check import checkType, checkShape, checkPositive
from cellfreetools.base.utilities import isIntType, perEntity
from cellfreetools.math.math import dagger, hermitianPart, logDet, frob2, checkHermitian, id
from cellfreetools.wireless.model import LinearPower


class PrecoderStack:

    """
    Effective precoders of all users, F[u] of shape (B*N_t) x N_s. Rows b*N_t .. (b+1)*N_t - 1 of F[u] are the
    block F_{b,u} transmitted by AP b. The stored array is read-only; updates create new stacks.
    """

    def __init__(self, F, Nt):
        F = np.array(F,dtype=complex)
        if F.ndim != 3:
            logger.TBRaise('Precoder stack must have shape (U, B*N_t, N_s), got',F.shape)
        checkType('int',Nt=Nt)
        if Nt < 1 or F.shape[1] % Nt != 0:
            logger.TBRaise(f'{F.shape[1]} rows cannot be split into blocks of N_t = {Nt}')
        F.setflags(write=False)
        self._F  = F
        self._Nt = Nt

    def __repr__(self) -> str:
        return "PrecoderStack"

    @classmethod
    def zeros(cls, U, B, Nt, Ns):
        return cls(np.zeros((U,B*Nt,Ns),dtype=complex),Nt)

    @classmethod
    def fromAPBlocks(cls, blocks):
        """
        Build from an array of shape (B, U, N_t, N_s) holding F_{b,u}.
        """
        blocks = np.asarray(blocks)
        if blocks.ndim != 4:
            logger.TBRaise('Expected blocks of shape (B, U, N_t, N_s), got',blocks.shape)
        B, U, Nt, Ns = blocks.shape
        return cls(np.concatenate([ blocks[b] for b in range(B) ],axis=1),Nt)

    @property
    def F(self) -> np.ndarray:
        return self._F

    @property
    def U(self) -> int:
        return self._F.shape[0]

    @property
    def Nt(self) -> int:
        return self._Nt

    @property
    def B(self) -> int:
        return self._F.shape[1]//self._Nt

    @property
    def Ns(self) -> int:
        return self._F.shape[2]

    def _rows(self, b) -> slice:
        if not isIntType(b) or not (0 <= b < self.B):
            logger.TBRaise(f'AP index {b} out of range 0..{self.B-1}',frame=3,exception=IndexError(f'AP index {b}'))
        return slice(b*self._Nt,(b+1)*self._Nt)

    def block(self, b, u) -> np.ndarray:
        if not isIntType(u) or not (0 <= u < self.U):
            logger.TBRaise(f'user index {u} out of range 0..{self.U-1}',exception=IndexError(f'user index {u}'))
        return self._F[u,self._rows(b),:]

    def apBlocks(self, b) -> np.ndarray:
        """
        All blocks of AP b, shape (U, N_t, N_s).
        """
        return self._F[:,self._rows(b),:]

    def toAPBlocks(self) -> np.ndarray:
        """
        Shape (B, U, N_t, N_s).
        """
        return np.stack([ self.apBlocks(b) for b in range(self.B) ])

    def withAPBlocks(self, b, blocks):
        """
        New stack with the blocks of AP b replaced by blocks of shape (U, N_t, N_s).
        """
        checkShape(blocks,(self.U,self._Nt,self.Ns),'AP blocks')
        F = self._F.copy()
        F[:,self._rows(b),:] = blocks
        return PrecoderStack(F,self._Nt)

    def scaled(self, factors):
        """
        New stack with the blocks of AP b multiplied by factors[b].
        """
        factors = perEntity(factors,self.B,'scale factors')
        return PrecoderStack(self._F*np.repeat(factors,self._Nt)[None,:,None],self._Nt)


@dataclass(frozen=True)
class MseState:
    """
    Receive combiners G (U, N_r, N_s) and Hermitian positive-definite MSE weights W (U, N_s, N_s).
    """
    G : np.ndarray
    W : np.ndarray

    def __post_init__(self):
        for u in range(len(self.W)):
            checkHermitian(self.W[u],tol=1e-10)
            if np.min(np.linalg.eigvalsh(hermitianPart(self.W[u]))) <= 0:
                logger.TBRaise(f'MSE weight of user {u} is not positive definite')

    def __repr__(self) -> str:
        return "MseState"


def _aggregated(H) -> np.ndarray:
    if hasattr(H,'aggregated'):
        return H.aggregated()
    H = np.asarray(H,dtype=complex)
    if H.ndim != 3:
        logger.TBRaise('Expected aggregated channels of shape (U, N_r, B*N_t), got',H.shape,frame=3)
    return H


def _checkOperands(stack, Hagg):
    checkType(PrecoderStack,stack=stack)
    if Hagg.shape[0] != stack.U or Hagg.shape[2] != stack.F.shape[1]:
        logger.TBRaise(f'Dimension mismatch: channels {Hagg.shape} vs precoders {stack.F.shape}',frame=3,
                       exception=ValueError('dimension mismatch between channels and precoders'))


def received(stack, H) -> np.ndarray:
    """
    Effective channels R[u,j] = H_u F_j, shape (U, U, N_r, N_s).
    """
    Hagg = _aggregated(H)
    _checkOperands(stack,Hagg)
    return np.einsum('urt,jts->ujrs',Hagg,stack.F)


def _interference(R, u, sigma2) -> np.ndarray:
    U, Nr = R.shape[1], R.shape[2]
    J = sigma2*id(Nr)
    for j in range(U):
        if j != u:
            J = J + R[u,j] @ dagger(R[u,j])
    return hermitianPart(J)


def interferencePlusNoise(u, stack, H, sigma2) -> np.ndarray:
    """
    J_u = sum_{j != u} H_u F_j F_j^H H_u^H + sigma^2 I.
    """
    checkPositive(sigma2=sigma2)
    R = received(stack,H)
    if not isIntType(u) or not (0 <= u < stack.U):
        logger.TBRaise(f'user index {u} out of range',exception=IndexError(f'user index {u}'))
    return _interference(R,u,sigma2)


def userRates(stack, H, sigma2) -> np.ndarray:
    """
    log|I + J_u^{-1} H_u F_u F_u^H H_u^H| for every user, in nats.
    """
    checkPositive(sigma2=sigma2)
    R     = received(stack,H)
    rates = np.zeros(stack.U)
    for u in range(stack.U):
        J = _interference(R,u,sigma2)
        S = R[u,u] @ dagger(R[u,u])
        rates[u] = logDet(J + S) - logDet(J)
    return np.maximum(rates,0.)


def wsr(stack, H, sigma2, weights) -> float:
    """
    Weighted sum rate sum_u w_u log|I + J_u^{-1} H_u F_u F_u^H H_u^H| in nats.
    """
    weights = perEntity(weights,stack.U,'weights')
    return float(np.dot(weights,userRates(stack,H,sigma2)))


def mseMatrix(u, Gu, stack, H, sigma2) -> np.ndarray:
    """
    MSE matrix of user u with combiner G_u:
        (G^H H_u F_u - I)(G^H H_u F_u - I)^H + sum_{j != u} G^H H_u F_j F_j^H H_u^H G + sigma^2 G^H G
    """
    R  = received(stack,H)
    Gu = np.asarray(Gu,dtype=complex)
    checkShape(Gu,(R.shape[2],stack.Ns),'combiner')
    return _mse(R,u,Gu,sigma2)


def _mse(R, u, Gu, sigma2) -> np.ndarray:
    Ns = R.shape[3]
    Gh = dagger(Gu)
    D  = Gh @ R[u,u] - id(Ns)
    E  = D @ dagger(D) + sigma2*(Gh @ Gu)
    for j in range(R.shape[1]):
        if j != u:
            X = Gh @ R[u,j]
            E = E + X @ dagger(X)
    return hermitianPart(E)


def mseMatrices(G, stack, H, sigma2) -> np.ndarray:
    """
    All MSE matrices, shape (U, N_s, N_s).
    """
    R = received(stack,H)
    return np.stack([ _mse(R,u,G[u],sigma2) for u in range(stack.U) ])


def perAPPower(b, precoders) -> LinearPower:
    """
    Transmit power of AP b: sum_u ||F_{b,u}||_F^2. For a hybrid precoder the blocks are F_RF,b F_BB,b,u.
    """
    if hasattr(precoders,'product'):
        precoders = precoders.product()
    checkType(PrecoderStack,precoders=precoders)
    return LinearPower(frob2(precoders.apBlocks(b)))


def hybridAPPower(b, hybrid) -> LinearPower:
    """
    sum_u ||F_RF,b F_BB,b,u||_F^2 without forming the other APs' products.
    """
    blocks = np.einsum('tr,urs->uts',hybrid.analog[b],hybrid.digital[b])
    return LinearPower(frob2(blocks))


def apPowers(precoders) -> np.ndarray:
    """
    Transmit powers of all APs.
    """
    if hasattr(precoders,'product'):
        precoders = precoders.product()
    return np.array([ float(perAPPower(b,precoders)) for b in range(precoders.B) ])


def penaltyTerm(stack, hybrid, rho) -> float:
    """
    sum_b sum_u ||F_{b,u} - F_HB,b,u||^2 / (2 rho_b).
    """
    if hybrid is None:
        return 0.
    if hasattr(hybrid,'product'):
        hybrid = hybrid.product()
    checkType(PrecoderStack,hybrid=hybrid)
    if hybrid.F.shape != stack.F.shape:
        logger.TBRaise(f'Hybrid product {hybrid.F.shape} does not match precoders {stack.F.shape}')
    rho = perEntity(rho,stack.B,'rho')
    return float(sum( frob2(stack.apBlocks(b) - hybrid.apBlocks(b))/(2*rho[b]) for b in range(stack.B) ))


def wmmseObjective(G, W, stack, hybrid, H, sigma2, rho, weights) -> float:
    """
    Penalized WMMSE objective
        sum_u w_u [log|W_u| - Tr(W_u E_u)] - sum_b sum_u ||F_{b,u} - F_RF,b F_BB,b,u||^2 / (2 rho_b)
    where E_u is the MSE matrix of F with combiner G_u. hybrid=None drops the penalty (fully digital).
    """
    weights = perEntity(weights,stack.U,'weights')
    R       = received(stack,H)
    total   = 0.
    for u in range(stack.U):
        checkHermitian(W[u])
        E      = _mse(R,u,G[u],sigma2)
        total += weights[u]*( logDet(W[u]) - np.real(np.trace(W[u] @ E)) )
    return float(total - penaltyTerm(stack,hybrid,rho))
