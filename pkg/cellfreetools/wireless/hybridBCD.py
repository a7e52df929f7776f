#
# hybridBCD.py
#
# cellfreetools developers
#
# Hybrid analog/digital precoding for the cell-free downlink by block coordinate descent on the WMMSE reformulation
# of the weighted sum rate. One iteration updates
#
#   G   receive combiners (MMSE)
#   W   MSE weights (inverse MSE matrices)
#   F   auxiliary fully digital precoders, per AP, under the per-AP power budget and the quadratic penalty tying
#       them to the hybrid product; the power budget enters through a Lagrange multiplier found by bisection.
#       With network_solve the pass starts from the joint solution over all APs.
#   F_BB digital precoders (least squares)
#   F_RF analog precoders (element-wise phase alignment), alternated with F_BB up to analog_sweeps times
#
# and monitors the penalized objective until its change drops below the convergence tolerance.
#

import numpy as np
import cellfreetools.base.logger as logger
from cellfreetools.base.check import checkType, checkShape
from cellfreetools.base.initialize import subStream, STREAM_ANALOG
from cellfreetools.base.utilities import perEntity, timer
from cellfreetools.math.math import dagger, hermitianPart, hermitianEig, psdSqrt, pinv, hermitianSolve, invertPD, \
    frob2, id
from cellfreetools.math.optimize import bisectDecreasing, polishRoot, minimizeBounded
from cellfreetools.wireless.model import SystemConfig, SolverError, TraceRecord, IterationTrace, validateConfig
from cellfreetools.wireless.channel import ChannelRealization
from cellfreetools.wireless.metrics import PrecoderStack, received, mseMatrices, wmmseObjective, wsr, apPowers, \
    hybridAPPower


# Sign of the cross-AP term in the precoder subproblem. Only tests touch this.
ANTILDESIGN = 1.0

# Relative floor of the joint multipliers when no penalty keeps the system matrix definite.
NETWORK_FLOOR = 1e-9

# The F_BB/F_RF alternation stops once a pass lowers the fitting residual by less than this fraction.
ANALOG_RTOL = 1e-8


class HybridPrecoder:

    """
    Analog precoders F_RF,b of shape (N_t, N_RF) with unit-modulus entries and digital precoders F_BB,b,u of shape
    (N_RF, N_s). analog has shape (B, N_t, N_RF), digital has shape (B, U, N_RF, N_s). Both arrays are read-only.
    """

    def __init__(self, analog, digital):
        analog  = np.array(analog,dtype=complex)
        digital = np.array(digital,dtype=complex)
        if analog.ndim != 3 or digital.ndim != 4:
            logger.TBRaise(f'Bad hybrid shapes: analog {analog.shape}, digital {digital.shape}')
        if digital.shape[0] != analog.shape[0] or digital.shape[2] != analog.shape[2]:
            logger.TBRaise(f'Analog {analog.shape} and digital {digital.shape} do not chain')
        analog.setflags(write=False)
        digital.setflags(write=False)
        self.analog  = analog
        self.digital = digital

    def __repr__(self) -> str:
        return "HybridPrecoder"

    @property
    def B(self) -> int:
        return self.analog.shape[0]

    @property
    def Nt(self) -> int:
        return self.analog.shape[1]

    @property
    def NRF(self) -> int:
        return self.analog.shape[2]

    @property
    def U(self) -> int:
        return self.digital.shape[1]

    @property
    def Ns(self) -> int:
        return self.digital.shape[3]

    def product(self) -> PrecoderStack:
        """
        Effective precoders F_HB,b,u = F_RF,b F_BB,b,u.
        """
        return PrecoderStack.fromAPBlocks(np.einsum('btr,burs->buts',self.analog,self.digital))

    def maxModulusError(self) -> float:
        """
        max_{b,i,j} ||F_RF,b(i,j)| - 1|.
        """
        return float(np.max(np.abs(np.abs(self.analog) - 1)))


# --------------------------------------------------------------------------------------------------- SUBPROBLEM


class SubproblemData:

    """
    Everything the per-AP precoder subproblem needs for fixed G and W. With Sh_u the Hermitian square root of
    A_u = H_u^H G_u W_u G_u^H H_u and Ah_{b,u} its b-th row block,

        Q_{b,u}  = w_u Ah_{b,u} Ah_{b,u}^H
        At_{b,u} = Ah_{b,u} sum_{i != b} Ah_{i,u}^H F_{i,u}
        M_{b,u}  = C_{b,u} - w_u At_{b,u},     C_u = w_u H_u^H G_u W_u

    The block solver works with the coupled versions, which add the quadratic terms that F_u picks up from the
    other users' MSEs,

        Qc_{b,u} = Q_{b,u} + sum_{j != u} w_j A_j[b,b]
        Mc_{b,u} = M_{b,u} - sum_{j != u} w_j sum_{i != b} A_j[b,i] F_{i,u}

    unless interferenceAware is False, in which case Q and M are used as they are. The F-dependent pieces always
    refer to self.stack; use withStack to move on to fresher precoders.
    """

    def __init__(self, A, sqrtA, C, weights, stack, anchor=None, interferenceAware=True):
        self.A       = A
        self.sqrtA   = sqrtA
        self.C       = C
        self.weights = weights
        self.stack   = stack
        self.anchor  = anchor if anchor is not None else PrecoderStack.zeros(stack.U,stack.B,stack.Nt,stack.Ns)
        self.interferenceAware = interferenceAware
        self.T       = np.einsum('u,uij->ij',weights,A)
        self._cache  = {}

    def __repr__(self) -> str:
        return "SubproblemData"

    @property
    def B(self) -> int:
        return self.stack.B

    @property
    def U(self) -> int:
        return self.stack.U

    @property
    def Nt(self) -> int:
        return self.stack.Nt

    def withStack(self, stack):
        """
        Same G, W and anchor with updated precoders.
        """
        return SubproblemData(self.A,self.sqrtA,self.C,self.weights,stack,self.anchor,self.interferenceAware)

    def _rows(self, b) -> slice:
        return slice(b*self.Nt,(b+1)*self.Nt)

    def sqrtBlock(self, b, u) -> np.ndarray:
        return self.sqrtA[u][self._rows(b),:]

    def Q(self, b, u) -> np.ndarray:
        Ah = self.sqrtBlock(b,u)
        return hermitianPart(self.weights[u]*(Ah @ dagger(Ah)))

    def Atilde(self, b, u) -> np.ndarray:
        Ah    = self.sqrtBlock(b,u)
        cross = np.zeros((self.sqrtA.shape[1],self.stack.Ns),dtype=complex)
        for i in range(self.B):
            if i != b:
                cross += dagger(self.sqrtBlock(i,u)) @ self.stack.block(i,u)
        return ANTILDESIGN*(Ah @ cross)

    def M(self, b, u) -> np.ndarray:
        return self.C[u][self._rows(b),:] - self.weights[u]*self.Atilde(b,u)

    def coupledQ(self, b, u) -> np.ndarray:
        rows = self._rows(b)
        leak = self.T[rows,rows] - self.weights[u]*self.A[u][rows,rows]
        return hermitianPart(self.Q(b,u) + leak)

    def coupledM(self, b, u) -> np.ndarray:
        rows  = self._rows(b)
        other = (self.T - self.weights[u]*self.A[u])[rows,:]
        Fu    = self.stack.F[u]
        leak  = other @ Fu - other[:,rows] @ Fu[rows,:]
        return self.M(b,u) - leak

    def solverQ(self, b, u) -> np.ndarray:
        return self.coupledQ(b,u) if self.interferenceAware else self.Q(b,u)

    def solverM(self, b, u) -> np.ndarray:
        return self.coupledM(b,u) if self.interferenceAware else self.M(b,u)

    def spectralTerms(self, b, rho=None) -> tuple:
        """
        Eigendecompositions of the solver matrices of AP b and the projected right-hand sides
        P_{b,u}(n,n) = ||(U^H (M + F_HB/(2 rho)))[n,:]||^2 for every user. rho=None drops the anchor (fully digital).

        Returns:
            tuple: (list of EigenPair, list of right-hand sides, array (U, N_t) of P diagonals)
        """
        key = (b, None if rho is None else float(rho))
        if key not in self._cache:
            eigs, rhss, P = [], [], np.zeros((self.U,self.Nt))
            for u in range(self.U):
                eig = hermitianEig(self.solverQ(b,u))
                rhs = self.solverM(b,u)
                if rho is not None:
                    rhs = rhs + self.anchor.block(b,u)/(2*rho)
                proj = dagger(eig.vectors) @ rhs
                P[u] = np.sum(proj.real**2 + proj.imag**2,axis=1)
                eigs.append(eig)
                rhss.append(rhs)
            self._cache[key] = (eigs,rhss,P)
        return self._cache[key]


def _aggregatedChannel(H) -> np.ndarray:
    if isinstance(H,ChannelRealization):
        return H.aggregated()
    return np.asarray(H,dtype=complex)


def buildSubproblem(G, W, stack, H, weights, hybrid=None, interferenceAware=True) -> SubproblemData:
    """
    Assemble A_u, its Hermitian square root, C_u and the coupling matrix for the precoder subproblem.

    Args:
        G (np.ndarray): combiners (U, N_r, N_s)
        W (np.ndarray): MSE weights (U, N_s, N_s)
        stack (PrecoderStack): current auxiliary precoders
        H: aggregated channels (U, N_r, B*N_t) or a ChannelRealization
        weights: user weights
        hybrid (HybridPrecoder or PrecoderStack, optional): anchor of the penalty term. Defaults to zero.
        interferenceAware (bool, optional): False keeps the per-user matrices Q_{b,u} and M_{b,u} as solver
            matrices, i.e. the uncoupled subproblem in which F_u sees only its own MSE term. True adds the coupling
            to the other users' weighted MSEs. Defaults to True.

    Returns:
        SubproblemData
    """
    checkType(PrecoderStack,stack=stack)
    Hagg    = _aggregatedChannel(H)
    weights = perEntity(weights,stack.U,'weights')
    checkShape(G,(stack.U,Hagg.shape[1],stack.Ns),'G')
    checkShape(W,(stack.U,stack.Ns,stack.Ns),'W')
    HG    = dagger(Hagg) @ G                                   # (U, B*N_t, N_s)
    A     = np.stack([ hermitianPart(HG[u] @ W[u] @ dagger(HG[u])) for u in range(stack.U) ])
    sqrtA = np.stack([ psdSqrt(A[u]) for u in range(stack.U) ])
    C     = weights[:,None,None]*(HG @ W)
    anchor = hybrid.product() if hasattr(hybrid,'product') else hybrid
    return SubproblemData(A,sqrtA,C,weights,stack,anchor,interferenceAware)


def apPowerProfile(b, data, rho, lam) -> float:
    """
    Transmit power of AP b as a function of its multiplier,

        sum_u sum_n P_{b,u}(n,n) / (Sigma_{b,u}(n,n) + 1/(2 rho) + lam)^2

    which is strictly decreasing in lam.
    """
    if lam < 0:
        logger.TBRaise('Multiplier must be non-negative, got',lam)
    eigs, _, P = data.spectralTerms(b,rho)
    denom = np.stack([ eig.values for eig in eigs ]) + 1/(2*rho) + lam
    return float(np.sum(P/denom**2))


def _profile(lam, b, data, rho) -> float:
    return apPowerProfile(b,data,rho,lam)


def solveLambda(b, data, rho, Pmax, eps, returnSteps=False):
    """
    Optimal multiplier of the power constraint of AP b. If the unconstrained block solution already meets the budget
    the multiplier is 0. Otherwise bisection on (0, sqrt(sum P / Pmax)) runs until the bracket is narrower than eps;
    the root is then refined by Brent's method inside the final bracket.

    Returns:
        float, or (float, int) with the number of halvings if returnSteps
    """
    if apPowerProfile(b,data,rho,0.) <= Pmax:
        lam, steps = 0., 0
    else:
        _, _, P = data.spectralTerms(b,rho)
        ub = np.sqrt(np.sum(P)/Pmax)
        lam, history = bisectDecreasing(_profile,Pmax,0.,ub,eps,args=(b,data,rho),returnHistory=True)
        lo, hi = history[-1] if len(history) > 0 else (0.,ub)
        lam   = polishRoot(_profile,Pmax,lo,hi,args=(b,data,rho))
        steps = len(history)
    if returnSteps:
        return lam, steps
    return lam


def blockUpdate(b, data, rho, lam) -> np.ndarray:
    """
    F_{b,u} = (Q + (1/(2 rho) + lam) I)^{-1} (M + F_HB,b,u/(2 rho)) for all u, shape (U, N_t, N_s).
    """
    eigs, rhss, _ = data.spectralTerms(b,rho)
    blocks = []
    for eig, rhs in zip(eigs,rhss):
        scale = 1/(eig.values + 1/(2*rho) + lam)
        blocks.append( (eig.vectors*scale) @ (dagger(eig.vectors) @ rhs) )
    return np.stack(blocks)


def _penaltyDiagonal(data, rho) -> np.ndarray:
    """
    Diagonal of blkdiag(I/(2 rho_b)), length B*N_t. rho=None gives zeros.
    """
    if rho is None:
        return np.zeros(data.B*data.Nt)
    return np.repeat(1/(2*perEntity(rho,data.B,'rho')),data.Nt)


def _networkRHS(data, rho) -> np.ndarray:
    """
    R_u = C_u + F_HB,u/(2 rho_b) for all users side by side, shape (B*N_t, U*N_s).
    """
    R = data.C + _penaltyDiagonal(data,rho)[None,:,None]*data.anchor.F
    return np.concatenate(list(R),axis=1)


def subproblemObjective(data, stack, rho=None) -> float:
    """
    Precoder-dependent part of the negated penalized objective at the G and W of data,

        S(F) = sum_u Tr(F_u^H (T + D) F_u) - 2 Re Tr(R_u^H F_u),    D = blkdiag(I/(2 rho_b)),  R_u = C_u + D F_HB,u

    rho=None drops the penalty (fully digital). Lowering S by some amount raises the objective by the same amount.
    """
    checkType(PrecoderStack,stack=stack)
    diag = _penaltyDiagonal(data,rho)
    F    = np.concatenate(list(stack.F),axis=1)
    quad = np.real(np.vdot(F,data.T @ F)) + np.sum(diag[:,None]*(F.real**2 + F.imag**2))
    return float(quad - 2*np.real(np.vdot(_networkRHS(data,rho),F)))


def _networkDual(lams, T, diag, R, Pmax, Nt) -> tuple:
    X     = hermitianSolve(T + np.diag(diag + np.repeat(lams,Nt)),R)
    power = np.array([ frob2(X[b*Nt:(b+1)*Nt]) for b in range(len(lams)) ])
    return float(np.real(np.vdot(R,X)) + np.dot(lams,Pmax)), Pmax - power


def solveNetwork(data, rho, Pmax) -> tuple:
    """
    The precoder subproblem solved jointly over all APs,

        min_F S(F)   s.t.  ||F_b||_F^2 <= Pmax_b for every AP b,

    through its dual in the B multipliers. For fixed multipliers the minimizer is F = (T + D + diag(lam_b I))^{-1} R;
    the dual function is convex in lam with gradient Pmax_b - ||F_b||^2 and is minimized by L-BFGS-B on
    lam >= floor. The floor is 0 with a penalty and NETWORK_FLOOR Tr(T) without one (rho=None), where T is
    singular. APs the primal point leaves above budget are scaled back onto it.

    Returns:
        tuple: (PrecoderStack, multipliers)
    """
    B, Nt, U, Ns = data.B, data.Nt, data.U, data.stack.Ns
    Pmax  = perEntity(Pmax,B,'Pmax')
    diag  = _penaltyDiagonal(data,rho)
    R     = _networkRHS(data,rho)
    floor = 0. if rho is not None else NETWORK_FLOOR*float(np.real(np.trace(data.T)))
    if rho is None and not floor > 0:
        logger.debug('joint solve skipped: vanishing coupling matrix')
        return data.stack, np.zeros(B)
    start   = np.full(B,floor + np.sqrt(frob2(R)/np.min(Pmax)))
    lams, _ = minimizeBounded(lambda x: _networkDual(x,data.T,diag,R,Pmax,Nt),start,[(floor,None)]*B)
    lams    = np.maximum(lams,floor)
    X       = hermitianSolve(data.T + np.diag(diag + np.repeat(lams,Nt)),R)
    stack   = PrecoderStack(X.reshape(B*Nt,U,Ns).transpose(1,0,2),Nt)
    powers  = apPowers(stack)
    factors = np.ones(B)
    above   = powers > Pmax
    factors[above] = np.sqrt(Pmax[above]/powers[above])
    return stack.scaled(factors), lams


def networkStart(data, rho, Pmax) -> PrecoderStack:
    """
    Starting point of the Gauss-Seidel pass: the joint solution when it has a lower S than the current precoders,
    the current precoders otherwise.
    """
    joint, lams = solveNetwork(data,rho,Pmax)
    before = subproblemObjective(data,data.stack,rho)
    after  = subproblemObjective(data,joint,rho)
    logger.debug(f'joint multipliers {lams}, S {before:.10g} -> {after:.10g}')
    if after < before:
        return joint
    return data.stack


def updateAuxiliary(G, W, stack, hybrid, H, rho, weights, eps, Pmax, interferenceAware=True,
                    returnMultipliers=False, network=False):
    """
    One Gauss-Seidel pass over the APs in ascending order. AP b sees the blocks of APs < b that were already updated
    in this pass. With network=True (interference-aware only) the pass starts from networkStart.

    Returns:
        PrecoderStack, or (PrecoderStack, multipliers, halvings) if returnMultipliers
    """
    rho   = perEntity(rho,stack.B,'rho')
    Pmax  = perEntity(Pmax,stack.B,'Pmax')
    data  = buildSubproblem(G,W,stack,H,weights,hybrid=hybrid,interferenceAware=interferenceAware)
    if network and interferenceAware:
        stack = networkStart(data,rho,Pmax)
    lams  = np.zeros(stack.B)
    steps = np.zeros(stack.B,dtype=int)
    for b in range(stack.B):
        data = data.withStack(stack)
        lams[b], steps[b] = solveLambda(b,data,rho[b],Pmax[b],eps,returnSteps=True)
        stack = stack.withAPBlocks(b,blockUpdate(b,data,rho[b],lams[b]))
        logger.debug(f'AP {b}: lambda = {lams[b]:.6e} after {steps[b]} halvings')
    if returnMultipliers:
        return stack, lams, steps
    return stack


# ------------------------------------------------------------------------------------------- G, W, F_BB, F_RF


def updateCombiners(stack, H, sigma2) -> np.ndarray:
    """
    MMSE combiners G_u = (sum_j H_u F_j F_j^H H_u^H + sigma^2 I)^{-1} H_u F_u, shape (U, N_r, N_s).
    """
    R  = received(stack,_aggregatedChannel(H))
    Nr = R.shape[2]
    G  = np.zeros((stack.U,Nr,stack.Ns),dtype=complex)
    for u in range(stack.U):
        cov = sigma2*id(Nr)
        for j in range(stack.U):
            cov = cov + R[u,j] @ dagger(R[u,j])
        G[u] = hermitianSolve(cov,R[u,u])
    return G


def updateWeights(G, stack, H, sigma2) -> np.ndarray:
    """
    W_u = E_u^{-1}, shape (U, N_s, N_s).
    """
    E = mseMatrices(G,stack,_aggregatedChannel(H),sigma2)
    W = np.zeros_like(E)
    for u in range(stack.U):
        smallest = np.min(np.linalg.eigvalsh(E[u]))
        if not smallest > 0:
            logger.TBRaise(f'MSE matrix of user {u} is singular (smallest eigenvalue {smallest})',
                           exception=SolverError(f'singular MSE matrix of user {u}'))
        W[u] = invertPD(E[u])
    return W


def updateDigital(analog, stack) -> np.ndarray:
    """
    Least-squares digital precoders F_BB,b,u = F_RF,b^+ F_{b,u}, shape (B, U, N_RF, N_s).
    """
    analog = np.asarray(analog)
    return np.stack([ pinv(analog[b]) @ stack.apBlocks(b) for b in range(stack.B) ])


def analogResidual(Frf, digital, blocks) -> float:
    """
    ||Fbar_b - F_RF,b Fbar_BB,b||_F^2 for one AP, with blocks (U, N_t, N_s) and digital (U, N_RF, N_s).
    """
    Fbar  = np.concatenate(list(blocks),axis=1)
    FBBbar = np.concatenate(list(digital),axis=1)
    return frob2(Fbar - Frf @ FBBbar)


def analogColumnUpdate(Frf, j, FBBbar, Fbar) -> np.ndarray:
    """
    Optimal phases of column j of F_RF with all other columns fixed. Every row is its own problem: with Ft the
    residual Fbar - F_RF FBBbar with column j added back, entry (i,j) becomes exp(i angle(Ft[i,:] FBBbar[j,:]^H)).
    Rows with a vanishing coefficient keep their phase.
    """
    residual = Fbar - Frf @ FBBbar
    Ftilde   = residual + np.outer(Frf[:,j],FBBbar[j,:])
    coeff    = Ftilde @ np.conj(FBBbar[j,:])
    aligned  = np.exp(1j*np.angle(coeff))
    column   = np.where(np.abs(coeff) > 0, aligned, Frf[:,j])
    if not np.all(np.abs(coeff) > 0):
        logger.debug(f'column {j}: zero coefficient, phase kept')
    return column


def updateAnalog(analog, digital, stack) -> np.ndarray:
    """
    One sweep of element-wise phase alignment over all columns of every F_RF,b, shape (B, N_t, N_RF).
    """
    analog  = np.array(analog,dtype=complex)
    digital = np.asarray(digital)
    for b in range(stack.B):
        Fbar   = np.concatenate(list(stack.apBlocks(b)),axis=1)
        FBBbar = np.concatenate(list(digital[b]),axis=1)
        for j in range(analog.shape[2]):
            analog[b,:,j] = analogColumnUpdate(analog[b],j,FBBbar,Fbar)
    return analog


def updateHybrid(analog, stack, sweeps=1, rtol=ANALOG_RTOL) -> HybridPrecoder:
    """
    Alternate updateDigital and updateAnalog against the auxiliary precoders, at most sweeps times. Stops early once
    a pass lowers the total fitting residual sum_b ||Fbar_b - F_RF,b Fbar_BB,b||^2 by less than rtol of its value.
    The returned F_BB is fitted to the analog precoders the last pass started from.
    """
    checkType('int',sweeps=sweeps)
    previous = np.inf
    for sweep in range(sweeps):
        digital  = updateDigital(analog,stack)
        analog   = updateAnalog(analog,digital,stack)
        residual = sum( analogResidual(analog[b],digital[b],stack.apBlocks(b)) for b in range(stack.B) )
        if previous - residual <= rtol*residual:
            break
        previous = residual
    logger.debug(f'analog/digital alternation: {sweep+1} passes, residual {residual:.6e}')
    return HybridPrecoder(analog,digital)


# --------------------------------------------------------------------------------------------- INITIALIZATION


def initAuxiliary(cfg, channel) -> PrecoderStack:
    """
    F_{b,u} = sqrt(P_b) V_{b,u}[:, :N_s] / sqrt(sum_u ||V_{b,u}[:, :N_s]||^2) with V_{b,u} the right singular vectors
    of H_{b,u}, so every AP starts at full power.
    """
    checkType(SystemConfig,cfg=cfg)
    checkType(ChannelRealization,channel=channel)
    Pmax   = cfg.maxPower
    blocks = np.zeros((cfg.B,cfg.U,cfg.Nt,cfg.Ns),dtype=complex)
    for b in range(cfg.B):
        for u in range(cfg.U):
            _, _, Vh = np.linalg.svd(channel.H[b,u])
            blocks[b,u] = dagger(Vh)[:,:cfg.Ns]
        blocks[b] *= np.sqrt(Pmax[b]/frob2(blocks[b]))
    return PrecoderStack.fromAPBlocks(blocks)


def initAnalog(cfg, seed=None) -> np.ndarray:
    """
    Unit-modulus analog precoders with phases uniform on [-pi, pi], drawn from the stream (seed, STREAM_ANALOG, b).
    """
    checkType(SystemConfig,cfg=cfg)
    if seed is None:
        seed = cfg.seed
    analog = np.zeros((cfg.B,cfg.Nt,cfg.NRF),dtype=complex)
    for b in range(cfg.B):
        rng = subStream(seed,STREAM_ANALOG,b)
        analog[b] = np.exp(1j*rng.uniform(-np.pi,np.pi,size=(cfg.Nt,cfg.NRF)))
    return analog


def initDigital(cfg, analog, stack) -> np.ndarray:
    """
    Least-squares fit of the auxiliary precoders, then each AP normalized to its full budget.
    """
    digital = updateDigital(analog,stack)
    Pmax    = cfg.maxPower
    for b in range(cfg.B):
        power = frob2(np.einsum('tr,urs->uts',analog[b],digital[b]))
        if power > 0:
            digital[b] *= np.sqrt(Pmax[b]/power)
    return digital


def finalize(hybrid, Pmax) -> HybridPrecoder:
    """
    Scale the digital precoders of every AP above budget by sqrt(Pmax/power). Analog precoders are untouched.
    """
    checkType(HybridPrecoder,hybrid=hybrid)
    Pmax    = perEntity(Pmax,hybrid.B,'Pmax')
    digital = np.array(hybrid.digital)
    for b in range(hybrid.B):
        power = float(hybridAPPower(b,hybrid))
        if power > Pmax[b]:
            logger.debug(f'AP {b}: power {power:.6e} > {Pmax[b]:.6e}, rescaling')
            digital[b] *= np.sqrt(Pmax[b]/power)
    return HybridPrecoder(hybrid.analog,digital)


# ------------------------------------------------------------------------------------------------------ DRIVER


def complexityOrder(cfg, T, iterations=1) -> float:
    """
    Leading-order operation count N_iter (B U T N_t^3 + B (N_t N_RF U N_s + N_RF^3)), with T the mean number of
    bisection halvings.
    """
    checkType(SystemConfig,cfg=cfg)
    perIteration = cfg.B*cfg.U*T*cfg.Nt**3 + cfg.B*(cfg.Nt*cfg.NRF*cfg.U*cfg.Ns + cfg.NRF**3)
    return float(iterations*perIteration)


def _checkChannel(cfg, channel):
    checkType(ChannelRealization,channel=channel)
    if channel.H.shape != (cfg.B,cfg.U,cfg.Nr,cfg.Nt):
        logger.TBRaise(f'Channel shape {channel.H.shape} does not match configuration {(cfg.B,cfg.U,cfg.Nr,cfg.Nt)}',
                       frame=3,exception=ValueError('channel does not match configuration'))


def _record(iteration, objective, hybrid, Hagg, cfg, lams=(), steps=()) -> TraceRecord:
    if not np.isfinite(objective):
        logger.TBRaise(f'Non-finite objective {objective} at iteration {iteration}',frame=3,
                       exception=SolverError(f'non-finite objective at iteration {iteration}'))
    product = hybrid.product()
    return TraceRecord(iteration=iteration, objective=objective, wsr=wsr(product,Hagg,cfg.noise_power,cfg.weights),
                       apPower=tuple(apPowers(product)), multipliers=tuple(lams), bisectionSteps=tuple(int(s) for s in steps))


def runHybrid(cfg, channel, seed=None) -> tuple:
    """
    Hybrid precoder design by block coordinate descent. Iterates G, W, F, F_BB, F_RF until the penalized objective
    changes by less than cfg.convergence_tol or cfg.max_iters iterations are done, then rescales any AP above budget.

    Args:
        cfg (SystemConfig)
        channel (ChannelRealization)
        seed (int, optional): seed of the random analog start. Defaults to the channel's seed, then cfg.seed.

    Returns:
        tuple: (HybridPrecoder, PrecoderStack of auxiliary precoders, IterationTrace)
    """
    validateConfig(cfg)
    _checkChannel(cfg,channel)
    if seed is None:
        seed = channel.seed if channel.seed is not None else cfg.seed
    Hagg, sigma2, weights = channel.aggregated(), cfg.noise_power, cfg.weights
    rho, Pmax = cfg.rho, cfg.maxPower

    clock   = timer()
    stack   = initAuxiliary(cfg,channel)
    analog  = initAnalog(cfg,seed)
    hybrid  = HybridPrecoder(analog,initDigital(cfg,analog,stack))
    G       = updateCombiners(stack,Hagg,sigma2)
    W       = updateWeights(G,stack,Hagg,sigma2)
    current = wmmseObjective(G,W,stack,hybrid,Hagg,sigma2,rho,weights)
    records = [ _record(0,current,hybrid,Hagg,cfg) ]

    converged = False
    for n in range(1,cfg.max_iters+1):
        G = updateCombiners(stack,Hagg,sigma2)
        W = updateWeights(G,stack,Hagg,sigma2)
        stack, lams, steps = updateAuxiliary(G,W,stack,hybrid,Hagg,rho,weights,cfg.bisection_tol,Pmax,
                                             interferenceAware=cfg.interference_aware,returnMultipliers=True,
                                             network=cfg.network_solve)
        hybrid = updateHybrid(hybrid.analog,stack,cfg.analog_sweeps)
        previous, current = current, wmmseObjective(G,W,stack,hybrid,Hagg,sigma2,rho,weights)
        records.append(_record(n,current,hybrid,Hagg,cfg,lams,steps))
        logger.details(f'hybrid iteration {n}: objective = {current:.10g}, wsr = {records[-1].wsr:.10g}')
        if abs(current-previous) < cfg.convergence_tol:
            converged = True
            break

    hybrid = finalize(hybrid,Pmax)
    trace  = IterationTrace(solver='hybrid',records=tuple(records),converged=converged)
    logger.info(f'hybrid: {trace.iterations} iterations, converged = {converged}, '
                f'wsr = {wsr(hybrid.product(),Hagg,sigma2,weights):.6g} nats, {clock.lap():.3f} s')
    return hybrid, stack, trace
