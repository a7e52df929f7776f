#
# validation.py
#
# cellfreetools developers
#
# Numerical oracles for the identities the solvers rely on. Each check computes the same quantity along two
# independent routes and returns the relative discrepancy, so callers decide on the tolerance.
#

import numpy as np
import cellfreetools.base.logger as logger
from cellfreetools.base.utilities import perEntity
from cellfreetools.math.math import dagger, frob2, logDet, relDiff
from cellfreetools.math.num_deriv import diff_complex_grad
from cellfreetools.wireless.metrics import PrecoderStack, mseMatrices, wsr, penaltyTerm
from cellfreetools.wireless.hybridBCD import buildSubproblem, updateCombiners, updateWeights


def lagrangian(G, W, stack, hybrid, H, sigma2, rho, weights, multipliers, Pmax=None) -> float:
    """
    Lagrangian of the auxiliary precoder subproblem,

        sum_u w_u Tr(W_u E_u) + sum_b sum_u ||F_{b,u} - F_HB,b,u||^2/(2 rho_b) + sum_b lam_b (sum_u ||F_{b,u}||^2 - P_b)

    evaluated directly from the MSE matrices. hybrid=None drops the penalty, which gives the fully digital one.
    """
    weights     = perEntity(weights,stack.U,'weights')
    multipliers = perEntity(multipliers,stack.B,'multipliers')
    Pmax        = np.zeros(stack.B) if Pmax is None else perEntity(Pmax,stack.B,'Pmax')
    E     = mseMatrices(G,stack,H,sigma2)
    value = sum( weights[u]*np.real(np.trace(W[u] @ E[u])) for u in range(stack.U) )
    value += penaltyTerm(stack,hybrid,rho)
    for b in range(stack.B):
        value += multipliers[b]*(frob2(stack.apBlocks(b)) - Pmax[b])
    return float(value)


def _crossBlock(data, i, k) -> np.ndarray:
    """
    T[i,k] = sum_j w_j Ah_{i,j} Ah_{k,j}^H from the square-root blocks.
    """
    return sum( data.weights[j]*(data.sqrtBlock(i,j) @ dagger(data.sqrtBlock(k,j))) for j in range(data.U) )


def decomposedLagrangian(b, G, W, stack, hybrid, H, sigma2, rho, weights, multipliers, Pmax=None) -> float:
    """
    The same Lagrangian written as the quadratic form in the blocks of AP b plus everything those blocks do not
    touch:

        sum_u [ Tr(F_{b,u}^H (Qc_{b,u} + (1/(2 rho_b) + lam_b) I) F_{b,u}) - 2 Re Tr((Mc_{b,u} + F_HB,b,u/(2 rho_b))^H F_{b,u}) ]
        + const_b
    """
    weights     = perEntity(weights,stack.U,'weights')
    rho         = perEntity(rho,stack.B,'rho')
    multipliers = perEntity(multipliers,stack.B,'multipliers')
    Pmax        = np.zeros(stack.B) if Pmax is None else perEntity(Pmax,stack.B,'Pmax')
    anchor      = hybrid.product() if hasattr(hybrid,'product') else hybrid
    if anchor is None:
        anchor = PrecoderStack.zeros(stack.U,stack.B,stack.Nt,stack.Ns)
    data  = buildSubproblem(G,W,stack,H,weights,hybrid=anchor,interferenceAware=True)
    Nt    = stack.Nt
    shift = 1/(2*rho[b]) + multipliers[b]
    others = [ i for i in range(stack.B) if i != b ]

    value = 0.
    for u in range(stack.U):
        Fb  = stack.block(b,u)
        Q   = data.coupledQ(b,u) + shift*np.eye(Nt)
        rhs = data.coupledM(b,u) + anchor.block(b,u)/(2*rho[b])
        value += np.real(np.trace(dagger(Fb) @ Q @ Fb)) - 2*np.real(np.trace(dagger(rhs) @ Fb))

    # terms free of the AP-b blocks
    for u in range(stack.U):
        value += weights[u]*np.real(np.trace(W[u]) + sigma2*np.trace(W[u] @ dagger(G[u]) @ G[u]))
        for i in others:
            Fi = stack.block(i,u)
            for k in others:
                value += np.real(np.trace(dagger(Fi) @ _crossBlock(data,i,k) @ stack.block(k,u)))
            value -= 2*np.real(np.trace(dagger(data.C[u][i*Nt:(i+1)*Nt,:]) @ Fi))
            value += frob2(Fi - anchor.block(i,u))/(2*rho[i]) + multipliers[i]*frob2(Fi)
        value += frob2(anchor.block(b,u))/(2*rho[b])
    value -= float(np.dot(multipliers,Pmax))
    return float(value)


def checkBlockDecomposition(G, W, stack, hybrid, H, rho, weights, multipliers, sigma2=1.0, Pmax=None) -> float:
    """
    Largest relative difference, over the APs, between the directly evaluated Lagrangian and its block
    decomposition. Round-off level when the subproblem matrices are assembled correctly.
    """
    direct = lagrangian(G,W,stack,hybrid,H,sigma2,rho,weights,multipliers,Pmax)
    worst  = 0.
    for b in range(stack.B):
        split = decomposedLagrangian(b,G,W,stack,hybrid,H,sigma2,rho,weights,multipliers,Pmax)
        worst = max(worst,relDiff(direct,split))
    logger.debug(f'block decomposition discrepancy {worst:.3e}')
    return worst


def checkWsrWmmseEquivalence(stack, H, sigma2, weights) -> float:
    """
    Relative difference between the weighted sum rate and sum_u w_u [log|W_u| - Tr(W_u E_u) + N_s] at the MMSE
    combiners and weights.
    """
    weights = perEntity(weights,stack.U,'weights')
    G       = updateCombiners(stack,H,sigma2)
    W       = updateWeights(G,stack,H,sigma2)
    E       = mseMatrices(G,stack,H,sigma2)
    wmmse   = sum( weights[u]*(logDet(W[u]) - np.real(np.trace(W[u] @ E[u])) + stack.Ns) for u in range(stack.U) )
    return relDiff(wsr(stack,H,sigma2,weights),wmmse)


def finiteDiffGradient(objective, point, step=None) -> np.ndarray:
    """
    Central-difference gradient dF/dRe + 1j dF/dIm of a real function of a complex matrix.
    """
    return diff_complex_grad(point,objective,h=step)


def blockStationarity(objective, stack, b, u, step=None) -> float:
    """
    ||grad at F_{b,u}|| / ||grad at F_{b,u} = 0|| for a function of the whole precoder stack, varying only block
    (b,u). Zero at an unconstrained minimizer in that block.
    """
    rows = slice(b*stack.Nt,(b+1)*stack.Nt)

    def blockObjective(block):
        F = stack.F.copy()
        F[u,rows,:] = block
        return objective(PrecoderStack(F,stack.Nt))

    grad  = finiteDiffGradient(blockObjective,stack.block(b,u),step)
    grad0 = finiteDiffGradient(blockObjective,np.zeros_like(stack.block(b,u)),step)
    scale = np.linalg.norm(grad0)
    if scale == 0:
        return float(np.linalg.norm(grad))
    return float(np.linalg.norm(grad)/scale)
