"""Generator and H-kernel operator algebra.

All operators act on dense per-state value arrays and are built from pairwise
differences, so constants map to exact zeros. Psi_2 via the definition
0.5 * (L Psi_H(f) - B_{H'}(f, Lf)) is the default path; the three-sum
representation of Psi_{2,Upsilon} is kept as an independent cross-check.
"""

from __future__ import annotations

import numpy as np

from .chains import MarkovChain
from .errors import NonPositiveInput
from .kernels import SQUARE, UPSILON, ScalarKernel, upsilon, upsilon_prime


def _diff_matrix(f: np.ndarray) -> np.ndarray:
    f = np.asarray(f, dtype=float)
    return f[None, :] - f[:, None]


def generator_apply(chain: MarkovChain, f) -> np.ndarray:
    """(Lf)(x) = sum_y k(x, y) (f(y) - f(x))."""
    return (chain.rates * _diff_matrix(f)).sum(axis=1)


def psi_h(chain: MarkovChain, f, kernel: ScalarKernel = UPSILON) -> np.ndarray:
    """Psi_H(f)(x) = sum_y k(x, y) H(f(y) - f(x))."""
    return (chain.rates * kernel.value(_diff_matrix(f))).sum(axis=1)


def b_h(chain: MarkovChain, f, g, kernel: ScalarKernel) -> np.ndarray:
    """B_H(f, g)(x) = sum_y k(x, y) H(f(y) - f(x)) (g(y) - g(x))."""
    return (chain.rates * kernel.value(_diff_matrix(f)) * _diff_matrix(g)).sum(axis=1)


def psi2_h(chain: MarkovChain, f, kernel: ScalarKernel = UPSILON) -> np.ndarray:
    """Psi_{2,H}(f) = 0.5 * (L Psi_H(f) - B_{H'}(f, Lf))."""
    lf = generator_apply(chain, f)
    lpsi = generator_apply(chain, psi_h(chain, f, kernel))
    bprime = (chain.rates * kernel.derivative(_diff_matrix(f))
              * _diff_matrix(lf)).sum(axis=1)
    return 0.5 * (lpsi - bprime)


def gamma(chain: MarkovChain, f) -> np.ndarray:
    """Carre du champ, H(r) = r^2 / 2."""
    return psi_h(chain, f, SQUARE)


def gamma2(chain: MarkovChain, f) -> np.ndarray:
    return psi2_h(chain, f, SQUARE)


def psi_upsilon(chain: MarkovChain, f) -> np.ndarray:
    return psi_h(chain, f, UPSILON)


def psi2_upsilon(chain: MarkovChain, f) -> np.ndarray:
    return psi2_h(chain, f, UPSILON)


def psi2_upsilon_rep(chain: MarkovChain, f) -> np.ndarray:
    """Psi_{2,Upsilon} via the three-sum representation.

    With U = Upsilon(diffs), U' = Upsilon'(diffs), row sums
    s_U = Psi_Upsilon(f) and s_D = Lf, the three sums collapse to

        2 Psi_2(x) = (K s_U)(x) - (K*U') s_D (x)
                     + (K*U').sum(row)(x) * s_D(x) - M1(x) s_U(x).
    """
    K = chain.rates
    D = _diff_matrix(f)
    U = upsilon(D)
    Up = upsilon_prime(D)
    s_U = (K * U).sum(axis=1)
    s_D = (K * D).sum(axis=1)
    m1 = K.sum(axis=1)
    KUp = K * Up
    two_psi2 = K @ s_U - KUp @ s_D + KUp.sum(axis=1) * s_D - m1 * s_U
    return 0.5 * two_psi2


def chain_rule_residual(chain: MarkovChain, f) -> np.ndarray:
    """L(log f) - Lf / f + Psi_Upsilon(log f); identically zero in exact
    arithmetic for strictly positive f."""
    f = np.asarray(f, dtype=float)
    if np.any(f <= 0):
        raise NonPositiveInput("f must be strictly positive")
    logf = np.log(f)
    return (generator_apply(chain, logf)
            - generator_apply(chain, f) / f
            + psi_upsilon(chain, logf))
