import logging
from typing import List, Tuple

import numpy as np
import scipy.sparse as sp
from scipy.sparse.linalg import splu

logger = logging.getLogger(__name__)

"""
LU factorization of a simplex basis with product-form updates between refactorizations.
"""


class SingularBasisError(RuntimeError):
    """Raised when a basis matrix cannot be factorized"""
    pass


""" splu settings tried in order when a factorization fails """
_FACTOR_ATTEMPTS = (dict(permc_spec='COLAMD'),
                    dict(permc_spec='COLAMD', diag_pivot_thresh=1.0),
                    dict(permc_spec='NATURAL', diag_pivot_thresh=1.0))


class BasisFactorization:
    """
    Holds LU factors of the basis matrix B_0 from the last refactorization plus a list of eta columns, so that
    B^-1 = E_k ... E_1 B_0^-1.
    """
    def __init__(self, basis_matrix):
        """
        :param basis_matrix: square sparse basis matrix
        """
        self.m = basis_matrix.shape[0]
        self.etas = []  # type: List[Tuple[int, np.ndarray]]
        self._lu = None
        if self.m == 0:
            return
        basis_matrix = sp.csc_matrix(basis_matrix)
        last_err = None
        for kwargs in _FACTOR_ATTEMPTS:
            try:
                lu = splu(basis_matrix, **kwargs)
            except RuntimeError as e:
                last_err = e
                logger.debug("basis factorization with %s failed: %s", kwargs, e)
                continue
            u_diag = lu.U.diagonal()
            if np.all(np.isfinite(u_diag)) and np.min(np.abs(u_diag)) > 1e-13 * max(1.0, np.max(np.abs(u_diag))):
                self._lu = lu
                return
            last_err = "near-zero pivot in U"
        raise SingularBasisError("singular basis matrix: {}".format(last_err))

    @property
    def num_updates(self) -> int:
        return len(self.etas)

    def ftran(self, a: np.ndarray) -> np.ndarray:
        """:return: B^-1 a"""
        if self.m == 0:
            return np.zeros(0)
        v = self._lu.solve(np.asarray(a, dtype=float))
        for r, eta in self.etas:
            vr = v[r]
            if vr != 0.0:
                v[r] = 0.0
                v += eta * vr
        return v

    def btran(self, c: np.ndarray) -> np.ndarray:
        """:return: B^-T c"""
        if self.m == 0:
            return np.zeros(0)
        z = np.array(c, dtype=float)
        for r, eta in reversed(self.etas):
            z[r] = np.dot(eta, z)
        return self._lu.solve(z, trans='T')

    def update(self, r: int, alpha: np.ndarray) -> None:
        """
        Records the replacement of the basic variable in position r, given alpha = B^-1 a_entering
        """
        eta = -alpha / alpha[r]
        eta[r] = 1.0 / alpha[r]
        self.etas.append((r, eta))
