"""Global pose-graph objective, evaluated centrally as an oracle."""

import numpy as np

from .graph import MissingVertexError


def evaluate_cost(graph, estimate=None) -> float:
    """Sum of squared edge residuals.

    Per edge: ``w_t^2 * |p_j - p_i - R_i t|^2 + (w_r^2 / 2) * |R_j - R_i R|_F^2``.
    ``estimate`` maps keyframe ids to poses; defaults to the poses stored in
    the graph. Summation runs in edge-insertion order, so the result is

    reproducible for identical inputs.
    """
    if estimate is None:
        arrays = graph.csr()
        R, p = arrays.R, arrays.p
    else:
        arrays = graph.csr()
        R = np.empty((arrays.n, 3, 3))
        p = np.empty((arrays.n, 3))
        for kf, i in arrays.index.items():
            try:
                pose = estimate[kf]
            except KeyError:
                raise MissingVertexError(kf) from None
            R[i] = pose.rotation
            p[i] = pose.translation
    return evaluate_cost_arrays(arrays, R, p)


def evaluate_cost_arrays(arrays, R, p) -> float:
    """Array fast path shared with the solvers."""
    if arrays.m == 0:
        return 0.0
    Ri = R[arrays.eu]
    t_res = p[arrays.ev] - p[arrays.eu] - np.einsum("eij,ej->ei", Ri, arrays.rel_t)
    r_res = R[arrays.ev] - np.einsum("eij,ejk->eik", Ri, arrays.rel_R)
    per_edge = (arrays.w_t ** 2) * np.einsum("ei,ei->e", t_res, t_res) \
        + 0.5 * (arrays.w_r ** 2) * np.einsum("eij,eij->e", r_res, r_res)
    return float(np.sum(per_edge))
