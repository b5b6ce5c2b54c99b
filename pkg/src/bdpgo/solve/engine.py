"""Synchronous block-sweep engine for the distributed linear solves.

One sweep: every robot solves its own block of the normal equations against
the snapshot published at the end of the previous sweep, then all blocks are
published together. Reads never touch live state, so results do not depend on
how the per-robot solves would be scheduled.
"""

from __future__ import annotations

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla


class AnchoringError(RuntimeError):
    """A robot's local normal equations were singular despite anchoring."""


class BlockSweepSystem:
    """Block-structured SPD system H x = rhs split by robot.

    Parameters: block dimension ``d`` per pose, ``nrhs`` simultaneous right
    hand sides, per-pose ``assign`` (robot index), ``anchored`` mask (poses
    held fixed at their value in ``x``), per-pose diagonal blocks ``diag``
    (n, d, d), couplings ``(cu, cv, blocks)`` with the (cv, cu) mirror implied
    by symmetry, and the constant right-hand side (n, d, nrhs).
    """

    def __init__(self, k, d, nrhs, assign, anchored, diag, cu, cv, blocks, rhs_const):
        self.k = k
        self.d = d
        self.nrhs = nrhs
        n = len(assign)
        robot_of = np.where(anchored, -1, assign)
        slot = np.full(n, -1, dtype=np.int64)
        self.local_idx = []
        for b in range(k):
            loc = np.where(robot_of == b)[0]
            self.local_idx.append(loc)
            slot[loc] = np.arange(len(loc))

        ru = robot_of[cu] if len(cu) else np.empty(0, dtype=np.int64)
        rv = robot_of[cv] if len(cv) else np.empty(0, dtype=np.int64)

        self._solvers = []
        self._rhs_const = []
        self._out = []  # (rows, ext_cols, B): rhs[rows] -= B @ x[ext]
        self._in = []   # (rows, ext_cols, B): rhs[rows] -= B^T @ x[ext]
        eye = np.arange(d)
        for b in range(k):
            loc = self.local_idx[b]
            nb = len(loc)
            if nb == 0:
                self._solvers.append(None)
                self._rhs_const.append(None)
                self._out.append(None)
                self._in.append(None)
                continue
            rows_list, cols_list, data_list = [], [], []

            def add_blocks(r, c, B):
                rr = (r[:, None, None] * d + eye[None, :, None]).repeat(d, axis=2)
                cc = (c[:, None, None] * d + eye[None, None, :]).repeat(d, axis=1)
                rows_list.append(rr.ravel())
                cols_list.append(cc.ravel())
                data_list.append(np.ascontiguousarray(B).ravel())

            add_blocks(slot[loc], slot[loc], diag[loc])
            if len(cu):
                intra = (ru == b) & (rv == b)
                if np.any(intra):
                    si, sj = slot[cu[intra]], slot[cv[intra]]
                    add_blocks(si, sj, blocks[intra])
                    add_blocks(sj, si, np.swapaxes(blocks[intra], 1, 2))
                out = (ru == b) & (rv != b)
                inn = (rv == b) & (ru != b)
                self._out.append((slot[cu[out]], cv[out], blocks[out]) if np.any(out) else None)
                self._in.append((slot[cv[inn]], cu[inn], blocks[inn]) if np.any(inn) else None)
            else:
                self._out.append(None)
                self._in.append(None)

            H = sp.csc_matrix(
                (np.concatenate(data_list),
                 (np.concatenate(rows_list), np.concatenate(cols_list))),
                shape=(nb * d, nb * d),
            )
            try:
                self._solvers.append(spla.splu(H))
            except RuntimeError as exc:
                raise AnchoringError(
                    f"robot {b}: local normal equations singular ({exc})") from None
            self._rhs_const.append(rhs_const[loc].copy())

        self.active = [b for b in range(k) if len(self.local_idx[b]) > 0]

    def sweep(self, x):
        """One synchronous sweep; returns (x_new, relative change)."""
        x_new = x.copy()
        for b in self.active:
            loc = self.local_idx[b]
            rhs = self._rhs_const[b].copy()
            if self._out[b] is not None:
                rows, ext, B = self._out[b]
                np.add.at(rhs, rows, -np.einsum("eab,ebr->ear", B, x[ext]))
            if self._in[b] is not None:
                rows, ext, B = self._in[b]
                np.add.at(rhs, rows, -np.einsum("eba,ebr->ear", B, x[ext]))
            nb = len(loc)
            sol = self._solvers[b].solve(rhs.reshape(nb * self.d, self.nrhs))
            x_new[loc] = sol.reshape(nb, self.d, self.nrhs)
        num = 0.0
        den = 0.0
        for b in self.active:
            loc = self.local_idx[b]
            diff = x_new[loc] - x[loc]
            num += float(np.sum(diff * diff))
            den += float(np.sum(x_new[loc] * x_new[loc]))
        delta = np.sqrt(num) / max(np.sqrt(den), 1e-15)
        return x_new, delta

    def run(self, x, max_iters, stop_tol):
        """Sweep until the relative change drops below ``stop_tol``.

        A single active robot solves its block exactly, so one sweep suffices.
        Returns (x, sweeps used).
        """
        if not self.active:
            return x, 0
        if len(self.active) == 1:
            x, _ = self.sweep(x)
            return x, 1
        sweeps = 0
        for _ in range(max_iters):
            x, delta = self.sweep(x)
            sweeps += 1
            if delta < stop_tol:
                break
        return x, sweeps
