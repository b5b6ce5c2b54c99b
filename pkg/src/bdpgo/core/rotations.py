"""SO(3) helpers: hat/vee maps, exp/log, quaternion conversion, projection."""

import numpy as np

# Tolerance for the orthonormality / determinant checks on rotations.
SO3_TOL = 1e-9


def hat(v):
    """Map a 3-vector to its skew-symmetric matrix."""
    x, y, z = v
    return np.array([[0.0, -z, y], [z, 0.0, -x], [-y, x, 0.0]])


def vee(m):
    """Inverse of :func:`hat` (the matrix is assumed skew-symmetric)."""
    return np.array([m[2, 1], m[0, 2], m[1, 0]])


def so3_exp(omega):
    """Rodrigues formula: rotation vector -> rotation matrix."""
    theta = np.linalg.norm(omega)
    K = hat(omega)
    if theta < 1e-12:
        # second-order series is exact to machine precision here
        return np.eye(3) + K + 0.5 * (K @ K)
    a = np.sin(theta) / theta
    b = (1.0 - np.cos(theta)) / (theta * theta)
    return np.eye(3) + a * K + b * (K @ K)


def so3_exp_many(omegas):
    """Vectorized :func:`so3_exp` for an (n, 3) array."""
    omegas = np.asarray(omegas, dtype=float)
    n = omegas.shape[0]
    theta = np.linalg.norm(omegas, axis=1)
    K = np.zeros((n, 3, 3))
    K[:, 0, 1] = -omegas[:, 2]
    K[:, 0, 2] = omegas[:, 1]
    K[:, 1, 0] = omegas[:, 2]
    K[:, 1, 2] = -omegas[:, 0]
    K[:, 2, 0] = -omegas[:, 1]
    K[:, 2, 1] = omegas[:, 0]
    KK = K @ K
    small = theta < 1e-12
    safe = np.where(small, 1.0, theta)
    a = np.where(small, 1.0, np.sin(safe) / safe)
    b = np.where(small, 0.5, (1.0 - np.cos(safe)) / (safe * safe))
    return np.eye(3)[None, :, :] + a[:, None, None] * K + b[:, None, None] * KK


def so3_log(R):
    """Rotation matrix -> rotation vector (principal branch)."""
    cos_theta = np.clip((np.trace(R) - 1.0) / 2.0, -1.0, 1.0)
    theta = np.arccos(cos_theta)
    if theta < 1e-12:
        return vee(R - R.T) / 2.0
    if np.pi - theta < 1e-6:
        # near pi: use the symmetric part to recover the axis
        A = (R + np.eye(3)) / 2.0
        axis = np.sqrt(np.maximum(np.diag(A), 0.0))
        # fix signs from the off-diagonal terms
        if A[0, 1] < 0:
            axis[1] = -axis[1]
        if A[0, 2] < 0:
            axis[2] = -axis[2]
        norm = np.linalg.norm(axis)
        if norm > 0:
            axis = axis / norm
        return theta * axis
    return theta / (2.0 * np.sin(theta)) * vee(R - R.T)


def rot_z(theta):
    """Rotation about the z-axis (used to lift planar poses)."""
    c, s = np.cos(theta), np.sin(theta)
    return np.array([[c, -s, 0.0], [s, c, 0.0], [0.0, 0.0, 1.0]])


def quat_to_matrix(qx, qy, qz, qw):
    """Normalized quaternion -> rotation matrix (x, y, z, w order)."""
    n = qx * qx + qy * qy + qz * qz + qw * qw
    s = 2.0 / n
    wx, wy, wz = s * qw * qx, s * qw * qy, s * qw * qz
    xx, xy, xz = s * qx * qx, s * qx * qy, s * qx * qz
    yy, yz, zz = s * qy * qy, s * qy * qz, s * qz * qz
    return np.array(
        [
            [1.0 - (yy + zz), xy - wz, xz + wy],
            [xy + wz, 1.0 - (xx + zz), yz - wx],
            [xz - wy, yz + wx, 1.0 - (xx + yy)],
        ]
    )


def matrix_to_quat(R):
    """Rotation matrix -> quaternion (qx, qy, qz, qw), qw >= 0."""
    t = np.trace(R)
    if t > 0:
        s = np.sqrt(t + 1.0) * 2.0
        qw = 0.25 * s
        qx = (R[2, 1] - R[1, 2]) / s
        qy = (R[0, 2] - R[2, 0]) / s
        qz = (R[1, 0] - R[0, 1]) / s
    elif R[0, 0] > R[1, 1] and R[0, 0] > R[2, 2]:
        s = np.sqrt(1.0 + R[0, 0] - R[1, 1] - R[2, 2]) * 2.0
        qw = (R[2, 1] - R[1, 2]) / s
        qx = 0.25 * s
        qy = (R[0, 1] + R[1, 0]) / s
        qz = (R[0, 2] + R[2, 0]) / s
    elif R[1, 1] > R[2, 2]:
        s = np.sqrt(1.0 + R[1, 1] - R[0, 0] - R[2, 2]) * 2.0
        qw = (R[0, 2] - R[2, 0]) / s
        qx = (R[0, 1] + R[1, 0]) / s
        qy = 0.25 * s
        qz = (R[1, 2] + R[2, 1]) / s
    else:
        s = np.sqrt(1.0 + R[2, 2] - R[0, 0] - R[1, 1]) * 2.0
        qw = (R[1, 0] - R[0, 1]) / s
        qx = (R[0, 2] + R[2, 0]) / s
        qy = (R[1, 2] + R[2, 1]) / s
        qz = 0.25 * s
    q = np.array([qx, qy, qz, qw])
    if q[3] < 0:
        q = -q
    return q / np.linalg.norm(q)


class DegenerateMatrixError(ValueError):
    """Raised when a matrix is too close to rank-deficient to project."""


def project_to_so3(m):
    """Nearest rotation in Frobenius norm (SVD with determinant fix)."""
    m = np.asarray(m, dtype=float)
    U, sigma, Vt = np.linalg.svd(m)
    if sigma[-1] < 1e-12:
        raise DegenerateMatrixError(f"matrix is rank deficient (sigma_min={sigma[-1]:.3e})")
    d = np.sign(np.linalg.det(U @ Vt))
    R = U @ np.diag([1.0, 1.0, d]) @ Vt
    return R


def project_to_so3_many(ms):
    """Vectorized :func:`project_to_so3` for an (n, 3, 3) array."""
    U, sigma, Vt = np.linalg.svd(ms)
    if np.any(sigma[:, -1] < 1e-12):
        raise DegenerateMatrixError("rank-deficient block in batch projection")
    d = np.sign(np.linalg.det(U @ Vt))
    D = np.zeros_like(ms)
    D[:, 0, 0] = 1.0
    D[:, 1, 1] = 1.0
    D[:, 2, 2] = d
    return U @ D @ Vt


def is_rotation(R, tol=SO3_TOL):
    R = np.asarray(R)
    if R.shape != (3, 3):
        return False
    ortho = np.linalg.norm(R.T @ R - np.eye(3))
    return ortho <= tol and abs(np.linalg.det(R) - 1.0) <= tol
