"""Inner loops shared by the trainers and the region rasterizer.

Each kernel has a numba version (``*_nb``) and a numpy version (``*_np``).
The public name binds to one of them according to
:data:`gated_perceptron._accel.USE_NUMBA`. All kernels operate on an augmented
design matrix ``A`` whose last column is the constant bias input, and mutate
the parameter array in place.
"""

import math

import numpy as np
from scipy import ndimage

from ._accel import USE_NUMBA, njit


# -- sigmoid delta rule ------------------------------------------------------


# overflow is caught by the divergence guard, as on the numba path
@np.errstate(over="ignore", invalid="ignore")
def _delta_epoch_np(A, target, order, theta, lr):
    for i in order:
        a = A[i]
        s = float(a @ theta)
        if s >= 0.0:
            y = 1.0 / (1.0 + math.exp(-s))
        else:
            z = math.exp(s)
            y = z / (1.0 + z)
        theta += (lr * (target[i] - y) * y * (1.0 - y)) * a


@njit
def _delta_epoch_nb(A, target, order, theta, lr):
    m = A.shape[1]
    for k in range(order.shape[0]):
        i = order[k]
        s = 0.0
        for j in range(m):
            s += A[i, j] * theta[j]
        if s >= 0.0:
            y = 1.0 / (1.0 + math.exp(-s))
        else:
            z = math.exp(s)
            y = z / (1.0 + z)
        d = lr * (target[i] - y) * y * (1.0 - y)
        for j in range(m):
            theta[j] += d * A[i, j]


# -- region (raw-sum) perceptron rule ----------------------------------------


@np.errstate(over="ignore", invalid="ignore")
def _region_epoch_np(A, target, order, theta, lr):
    updates = 0
    for i in order:
        a = A[i]
        s = float(a @ theta)
        sign = 1.0 if s >= 0.0 else -1.0
        if sign != target[i]:
            theta += (lr * (target[i] - s)) * a
            updates += 1
    return updates


@njit
def _region_epoch_nb(A, target, order, theta, lr):
    m = A.shape[1]
    updates = 0
    for k in range(order.shape[0]):
        i = order[k]
        s = 0.0
        for j in range(m):
            s += A[i, j] * theta[j]
        sign = 1.0 if s >= 0.0 else -1.0
        if sign != target[i]:
            d = lr * (target[i] - s)
            for j in range(m):
                theta[j] += d * A[i, j]
            updates += 1
    return updates


# -- softmax one-hot rule ----------------------------------------------------


@np.errstate(over="ignore", invalid="ignore")
def _softmax_epoch_np(A, labels, order, W, lr):
    for i in order:
        a = A[i]
        z = W @ a
        p = np.exp(z - z.max())
        p /= p.sum()
        err = -p
        err[labels[i]] += 1.0
        W += lr * np.outer(err, a)


@njit
def _softmax_epoch_nb(A, labels, order, W, lr):
    C, m = W.shape
    z = np.empty(C)
    for k in range(order.shape[0]):
        i = order[k]
        zmax = -np.inf
        for c in range(C):
            acc = 0.0
            for j in range(m):
                acc += W[c, j] * A[i, j]
            z[c] = acc
            if acc > zmax:
                zmax = acc
        total = 0.0
        for c in range(C):
            z[c] = math.exp(z[c] - zmax)
            total += z[c]
        for c in range(C):
            err = (1.0 if c == labels[i] else 0.0) - z[c] / total
            d = lr * err
            for j in range(m):
                W[c, j] += d * A[i, j]


# -- 4-connected component labelling -----------------------------------------


def _label_components_np(codes):
    """Label 4-connected runs of equal codes; ids follow raster-scan first hit."""
    labels = np.zeros(codes.shape, dtype=np.int32)
    offset = 0
    for code in np.unique(codes):
        lab, n = ndimage.label(codes == code)
        mask = lab > 0
        labels[mask] = lab[mask] + offset
        offset += n
    flat = labels.ravel()
    _, first = np.unique(flat, return_index=True)
    remap = np.empty(offset + 1, dtype=np.int32)
    remap[flat[np.sort(first)]] = np.arange(first.size, dtype=np.int32)
    return remap[labels], offset


@njit
def _label_components_nb(codes):
    rows, cols = codes.shape
    labels = np.full((rows, cols), -1, dtype=np.int32)
    stack = np.empty(rows * cols, dtype=np.int64)
    count = 0
    for r0 in range(rows):
        for c0 in range(cols):
            if labels[r0, c0] >= 0:
                continue
            code = codes[r0, c0]
            labels[r0, c0] = count
            top = 0
            stack[top] = r0 * cols + c0
            top += 1
            while top > 0:
                top -= 1
                r = stack[top] // cols
                c = stack[top] % cols
                if r > 0 and labels[r - 1, c] < 0 and codes[r - 1, c] == code:
                    labels[r - 1, c] = count
                    stack[top] = (r - 1) * cols + c
                    top += 1
                if r + 1 < rows and labels[r + 1, c] < 0 and codes[r + 1, c] == code:
                    labels[r + 1, c] = count
                    stack[top] = (r + 1) * cols + c
                    top += 1
                if c > 0 and labels[r, c - 1] < 0 and codes[r, c - 1] == code:
                    labels[r, c - 1] = count
                    stack[top] = r * cols + c - 1
                    top += 1
                if c + 1 < cols and labels[r, c + 1] < 0 and codes[r, c + 1] == code:
                    labels[r, c + 1] = count
                    stack[top] = r * cols + c + 1
                    top += 1
            count += 1
    return labels, count


if USE_NUMBA:
    delta_epoch = _delta_epoch_nb
    region_epoch = _region_epoch_nb
    softmax_epoch = _softmax_epoch_nb
    label_components = _label_components_nb
else:
    delta_epoch = _delta_epoch_np
    region_epoch = _region_epoch_np
    softmax_epoch = _softmax_epoch_np
    label_components = _label_components_np
