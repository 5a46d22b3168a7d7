# model/layers.py
"""
Forward/backward kernels for the layer types the networks use.
Every forward returns (output, cache); every backward takes the upstream
gradient and the cache and returns the input gradient plus parameter grads.
Arrays are batched along axis 0.
"""
import numpy as np

from errors import NumericalError

LAYER_NORM_EPS = 1e-5


def check_finite(name, *arrays):
    for a in arrays:
        if not np.all(np.isfinite(a)):
            raise NumericalError(f"non-finite values in {name}")


def sigmoid(z):
    # split by sign so exp never overflows
    out = np.empty_like(z)
    pos = z >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-z[pos]))
    ez = np.exp(z[~pos])
    out[~pos] = ez / (1.0 + ez)
    return out


def softmax(z, axis=-1):
    shifted = z - np.max(z, axis=axis, keepdims=True)
    e = np.exp(shifted)
    return e / np.sum(e, axis=axis, keepdims=True)


def linear_forward(x, W, b):
    return x @ W + b, x


def linear_backward(dy, cache, W):
    x = cache
    return dy @ W.T, x.T @ dy, dy.sum(axis=0)


def relu_forward(x):
    mask = x > 0
    return x * mask, mask


def relu_backward(dy, cache):
    return dy * cache


def layer_norm_forward(x, gamma, beta):
    mu = x.mean(axis=1, keepdims=True)
    var = ((x - mu) ** 2).mean(axis=1, keepdims=True)
    inv_std = 1.0 / np.sqrt(var + LAYER_NORM_EPS)
    xhat = (x - mu) * inv_std
    return gamma * xhat + beta, (xhat, inv_std, gamma)


def layer_norm_backward(dy, cache):
    xhat, inv_std, gamma = cache
    D = xhat.shape[1]
    dgamma = (dy * xhat).sum(axis=0)
    dbeta = dy.sum(axis=0)
    dxhat = dy * gamma
    dx = (inv_std / D) * (
        D * dxhat
        - dxhat.sum(axis=1, keepdims=True)
        - xhat * (dxhat * xhat).sum(axis=1, keepdims=True)
    )
    return dx, dgamma, dbeta


def lstm_forward(x, h, c, W, b):
    """
    One LSTM cell step. W has shape (D + H, 4H) with gate blocks
    ordered input, forget, output, candidate.
    """
    H = h.shape[1]
    xh = np.concatenate([x, h], axis=1)
    z = xh @ W + b
    i = sigmoid(z[:, :H])
    f = sigmoid(z[:, H:2 * H])
    o = sigmoid(z[:, 2 * H:3 * H])
    g = np.tanh(z[:, 3 * H:])
    c_next = f * c + i * g
    tc = np.tanh(c_next)
    h_next = o * tc
    return h_next, c_next, (xh, c, i, f, o, g, tc)


def lstm_backward(dh_next, dc_next, cache, W):
    """Gradients of one cell step; returns (dx, dh_prev, dc_prev, dW, db)"""
    xh, c_prev, i, f, o, g, tc = cache
    D = xh.shape[1] - c_prev.shape[1]

    do = dh_next * tc
    dc = dc_next + dh_next * o * (1.0 - tc ** 2)
    di = dc * g
    dg = dc * i
    df = dc * c_prev
    dc_prev = dc * f

    dz = np.concatenate([
        di * i * (1.0 - i),
        df * f * (1.0 - f),
        do * o * (1.0 - o),
        dg * (1.0 - g ** 2),
    ], axis=1)
    dW = xh.T @ dz
    db = dz.sum(axis=0)
    dxh = dz @ W.T
    return dxh[:, :D], dxh[:, D:], dc_prev, dW, db
