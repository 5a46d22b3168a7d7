# model/gumbel.py
"""
Gumbel-softmax sampling over the binary action (0 = keep driving, 1 = yield)
"""
import numpy as np

from errors import ContractViolation
from model.layers import softmax


def sample_gumbel(rng, shape):
    """Standard Gumbel noise -log(-log U)"""
    u = rng.uniform(np.finfo(float).tiny, 1.0, size=shape)
    return -np.log(-np.log(u))


def gumbel_softmax_sample(logits, temperature, rng=None, hard=False, noise=None):
    """
    Returns (sample, soft). soft = softmax((logits + g) / temperature); with
    hard=True the sample is the one-hot argmax of soft and soft is the
    straight-through gradient path. Pass noise to freeze g.
    """
    if not temperature > 0:
        raise ContractViolation(f"Gumbel-softmax temperature must be positive, got {temperature}")
    logits = np.asarray(logits, dtype=float)
    if noise is None:
        if rng is None:
            raise ContractViolation("gumbel_softmax needs an rng or explicit noise")
        noise = sample_gumbel(rng, logits.shape)
    soft = softmax((logits + noise) / temperature)
    if not hard:
        return soft, soft
    one_hot = np.zeros_like(soft)
    np.put_along_axis(one_hot, np.argmax(soft, axis=-1)[..., None], 1.0, axis=-1)
    return one_hot, soft


def gumbel_softmax(logits, temperature, rng=None, hard=False, noise=None):
    return gumbel_softmax_sample(logits, temperature, rng, hard, noise)[0]


def gumbel_softmax_backward(dsample, soft, temperature):
    """Gradient w.r.t. the logits through the soft sample"""
    inner = np.sum(dsample * soft, axis=-1, keepdims=True)
    return soft * (dsample - inner) / temperature
