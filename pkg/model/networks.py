# model/networks.py
"""
Policy (actor) and value (critic) networks with hand-written backprop.

Policy:  LN -> 42x64 -> ReLU -> LN -> 64x128 -> ReLU -> LSTM(128) -> 128x2
Value:   [state (7M) | action (M)] -> 8Mx256 -> ReLU -> 256x256 -> ReLU
         -> 256x512 -> ReLU -> 512x1
"""
import numpy as np

from errors import BackwardStateError, ContractViolation
from features.observation import N_FEATURES, OBS_SIZE
from model.layers import (
    check_finite,
    layer_norm_backward,
    layer_norm_forward,
    linear_backward,
    linear_forward,
    lstm_backward,
    lstm_forward,
    relu_backward,
    relu_forward,
    softmax,
)

HIDDEN_1 = 64
HIDDEN_2 = 128
LSTM_SIZE = 128
N_ACTIONS = 2
VALUE_HIDDEN = (256, 256, 512)
FORGET_BIAS = 1.0


def _uniform_fan_in(rng, fan_in, shape):
    bound = 1.0 / np.sqrt(fan_in)
    return rng.uniform(-bound, bound, size=shape)


class Network:
    """Parameter container shared by both networks"""

    def __init__(self):
        self.params = {}
        self._cache = None

    def copy(self):
        clone = self.__class__.__new__(self.__class__)
        clone.__dict__.update(self.__dict__)
        clone.params = {k: v.copy() for k, v in self.params.items()}
        clone._cache = None
        return clone

    def zero_(self):
        for v in self.params.values():
            v[...] = 0.0
        return self

    def load_params(self, params):
        for k, v in params.items():
            if k not in self.params or self.params[k].shape != np.shape(v):
                raise ContractViolation(f"parameter {k} does not fit {type(self).__name__}")
            self.params[k][...] = v

    def n_params(self):
        return sum(v.size for v in self.params.values())

    def _take_cache(self):
        if self._cache is None:
            raise BackwardStateError(f"{type(self).__name__}.backward called without a recorded forward")
        cache, self._cache = self._cache, None
        return cache


class PolicyNetwork(Network):
    """Actor pi(a | o; theta) with a recurrent LSTM head"""

    def __init__(self, rng=None):
        super().__init__()
        rng = rng if rng is not None else np.random.default_rng()
        p = self.params
        p["ln1_gamma"] = np.ones(OBS_SIZE)
        p["ln1_beta"] = np.zeros(OBS_SIZE)
        p["W1"] = _uniform_fan_in(rng, OBS_SIZE, (OBS_SIZE, HIDDEN_1))
        p["b1"] = _uniform_fan_in(rng, OBS_SIZE, HIDDEN_1)
        p["ln2_gamma"] = np.ones(HIDDEN_1)
        p["ln2_beta"] = np.zeros(HIDDEN_1)
        p["W2"] = _uniform_fan_in(rng, HIDDEN_1, (HIDDEN_1, HIDDEN_2))
        p["b2"] = _uniform_fan_in(rng, HIDDEN_1, HIDDEN_2)
        p["W_lstm"] = _uniform_fan_in(rng, LSTM_SIZE, (HIDDEN_2 + LSTM_SIZE, 4 * LSTM_SIZE))
        p["b_lstm"] = np.zeros(4 * LSTM_SIZE)
        p["b_lstm"][LSTM_SIZE:2 * LSTM_SIZE] = FORGET_BIAS
        p["W3"] = _uniform_fan_in(rng, LSTM_SIZE, (LSTM_SIZE, N_ACTIONS))
        p["b3"] = _uniform_fan_in(rng, LSTM_SIZE, N_ACTIONS)

    @staticmethod
    def initial_carry(batch=1):
        return np.zeros((batch, LSTM_SIZE)), np.zeros((batch, LSTM_SIZE))

    def _step(self, obs, h, c):
        p = self.params
        x, ln1 = layer_norm_forward(obs, p["ln1_gamma"], p["ln1_beta"])
        x, fc1 = linear_forward(x, p["W1"], p["b1"])
        x, r1 = relu_forward(x)
        x, ln2 = layer_norm_forward(x, p["ln2_gamma"], p["ln2_beta"])
        x, fc2 = linear_forward(x, p["W2"], p["b2"])
        x, r2 = relu_forward(x)
        h, c, lstm = lstm_forward(x, h, c, p["W_lstm"], p["b_lstm"])
        logits, fc3 = linear_forward(h, p["W3"], p["b3"])
        return logits, h, c, (ln1, fc1, r1, ln2, fc2, r2, lstm, fc3)

    def forward(self, obs, carry, record=True):
        """
        One step. obs has shape (B, 42) or (42,); carry is (h, c) of shape (B, 128).
        Returns (logits, probs, carry').
        """
        obs = np.asarray(obs, dtype=float)
        if obs.ndim == 1:
            obs = obs[None, :]
        logits, probs, carry_out = self.unroll(obs[None], carry, record=record)
        return logits[0], probs[0], carry_out

    def unroll(self, obs_seq, carry, record=True):
        """
        T steps over obs_seq of shape (T, B, 42). Returns logits and probs of
        shape (T, B, 2) and the final carry.
        """
        obs_seq = np.asarray(obs_seq, dtype=float)
        if obs_seq.ndim != 3 or obs_seq.shape[2] != OBS_SIZE:
            raise ContractViolation(f"policy input must have shape (T, B, {OBS_SIZE}), got {obs_seq.shape}")
        h, c = carry
        B = obs_seq.shape[1]
        if np.shape(h) != (B, LSTM_SIZE) or np.shape(c) != (B, LSTM_SIZE):
            raise ContractViolation(f"recurrent state must have shape ({B}, {LSTM_SIZE})")
        check_finite("policy input", obs_seq, h, c)

        logits_seq, caches = [], []
        for obs in obs_seq:
            logits, h, c, cache = self._step(obs, h, c)
            logits_seq.append(logits)
            caches.append(cache)
        logits = np.stack(logits_seq)
        check_finite("policy logits", logits)
        if record:
            self._cache = caches
        return logits, softmax(logits), (h, c)

    def backward(self, dlogits, dcarry=None):
        """
        Gradients of the recorded unroll. dlogits has the shape of the logits
        returned by the recorded call; dcarry optionally seeds the final (h, c).
        Returns (grads, (dh0, dc0)).
        """
        caches = self._take_cache()
        dlogits = np.asarray(dlogits, dtype=float)
        if dlogits.ndim == 2:
            dlogits = dlogits[None]
        if dlogits.shape[0] != len(caches):
            raise ContractViolation("upstream gradient does not match the recorded unroll length")

        p = self.params
        grads = {k: np.zeros_like(v) for k, v in p.items()}
        B = dlogits.shape[1]
        dh, dc = dcarry if dcarry is not None else (np.zeros((B, LSTM_SIZE)), np.zeros((B, LSTM_SIZE)))

        for t in reversed(range(len(caches))):
            ln1, fc1, r1, ln2, fc2, r2, lstm, fc3 = caches[t]
            dh_out, dW, db = linear_backward(dlogits[t], fc3, p["W3"])
            grads["W3"] += dW
            grads["b3"] += db
            dx, dh, dc, dW, db = lstm_backward(dh + dh_out, dc, lstm, p["W_lstm"])
            grads["W_lstm"] += dW
            grads["b_lstm"] += db
            dx = relu_backward(dx, r2)
            dx, dW, db = linear_backward(dx, fc2, p["W2"])
            grads["W2"] += dW
            grads["b2"] += db
            dx, dg, dbeta = layer_norm_backward(dx, ln2)
            grads["ln2_gamma"] += dg
            grads["ln2_beta"] += dbeta
            dx = relu_backward(dx, r1)
            dx, dW, db = linear_backward(dx, fc1, p["W1"])
            grads["W1"] += dW
            grads["b1"] += db
            _, dg, dbeta = layer_norm_backward(dx, ln1)
            grads["ln1_gamma"] += dg
            grads["ln1_beta"] += dbeta

        check_finite("policy gradients", *grads.values())
        return grads, (dh, dc)


class ValueNetwork(Network):
    """
    Centralized critic Q(s, a; w). The state is the 7-feature row of every
    non-EMV followed by the EMV row; the joint action holds one entry per slot.
    """

    def __init__(self, M, rng=None):
        super().__init__()
        rng = rng if rng is not None else np.random.default_rng()
        self.M = M
        self.state_size = N_FEATURES * (M + 1)
        sizes = [self.state_size + M, *VALUE_HIDDEN, 1]
        for k, (fan_in, fan_out) in enumerate(zip(sizes, sizes[1:]), start=1):
            self.params[f"W{k}"] = _uniform_fan_in(rng, fan_in, (fan_in, fan_out))
            self.params[f"b{k}"] = _uniform_fan_in(rng, fan_in, fan_out)
        self.n_layers = len(sizes) - 1

    def forward(self, state, joint_action, record=True):
        """Q for a batch: state (B, 7M + 7), joint_action (B, M) -> (B,)"""
        s = np.atleast_2d(np.asarray(state, dtype=float))
        a = np.atleast_2d(np.asarray(joint_action, dtype=float))
        if s.shape[1] != self.state_size or a.shape[1] != self.M or s.shape[0] != a.shape[0]:
            raise ContractViolation(
                f"critic inputs must be (B, {self.state_size}) and (B, {self.M}), "
                f"got {s.shape} and {a.shape}"
            )
        x = np.concatenate([s, a], axis=1)
        check_finite("critic input", x)

        caches = []
        for k in range(1, self.n_layers + 1):
            x, fc = linear_forward(x, self.params[f"W{k}"], self.params[f"b{k}"])
            relu = None
            if k < self.n_layers:
                x, relu = relu_forward(x)
            caches.append((fc, relu))
        q = x[:, 0]
        check_finite("critic output", q)
        if record:
            self._cache = caches
        return q

    def backward(self, dq):
        """Returns (grads, d_state, d_action) for upstream gradient dq of shape (B,)"""
        caches = self._take_cache()
        grads = {}
        dx = np.asarray(dq, dtype=float).reshape(-1, 1)
        for k in range(self.n_layers, 0, -1):
            fc, relu = caches[k - 1]
            if relu is not None:
                dx = relu_backward(dx, relu)
            dx, grads[f"W{k}"], grads[f"b{k}"] = linear_backward(dx, fc, self.params[f"W{k}"])
        check_finite("critic gradients", *grads.values())
        split = self.state_size
        return grads, dx[:, :split], dx[:, split:]
