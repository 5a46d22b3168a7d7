# model/optim.py
"""
Adam optimizer and soft target-network updates over parameter dicts
"""
import numpy as np

from errors import ContractViolation


class Adam:
    """Adam with bias correction; keeps one pair of moment arrays per parameter"""

    def __init__(self, lr, beta1=0.9, beta2=0.999, epsilon=1e-8):
        self.lr = lr
        self.beta1 = beta1
        self.beta2 = beta2
        self.epsilon = epsilon
        self.m = {}
        self.v = {}
        self.t = 0

    def step(self, params, grads):
        """Update params in place (gradient descent on the given grads)"""
        if set(grads) != set(params):
            raise ContractViolation("gradient keys do not match parameter keys")
        for k, g in grads.items():
            if np.shape(g) != params[k].shape:
                raise ContractViolation(f"gradient for {k} has shape {np.shape(g)}, expected {params[k].shape}")

        self.t += 1
        bc1 = 1.0 - self.beta1 ** self.t
        bc2 = 1.0 - self.beta2 ** self.t
        for k, g in grads.items():
            if k not in self.m:
                self.m[k] = np.zeros_like(params[k])
                self.v[k] = np.zeros_like(params[k])
            self.m[k] = self.beta1 * self.m[k] + (1.0 - self.beta1) * g
            self.v[k] = self.beta2 * self.v[k] + (1.0 - self.beta2) * (g * g)
            m_hat = self.m[k] / bc1
            v_hat = self.v[k] / bc2
            params[k] -= self.lr * m_hat / (np.sqrt(v_hat) + self.epsilon)
        return params

    def state_dict(self):
        return {
            "lr": self.lr, "beta1": self.beta1, "beta2": self.beta2, "epsilon": self.epsilon,
            "t": self.t,
            "m": {k: v.copy() for k, v in self.m.items()},
            "v": {k: v.copy() for k, v in self.v.items()},
        }

    @classmethod
    def from_state_dict(cls, state):
        opt = cls(state["lr"], state["beta1"], state["beta2"], state["epsilon"])
        opt.t = state["t"]
        opt.m = {k: v.copy() for k, v in state["m"].items()}
        opt.v = {k: v.copy() for k, v in state["v"].items()}
        return opt


def soft_update(target_params, online_params, tau):
    """target <- (1 - tau) target + tau online, in place"""
    if not 0.0 <= tau <= 1.0:
        raise ContractViolation(f"tau must lie in [0, 1], got {tau}")
    if set(target_params) != set(online_params):
        raise ContractViolation("target and online parameter keys differ")
    for k, online in online_params.items():
        if target_params[k].shape != online.shape:
            raise ContractViolation(f"shape mismatch for {k}")
    for k, online in online_params.items():
        if tau == 1.0:
            target_params[k][...] = online
        elif tau > 0.0:
            target_params[k] *= 1.0 - tau
            target_params[k] += tau * online
    return target_params
