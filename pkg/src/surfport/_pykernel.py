"""Pure-numpy spin-elimination kernel, vectorised over the batch axis.

``ops`` rows are ``(opcode, slot_a, slot_b, qubit)``.  The state holds one
weight per configuration of ``width`` spin slots; ``eta`` carries the bond
signs (+1/-1) per shot and qubit.  Returns ``log`` of the contracted sum.
"""

import numpy as np

OP_ADD, OP_BOND, OP_FIELD, OP_SUM, OP_CONST = range(5)


def _split(state, width, slot):
    # view with the chosen slot as its own axis: (B, high, 2, low)
    return state.reshape(state.shape[0], 1 << (width - slot - 1), 2, 1 << slot)


def _split2(state, width, a, b):
    lo, hi = min(a, b), max(a, b)
    v = state.reshape(state.shape[0], 1 << (width - hi - 1), 2, 1 << (hi - lo - 1), 2, 1 << lo)
    return v


def contract_batch(ops, eta, K, width):
    ops = np.asarray(ops, dtype=np.int32)
    eta = np.asarray(eta, dtype=np.int8)
    batch = eta.shape[0]
    state = np.zeros((batch, 1 << width), dtype=np.float64)
    state[:, 0] = 1.0
    acc = np.zeros(batch, dtype=np.float64)
    ep, em = np.exp(K), np.exp(-K)
    pending = 0
    for op, a, b, q in ops:
        if op == OP_ADD:
            v = _split(state, width, a)
            v[:, :, 1, :] = v[:, :, 0, :]
            continue
        if op == OP_CONST:
            acc += K * eta[:, q]
            continue
        if op == OP_SUM:
            v = _split(state, width, a)
            v[:, :, 0, :] += v[:, :, 1, :]
            v[:, :, 1, :] = 0.0
            pending = 8
        else:
            pos = eta[:, q] > 0
            f_same = np.where(pos, ep, em)
            f_diff = np.where(pos, em, ep)
            if op == OP_BOND:
                v = _split2(state, width, a, b)
                f_same, f_diff = f_same[:, None, None, None], f_diff[:, None, None, None]
                v[:, :, 0, :, 0, :] *= f_same
                v[:, :, 1, :, 1, :] *= f_same
                v[:, :, 0, :, 1, :] *= f_diff
                v[:, :, 1, :, 0, :] *= f_diff
            else:
                v = _split(state, width, a)
                v[:, :, 0, :] *= f_same[:, None, None]
                v[:, :, 1, :] *= f_diff[:, None, None]
            pending += 1
        if pending >= 8:
            m = state.max(axis=1)
            m[m <= 0] = 1.0
            state /= m[:, None]
            acc += np.log(m)
            pending = 0
    return acc + np.log(state[:, 0])
