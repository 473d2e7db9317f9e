"""Pure-Python versions of the hot kernels.

Used when the compiled extension ``netsdp._ckernels`` is not built. Both
implementations expose the same functions with the same semantics.
"""

import numpy as np


def reduce_word(letters, classical):
    """Rewrite a sequence of ``(party, input, outcome)`` triples to normal form.

    ``outcome == -1`` marks a dichotomic observable. Returns the reduced
    tuple, or ``None`` when the product vanishes by orthogonality.
    """
    if classical:
        seq = sorted(letters)
    else:
        seq = sorted(letters, key=lambda l: l[0])
    stack = []
    for letter in seq:
        if stack:
            top = stack[-1]
            if top[0] == letter[0] and top[1] == letter[1]:
                if (top[2] < 0) != (letter[2] < 0):
                    raise ValueError(
                        "mixed observable/projector letters on party %d input %d"
                        % (letter[0], letter[1]))
                if letter[2] < 0:
                    stack.pop()
                elif top[2] != letter[2]:
                    return None
                continue
        stack.append(letter)
    return tuple(stack)


def schur_complement(X, Zinv, rows, cols, coef, var, m):
    """Assemble ``M[k, l] = tr(B_k X B_l Zinv)`` for indicator-type ``B_k``.

    Each ``B_k`` is given by the full (both-orientation) entry list
    ``(rows[e], cols[e], coef[e])`` with ``var[e] == k``.
    """
    # X B_l Zinv summed column by column; entries grouped by variable.
    order = np.argsort(var, kind="stable")
    bounds = np.searchsorted(var[order], np.arange(m + 1))
    M = np.empty((m, m))
    for l in range(m):
        sel = order[bounds[l]:bounds[l + 1]]
        # W = sum_f coef_f * X[:, r_f] Zinv[c_f, :]  with B_l = sum coef e_r e_c^T
        W = (X[:, rows[sel]] * coef[sel]) @ Zinv[cols[sel], :]
        vals = coef * W[cols, rows]
        M[:, l] = np.bincount(var, weights=vals, minlength=m)
    return M
