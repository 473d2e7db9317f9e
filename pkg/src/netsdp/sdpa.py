"""SDPA sparse format (``.dat-s``) export/import and solution parsing.

The exported program is SDPA's primal form
``min sum_i c_i x_i  s.t.  sum_i F_i x_i - F_0 >= 0`` with
``x = (y_1 .. y_m, t)``, ``F_k = B_k``, ``F_{m+1} = -I``, ``F_0 = -C0`` and
``c = (0, .., 0, -1)``, i.e. maximizing ``t``.
"""

from __future__ import annotations

import re

import numpy as np

from netsdp.sdp import SdpProblem


class SdpaFormatError(ValueError):
    pass


def _num(v: float) -> str:
    s = "%.17g" % v
    return "0" if s == "-0" else s


def write_sdpa(problem: SdpProblem) -> str:
    n, m = problem.n, problem.m
    lines = [str(m + 1), "1", str(n), " ".join(["0"] * m + ["-1"])]
    C = problem.constant
    iu, ju = np.triu_indices(n)
    for i, j in zip(iu, ju):
        if C[i, j] != 0.0:
            lines.append(f"0 1 {i + 1} {j + 1} {_num(-C[i, j])}")
    order = np.lexsort((problem.cols, problem.rows, problem.var))
    for e in order:
        if problem.coefs[e] != 0.0:
            lines.append(f"{problem.var[e] + 1} 1 {problem.rows[e] + 1} {problem.cols[e] + 1} "
                         f"{_num(problem.coefs[e])}")
    for i in range(n):
        lines.append(f"{m + 1} 1 {i + 1} {i + 1} -1")
    return "\n".join(lines) + "\n"


def _data_lines(text):
    for raw in text.splitlines():
        line = raw.strip()
        if not line or line[0] in '"*':
            continue
        yield line


def _numbers(line):
    return [t for t in re.split(r"[\s,{}()]+", line) if t]


def read_sdpa(text: str) -> SdpProblem:
    """Parse a file produced by :func:`write_sdpa` back into a problem."""
    lines = list(_data_lines(text))
    if len(lines) < 4:
        raise SdpaFormatError("truncated SDPA header")
    try:
        mdim = int(_numbers(lines[0])[0])
        nblock = int(_numbers(lines[1])[0])
        sizes = [int(s) for s in _numbers(lines[2])]
        cvec = [float(s) for s in _numbers(lines[3])]
    except (ValueError, IndexError) as exc:
        raise SdpaFormatError(f"bad SDPA header: {exc}") from exc
    if nblock != 1 or len(sizes) != 1 or sizes[0] < 1:
        raise SdpaFormatError("only a single positive semidefinite block is supported")
    if len(cvec) != mdim or any(cvec[:-1]) or cvec[-1] != -1.0:
        raise SdpaFormatError("objective is not of the max-t form")
    n, m = sizes[0], mdim - 1
    C = np.zeros((n, n))
    var, rows, cols, coefs = [], [], [], []
    t_diag = np.zeros(n)
    for line in lines[4:]:
        tok = _numbers(line)
        if len(tok) != 5:
            raise SdpaFormatError(f"bad entry line {line!r}")
        k, b, i, j = (int(x) for x in tok[:4])
        val = float(tok[4])
        if b != 1 or not (1 <= i <= j <= n) or not 0 <= k <= mdim:
            raise SdpaFormatError(f"entry out of range: {line!r}")
        i, j = i - 1, j - 1
        if k == 0:
            C[i, j] = C[j, i] = -val
        elif k == mdim:
            if i != j:
                raise SdpaFormatError("t matrix must be -I")
            t_diag[i] = val
        else:
            var.append(k - 1)
            rows.append(i)
            cols.append(j)
            coefs.append(val)
    if not np.all(t_diag == -1.0):
        raise SdpaFormatError("t matrix must be -I")
    return SdpProblem(C, np.array(var, dtype=np.int64), np.array(rows, dtype=np.int64),
                      np.array(cols, dtype=np.int64), np.array(coefs, dtype=float), m)


def read_sdpa_solution(text: str, mdim: int = None) -> np.ndarray:
    """Primal vector ``x`` of an SDPA-format solver output.

    Accepts SDPA's ``xVec = {..}`` block or a bare line of numbers. With
    ``mdim`` given, the length is checked.
    """
    match = re.search(r"xVec\s*=?\s*", text)
    if match:
        rest = text[match.end():]
        if not rest.lstrip().startswith("{"):
            raise SdpaFormatError("xVec block missing '{'")
        close = rest.find("}")
        if close < 0:
            raise SdpaFormatError("truncated xVec block")
        body = rest[rest.index("{") + 1:close]
    else:
        lines = list(_data_lines(text))
        if not lines:
            raise SdpaFormatError("empty solution text")
        body = lines[0]
        if body.count("{") != body.count("}"):
            raise SdpaFormatError("truncated solution vector")
    try:
        x = np.array([float(t) for t in _numbers(body)])
    except ValueError as exc:
        raise SdpaFormatError(f"bad number in solution: {exc}") from exc
    if x.size == 0:
        raise SdpaFormatError("empty solution vector")
    if mdim is not None and x.size != mdim:
        raise SdpaFormatError(f"expected {mdim} values, got {x.size}")
    return x
