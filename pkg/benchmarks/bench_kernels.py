"""Compare the compiled kernels against the pure-Python fallback.

    python benchmarks/bench_kernels.py [--repeat N]

Times word reduction on random words, one Schur-complement assembly on the
efficiency program, and a full solve with each backend swapped in.
"""

import argparse
import random
import sys
import time
from pathlib import Path

import numpy as np

from netsdp import _kernels_py, qsim, sdp
from netsdp.moment import assemble, instantiate
from netsdp.scenario import LevelSpec, Scenario, build_generators

try:
    from netsdp import _ckernels
except ImportError:
    _ckernels = None

CONFIGS = Path(__file__).resolve().parents[1] / "configs"


def best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times)


def efficiency_problem():
    sc = Scenario.load(CONFIGS / "efficiency.json")
    level = LevelSpec.load(CONFIGS / "level3_efficiency.json")
    cfg = qsim.SwapConfig(eta_a=0.61, eta_c=0.61)
    inst = instantiate(assemble(build_generators(sc, level), sc), qsim.swap_distribution(cfg))
    return sdp.SdpProblem.from_instantiated(inst)


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args(argv)
    backends = {"python": _kernels_py}
    if _ckernels is not None:
        backends["compiled"] = _ckernels
    else:
        print("compiled extension not built; timing the fallback only", file=sys.stderr)

    rnd = random.Random(0)
    alphabet = [(p, x, -1) for p in range(3) for x in range(2)]
    words = [tuple(rnd.choice(alphabet) for _ in range(rnd.randint(0, 10))) for _ in range(50_000)]

    problem = efficiency_problem()
    n, m = problem.n, problem.m
    rng = np.random.default_rng(0)
    G = rng.normal(size=(n, n))
    X = G @ G.T / n + np.eye(n)
    Zinv = np.linalg.inv(X + np.eye(n))
    schur_args = (X, Zinv, problem._fr, problem._fc, problem._fw, problem._fv, m)

    print(f"efficiency program: n={n}, m={m}")
    print(f"{'kernel':<22}" + "".join(f"{b:>12}" for b in backends))
    rows = {
        "reduce_word x50000": lambda k: best_of(
            lambda: [k.reduce_word(w, False) for w in words], args.repeat),
        "schur assembly": lambda k: best_of(lambda: k.schur_complement(*schur_args), args.repeat),
    }

    def full_solve(k):
        saved = sdp._schur
        sdp._schur = k.schur_complement
        try:
            return best_of(lambda: sdp.solve(problem), 1)
        finally:
            sdp._schur = saved

    rows["full solve"] = full_solve
    for name, fn in rows.items():
        print(f"{name:<22}" + "".join(f"{fn(k):>11.3f}s" for k in backends.values()))


if __name__ == "__main__":
    main()
