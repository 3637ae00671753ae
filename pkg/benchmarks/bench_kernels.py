"""Compare the compiled and numpy kernels on a Trotter step and a Hamiltonian matvec.

Usage::

    python3 benchmarks/bench_kernels.py --sizes 12 14 16 --repeat 5
"""

import argparse
import timeit

import numpy as np

from chainent import kernels
from chainent.evolution import TrotterPropagator
from chainent.hamiltonian import HamiltonianSpec, build_bonds, stack_bonds


def bench(n: int, backend: str, repeat: int) -> dict[str, float]:
    bonds = build_bonds(HamiltonianSpec("tbrm", n, seed=0))
    mats, sites = stack_bonds(bonds)
    rng = np.random.default_rng(0)
    psi = rng.standard_normal(1 << n) + 1j * rng.standard_normal(1 << n)
    psi /= np.linalg.norm(psi)
    out = np.empty_like(psi)
    prop = TrotterPropagator(bonds, n, backend=backend)
    _, middle, _ = prop._sequences(0.05)

    def step():
        kernels.apply_gates(psi, *middle, n, backend=backend)

    def matvec():
        kernels.apply_bonds(psi, mats, sites, n, out=out, backend=backend)

    number = max(1, 2 ** max(0, 16 - n))
    return {
        name: min(timeit.repeat(fn, number=number, repeat=repeat)) / number
        for name, fn in (("trotter_step", step), ("matvec", matvec))
    }


def main(argv=None) -> None:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--sizes", type=int, nargs="+", default=[12, 14, 16])
    parser.add_argument("--repeat", type=int, default=5)
    args = parser.parse_args(argv)

    backends = sorted(kernels.BACKENDS)
    if "cython" not in backends:
        print("compiled extension not built; timing the numpy backend only")
    print(f"{'n':>3} {'kernel':<13}" + "".join(f"{b + ' [ms]':>15}" for b in backends) + f"{'speedup':>10}")
    for n in args.sizes:
        times = {b: bench(n, b, args.repeat) for b in backends}
        for kernel in ("trotter_step", "matvec"):
            row = [times[b][kernel] * 1e3 for b in backends]
            speedup = times["numpy"][kernel] / times["cython"][kernel] if "cython" in times else float("nan")
            print(f"{n:>3} {kernel:<13}" + "".join(f"{t:>15.3f}" for t in row) + f"{speedup:>9.1f}x")


if __name__ == "__main__":
    main()
