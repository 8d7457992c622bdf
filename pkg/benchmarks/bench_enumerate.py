"""Compare the compiled and pure-Python search kernels.

    python benchmarks/bench_enumerate.py [--repeat N]

Diagrams are built before timing. "count" runs the bare kernel; "enumerate"
and "classify" include the conversion of solutions into dicts.
"""
from __future__ import annotations

import argparse
import random
import sys
import timeit
from pathlib import Path

from kontext import _core, _kernels_py
from kontext.greechie import Diagram, load, make_bug, make_star
from kontext.valuations import classify, count_two_valued, enumerate_two_valued

ROOT = Path(__file__).resolve().parents[1]


def chain_of_bugs(k: int) -> Diagram:
    """``k`` bugs glued end to end (b of one is c of the next)."""
    base = make_bug(coordinatize=False)
    atoms, blocks = [], []
    for i in range(k):
        rename = {x: f"{x}{i}" for x in base.atom_ids}
        if i:
            rename["c"] = f"b{i - 1}"
        for x in base.atom_ids:
            if rename[x] not in atoms:
                atoms.append(rename[x])
        blocks += [tuple(rename[x] for x in b.atom_ids) for b in base.blocks]
    return Diagram(3, tuple(atoms), tuple(blocks))


def random_diagram(seed: int, n: int, density: float) -> Diagram:
    rng = random.Random(seed)
    ids = [f"x{i:03d}" for i in range(n)]
    blocks: list[tuple[str, ...]] = []
    for _ in range(int(density * n)):
        cand = tuple(rng.sample(ids, 3))
        if all(len(set(cand) & set(b)) <= 1 for b in blocks):
            blocks.append(cand)
    return Diagram(3, tuple(ids), tuple(blocks))


def workloads():
    star16 = make_star(16, coordinatize=False)
    chain5 = chain_of_bugs(5)
    chain3 = chain_of_bugs(3)
    sparse = random_diagram(1, 36, 0.5)
    cabello = load(ROOT / "tests" / "data" / "cabello18.json")
    return {
        "count star(16)": lambda: count_two_valued(star16),
        "count chain of 5 bugs": lambda: count_two_valued(chain5),
        "count sparse random(36)": lambda: count_two_valued(sparse),
        "enumerate star(16)": lambda: enumerate_two_valued(star16),
        "enumerate bug": lambda: enumerate_two_valued(make_bug()),
        "KS refutation cabello18": lambda: enumerate_two_valued(cabello),
        "classify chain of 3 bugs": lambda: classify(chain3, {"c0": 1}),
    }


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeat", type=int, default=5)
    args = parser.parse_args(argv)

    if _core.search_compiled is None:
        print("compiled kernel not built; run `pip install -e . --no-build-isolation`", file=sys.stderr)
        return 1
    kernels = {
        "python": (_kernels_py.search, _kernels_py.count),
        "cython": (_core.search_compiled, _core.count_compiled),
    }
    print(f"{'workload':<28}{'python [ms]':>14}{'cython [ms]':>14}{'speedup':>10}")
    for name, fn in workloads().items():
        times = {}
        for label, (search, count) in kernels.items():
            _core.search, _core.count = search, count
            times[label] = min(timeit.repeat(fn, number=1, repeat=args.repeat)) * 1e3
        print(f"{name:<28}{times['python']:>14.3f}{times['cython']:>14.3f}"
              f"{times['python'] / times['cython']:>9.1f}x")
    return 0


if __name__ == "__main__":
    sys.exit(main())
