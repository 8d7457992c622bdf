import random

import pytest

from kontext import _core, _kernels_py
from kontext.greechie import Diagram, load
from kontext.valuations import count_two_valued, enumerate_two_valued

from .oracles import brute_force_measures, random_legal_diagram

compiled = pytest.mark.skipif(_core.search_compiled is None, reason="extension not built")


def _args(diag, premises=None):
    ids = diag.atom_ids
    blocks = [[diag.index(x) for x in b.atom_ids] for b in diag.blocks]
    values = [-1] * len(ids)
    for x, v in (premises or {}).items():
        values[diag.index(x)] = v
    order = sorted(range(len(ids)), key=lambda i: ids[i])
    return len(ids), blocks, values, order


def test_backend_reported():
    assert _core.BACKEND in ("python", "cython")


@compiled
@pytest.mark.parametrize("d", [3, 4])
def test_compiled_matches_python(d):
    rng = random.Random(100 + d)
    for _ in range(150):
        diag = random_legal_diagram(rng, max_atoms=14, d=d)
        premises = {x: rng.randint(0, 1) for x in rng.sample(list(diag.atom_ids), rng.randint(0, 2))}
        args = _args(diag, premises)
        for limit in (0, 1, 3):
            assert _core.search_compiled(*args, limit) == _kernels_py.search(*args, limit)
        assert _core.count_compiled(*args) == _kernels_py.count(*args) == len(_kernels_py.search(*args))


def test_limit_prefix(backend):
    rng = random.Random(5)
    for _ in range(30):
        diag = random_legal_diagram(rng, max_atoms=12)
        full = enumerate_two_valued(diag)
        for k in (1, 2, 5):
            assert enumerate_two_valued(diag, limit=k) == full[:k]


def test_count_matches_enumeration(backend):
    rng = random.Random(9)
    for _ in range(40):
        diag = random_legal_diagram(rng, max_atoms=14)
        premises = {x: 1 for x in rng.sample(list(diag.atom_ids), rng.randint(0, 1))}
        assert count_two_valued(diag, premises) == len(enumerate_two_valued(diag, premises))
    assert count_two_valued(Diagram(3, ("a", "b", "c", "q"), [("a", "b", "c")])) == 6


def test_kernel_matches_brute_force_d4(backend):
    rng = random.Random(44)
    for _ in range(40):
        diag = random_legal_diagram(rng, max_atoms=14, d=4)
        assert enumerate_two_valued(diag) == brute_force_measures(diag)


def test_premises_respected(backend):
    diag = load(__import__("pathlib").Path(__file__).parent / "data" / "cabello18.json")
    assert enumerate_two_valued(diag, {"r0": 1}) == []


def test_pure_python_override():
    import os
    import subprocess
    import sys

    env = dict(os.environ, KONTEXT_PURE_PYTHON="1")
    out = subprocess.run([sys.executable, "-c", "import kontext; print(kontext.BACKEND)"],
                         env=env, capture_output=True, text=True, check=True)
    assert out.stdout.strip() == "python"
