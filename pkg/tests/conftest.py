import math
import random
import time

import pytest

from lagrange3.errors import Lagrange3Error
from lagrange3.excision import excision_history
from lagrange3.group import FrickeTriple, build_group, fricke_complete
from lagrange3.scalar import Arith
from lagrange3.tree import enumerate_tree


def float_triples(n, seed=20240611, precision=256):
    """Normalized float triples: a in (2.1, 4), b from the range where a completion exists."""
    rng = random.Random(seed)
    ar = Arith("float", precision)
    out = []
    while len(out) < n:
        a = rng.uniform(2.1, 4.0)
        lo = max(a, 2 * a / math.sqrt(a * a - 4))
        hi = a / math.sqrt(a - 2)
        if lo >= hi:
            continue
        b = rng.uniform(lo, hi)
        A, B = ar.scalar(repr(a)), ar.scalar(repr(b))
        try:
            c = fricke_complete(A, B, ar)
        except Lagrange3Error:
            continue
        out.append(FrickeTriple(A, B, c, ar))
    return out


@pytest.fixture(scope="session")
def modular():
    return build_group(FrickeTriple.of(3, 3, 3))


# wall time of the shared session fixtures, charged to the acceptance runtimes
SETUP_SECONDS = {}


@pytest.fixture(scope="session")
def modular_nodes_15(modular):
    start = time.perf_counter()
    nodes = enumerate_tree(modular, 15)
    SETUP_SECONDS["nodes_15"] = time.perf_counter() - start
    return nodes


@pytest.fixture(scope="session")
def modular_history_15(modular, modular_nodes_15):
    start = time.perf_counter()
    rows = excision_history(modular, 15, modular_nodes_15)
    SETUP_SECONDS["history_15"] = time.perf_counter() - start
    return rows
