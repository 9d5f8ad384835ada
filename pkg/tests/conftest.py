import math
from functools import lru_cache

import pytest

from trapinit import FluidModel, solve_static, to_ef

K_RT3 = math.sqrt(1.0 / 3.0)

# criterion label -> list of (ok, detail); filled by test_acceptance.py
ACCEPTANCE = {}


@lru_cache(maxsize=None)
def solved(k: float, rho0: float = 1.0, rtol: float = 1e-10, r_max_L: float = 1e3, ppd: int = 400):
    model = FluidModel(k, rho0)
    L = model.length_scale
    return solve_static(model, r_max=r_max_L * L, rtol=rtol, points_per_decade=ppd)


@lru_cache(maxsize=None)
def ef(k: float, rho0: float = 1.0):
    return to_ef(solved(k, rho0))


@pytest.fixture(params=[0.3, K_RT3, 0.9], ids=["k0.3", "k2=1/3", "k0.9"])
def k(request):
    return request.param


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for label in sorted(ACCEPTANCE, key=lambda s: int(s.split()[0])):
        results = ACCEPTANCE[label]
        ok = all(r[0] for r in results)
        detail = "; ".join(r[1] for r in results)
        terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'}  [{label}] {detail}")
