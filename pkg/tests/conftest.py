"""Shared fixtures, brute-force oracles, and the acceptance summary printer."""

from __future__ import annotations

from collections import deque

import numpy as np
import pytest

from amenability.group_core import cyclic_group, direct_product, symmetric_group

ACCEPTANCE_TITLES = {
    1: "operator norm equals squared l1 norm (dense and power iteration)",
    2: "dense-kernel and convolution realizations agree; quadratic form identity",
    3: "cut level bisection hits its target",
    4: "support compression obeys its support and displacement bounds",
    5: "component packing keeps norm, displacement and support radius",
    6: "pipeline stages dominated by the quantitative chain; spot values",
    7: "cyclic interval certificates match the closed form",
    8: "Higson-Roe bridge supports, variation, Mazur round trip",
    9: "counterexample family: trivial maps exact, spectral bound, stability",
    10: "exact Folner and set-family ratios match brute force (order <= 20)",
}

_results: dict[int, list[bool]] = {}


def pytest_runtest_makereport(item, call):
    marker = item.get_closest_marker("acceptance")
    if marker is None:
        return
    if call.when != "call" and not (call.when == "setup" and call.excinfo is not None):
        return
    _results.setdefault(int(marker.args[0]), []).append(call.excinfo is None)


def pytest_terminal_summary(terminalreporter):
    if not _results:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(ACCEPTANCE_TITLES):
        runs = _results.get(k)
        if runs is None:
            status = "NOT RUN"
        else:
            status = "PASS" if all(runs) else "FAIL"
        terminalreporter.write_line(f"criterion {k:2d}: {status:7s} {ACCEPTANCE_TITLES[k]}")


# oracles that share no code with the package


def bfs_oracle(G, gens, source=None):
    """Word lengths from ``source`` by plain BFS with right multiplication by gens and inverses."""
    source = G.identity if source is None else source
    steps = set(gens) | {G.inv(s) for s in gens}
    dist = {source: 0}
    q = deque([source])
    while q:
        h = q.popleft()
        for s in steps:
            k = G.mul(h, s)
            if k not in dist:
                dist[k] = dist[h] + 1
                q.append(k)
    return dist


def boundary_oracle(G, gens, F, R):
    F = set(int(x) for x in F)
    out = set()
    for g in range(G.order):
        if g in F:
            continue
        d = bfs_oracle(G, gens, g)
        if any(d.get(x, 10**9) <= R for x in F):
            out.add(g)
    return out


def small_groups_upto(n_max=20):
    """A spread of groups of order at most n_max with generating sets."""
    out = [cyclic_group(n) for n in (1, 2, 3, 5, 6, 8, 12, 20)]
    out.append(symmetric_group(3))
    out.append(direct_product(cyclic_group(2), cyclic_group(2)))
    out.append(direct_product(cyclic_group(2), cyclic_group(6)))
    out.append(direct_product(symmetric_group(3), cyclic_group(3)))
    return [g for g in out if g[0].order <= n_max]


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)
