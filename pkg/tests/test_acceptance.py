"""
Acceptance criteria, one test each.

Every test records a single PASS/FAIL line; the lines are printed together
in the pytest terminal summary, and also when this file is run as a script
(``python3 tests/test_acceptance.py``).
"""

from functools import lru_cache

import pytest

from tractorlab import checks
from tractorlab.conformal.charts import builtin_chart

RESULTS = {}


@lru_cache(maxsize=None)
def _sweep():
    return tuple(checks.cohomology_sweep())


def _sweep_rows(keys):
    """Reduce the sweep to the given axiom keys, one row per complex and degree."""
    rows = []
    for r in _sweep():
        ok = all(r[k] for k in keys)
        rows.append({"name": r["name"], "passed": ok, **{k: r[k] for k in keys}})
    return rows


def criterion_1():
    return _sweep_rows(("d_squared_zero", "delta_squared_zero", "dstar_squared_zero"))


def criterion_2():
    return _sweep_rows(("hodge_sum", "ker_box_is_H"))


def criterion_3():
    return [r for r in checks.cohomology_structure() if r["name"].startswith("conformal")]


def criterion_4():
    return [r for r in checks.cohomology_structure() if not r["name"].startswith("conformal")]


def criterion_5():
    return _sweep_rows(("box_injective_on_im_dstar", "ker_box_is_ker_box2"))


def criterion_6():
    rows = checks.normalize_suite(seed=0)
    return [r for r in rows if "Schouten" in r["name"] or "co-closed" in r["name"]]


def criterion_7():
    rows = checks.normalize_suite(seed=0)
    return [r for r in rows if "Ric" in r["name"] or "harmonic" in r["name"]]


def criterion_8():
    laws = checks.rescale_suite(builtin_chart("poly", 3), seed=0, samples=100)
    return laws + checks.transform_displays(seed=0)


def criterion_9():
    return checks.cross_layer(seed=0, samples=100)


def criterion_10():
    return checks.holonomy_suite(builtin_chart("sphere", 3))


def criterion_11():
    return checks.einstein_suite("sphere", 3, seed=0, h=1e-3)


def criterion_12():
    return checks.operators_suite(builtin_chart("poly", 4), seed=0)


def criterion_13():
    return checks.bianchi_suite(builtin_chart("poly", 3), seed=0)


TITLES = {
    1: "complex axioms (d^2, delta^2, d*^2 exactly zero) over the sweep",
    2: "Hodge arithmetic over the sweep",
    3: "conformal H1 / H2 homogeneities",
    4: "Grassmannian (3,3) H2 and projective H1 contrast",
    5: "Laplacian injective on im d*, ker Box = ker Box^2",
    6: "Rho of the round sphere is minus Schouten; R + d Rho co-closed",
    7: "d* is a fixed multiple of Ricci; zero on harmonic curvature",
    8: "transformation laws (1e-9, 100 points) and exact algebraic displays",
    9: "algebraic tractor derivative = hand-coded connection",
    10: "sphere holonomy slope >= 2.5, flat holonomy <= 1e-10",
    11: "parallel tractors <-> Einstein scales",
    12: "Thomas D slots and Yamabe covariance (n=4)",
    13: "Bianchi identities on the frozen polynomial metric",
}

CRITERIA = {k: globals()["criterion_%d" % k] for k in TITLES}


def summary_line(k, rows):
    ok = bool(rows) and checks.all_passed(rows)
    failed = [r["name"] for r in rows if not r["passed"]]
    tail = "" if ok else "  failing: " + "; ".join(failed[:5]) + (" (no rows)" if not rows else "")
    return ok, "%s  criterion %2d: %s (%d checks)%s" % ("PASS" if ok else "FAIL", k, TITLES[k], len(rows), tail)


@pytest.mark.parametrize("k", sorted(CRITERIA))
def test_acceptance_criterion(k):
    rows = CRITERIA[k]()
    ok, line = summary_line(k, rows)
    RESULTS[k] = line
    print(line)
    assert ok, line


if __name__ == "__main__":
    import sys

    all_ok = True
    for k in sorted(CRITERIA):
        ok, line = summary_line(k, CRITERIA[k]())
        all_ok &= ok
        print(line, flush=True)
    sys.exit(0 if all_ok else 1)
