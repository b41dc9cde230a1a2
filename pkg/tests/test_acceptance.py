"""Acceptance checks at full size, each against its wall-clock budget.

Every test prints one ``ACCEPT <criterion>: PASS|FAIL`` line, visible even without ``-s``.
"""
import re
import subprocess
import sys
import time

import pytest

from invlim import suites

SEED = 42


@pytest.fixture
def report(capsys):
    def emit(label, checks, elapsed, budget, extra_ok=True):
        failed = [c for c in checks if c.status != "pass"]
        ok = not failed and extra_ok and elapsed < budget
        with capsys.disabled():
            print(f"\nACCEPT {label}: {'PASS' if ok else 'FAIL'} "
                  f"({len(checks)} checks, {elapsed:.2f}s of {budget}s)")
        assert not failed, [c.to_json() for c in failed]
        assert extra_ok
        assert elapsed < budget, f"{label} took {elapsed:.2f}s, budget {budget}s"
    return emit


def timed(fn, *args, **kwargs):
    start = time.perf_counter()
    out = fn(*args, **kwargs)
    return out, time.perf_counter() - start


def names(checks):
    return {c.name for c in checks}


def test_snf_suite(report):
    checks, dt = timed(suites.snf_suite, SEED, count=200)
    report("1 snf", checks, dt, 10, all(c.samples == 200 for c in checks))


def test_hull_exactness(report):
    checks, dt = timed(suites.hull_suite, SEED, count=50)
    exhaustive = [c for c in checks if c.name.startswith("hull: exhaustive")]
    report("2 hull exactness", checks, dt, 20, len(exhaustive) == 1 and exhaustive[0].samples > 0)


def test_intersection_of_injective_submodules(report):
    battery = suites.battery()
    checks, dt = timed(suites.thm1_suite, SEED, samples=300, max_d=8)
    want = {"thm1: x in P_D1 and P_D2 <=> x in P_(D1 u D2)", "thm1: drop/reinsert round-trips are identities"}
    report("3 intersection", checks, dt, 30, len(battery) >= 5 and want <= names(checks))


def test_fiber_sum_prefixes(report):
    checks, dt = timed(suites.zerolim_suite, SEED, count=50, max_len=6, max_size=8)
    report("4 fiber-sum prefixes", checks, dt, 20, len(checks) == 4)


def test_surjective_stages(report):
    checks, dt = timed(suites.thm2_suite, SEED, samples=100)
    report("5 surjective stages", checks, dt, 20, len(checks) == 4)


def test_ladder(report):
    checks, dt = timed(suites.ladder_suite, SEED, count=20, max_k=4)
    worked = [c for c in checks if "[1/192]" in c.name]
    report("6 ladder", checks, dt, 10, len(worked) == 1)


def test_divisibility_certificates(report):
    checks, dt = timed(suites.certificate_suite, SEED, count=50)
    report("7 certificates", checks, dt, 10, all(c.samples >= 50 for c in checks))


def test_eventually_constant_sequences(report):
    checks, dt = timed(suites.ex6_suite, SEED, count=200, roundtrips=100, max_n=5)
    report("8 eventually constant sequences", checks, dt, 15, len(checks) == 6)


def test_selftest_is_deterministic(capsys):
    def once():
        start = time.perf_counter()
        proc = subprocess.run([sys.executable, "-m", "invlim", "selftest", "--seed", str(SEED)],
                              stdin=subprocess.DEVNULL, capture_output=True, text=True, timeout=240)
        return proc, time.perf_counter() - start

    (a, ta), (b, tb) = once(), once()
    strip = lambda s: re.sub(r'"elapsed_ms":\d+', '"elapsed_ms":0', s)  # noqa: E731
    same = strip(a.stdout) == strip(b.stdout)
    ok = a.returncode == 0 and b.returncode == 0 and same and ta < 120 and tb < 120
    with capsys.disabled():
        print(f"\nACCEPT 9 determinism: {'PASS' if ok else 'FAIL'} "
              f"(exit {a.returncode}/{b.returncode}, {ta:.1f}s and {tb:.1f}s of 120s)")
    assert a.returncode == 0, a.stdout + a.stderr
    assert b.returncode == 0
    assert same
    assert '"status":"pass"' in a.stdout
    assert ta < 120 and tb < 120
