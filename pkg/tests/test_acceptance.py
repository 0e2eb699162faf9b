"""Acceptance gate: every shipped claim, one test and one printed line each.

Each test prints ``[criterion N] PASS/FAIL - detail`` directly to the
terminal (bypassing capture) so a plain ``pytest -v`` run shows the verdict
for all eight criteria at their stated tolerances.
"""

import json
import time

import jsonschema
import numpy as np
import pytest

from sparse_ctrb import (
    SystemModel,
    Tolerance,
    exact_min_k,
    greedy_support_schedule,
    kstar_bounds_relaxed,
    kstar_bounds_sparse,
    common_support_test,
    output_kalman_test,
    output_kalman_type_rank_test,
    output_pbh_necessary,
    output_sparse_necessary,
    rollout,
    solve_inputs,
    sparse_pbh_test,
    standard_form,
    transform_system,
    verify_standard_form,
)
from sparse_ctrb.cli import main
from sparse_ctrb.io import REPORT_SCHEMA
from tests.conftest import FIXTURES


def _line(capsys, num, ok, detail):
    with capsys.disabled():
        print(f"[criterion {num}] {'PASS' if ok else 'FAIL'} - {detail}", flush=True)
    assert ok, f"criterion {num} failed: {detail}"


# --- shared ensemble for criteria 3 and 4 -----------------------------------


@pytest.fixture(scope="session")
def ensemble():
    """Deduplicated random systems with entries in {-1, 0, 1}.

    N in {2, 3}, L in {1, 2, 3}; each paired with every s in {1, 2} that
    fits the input count.  Returns (systems, rows, elapsed_seconds) where a
    row is (system, s, decision_verdict, oracle_k).
    """
    rng = np.random.default_rng(20240815)
    systems = []
    seen = set()
    while len(systems) < 520:
        n = int(rng.integers(2, 4))
        l = int(rng.integers(1, 4))
        d = rng.integers(-1, 2, size=(n, n))
        h = rng.integers(-1, 2, size=(n, l))
        key = (n, l, d.tobytes(), h.tobytes())
        if key in seen:
            continue
        seen.add(key)
        systems.append(SystemModel(D=d.astype(float), H=h.astype(float)))
    start = time.perf_counter()
    rows = []
    for sys_ in systems:
        for s in (1, 2):
            if s > sys_.n_inputs:
                continue
            verdict = sparse_pbh_test(sys_, s).verdict
            k, _ = exact_min_k(sys_, s)
            rows.append((sys_, s, verdict, k))
    return systems, rows, time.perf_counter() - start


# --- criteria ----------------------------------------------------------------


def test_criterion_1_state_fixture_verdicts(capsys):
    from tests.conftest import load_fixture

    start = time.perf_counter()
    c1 = load_fixture("inequality-blocked")
    c2 = load_fixture("no-common-support")
    c3 = load_fixture("nilpotent-chain")
    checks = [
        not sparse_pbh_test(c1, 1).verdict,
        sparse_pbh_test(c1, 2).verdict,
        sparse_pbh_test(c2, 2).verdict,
        not common_support_test(c2, 2)[0],
        sparse_pbh_test(c3, 1).verdict,
        exact_min_k(c3, 1)[0] == 3,
    ]
    elapsed = time.perf_counter() - start
    _line(
        capsys,
        1,
        all(checks) and elapsed < 1.0,
        f"state fixture verdicts, {sum(checks)}/6 checks in {elapsed:.3f}s",
    )


def test_criterion_2_output_fixture_verdicts(capsys):
    from tests.conftest import load_fixture

    start = time.perf_counter()
    a1 = load_fixture("output-blocked")
    a2 = load_fixture("output-reachable")
    checks = [
        not output_kalman_test(a1),
        output_pbh_necessary(a1),
        output_kalman_test(a2),
        not sparse_pbh_test(a2, 1).verdict,
        output_sparse_necessary(a2, 1),
        output_kalman_type_rank_test(a2, 1, 2)[0],
        not output_kalman_type_rank_test(a2, 1, 1)[0],
    ]
    elapsed = time.perf_counter() - start
    _line(
        capsys,
        2,
        all(checks) and elapsed < 1.0,
        f"output fixture verdicts, {sum(checks)}/7 checks in {elapsed:.3f}s",
    )


def test_criterion_3_decision_test_matches_oracle(capsys, ensemble):
    systems, rows, elapsed = ensemble
    mismatches = [
        (sys_, s) for sys_, s, verdict, k in rows if verdict != (k is not None)
    ]
    ok = len(systems) >= 500 and not mismatches and elapsed < 300.0
    _line(
        capsys,
        3,
        ok,
        f"decision test vs oracle on {len(systems)} systems "
        f"({len(rows)} pairs, {len(mismatches)} mismatches) in {elapsed:.1f}s",
    )


def test_criterion_4_bounds_bracket_oracle_minimum(capsys, ensemble):
    _, rows, _ = ensemble
    checked = 0
    violations = []
    for sys_, s, verdict, k in rows:
        if not verdict:
            continue
        checked += 1
        sparse = kstar_bounds_sparse(sys_, s)
        relaxed = kstar_bounds_relaxed(sys_, s)
        if not (sparse.lower <= k <= sparse.upper):
            violations.append(("sparse", sys_, s, k))
        if not (relaxed.lower <= k <= relaxed.upper):
            violations.append(("relaxed", sys_, s, k))
        if s == 1 and not (sparse.lower == sparse.upper == sys_.n_states):
            violations.append(("s=1 pin", sys_, s, k))
    _line(
        capsys,
        4,
        checked >= 100 and not violations,
        f"K* bounds bracket the oracle minimum on {checked} sparse-controllable "
        f"pairs ({len(violations)} violations)",
    )


def test_criterion_5_standard_form_reference(capsys):
    from tests.conftest import load_fixture

    sys_ = load_fixture("standard-form-reference")
    dec = standard_form(sys_, 1)
    chk = verify_standard_form(sys_, dec)
    residuals = (
        chk.similarity_residual,
        chk.structure_residual,
        chk.nilpotent_residual,
        chk.input_free_residual,
    )
    ok = (
        (dec.R, dec.r, dec.R_s) == (3, 1, 2)
        and not dec.core_rank_mismatch
        and chk.ok
        and all(res <= 1e-8 for res in residuals)
    )
    _line(
        capsys,
        5,
        ok,
        f"standard form R={dec.R} r={dec.r} R_s={dec.R_s}, "
        f"max residual {max(residuals):.2e}",
    )


def test_criterion_6_transform_invariance(capsys):
    from tests.conftest import load_fixture

    tol = Tolerance(rank_rel=1e-8)
    rng = np.random.default_rng(99)

    def random_invertible(n):
        while True:
            m = rng.standard_normal((n, n))
            if np.linalg.cond(m) <= 1e4:
                return m

    cases = [
        (load_fixture("inequality-blocked"), 1, False),
        (load_fixture("inequality-blocked"), 2, True),
        (load_fixture("no-common-support"), 2, True),
        (load_fixture("nilpotent-chain"), 1, True),
    ]
    failures = 0
    trials = 0
    for sys_, s, base_verdict in cases:
        assert sparse_pbh_test(sys_, s, tol).verdict == base_verdict
        base_bounds = (
            kstar_bounds_sparse(sys_, s, tol) if base_verdict else None
        )
        for _ in range(50):
            trials += 2
            u = random_invertible(sys_.n_states)
            state_t = transform_system(sys_, u, tol)
            psi = random_invertible(sys_.n_inputs)
            input_t = SystemModel(D=sys_.D, H=sys_.H @ psi)
            for variant in (state_t, input_t):
                if sparse_pbh_test(variant, s, tol).verdict != base_verdict:
                    failures += 1
                    continue
                if base_verdict:
                    b = kstar_bounds_sparse(variant, s, tol)
                    if (b.lower, b.upper) != (
                        base_bounds.lower,
                        base_bounds.upper,
                    ):
                        failures += 1
    _line(
        capsys,
        6,
        failures == 0,
        f"verdicts and bounds invariant across {trials} transforms "
        f"(cond <= 1e4, rank_rel 1e-8), {failures} failures",
    )


def test_criterion_7_steering(capsys):
    from tests.conftest import load_fixture

    c3 = load_fixture("nilpotent-chain")
    sched = greedy_support_schedule(c3, 1, 3)
    rng = np.random.default_rng(7)
    worst = 0.0
    endpoint_ok = True
    for _ in range(100):
        x0 = rng.standard_normal(3)
        xf = rng.standard_normal(3)
        plan = solve_inputs(c3, sched, x0, xf)
        worst = max(worst, plan.residual)
        traj = rollout(c3, plan.inputs, x0)
        if not np.allclose(traj, plan.trajectory):
            endpoint_ok = False

    c1 = load_fixture("inequality-blocked")
    blocked_ok = True
    for k in range(1, 7):
        sched_k = greedy_support_schedule(c1, 1, k)
        plan = solve_inputs(c1, sched_k, np.zeros(3), np.ones(3))
        if plan.residual < 0.1:
            blocked_ok = False
    ok = worst <= 1e-8 and endpoint_ok and blocked_ok
    _line(
        capsys,
        7,
        ok,
        f"100 steering pairs, worst residual {worst:.2e}; "
        f"blocked target stays >= 0.1 for K <= 6",
    )


def test_criterion_8_cli_contract(capsys, tmp_path):
    def run(*argv):
        code = main(list(argv))
        captured = capsys.readouterr()
        return code, captured.out

    xf = tmp_path / "xf.json"
    xf.write_text("[1.0, 0.0, -1.0]")
    success_runs = [
        ("check", str(FIXTURES / "inequality-blocked.json"), "-s", "2"),
        ("bounds", str(FIXTURES / "nilpotent-chain.json"), "-s", "1"),
        ("oracle", str(FIXTURES / "no-common-support.json"), "-s", "2"),
        ("decompose", str(FIXTURES / "standard-form-reference.json"), "-s", "1"),
        (
            "steer",
            str(FIXTURES / "nilpotent-chain.json"),
            "-s",
            "1",
            "--k",
            "3",
            "--x-final",
            str(xf),
        ),
    ]
    checks = []
    for argv in success_runs:
        code1, out1 = run(*argv)
        code2, out2 = run(*argv)
        report = json.loads(out1)
        jsonschema.validate(report, REPORT_SCHEMA)
        checks.append(code1 == 0 and code2 == 0 and out1 == out2)
    # Exit-code matrix: 2 for input problems, 3 for exhausted budgets.
    checks.append(run("check", "/nonexistent.json", "-s", "1")[0] == 2)
    checks.append(
        run("check", str(FIXTURES / "inequality-blocked.json"), "-s", "9")[0] == 2
    )
    checks.append(
        run("bounds", str(FIXTURES / "uncontrollable.json"), "-s", "1")[0] == 2
    )
    code, out = run(
        "oracle", str(FIXTURES / "no-common-support.json"), "-s", "1", "--budget", "3"
    )
    inconclusive = json.loads(out)
    jsonschema.validate(inconclusive, REPORT_SCHEMA)
    checks.append(code == 3 and inconclusive["result"]["inconclusive"] is True)
    _line(
        capsys,
        8,
        all(checks),
        f"CLI determinism, schema validation, exit codes: "
        f"{sum(checks)}/{len(checks)} checks",
    )
