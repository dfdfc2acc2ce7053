#!/usr/bin/env python3
"""Smoke test for the hjb_py extension module.

Builds the extension with cargo, copies the shared library next to this
script under the importable name, and exercises every binding against known
values. Exits nonzero on the first failure.

Usage: python3 python/smoke_test.py [--skip-build]
"""

import math
import shutil
import subprocess
import sys
import sysconfig
from pathlib import Path

ROOT = Path(__file__).resolve().parent.parent


def build_and_copy() -> None:
    subprocess.run(
        [
            "cargo",
            "build",
            "--release",
            "-p",
            "hjb-py",
            "--features",
            "extension-module",
        ],
        cwd=ROOT,
        check=True,
    )
    built = ROOT / "target" / "release" / "libhjb_py.so"
    if not built.exists():  # macOS
        built = ROOT / "target" / "release" / "libhjb_py.dylib"
    suffix = sysconfig.get_config_var("EXT_SUFFIX") or ".so"
    target = Path(__file__).resolve().parent / f"hjb_py{suffix}"
    shutil.copyfile(built, target)
    print(f"built extension -> {target.name}")


def approx(a: float, b: float, tol: float, what: str) -> None:
    if abs(a - b) > tol:
        raise AssertionError(f"{what}: {a!r} vs {b!r} (tol {tol})")


def main() -> None:
    if "--skip-build" not in sys.argv:
        build_and_copy()
    sys.path.insert(0, str(Path(__file__).resolve().parent))
    import hjb_py as hjb

    # closed-form helpers
    approx(hjb.conjugate_exponent(2.0), 2.0, 0, "p(2)")
    approx(hjb.conjugate_exponent(1.5), 3.0, 1e-15, "p(1.5)")
    approx(hjb.cost_constant(2.0), 0.25, 0, "C_2")
    approx(hjb.hamiltonian_min([2.0], 2.0), -1.0, 1e-15, "hamiltonian_min")
    (v,) = hjb.optimal_control([2.0], 2.0)
    approx(v, -1.0, 1e-15, "optimal_control")
    try:
        hjb.conjugate_exponent(1.0)
    except ValueError:
        pass
    else:
        raise AssertionError("alpha = 1 should be rejected")

    # expression evaluator
    approx(hjb.eval_expr("2^3^2", [0.0]), 512.0, 0, "right-assoc power")
    approx(hjb.eval_expr("-x1^2", [2.0]), -4.0, 0, "unary minus binds loose")
    approx(hjb.eval_expr("r^2", [0.3, 0.4]), 0.25, 1e-15, "radius")
    try:
        hjb.eval_expr("1 + (", [0.0])
    except ValueError as e:
        assert "byte" in str(e), f"parse error lacks position: {e}"
    else:
        raise AssertionError("syntax error should raise")

    # PDE solve against the exponential-substitution value 2 ln cosh 1
    exact = 2.0 * math.log(math.cosh(1.0))
    p = hjb.Problem.on_interval(2.0, 1.0, 0.0, 1.0, -1.0, 1.0)
    assert p.p == 2.0 and p.c_alpha == 0.25
    res = p.solve([401])
    assert res["converged"], res
    center = res["values"][200]
    approx(center, exact, 1e-4, "V(0)")

    # radial profile on the 1-d ball matches the interval solve at the center
    ball = hjb.Problem.on_ball(2.0, 1.0, 0.0, 1.0, [0.0], 1.0)
    prof = ball.solve_radial(201)
    assert prof["converged"], prof
    approx(prof["u"][0], exact, 1e-3, "radial u(0)")
    assert prof["u"][-1] == 0.0, "boundary value must be exact"

    # manufactured 3-d ball is nodally exact
    ball3 = hjb.Problem.on_ball(1.5, 1.0, 0.0, "manufactured", [0.0, 0.0, 0.0], 1.0)
    prof3 = ball3.solve_radial(101)
    worst = max(abs(u - (1.0 - r * r)) for r, u in zip(prof3["r"], prof3["u"]))
    approx(worst, 0.0, 1e-8, "manufactured radial")

    # Monte Carlo: pure exit cost is exact, optimal policy prices the PDE
    pure = hjb.Problem.on_interval(2.0, 1.0, 5.0, 0.0, -1.0, 1.0)
    rep = pure.simulate("zero", n_paths=50, dt=1e-2, seed=3)
    assert rep["mean_cost"] == 5.0 and rep["std_error"] == 0.0, rep

    rep = p.simulate("optimal", x0=[0.0], dt=1e-3, n_paths=500, seed=1, nodes=[201])
    assert rep["valid"], rep
    budget = 3.0 * rep["std_error"] + 0.05
    approx(rep["mean_cost"], exact, budget, "optimal-policy mean")
    assert abs(rep["gap"]) <= budget, rep

    # determinism across calls
    a = p.simulate("zero", dt=1e-2, n_paths=200, seed=9)
    b = p.simulate("zero", dt=1e-2, n_paths=200, seed=9)
    assert a == b, "same seed must reproduce the report exactly"

    print("smoke test passed")


if __name__ == "__main__":
    main()
