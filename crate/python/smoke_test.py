"""Smoke test for the cuebounds_py extension.

Build first:  pip install --no-build-isolation -e crates/cuebounds-py
"""

import math
import sys

import cuebounds_py as cb


def check(name, ok, detail=""):
    print(f"{'PASS' if ok else 'FAIL'} {name} {detail}".rstrip())
    return ok


def main():
    results = []

    xi = cb.XiVector([0.3, -0.2, 0.5, 0.1])
    results.append(check("xi_vector", xi.m == 2 and abs(xi.zeta()[0] - complex(0.3, 0.2)) < 1e-15))

    t, bo, resid = cb.char_fn_both(xi.coords, 6)
    results.append(check("char_fn_routes", abs(t - bo) < 1e-10 and resid < 1e-10, f"|diff|={abs(t - bo):.2e}"))

    # m = 1, n = 1: X = sqrt(2) (cos θ, sin θ), so F = J0(sqrt(2)|ξ|)
    r = math.sqrt(2) * math.hypot(0.7, 0.4)
    j0 = sum((-1) ** k * (r / 2) ** (2 * k) / math.factorial(k) ** 2 for k in range(30))
    f = cb.char_fn([0.7, 0.4], 1)
    results.append(check("char_fn_bessel", abs(f - j0) < 1e-13, f"{f.real:.15f} vs {j0:.15f}"))

    lt, bound = cb.laplace_transform([0.5, 0.2, -0.3, 0.4], 4)
    results.append(check("laplace_below_bound", lt.log10_mag <= bound.log10_mag + 1e-12))

    rep = cb.bounds_report(4322, 5)
    tv = rep["tv_bound"]
    results.append(check("tv_bound_4322", tv["sign"] == "positive" and tv["log10_mag"] <= -367, f"log10={tv['log10_mag']:.2f}"))

    s = cb.sample_traces(5, 3, 200, seed=3)
    same = cb.sample_traces(5, 3, 200, seed=3) == s
    mean_t1 = sum(x[0] for x in s) / len(s)
    results.append(check("sample_traces", same and len(s) == 200 and len(s[0]) == 3 and abs(mean_t1) < 0.5))

    try:
        cb.bounds_report(100, 30)
        results.append(check("applicability_error", False))
    except cb.ApplicabilityError:
        results.append(check("applicability_error", True))

    try:
        cb.XiVector([0.1, 0.2, 0.3])
        results.append(check("domain_error", False))
    except ValueError:
        results.append(check("domain_error", True))

    v = cb.verify("generator")
    results.append(check("verify_generator", v["passed"] is True))

    ok = all(results)
    print(f"smoke: {sum(results)} of {len(results)} checks pass")
    return 0 if ok else 1


if __name__ == "__main__":
    sys.exit(main())
