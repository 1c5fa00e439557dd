"""Smoke test for the `oddsym` extension module.

Build first:  pip install -e crates/py --no-build-isolation
"""

import json
import math
import sys

import oddsym

HETEROCLINIC = """
problem.L = 20
problem.m = 1
problem.g.family = quartic
problem.g.well = 1
mesh = 4096
"""

DIRICHLET = """
problem.L = 1
problem.m = 1
"""


def main() -> int:
    failures = []

    def check(name, ok, detail):
        print(f"{'ok  ' if ok else 'FAIL'} {name}: {detail}")
        if not ok:
            failures.append(name)

    catalog = dict(oddsym.preset_catalog())
    check("catalog", len(catalog) >= 6, ", ".join(sorted(catalog)))

    energy, xs, us, diag = oddsym.minimize(HETEROCLINIC, "odd_tanh")
    exact = 2 * math.sqrt(2) / 3
    check("heteroclinic energy", abs(energy - exact) < 1e-3, f"{energy:.9f} vs {exact:.9f}")
    check("boundary data", us[0] == -1.0 and us[-1] == 1.0 and len(xs) == len(us), f"{len(us)} nodes")
    check("odd minimizer", json.loads(diag)["oddness_defect"] <= 1e-6, diag)

    eig = json.loads(oddsym.lambda1(DIRICHLET))
    check("lambda1", abs(eig["lambda1"] - math.pi**2 / 4) < 1e-4, f"{eig['lambda1']:.8f}")

    hyp = json.loads(oddsym.check_hypotheses(catalog["audit_expquad"]))
    check("log-convex margin", abs(hyp["log_convex_a"]["margin"] - 2.0) < 1e-9, str(hyp["log_convex_a"]))

    code, msg, files = oddsym.run(catalog["thm1_2_expquad"], seed=7)
    again = oddsym.run(catalog["thm1_2_expquad"], seed=7)[2]
    names = [n for n, _ in files]
    check("run", code == 0 and "report.json" in names and "solution.csv" in names, f"exit {code}, {names}")
    check("deterministic", files == again, "identical artifacts")

    try:
        oddsym.run("problem.a.family = nope\n")
        check("config error", False, "no exception")
    except ValueError as e:
        check("config error", "line 1" in str(e), str(e))

    print("smoke test", "passed" if not failures else f"failed: {failures}")
    return 1 if failures else 0


if __name__ == "__main__":
    sys.exit(main())
