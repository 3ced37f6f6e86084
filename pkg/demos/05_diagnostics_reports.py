"""The diagnostic pipeline and its machine-readable report.

`run_diagnostics` samples the chart, evaluates every structure identity and
curvature condition, and returns a deterministic JSON-serializable report;
`crosscheck` recomputes the jet-differentiated quantities from central
differences.  The same operations are exposed on the command line:

    statmanifold list
    statmanifold export centroaffine /tmp/centroaffine.json
    statmanifold run /tmp/centroaffine.json --out /tmp/report.json
    statmanifold crosscheck /tmp/centroaffine.json
"""

import json

from statmanifold import crosscheck, get_builtin, run_diagnostics

instance = get_builtin("centroaffine")
report = run_diagnostics(instance.spec)

print("== checks ==")
for name, check in report.checks.items():
    print(f"  {name:36s} {check.status:14s} max residual {check.max_residual:.3e}")

print()
print("flags:", json.dumps(report.flags, indent=2, sort_keys=True))
print("constant curvature:", report.constant_curvature)
print("main1 flag equivalence:", report.main1_flag_equivalence)
print("exit code:", report.exit_code())

print()
print("== fd crosscheck ==")
cross = crosscheck(instance.spec)
for name, deviation in cross.deviations.items():
    print(f"  {name:24s} {deviation:.3e}")
print("passed:", cross.passed)

print()
print("report bytes are stable for fixed (spec, seed, tolerance); the full")
print("JSON document is report.to_json() with a spec echo and content hash.")
