"""
Running the scenario catalog from Python
========================================

The same runs as ``horolib run`` and ``horolib check``, with the reports as
dictionaries.
"""

from horolib.cli import ScenarioConfig, check_all, list_scenarios, report_csv, run_scenario

for row in list_scenarios()[:5]:
    print(row["id"], "-", row["anchor"])

rep = run_scenario(ScenarioConfig("h2-tracking", {"lambda": 2.0, "n": 100}, seed=0))
print("h2-tracking passed:", rep.passed)
print(report_csv([rep.to_json()]))

agg = check_all(1, (("segal-inequality", {"pairs": 200}), ("eigensolver", {"matrices": 20})))
print(f"{agg['n_runs']} runs, {agg['n_checks']} checks, passed: {agg['passed']}")
