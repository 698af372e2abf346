import json
from fractions import Fraction

import pytest

import mcsched

WORKED = json.dumps(
    {
        "m": 2,
        "tasks": [
            {"id": "t1", "T": "7", "chi": "HI", "CL": "2.8", "CH": "4.9"},
            {"id": "t2", "T": "5", "chi": "HI", "CL": "1.5", "CH": "4"},
            {"id": "t3", "T": "35", "chi": "HI", "CL": "3.5", "CH": "10.5"},
            {"id": "t4", "T": "35", "chi": "LO", "CL": "15.75", "CH": "15.75"},
        ],
    }
)


def test_task_set_round_trip():
    ts = mcsched.TaskSet.from_json(WORKED)
    assert ts.m == 2
    assert len(ts) == 4
    assert ts.hi_count == 3
    assert ts.tasks[0]["CH"] == "4.9"
    again = mcsched.TaskSet.from_json(ts.to_json())
    assert again.to_json() == ts.to_json()


def test_worked_example_needs_multi_rate():
    ts = mcsched.TaskSet.from_json(WORKED)
    assert mcsched.dual_rate_assign(ts) is None
    assignment = mcsched.soma(ts)
    assert assignment is not None
    assert mcsched.multi_rate_test(ts, assignment)["schedulable"]
    lo_sum = sum(Fraction(v) for v in json.loads(assignment)["thetaL"].values())
    assert lo_sum <= 2
    assert mcsched.soma(ts, seed_only=True) is None


def test_dual_rate_rejection_reason():
    ts = mcsched.TaskSet.from_json(WORKED)
    dual = json.dumps(
        {
            "thetaL": {"t1": "0.7", "t2": "0.641", "t3": "0.224", "t4": "0.45"},
            "thetaH": {"t1": "0.7", "t2": "0.939", "t3": "0.361"},
        }
    )
    verdict = mcsched.dual_rate_test(ts, dual)
    assert not verdict["schedulable"]
    assert verdict["reason"]


def test_generate_is_deterministic():
    a = mcsched.generate(2, "0.8", seed=42)
    b = mcsched.generate(2, "0.8", seed=42)
    assert a.to_json() == b.to_json()
    bound = Fraction(a.utilizations()["bound"])
    assert abs(bound - Fraction("0.8")) <= Fraction("0.01")


def test_simulate_accepted_assignment():
    ts = mcsched.TaskSet.from_json(WORKED)
    assignment = mcsched.soma(ts)
    summary = mcsched.simulate(ts, assignment)
    assert summary["all_met"]
    assert summary["met"] == summary["scenarios"]

    scenario = json.dumps({"releases": {"t2": ["0"]}, "switch": {"kind": "job", "task": "t2"}})
    run = mcsched.simulate(ts, assignment, scenario)
    assert run["all_met"]
    assert run["trace"].splitlines()[1] == "core,task,start,end"


def test_experiment_and_weighted_ratio():
    csv = mcsched.run_experiment([2], ["0.6", "0.9"], trials=10, seed=5)
    lines = csv.splitlines()
    assert lines[0] == "m,param_name,param_value,algorithm,accepted,total,ratio"
    assert len(lines) == 5
    assert csv == mcsched.run_experiment([2], ["0.6", "0.9"], trials=10, seed=5)
    war = Fraction(mcsched.weighted_acceptance_ratio(csv, 2, "soma"))
    assert 0 <= war <= 1


def test_bad_input_raises_value_error():
    with pytest.raises(ValueError):
        mcsched.TaskSet.from_json('{"m": 2, "tasks": [{"id": "a", "T": 7}]}')
