import json
import random

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from debench.bench import (
    AlgorithmConfig,
    TrialRecord,
    aggregate_report,
    check_termination,
    load_records,
    rank_function,
    rank_records,
    run_trials,
)
from debench.core import ConfigurationError, ControlParams
from debench.exec import ExecutionModel
from debench.termination import StoppingRule, default_max_fes


class S:
    def __init__(self, best, fe):
        self.best_fitness, self.fe_count = best, fe


def rec(algo, err, wc=1.0, fid=1, seed=0, solved=None, np_=0):
    solved = err <= 1e-8 if solved is None else solved
    return TrialRecord(algo, fid, 50, seed, err, 100, wc, solved, np_)


# --- termination -------------------------------------------------------------------


def test_termination_examples():
    rule = StoppingRule(1000)
    assert check_termination(S(5e-9, 100), rule).reason == "solved"
    assert check_termination(S(1.0, 1000), rule).reason == "budget"
    assert not check_termination(S(1.0, 999), rule)


def test_default_budgets():
    assert default_max_fes(50) == 5_000_000 and default_max_fes(100) == 10_000_000
    assert StoppingRule.for_dimension(50).target_error == 1e-8
    with pytest.raises(ValueError):
        StoppingRule(0)


# --- ranking ---------------------------------------------------------------------------


def test_hand_example_scores():
    trials = [rec("A", e) for e in (0.1, 0.2, 0.3)] + [rec("B", e) for e in (1.0, 2.0, 3.0)]
    fr = rank_function(trials)
    assert fr.scores == {"A": 9.0, "B": 0.0}
    assert sorted(fr.ranks["A"]) == [4.0, 5.0, 6.0]


def test_full_tie():
    n, m = 3, 2
    trials = [rec(a, 1.0) for a in "AB" for _ in range(n)]
    fr = rank_function(trials)
    for a in "AB":
        assert fr.ranks[a] == [(n * m + 1) / 2] * n
        assert fr.scores[a] == n * (n * m + 1) / 2 - n * (n + 1) / 2


def test_comparator_order():
    trials = [rec("slow", 0.0, wc=2.0), rec("fast", 0.0, wc=1.0), rec("unsolved", 5.0, wc=0.1)]
    fr = rank_function(trials)
    assert (fr.ranks["slow"], fr.ranks["fast"], fr.ranks["unsolved"]) == ([2.0], [3.0], [1.0])


def test_unsolved_ties_ignore_wall_clock():
    fr = rank_function([rec("A", 3.0, wc=1.0), rec("B", 3.0, wc=9.0)])
    assert fr.ranks["A"] == fr.ranks["B"] == [1.5]


def test_wall_clock_compared_at_millisecond_resolution():
    fr = rank_function([rec("A", 0.0, wc=1.0001), rec("B", 0.0, wc=1.0004)])
    assert fr.ranks["A"] == fr.ranks["B"]


def test_unequal_trial_counts_rejected():
    with pytest.raises(ConfigurationError):
        rank_function([rec("A", 1.0), rec("A", 2.0), rec("B", 1.0)])


def test_mixed_functions_rejected():
    with pytest.raises(ValueError):
        rank_function([rec("A", 1.0, fid=1), rec("B", 1.0, fid=2)])


trial_sets = st.integers(1, 6).flatmap(
    lambda n: st.integers(2, 5).flatmap(
        lambda m: st.lists(
            st.tuples(st.booleans(), st.sampled_from([0.001, 0.002, 1.0, 2.5]), st.floats(0, 100).map(lambda v: round(v, 1))),
            min_size=n * m,
            max_size=n * m,
        ).map(lambda rows: (n, m, rows))
    )
)


def build(n, m, rows):
    out = []
    for k, (solved, wc, err) in enumerate(rows):
        a = f"A{k // n}"
        out.append(rec(a, 0.0 if solved else err + 1.0, wc=wc, seed=k % n))
    return out


@given(trial_sets)
def test_rank_sum_conservation(data):
    n, m, rows = data
    fr = rank_function(build(n, m, rows))
    total = sum(s + n * (n + 1) / 2 for s in fr.scores.values())
    assert total == pytest.approx(n * m * (n * m + 1) / 2)


@given(trial_sets, st.randoms())
def test_permutation_invariance(data, rnd):
    n, m, rows = data
    trials = build(n, m, rows)
    shuffled = trials[:]
    rnd.shuffle(shuffled)
    assert rank_function(trials).scores == rank_function(shuffled).scores


@given(trial_sets, st.data())
def test_score_monotonicity(data, draw):
    n, m, rows = data
    trials = build(n, m, rows)
    k = draw.draw(st.integers(0, len(trials) - 1))
    t = trials[k]
    if t.solved:
        better = TrialRecord(t.algorithm_id, 1, 50, t.seed, 0.0, 100, max(0.0, t.wall_clock_seconds - 0.5), True)
    else:
        better = TrialRecord(t.algorithm_id, 1, 50, t.seed, t.final_error / 2, 100, t.wall_clock_seconds, False)
    improved = trials[:k] + [better] + trials[k + 1:]
    assert rank_function(improved).scores[t.algorithm_id] >= rank_function(trials).scores[t.algorithm_id]


def test_aggregate_single_function():
    fr = rank_function([rec("A", 1.0), rec("B", 2.0)])
    rep = aggregate_report([fr])
    assert rep.final_scores == fr.scores
    assert rep.conserved()


def test_aggregate_tied_final():
    f1 = rank_function([rec(a, e, fid=1, seed=s) for a, es in (("A", (1, 2, 3)), ("B", (4, 5, 6))) for s, e in enumerate(es)])
    f2 = rank_function([rec(a, e, fid=2, seed=s) for a, es in (("A", (4, 5, 6)), ("B", (1, 2, 3))) for s, e in enumerate(es)])
    rep = aggregate_report([f1, f2])
    assert rep.final_scores == {"A": 9.0, "B": 9.0}
    assert rep.final_placement() == {"A": 1, "B": 1}


def test_aggregate_rejects_mismatched_algorithms():
    with pytest.raises(ConfigurationError):
        aggregate_report([rank_function([rec("A", 1.0), rec("B", 2.0)]),
                          rank_function([rec("A", 1.0, fid=2), rec("C", 2.0, fid=2)])])


def synthetic_table4(n=3, seed=0):
    rnd = random.Random(seed)
    records = []
    for algo in ("ide", "jde"):
        for NP in (50, 100, 250, 500):
            for fid in range(1, 11):
                for t in range(n):
                    err = rnd.random() * (2.0 if algo == "ide" else 1.0)
                    records.append(TrialRecord(f"{algo}-NP{NP}", fid, 100, t, err, 10, 1.0, False, NP))
    return records


def test_table4_layout():
    rep = rank_records(synthetic_table4())
    assert rep.header() == ["algorithm", "NP"] + [f"F{f:02d}" for f in range(1, 11)] + ["Rank"]
    rows = rep.rows()
    assert len(rows) == 8
    assert [r[1] for r in rows] == [50, 100, 250, 500] * 2
    for col in range(2, 13):
        assert sorted(r[col] for r in rows)[0] == 1
    assert rep.conserved()
    text = rep.to_table()
    assert "Rank" in text.splitlines()[0] and len(text.splitlines()) == 10
    assert rep.to_csv().splitlines()[0].endswith("Rank,final_score")


# --- records and trial running ------------------------------------------------------------


def test_record_json_round_trip(tmp_path):
    r = rec("A", 0.5, wc=1.25, np_=10)
    d = json.loads(r.to_json())
    assert TrialRecord.from_dict(d) == r
    with pytest.raises(ValueError):
        TrialRecord.from_dict({"algorithm_id": "A"})


def test_load_ignores_truncated_tail(tmp_path):
    p = tmp_path / "r.jsonl"
    p.write_text(rec("A", 1.0).to_json() + "\n" + '{"algorithm_id": "A", "func')
    assert len(load_records(p)) == 1
    p.write_text('{"bad json\n' + rec("A", 1.0).to_json() + "\n")
    with pytest.raises(ValueError, match=":1"):
        load_records(p)


ALGOS = [
    AlgorithmConfig(ControlParams(NP=8), ExecutionModel("fused", workers=2)),
    AlgorithmConfig(ControlParams(NP=8, jde=True, CR=0.9), ExecutionModel("sequential")),
]


def test_run_trials_counts_and_seeds(tmp_path):
    recs = run_trials(ALGOS, [1, 3], [10], 3, base_seed=100, max_fes=80, out_path=tmp_path / "r.jsonl")
    assert len(recs) == 2 * 2 * 3
    assert sorted({r.seed for r in recs}) == [100, 101, 102]
    assert all(r.fes_used <= 80 and r.solved == (r.final_error <= 1e-8) for r in recs)
    assert len(load_records(tmp_path / "r.jsonl")) == 12
    assert {r.algorithm_id for r in recs} == {"de-fused-NP8", "jde-sequential-NP8"}


def test_run_trials_deterministic_and_model_independent():
    seq = [AlgorithmConfig(ControlParams(NP=8), ExecutionModel("sequential"), name="x")]
    ms = [AlgorithmConfig(ControlParams(NP=8), ExecutionModel("master_slave", workers=3), name="x")]
    a = run_trials(seq, [4], [10], 2, max_fes=160)
    b = run_trials(ms, [4], [10], 2, max_fes=160)
    assert [r.final_error for r in a] == [r.final_error for r in b]


def test_run_trials_resumes(tmp_path):
    out = tmp_path / "r.jsonl"
    first = run_trials(ALGOS[:1], [1], [10], 2, max_fes=80, out_path=out)
    seen = []
    again = run_trials(ALGOS[:1], [1], [10], 3, max_fes=80, out_path=out, on_record=seen.append)
    assert [r.seed for r in seen] == [2]
    assert again[:2] == first
    assert len(load_records(out)) == 3


def test_run_trials_repairs_truncated_file(tmp_path):
    out = tmp_path / "r.jsonl"
    run_trials(ALGOS[:1], [1], [10], 1, max_fes=80, out_path=out)
    with open(out, "a") as fh:
        fh.write('{"partial": ')
    run_trials(ALGOS[:1], [1], [10], 2, max_fes=80, out_path=out)
    assert [r.seed for r in load_records(out)] == [0, 1]


def test_concurrency_only_for_accuracy_runs():
    with pytest.raises(ConfigurationError):
        run_trials(ALGOS, [1], [10], 2, max_fes=80, processes=2)
    with pytest.raises(ConfigurationError):
        run_trials(ALGOS, [1], [10], 0)


@pytest.mark.slow
def test_process_pool_matches_serial():
    a = run_trials(ALGOS, [2], [10], 2, max_fes=80)
    b = run_trials(ALGOS, [2], [10], 2, max_fes=80, processes=2, accuracy_only=True)
    assert [r.final_error for r in a] == [r.final_error for r in b]
