from __future__ import annotations

import json
from collections import Counter

import pytest

from designgen.clients.base import SamplingParams
from designgen.clients.mock import MockImageGen, MockMultimodal
from designgen.errors import EmptyInput, InvalidScores, MalformedBenchmark, NoJsonFound
from designgen.evaluation import (
    ASPECTS,
    CATEGORIES,
    AspectScores,
    BenchmarkPrompt,
    aggregate,
    build_judge_prompt,
    evaluate_run,
    load_benchmark,
    parse_scores,
    report_to_dict,
    round_display,
)
from designgen.plan import Intention
from designgen.reporting import write_eval_outputs


def scores(*values: float) -> AspectScores:
    return AspectScores(**dict(zip(ASPECTS, values)))


def prompt_for(pid: str, category: str = "advertising") -> BenchmarkPrompt:
    return BenchmarkPrompt(id=pid, category=category, intention=Intention(f"intention {pid}"))


def test_load_benchmark_fixture_partitions_into_six_categories(benchmark_path):
    prompts = load_benchmark(benchmark_path)
    assert len(prompts) == 200
    counts = Counter(p.category for p in prompts)
    assert set(counts) == set(CATEGORIES)
    assert sum(counts.values()) == 200
    assert len({p.id for p in prompts}) == 200


def test_load_empty_file(tmp_path):
    path = tmp_path / "empty.jsonl"
    path.write_text("")
    assert load_benchmark(path) == []


def test_load_rejects_duplicate_id(tmp_path):
    path = tmp_path / "dup.jsonl"
    line = json.dumps({"id": "a-1", "category": "events", "intention": "x"})
    path.write_text(line + "\n" + line + "\n")
    with pytest.raises(MalformedBenchmark) as err:
        load_benchmark(path)
    assert err.value.line_no == 2


@pytest.mark.parametrize("bad,line_no", [
    ('{"id": "a", "category": "nope", "intention": "x"}', 1),
    ('{"category": "events", "intention": "x"}', 1),
    ('{"id": "a", "category": "events"}', 1),
    ("not json", 1),
])
def test_load_malformed_lines_carry_line_numbers(tmp_path, bad, line_no):
    path = tmp_path / "bad.jsonl"
    path.write_text(bad + "\n")
    with pytest.raises(MalformedBenchmark) as err:
        load_benchmark(path)
    assert err.value.line_no == line_no


def test_judge_prompt_names_aspects_and_scale():
    prompt = build_judge_prompt(Intention("A cat poster"))
    for aspect in ASPECTS:
        assert f'"{aspect}"' in prompt
    assert "1 (poor)" in prompt and "10 (excellent)" in prompt
    assert "A cat poster" in prompt
    assert prompt == build_judge_prompt(Intention("A cat poster"))


def test_judge_prompts_differ_only_in_intention():
    a = build_judge_prompt(Intention("first request")).splitlines()
    b = build_judge_prompt(Intention("second request")).splitlines()
    assert len(a) == len(b)
    different = [(x, y) for x, y in zip(a, b) if x != y]
    assert len(different) == 1
    assert "first request" in different[0][0]


def test_parse_scores_valid():
    raw = json.dumps({a: 6 for a in ASPECTS})
    parsed = parse_scores(raw)
    assert parsed.design_layout == 6.0


def test_parse_scores_range_checked():
    raw = json.dumps({**{a: 5 for a in ASPECTS}, "innovation": 11})
    with pytest.raises(InvalidScores):
        parse_scores(raw)
    raw = json.dumps({**{a: 5 for a in ASPECTS}, "innovation": 0.5})
    with pytest.raises(InvalidScores):
        parse_scores(raw)


def test_parse_scores_missing_key():
    raw = json.dumps({a: 5 for a in ASPECTS[:-1]})
    with pytest.raises(InvalidScores):
        parse_scores(raw)


def test_parse_scores_tolerates_prose_and_fences():
    body = json.dumps({a: 7.5 for a in ASPECTS})
    raw = f"Here is my assessment:\n```json\n{body}\n```\nGreat design."
    assert parse_scores(raw).innovation == 7.5


def test_parse_scores_no_json():
    with pytest.raises(NoJsonFound):
        parse_scores("I would rate this quite highly.")


def test_round_display_half_up():
    assert round_display(6.26) == "6.3"
    assert round_display(6.25) == "6.3"
    assert round_display(6.24) == "6.2"
    assert round_display(5.98) == "6.0"
    assert round_display(7.0) == "7.0"


def test_aggregate_reference_rows():
    report = aggregate([(prompt_for("a"), scores(6.3, 7.0, 5.6, 7.1, 5.3))])
    assert report.overall_mean == pytest.approx(6.26)
    assert round_display(report.overall_mean) == "6.3"
    report = aggregate([(prompt_for("b"), scores(6.0, 6.9, 5.7, 6.2, 5.1))])
    assert report.overall_mean == pytest.approx(5.98)
    assert round_display(report.overall_mean) == "6.0"


def test_aggregate_constant_rows():
    rows = [(prompt_for(f"p{i}", CATEGORIES[i % 6]), scores(7, 7, 7, 7, 7)) for i in range(12)]
    report = aggregate(rows)
    assert report.overall_mean == 7.0
    assert all(v == 7.0 for v in report.aspect_means.values())
    for cat_means in report.category_means.values():
        assert cat_means["overall"] == 7.0


def test_aggregate_permutation_invariant():
    rows = [
        (prompt_for(f"p{i}", CATEGORIES[i % 6]), scores(*(1 + (i * j) % 9 for j in range(1, 6))))
        for i in range(20)
    ]
    forward = aggregate(rows)
    backward = aggregate(rows[::-1])
    assert forward.aspect_means == backward.aspect_means
    assert forward.overall_mean == backward.overall_mean
    assert forward.category_means == backward.category_means


def test_aggregate_overall_is_mean_of_aspect_means():
    rows = [
        (prompt_for(f"p{i}"), scores(*(1 + ((i + j) % 9) + 0.25 for j in range(5))))
        for i in range(17)
    ]
    report = aggregate(rows)
    direct = sum(report.aspect_means.values()) / 5
    assert abs(report.overall_mean - direct) < 1e-12


def test_category_means_reconstruct_global():
    rows = [
        (prompt_for(f"p{i}", CATEGORIES[i % 3]), scores(*(1 + ((i * 7 + j) % 90) / 10 for j in range(5))))
        for i in range(30)
    ]
    report = aggregate(rows)
    for aspect in ASPECTS:
        weighted = sum(
            means[aspect] * means["count"] for means in report.category_means.values()
        )
        total = sum(means["count"] for means in report.category_means.values())
        assert abs(weighted / total - report.aspect_means[aspect]) < 1e-9


def test_aggregate_empty_raises():
    with pytest.raises(EmptyInput):
        aggregate([])


class ConstantJudge:
    def __init__(self, value: float = 7.0):
        self.value = value

    def complete(self, image, prompt, sampling: SamplingParams) -> str:
        return json.dumps({a: self.value for a in ASPECTS})


def _images(prompts):
    return {p.id: MockImageGen().generate([p.id], 32, 32, 0) for p in prompts}


def test_evaluate_run_constant_judge():
    prompts = [prompt_for(f"p{i}", CATEGORIES[i % 6]) for i in range(3)]
    report = evaluate_run(ConstantJudge(), prompts, _images(prompts))
    assert report.overall_mean == 7.0
    assert report.failures == []
    assert len(report.rows) == 3


def test_evaluate_run_missing_image_is_failure():
    prompts = [prompt_for(f"p{i}") for i in range(3)]
    images = _images(prompts[:2])
    report = evaluate_run(ConstantJudge(), prompts, images)
    assert len(report.rows) == 2
    assert len(report.failures) == 1
    assert report.failures[0]["id"] == "p2"
    assert report.failures[0]["error"] == "missing image"


def test_evaluate_run_unparsable_judge_recorded():
    prompts = [prompt_for(f"p{i}") for i in range(3)]

    class FlakyJudge(ConstantJudge):
        def complete(self, image, prompt, sampling):
            if "p1" in prompt:
                return "no scores from me"
            return super().complete(image, prompt, sampling)

    report = evaluate_run(FlakyJudge(), prompts, _images(prompts), max_retries=2)
    assert len(report.rows) == 2
    assert len(report.failures) == 1
    assert "p1" == report.failures[0]["id"]


def test_evaluate_run_with_package_mock_judge_deterministic():
    prompts = [prompt_for(f"p{i}", CATEGORIES[i % 6]) for i in range(4)]
    images = _images(prompts)
    a = evaluate_run(MockMultimodal(), prompts, images, seed=5)
    b = evaluate_run(MockMultimodal(), prompts, images, seed=5)
    assert a.aspect_means == b.aspect_means
    assert all(1.0 <= v <= 10.0 for _, s in a.rows for v in s.as_dict().values())


def test_report_dict_and_outputs(tmp_path):
    prompts = [prompt_for(f"p{i}", CATEGORIES[i % 6]) for i in range(6)]
    report = evaluate_run(ConstantJudge(6.5), prompts, _images(prompts))
    obj = report_to_dict(report)
    assert obj["display"]["overall_mean"] == "6.5"
    assert len(obj["rows"]) == 6

    paths = write_eval_outputs(report, tmp_path)
    assert (tmp_path / "report.json").is_file()
    assert (tmp_path / "scores.csv").is_file()
    assert (tmp_path / "figures" / "aspect_means.png").is_file()
    assert (tmp_path / "figures" / "category_means.png").is_file()
    csv_lines = (tmp_path / "scores.csv").read_text().strip().splitlines()
    assert csv_lines[0].split(",") == ["id", "category", *ASPECTS]
    assert len(csv_lines) == 7
    reread = json.loads((tmp_path / "report.json").read_text())
    assert abs(reread["overall_mean"] - sum(reread["aspect_means"].values()) / 5) < 1e-12
    assert "figures" in paths
