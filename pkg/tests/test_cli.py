from __future__ import annotations

import json

from click.testing import CliRunner

from designgen.cli import main
from designgen.image import RasterImage
from designgen.jsonx import canonical_json

from corpus_builders import write_corpus_dir

runner = CliRunner()


def run_cli(*args):
    return runner.invoke(main, [str(a) for a in args], catch_exceptions=False)


def test_generate_single_mock(tmp_path):
    out = tmp_path / "run"
    result = run_cli("--mock", "--seed", 5, "generate", "A flyer for a bake sale", "--out", out)
    assert result.exit_code == 0, result.output
    for name in ("plan.json", "image.png", "typography.json", "final.png", "manifest.json"):
        assert (out / name).is_file()
    manifest = json.loads((out / "manifest.json").read_text())
    assert manifest["failed_stage"] is None
    assert manifest["client_calls"]["network"] == 0


def test_generate_rerun_byte_identical(tmp_path):
    args = ("--mock", "--seed", 9, "generate", "A poster for a night market")
    run_cli(*args, "--out", tmp_path / "a")
    run_cli(*args, "--out", tmp_path / "b")
    for name in ("plan.json", "image.png", "typography.json", "final.png"):
        assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()


def test_generate_batch(tmp_path, intentions_path):
    batch = tmp_path / "ten.txt"
    batch.write_text("\n".join(intentions_path.read_text().splitlines()[:10]) + "\n")
    out = tmp_path / "batch"
    result = run_cli("--mock", "--seed", 1, "generate", "--batch", batch, "--out", out)
    assert result.exit_code == 0, result.output
    finals = sorted(out.glob("item_*/final.png"))
    assert len(finals) == 10
    manifests = sorted(out.glob("item_*/manifest.json"))
    assert len(manifests) == 10


def test_generate_requires_intention_or_batch(tmp_path):
    result = run_cli("--mock", "generate", "--out", tmp_path)
    assert result.exit_code == 2


def test_generate_stage_failure_keeps_earlier_artifacts(tmp_path):
    # A one-exemplar store cannot satisfy 5-shot sampling: plan stage fails.
    store = tmp_path / "store.jsonl"
    exemplar = {
        "intention": "x",
        "plan": {
            "description": "d", "keywords": ["k"],
            "captions": {"background": "b", "objects": "o"},
            "headings": {"heading": ["H"], "subheading": []},
        },
    }
    store.write_text(json.dumps(exemplar) + "\n")
    out = tmp_path / "run"
    result = run_cli("--mock", "generate", "An intention", "--out", out, "--exemplars", store)
    assert result.exit_code == 3
    manifest = json.loads((out / "manifest.json").read_text())
    assert manifest["failed_stage"] == "design_plan"
    assert not (out / "image.png").exists()
    assert not (out / "final.png").exists()


def test_live_mode_without_endpoints_is_input_error(tmp_path):
    result = run_cli("generate", "An intention", "--out", tmp_path)
    assert result.exit_code == 2
    assert "base_url" in result.output


def test_bad_config_file(tmp_path):
    config = tmp_path / "config.json"
    config.write_text("{ not json")
    result = run_cli("--config", config, "--mock", "generate", "x", "--out", tmp_path / "o")
    assert result.exit_code == 2


def test_config_file_drives_defaults(tmp_path):
    config = tmp_path / "config.json"
    config.write_text(json.dumps({"mock": True, "seed": 4, "canvas": {"width_px": 200, "height_px": 150}}))
    out = tmp_path / "run"
    result = run_cli("--config", config, "generate", "A banner", "--out", out)
    assert result.exit_code == 0, result.output
    final = RasterImage.load_png(out / "final.png")
    assert (final.width_px, final.height_px) == (200, 150)


def test_render_command(tmp_path, fonts):
    from designgen.raster import resample_to_canvas
    from designgen.document import Canvas

    background = RasterImage.filled(64, 64, (10, 60, 110, 255))
    background.save_png(tmp_path / "bg.png")
    typography = {
        "texts": [{
            "text": "HELLO", "font_family": "BlockMono", "font_size_px": 12,
            "color": "#ffffff", "left": 0.1, "top": 0.1, "width": 0.8,
        }]
    }
    (tmp_path / "typ.json").write_text(json.dumps(typography))
    out = tmp_path / "final.png"
    result = run_cli(
        "--mock", "render", "--image", tmp_path / "bg.png", "--typography",
        tmp_path / "typ.json", "--canvas", "100x80", "--out", out,
    )
    assert result.exit_code == 0, result.output
    rendered = RasterImage.load_png(out)
    assert (rendered.width_px, rendered.height_px) == (100, 80)

    # Empty typography renders exactly the resampled background.
    (tmp_path / "empty.json").write_text(json.dumps({"texts": []}))
    out2 = tmp_path / "plain.png"
    run_cli("--mock", "render", "--image", tmp_path / "bg.png", "--typography",
            tmp_path / "empty.json", "--canvas", "100x80", "--out", out2)
    expected = resample_to_canvas(background, Canvas(100, 80))
    assert RasterImage.load_png(out2) == expected


def test_render_corrupt_typography_names_file(tmp_path):
    background = RasterImage.filled(32, 32, (0, 0, 0, 255))
    background.save_png(tmp_path / "bg.png")
    (tmp_path / "typ.json").write_text("no json in here")
    result = run_cli("render", "--image", tmp_path / "bg.png",
                     "--typography", tmp_path / "typ.json", "--out", tmp_path / "o.png")
    assert result.exit_code == 2
    assert "typ.json" in result.output


def test_synth_command_and_resume(tmp_path):
    corpus = tmp_path / "corpus"
    write_corpus_dir(corpus, n_docs=3)
    out = tmp_path / "synth"
    result = run_cli("--mock", "--seed", 2, "--max-in-flight", 1, "synth",
                     "--corpus", corpus, "--out", out)
    assert result.exit_code == 0, result.output
    exemplars = (out / "exemplars.jsonl").read_text().strip().splitlines()
    assert len(exemplars) == 3
    report = json.loads((out / "report.json").read_text())
    assert report["documents"] == 3
    assert report["exemplars"] == 3
    assert report["pairs"] == 3
    assert report["client_calls"]["network"] == 0

    # Resume over a complete journal issues zero client calls.
    result = run_cli("--mock", "--seed", 2, "--max-in-flight", 1, "synth",
                     "--corpus", corpus, "--out", out)
    assert result.exit_code == 0
    report2 = json.loads((out / "report.json").read_text())
    assert report2["client_calls"].get("text", 0) == 0
    assert report2["client_calls"].get("multimodal", 0) == 0
    assert report2["docs_fully_journaled"] == 3
    assert report2["exemplars"] == 3


def test_synth_area_filter_in_report(tmp_path):
    from designgen.document import Canvas

    corpus = tmp_path / "corpus"
    write_corpus_dir(corpus, n_docs=2, canvas=Canvas(700, 700))  # 490k px: filtered
    out = tmp_path / "synth"
    result = run_cli("--mock", "synth", "--corpus", corpus, "--out", out)
    assert result.exit_code == 0, result.output
    report = json.loads((out / "report.json").read_text())
    assert report["filtered"] == 2
    assert report["pairs"] == 0
    assert (out / "pairs.jsonl").read_text() == ""


def test_eval_command(tmp_path, benchmark_path):
    # Three prompts, two images: one failure recorded.
    lines = benchmark_path.read_text().splitlines()[:3]
    bench = tmp_path / "bench.jsonl"
    bench.write_text("\n".join(lines) + "\n")
    ids = [json.loads(l)["id"] for l in lines]
    images = tmp_path / "images"
    images.mkdir()
    for pid in ids[:2]:
        RasterImage.filled(48, 48, (90, 120, 150, 255)).save_png(images / f"{pid}.png")

    out = tmp_path / "eval"
    result = run_cli("--mock", "--seed", 3, "eval", "--benchmark", bench,
                     "--images", images, "--out", out)
    assert result.exit_code == 0, result.output
    report = json.loads((out / "report.json").read_text())
    assert len(report["rows"]) == 2
    assert len(report["failures"]) == 1
    assert report["failures"][0]["id"] == ids[2]
    assert abs(report["overall_mean"] - sum(report["aspect_means"].values()) / 5) < 1e-12
    assert (out / "scores.csv").is_file()
    assert (out / "figures" / "aspect_means.png").is_file()


def test_eval_malformed_benchmark(tmp_path):
    bench = tmp_path / "bad.jsonl"
    bench.write_text('{"id": "x", "category": "bogus", "intention": "i"}\n')
    images = tmp_path / "images"
    images.mkdir()
    result = run_cli("--mock", "eval", "--benchmark", bench, "--images", images,
                     "--out", tmp_path / "out")
    assert result.exit_code == 2


def test_canonical_json_helper_used_by_manifests(tmp_path):
    # Manifests are canonical: stable under re-serialization.
    out = tmp_path / "run"
    run_cli("--mock", "generate", "A stable manifest", "--out", out)
    raw = (out / "manifest.json").read_text()
    assert canonical_json(json.loads(raw)) == raw
