from __future__ import annotations

import base64
import json
import os

import httpx
import pytest

from designgen.clients import (
    CachedImageGen,
    CachedMultimodal,
    CachedTextGen,
    CallRecorder,
    HttpImageGen,
    HttpMultimodal,
    HttpTextGen,
    MockImageGen,
    MockMultimodal,
    MockTextGen,
    ResponseCache,
    SamplingParams,
)
from designgen.errors import BackendFailure, ConfigError
from designgen.image import RasterImage
from designgen.jsonx import extract_json_object
from designgen.plan import parse_design_plan

SAMPLING = SamplingParams(seed=3)


def test_mock_text_deterministic_across_instances():
    prompt = 'please produce "captions" and the rest'
    a = MockTextGen().complete(prompt, SAMPLING)
    b = MockTextGen().complete(prompt, SAMPLING)
    assert a == b
    assert MockTextGen().complete(prompt, SamplingParams(seed=4)) != a


def test_mock_text_plan_reply_is_valid_plan():
    prompt = 'reply with "captions" etc'
    plan = parse_design_plan(MockTextGen().complete(prompt, SAMPLING))
    assert plan.keywords


def test_mock_text_intention_reply_is_sentence():
    reply = MockTextGen().complete("write the request sentence", SAMPLING)
    assert "{" not in reply
    assert reply.strip()


def test_mock_image_shape_and_blank_region():
    img = MockImageGen().generate(["a prompt"], 200, 100, 1)
    assert (img.width_px, img.height_px) == (200, 100)
    # Upper-third reserved region is near-white.
    assert tuple(img.arr[20, 100][:3]) == (245, 245, 240)
    assert img == MockImageGen().generate(["a prompt"], 200, 100, 1)
    assert img != MockImageGen().generate(["other"], 200, 100, 1)


def test_mock_multimodal_typography_reads_input_block():
    request = (
        'Place texts.\nINPUT: {"texts": ["BIG", "small"], "canvas": {"width_px": 500, '
        '"height_px": 400}}\nschema uses "font_family" key'
    )
    image = MockImageGen().generate(["x"], 32, 32, 0)
    reply = MockMultimodal().complete(image, request, SAMPLING)
    obj = extract_json_object(reply)
    assert [t["text"] for t in obj["texts"]] == ["BIG", "small"]
    assert obj["texts"][0]["font_size_px"] == pytest.approx(0.08 * 400)
    assert obj["texts"][1]["font_size_px"] == pytest.approx(0.05 * 400)
    assert all(t["top"] + 0.02 < 1 / 3 for t in obj["texts"])


def test_mock_multimodal_judge_scores_in_range():
    image = MockImageGen().generate(["x"], 32, 32, 0)
    reply = MockMultimodal().complete(image, 'scoring with "innovation" aspect', SAMPLING)
    scores = json.loads(reply)
    assert len(scores) == 5
    assert all(1.0 <= v <= 10.0 for v in scores.values())


def test_mock_multimodal_extraction_kinds():
    image = MockImageGen().generate(["x"], 32, 32, 0)
    mm = MockMultimodal()
    for kind in ("description", "keywords", "captions", "headings"):
        reply = mm.complete(image, f'extract as {{"{kind}": ...}}', SAMPLING)
        assert kind in json.loads(reply)


def test_recorder_counts():
    recorder = CallRecorder()
    MockTextGen(recorder).complete("x", SAMPLING)
    MockImageGen(recorder).generate(["x"], 16, 16, 0)
    assert recorder.count("text") == 1
    assert recorder.count("image") == 1
    assert recorder.network_calls == 0
    assert recorder.total_calls == 2


def _transport(handler) -> httpx.MockTransport:
    return httpx.MockTransport(handler)


def test_http_text_gen_payload_and_reply():
    seen = {}

    def handler(request: httpx.Request) -> httpx.Response:
        seen["url"] = str(request.url)
        seen["payload"] = json.loads(request.content)
        seen["auth"] = request.headers.get("authorization")
        return httpx.Response(200, json={"choices": [{"message": {"content": "hi"}}]})

    os.environ["TEST_TOKEN_X"] = "sekrit"
    recorder = CallRecorder()
    client = HttpTextGen(
        "http://svc.local", "m1", auth_env="TEST_TOKEN_X",
        recorder=recorder, transport=_transport(handler),
    )
    reply = client.complete("hello", SamplingParams(temperature=0.2, seed=9, max_tokens=55))
    assert reply == "hi"
    assert seen["url"].endswith("/v1/chat/completions")
    assert seen["payload"]["model"] == "m1"
    assert seen["payload"]["messages"][0]["content"] == "hello"
    assert seen["payload"]["temperature"] == 0.2
    assert seen["payload"]["seed"] == 9
    assert seen["payload"]["max_tokens"] == 55
    assert seen["auth"] == "Bearer sekrit"
    assert recorder.network_calls == 1


def test_http_text_gen_missing_auth_env():
    os.environ.pop("TEST_TOKEN_MISSING", None)
    with pytest.raises(ConfigError):
        HttpTextGen("http://svc.local", "m", auth_env="TEST_TOKEN_MISSING")


def test_http_retries_on_5xx_then_succeeds():
    calls = {"n": 0}

    def handler(request: httpx.Request) -> httpx.Response:
        calls["n"] += 1
        if calls["n"] < 3:
            return httpx.Response(503)
        return httpx.Response(200, json={"choices": [{"message": {"content": "ok"}}]})

    client = HttpTextGen(
        "http://svc.local", "m", retries=3, backoff_s=0, transport=_transport(handler)
    )
    assert client.complete("p", SAMPLING) == "ok"
    assert calls["n"] == 3


def test_http_gives_up_after_retries():
    def handler(request: httpx.Request) -> httpx.Response:
        return httpx.Response(500)

    client = HttpTextGen(
        "http://svc.local", "m", retries=2, backoff_s=0, transport=_transport(handler)
    )
    with pytest.raises(BackendFailure):
        client.complete("p", SAMPLING)


def test_http_4xx_fails_immediately():
    calls = {"n": 0}

    def handler(request: httpx.Request) -> httpx.Response:
        calls["n"] += 1
        return httpx.Response(400, text="bad request")

    client = HttpTextGen(
        "http://svc.local", "m", retries=3, backoff_s=0, transport=_transport(handler)
    )
    with pytest.raises(BackendFailure):
        client.complete("p", SAMPLING)
    assert calls["n"] == 1


def test_http_multimodal_sends_image_data_url():
    seen = {}

    def handler(request: httpx.Request) -> httpx.Response:
        seen["payload"] = json.loads(request.content)
        return httpx.Response(200, json={"choices": [{"message": {"content": "done"}}]})

    image = RasterImage.filled(8, 8, (1, 2, 3, 255))
    client = HttpMultimodal("http://svc.local", "mm", transport=_transport(handler))
    assert client.complete(image, "look", SAMPLING) == "done"
    parts = seen["payload"]["messages"][0]["content"]
    assert parts[0] == {"type": "text", "text": "look"}
    url = parts[1]["image_url"]["url"]
    assert url.startswith("data:image/png;base64,")
    decoded = RasterImage.from_png_bytes(base64.b64decode(url.split(",", 1)[1]))
    assert decoded == image


def test_http_image_gen_png_response():
    expected = RasterImage.filled(16, 16, (9, 8, 7, 255))

    def handler(request: httpx.Request) -> httpx.Response:
        payload = json.loads(request.content)
        assert payload["prompt_chunks"] == ["a", "b"]
        assert payload["width"] == 16 and payload["height"] == 16
        assert payload["seed"] == 4
        return httpx.Response(200, content=expected.to_png_bytes(),
                              headers={"content-type": "image/png"})

    client = HttpImageGen("http://svc.local", transport=_transport(handler))
    assert client.generate(["a", "b"], 16, 16, 4) == expected


def test_http_image_gen_b64_json_response():
    expected = RasterImage.filled(8, 8, (1, 1, 1, 255))

    def handler(request: httpx.Request) -> httpx.Response:
        b64 = base64.b64encode(expected.to_png_bytes()).decode()
        return httpx.Response(200, json={"image_b64": b64})

    client = HttpImageGen("http://svc.local", transport=_transport(handler))
    assert client.generate(["p"], 8, 8, 0) == expected


def test_http_image_gen_undecodable_reply():
    def handler(request: httpx.Request) -> httpx.Response:
        return httpx.Response(200, json={"nope": True})

    client = HttpImageGen("http://svc.local", transport=_transport(handler))
    with pytest.raises(BackendFailure):
        client.generate(["p"], 8, 8, 0)


class CountingText:
    def __init__(self):
        self.calls = 0

    def complete(self, prompt, sampling):
        self.calls += 1
        return f"reply:{prompt}:{sampling.seed}"


def test_cached_text_hits_on_identical_request(tmp_path):
    inner = CountingText()
    cached = CachedTextGen(inner, ResponseCache(tmp_path))
    a = cached.complete("p", SAMPLING)
    b = cached.complete("p", SAMPLING)
    assert a == b
    assert inner.calls == 1
    cached.complete("p", SamplingParams(seed=99))
    assert inner.calls == 2


def test_cached_image_and_multimodal(tmp_path):
    cache = ResponseCache(tmp_path)

    class CountingImage:
        calls = 0

        def generate(self, chunks, w, h, seed):
            self.calls += 1
            return MockImageGen().generate(chunks, w, h, seed)

    inner = CountingImage()
    cached = CachedImageGen(inner, cache)
    a = cached.generate(["x"], 16, 16, 1)
    b = cached.generate(["x"], 16, 16, 1)
    assert a == b and inner.calls == 1

    class CountingMM:
        calls = 0

        def complete(self, image, prompt, sampling):
            self.calls += 1
            return "mm-reply"

    mm = CountingMM()
    cached_mm = CachedMultimodal(mm, cache)
    image = MockImageGen().generate(["y"], 8, 8, 0)
    assert cached_mm.complete(image, "p", SAMPLING) == "mm-reply"
    assert cached_mm.complete(image, "p", SAMPLING) == "mm-reply"
    assert mm.calls == 1
