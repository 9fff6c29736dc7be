"""Pipeline configuration: JSON file + flag overrides, client construction."""
from __future__ import annotations

import json
from dataclasses import dataclass, field, replace
from pathlib import Path

from .clients import (
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
)
from .document import Canvas
from .errors import ConfigError
from .fonts import FontCatalog

SERVICE_KINDS = ("text", "image", "multimodal", "judge")


@dataclass(frozen=True)
class ServiceConfig:
    base_url: str | None = None
    model: str = ""
    auth_env: str | None = None


@dataclass(frozen=True)
class PipelineConfig:
    mock: bool = False
    seed: int = 0
    canvas: Canvas = field(default_factory=lambda: Canvas(1024, 1024))
    image_size: tuple[int, int] = (1024, 1024)
    font_dir: str | None = None
    wrap: bool = True
    retries: int = 3
    max_in_flight: int = 4
    token_budget: int = 77
    exemplar_store: str | None = None
    min_area_px: int = 500_000
    cache_enabled: bool = False
    cache_eval: bool = False
    cache_dir: str = ".designgen-cache"
    services: dict[str, ServiceConfig] = field(default_factory=dict)

    def service(self, kind: str) -> ServiceConfig:
        return self.services.get(kind, ServiceConfig())


def load_config(path: Path | str | None) -> PipelineConfig:
    if path is None:
        return PipelineConfig()
    try:
        obj = json.loads(Path(path).read_text("utf-8"))
    except FileNotFoundError:
        raise ConfigError(f"config file not found: {path}") from None
    except json.JSONDecodeError as e:
        raise ConfigError(f"config file is not valid JSON: {e}") from e
    if not isinstance(obj, dict):
        raise ConfigError("config root must be a JSON object")

    services = {}
    for kind, svc in obj.get("services", {}).items():
        if kind not in SERVICE_KINDS:
            raise ConfigError(f"unknown service kind {kind!r}")
        services[kind] = ServiceConfig(
            base_url=svc.get("base_url"),
            model=svc.get("model", ""),
            auth_env=svc.get("auth_env"),
        )
    canvas_obj = obj.get("canvas", {})
    canvas = Canvas(int(canvas_obj.get("width_px", 1024)), int(canvas_obj.get("height_px", 1024)))
    size_obj = obj.get("image_size", {})
    image_size = (int(size_obj.get("width_px", 1024)), int(size_obj.get("height_px", 1024)))
    cache_obj = obj.get("cache", {})
    try:
        return PipelineConfig(
            mock=bool(obj.get("mock", False)),
            seed=int(obj.get("seed", 0)),
            canvas=canvas,
            image_size=image_size,
            font_dir=obj.get("font_dir"),
            wrap=bool(obj.get("wrap", True)),
            retries=int(obj.get("retries", 3)),
            max_in_flight=int(obj.get("max_in_flight", 4)),
            token_budget=int(obj.get("token_budget", 77)),
            exemplar_store=obj.get("exemplar_store"),
            min_area_px=int(obj.get("min_area_px", 500_000)),
            cache_enabled=bool(cache_obj.get("enabled", False)),
            cache_eval=bool(cache_obj.get("eval", False)),
            cache_dir=str(cache_obj.get("dir", ".designgen-cache")),
            services=services,
        )
    except (TypeError, ValueError) as e:
        raise ConfigError(f"invalid config value: {e}") from e


def apply_overrides(config: PipelineConfig, **overrides) -> PipelineConfig:
    """Apply non-None CLI flag values over the file config."""
    fields = {k: v for k, v in overrides.items() if v is not None}
    return replace(config, **fields) if fields else config


def validate_for_command(config: PipelineConfig, needed: tuple[str, ...]) -> None:
    """Mock mode needs no endpoints; live mode needs every service the command uses."""
    if config.mock:
        return
    for kind in needed:
        if not config.service(kind).base_url:
            raise ConfigError(
                f"live mode requires services.{kind}.base_url (or pass --mock)"
            )


@dataclass
class ClientSet:
    text: object | None = None
    image: object | None = None
    multimodal: object | None = None
    judge: object | None = None
    recorder: CallRecorder = field(default_factory=CallRecorder)


def build_clients(
    config: PipelineConfig,
    needed: tuple[str, ...] = SERVICE_KINDS,
    transport=None,
) -> ClientSet:
    """Construct the clients a command needs (mock or HTTP, optionally cached)."""
    recorder = CallRecorder()
    clients = ClientSet(recorder=recorder)
    cache = ResponseCache(config.cache_dir) if config.cache_enabled or config.cache_eval else None

    for kind in needed:
        if config.mock:
            if kind == "text":
                client = MockTextGen(recorder)
            elif kind == "image":
                client = MockImageGen(recorder)
            else:
                client = MockMultimodal(recorder)
        else:
            svc = config.service(kind)
            common = dict(
                auth_env=svc.auth_env,
                retries=config.retries,
                max_in_flight=config.max_in_flight,
                recorder=recorder,
                transport=transport,
            )
            if kind == "text":
                client = HttpTextGen(svc.base_url, svc.model, **common)
            elif kind == "image":
                client = HttpImageGen(svc.base_url, svc.model, **common)
            else:
                client = HttpMultimodal(svc.base_url, svc.model, kind=kind, **common)
        if cache is not None:
            use_cache = config.cache_enabled if kind != "judge" else config.cache_eval
            if use_cache:
                if kind == "text":
                    client = CachedTextGen(client, cache)
                elif kind == "image":
                    client = CachedImageGen(client, cache)
                else:
                    client = CachedMultimodal(client, cache, kind=kind)
        setattr(clients, kind, client)
    return clients


def fonts_for(config: PipelineConfig) -> FontCatalog:
    if config.font_dir:
        return FontCatalog.load_dir(config.font_dir)
    return FontCatalog.bundled()
