from .base import CallRecorder, ImageGenClient, MultimodalClient, SamplingParams, TextGenClient
from .cache import CachedImageGen, CachedMultimodal, CachedTextGen, ResponseCache
from .http import HttpImageGen, HttpMultimodal, HttpTextGen
from .mock import MockImageGen, MockMultimodal, MockTextGen

__all__ = [
    "CallRecorder",
    "ImageGenClient",
    "MultimodalClient",
    "SamplingParams",
    "TextGenClient",
    "CachedImageGen",
    "CachedMultimodal",
    "CachedTextGen",
    "ResponseCache",
    "HttpImageGen",
    "HttpMultimodal",
    "HttpTextGen",
    "MockImageGen",
    "MockMultimodal",
    "MockTextGen",
]
