"""Pluggable client for open-ended speech annotation.

A request carries an opaque audio reference plus the full segmented
transcript, and instructions that deliberately enumerate no emotion
categories (the open-ended guarantee is enforced at construction and is
greppable).  Responses are validated field by field; an out-of-range
annotation degrades to a per-segment error record rather than failing the
whole response, and downstream analyses handle the gap via
pairwise-complete deletion.

Transports are interchangeable: a live HTTPS endpoint (bearer credential
from the environment, bounded retries with exponential backoff) or a
recorded fixture file replayed deterministically.  Whole-speech requests
are the norm; for corpus audits, where files are independent utterances,
build one single-segment request per file and use ``annotate_many``.
"""

from __future__ import annotations

import functools
import json
import os
import re
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from importlib import resources
from pathlib import Path
from types import MappingProxyType
from typing import Any, Iterable, Mapping, Sequence

import requests

from .errors import (
    InputError,
    ProtocolError,
    SchemaError,
    TransportError,
    W_DEGRADED_ANNOTATION,
    warn,
)
from .model import CorpusEmotion, EmotionClass, SegmentAnnotation, SegmentRecord

TOKEN_ENV = "TRIAFFECT_ANNOTATOR_TOKEN"
DEFAULT_MAX_RETRIES = 3
DEFAULT_BACKOFF_S = 0.5

_CATEGORY_WORDS = sorted(
    {c.value.lower() for c in EmotionClass} | {c.value.lower() for c in CorpusEmotion}
)
_CATEGORY_RE = re.compile(r"\b(" + "|".join(_CATEGORY_WORDS) + r")\b", re.IGNORECASE)


@dataclass(frozen=True)
class TranscriptSegment:
    segment_id: str
    start_s: float
    end_s: float
    text: str


@dataclass(frozen=True)
class AnnotationRequest:
    """One annotation request: audio reference, transcript, instructions."""

    audio_ref: str
    transcript_segments: tuple[TranscriptSegment, ...]
    instructions: str

    def __post_init__(self) -> None:
        ids = [s.segment_id for s in self.transcript_segments]
        dupes = sorted({i for i in ids if ids.count(i) > 1})
        if dupes:
            raise InputError(f"duplicate segment ids in request: {dupes}")
        hit = _CATEGORY_RE.search(self.instructions)
        if hit:
            raise InputError(
                f"instructions must not enumerate emotion categories; found {hit.group(0)!r}"
            )


@functools.lru_cache(maxsize=1)
def instruction_template() -> dict[str, str]:
    """The versioned instruction template (replaceable via config)."""
    text = resources.files("triaffect").joinpath("data", "instruction_template.json").read_text("utf-8")
    doc = json.loads(text)
    return {"version": doc["version"], "text": doc["text"]}


def build_request(
    audio_ref: str,
    segments: Sequence[SegmentRecord],
    instructions: str | None = None,
) -> AnnotationRequest:
    """Build a whole-speech request embedding every segment id, span, and text."""
    if not segments:
        raise InputError("build_request: no segments")
    transcript = tuple(
        TranscriptSegment(
            segment_id=s.segment_id, start_s=s.start_s, end_s=s.end_s, text=s.transcript
        )
        for s in segments
    )
    return AnnotationRequest(
        audio_ref=audio_ref,
        transcript_segments=transcript,
        instructions=instruction_template()["text"] if instructions is None else instructions,
    )


def request_to_dict(request: AnnotationRequest) -> dict[str, Any]:
    return {
        "audio_ref": request.audio_ref,
        "segments": [
            {
                "segment_id": s.segment_id,
                "start_s": s.start_s,
                "end_s": s.end_s,
                "text": s.text,
            }
            for s in request.transcript_segments
        ],
        "instructions": request.instructions,
    }


@dataclass(frozen=True)
class AnnotationResponse:
    """Validated annotations keyed by segment id.

    ``errors`` lists (segment_id, reason) pairs for annotations that were
    present but invalid and therefore dropped.
    """

    annotations: Mapping[str, SegmentAnnotation]
    errors: tuple[tuple[str, str], ...] = ()

    def __post_init__(self) -> None:
        object.__setattr__(self, "annotations", MappingProxyType(dict(self.annotations)))


def parse_response(payload: Any, request_ids: Iterable[str] | None = None) -> AnnotationResponse:
    """Validate a structured annotation payload.

    ``payload`` may be raw JSON text/bytes or an already-parsed object.
    When ``request_ids`` is given, an annotation for any other id is a
    protocol error naming that id.
    """
    if isinstance(payload, (str, bytes)):
        try:
            doc = json.loads(payload)
        except json.JSONDecodeError as exc:
            raise ProtocolError(f"annotation payload is not valid JSON: {exc}") from exc
    else:
        doc = payload
    if not isinstance(doc, dict) or not isinstance(doc.get("annotations"), dict):
        raise ProtocolError("annotation payload must be an object with an 'annotations' map")
    known = None if request_ids is None else frozenset(request_ids)
    annotations: dict[str, SegmentAnnotation] = {}
    errors: list[tuple[str, str]] = []
    for segment_id in sorted(doc["annotations"]):
        if known is not None and segment_id not in known:
            raise ProtocolError(f"annotation for unknown segment_id {segment_id!r}")
        try:
            annotations[segment_id] = SegmentAnnotation.from_dict(doc["annotations"][segment_id])
        except SchemaError as exc:
            errors.append((segment_id, str(exc)))
            warn(W_DEGRADED_ANNOTATION, f"dropped annotation for {segment_id}: {exc}")
    return AnnotationResponse(annotations=annotations, errors=tuple(errors))


def response_to_json(response: AnnotationResponse) -> str:
    """Serialize a response to the exact wire format (round-trips losslessly)."""
    doc = {
        "annotations": {
            sid: response.annotations[sid].to_dict() for sid in sorted(response.annotations)
        }
    }
    return json.dumps(doc, ensure_ascii=False, indent=1) + "\n"


class FixtureTransport:
    """Replays a recorded payload file; bit-deterministic, never retried."""

    retryable = False

    def __init__(self, path):
        self.path = Path(path)

    def send(self, request: AnnotationRequest) -> str:
        try:
            return self.path.read_text(encoding="utf-8")
        except OSError as exc:
            raise InputError(f"cannot read fixture {self.path}: {exc}") from exc


class HttpTransport:
    """POSTs the request as JSON to a live endpoint.

    The bearer credential is read from the environment variable named by
    ``token_env`` (default ``TRIAFFECT_ANNOTATOR_TOKEN``).
    """

    retryable = True

    def __init__(self, url: str, token_env: str = TOKEN_ENV, timeout_s: float = 60.0, session=None):
        self.url = url
        self.token_env = token_env
        self.timeout_s = timeout_s
        self.session = session if session is not None else requests

    def send(self, request: AnnotationRequest) -> str:
        token = os.environ.get(self.token_env)
        if not token:
            raise InputError(f"live annotation needs the {self.token_env} environment variable")
        resp = self.session.post(
            self.url,
            json=request_to_dict(request),
            headers={"Authorization": f"Bearer {token}"},
            timeout=self.timeout_s,
        )
        resp.raise_for_status()
        return resp.text


def annotate(
    request: AnnotationRequest,
    transport,
    max_retries: int = DEFAULT_MAX_RETRIES,
    backoff_s: float = DEFAULT_BACKOFF_S,
    sleep=time.sleep,
) -> AnnotationResponse:
    """Send a request through a transport and validate the reply.

    Retryable transports get up to ``max_retries`` attempts with
    exponential backoff; network failures and malformed payloads both
    count as failed attempts.  Fixture replay is attempted exactly once.
    """
    ids = frozenset(s.segment_id for s in request.transcript_segments)
    attempts = max_retries if getattr(transport, "retryable", False) else 1
    if attempts < 1:
        raise InputError(f"max_retries must be at least 1, got {max_retries}")
    last: Exception | None = None
    for attempt in range(attempts):
        try:
            raw = transport.send(request)
            return parse_response(raw, request_ids=ids)
        except (requests.RequestException, ProtocolError) as exc:
            if not getattr(transport, "retryable", False):
                raise
            last = exc
            if attempt + 1 < attempts:
                sleep(backoff_s * (2**attempt))
    raise TransportError(f"annotation endpoint failed after {attempts} attempts: {last}")


def annotate_many(
    requests_: Sequence[AnnotationRequest],
    transport,
    max_workers: int = 1,
    **kwargs,
) -> list[AnnotationResponse]:
    """Annotate independent requests, optionally in parallel.

    Results are returned in input order, so aggregation never depends on
    completion order.
    """
    if max_workers < 1:
        raise InputError(f"max_workers must be at least 1, got {max_workers}")
    if max_workers == 1:
        return [annotate(r, transport, **kwargs) for r in requests_]
    with ThreadPoolExecutor(max_workers=max_workers) as pool:
        return list(pool.map(lambda r: annotate(r, transport, **kwargs), requests_))
