"""Sampling, community-blind prompt assembly, and pluggable text generation.

The pipeline is: sample matching documents per community with a seeded
deterministic generator, render a prompt that never names a community
(groups appear positionally), call a backend, and cache the result keyed by
everything that determines it. The bundled stub backend is a pure function
of (prompt, model_id, seed) so the whole pipeline is reproducible offline.
"""

from __future__ import annotations

import hashlib
import json
import logging
import random
import re
import sqlite3
import threading
import time
import urllib.error
import urllib.request
from collections import Counter
from dataclasses import dataclass
from pathlib import Path

from importlib import resources

from .corpus import SENTINELS, normalize, tokenize
from .index import InvertedIndex
from .stopwords import STOPWORDS

log = logging.getLogger("bd.rag")

GENERATION_KINDS = ("summary", "definition", "alternatives")
PLACEHOLDERS = {"term", "samples", "group1", "group2"}
MAX_ATTEMPTS = 3
BACKOFF_BASE_SECONDS = 0.5


class InsufficientDataError(ValueError):
    """No sampled documents to ground a generation on."""


class BackendError(RuntimeError):
    """The generation backend failed permanently."""


class TransientBackendError(BackendError):
    """The generation backend failed in a way worth retrying."""


class TemplateError(ValueError):
    """The prompt template file is malformed."""


@dataclass(frozen=True)
class SampleSet:
    term: str
    community: str
    slot: int  # 1-based community position; prompts and cache keys use this, never the label
    seed: int
    doc_ids: tuple[str, ...]
    texts: tuple[str, ...]

    def __len__(self) -> int:
        return len(self.doc_ids)


@dataclass(frozen=True)
class GenerationRequest:
    kind: str
    term: str
    samples: tuple[SampleSet, ...]
    model_id: str
    seed: int


@dataclass(frozen=True)
class GenerationResult:
    request: GenerationRequest
    prompt: str
    output: str
    provenance: tuple[tuple[str, ...], ...]
    backend_id: str
    created_at: float
    attempts: int = 1
    truncated: bool = False
    from_cache: bool = False


@dataclass(frozen=True)
class PromptTemplates:
    version: int
    sections: dict[str, str]


def _deterministic_choice(items: list, k: int, seed_material: str) -> list:
    """Uniform k-subset via partial Fisher-Yates driven only by Random.random().

    random() sequences are stable across Python versions for a fixed seed,
    so sampled sets are reproducible anywhere.
    """
    digest = hashlib.blake2b(seed_material.encode("utf-8"), digest_size=8).digest()
    rng = random.Random(int.from_bytes(digest, "big"))
    pool = list(items)
    n = len(pool)
    for i in range(k):
        j = i + int(rng.random() * (n - i))
        pool[i], pool[j] = pool[j], pool[i]
    return pool[:k]


def sample_matches(
    index: InvertedIndex, term: str, community: str, cap: int, seed: int
) -> SampleSet:
    """Sample up to ``cap`` matching documents for one community, seeded.

    Output is ordered by doc_id ascending. The same (index, term, community,
    seed, cap) always yields the identical set; zero matches yield an empty
    (still valid) SampleSet.
    """
    if cap < 1:
        raise ValueError(f"cap must be >= 1, got {cap}")
    if community not in index.labels:
        raise ValueError(f"unknown community {community!r}; expected one of {index.labels}")
    slot = index.labels.index(community) + 1
    surface, per_label = index.matching_positions(term)
    positions = per_label.get(community, [])
    k = min(cap, len(positions))
    chosen = _deterministic_choice(positions, k, f"{surface}\x1f{slot}\x1f{seed}")
    docs = sorted((index.document(p) for p in chosen), key=lambda d: d.doc_id)
    return SampleSet(
        term=surface,
        community=community,
        slot=slot,
        seed=seed,
        doc_ids=tuple(d.doc_id for d in docs),
        texts=tuple(d.text for d in docs),
    )


def bundled_templates_path() -> Path:
    return Path(str(resources.files("bridgedict").joinpath("data", "templates.txt")))


def load_templates(path: str | Path | None = None) -> PromptTemplates:
    """Parse the template file: a version header line then one section per kind."""
    path = Path(path) if path is not None else bundled_templates_path()
    version: int | None = None
    sections: dict[str, list[str]] = {}
    current: str | None = None
    for raw in path.read_text(encoding="utf-8").splitlines():
        line = raw.rstrip()
        if current is None and line.lstrip().startswith("#"):
            continue
        if version is None:
            m = re.fullmatch(r"version\s*=\s*(\d+)", line.strip())
            if m:
                version = int(m.group(1))
                continue
            if line.strip():
                raise TemplateError(f"expected 'version = N' header, got {line!r}")
            continue
        m = re.fullmatch(r"\[(\w+)\]", line.strip())
        if m:
            current = m.group(1)
            if current not in GENERATION_KINDS:
                raise TemplateError(f"unknown template section [{current}]")
            sections[current] = []
            continue
        if current is not None:
            sections[current].append(raw)
    if version is None:
        raise TemplateError(f"template file {path} has no version header")
    missing = [k for k in GENERATION_KINDS if k not in sections]
    if missing:
        raise TemplateError(f"template file {path} missing sections: {missing}")
    rendered = {k: "\n".join(v).strip() for k, v in sections.items()}
    for kind, body in rendered.items():
        used = set(re.findall(r"\{(\w+)\}", body))
        unknown = used - PLACEHOLDERS
        if unknown:
            raise TemplateError(f"section [{kind}] uses unknown placeholders {sorted(unknown)}")
    return PromptTemplates(version=version, sections=rendered)


def _numbered(texts: tuple[str, ...], char_limit: int) -> str:
    return "\n".join(f"{i}. {t[:char_limit]}" for i, t in enumerate(texts, start=1))


def build_prompt(
    request: GenerationRequest,
    templates: PromptTemplates,
    char_budget: int = 8000,
    sample_char_limit: int = 500,
) -> str:
    """Render the prompt for a request; deterministic, community-blind.

    Sample texts are truncated to ``sample_char_limit`` characters. If the
    rendered prompt exceeds ``char_budget``, trailing samples are dropped
    (never the instruction, never below one sample per group).
    """
    if request.kind not in GENERATION_KINDS:
        raise ValueError(f"unknown generation kind {request.kind!r}")
    expected_sets = 2 if request.kind == "alternatives" else 1
    if len(request.samples) != expected_sets:
        raise ValueError(
            f"{request.kind} needs {expected_sets} sample set(s), got {len(request.samples)}"
        )
    if any(len(s) == 0 for s in request.samples):
        raise InsufficientDataError("insufficient data for generation")

    template = templates.sections[request.kind]
    kept = [list(s.texts) for s in request.samples]

    def render() -> str:
        body = template.replace("{term}", request.term)
        if request.kind == "alternatives":
            body = body.replace("{group1}", _numbered(tuple(kept[0]), sample_char_limit))
            body = body.replace("{group2}", _numbered(tuple(kept[1]), sample_char_limit))
        else:
            body = body.replace("{samples}", _numbered(tuple(kept[0]), sample_char_limit))
        return body

    prompt = render()
    while len(prompt) > char_budget:
        droppable = [i for i, texts in enumerate(kept) if len(texts) > 1]
        if not droppable:
            break
        victim = max(droppable, key=lambda i: len(kept[i]))
        kept[victim].pop()
        prompt = render()
    return prompt


def prompt_is_blind(prompt: str, forbidden: list[str] | tuple[str, ...]) -> bool:
    """True when no community display name or internal label occurs in the prompt."""
    lowered = prompt.lower()
    return not any(name and name.lower() in lowered for name in forbidden)


class StubBackend:
    """Offline deterministic backend: a pure function of (prompt, model_id, seed)."""

    backend_id = "stub"

    _SAMPLE_LINE_RE = re.compile(r"^\s*\d+\.\s+(.*)$", re.MULTILINE)

    def complete(self, prompt: str, model_id: str, seed: int) -> str:
        counts: Counter = Counter()
        for text in self._SAMPLE_LINE_RE.findall(prompt):
            for tok in tokenize(normalize(text)):
                if tok in STOPWORDS or tok in SENTINELS or len(tok) < 2:
                    continue
                counts[tok] += 1
        top = [w for w, _ in sorted(counts.items(), key=lambda kv: (-kv[1], kv[0]))[:5]]
        themes = ", ".join(top) if top else "(no salient tokens)"
        digest = hashlib.blake2b(
            f"{model_id}\x1f{seed}\x1f{prompt}".encode("utf-8"), digest_size=6
        ).hexdigest()
        return (
            f"[stub {model_id} {digest}] Recurring themes across the sampled posts: "
            f"{themes}. This deterministic placeholder stands in for a live model response."
        )


class HttpChatBackend:
    """Generic chat-completion client; endpoint and key come from the environment."""

    backend_id = "http-chat"

    def __init__(self, endpoint: str, api_key: str = "", timeout: float = 30.0):
        self.endpoint = endpoint
        self.api_key = api_key
        self.timeout = timeout

    def complete(self, prompt: str, model_id: str, seed: int) -> str:
        body = {
            "model": model_id,
            "messages": [{"role": "user", "content": prompt}],
            "temperature": 0,
        }
        headers = {"Content-Type": "application/json"}
        if self.api_key:
            headers["Authorization"] = f"Bearer {self.api_key}"
        req = urllib.request.Request(
            self.endpoint, data=json.dumps(body).encode("utf-8"), headers=headers
        )
        try:
            with urllib.request.urlopen(req, timeout=self.timeout) as resp:
                payload = json.loads(resp.read().decode("utf-8"))
        except urllib.error.HTTPError as exc:
            if exc.code >= 500:
                raise TransientBackendError(f"backend HTTP {exc.code}") from exc
            raise BackendError(f"backend HTTP {exc.code}") from exc
        except (urllib.error.URLError, TimeoutError, OSError) as exc:
            raise TransientBackendError(f"backend unreachable: {exc}") from exc
        try:
            text = payload["choices"][0]["message"]["content"]
        except (KeyError, IndexError, TypeError) as exc:
            raise BackendError(f"malformed completion response: {exc}") from exc
        if not isinstance(text, str) or not text:
            raise BackendError("backend returned an empty completion")
        return text


def select_backend(env=None):
    import os

    env = env if env is not None else os.environ
    endpoint = env.get("BD_LLM_ENDPOINT", "")
    api_key = env.get("BD_LLM_API_KEY", "")
    if endpoint:
        return HttpChatBackend(endpoint=endpoint, api_key=api_key)
    log.info("BD_LLM_ENDPOINT not set; using the offline stub backend")
    return StubBackend()


def _now() -> float:
    import os

    sde = os.environ.get("SOURCE_DATE_EPOCH")
    if sde:
        try:
            return float(int(sde))
        except ValueError:
            pass
    return time.time()


def generate(
    backend,
    request: GenerationRequest,
    templates: PromptTemplates,
    char_budget: int = 8000,
    sample_char_limit: int = 500,
    max_output_chars: int = 1200,
    sleep=time.sleep,
) -> GenerationResult:
    """Call the backend with a rendered prompt; retries transient failures.

    Up to three attempts with exponential backoff. Output longer than four
    times ``max_output_chars`` is truncated and flagged.
    """
    prompt = build_prompt(request, templates, char_budget, sample_char_limit)
    last_exc: BackendError | None = None
    for attempt in range(1, MAX_ATTEMPTS + 1):
        try:
            output = backend.complete(prompt, request.model_id, request.seed)
            break
        except TransientBackendError as exc:
            last_exc = exc
            log.warning("backend attempt %d/%d failed: %s", attempt, MAX_ATTEMPTS, exc)
            if attempt == MAX_ATTEMPTS:
                raise BackendError(
                    f"backend failed after {MAX_ATTEMPTS} attempts: {exc}"
                ) from exc
            sleep(BACKOFF_BASE_SECONDS * (2 ** (attempt - 1)))
    else:  # pragma: no cover - loop always breaks or raises
        raise BackendError(str(last_exc))
    truncated = False
    limit = 4 * max_output_chars
    if len(output) > limit:
        output = output[:limit]
        truncated = True
    return GenerationResult(
        request=request,
        prompt=prompt,
        output=output,
        provenance=tuple(s.doc_ids for s in request.samples),
        backend_id=backend.backend_id,
        created_at=_now(),
        attempts=attempt,
        truncated=truncated,
    )


def cache_key(request: GenerationRequest, template_version: int) -> str:
    """Digest of everything that determines a generation.

    Communities enter as slot positions, never as labels or display names,
    so renaming a community does not invalidate the cache.
    """
    material = {
        "kind": request.kind,
        "term": request.term,
        "slots": [s.slot for s in request.samples],
        "doc_ids": [sorted(s.doc_ids) for s in request.samples],
        "model_id": request.model_id,
        "seed": request.seed,
        "template_version": template_version,
    }
    blob = json.dumps(material, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(blob.encode("utf-8")).hexdigest()


class GenerationCache:
    """Embedded persistent key-value store for generation results (sqlite)."""

    def __init__(self, path: str | Path):
        self.path = Path(path)
        self.path.parent.mkdir(parents=True, exist_ok=True)
        self._conn = sqlite3.connect(str(self.path), check_same_thread=False)
        self._conn.execute(
            "CREATE TABLE IF NOT EXISTS generations (key TEXT PRIMARY KEY, value TEXT NOT NULL)"
        )
        self._conn.commit()
        self._lock = threading.Lock()
        self._inflight: dict[str, threading.Lock] = {}

    def close(self) -> None:
        self._conn.close()

    def get(self, key: str) -> dict | None:
        with self._lock:
            row = self._conn.execute(
                "SELECT value FROM generations WHERE key = ?", (key,)
            ).fetchone()
        if row is None:
            return None
        try:
            return json.loads(row[0])
        except (json.JSONDecodeError, TypeError):
            log.warning("dropping corrupt cache entry %s", key[:12])
            with self._lock:
                self._conn.execute("DELETE FROM generations WHERE key = ?", (key,))
                self._conn.commit()
            return None

    def put(self, key: str, value: dict) -> None:
        blob = json.dumps(value, sort_keys=True, ensure_ascii=False)
        with self._lock:
            self._conn.execute(
                "INSERT OR REPLACE INTO generations (key, value) VALUES (?, ?)", (key, blob)
            )
            self._conn.commit()

    def key_lock(self, key: str) -> threading.Lock:
        with self._lock:
            return self._inflight.setdefault(key, threading.Lock())


def _result_to_record(result: GenerationResult) -> dict:
    return {
        "kind": result.request.kind,
        "term": result.request.term,
        "slots": [s.slot for s in result.request.samples],
        "prompt": result.prompt,
        "output": result.output,
        "provenance": [list(ids) for ids in result.provenance],
        "backend_id": result.backend_id,
        "created_at": result.created_at,
        "attempts": result.attempts,
        "truncated": result.truncated,
    }


def _record_to_result(record: dict, request: GenerationRequest) -> GenerationResult:
    return GenerationResult(
        request=request,
        prompt=record["prompt"],
        output=record["output"],
        provenance=tuple(tuple(ids) for ids in record["provenance"]),
        backend_id=record["backend_id"],
        created_at=float(record["created_at"]),
        attempts=int(record.get("attempts", 1)),
        truncated=bool(record.get("truncated", False)),
        from_cache=True,
    )


def cached_generate(
    cache: GenerationCache,
    backend,
    request: GenerationRequest,
    templates: PromptTemplates,
    char_budget: int = 8000,
    sample_char_limit: int = 500,
    max_output_chars: int = 1200,
    sleep=time.sleep,
) -> GenerationResult:
    """Serve from the cache when possible; coalesce duplicate in-flight requests."""
    key = cache_key(request, templates.version)
    with cache.key_lock(key):
        record = cache.get(key)
        if record is not None:
            return _record_to_result(record, request)
        result = generate(
            backend,
            request,
            templates,
            char_budget=char_budget,
            sample_char_limit=sample_char_limit,
            max_output_chars=max_output_chars,
            sleep=sleep,
        )
        cache.put(key, _result_to_record(result))
        return result
