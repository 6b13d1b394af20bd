"""Translation providers: persistent file cache, HTTP client, identity stub.

Every provider answers ``translate_batch(sources, src_lang, tgt_lang)`` with
a list of the same length and order. The file cache makes reruns fully
offline: each remote pair is appended to the cache TSV the moment it arrives.
"""

from __future__ import annotations

import logging
import threading
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import IO, Sequence

import requests

from .errors import TranslationError

logger = logging.getLogger(__name__)

PROVENANCE_CACHE = "cache"
PROVENANCE_REMOTE = "remote"

# 2-column cache rows apply to any language pair.
ANY_LANG = "*"


def escape_field(value: str) -> str:
    return value.replace("\\", "\\\\").replace("\t", "\\t").replace("\n", "\\n")


def unescape_field(value: str) -> str:
    out: list[str] = []
    i = 0
    while i < len(value):
        ch = value[i]
        if ch == "\\" and i + 1 < len(value):
            nxt = value[i + 1]
            if nxt == "\\":
                out.append("\\")
                i += 2
                continue
            if nxt == "t":
                out.append("\t")
                i += 2
                continue
            if nxt == "n":
                out.append("\n")
                i += 2
                continue
        out.append(ch)
        i += 1
    return "".join(out)


class TranslationTable:
    """(src_lang, tgt_lang, source) -> target mapping with per-pair provenance.

    Append-only during a run. When a sink file is attached, every new pair is
    written through immediately so an interrupted run loses nothing. Appends
    are serialized with a lock; reads need none once loading is done.
    """

    def __init__(self) -> None:
        self._pairs: dict[tuple[str, str, str], str] = {}
        self._provenance: dict[tuple[str, str, str], str] = {}
        self._lock = threading.Lock()
        self._sink: IO[str] | None = None

    def __len__(self) -> int:
        return len(self._pairs)

    def get(self, src_lang: str, tgt_lang: str, source: str) -> str | None:
        hit = self._pairs.get((src_lang, tgt_lang, source))
        if hit is None:
            hit = self._pairs.get((ANY_LANG, ANY_LANG, source))
        return hit

    def provenance(self, src_lang: str, tgt_lang: str, source: str) -> str | None:
        tag = self._provenance.get((src_lang, tgt_lang, source))
        if tag is None:
            tag = self._provenance.get((ANY_LANG, ANY_LANG, source))
        return tag

    def put(
        self,
        src_lang: str,
        tgt_lang: str,
        source: str,
        target: str,
        provenance: str = PROVENANCE_REMOTE,
    ) -> None:
        key = (src_lang, tgt_lang, source)
        with self._lock:
            if key in self._pairs:
                return
            self._pairs[key] = target
            self._provenance[key] = provenance
            if self._sink is not None:
                self._sink.write(
                    f"{escape_field(src_lang)}\t{escape_field(tgt_lang)}\t"
                    f"{escape_field(source)}\t{escape_field(target)}\n"
                )
                self._sink.flush()

    def load(self, path: str | Path) -> None:
        """Load cache rows: 4 columns (src, tgt, source, target) or legacy 2 (source, target)."""
        text = Path(path).read_text(encoding="utf-8")
        for lineno, line in enumerate(text.split("\n"), start=1):
            if not line:
                continue
            cols = [unescape_field(c) for c in line.split("\t")]
            if len(cols) == 4:
                key = (cols[0], cols[1], cols[2])
                target = cols[3]
            elif len(cols) == 2:
                key = (ANY_LANG, ANY_LANG, cols[0])
                target = cols[1]
            else:
                raise TranslationError(
                    f"cache {path} line {lineno}: expected 2 or 4 tab-separated columns,"
                    f" got {len(cols)}"
                )
            self._pairs.setdefault(key, target)
            self._provenance.setdefault(key, PROVENANCE_CACHE)

    def attach_sink(self, stream: IO[str]) -> None:
        self._sink = stream

    def close(self) -> None:
        if self._sink is not None:
            self._sink.close()
            self._sink = None


class IdentityProvider:
    """Returns every source unchanged; stands in for an MT system in tests and debugging."""

    def translate_batch(self, sources: Sequence[str], src_lang: str, tgt_lang: str) -> list[str]:
        return list(sources)


class CachedProvider:
    """Serves translations from a TranslationTable, delegating misses.

    Without a remote provider the cache is strict offline: a miss raises a
    TranslationError naming the source string.
    """

    def __init__(self, table: TranslationTable, remote=None):
        self.table = table
        self.remote = remote

    def translate_batch(self, sources: Sequence[str], src_lang: str, tgt_lang: str) -> list[str]:
        out: list[str | None] = []
        misses: list[int] = []
        for i, source in enumerate(sources):
            hit = self.table.get(src_lang, tgt_lang, source)
            out.append(hit)
            if hit is None:
                misses.append(i)
        if misses:
            if self.remote is None:
                missing = sources[misses[0]]
                raise TranslationError(
                    f"offline cache has no {src_lang}->{tgt_lang} translation for {missing!r}"
                    + (f" and {len(misses) - 1} more" if len(misses) > 1 else "")
                )
            fetched = self.remote.translate_batch([sources[i] for i in misses], src_lang, tgt_lang)
            if len(fetched) != len(misses):
                raise TranslationError(
                    f"remote provider returned {len(fetched)} translations for {len(misses)} sources"
                )
            for i, target in zip(misses, fetched):
                self.table.put(src_lang, tgt_lang, sources[i], target, PROVENANCE_REMOTE)
                out[i] = target
        return [t if t is not None else "" for t in out]

    def close(self) -> None:
        self.table.close()

    def __enter__(self) -> "CachedProvider":
        return self

    def __exit__(self, *exc) -> None:
        self.close()


def file_cache_provider(
    path: str | Path,
    remote=None,
    *,
    append: bool = True,
) -> CachedProvider:
    """Provider backed by a cache TSV; new remote pairs are appended to the file."""
    table = TranslationTable()
    path = Path(path)
    if path.exists():
        table.load(path)
    if append and remote is not None:
        path.parent.mkdir(parents=True, exist_ok=True)
        table.attach_sink(open(path, "a", encoding="utf-8"))
    return CachedProvider(table, remote)


@dataclass(frozen=True)
class HttpProviderConfig:
    """Wire settings for a POST-based translation endpoint.

    Field names, body encoding and response shape are configurable because
    the toolkit targets whichever service the run points at, not one API.
    """

    url: str
    text_field: str = "input_text"
    src_field: str = "src"
    tgt_field: str = "tgt"
    body_format: str = "form"  # "form" or "json"
    response_format: str = "json"  # "json" (array, or object with response_key) or "lines"
    response_key: str = ""
    timeout: float = 60.0
    max_retries: int = 3
    max_batch_size: int = 32
    max_concurrent: int = 1
    backoff_base: float = 0.5
    retry_statuses: tuple[int, ...] = (429, 500, 502, 503, 504)

    def __post_init__(self) -> None:
        if self.body_format not in ("form", "json"):
            raise ValueError(f"body_format must be 'form' or 'json', got {self.body_format!r}")
        if self.response_format not in ("json", "lines"):
            raise ValueError(
                f"response_format must be 'json' or 'lines', got {self.response_format!r}"
            )
        if self.max_batch_size < 1:
            raise ValueError("max_batch_size must be at least 1")


class HttpProvider:
    """Batching, retrying HTTP client for a remote translation service."""

    def __init__(self, config: HttpProviderConfig, session: requests.Session | None = None):
        self.config = config
        self.session = session or requests.Session()
        self.request_count = 0
        self._count_lock = threading.Lock()

    def translate_batch(self, sources: Sequence[str], src_lang: str, tgt_lang: str) -> list[str]:
        if not sources:
            return []
        size = self.config.max_batch_size
        chunks = [
            (start, list(sources[start : start + size]))
            for start in range(0, len(sources), size)
        ]
        if self.config.max_concurrent > 1 and len(chunks) > 1:
            with ThreadPoolExecutor(max_workers=self.config.max_concurrent) as pool:
                results = list(
                    pool.map(lambda c: self._translate_chunk(c[1], src_lang, tgt_lang, c[0]), chunks)
                )
        else:
            results = [self._translate_chunk(chunk, src_lang, tgt_lang, start) for start, chunk in chunks]
        out: list[str] = []
        for translated in results:
            out.extend(translated)
        return out

    def _translate_chunk(
        self, chunk: list[str], src_lang: str, tgt_lang: str, offset: int
    ) -> list[str]:
        cfg = self.config
        chunk_range = f"{offset}..{offset + len(chunk) - 1}"
        payload = {cfg.src_field: src_lang, cfg.tgt_field: tgt_lang, cfg.text_field: chunk}
        last_error = "no attempt made"
        for attempt in range(cfg.max_retries + 1):
            if attempt:
                time.sleep(cfg.backoff_base * (2 ** (attempt - 1)))
            try:
                with self._count_lock:
                    self.request_count += 1
                if cfg.body_format == "json":
                    response = self.session.post(cfg.url, json=payload, timeout=cfg.timeout)
                else:
                    response = self.session.post(cfg.url, data=payload, timeout=cfg.timeout)
            except requests.RequestException as exc:
                last_error = f"{type(exc).__name__}: {exc}"
                logger.warning("translation request failed (chunk %s, attempt %d): %s",
                               chunk_range, attempt + 1, last_error)
                continue
            if response.status_code in cfg.retry_statuses:
                last_error = f"HTTP {response.status_code}"
                logger.warning("translation request failed (chunk %s, attempt %d): %s",
                               chunk_range, attempt + 1, last_error)
                continue
            if response.status_code != 200:
                raise TranslationError(
                    f"translation endpoint returned HTTP {response.status_code}"
                    f" for chunk {chunk_range}"
                )
            translated = self._parse_response(response)
            if len(translated) != len(chunk):
                raise TranslationError(
                    f"protocol error: {len(translated)} translations for {len(chunk)} sources"
                    f" in chunk {chunk_range}"
                )
            return translated
        raise TranslationError(
            f"translation failed for chunk {chunk_range} after"
            f" {cfg.max_retries + 1} attempts ({last_error})"
        )

    def _parse_response(self, response: requests.Response) -> list[str]:
        cfg = self.config
        if cfg.response_format == "lines":
            text = response.text
            if text.endswith("\n"):
                text = text[:-1]
            return text.split("\n") if text else []
        try:
            body = response.json()
        except ValueError as exc:
            raise TranslationError(f"endpoint returned invalid JSON: {exc}") from exc
        if cfg.response_key:
            if not isinstance(body, dict) or cfg.response_key not in body:
                raise TranslationError(f"response object lacks key {cfg.response_key!r}")
            body = body[cfg.response_key]
        if not isinstance(body, list) or not all(isinstance(item, str) for item in body):
            raise TranslationError("response is not a list of strings")
        return body
