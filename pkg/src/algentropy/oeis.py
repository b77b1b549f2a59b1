"""Look up integer sequences in the OEIS, with a local cache.

Responses are stored verbatim next to the query that produced them, so
repeated lookups (and the test suite) never need the network.  Live requests
are serialized and spaced at least a second apart.
"""
from __future__ import annotations

import hashlib
import json
import os
import threading
import time
from dataclasses import dataclass, field
from datetime import datetime, timezone
from importlib import resources
from pathlib import Path
from typing import Sequence

import requests

from . import __version__
from .errors import NetworkUnavailable, RateLimited

SEARCH_URL = "https://oeis.org/search"
USER_AGENT = f"algentropy/{__version__} (degree-sequence lookup; python-requests)"
CACHE_ENV = "ALGENTROPY_OEIS_CACHE"
MIN_INTERVAL = 1.0
MAX_RETRIES = 3
DEFAULT_MAX_RESULTS = 10

_lock = threading.Lock()
_last_request = 0.0


@dataclass(frozen=True)
class OeisQuery:
    terms: tuple[int, ...]
    max_results: int = DEFAULT_MAX_RESULTS

    def __post_init__(self):
        object.__setattr__(self, "terms", tuple(int(t) for t in self.terms))
        if len(self.terms) < 3:
            raise ValueError("an OEIS query needs at least three terms")
        if self.max_results < 1:
            raise ValueError("max_results must be positive")

    @property
    def text(self) -> str:
        return ",".join(str(t) for t in self.terms)

    @property
    def key(self) -> str:
        return hashlib.sha256(self.text.encode()).hexdigest()[:20]


@dataclass(frozen=True)
class OeisMatch:
    id: str
    name: str
    offset: int  # position of the query inside the entry's data
    source: str  # "network" or "cache"

    def to_dict(self) -> dict:
        return {"id": self.id, "name": self.name, "offset": self.offset, "source": self.source}


@dataclass
class OeisResult:
    query: OeisQuery
    matches: list[OeisMatch]
    source: str  # "network", "cache" or "none"
    truncated: bool = False
    notes: list = field(default_factory=list)

    @property
    def degraded(self) -> bool:
        """True when the network was wanted but unavailable."""
        return any(n.startswith(("NetworkUnavailable", "RateLimited")) for n in self.notes)

    def ids(self) -> list[str]:
        return [m.id for m in self.matches]

    def __iter__(self):
        return iter(self.matches)

    def __len__(self):
        return len(self.matches)

    def to_dict(self) -> dict:
        return {"query": list(self.query.terms), "source": self.source, "truncated": self.truncated,
                "matches": [m.to_dict() for m in self.matches], "notes": self.notes}


def default_cache_dir() -> Path:
    env = os.environ.get(CACHE_ENV)
    if env:
        return Path(env)
    return Path(os.environ.get("XDG_CACHE_HOME", Path.home() / ".cache")) / "algentropy" / "oeis"


def fixture_dir() -> Path:
    """Cache entries shipped with the package (read-only)."""
    return Path(str(resources.files("algentropy") / "data" / "oeis_cache"))


class OeisClient:
    def __init__(self, cache_dir: str | Path | None = None, offline: bool = False,
                 session: requests.Session | None = None, timeout: float = 20.0,
                 min_interval: float = MIN_INTERVAL, use_fixtures: bool = True):
        self.cache_dir = Path(cache_dir) if cache_dir is not None else default_cache_dir()
        self.offline = offline
        self.session = session
        self.timeout = timeout
        self.min_interval = min_interval
        self.use_fixtures = use_fixtures

    # cache

    def _paths(self, query: OeisQuery) -> list[Path]:
        name = f"{query.key}.json"
        out = [self.cache_dir / name]
        if self.use_fixtures:
            out.append(fixture_dir() / name)
        return out

    def read_cache(self, query: OeisQuery) -> dict | None:
        for path in self._paths(query):
            if path.is_file():
                entry = json.loads(path.read_text())
                if entry.get("query") == query.text:
                    return entry
        return None

    def write_cache(self, query: OeisQuery, response) -> Path:
        self.cache_dir.mkdir(parents=True, exist_ok=True)
        entry = {
            "query": query.text,
            "url": f"{SEARCH_URL}?q={query.text}&fmt=json",
            "retrieved": datetime.now(timezone.utc).isoformat(timespec="seconds"),
            "response": response,
        }
        path = self.cache_dir / f"{query.key}.json"
        tmp = path.with_suffix(".tmp")
        tmp.write_text(json.dumps(entry, indent=1, sort_keys=True) + "\n")
        tmp.replace(path)
        return path

    # network

    def _get(self, query: OeisQuery):
        global _last_request
        session = self.session or requests.Session()
        delay = 1.0
        for attempt in range(MAX_RETRIES + 1):
            with _lock:
                wait = _last_request + self.min_interval - time.monotonic()
                if wait > 0:
                    time.sleep(wait)
                try:
                    resp = session.get(SEARCH_URL, params={"q": query.text, "fmt": "json"},
                                       headers={"User-Agent": USER_AGENT}, timeout=self.timeout)
                except requests.RequestException as exc:
                    raise NetworkUnavailable(str(exc)) from exc
                finally:
                    _last_request = time.monotonic()
            if resp.status_code == 429:
                if attempt == MAX_RETRIES:
                    raise RateLimited(f"still rate limited after {MAX_RETRIES} retries")
                time.sleep(delay)
                delay *= 2
                continue
            if resp.status_code >= 400:
                raise NetworkUnavailable(f"HTTP {resp.status_code}")
            try:
                return resp.json()
            except ValueError as exc:
                raise NetworkUnavailable("response is not JSON") from exc
        raise RateLimited("rate limited")  # not reached

    def lookup(self, query: OeisQuery | Sequence[int], max_results: int | None = None) -> OeisResult:
        """Cache first; then the network unless offline.  Never raises on network trouble."""
        if not isinstance(query, OeisQuery):
            query = OeisQuery(tuple(query), max_results or DEFAULT_MAX_RESULTS)
        elif max_results is not None:
            query = OeisQuery(query.terms, max_results)
        entry = self.read_cache(query)
        if entry is not None:
            return _result(query, entry["response"], "cache", [])
        if self.offline:
            return OeisResult(query, [], "none", notes=["NetworkUnavailable: offline mode and no cached response"])
        try:
            response = self._get(query)
        except (NetworkUnavailable, RateLimited) as exc:
            return OeisResult(query, [], "none", notes=[f"{type(exc).__name__}: {exc}"])
        self.write_cache(query, response)
        return _result(query, response, "network", [])


def _entries(response) -> list[dict]:
    """Result entries from either response layout (a bare list, or an object with 'results')."""
    if response is None:
        return []
    if isinstance(response, list):
        return response
    return response.get("results") or []


def _find(terms: Sequence[int], data: Sequence[int]) -> int | None:
    n = len(terms)
    for i in range(len(data) - n + 1):
        if tuple(data[i:i + n]) == tuple(terms):
            return i
    return None


def _result(query: OeisQuery, response, source: str, notes: list) -> OeisResult:
    matches = []
    for e in _entries(response):
        data = [int(x) for x in str(e.get("data", "")).split(",") if x.strip()]
        offset = _find(query.terms, data)
        if offset is None:
            continue  # the prefix must appear verbatim
        matches.append(OeisMatch(f"A{int(e['number']):06d}", e.get("name", ""), offset, source))
    truncated = len(matches) > query.max_results
    return OeisResult(query, matches[:query.max_results], source, truncated, notes)


def lookup(terms: Sequence[int], max_results: int = DEFAULT_MAX_RESULTS, **client_args) -> OeisResult:
    return OeisClient(**client_args).lookup(OeisQuery(tuple(terms), max_results))
