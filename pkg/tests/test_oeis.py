import json

import pytest
import requests

from algentropy import oeis
from algentropy.oeis import OeisClient, OeisQuery, lookup


class FakeResponse:
    def __init__(self, status, payload=None):
        self.status_code = status
        self._payload = payload

    def json(self):
        if self._payload is None:
            raise ValueError("no body")
        return self._payload


class FakeSession:
    def __init__(self, responses):
        self.responses = list(responses)
        self.calls = []

    def get(self, url, params=None, headers=None, timeout=None):
        self.calls.append((url, params, headers))
        item = self.responses.pop(0)
        if isinstance(item, Exception):
            raise item
        return item


def entry(number, data, name="a sequence"):
    return {"number": number, "name": name, "data": ",".join(map(str, data))}


@pytest.fixture(autouse=True)
def no_waiting(monkeypatch):
    slept = []
    monkeypatch.setattr(oeis.time, "sleep", slept.append)
    return slept


def test_query_validation():
    with pytest.raises(ValueError):
        OeisQuery((1, 2))
    with pytest.raises(ValueError):
        OeisQuery((1, 2, 3), max_results=0)
    q = OeisQuery([1, 3, 9])
    assert q.text == "1,3,9"
    assert q.key == OeisQuery((1, 3, 9)).key


def test_packaged_fixture_answers_offline(tmp_path, hv_ref):
    res = lookup(hv_ref["degrees"], cache_dir=tmp_path, offline=True)
    assert res.source == "cache"
    assert "A084707" in res.ids()
    assert not res.degraded
    assert res.matches[0].offset == 0


def test_shorter_prefix_fixture(tmp_path, hv_ref):
    res = lookup(hv_ref["degrees"][:8], cache_dir=tmp_path, offline=True)
    assert "A084707" in res.ids()


def test_offline_miss_is_degraded(tmp_path):
    res = lookup([2, 7, 1, 8, 2, 8], cache_dir=tmp_path, offline=True)
    assert res.source == "none"
    assert res.degraded
    assert res.notes[0].startswith("NetworkUnavailable")
    assert len(res) == 0


def test_network_result_is_cached(tmp_path):
    terms = [5, 8, 13, 21]
    session = FakeSession([FakeResponse(200, {"results": [entry(45, [0, 1, 1, 2, 3, 5, 8, 13, 21, 34])]})])
    client = OeisClient(cache_dir=tmp_path, session=session, use_fixtures=False)
    res = client.lookup(terms)
    assert res.source == "network"
    assert res.ids() == ["A000045"]
    assert res.matches[0].offset == 5
    assert session.calls[0][1] == {"q": "5,8,13,21", "fmt": "json"}
    assert "algentropy" in session.calls[0][2]["User-Agent"]
    stored = json.loads((tmp_path / f"{OeisQuery(tuple(terms)).key}.json").read_text())
    assert stored["query"] == "5,8,13,21"
    # second lookup never touches the session
    again = OeisClient(cache_dir=tmp_path, session=FakeSession([]), use_fixtures=False).lookup(terms)
    assert again.source == "cache" and again.ids() == ["A000045"]


def test_bare_list_layout_and_verbatim_prefix(tmp_path):
    payload = [entry(1, [1, 2, 4, 8, 16]), entry(2, [1, 2, 5, 8, 16])]
    client = OeisClient(cache_dir=tmp_path, session=FakeSession([FakeResponse(200, payload)]), use_fixtures=False)
    assert client.lookup([2, 4, 8]).ids() == ["A000001"]


def test_empty_response(tmp_path):
    client = OeisClient(cache_dir=tmp_path, session=FakeSession([FakeResponse(200, {"results": None})]),
                        use_fixtures=False)
    res = client.lookup([3, 1, 4, 1, 5])
    assert len(res) == 0 and not res.degraded


def test_truncation(tmp_path):
    payload = {"results": [entry(i, [1] * 12) for i in range(1, 8)]}
    client = OeisClient(cache_dir=tmp_path, session=FakeSession([FakeResponse(200, payload)]), use_fixtures=False)
    res = client.lookup([1, 1, 1, 1, 1, 1], max_results=3)
    assert len(res) == 3
    assert res.truncated


def test_rate_limit_backoff(tmp_path, no_waiting):
    session = FakeSession([FakeResponse(429), FakeResponse(429), FakeResponse(200, [entry(7, [1, 2, 3])])])
    client = OeisClient(cache_dir=tmp_path, session=session, use_fixtures=False, min_interval=0)
    res = client.lookup([1, 2, 3])
    assert res.ids() == ["A000007"]
    assert [s for s in no_waiting if s >= 1] == [1.0, 2.0]


def test_rate_limit_gives_up(tmp_path):
    session = FakeSession([FakeResponse(429)] * 4)
    client = OeisClient(cache_dir=tmp_path, session=session, use_fixtures=False, min_interval=0)
    res = client.lookup([1, 2, 3])
    assert res.degraded
    assert res.notes[0].startswith("RateLimited")


def test_connection_error_is_degraded(tmp_path):
    session = FakeSession([requests.ConnectionError("down")])
    res = OeisClient(cache_dir=tmp_path, session=session, use_fixtures=False).lookup([1, 2, 3])
    assert res.degraded
    assert not list(tmp_path.iterdir())


def test_server_error_and_bad_body(tmp_path):
    for resp in (FakeResponse(503), FakeResponse(200, None)):
        res = OeisClient(cache_dir=tmp_path, session=FakeSession([resp]), use_fixtures=False).lookup([1, 2, 3])
        assert res.degraded


def test_cache_dir_from_environment(monkeypatch, tmp_path):
    monkeypatch.setenv(oeis.CACHE_ENV, str(tmp_path / "c"))
    assert oeis.default_cache_dir() == tmp_path / "c"
