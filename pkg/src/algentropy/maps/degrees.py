"""Degree sequences of iterates, by exact symbolic iteration or on random lines."""
from __future__ import annotations

import json
import multiprocessing
import time
from dataclasses import dataclass, field

from ..errors import BudgetExceeded, TrialsDisagree
from ..poly import MERSENNE61
from ..poly.domains import make_domain
from .factored import FactoredIterator
from .projective import ProjectiveMap, iterate_direct

EXACT = "exact"
LINE = "line"


@dataclass
class DegreeSequence:
    values: list[int]
    mode: str
    prime: int | None
    seeds: list[int]
    map_id: str
    method: str = "factored"
    complete: bool = True
    extra: dict = field(default_factory=dict)  # timings etc.; never serialized

    def __len__(self):
        return len(self.values)

    def to_dict(self) -> dict:
        return {
            "map_id": self.map_id,
            "mode": self.mode,
            "prime": self.prime,
            "seeds": list(self.seeds),
            "values": list(self.values),
            "method": self.method,
            "complete": self.complete,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=1, sort_keys=True) + "\n"

    @classmethod
    def from_dict(cls, d: dict) -> DegreeSequence:
        return cls(
            values=[int(v) for v in d["values"]],
            mode=d.get("mode", EXACT),
            prime=d.get("prime"),
            seeds=list(d.get("seeds", [])),
            map_id=d.get("map_id", "unknown"),
            method=d.get("method", "factored"),
            complete=d.get("complete", True),
        )

    @classmethod
    def from_json(cls, text: str) -> DegreeSequence:
        return cls.from_dict(json.loads(text))

    @classmethod
    def from_values(cls, values, map_id="data", mode=EXACT) -> DegreeSequence:
        return cls([int(v) for v in values], mode, None, [], map_id, method="data")


def submultiplicativity_violations(values: list[int]) -> list[tuple[int, int]]:
    """Pairs (m, n) with d_{m+n} > d_m * d_n."""
    bad = []
    for m in range(1, len(values)):
        for n in range(m, len(values) - m):
            if values[m + n] > values[m] * values[n]:
                bad.append((m, n))
    return bad


def _deadline(seconds):
    return None if seconds is None else time.monotonic() + seconds


def _run(fmap: ProjectiveMap, domain, n_max: int, method: str, deadline, max_terms=None):
    """Degrees d_0..d_n_max; on budget exhaustion BudgetExceeded.partial is the list so far."""
    if method == "factored":
        it = FactoredIterator(fmap, domain)
        it.run(n_max, deadline)
        return it.degrees()
    if method == "direct":
        out = []
        for state in iterate_direct(fmap, domain, n_max):
            out.append(state.degree)
            if max_terms is not None and domain.symbolic:
                if max(len(c) for c in state.coordinates) > max_terms:
                    raise BudgetExceeded(f"term budget exceeded at iterate {state.index}", partial=out)
            if deadline is not None and time.monotonic() > deadline and len(out) <= n_max:
                raise BudgetExceeded(f"budget exhausted after iterate {state.index}", partial=out)
        return out
    raise ValueError(f"unknown method {method!r}")


def _child(conn, fmap, domain, n_max, method, max_terms):
    try:
        if method == "factored":
            it = FactoredIterator(fmap, domain)
            conn.send(("degree", it.history[0].degree))
            it.run(n_max, progress=lambda rec: conn.send(("degree", rec.degree)))
        else:
            for state in iterate_direct(fmap, domain, n_max):
                conn.send(("degree", state.degree))
                if max_terms is not None and max(len(c) for c in state.coordinates) > max_terms:
                    raise BudgetExceeded(f"term budget exceeded at iterate {state.index}")
        conn.send(("done", None))
    except Exception as exc:  # handed to the parent
        conn.send(("error", (type(exc).__name__, str(exc))))
    finally:
        conn.close()


def _run_bounded(fmap: ProjectiveMap, domain, n_max: int, method: str, seconds: float, max_terms=None):
    """Like _run, in a forked child that is stopped at the deadline.

    A single multiplication of large polynomials can outlast any budget, and
    compiled code cannot be interrupted from inside the process.
    """
    from .. import errors

    ctx = multiprocessing.get_context("fork")
    recv, send = ctx.Pipe(duplex=False)
    proc = ctx.Process(target=_child, args=(send, fmap, domain, n_max, method, max_terms), daemon=True)
    proc.start()
    send.close()
    deadline = time.monotonic() + seconds
    out: list = []
    try:
        while True:
            left = deadline - time.monotonic()
            if left <= 0 or not recv.poll(left):
                raise BudgetExceeded(f"budget exhausted after iterate {len(out) - 1}", partial=out)
            try:
                kind, payload = recv.recv()
            except EOFError:
                raise RuntimeError("degree worker exited without a result") from None
            if kind == "degree":
                out.append(payload)
            elif kind == "done":
                return out
            else:
                name, msg = payload
                cls = getattr(errors, name, RuntimeError)
                if cls is BudgetExceeded:
                    raise BudgetExceeded(msg, partial=out)
                try:
                    exc = cls(msg)
                except TypeError:
                    exc = errors.AlgEntropyError(f"{name}: {msg}")
                raise exc
    finally:
        if proc.is_alive():
            proc.terminate()
        proc.join()
        recv.close()


def degree_sequence_exact(
    fmap: ProjectiveMap,
    n_max: int,
    prime: int | None = MERSENNE61,
    method: str = "factored",
    backend: str = "flint",
    max_seconds: float | None = None,
    max_terms: int | None = None,
) -> DegreeSequence:
    """Degrees of the iterates of the generic point, symbolic in all variables.

    ``prime=None`` works over the rationals instead of GF(prime).
    """
    if n_max < 1:
        raise ValueError("n_max must be >= 1")
    domain = make_domain("exact", fmap.variables, prime, backend=backend)
    t0 = time.perf_counter()
    try:
        if max_seconds is not None and "fork" in multiprocessing.get_all_start_methods():
            values = _run_bounded(fmap, domain, n_max, method, max_seconds, max_terms)
        else:
            values = _run(fmap, domain, n_max, method, _deadline(max_seconds), max_terms)
    except BudgetExceeded as exc:
        partial = DegreeSequence(list(exc.partial or []), EXACT, prime, [], fmap.map_id, method, complete=False)
        raise BudgetExceeded(str(exc), partial=partial) from None
    seq = DegreeSequence(values, EXACT, prime, [], fmap.map_id, method)
    seq.extra["seconds"] = time.perf_counter() - t0
    return seq


def degree_sequence_line(
    fmap: ProjectiveMap,
    n_max: int,
    trials: int = 2,
    prime: int = MERSENNE61,
    seed: int = 0,
    method: str = "factored",
    backend: str = "flint",
    max_seconds: float | None = None,
) -> DegreeSequence:
    """Degrees along random lines; independent trials must agree term by term."""
    if trials < 2:
        raise ValueError("trials must be >= 2")
    if n_max < 1:
        raise ValueError("n_max must be >= 1")
    deadline = _deadline(max_seconds)
    seeds = [seed * 1000 + i for i in range(trials)]
    runs = []
    t0 = time.perf_counter()
    budget_hit = None
    for s in seeds:
        domain = make_domain("line", fmap.variables, prime, seed=s, backend=backend)
        try:
            runs.append(_run(fmap, domain, n_max, method, deadline))
        except BudgetExceeded as exc:
            runs.append(list(exc.partial or []))
            budget_hit = exc
            break
    agreed = []
    for vals in zip(*runs):
        if len(set(vals)) != 1:
            break
        agreed.append(vals[0])
    shortest = min(len(r) for r in runs)
    if len(agreed) < shortest:
        raise TrialsDisagree(runs, agreed)
    if budget_hit is not None or len(runs) < trials:
        partial = DegreeSequence(agreed if len(runs) > 1 else [], LINE, prime, seeds,
                                 fmap.map_id, method, complete=False)
        raise BudgetExceeded(str(budget_hit), partial=partial)
    seq = DegreeSequence(agreed, LINE, prime, seeds, fmap.map_id, method)
    seq.extra["seconds"] = time.perf_counter() - t0
    return seq
