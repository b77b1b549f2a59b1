"""Shift-invariant exponent templates of factored iterates."""
from __future__ import annotations

from dataclasses import dataclass, field

from .tracker import FactorDatabase, FactoredIterate, TrackResult

DEFAULT_WINDOW = 5


def offset_key(family: int, offset: int, families: int) -> str:
    base = "k" if offset == 0 else f"k{offset:+d}"
    return base if families == 1 else f"{base}@{family}"


def template_of(it: FactoredIterate, db: FactorDatabase) -> tuple:
    """Per coordinate, the frozen map (family, birth - k) -> exponent."""
    out = []
    for c in it.coordinates:
        if c is None:
            out.append(None)
            continue
        t = {}
        for j, e in c.factors.items():
            f = db.factors[j]
            key = (f.family, f.birth - it.index) if f.parent is None else (f.label, 0)
            t[key] = t.get(key, 0) + e
        out.append(frozenset(t.items()))
    return tuple(out)


@dataclass
class StabilizationPattern:
    onset: int
    last: int
    templates: list  # per coordinate: dict (family, offset) -> exponent, or None
    monomials: dict  # k -> per-coordinate variable exponents (the adventive part)
    families: int
    degenerate: bool = False

    @property
    def window(self) -> tuple[int, int]:
        return self.onset, self.last

    @property
    def span(self) -> int:
        offs = [-o for t in self.templates if t for (_, o) in t if isinstance(o, int)]
        return max(offs, default=0)

    def render(self, family_name: str = "B", variables=None) -> list[str]:
        """Coordinates as text, e.g. 'A[k-3]^3*A[k]'; monomials from the onset iterate."""
        out = []
        mono = self.monomials.get(self.onset)
        for i, t in enumerate(self.templates):
            if t is None:
                out.append("0")
                continue
            items = []
            if variables is not None and mono is not None and mono[i] is not None:
                for v, e in zip(variables, mono[i]):
                    if e:
                        items.append(v if e == 1 else f"{v}^{e}")
            for (fam, off), e in sorted(t.items(), key=lambda kv: (kv[0][1], str(kv[0][0]))):
                name = f"{family_name}[{offset_key(fam, off, self.families)}]"
                items.append(name if e == 1 else f"{name}^{e}")
            out.append("*".join(items) or "1")
        return out

    def to_dict(self) -> dict:
        return {
            "onset": self.onset,
            "last": self.last,
            "degenerate": self.degenerate,
            "templates": [None if t is None else {offset_key(f, o, self.families): e for (f, o), e in sorted(t.items())}
                          for t in self.templates],
            "monomials": {str(k): [None if m is None else list(m) for m in v] for k, v in sorted(self.monomials.items())},
        }


@dataclass
class NotStabilized:
    checked: tuple[int, int]
    differing: list = field(default_factory=list)  # (coordinate, offset key) changed in the last step

    def __bool__(self):
        return False


def detect_stabilization(result: TrackResult, window: int = DEFAULT_WINDOW):
    """Earliest k from which the template stays fixed through the last iterate, if that run is >= window long."""
    iters = result.iterates[1:]
    db = result.database
    if len(iters) < window:
        raise ValueError(f"need at least {window} iterates, have {len(iters)}")
    families = len({f.family for f in db.factors}) or 1
    temps = [template_of(it, db) for it in iters]
    onset_pos = len(temps) - 1
    while onset_pos > 0 and temps[onset_pos - 1] == temps[-1]:
        onset_pos -= 1
    run = len(temps) - onset_pos
    if run < window:
        a, b = temps[-2], temps[-1]
        diff = []
        for i, (ta, tb) in enumerate(zip(a, b)):
            da, dbb = dict(ta or ()), dict(tb or ())
            for key in sorted(set(da) | set(dbb), key=str):
                if da.get(key) != dbb.get(key):
                    diff.append((i, key))
        return NotStabilized((iters[0].index, iters[-1].index), diff)
    onset = iters[onset_pos].index
    templates = [None if t is None else dict(t) for t in temps[-1]]
    monomials = {it.index: [None if c is None else c.monomial for c in it.coordinates] for it in iters[onset_pos:]}
    degenerate = not db.factors or all(not t for t in templates)
    return StabilizationPattern(onset, iters[-1].index, templates, monomials, families, degenerate)
