"""Command-line front end.

Inputs may be file paths, the name of a bundled map (``hv``, ``f4``) or
``ref:NAME`` for a bundled reference data file; ``FILE#KEY`` picks one entry
of a JSON object.  Every command prints a summary and, with ``--out``, writes
a JSON artifact that the other commands accept as input.

Exit codes: 0 success, 2 usage or parse error, 3 budget exhausted,
4 verification failure, 5 network degraded (OEIS), 1 anything else.
"""
from __future__ import annotations

import csv
import io
import json
import os
import sys
from dataclasses import dataclass
from pathlib import Path

import click

from . import __version__
from .errors import (AlgEntropyError, BudgetExceeded, InsufficientDepth, MapValidationError, NonHomogeneous,
                     PolySyntaxError, SpanExceedsData, TrialsDisagree, VerificationFailed)
from .poly import MERSENNE61, is_prime

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_BUDGET = 3
EXIT_VERIFY = 4
EXIT_NETWORK = 5


@dataclass(frozen=True)
class RunConfig:
    mode: str = "line"
    prime: int = MERSENNE61
    seed: int = 0
    trials: int = 2
    n_max: int = 11
    max_seconds: float | None = None
    holdout: int | None = None
    fmt: str = "text"

    def __post_init__(self):
        if self.n_max < 1:
            raise click.BadParameter("--n must be positive")
        if self.max_seconds is not None and self.max_seconds <= 0:
            raise click.BadParameter("--max-seconds must be positive")
        if self.trials < 2:
            raise click.BadParameter("--trials must be at least 2")
        if not is_prime(self.prime) or self.prime >= 1 << 64:
            raise click.BadParameter(f"--prime {self.prime} is not a word-sized prime")


# ---------------------------------------------------------------- input helpers


def _map_file(spec: str) -> Path:
    from .reference import map_path

    p = Path(spec)
    if p.is_file():
        return p
    try:
        return map_path(spec)
    except FileNotFoundError:
        raise click.BadParameter(f"{spec!r} is neither a file nor a bundled map") from None


def _load_map(spec: str, seed: int = 0, prime: int = MERSENNE61):
    from .maps.projective import load_map

    return load_map(_map_file(spec), seed=seed, prime=prime)


def _load_json(spec: str) -> dict:
    from .reference import load_reference

    spec, _, key = spec.partition("#")
    if spec.startswith("ref:"):
        doc = load_reference(spec[4:])
    else:
        doc = json.loads(Path(spec).read_text())
    if key:
        if key not in doc:
            raise click.BadParameter(f"no entry {key!r} in {spec}")
        doc = doc[key]
    return doc


def _is_json_input(spec: str) -> bool:
    return spec.startswith("ref:") or spec.partition("#")[0].endswith(".json")


def _values_from(doc: dict) -> list[int]:
    for key in ("values", "degrees"):
        if key in doc:
            return [int(v) for v in doc[key]]
    raise click.BadParameter("JSON input has neither 'values' nor 'degrees'")


def _emit(ctx_out: str | None, artifact: dict):
    if ctx_out:
        Path(ctx_out).write_text(json.dumps(artifact, indent=1, sort_keys=True) + "\n")


def _print(fmt: str, text: str, artifact: dict, rows: list | None = None):
    if fmt == "json":
        click.echo(json.dumps(artifact, indent=1, sort_keys=True))
    elif fmt == "csv" and rows is not None:
        buf = io.StringIO()
        csv.writer(buf, lineterminator="\n").writerows(rows)
        click.echo(buf.getvalue(), nl=False)
    else:
        click.echo(text, nl=not text.endswith("\n"))


def _fail(code: int, message: str):
    click.echo(f"error: {message}", err=True)
    sys.exit(code)


def _run(fn):
    """Map package errors to the exit-code contract."""
    try:
        return fn()
    except (PolySyntaxError, MapValidationError, NonHomogeneous, json.JSONDecodeError) as exc:
        _fail(EXIT_USAGE, str(exc))
    except BudgetExceeded as exc:
        _fail(EXIT_BUDGET, str(exc))
    except (VerificationFailed, TrialsDisagree) as exc:
        _fail(EXIT_VERIFY, str(exc))
    except (SpanExceedsData, InsufficientDepth) as exc:
        _fail(EXIT_BUDGET, str(exc))
    except AlgEntropyError as exc:
        _fail(1, str(exc))
    except (FileNotFoundError, IsADirectoryError) as exc:
        _fail(EXIT_USAGE, str(exc))


common_format = click.option("--format", "fmt", type=click.Choice(["text", "json", "csv"]), default="text",
                             show_default=True, help="Output on stdout.")
common_out = click.option("--out", type=click.Path(dir_okay=False), help="Write the JSON artifact here.")


@click.group()
@click.version_option(__version__, prog_name="algentropy")
def main():
    """Degree growth and algebraic entropy of birational maps."""


# ---------------------------------------------------------------- degrees


def _degrees(cfg: RunConfig, fmap, out):
    from .maps.degrees import degree_sequence_exact, degree_sequence_line

    try:
        if cfg.mode == "exact":
            seq = degree_sequence_exact(fmap, cfg.n_max, cfg.prime, max_seconds=cfg.max_seconds)
        else:
            seq = degree_sequence_line(fmap, cfg.n_max, cfg.trials, cfg.prime, cfg.seed, max_seconds=cfg.max_seconds)
    except BudgetExceeded as exc:
        if exc.partial is not None:
            _emit(out, exc.partial.to_dict())
            click.echo(f"partial: {','.join(map(str, exc.partial.values))}", err=True)
        raise
    return seq


@main.command()
@click.argument("map_spec", metavar="MAP")
@click.option("--n", "n_max", type=int, default=11, show_default=True, help="Last iterate index.")
@click.option("--mode", type=click.Choice(["exact", "line"]), default="line", show_default=True)
@click.option("--trials", type=int, default=2, show_default=True, help="Agreeing random lines (line mode).")
@click.option("--prime", type=int, default=MERSENNE61, show_default=True)
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--max-seconds", type=float, default=None)
@common_out
@common_format
def degrees(map_spec, n_max, mode, trials, prime, seed, max_seconds, out, fmt):
    """Degree sequence d_0..d_n of the iterates of MAP."""
    cfg = RunConfig(mode, prime, seed, trials, n_max, max_seconds, None, fmt)

    def go():
        fmap = _load_map(map_spec, seed, prime)
        seq = _degrees(cfg, fmap, out)
        art = seq.to_dict()
        _emit(out, art)
        _print(fmt, ",".join(map(str, seq.values)), art, [["n", "degree"]] + [[i, v] for i, v in enumerate(seq.values)])

    _run(go)


# ---------------------------------------------------------------- entropy


@main.command()
@click.argument("source")
@click.option("--holdout", type=int, default=None, help="Terms held back to validate a fitted recurrence.")
@click.option("--relation", default=None, help="Derived-recurrence artifact (JSON) or relation text for Method 2.")
@click.option("--param", "params", multiple=True, help="NAME=VALUE for names in a relation text.")
@click.option("--n", "n_max", type=int, default=11, show_default=True, help="Iterates to compute from a map.")
@click.option("--mode", type=click.Choice(["exact", "line"]), default="line", show_default=True)
@click.option("--prime", type=int, default=MERSENNE61, show_default=True)
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--max-seconds", type=float, default=None)
@click.option("--table/--no-table", default=False, help="Also print the ratio table.")
@common_out
@common_format
def entropy(source, holdout, relation, params, n_max, mode, prime, seed, max_seconds, table, out, fmt):
    """Entropy estimates from a map or a degree artifact (JSON with 'values' or 'degrees')."""
    from .maps.degrees import DegreeSequence
    from .methods.ratios import ratio_table
    from .methods.report import entropy_report

    cfg = RunConfig(mode, prime, seed, 2, n_max, max_seconds, holdout, fmt)

    def go():
        if _is_json_input(source):
            seq = DegreeSequence.from_values(_values_from(_load_json(source)))
        else:
            seq = _degrees(cfg, _load_map(source, seed, prime), None)
        char_poly = None
        if relation is not None:
            from .factors.derived import char_poly_of_recurrence
            char_poly = char_poly_of_recurrence(_load_relation(relation, params))
        rep = entropy_report(seq.values, char_poly=char_poly, holdout=holdout)
        art = {"degrees": seq.values, "report": rep.to_dict()}
        text = rep.to_text()
        if table:
            art["ratio_table"] = ratio_table(seq.values).to_dict()
            text = ratio_table(seq.values).to_text() + text
        _emit(out, art)
        rows = [["method", "entropy"]] + [[e.method, "" if e.value is None else repr(e.value)] for e in rep.estimates]
        _print(fmt, text, art, rows)

    _run(go)


def _parse_params(params) -> dict:
    out = {}
    for p in params:
        if "=" not in p:
            raise click.BadParameter(f"expected NAME=VALUE, got {p!r}")
        k, v = p.split("=", 1)
        out[k.strip()] = int(v)
    return out


def _load_relation(spec: str, params=()):
    from .factors.derived import DerivedRecurrence, parse_relation

    if _is_json_input(spec):
        doc = _load_json(spec)
        if "product" in doc:
            return DerivedRecurrence.from_dict(doc)
        if "recurrence" in doc:
            return DerivedRecurrence.from_dict(doc["recurrence"])
        if "text" in doc:
            return parse_relation(doc["text"], doc.get("params"))
        raise click.BadParameter("JSON input holds no relation")
    if "=" in spec and "[" in spec:
        return parse_relation(spec, _parse_params(params))
    return parse_relation(Path(spec).read_text().strip(), _parse_params(params))


# ---------------------------------------------------------------- factors / derive


def _track(map_spec, n_max, mode, prime, seed, max_seconds):
    from .factors.tracker import track_factors

    fmap = _load_map(map_spec, seed, prime)
    return track_factors(fmap, n_max, mode=mode, prime=prime, seed=seed, max_seconds=max_seconds)


@main.command()
@click.argument("map_spec", metavar="MAP")
@click.option("--n", "n_max", type=int, default=12, show_default=True)
@click.option("--mode", type=click.Choice(["exact", "line"]), default="line", show_default=True)
@click.option("--prime", type=int, default=MERSENNE61, show_default=True)
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--window", type=int, default=5, show_default=True, help="Iterates that must share one template.")
@click.option("--family", default="B", show_default=True, help="Name of the factor family in the report.")
@click.option("--max-seconds", type=float, default=None)
@click.option("--adventive/--no-adventive", default=False, help="Also analyse the monomial cofactors.")
@common_out
@common_format
def factors(map_spec, n_max, mode, prime, seed, window, family, max_seconds, adventive, out, fmt):
    """Track the factor family of the iterates and detect when their form stabilizes."""
    from .factors.pattern import detect_stabilization

    RunConfig(mode, prime, seed, 2, n_max, max_seconds)

    def go():
        try:
            res = _track(map_spec, n_max, mode, prime, seed, max_seconds)
        except BudgetExceeded as exc:
            if exc.partial is not None:
                _emit(out, exc.partial.to_dict())
                click.echo(exc.partial.report(family), err=True)
            raise
        art = res.to_dict()
        text = res.report(family)
        pat = detect_stabilization(res, window) if len(res.iterates) > window else None
        if pat:
            art["pattern"] = pat.to_dict()
            rendered = pat.render(family, res.database.variables)
            text += f"stable from k = {pat.onset} (checked through {pat.last}): [" + ", ".join(rendered) + "]\n"
        else:
            art["pattern"] = None
            text += "form not stabilized within the tracked iterates\n"
        if adventive:
            from .factors.adventive import adventive_analysis
            from .reference import load_reference
            ref = load_reference("adventive_4d") if len(res.database.variables) == 5 else None
            table = adventive_analysis(res, reference=ref)
            art["adventive"] = table.to_dict()
            text += table.to_text()
        _emit(out, art)
        rows = [["k", "degree"]] + [[it.index, it.degree] for it in res.iterates]
        _print(fmt, text, art, rows)

    _run(go)


@main.command()
@click.argument("map_spec", metavar="MAP", required=False)
@click.option("--relation", default=None, help="Analyse this relation (text or JSON) instead of a map.")
@click.option("--param", "params", multiple=True, help="NAME=VALUE for names in a relation text.")
@click.option("--n", "n_max", type=int, default=7, show_default=True)
@click.option("--mode", type=click.Choice(["exact", "line"]), default="exact", show_default=True)
@click.option("--prime", type=int, default=MERSENNE61, show_default=True)
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--points", type=int, default=20, show_default=True, help="Random points per verified step.")
@click.option("--family", default=None, help="Factor family name (default A for 3 variables, else B).")
@click.option("--max-seconds", type=float, default=None)
@common_out
@common_format
def derive(map_spec, relation, params, n_max, mode, prime, seed, points, family, max_seconds, out, fmt):
    """Derived multiplicative recurrence of the factor family and its characteristic polynomial."""
    from .factors.derived import char_poly_of_recurrence, derive_recurrence
    from .factors.pattern import detect_stabilization
    from .methods.roots import dominant_root

    if (map_spec is None) == (relation is None):
        raise click.UsageError("give either MAP or --relation")
    RunConfig(mode, prime, seed, 2, n_max, max_seconds)

    def go():
        if relation is not None:
            rec = _load_relation(relation, params)
        else:
            res = _track(map_spec, n_max, mode, prime, seed, max_seconds)
            fam = family or ("A" if len(res.database.variables) == 3 else "B")
            pat = None
            if len(res.iterates) > 5:
                found = detect_stabilization(res)
                pat = found if found else None
            rec = derive_recurrence(res, pat, points=points, seed=seed, family=fam)
        poly = char_poly_of_recurrence(rec)
        art = {"recurrence": rec.to_dict(), "characteristic_polynomial": list(poly.coeffs)}
        text = f"{rec.render()}\n"
        if rec.verification:
            v = rec.verification
            text += f"verified at {v['passed']}/{v['checked']} random points (steps {v['steps'][0]}..{v['steps'][1]})\n"
        text += f"characteristic polynomial: {poly.to_text('r')}\n"
        try:
            rate = dominant_root(poly)
            art["growth"] = rate.to_dict()
            text += f"largest real root: {rate.decimal}\n"
        except AlgEntropyError:
            pass
        _emit(out, art)
        _print(fmt, text, art, [["power", "coefficient"]] + [[i, c] for i, c in enumerate(poly.coeffs)])

    _run(go)


@main.command()
@click.argument("relation")
@click.option("--param", "params", multiple=True, help="NAME=VALUE for names in a relation text.")
@click.option("--steps", type=int, default=30, show_default=True)
@click.option("--point", "point_items", multiple=True, help="VAR=INT; unspecified variables are random.")
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--decorations", type=click.Choice(["relation", "tracked", "unit"]), default="relation",
              show_default=True, help="Monomial decorations: the relation's own, per-step tracked ones, or none.")
@click.option("--coefficients-from", "coef_spec", default=None,
              help="Relation with the same factor structure whose coefficients are used.")
@click.option("--max-seconds", type=float, default=60.0, show_default=True)
@common_out
@common_format
def laurent(relation, params, steps, point_items, seed, decorations, coef_spec, max_seconds, out, fmt):
    """Run a relation from all-ones initial data and report whether every division is exact."""
    from .factors.laurent import laurent_test, random_point

    def go():
        rec = _load_relation(relation, params)
        coefs = None
        if coef_spec is not None:
            from .factors.laurent import with_coefficients
            coefs = with_coefficients(rec, _load_relation(coef_spec))
        elif any(t.coefficient is None for t in rec.terms):
            coefs = [1] * len(rec.terms)
            click.echo("note: generic coefficients replaced by 1", err=True)
        deco = {"relation": None, "unit": "unit", "tracked": rec.decorations}[decorations]
        fixed = _parse_params(point_items)
        names = {v for t in (rec.product, *rec.terms) for v, _ in t.decoration}
        for _, (pd, td) in rec.decorations.items():
            names.update(v for v, _ in pd)
            names.update(v for _, d in td for v, _ in d)
        pt = random_point(sorted(names), seed)
        pt.update(fixed)
        first = 1
        if decorations == "tracked" and rec.decorations:
            first = min(rec.decorations) - rec.order
        rep = laurent_test(rec, steps=steps, point=pt, decorations=deco, coefficients=coefs,
                           first_index=first, max_seconds=max_seconds)
        art = rep.to_dict()
        _emit(out, art)
        _print(fmt, rep.to_text(), art, [["step", "digits"]] + [[i + 1, d] for i, d in enumerate(rep.digits)])

    _run(go)


# ---------------------------------------------------------------- expand


@main.command()
@click.option("--gf", "gf_spec", required=True, help="Generating function JSON (numerator and denominator).")
@click.option("--n", "n_max", type=int, default=None, help="Last coefficient index (default: reference length).")
@click.option("--compare", default=None, help="Degree data to compare against (JSON with 'values' or 'degrees').")
@common_out
@common_format
def expand(gf_spec, n_max, compare, out, fmt):
    """Taylor coefficients of a rational generating function, optionally checked against data."""
    from .methods.gf import RationalGF, compare_expansion, expand_gf

    if n_max is None and compare is None:
        raise click.UsageError("give --n or --compare")

    def go():
        gf = RationalGF.from_dict(_load_json(gf_spec))
        if compare is not None:
            rep = compare_expansion(gf, _values_from(_load_json(compare)), n_max)
            art = {"generating_function": gf.to_dict(), **rep.to_dict()}
            text = ",".join(map(str, rep.expanded)) + "\n" + rep.to_text()
            values = rep.expanded
        else:
            values = expand_gf(gf, n_max)
            art = {"generating_function": gf.to_dict(), "expanded": [str(v) for v in values]}
            text = ",".join(map(str, values))
        _emit(out, art)
        _print(fmt, text, art, [["n", "coefficient"]] + [[i, v] for i, v in enumerate(values)])

    _run(go)


# ---------------------------------------------------------------- oeis


@main.command()
@click.argument("source")
@click.option("--max-results", type=int, default=10, show_default=True)
@click.option("--offline", is_flag=True, help="Use the cache only.")
@click.option("--cache-dir", type=click.Path(file_okay=False), default=None,
              help="Cache directory (default: $ALGENTROPY_OEIS_CACHE or the user cache).")
@click.option("--terms", type=int, default=None, help="Use only the first TERMS values.")
@common_out
@common_format
def oeis(source, max_results, offline, cache_dir, terms, out, fmt):
    """Look up a degree sequence (artifact JSON or comma-separated integers) in the OEIS."""
    from .oeis import OeisClient, OeisQuery

    def go():
        if _is_json_input(source) or os.path.isfile(source):
            values = _values_from(_load_json(source))
        else:
            values = [int(v) for v in source.replace(" ", "").split(",") if v]
        if terms is not None:
            values = values[:terms]
        client = OeisClient(cache_dir=cache_dir, offline=offline)
        res = client.lookup(OeisQuery(tuple(values), max_results))
        art = res.to_dict()
        lines = [f"{m.id}  {m.name}  (offset {m.offset}, {m.source})" for m in res.matches]
        if not lines:
            lines.append("no match")
        lines.extend(f"note: {n}" for n in res.notes)
        _emit(out, art)
        _print(fmt, "\n".join(lines) + "\n", art, [["id", "offset", "source"]] + [[m.id, m.offset, m.source] for m in res.matches])
        if res.degraded:
            sys.exit(EXIT_NETWORK)

    _run(go)


if __name__ == "__main__":
    main()
