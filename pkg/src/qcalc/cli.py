"""qcalc command line.

Exit codes: 0 when every check passes, 1 when some check fails (the report is
still written), 2 on invalid configuration.
"""

import csv
import io
import json
import os
import re
import sys
import time
from datetime import datetime, timezone

import click

from . import __version__, habiro, qcomplex, suites
from .errors import InvalidConfig, QCalcError
from .qcore import ZqPoly, cyclotomic, format_poly, q_analogue

SCHEMA = "qcalc-report/1"


# ---------------------------------------------------------------------------
# parsing helpers


_TERM = re.compile(r"([+-]?)(\d*)(q(?:\^(-?\d+))?)?")


def parse_poly(text):
    """Parse '1+2q-q^3' or a JSON list of coefficients into a ZqPoly."""
    text = text.strip().replace(" ", "")
    if text.startswith("["):
        return ZqPoly([int(c) for c in json.loads(text)])
    if not text:
        raise InvalidConfig("empty polynomial")
    terms = {}
    pos = 0
    while pos < len(text):
        match = _TERM.match(text, pos)
        if not match or match.end() == pos or (not match.group(2) and not match.group(3)):
            raise InvalidConfig(f"cannot parse polynomial {text!r}")
        sign = -1 if match.group(1) == "-" else 1
        coeff = int(match.group(2)) if match.group(2) else 1
        if match.group(3):
            exp = int(match.group(4)) if match.group(4) is not None else 1
        else:
            exp = 0
        terms[exp] = terms.get(exp, 0) + sign * coeff
        pos = match.end()
    return ZqPoly.from_dict(terms)


def parse_int_list(text, name):
    try:
        values = [int(x) for x in str(text).split(",") if x.strip()]
    except ValueError:
        raise InvalidConfig(f"{name} must be a comma-separated list of integers") from None
    if not values:
        raise InvalidConfig(f"{name} must be nonempty")
    return values


def parse_range(text, name):
    """'a..b' (inclusive) or a single integer."""
    text = str(text)
    if ".." in text:
        lo, hi = text.split("..", 1)
        try:
            lo, hi = int(lo), int(hi)
        except ValueError:
            raise InvalidConfig(f"{name} must look like a..b") from None
    else:
        try:
            lo = hi = int(text)
        except ValueError:
            raise InvalidConfig(f"{name} must look like a..b") from None
    if lo > hi:
        raise InvalidConfig(f"{name} is empty")
    return lo, hi


def threads_from(value):
    env = os.environ.get("QCALC_THREADS")
    raw = env if env not in (None, "") else value
    try:
        n = int(raw) if raw is not None else 1
    except ValueError:
        raise InvalidConfig("thread count must be an integer") from None
    if n < 1:
        raise InvalidConfig("thread count must be >= 1")
    return n


class Settings:
    """Flags > config file > defaults."""

    def __init__(self, config_path, flags, defaults):
        config = {}
        if config_path:
            try:
                with open(config_path) as fh:
                    config = json.load(fh)
            except (OSError, json.JSONDecodeError) as exc:
                raise InvalidConfig(f"cannot read config file: {exc}") from None
            if not isinstance(config, dict):
                raise InvalidConfig("config file must hold a JSON object")
        self.values = dict(defaults)
        for key, value in config.items():
            self.values[key.replace("-", "_")] = value
        for key, value in flags.items():
            if value is not None:
                self.values[key] = value

    def __getitem__(self, key):
        return self.values[key]

    def echo(self):
        return {k: _stringify(v) for k, v in sorted(self.values.items())}


def _stringify(value):
    if isinstance(value, bool) or value is None:
        return value
    if isinstance(value, (int, float)):
        return str(value)
    if isinstance(value, (list, tuple)):
        return [_stringify(v) for v in value]
    if isinstance(value, dict):
        return {str(k): _stringify(v) for k, v in value.items()}
    return str(value)


# ---------------------------------------------------------------------------
# reports


def make_report(suite, parameters, records, settings, timestamps, extra=None):
    report = {
        "schema": SCHEMA,
        "suite": suite,
        "version": __version__,
        "parameters": _stringify(parameters),
        "config": settings.echo(),
        "checks": [],
        "pass": all(r["pass"] for r in records if r.get("gate", True)),
    }
    for r in records:
        entry = {"id": r["id"], "pass": r["pass"], "witness": suites._jsonable(r.get("witness"))}
        if timestamps and "seconds" in r:
            entry["wall_time"] = f"{r['seconds']:.3f}"
        report["checks"].append(entry)
    if extra:
        report.update(extra)
    if timestamps:
        report["timestamp"] = datetime.now(timezone.utc).isoformat(timespec="seconds")
    return report


def render(report, fmt):
    if fmt == "json":
        return json.dumps(report, indent=2) + "\n"
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["id", "pass", "witness"])
    for c in report["checks"]:
        writer.writerow([c["id"], "true" if c["pass"] else "false", json.dumps(c["witness"], sort_keys=True)])
    return buf.getvalue()


def emit(text, output):
    if output:
        with open(output, "w") as fh:
            fh.write(text)
    else:
        click.echo(text, nl=False)


def finish(report, fmt, output):
    emit(render(report, fmt), output)
    sys.exit(0 if report["pass"] else 1)


def common_options(fn):
    fn = click.option("--format", "fmt", type=click.Choice(["json", "csv"]), default=None, help="Report format.")(fn)
    fn = click.option("--output", "-o", type=click.Path(dir_okay=False), default=None, help="Write report here.")(fn)
    fn = click.option("--config", "config_path", type=click.Path(dir_okay=False), default=None, help="JSON config file.")(fn)
    fn = click.option("--no-timestamps", is_flag=True, default=False, help="Omit timestamps and wall times.")(fn)
    fn = click.option("--threads", type=int, default=None, help="Parallelism (QCALC_THREADS overrides).")(fn)
    return fn


def guarded(fn):
    """Map configuration errors to exit code 2."""

    def wrapper(*args, **kwargs):
        try:
            return fn(*args, **kwargs)
        except InvalidConfig as exc:
            click.echo(f"invalid configuration: {exc}", err=True)
            sys.exit(2)

    wrapper.__name__ = fn.__name__
    wrapper.__doc__ = fn.__doc__
    return wrapper


def suite_records(result):
    for r in result.records:
        r.setdefault("seconds", result.seconds / max(len(result.records), 1))
    return result.records


# ---------------------------------------------------------------------------
# commands


@click.group()
@click.version_option(__version__)
def main():
    """Exact q-analogue, q-de Rham and Habiro-ring computations."""


@main.command()
@click.argument("kind")
@click.argument("args", nargs=-1, type=int)
@guarded
def qanalog(kind, args):
    """Evaluate integer/factorial/binomial/pochhammer q-analogues."""
    try:
        click.echo(format_poly(q_analogue(kind, *args)))
    except (TypeError, ValueError) as exc:
        raise InvalidConfig(str(exc)) from None


@main.command("cyclotomic")
@click.argument("m", type=int)
@guarded
def cyclotomic_cmd(m):
    """Print Phi_m(q)."""
    if m < 1:
        raise InvalidConfig("m must be >= 1")
    click.echo(format_poly(cyclotomic(m)))


@main.command("delta-suite")
@click.option("--primes", default=None, help="Comma-separated primes.")
@click.option("--trunc", type=int, default=None, help="Truncation N, working mod (q-1)^N.")
@click.option("--pairs", type=int, default=None, help="Random pairs per prime.")
@click.option("--seed", type=int, default=None)
@common_options
@guarded
def delta_suite(primes, trunc, pairs, seed, fmt, output, config_path, no_timestamps, threads):
    """Delta-ring identities plus decomposition witnesses."""
    s = Settings(
        config_path,
        {"primes": primes, "trunc": trunc, "pairs": pairs, "seed": seed, "format": fmt},
        {"primes": "2,3,5,7", "trunc": 8, "pairs": 100, "seed": 2024, "format": "json"},
    )
    plist = parse_int_list(s["primes"], "primes")
    if int(s["trunc"]) < 2 or int(s["pairs"]) < 1:
        raise InvalidConfig("trunc must be >= 2 and pairs >= 1")
    threads_from(threads)
    result = suites.criterion_2(primes=tuple(plist), N=int(s["trunc"]), pairs=int(s["pairs"]), seed=int(s["seed"]))
    records = suite_records(result)
    wit = suites.criterion_3(gamma_primes=tuple(plist), gammaq_primes=tuple(p for p in plist if p <= 3))
    records = records + suite_records(wit)
    report = make_report("delta-suite", {"primes": plist, "trunc": s["trunc"]}, records, s, not no_timestamps)
    finish(report, s["format"], output)


@main.command("qpd-suite")
@click.option("--primes", default=None)
@click.option("--n-max", type=int, default=None)
@common_options
@guarded
def qpd_suite(primes, n_max, fmt, output, config_path, no_timestamps, threads):
    """Factorial ratios, Nygaard checks and the alpha dichotomy."""
    s = Settings(
        config_path,
        {"primes": primes, "n_max": n_max, "format": fmt},
        {"primes": "2,3", "n_max": 3, "format": "json"},
    )
    plist = parse_int_list(s["primes"], "primes")
    if int(s["n_max"]) < 1:
        raise InvalidConfig("n-max must be >= 1")
    threads_from(threads)
    records = suite_records(suites.criterion_5(n_max=int(s["n_max"]), primes=tuple(plist)))
    records += suite_records(suites.criterion_4())
    report = make_report("qpd-suite", {"primes": plist, "n_max": s["n_max"]}, records, s, not no_timestamps)
    finish(report, s["format"], output)


@main.command()
@click.option("--vars", "nvars", type=int, default=None)
@click.option("--laurent/--polynomial", default=None)
@click.option("--m", type=int, default=None)
@click.option("--mod-power", type=int, default=None)
@click.option("--window", default=None, help="Multidegree box a..b in every variable.")
@click.option("--flavor", type=click.Choice(list(qcomplex.FLAVORS)), default=None)
@click.option("--bockstein", is_flag=True, default=None)
@common_options
@guarded
def cohomology(nvars, laurent, m, mod_power, window, flavor, bockstein, fmt, output, config_path, no_timestamps, threads):
    """Cohomology tables of toric q-de Rham / q-Hodge complexes."""
    s = Settings(
        config_path,
        {
            "vars": nvars,
            "laurent": laurent,
            "m": m,
            "mod_power": mod_power,
            "window": window,
            "flavor": flavor,
            "bockstein": bockstein,
            "format": fmt,
        },
        {"vars": 1, "laurent": True, "m": 1, "mod_power": 1, "window": "-4..4", "flavor": "qHodge", "bockstein": False, "format": "csv"},
    )
    n, mm, k = int(s["vars"]), int(s["m"]), int(s["mod_power"])
    if n < 0 or mm < 1 or k < 1:
        raise InvalidConfig("vars >= 0, m >= 1 and mod-power >= 1 required")
    lo, hi = parse_range(s["window"], "window")
    workers = threads_from(threads)
    try:
        spec = qcomplex.ToricSpec.box(n, bool(s["laurent"]), lo, hi)
    except QCalcError as exc:
        raise InvalidConfig(str(exc)) from None
    K = qcomplex.QKoszul(spec, s["flavor"])
    if s["bockstein"]:
        if k != 1:
            raise InvalidConfig("--bockstein works over Z[q]/(q^m-1)")
        table = qcomplex.bockstein(K, mm, workers=workers)
        ok = table.beta_squared_zero
    else:
        table = qcomplex.cohomology_mod(K, mm, k, workers=workers)
        ok = True
    ok = ok and table.euler_ok()
    if s["format"] == "csv":
        emit(table.to_csv(), output)
    else:
        report = make_report(
            "cohomology",
            {"spec": spec.to_json(), "m": mm, "mod_power": k, "flavor": s["flavor"]},
            [{"id": "euler_characteristic_and_beta_squared", "pass": ok}],
            s,
            not no_timestamps,
            extra={"table": table.to_json()},
        )
        emit(render(report, "json"), output)
    sys.exit(0 if ok else 1)


@main.command("decalage-check")
@click.option("--vars", "nvars", type=int, default=None)
@click.option("--bound", type=int, default=None, help="Window |a_i| <= bound.")
@click.option("--k-max", type=int, default=None)
@common_options
@guarded
def decalage_check(nvars, bound, k_max, fmt, output, config_path, no_timestamps, threads):
    """Check eta_(q-1) of the q-Hodge complex against the q-de Rham complex."""
    s = Settings(
        config_path,
        {"vars": nvars, "bound": bound, "k_max": k_max, "format": fmt},
        {"vars": 2, "bound": 6, "k_max": 3, "format": "json"},
    )
    if int(s["vars"]) < 1 or int(s["bound"]) < 0 or int(s["k_max"]) < 1:
        raise InvalidConfig("vars >= 1, bound >= 0, k-max >= 1 required")
    threads_from(threads)
    result = suites.criterion_7(n_max=int(s["vars"]), bound=int(s["bound"]), k_max=int(s["k_max"]))
    report = make_report("decalage-check", {"vars": s["vars"], "bound": s["bound"]}, suite_records(result), s, not no_timestamps)
    finish(report, s["format"], output)


@main.command("habiro-element")
@click.option("--poly", default=None, help="Polynomial such as 1+q^2 or a JSON coefficient list.")
@click.option("--indices", default=None, help="Index range 1..M (divisor-closed).")
@click.option("--primes", default=None)
@click.option("--a", "a_exp", type=int, default=None)
@click.option("--N", "N", type=int, default=None)
@common_options
@guarded
def habiro_element(poly, indices, primes, a_exp, N, fmt, output, config_path, no_timestamps, threads):
    """Root-of-unity expansions of a polynomial with the re-expansion checks."""
    s = Settings(
        config_path,
        {"poly": poly, "indices": indices, "primes": primes, "a": a_exp, "N": N, "format": fmt},
        {"poly": "q", "indices": "1..6", "primes": "2,3", "a": 4, "N": 4, "format": "json"},
    )
    f = parse_poly(str(s["poly"]))
    lo, hi = parse_range(s["indices"], "indices")
    if lo != 1:
        raise InvalidConfig("indices must start at 1")
    plist = parse_int_list(s["primes"], "primes")
    if int(s["a"]) < 1 or int(s["N"]) < 1:
        raise InvalidConfig("a and N must be >= 1")
    threads_from(threads)
    start = time.perf_counter()
    E = habiro.habiro_from_poly(f, range(1, hi + 1), habiro.HabiroPrecision(N=int(s["N"]), a=int(s["a"]), primes=tuple(plist)))
    seconds = time.perf_counter() - start
    records = [
        {"id": f"consistency/p={p}/m={m}", "pass": r["pass"], "witness": r["discrepancy"], "seconds": seconds / max(len(E.ledger), 1)}
        for (p, m), r in sorted(E.ledger.items())
    ]
    expansions = {str(m): [format_poly(c.rep) for c in E[m].coeffs] for m in E.indices}
    report = make_report(
        "habiro-element",
        {"poly": format_poly(f), "indices": [lo, hi], "primes": plist, "a": s["a"], "N": s["N"]},
        records,
        s,
        not no_timestamps,
        extra={"expansions": expansions},
    )
    finish(report, s["format"], output)


@main.command("relative-habiro")
@click.argument("spec_file", required=False)
@click.option("--m", type=int, default=None)
@click.option("--prime-precision", type=int, default=None, help="p-adic exponent a.")
@click.option("--N", "N", type=int, default=None, help="Phi_d power of each component.")
@common_options
@guarded
def relative_habiro(spec_file, m, prime_precision, N, fmt, output, config_path, no_timestamps, threads):
    """Glued relative Habiro ring of an etale algebra given as {"g": [...], "delta": "..."}."""
    s = Settings(
        config_path,
        {"spec_file": spec_file, "m": m, "a": prime_precision, "N": N, "format": fmt},
        {"spec_file": None, "m": 6, "a": 4, "N": None, "format": "json"},
    )
    if s["spec_file"]:
        try:
            with open(s["spec_file"]) as fh:
                spec = habiro.EtaleAlgebraSpec.from_json(json.load(fh))
        except (OSError, json.JSONDecodeError, KeyError, ValueError) as exc:
            raise InvalidConfig(f"cannot read etale spec: {exc}") from None
        except QCalcError as exc:
            raise InvalidConfig(str(exc)) from None
    else:
        spec = habiro.INTEGERS
    mm, a = int(s["m"]), int(s["a"])
    if mm < 1 or a < 1:
        raise InvalidConfig("m and prime precision must be >= 1")
    threads_from(threads)
    start = time.perf_counter()
    try:
        G = habiro.build_relative_habiro(spec, mm, N=None if s["N"] is None else int(s["N"]), a=a)
    except QCalcError as exc:
        raise InvalidConfig(f"{type(exc).__name__}: {exc}") from None
    cmp = habiro.compare_qwitt(G)
    seconds = time.perf_counter() - start
    records = [
        {"id": "gluing", "pass": G.validation["pass"], "witness": G.validation, "seconds": seconds / 2},
        {"id": "qwitt_comparison", "pass": cmp["pass"], "witness": cmp, "seconds": seconds / 2},
    ]
    report = make_report(
        "relative-habiro", {"spec": spec.to_json(), "m": mm, "a": a}, records, s, not no_timestamps, extra={"glued_ring": _stringify(G.to_json())}
    )
    finish(report, s["format"], output)


@main.command("verify-all")
@common_options
@guarded
def verify_all(fmt, output, config_path, no_timestamps, threads):
    """Run all twelve acceptance criteria."""
    s = Settings(config_path, {"format": fmt}, {"format": "json"})
    workers = threads_from(threads)
    results = suites.run_all(workers)
    records = []
    for res in results:
        records.append(
            {
                "id": f"criterion_{res.criterion}/{res.name}",
                "pass": res.passed,
                "witness": [f"{r['id']}: {'pass' if r['pass'] else 'FAIL'}" for r in res.records],
                "seconds": res.seconds,
            }
        )
    report = make_report("verify-all", {"criteria": len(results)}, records, s, not no_timestamps)
    finish(report, s["format"], output)


if __name__ == "__main__":
    main()
