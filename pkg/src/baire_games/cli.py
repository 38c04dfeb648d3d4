"""Command-line harness: play, tournament, verify, replay, list-catalog."""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
import tempfile
import time
from concurrent.futures import ProcessPoolExecutor
from fractions import Fraction

from . import catalog
from .arena import (
    ConfigError,
    KINDS,
    MatchConfig,
    Transcript,
    play_match,
    referee,
    replay,
)
from .exactnum import QuadPoint, format_point
from .strategies import STRATEGY_IDS, make_strategy

EXIT_BAD_CONFIG = 2
EXIT_VERIFY_FAILED = 1

PLAY_KEYS = {"kind", "target", "I", "II", "rounds", "eps_dec", "window", "seed", "transcript", "verdict"}
TOURNAMENT_KEYS = {"cells", "matrix", "rounds", "eps_dec", "window", "seed", "matches", "out", "jobs", "transcripts"}
CELL_KEYS = {"kind", "target", "I", "II", "rounds", "eps_dec", "window", "seed", "matches"}
CSV_HEADER = ["kind", "target", "I", "II", "seed", "verdict", "reason", "certificate", "rounds"]


def _atomic_write(path: str, text: str) -> None:
    folder = os.path.dirname(os.path.abspath(path))
    os.makedirs(folder, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=folder, prefix=".tmp-")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _load_json(path: str) -> dict:
    with open(path, encoding="utf-8") as fh:
        data = json.load(fh)
    if not isinstance(data, dict):
        raise ConfigError("config must be a JSON object")
    return data


def _reject_unknown(data: dict, allowed: set, where: str) -> None:
    extra = sorted(set(data) - allowed)
    if extra:
        raise ConfigError(f"unknown keys in {where}: {', '.join(extra)}")


def match_config(data: dict, seed_override: int | None = None, defaults: dict | None = None) -> MatchConfig:
    d = dict(defaults or {})
    d.update({k: v for k, v in data.items() if k in ("rounds", "eps_dec", "window", "seed")})
    try:
        return MatchConfig(
            rounds=int(d.get("rounds", 40)),
            eps_dec=Fraction(str(d.get("eps_dec", "1/8"))),
            window=int(d.get("window", 8)),
            seed=int(seed_override if seed_override is not None else d.get("seed", 0)),
        )
    except (TypeError, ValueError, ZeroDivisionError) as exc:
        raise ConfigError(f"bad match parameters: {exc}") from None


def run_cell(kind: str, target_id: str, i_id: str, ii_id: str, config: MatchConfig):
    """Play and referee one match; returns ``(transcript, verdict)``."""
    if kind not in KINDS:
        raise ConfigError(f"unknown game kind {kind!r}")
    try:
        target = catalog.lookup(target_id)
    except KeyError as exc:
        raise ConfigError(str(exc)) from None
    t = play_match(kind, target, make_strategy(i_id), make_strategy(ii_id), config)
    return t, referee(kind, t, target=target)


# -- play ----------------------------------------------------------------------------------

def cmd_play(args) -> int:
    data = _load_json(args.config)
    _reject_unknown(data, PLAY_KEYS, "play config")
    missing = [k for k in ("kind", "target", "I", "II") if k not in data]
    if missing:
        raise ConfigError(f"missing keys: {', '.join(missing)}")
    cfg = match_config(data, args.seed)
    t, v = run_cell(data["kind"], data["target"], data["I"], data["II"], cfg)
    transcript = args.transcript or data.get("transcript") or "transcript.jsonl"
    verdict = args.verdict or data.get("verdict") or "verdict.json"
    _atomic_write(transcript, t.dumps())
    _atomic_write(verdict, v.dumps())
    print(json.dumps(v.to_json(), ensure_ascii=False))
    return v.exit_code


# -- tournament ------------------------------------------------------------------------------

def _expand_cells(data: dict) -> list:
    cells = []
    for c in data.get("cells", []):
        if not isinstance(c, dict):
            raise ConfigError("cells must be objects")
        _reject_unknown(c, CELL_KEYS, "tournament cell")
        cells.append(c)
    m = data.get("matrix")
    if m:
        _reject_unknown(m, {"kinds", "targets", "I", "II"}, "tournament matrix")
        for kind in m.get("kinds", []):
            for target in m.get("targets", []):
                for i_id in m.get("I", []):
                    for ii_id in m.get("II", []):
                        cells.append({"kind": kind, "target": target, "I": i_id, "II": ii_id})
    return cells


def _cell_job(job):
    kind, target, i_id, ii_id, cfg = job
    start = time.perf_counter()
    try:
        t, v = run_cell(kind, target, i_id, ii_id, cfg)
        row = [v.outcome, v.reason, json.dumps(v.certificate, ensure_ascii=False, sort_keys=True), str(v.rounds)]
        text = t.dumps()
    except Exception as exc:  # noqa: BLE001 - a failing cell is recorded, not fatal
        row = ["error", type(exc).__name__, str(exc), "0"]
        text = ""
    return row, time.perf_counter() - start, text


def tournament_rows(data: dict, seed_override: int | None = None, jobs: int = 1) -> tuple:
    """Rows of the verdict table plus per-row wall times, in cell order."""
    cells = _expand_cells(data)
    defaults = {k: data[k] for k in ("rounds", "eps_dec", "window", "seed") if k in data}
    plan = []
    for c in cells:
        for k in ("kind", "target", "I", "II"):
            if k not in c:
                raise ConfigError(f"tournament cell missing {k!r}")
        cfg = match_config(c, seed_override, defaults)
        matches = int(c.get("matches", data.get("matches", 1)))
        for j in range(matches):
            cfg_j = MatchConfig(cfg.rounds, cfg.eps_dec, cfg.window, cfg.seed + j)
            plan.append((c["kind"], c["target"], c["I"], c["II"], cfg_j))
    if jobs > 1 and len(plan) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(_cell_job, plan, chunksize=4))
    else:
        results = [_cell_job(p) for p in plan]
    rows, times, texts = [], [], []
    for (kind, target, i_id, ii_id, cfg), (row, elapsed, text) in zip(plan, results):
        rows.append([kind, target, i_id, ii_id, str(cfg.seed)] + row)
        times.append(elapsed)
        texts.append(text)
    return rows, times, texts


def _csv_text(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    return buf.getvalue()


def cmd_tournament(args) -> int:
    data = _load_json(args.config)
    _reject_unknown(data, TOURNAMENT_KEYS, "tournament config")
    jobs = int(args.jobs if args.jobs is not None else data.get("jobs", 1))
    rows, times, texts = tournament_rows(data, args.seed, jobs)
    out = args.out or data.get("out") or "tournament.csv"
    _atomic_write(out, _csv_text(CSV_HEADER, rows))
    if data.get("transcripts"):
        # one JSONL file per cell, every match of the cell in order
        for k, text in enumerate(texts):
            _atomic_write(os.path.join(data["transcripts"], f"cell-{k:04d}.jsonl"), text)
    # wall times vary run to run, so they live beside the deterministic table
    timing = [r[:5] + [f"{t:.6f}"] for r, t in zip(rows, times)]
    _atomic_write(out + ".timing.csv", _csv_text(CSV_HEADER[:5] + ["wall_seconds"], timing))
    counts: dict = {}
    for r in rows:
        counts[r[5]] = counts.get(r[5], 0) + 1
    print(json.dumps({"cells": len(rows), "verdicts": counts, "out": out}))
    return 0


# -- verify ----------------------------------------------------------------------------------

EPS_SCHEDULE = (Fraction(1), Fraction(1, 2), Fraction(1, 4), Fraction(1, 8))


def _sample_points(carrier: str, count: int = 100) -> list:
    if carrier == "cantor":
        out = []
        for k in range(count):
            bits = format(k, "b")
            out.append(catalog.CantorPoint(bits[1:], "01" if k % 3 else "0"))
        return out
    pts = [QuadPoint(Fraction(k, count - 1)) for k in range(count - 10)]
    pts += [QuadPoint(Fraction(k, 11), Fraction(1, 16)) for k in range(10)]
    return [p for p in pts if 0 <= p <= 1]


def _cex_json(c) -> dict:
    return {"x0": format_point(c.x0), "x1": format_point(c.x1), "gap": format_point(c.gap),
            "member": c.member.ident}


def verify_target(entry, budget: int = 10_000, bogus=None) -> dict:
    """Gauge, normalization, shrink and oscillation checks for one entry."""
    report = {"target": entry.ident, **catalog.describe(entry), "checks": []}

    def record(name, ok, **detail):
        report["checks"].append({"check": name, "pass": bool(ok), **detail})

    fam = catalog.is_family(entry)
    has_gauge = (entry.classification == catalog.EQUI_BAIRE1) if fam else entry.regularity != catalog.NOT_BAIRE1
    if bogus is not None:
        g = catalog.constant_gauge(bogus, entry.carrier)
        for eps in EPS_SCHEDULE:
            r = catalog.check_gauge(entry, g, eps, budget=budget)
            ok = isinstance(r, catalog.NoViolation)
            record(f"bogus-gauge eps={eps}", ok, **({} if ok else {"counterexample": _cex_json(r)}))
        report["pass"] = all(c["pass"] for c in report["checks"])
        return report
    if has_gauge:
        g = catalog.gauge_family(entry)
        norm = catalog.normalize_gauges(g)
        shrunk = catalog.shrink_gauges(norm)
        for label, fam_g in (("gauge", g), ("normalized", norm)):
            for eps in EPS_SCHEDULE:
                r = catalog.check_gauge(entry, fam_g, eps, budget=budget)
                ok = isinstance(r, catalog.NoViolation)
                record(f"{label} eps={eps}", ok, **({"pairs": r.pairs} if ok else {"counterexample": _cex_json(r)}))
        pts = _sample_points(entry.carrier)
        mono = catalog.check_monotone(norm, pts, [Fraction(1, k) for k in range(1, 21)] + [Fraction(2)])
        record("normalized monotone", mono is None)
        bad = [(n, p) for n in range(1, 21) for p in pts if not shrunk(Fraction(1, n), p) < Fraction(1, 2**n)]
        record("shrink bound", not bad)
    else:
        record("no gauge (classification)", True)
        if not fam and entry.measurability == catalog.BAIRE_MEASURABLE:
            w = catalog.dense_pair_witness(entry)
            region = (QuadPoint(Fraction(3, 8)), QuadPoint(Fraction(5, 8)), False, False) if entry.carrier == "line" else "01"
            a, b = w.pick_a(region), w.pick_b(region)
            record("dense pair witness", True, a=format_point(a), b=format_point(b))
    if fam or entry.measurability == catalog.BAIRE_MEASURABLE:
        worst = QuadPoint(0)
        ok = True
        for p in _sample_points(entry.carrier, 30):
            exact = catalog.osc_point(entry, p)
            est = catalog.estimate_osc_point(entry, p)
            if exact == 0:
                ok &= est.certified_zero or est.scale_gap < Fraction(1, 10)
            else:
                diff = abs(exact - est.scale_gap)
                worst = max(worst, diff)
                ok &= diff <= Fraction(1, 10)
        record("oscillation oracle vs grid", ok, worst=format_point(worst))
    report["pass"] = all(c["pass"] for c in report["checks"])
    return report


def cmd_verify(args) -> int:
    targets = args.targets or list(catalog.DEFAULT_IDS)
    bogus = Fraction(args.bogus_gauge) if args.bogus_gauge else None
    reports = []
    for ident in targets:
        try:
            entry = catalog.lookup(ident)
        except KeyError as exc:
            raise ConfigError(str(exc)) from None
        if isinstance(entry, catalog.OracleFunction):
            reports.append({"target": ident, **catalog.describe(entry), "checks": [], "pass": True})
            continue
        reports.append(verify_target(entry, args.budget, bogus))
    text = json.dumps({"reports": reports, "pass": all(r["pass"] for r in reports)}, ensure_ascii=False, indent=1)
    if args.out:
        _atomic_write(args.out, text + "\n")
    print(text)
    return 0 if all(r["pass"] for r in reports) else EXIT_VERIFY_FAILED


# -- replay / list ------------------------------------------------------------------------------

def cmd_replay(args) -> int:
    with open(args.transcript, encoding="utf-8") as fh:
        t = Transcript.loads(fh.read())
    v, problems = replay(t)
    out = {"verdict": v.to_json(), "problems": problems}
    if args.verdict:
        with open(args.verdict, encoding="utf-8") as fh:
            stored = fh.read()
        out["matches_stored"] = stored == v.dumps()
        if not out["matches_stored"]:
            problems.append("verdict differs from the stored file")
    print(json.dumps(out, ensure_ascii=False))
    if problems:
        return EXIT_VERIFY_FAILED
    return v.exit_code


def cmd_list(args) -> int:
    for ident in catalog.DEFAULT_IDS:
        print(json.dumps(catalog.describe(catalog.lookup(ident))))
    for ident in STRATEGY_IDS:
        print(json.dumps({"id": ident, "kind": "strategy"}))
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="baire-games", description="Topological game simulator and gauge checker.")
    p.add_argument("--seed", type=int, default=None, help="override the configured seed")
    sub = p.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("play", help="play one match")
    sp.add_argument("config")
    sp.add_argument("--transcript")
    sp.add_argument("--verdict")
    sp.set_defaults(func=cmd_play)

    st = sub.add_parser("tournament", help="play a matrix of matches and write a CSV table")
    st.add_argument("config")
    st.add_argument("--out")
    st.add_argument("--jobs", type=int)
    st.set_defaults(func=cmd_tournament)

    sv = sub.add_parser("verify", help="check catalog gauges and oscillation oracles")
    sv.add_argument("targets", nargs="*")
    sv.add_argument("--budget", type=int, default=10_000)
    sv.add_argument("--bogus-gauge", help="replace the gauges by this constant (negative control)")
    sv.add_argument("--out")
    sv.set_defaults(func=cmd_verify)

    sr = sub.add_parser("replay", help="re-validate a transcript and re-derive its verdict")
    sr.add_argument("transcript")
    sr.add_argument("--verdict")
    sr.set_defaults(func=cmd_replay)

    sl = sub.add_parser("list-catalog", help="list catalog entries and strategies")
    sl.set_defaults(func=cmd_list)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_BAD_CONFIG if exc.code else 0
    try:
        return args.func(args)
    except (ConfigError, json.JSONDecodeError, OSError, KeyError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_BAD_CONFIG


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
