"""Unblinded analysis: join annotations with the blinding key, drop
incomplete work, build origin-by-property contingency tables, run the
significance tests, and emit the results table plus figure data.

Five comparisons are run per dataset: the three error flags plus the two
MED bins (MED greater than the edited threshold, and greater than the high
effort threshold). Each comparison carries exactly one Fisher p-value that
drives the significance marker; G and chi-square columns are reported
alongside where defined.
"""

from __future__ import annotations

import csv
import hashlib
import io
import json
from dataclasses import dataclass, field
from datetime import datetime, timezone
from pathlib import Path
from typing import Callable, Iterable

from blindpe import __version__
from blindpe.corpus import Origin
from blindpe.interleave import BlindingKey, UnblindedRecord, unblind
from blindpe.metrics import (
    DescriptiveStats,
    EditThresholds,
    corpus_hter,
    descriptive_stats,
    med,
    tokenize,
)
from blindpe.records import AnnotationRecord
from blindpe.stats import (
    ContingencyTable2x2,
    ProportionCI,
    TestOutcome,
    chi_square,
    fisher_exact_two_tailed,
    g_test,
    wilson_ci,
)


@dataclass(frozen=True)
class AnalysisConfig:
    alpha: float = 0.05
    thresholds: EditThresholds = field(default_factory=EditThresholds)
    ci_level: float = 0.95

    def __post_init__(self):
        if not 0.0 < self.alpha < 1.0:
            raise ValueError("alpha must be in (0, 1)")


@dataclass(frozen=True)
class EvalDataset:
    """Completed annotation records joined with their origins."""

    language_pair: str
    records: tuple[UnblindedRecord, ...]

    @property
    def n_ht(self) -> int:
        return sum(1 for r in self.records if r.origin is Origin.HT)

    @property
    def n_mt(self) -> int:
        return sum(1 for r in self.records if r.origin is Origin.MT)

    def by_origin(self, origin: Origin) -> list[UnblindedRecord]:
        return [r for r in self.records if r.origin is origin]


@dataclass(frozen=True)
class CompletionSummary:
    """Per-rater completed/assigned counts and the number of excluded
    records."""

    per_rater: dict[str, tuple[int, int]]
    excluded: int

    def raters_without_work(self) -> list[str]:
        return sorted(r for r, (done, _) in self.per_rater.items() if done == 0)


@dataclass(frozen=True)
class OriginCell:
    count: int
    n: int
    proportion_pct: float  # 100 * count / n, full precision
    ci: ProportionCI


@dataclass(frozen=True)
class Comparison:
    name: str
    table: ContingencyTable2x2
    fisher: TestOutcome
    g: TestOutcome | None
    chi: TestOutcome | None
    ht: OriginCell
    mt: OriginCell

    @property
    def significant(self) -> bool:
        return self.fisher.significant and not self.fisher.degenerate


@dataclass(frozen=True)
class ResultsTable:
    language_pair: str
    n_ht: int
    n_mt: int
    comparisons: tuple[Comparison, ...]
    med_stats: dict[str, DescriptiveStats]  # keyed by origin value
    hter: dict[str, float | None]
    config: AnalysisConfig
    input_digest: str


def exclude_incomplete(
    records: list[AnnotationRecord], key: BlindingKey, language_pair: str = "und-und"
) -> tuple[EvalDataset, CompletionSummary]:
    """Drop incomplete records, unblind the rest, and summarise completion
    per rater. Exclusions are reported, not fatal."""
    per_rater: dict[str, list[int]] = {}
    kept: list[AnnotationRecord] = []
    for record in records:
        done, total = per_rater.setdefault(record.rater_id, [0, 0])
        per_rater[record.rater_id][1] = total + 1
        if record.completed:
            per_rater[record.rater_id][0] = done + 1
            kept.append(record)
    joined = unblind(kept, key)
    summary = CompletionSummary(
        per_rater={r: (done, total) for r, (done, total) in per_rater.items()},
        excluded=len(records) - len(kept),
    )
    return EvalDataset(language_pair=language_pair, records=tuple(joined)), summary


def build_contingency(
    ds: EvalDataset, prop: Callable[[UnblindedRecord], bool]
) -> ContingencyTable2x2:
    """Cross origin with a binary property over the dataset's records."""
    a = b = c = d = 0
    for rec in ds.records:
        present = bool(prop(rec))
        if rec.origin is Origin.HT:
            a, b = a + present, b + (not present)
        else:
            c, d = c + present, d + (not present)
    return ContingencyTable2x2(a=a, b=b, c=c, d=d)


def record_med(rec: UnblindedRecord) -> int:
    if rec.shown_target is None:
        raise ValueError(
            f"record {rec.record.segment_id!r} lacks the shown target text; "
            "cannot compute MED"
        )
    return med(rec.shown_target, rec.record.postedited)


def _comparison(
    name: str,
    ds: EvalDataset,
    prop: Callable[[UnblindedRecord], bool],
    cfg: AnalysisConfig,
) -> Comparison:
    table = build_contingency(ds, prop)
    fisher = fisher_exact_two_tailed(table, alpha=cfg.alpha)
    g = chi = None
    if not table.has_zero_margin():
        g = g_test(table, alpha=cfg.alpha)
        chi = chi_square(table, yates=False, alpha=cfg.alpha)
    n_ht, n_mt = table.row_sums
    ht = OriginCell(
        count=table.a,
        n=n_ht,
        proportion_pct=100.0 * table.a / n_ht if n_ht else 0.0,
        ci=wilson_ci(table.a, n_ht, cfg.ci_level) if n_ht else ProportionCI(0, 0, cfg.ci_level, 0.0, 0.0),
    )
    mt = OriginCell(
        count=table.c,
        n=n_mt,
        proportion_pct=100.0 * table.c / n_mt if n_mt else 0.0,
        ci=wilson_ci(table.c, n_mt, cfg.ci_level) if n_mt else ProportionCI(0, 0, cfg.ci_level, 0.0, 0.0),
    )
    return Comparison(name=name, table=table, fisher=fisher, g=g, chi=chi, ht=ht, mt=mt)


def dataset_digest(ds: EvalDataset) -> str:
    """Order-independent SHA-256 over the dataset's records and origins."""
    lines = sorted(
        json.dumps(
            {"record": rec.record.as_dict(), "origin": rec.origin.value},
            ensure_ascii=False,
            sort_keys=True,
        )
        for rec in ds.records
    )
    return hashlib.sha256("\n".join(lines).encode("utf-8")).hexdigest()


def analyze(ds: EvalDataset, cfg: AnalysisConfig = AnalysisConfig()) -> ResultsTable:
    """Run all five comparisons plus MED descriptives and corpus HTER.

    HTER uses the shown pre-translation as hypothesis and its post-edit as
    reference; segments post-edited to an empty string are skipped in the
    HTER aggregate (undefined denominator) but kept everywhere else.
    """
    if not ds.records:
        raise ValueError("cannot analyze an empty dataset")

    meds = {id(rec): record_med(rec) for rec in ds.records}
    t = cfg.thresholds
    comparisons = (
        _comparison("terminology", ds, lambda r: r.record.flags.terminology, cfg),
        _comparison("omission", ds, lambda r: r.record.flags.omission, cfg),
        _comparison("typography", ds, lambda r: r.record.flags.typography, cfg),
        _comparison(f"med_gt_{t.edited_threshold}", ds, lambda r: meds[id(r)] > t.edited_threshold, cfg),
        _comparison(f"med_gt_{t.high_effort_threshold}", ds, lambda r: meds[id(r)] > t.high_effort_threshold, cfg),
    )

    med_stats: dict[str, DescriptiveStats] = {}
    hter: dict[str, float | None] = {}
    for origin in (Origin.HT, Origin.MT):
        group = ds.by_origin(origin)
        if not group:
            continue
        med_stats[origin.value] = descriptive_stats([meds[id(r)] for r in group])
        pairs = [
            (tokenize(r.shown_target), tokenize(r.record.postedited))
            for r in group
            if tokenize(r.record.postedited)
        ]
        hter[origin.value] = corpus_hter(pairs) if pairs else None

    return ResultsTable(
        language_pair=ds.language_pair,
        n_ht=ds.n_ht,
        n_mt=ds.n_mt,
        comparisons=comparisons,
        med_stats=med_stats,
        hter=hter,
        config=cfg,
        input_digest=dataset_digest(ds),
    )


# --- report emission ---------------------------------------------------------


def _display_name(name: str) -> str:
    if name.startswith("med_gt_"):
        return "MED>" + name.removeprefix("med_gt_")
    return name.capitalize()


def _header_comment(
    r: ResultsTable, seed: int | None, reproducible: bool
) -> list[str]:
    lines = [
        f"# blindpe {__version__}",
        f"# language_pair: {r.language_pair}",
        f"# alpha: {r.config.alpha}",
        f"# thresholds: {r.config.thresholds.edited_threshold},{r.config.thresholds.high_effort_threshold}",
    ]
    if seed is not None:
        lines.append(f"# seed: {seed}")
    if not reproducible:
        lines.append(f"# generated: {datetime.now(timezone.utc).isoformat()}")
    return lines


def results_csv(r: ResultsTable, seed: int | None = None, reproducible: bool = False) -> str:
    """CSV mirroring the results-table layout: counts with bracketed
    percentage proportions, significant pairs marked with '*'."""
    out = io.StringIO()
    for line in _header_comment(r, seed, reproducible):
        out.write(line + "\n")
    w = csv.writer(out, lineterminator="\n")
    w.writerow(["", f"HT (N={r.n_ht})", "", f"MT (N={r.n_mt})", "", "p"])
    for comp in r.comparisons:
        star = "*" if comp.significant else ""
        w.writerow(
            [
                _display_name(comp.name),
                f"{star}{comp.ht.count}",
                f"({comp.ht.proportion_pct:.2f})",
                f"{star}{comp.mt.count}",
                f"({comp.mt.proportion_pct:.2f})",
                f"{comp.fisher.p:.3f}",
            ]
        )
    ht_stats = r.med_stats.get(Origin.HT.value)
    mt_stats = r.med_stats.get(Origin.MT.value)

    def stat_row(label: str, attr: str, fmt: str):
        hv = getattr(ht_stats, attr) if ht_stats else ""
        mv = getattr(mt_stats, attr) if mt_stats else ""
        w.writerow([label, format(hv, fmt) if hv != "" else "", "", format(mv, fmt) if mv != "" else "", "", ""])

    stat_row("min", "min", ".0f")
    stat_row("max", "max", ".0f")
    stat_row("avg", "avg", ".2f")
    stat_row("med", "med", ".0f")
    stat_row("sd", "sd", ".2f")
    ht_hter = r.hter.get(Origin.HT.value)
    mt_hter = r.hter.get(Origin.MT.value)
    w.writerow(
        [
            "HTER",
            f"{ht_hter:.2f}" if ht_hter is not None else "",
            "",
            f"{mt_hter:.2f}" if mt_hter is not None else "",
            "",
            "",
        ]
    )
    return out.getvalue()


def _outcome_dict(o: TestOutcome | None) -> dict | None:
    if o is None:
        return None
    return {
        "method": o.method.value,
        "statistic": o.statistic,
        "p": o.p,
        "significant": o.significant,
        "degenerate": o.degenerate,
    }


def results_json(r: ResultsTable, seed: int | None = None, reproducible: bool = False) -> str:
    """Full-precision JSON of the complete results table."""
    payload = {
        "tool": {"name": "blindpe", "version": __version__},
        "language_pair": r.language_pair,
        "seed": seed,
        "alpha": r.config.alpha,
        "thresholds": [
            r.config.thresholds.edited_threshold,
            r.config.thresholds.high_effort_threshold,
        ],
        "ci_level": r.config.ci_level,
        "input_digest": r.input_digest,
        "n": {"HT": r.n_ht, "MT": r.n_mt},
        "comparisons": [
            {
                "name": c.name,
                "table": {"a": c.table.a, "b": c.table.b, "c": c.table.c, "d": c.table.d},
                "fisher": _outcome_dict(c.fisher),
                "g": _outcome_dict(c.g),
                "chi_square": _outcome_dict(c.chi),
                "significant": c.significant,
                "HT": {
                    "count": c.ht.count,
                    "n": c.ht.n,
                    "proportion": c.ht.count / c.ht.n if c.ht.n else None,
                    "ci": [c.ht.ci.lo, c.ht.ci.hi],
                },
                "MT": {
                    "count": c.mt.count,
                    "n": c.mt.n,
                    "proportion": c.mt.count / c.mt.n if c.mt.n else None,
                    "ci": [c.mt.ci.lo, c.mt.ci.hi],
                },
            }
            for c in r.comparisons
        ],
        "med_stats": {
            origin: {
                "min": s.min,
                "max": s.max,
                "avg": s.avg,
                "med": s.med,
                "sd": s.sd,
            }
            for origin, s in r.med_stats.items()
        },
        "hter": r.hter,
    }
    if not reproducible:
        payload["generated"] = datetime.now(timezone.utc).isoformat()
    return json.dumps(payload, ensure_ascii=False, indent=2) + "\n"


def figure_csv(comp: Comparison) -> str:
    """Per-comparison figure data: enough to regenerate the appendix-style
    bar chart with its confidence-interval error bars."""
    out = io.StringIO()
    w = csv.writer(out, lineterminator="\n")
    w.writerow(["origin", "proportion", "ci_lo", "ci_hi", "p"])
    for origin, cell in (("HT", comp.ht), ("MT", comp.mt)):
        prop = cell.count / cell.n if cell.n else 0.0
        w.writerow(
            [origin, f"{prop:.4f}", f"{cell.ci.lo:.4f}", f"{cell.ci.hi:.4f}", f"{comp.fisher.p:.3f}"]
        )
    return out.getvalue()


def _outcome_from_dict(d: dict | None) -> TestOutcome | None:
    if d is None:
        return None
    from blindpe.stats import TestMethod

    return TestOutcome(
        method=TestMethod(d["method"]),
        statistic=d["statistic"],
        p=d["p"],
        significant=d["significant"],
        degenerate=d.get("degenerate", False),
    )


def results_table_from_json(payload: dict) -> ResultsTable:
    """Rebuild a :class:`ResultsTable` from its full-precision JSON form,
    so reports can be re-emitted without the raw annotations."""
    cfg = AnalysisConfig(
        alpha=payload["alpha"],
        thresholds=EditThresholds(*payload["thresholds"]),
        ci_level=payload.get("ci_level", 0.95),
    )
    comparisons = []
    for c in payload["comparisons"]:
        table = ContingencyTable2x2(**c["table"])
        cells = {}
        for origin in ("HT", "MT"):
            o = c[origin]
            cells[origin] = OriginCell(
                count=o["count"],
                n=o["n"],
                proportion_pct=100.0 * o["count"] / o["n"] if o["n"] else 0.0,
                ci=ProportionCI(o["count"], o["n"], cfg.ci_level, o["ci"][0], o["ci"][1]),
            )
        comparisons.append(
            Comparison(
                name=c["name"],
                table=table,
                fisher=_outcome_from_dict(c["fisher"]),
                g=_outcome_from_dict(c.get("g")),
                chi=_outcome_from_dict(c.get("chi_square")),
                ht=cells["HT"],
                mt=cells["MT"],
            )
        )
    med_stats = {
        origin: DescriptiveStats(**s) for origin, s in payload.get("med_stats", {}).items()
    }
    return ResultsTable(
        language_pair=payload["language_pair"],
        n_ht=payload["n"]["HT"],
        n_mt=payload["n"]["MT"],
        comparisons=tuple(comparisons),
        med_stats=med_stats,
        hter=payload.get("hter", {}),
        config=cfg,
        input_digest=payload.get("input_digest", ""),
    )


def emit_report(
    r: ResultsTable,
    out_dir: str | Path,
    formats: Iterable[str] = ("csv", "json", "figures"),
    seed: int | None = None,
    reproducible: bool = False,
) -> list[Path]:
    """Write report files into ``out_dir`` and return their paths."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    written: list[Path] = []
    formats = set(formats)
    if "csv" in formats:
        path = out_dir / "report.csv"
        path.write_text(results_csv(r, seed=seed, reproducible=reproducible), encoding="utf-8")
        written.append(path)
    if "json" in formats:
        path = out_dir / "report.json"
        path.write_text(results_json(r, seed=seed, reproducible=reproducible), encoding="utf-8")
        written.append(path)
    if "figures" in formats:
        for comp in r.comparisons:
            path = out_dir / f"figure_{comp.name}.csv"
            path.write_text(figure_csv(comp), encoding="utf-8")
            written.append(path)
    return written
