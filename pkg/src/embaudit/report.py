"""Report serialization: JSON, CSV tables, Markdown, and plot-data files.

All renderers are pure functions of the BiasReport, emit keys in a fixed
order, and format floats with repr (shortest round-trip), so identical audits
produce byte-identical files. Markdown tables print percentages to two
decimals; the JSON and CSV outputs carry full precision.

Writes are staged: every file's bytes are rendered before anything touches
disk, and each file lands via a temp name + atomic rename, so a failed run
leaves no partial report behind.
"""

from __future__ import annotations

import io
import json
import os
from pathlib import Path
from typing import Iterable, Sequence

from .audit import BiasReport
from .corpus.labels import AGE_BUCKETS, GENDERS, RACES
from .errors import ConfigError
from .metrics import MARGINAL_DIMENSIONS


def _f(value: float) -> str:
    return repr(float(value))


def _pct(share: float) -> str:
    return f"{100.0 * share:.2f}"


def render_report_json(report: BiasReport) -> str:
    doc = {
        "tool": {"name": "embaudit", "version": report.tool_version},
        "config": report.config,
        "k": report.k,
        "skew_threshold": report.skew_threshold,
        "models": report.models,
        "roles": report.roles,
        "categories": {
            "gender": list(GENDERS),
            "race": list(RACES),
            "age": list(AGE_BUCKETS),
        },
        "corpora": report.corpora,
        "per_model": report.per_model,
        "averaged": report.averaged,
        "skew_flags": report.skew,
        "volatility": [
            {
                "role": entry.role,
                "male_shares": {m: s for m, s in zip(report.models, entry.male_shares)},
                "stddev": entry.stddev,
            }
            for entry in report.volatility
        ],
        "intersections": [
            {
                "role": finding.role,
                "combo": finding.combo,
                "models": list(finding.models),
                "recurrence": finding.recurrence,
            }
            for finding in report.intersections
        ],
        "retrievals": report.retrievals,
        "notes": report.notes,
    }
    return json.dumps(doc, indent=2, ensure_ascii=False) + "\n"


def _csv_rows(rows: Iterable[Sequence[str]]) -> str:
    buf = io.StringIO()
    for row in rows:
        buf.write(",".join(_csv_cell(c) for c in row))
        buf.write("\n")
    return buf.getvalue()


def _csv_cell(value: str) -> str:
    if any(ch in value for ch in ',"\n'):
        return '"' + value.replace('"', '""') + '"'
    return value


_SHARE_COLUMNS = list(GENDERS) + list(RACES) + list(AGE_BUCKETS)


def _share_row(doc: dict) -> list[str]:
    out = []
    for g in GENDERS:
        out.append(_f(doc["gender"][g]))
    for r in RACES:
        out.append(_f(doc["race"][r]))
    for a in AGE_BUCKETS:
        out.append(_f(doc["age"][a]))
    return out


def render_csvs(report: BiasReport) -> dict[str, str]:
    tables: dict[str, str] = {}

    rows = [["role"] + _SHARE_COLUMNS]
    for role in report.roles:
        rows.append([role] + _share_row(report.averaged[role]))
    tables["tables/averaged_distributions.csv"] = _csv_rows(rows)

    rows = [["model", "role"] + _SHARE_COLUMNS]
    for model in report.models:
        for role in report.roles:
            rows.append([model, role] + _share_row(report.per_model[model][role]))
    tables["tables/per_model_distributions.csv"] = _csv_rows(rows)

    rows = [["model", "role", "dimension", "bias_nats", "bias_normalized"]]
    for model in report.models:
        for role in report.roles:
            doc = report.per_model[model][role]
            for dim in doc["bias_nats"]:
                rows.append(
                    [model, role, dim, _f(doc["bias_nats"][dim]), _f(doc["bias_normalized"][dim])]
                )
    tables["tables/bias_scores.csv"] = _csv_rows(rows)

    rows = [["role"] + [f"male_share_{m}" for m in report.models] + ["stddev"]]
    for entry in report.volatility:
        rows.append([entry.role] + [_f(s) for s in entry.male_shares] + [_f(entry.stddev)])
    tables["tables/volatility.csv"] = _csv_rows(rows)

    rows = [["scope", "role", "dimension", "category", "share", "threshold"]]
    for flag in report.skew["averaged"]:
        rows.append(
            ["averaged", flag["role"], flag["dimension"], flag["category"], _f(flag["share"]), _f(flag["threshold"])]
        )
    for model in report.models:
        for flag in report.skew["per_model"][model]:
            rows.append(
                [model, flag["role"], flag["dimension"], flag["category"], _f(flag["share"]), _f(flag["threshold"])]
            )
    tables["tables/skew_flags.csv"] = _csv_rows(rows)

    rows = [["role", "gender", "race", "age", "recurrence", "models"]]
    for finding in report.intersections:
        gender, race, age = finding.combo.split("|")
        rows.append(
            [finding.role, gender, race, age, str(finding.recurrence), ";".join(finding.models)]
        )
    tables["tables/intersections.csv"] = _csv_rows(rows)

    return tables


def render_plotdata(report: BiasReport) -> dict[str, str]:
    out: dict[str, str] = {}
    volatility = {
        "roles": [e.role for e in report.volatility],
        "stddev": [e.stddev for e in report.volatility],
        "male_shares": {
            model: [e.male_shares[i] for e in report.volatility]
            for i, model in enumerate(report.models)
        },
    }
    out["plotdata/volatility.json"] = json.dumps(volatility, indent=2) + "\n"

    scores = {
        "roles": report.roles,
        "dimensions": list(MARGINAL_DIMENSIONS),
        "models": report.models,
        "bias_nats": {
            model: {
                dim: [report.per_model[model][role]["bias_nats"][dim] for role in report.roles]
                for dim in MARGINAL_DIMENSIONS
            }
            for model in report.models
        },
    }
    out["plotdata/bias_scores.json"] = json.dumps(scores, indent=2) + "\n"

    intersections = [
        {
            "role": f.role,
            "combo": f.combo,
            "recurrence": f.recurrence,
            "models": list(f.models),
        }
        for f in report.intersections
    ]
    out["plotdata/intersections.json"] = json.dumps(intersections, indent=2) + "\n"
    return out


def _md_share_table(report: BiasReport, docs: dict) -> list[str]:
    header = ["Role"] + _SHARE_COLUMNS
    lines = ["| " + " | ".join(header) + " |", "|" + "---|" * len(header)]
    for role in report.roles:
        doc = docs[role]
        cells = [role]
        for dim, cats in (("gender", GENDERS), ("race", RACES), ("age", AGE_BUCKETS)):
            shares = doc[dim]
            top = doc["dominant"][dim]
            for cat in cats:
                cell = _pct(shares[cat])
                cells.append(f"**{cell}**" if cat == top else cell)
        lines.append("| " + " | ".join(cells) + " |")
    return lines


def render_markdown(report: BiasReport) -> str:
    lines: list[str] = []
    add = lines.append
    add("# Demographic bias audit report")
    add("")
    add(f"Generated by embaudit {report.tool_version}.")
    add("")
    add(f"- Models: {', '.join(report.models)}")
    add(f"- Roles: {len(report.roles)}")
    add(f"- k (retrieved images per prompt): {report.k}")
    add(f"- Skew threshold: {_pct(report.skew_threshold)}%")
    add("")

    add("## Corpora")
    add("")
    add("| Model | File | Count | Dim | Checksum |")
    add("|---|---|---|---|---|")
    for model in report.models:
        info = report.corpora[model]
        for kind in ("images", "prompts"):
            add(
                f"| {model} | {info[kind]['path']} | {info[kind]['count']} "
                f"| {info[kind]['dim']} | {info[kind]['checksum']} |"
            )
    add("")

    add("## Averaged demographic shares (percent, mean across models)")
    add("")
    lines.extend(_md_share_table(report, report.averaged))
    add("")

    for model in report.models:
        add(f"## Shares for {model} (percent)")
        add("")
        lines.extend(_md_share_table(report, report.per_model[model]))
        add("")

    add("## Bias scores (nats; 0 balanced, ln 2 maximal)")
    add("")
    header = ["Role"] + [f"{m} {d}" for m in report.models for d in MARGINAL_DIMENSIONS]
    add("| " + " | ".join(header) + " |")
    add("|" + "---|" * len(header))
    for role in report.roles:
        cells = [role]
        for model in report.models:
            doc = report.per_model[model][role]
            cells.extend(f"{doc['bias_nats'][d]:.4f}" for d in MARGINAL_DIMENSIONS)
        add("| " + " | ".join(cells) + " |")
    add("")

    if report.volatility:
        add("## Gender volatility (population stddev of male share across models)")
        add("")
        add("| Role | " + " | ".join(report.models) + " | Stddev |")
        add("|" + "---|" * (len(report.models) + 2))
        for entry in report.volatility:
            add(
                "| "
                + " | ".join([entry.role] + [_pct(s) for s in entry.male_shares] + [f"{entry.stddev:.4f}"])
                + " |"
            )
        add("")

    add("## Skew flags (share >= threshold, averaged across models)")
    add("")
    if report.skew["averaged"]:
        add("| Role | Dimension | Category | Share |")
        add("|---|---|---|---|")
        for flag in report.skew["averaged"]:
            add(f"| {flag['role']} | {flag['dimension']} | {flag['category']} | {_pct(flag['share'])} |")
    else:
        add("No category met the threshold.")
    add("")

    add("## Intersectional findings (most frequent gender x race x age cell)")
    add("")
    add("| Role | Cell | Recurrence | Models |")
    add("|---|---|---|---|")
    for finding in report.intersections:
        add(
            f"| {finding.role} | {finding.combo.replace('|', ' / ')} "
            f"| {finding.recurrence} | {', '.join(finding.models)} |"
        )
    add("")

    add("## Conventions")
    add("")
    for key in report.notes:
        add(f"- {key}: {report.notes[key]}")
    add("")
    return "\n".join(lines)


def render_all(report: BiasReport, formats: Sequence[str]) -> dict[str, str]:
    files: dict[str, str] = {}
    for fmt in formats:
        if fmt == "json":
            files["report.json"] = render_report_json(report)
            files.update(render_plotdata(report))
        elif fmt == "csv":
            files.update(render_csvs(report))
        elif fmt == "md":
            files["report.md"] = render_markdown(report)
        else:
            raise ConfigError(f"unknown report format {fmt!r}")
    return files


def write_report(report: BiasReport, out_dir: str | Path, formats: Sequence[str]) -> list[Path]:
    """Render everything, then write each file atomically. Returns paths."""
    out_dir = Path(out_dir)
    files = render_all(report, formats)
    written: list[Path] = []
    for rel, content in files.items():
        target = out_dir / rel
        target.parent.mkdir(parents=True, exist_ok=True)
        tmp = target.with_name(target.name + ".tmp")
        tmp.write_text(content, encoding="utf-8")
        os.replace(tmp, target)
        written.append(target)
    return written
