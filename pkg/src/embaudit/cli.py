"""Command-line front end.

Subcommands: audit (full run), validate (input diagnostics), synth
(planted-bias bundle generation), topk (single-prompt retrieval debug), score
(bias score from a JSON distribution). Exit codes: 0 success, 1 usage error,
2 data error, 3 internal error.
"""

from __future__ import annotations

import argparse
import json
import sys
import traceback
from pathlib import Path

from ._version import __version__
from .audit import AuditConfig, run_audit
from .corpus.embeddings import MAGIC, read_embedding_file
from .corpus.io import load_embeddings
from .corpus.labels import check_totality, parse_labels_csv
from .corpus.manifest import Manifest, load_manifest, manifest_path_for
from .corpus.synthetic import PlantedCorpusSpec, generate_synthetic_corpus, write_bundle
from .corpus.taxonomy import load_taxonomy
from .errors import AuditError, UsageError
from .metrics import js_bias_score, prob_vector_from, uniform_like
from .report import write_report
from .retrieval import normalize, top_k

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_DATA = 2
EXIT_INTERNAL = 3


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # argparse default exits with code 2
        raise UsageError(message)


def _build_parser() -> _Parser:
    parser = _Parser(prog="embaudit", description=__doc__)
    parser.add_argument("--version", action="version", version=f"embaudit {__version__}")
    sub = parser.add_subparsers(dest="command", metavar="command")

    p = sub.add_parser("audit", parents=[], help="run the full bias audit")
    p.add_argument("--config", required=True, help="audit config JSON")
    p.add_argument("--k", type=int, default=None, help="retrieved images per prompt")
    p.add_argument("--threshold", type=float, default=None, help="skew flag threshold")
    p.add_argument("--out", default=None, help="output directory")
    p.add_argument("--format", default=None, help="comma list: json,csv,md")
    p.add_argument("--workers", type=int, default=None, help="parallel model workers")
    p.set_defaults(func=cmd_audit)

    p = sub.add_parser("validate", help="check input files and bundles")
    p.add_argument("paths", nargs="+", help="embedding/manifest/labels/taxonomy/config files")
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("synth", help="generate a planted-bias synthetic bundle")
    p.add_argument("--spec", required=True, help="planted corpus spec JSON")
    p.add_argument("--seed", type=int, default=None, help="RNG seed (required)")
    p.add_argument("--out", required=True, help="bundle output directory")
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("topk", help="dump one (model, role) retrieval as JSON")
    p.add_argument("--config", required=True)
    p.add_argument("--model", required=True, help="model_id from the config")
    p.add_argument("--role", required=True, help="role name or alias")
    p.add_argument("--k", type=int, default=None)
    p.set_defaults(func=cmd_topk)

    p = sub.add_parser("score", help="bias score for a JSON probability vector")
    p.add_argument("--dist", required=True, help="JSON file: list or {category: share}")
    p.add_argument("--dimension", required=True, choices=["gender", "race", "age"])
    p.set_defaults(func=cmd_score)

    return parser


def cmd_audit(args) -> int:
    config = AuditConfig.from_file(
        args.config,
        k=args.k,
        skew_threshold=args.threshold,
        out_dir=Path(args.out) if args.out else None,
        formats=tuple(args.format.split(",")) if args.format else None,
        workers=args.workers,
    )
    report = run_audit(config)
    written = write_report(report, config.out_dir, config.formats)
    print(f"audited {len(report.models)} model(s) x {len(report.roles)} role(s) at k={report.k}")
    for path in written:
        print(f"wrote {path}")
    return EXIT_OK


def _sniff(path: Path) -> str:
    if not path.exists():
        return "missing"
    with open(path, "rb") as fh:
        head = fh.read(4)
    if head == MAGIC:
        return "embeddings"
    try:
        doc = json.loads(path.read_text(encoding="utf-8"))
    except (UnicodeDecodeError, json.JSONDecodeError):
        doc = None
    if isinstance(doc, dict):
        if "categories" in doc:
            return "taxonomy"
        if "ids" in doc and "checksum" in doc:
            return "manifest"
        if "models" in doc and "labels" in doc:
            return "config"
        return "unknown"
    try:
        with open(path, encoding="utf-8") as fh:
            header = fh.readline().strip().split(",")
        if {"file", "age", "gender", "race"} <= set(h.strip() for h in header):
            return "labels"
    except (OSError, UnicodeDecodeError):
        pass
    return "unknown"


def _validate_one(path: Path, rows: list[tuple[str, str, str, str]]) -> None:
    kind = _sniff(path)

    def record(check: str, fn) -> bool:
        try:
            detail = fn() or "ok"
            rows.append((str(path), check, "PASS", detail))
            return True
        except AuditError as exc:
            rows.append((str(path), check, "FAIL", f"{type(exc).__name__}: {exc}"))
        except Exception as exc:  # malformed input must never crash validate
            rows.append((str(path), check, "FAIL", f"{type(exc).__name__}: {exc}"))
        return False

    if kind == "missing":
        rows.append((str(path), "exists", "FAIL", "file not found"))
    elif kind == "embeddings":
        def check_file():
            matrix, checksum = read_embedding_file(path)
            return f"{matrix.count}x{matrix.dim}, checksum {checksum}"
        if record("embedding format+checksum", check_file):
            record("sidecar manifest", lambda: _check_sidecar(path))
    elif kind == "manifest":
        record("manifest schema", lambda: _describe(load_manifest(path)))
    elif kind == "taxonomy":
        record("taxonomy schema", lambda: f"{len(load_taxonomy(path).role_names())} roles")
    elif kind == "labels":
        record("label rows", lambda: f"{len(parse_labels_csv(path))} rows")
    elif kind == "config":
        _validate_bundle(path, rows, record)
    else:
        rows.append((str(path), "format", "FAIL", "unrecognized file format"))


def _describe(manifest: Manifest) -> str:
    return f"{manifest.kind} {manifest.count}x{manifest.dim} for {manifest.model_id}"


def _check_sidecar(path: Path) -> str:
    matrix, checksum = read_embedding_file(path)
    manifest = load_manifest(manifest_path_for(path))
    load_embeddings(path)  # runs the cross-checks
    return _describe(manifest)


def _validate_bundle(path: Path, rows, record) -> None:
    holder: dict = {}

    def load_config():
        holder["config"] = AuditConfig.from_file(path)
        return f"{len(holder['config'].models)} model(s), k={holder['config'].k}"

    if not record("config schema", load_config):
        return
    config = holder["config"]

    from .corpus.taxonomy import default_taxonomy

    def load_tax():
        holder["taxonomy"] = (
            load_taxonomy(config.taxonomy) if config.taxonomy else default_taxonomy()
        )
        return f"{len(holder['taxonomy'].role_names())} roles"

    def load_lab():
        holder["labels"] = parse_labels_csv(config.labels)
        return f"{len(holder['labels'])} rows"

    ok = record("taxonomy", load_tax)
    ok = record("labels", load_lab) and ok
    if not ok:
        return
    taxonomy, labels = holder["taxonomy"], holder["labels"]

    for model in config.models:
        def check_model(model=model):
            images, im = load_embeddings(model.images)
            prompts, pm = load_embeddings(model.prompts)
            if im.kind != "image" or pm.kind != "prompt":
                raise AuditError(f"manifest kinds are {im.kind}/{pm.kind}, want image/prompt")
            check_totality(labels, im)
            from .audit import _role_vector

            _role_vector(pm, taxonomy)
            if config.k > images.count:
                raise AuditError(f"k={config.k} exceeds corpus size {images.count}")
            return f"{im.count} images, {pm.count} prompts, dims {images.dim}/{prompts.dim}"

        record(f"model {model.model_id}", check_model)


def cmd_validate(args) -> int:
    rows: list[tuple[str, str, str, str]] = []
    for raw in args.paths:
        _validate_one(Path(raw), rows)
    width_path = max(len(r[0]) for r in rows)
    width_check = max(len(r[1]) for r in rows)
    for path, check, status, detail in rows:
        print(f"{path:<{width_path}}  {check:<{width_check}}  {status:<4}  {detail}")
    failed = sum(1 for r in rows if r[2] != "PASS")
    print(f"{len(rows) - failed}/{len(rows)} checks passed")
    return EXIT_OK if failed == 0 else EXIT_DATA


def cmd_synth(args) -> int:
    spec_path = Path(args.spec)
    if not spec_path.exists():
        raise AuditError(f"spec file not found: {spec_path}")
    try:
        doc = json.loads(spec_path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise AuditError(f"{spec_path}: not valid JSON ({exc})") from None
    spec = PlantedCorpusSpec.from_json(doc)
    bundle = generate_synthetic_corpus(spec, args.seed)
    paths = write_bundle(bundle, args.out)
    print(f"synthetic bundle: n={spec.n} dim={spec.dim} k={spec.k} roles={len(spec.roles)} seed={args.seed}")
    for name in sorted(paths):
        print(f"wrote {paths[name]}")
    return EXIT_OK


def cmd_topk(args) -> int:
    config = AuditConfig.from_file(args.config, k=args.k)
    matches = [m for m in config.models if m.model_id == args.model]
    if not matches:
        raise UsageError(
            f"model {args.model!r} not in config (have: {[m.model_id for m in config.models]})"
        )
    model = matches[0]
    from .audit import _role_vector
    from .corpus.taxonomy import default_taxonomy

    taxonomy = load_taxonomy(config.taxonomy) if config.taxonomy else default_taxonomy()
    role = taxonomy.resolve(args.role)
    images, im = load_embeddings(model.images)
    prompts, pm = load_embeddings(model.prompts)
    row = _role_vector(pm, taxonomy)[role]
    result = top_k(normalize(images), im, normalize(prompts).data[row], config.k, role=role)
    print(json.dumps(result.to_json(), indent=2))
    return EXIT_OK


def cmd_score(args) -> int:
    dist_path = Path(args.dist)
    if not dist_path.exists():
        raise AuditError(f"distribution file not found: {dist_path}")
    try:
        doc = json.loads(dist_path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise AuditError(f"{dist_path}: not valid JSON ({exc})") from None
    vector = prob_vector_from(args.dimension, doc)
    score = js_bias_score(vector, uniform_like(vector))
    print(
        json.dumps(
            {
                "dimension": args.dimension,
                "categories": list(vector.categories),
                "p": [float(x) for x in vector.p],
                "score_nats": score.value,
                "score_normalized": score.normalized,
            },
            indent=2,
        )
    )
    return EXIT_OK


def main(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
        if not getattr(args, "func", None):
            parser.print_help()
            return EXIT_USAGE
        return args.func(args)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except AuditError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_DATA
    except Exception:
        traceback.print_exc()
        return EXIT_INTERNAL


def entrypoint() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entrypoint()
