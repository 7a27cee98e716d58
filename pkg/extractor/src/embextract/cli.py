"""CLI: embed image lists and taxonomy prompts into EMB1 bundles.

    embextract images  --model <id> --list <csv>      --out <dir> [--root DIR]
    embextract prompts --model <id> --taxonomy <json> --out <dir>

Outputs land at ``<out>/<model_id>.images.emb1`` / ``<model_id>.prompts.emb1``
with sidecar manifests. Exit codes: 0 success, 1 usage error, 2 data or
checkpoint error, 3 internal error.
"""

from __future__ import annotations

import argparse
import sys
import traceback
from pathlib import Path

from ._version import __version__
from .errors import ExtractError
from .extract import DEFAULT_BATCH_SIZE, embed_images, embed_prompts, read_image_list
from .prompts import render_prompts, roles_from_taxonomy
from .registry import get_model, registered_models


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise _UsageError(message)


def _build_parser() -> _Parser:
    parser = _Parser(prog="embextract", description=__doc__)
    parser.add_argument("--version", action="version", version=f"embextract {__version__}")
    sub = parser.add_subparsers(dest="command", metavar="command")

    p = sub.add_parser("images", help="embed an ordered list of image files")
    p.add_argument("--model", required=True, help=f"one of: {', '.join(registered_models())}")
    p.add_argument("--list", required=True, dest="list_path", help="CSV of image paths")
    p.add_argument("--out", required=True, help="output directory")
    p.add_argument("--root", default=None, help="directory image paths are relative to")
    p.add_argument("--batch-size", type=int, default=DEFAULT_BATCH_SIZE)
    p.set_defaults(func=cmd_images)

    p = sub.add_parser("prompts", help="embed rendered role prompts from a taxonomy")
    p.add_argument("--model", required=True)
    p.add_argument("--taxonomy", required=True, help="taxonomy JSON")
    p.add_argument("--out", required=True, help="output directory")
    p.add_argument("--batch-size", type=int, default=DEFAULT_BATCH_SIZE)
    p.set_defaults(func=cmd_prompts)
    return parser


def cmd_images(args) -> int:
    spec = get_model(args.model)
    paths = read_image_list(args.list_path)
    result = embed_images(
        spec,
        paths,
        Path(args.out) / f"{spec.model_id}.images.emb1",
        root=args.root,
        batch_size=args.batch_size,
    )
    print(f"embedded {result.count} image(s) at dim {result.dim} (checksum {result.checksum})")
    print(f"wrote {result.embedding_path}")
    print(f"wrote {result.manifest_path}")
    return 0


def cmd_prompts(args) -> int:
    spec = get_model(args.model)
    prompts = render_prompts(roles_from_taxonomy(args.taxonomy))
    result = embed_prompts(
        spec,
        prompts,
        Path(args.out) / f"{spec.model_id}.prompts.emb1",
        batch_size=args.batch_size,
    )
    print(f"embedded {result.count} prompt(s) at dim {result.dim} (checksum {result.checksum})")
    print(f"wrote {result.embedding_path}")
    print(f"wrote {result.manifest_path}")
    return 0


def main(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
        if not getattr(args, "func", None):
            parser.print_help()
            return 1
        return args.func(args)
    except _UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 1
    except ExtractError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2
    except Exception:
        traceback.print_exc()
        return 3


def entrypoint() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entrypoint()
