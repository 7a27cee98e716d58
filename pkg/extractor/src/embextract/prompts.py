"""Role prompt rendering from a taxonomy JSON file.

Mirrors the audit engine's rule: one prompt per role, ``Photo of a `` plus
the lowercased role name, in taxonomy document order.
"""

from __future__ import annotations

import json
from pathlib import Path

from .errors import ExtractError

PROMPT_PREFIX = "Photo of a "


def _role_name(entry) -> str:
    if isinstance(entry, str):
        return entry
    if isinstance(entry, dict) and "name" in entry:
        return str(entry["name"])
    raise ExtractError(f"bad role entry in taxonomy: {entry!r}")


def roles_from_taxonomy(path: str | Path) -> list[str]:
    try:
        doc = json.loads(Path(path).read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        raise ExtractError(f"cannot read taxonomy {path}: {exc}") from None
    if not isinstance(doc, dict) or "categories" not in doc:
        raise ExtractError(f"{path}: expected an object with a categories key")
    roles: list[str] = []
    for category in doc["categories"]:
        if "subcategories" in category:
            for sub in category["subcategories"]:
                roles.extend(_role_name(r) for r in sub.get("roles", ()))
        else:
            roles.extend(_role_name(r) for r in category.get("roles", ()))
    seen = set()
    for role in roles:
        if role in seen:
            raise ExtractError(f"duplicate role {role!r} in taxonomy")
        seen.add(role)
    return roles


def render_prompt(role: str) -> str:
    return PROMPT_PREFIX + role.lower()


def render_prompts(roles: list[str]) -> list[tuple[str, str]]:
    return [(role, render_prompt(role)) for role in roles]
