"""Role taxonomy and prompt rendering.

The default taxonomy covers 33 healthcare roles in three top-level categories
(physicians/specialists, paramedical staff with three subcategories, hospital
administration). Each role renders to one retrieval prompt using the fixed
template ``Photo of a <role lowercased>``.

Taxonomy JSON schema::

    {"categories": [
        {"name": "...", "roles": [...]}                      # no subcategories
        {"name": "...", "subcategories": [
            {"name": "...", "roles": [...]}, ...]}
    ]}

A role is either a plain string or ``{"name": "...", "aliases": ["..."]}``.
Aliases resolve to the canonical role name everywhere roles are looked up.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import NamedTuple

from ..errors import TaxonomyError, UnknownRole

PROMPT_TEMPLATE = "Photo of a {role}"
PROMPT_PREFIX = "Photo of a "


@dataclass(frozen=True)
class Role:
    name: str
    aliases: tuple[str, ...] = ()


@dataclass(frozen=True)
class Subcategory:
    name: str
    roles: tuple[Role, ...]


@dataclass(frozen=True)
class Category:
    """Top-level category; has either direct roles or subcategories."""

    name: str
    roles: tuple[Role, ...] = ()
    subcategories: tuple[Subcategory, ...] = ()

    def all_roles(self) -> tuple[Role, ...]:
        if self.subcategories:
            out: list[Role] = []
            for sub in self.subcategories:
                out.extend(sub.roles)
            return tuple(out)
        return self.roles


class Prompt(NamedTuple):
    role: str
    text: str


@dataclass(frozen=True)
class Taxonomy:
    categories: tuple[Category, ...]
    _lookup: dict[str, str] = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        lookup: dict[str, str] = {}
        for role in self.roles():
            for key in (role.name, *role.aliases):
                if key in lookup:
                    raise TaxonomyError(f"role name or alias {key!r} appears twice")
                lookup[key] = role.name
        object.__setattr__(self, "_lookup", lookup)

    def roles(self) -> tuple[Role, ...]:
        out: list[Role] = []
        for cat in self.categories:
            out.extend(cat.all_roles())
        return tuple(out)

    def role_names(self) -> tuple[str, ...]:
        return tuple(r.name for r in self.roles())

    def resolve(self, name: str) -> str:
        """Canonical role name for a role name or alias."""
        try:
            return self._lookup[name]
        except KeyError:
            raise UnknownRole(name) from None


def render_prompts(taxonomy: Taxonomy) -> tuple[Prompt, ...]:
    """One prompt per role, template applied verbatim, role lowercased."""
    return tuple(
        Prompt(role=r.name, text=PROMPT_TEMPLATE.format(role=r.name.lower()))
        for r in taxonomy.roles()
    )


def _parse_role(doc) -> Role:
    if isinstance(doc, str):
        return Role(name=doc)
    if isinstance(doc, dict) and "name" in doc:
        return Role(name=str(doc["name"]), aliases=tuple(str(a) for a in doc.get("aliases", ())))
    raise TaxonomyError(f"bad role entry: {doc!r}")


def _parse_category(doc: dict) -> Category:
    if "name" not in doc:
        raise TaxonomyError("category missing name")
    if "subcategories" in doc:
        subs = tuple(
            Subcategory(
                name=str(sub.get("name", "")),
                roles=tuple(_parse_role(r) for r in sub.get("roles", ())),
            )
            for sub in doc["subcategories"]
        )
        return Category(name=str(doc["name"]), subcategories=subs)
    return Category(
        name=str(doc["name"]),
        roles=tuple(_parse_role(r) for r in doc.get("roles", ())),
    )


def load_taxonomy(path: str | Path) -> Taxonomy:
    path = Path(path)
    try:
        doc = json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise TaxonomyError(f"{path}: not valid JSON ({exc})") from None
    if not isinstance(doc, dict) or "categories" not in doc:
        raise TaxonomyError(f"{path}: expected an object with a categories key")
    return Taxonomy(categories=tuple(_parse_category(c) for c in doc["categories"]))


def taxonomy_to_json(taxonomy: Taxonomy) -> dict:
    def role_doc(role: Role):
        if role.aliases:
            return {"name": role.name, "aliases": list(role.aliases)}
        return role.name

    cats = []
    for cat in taxonomy.categories:
        if cat.subcategories:
            cats.append(
                {
                    "name": cat.name,
                    "subcategories": [
                        {"name": s.name, "roles": [role_doc(r) for r in s.roles]}
                        for s in cat.subcategories
                    ],
                }
            )
        else:
            cats.append({"name": cat.name, "roles": [role_doc(r) for r in cat.roles]})
    return {"categories": cats}


def write_taxonomy(path: str | Path, taxonomy: Taxonomy) -> None:
    Path(path).write_text(
        json.dumps(taxonomy_to_json(taxonomy), indent=2) + "\n", encoding="utf-8"
    )


def default_taxonomy() -> Taxonomy:
    """The built-in 33-role healthcare taxonomy."""
    r = Role
    return Taxonomy(
        categories=(
            Category(
                name="Physicians/Specialists",
                roles=(
                    r("General Practitioner/Family Doctor"),
                    r("Surgeon"),
                    r("Dentist"),
                    r("Orthopedic Surgeon"),
                    r("Cardiologist"),
                    r("Neurologist"),
                    r("Oncologist"),
                    r("Pediatrician"),
                    r("Gynecologist/Obstetrician"),
                    r("Dermatologist"),
                    r("Radiologist"),
                    r("Psychiatrist"),
                    r("Anesthesiologist"),
                    r("Pathologist"),
                ),
            ),
            Category(
                name="Paramedical Staffs",
                subcategories=(
                    Subcategory(
                        name="Nursing & Support",
                        roles=(r("Nurse"), r("Midwife"), r("Nursing Assistant")),
                    ),
                    Subcategory(
                        name="Technical & Laboratory",
                        roles=(
                            r("Pharmacist"),
                            r("Chemist"),
                            r("Laboratory Technician"),
                            r("Radiology Technician"),
                            r("Physiotherapist"),
                            r("Occupational Therapist"),
                            r("Speech Therapist"),
                        ),
                    ),
                    Subcategory(
                        name="Emergency & Field Roles",
                        roles=(
                            r("Paramedic"),
                            r("Ambulance Driver"),
                            r("Emergency Medical Technician"),
                        ),
                    ),
                ),
            ),
            Category(
                name="Hospital Administration",
                roles=(
                    r("Hospital Receptionist"),
                    r("Hospital Guard/Security Staff"),
                    r("Ward Attendant"),
                    r("Hospital Cleaner", aliases=("Sanitation Worker",)),
                    r("Cafeteria Worker"),
                    r("Medical Records Clerk"),
                ),
            ),
        )
    )
