"""Examination catalogs: loading, validation, eligibility and scheduling.

Two catalogs ship with the package: the ten-item neonatal set and the
three-section follow-up set examined at 3, 6, 9, 12, 15, 18, 21 and 24
months. Catalogs are immutable after load and safe to share across threads.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field
from datetime import date
from importlib import resources

from .errors import InvalidInputError, ParseError, ValidationError

NEONATAL = "neonatal"
POST_NEONATAL = "post_neonatal"
NONE = "none"

NEONATAL_ITEM_NAMES = (
    "posture",
    "arm recoil",
    "arm traction",
    "leg recoil",
    "leg traction",
    "popliteal angle",
    "head control (extensor tone)",
    "head control (flexor tone)",
    "head lag",
    "ventral suspension",
)

POST_NEONATAL_SCHEDULE = (3, 6, 9, 12, 15, 18, 21, 24)

_SECTIONS = {"neurological", "motor_milestones", "behaviour", "neonatal"}

# full term is 40 gestational weeks; prematurity is corrected against it
TERM_WEEKS = 40
_DAYS_PER_MONTH = 365.25 / 12


@dataclass(frozen=True)
class TemplateOption:
    id: str
    label: str
    score: int
    image_ref: str | None = None


@dataclass(frozen=True)
class ExamItem:
    id: str
    name: str
    section: str
    templates: tuple[TemplateOption, ...]

    def template(self, template_id: str) -> TemplateOption | None:
        for t in self.templates:
            if t.id == template_id:
                return t
        return None


@dataclass(frozen=True)
class ExamCatalog:
    category: str
    items: tuple[ExamItem, ...]
    schedule_months: tuple[int, ...] = ()
    _by_id: dict = field(default_factory=dict, repr=False, compare=False)

    def __post_init__(self):
        self._by_id.update({item.id: item for item in self.items})

    def item(self, item_id: str) -> ExamItem | None:
        return self._by_id.get(item_id)


def _require(condition: bool, message: str) -> None:
    if not condition:
        raise ValidationError(message)


def load_catalog(doc: str | bytes) -> ExamCatalog:
    """Parse and validate a catalog document.

    Raises ParseError for malformed JSON or wrong structure, ValidationError
    for rule violations (wrong neonatal item set, template count outside
    4..5, duplicate ids, wrong follow-up schedule).
    """
    try:
        raw = json.loads(doc)
    except (json.JSONDecodeError, UnicodeDecodeError) as exc:
        raise ParseError(f"catalog is not valid JSON: {exc}") from exc
    if not isinstance(raw, dict):
        raise ParseError("catalog document must be a JSON object")
    category = raw.get("category")
    items_raw = raw.get("items")
    schedule_raw = raw.get("schedule_months", [])
    if not isinstance(items_raw, list) or not isinstance(schedule_raw, list):
        raise ParseError("items and schedule_months must be arrays")

    _require(category in (NEONATAL, POST_NEONATAL), f"unknown category {category!r}")

    items: list[ExamItem] = []
    seen_ids: set[str] = set()
    for entry in items_raw:
        if not isinstance(entry, dict):
            raise ParseError("each item must be a JSON object")
        item_id = entry.get("id")
        name = entry.get("name")
        section = entry.get("section")
        templates_raw = entry.get("templates")
        if not isinstance(item_id, str) or not isinstance(name, str):
            raise ParseError("item id and name must be strings")
        if not isinstance(templates_raw, list):
            raise ParseError("item templates must be an array")
        _require(item_id != "", "item id must be non-empty")
        _require(item_id not in seen_ids, f"duplicate item id {item_id!r}")
        seen_ids.add(item_id)
        _require(section in _SECTIONS, f"unknown section {section!r}")
        _require(
            4 <= len(templates_raw) <= 5,
            f"item {item_id!r} has {len(templates_raw)} templates; 4 to 5 are shown on screen",
        )
        templates: list[TemplateOption] = []
        tmpl_ids: set[str] = set()
        for t in templates_raw:
            if not isinstance(t, dict):
                raise ParseError("each template must be a JSON object")
            tid = t.get("id")
            label = t.get("label")
            score = t.get("score")
            image_ref = t.get("image_ref")
            if not isinstance(tid, str) or not isinstance(label, str):
                raise ParseError("template id and label must be strings")
            if not isinstance(score, int) or isinstance(score, bool):
                raise ParseError("template score must be an integer")
            if image_ref is not None and not isinstance(image_ref, str):
                raise ParseError("template image_ref must be a string path")
            _require(tid not in tmpl_ids, f"duplicate template id {tid!r} in item {item_id!r}")
            tmpl_ids.add(tid)
            templates.append(TemplateOption(id=tid, label=label, score=score, image_ref=image_ref))
        items.append(ExamItem(id=item_id, name=name, section=section, templates=tuple(templates)))

    if category == NEONATAL:
        _require(len(items) == 10, f"neonatal catalog must have exactly 10 items, got {len(items)}")
        names = {item.name.casefold() for item in items}
        expected = {n.casefold() for n in NEONATAL_ITEM_NAMES}
        _require(
            names == expected,
            f"neonatal item names must be exactly {sorted(expected)}, got {sorted(names)}",
        )
        _require(
            all(item.section == "neonatal" for item in items),
            "neonatal items must carry the neonatal section",
        )
        _require(schedule_raw == [], "neonatal catalog takes no schedule")
        schedule: tuple[int, ...] = ()
    else:
        _require(
            tuple(schedule_raw) == POST_NEONATAL_SCHEDULE,
            f"follow-up schedule must be {list(POST_NEONATAL_SCHEDULE)}",
        )
        _require(
            all(item.section != "neonatal" for item in items),
            "follow-up items must use the neurological/motor_milestones/behaviour sections",
        )
        schedule = POST_NEONATAL_SCHEDULE

    return ExamCatalog(category=category, items=tuple(items), schedule_months=schedule)


def load_bundled_catalog(category: str) -> ExamCatalog:
    name = {NEONATAL: "catalog_neonatal.json", POST_NEONATAL: "catalog_post_neonatal.json"}[category]
    data = resources.files("hine.data").joinpath(name).read_text(encoding="utf-8")
    return load_catalog(data)


def catalog_version(catalogs: dict[str, ExamCatalog]) -> str:
    """Short content hash identifying the loaded catalog pair."""
    blob = json.dumps(
        {
            cat: [
                (i.id, i.name, i.section, [(t.id, t.label, t.score) for t in i.templates])
                for i in c.items
            ]
            for cat, c in sorted(catalogs.items())
        },
        sort_keys=True,
    ).encode()
    return hashlib.sha256(blob).hexdigest()[:12]


def full_weeks_between(start: date, end: date) -> int:
    return (end - start).days // 7


def corrected_age_weeks(gestational_week_at_birth: int, birth_date: date, on_date: date) -> int:
    """Chronological age minus the weeks the infant fell short of term."""
    return full_weeks_between(birth_date, on_date) - (TERM_WEEKS - gestational_week_at_birth)


def corrected_age_months(gestational_week_at_birth: int, birth_date: date, on_date: date) -> float:
    corrected_days = (on_date - birth_date).days - 7 * (TERM_WEEKS - gestational_week_at_birth)
    return corrected_days / _DAYS_PER_MONTH


def eligible_category(
    gestational_week_at_birth: int,
    birth_date: date,
    on_date: date,
    has_prior_neonatal: bool,
) -> str:
    """Which examination set applies on a given date.

    The neonatal set applies once, at a current gestational age of 40 weeks
    or above, before the corrected age reaches 2 months; the follow-up set
    covers corrected ages of 2 to 24 months inclusive.
    """
    if not 20 <= gestational_week_at_birth <= 44:
        raise InvalidInputError(
            f"gestational week {gestational_week_at_birth} outside plausible 20..44"
        )
    if birth_date > on_date:
        raise InvalidInputError("examination date precedes date of birth")
    current_ga = gestational_week_at_birth + full_weeks_between(birth_date, on_date)
    months = corrected_age_months(gestational_week_at_birth, birth_date, on_date)
    if current_ga >= TERM_WEEKS and months < 2 and not has_prior_neonatal:
        return NEONATAL
    if 2 <= months <= 24:
        return POST_NEONATAL
    return NONE


def next_due(corrected_age_months_now: float, completed_marks: set[int]) -> int | None:
    """Smallest schedule mark at or after the (floored) corrected age that is
    not completed yet; None once the 24-month schedule is exhausted."""
    if corrected_age_months_now < 0:
        corrected_age_months_now = 0.0
    floor_months = int(corrected_age_months_now)
    candidates = [
        m for m in POST_NEONATAL_SCHEDULE if m >= floor_months and m not in completed_marks
    ]
    return min(candidates) if candidates else None
