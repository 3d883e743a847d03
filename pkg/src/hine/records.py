"""Patient registration, examination sessions and the follow-up timeline.

Backed by an append-only JSON-lines log under the data directory; state is
rebuilt by replay on open, so every committed record survives a restart
bit-identically. Writes are serialized behind a process lock and sessions
carry a monotonically increasing version for optimistic concurrency.
"""

from __future__ import annotations

import json
import os
import secrets
import threading
import time
from dataclasses import dataclass, field
from datetime import date, datetime, timezone
from pathlib import Path

from . import catalog as catalog_mod
from .catalog import ExamCatalog, corrected_age_months, corrected_age_weeks, eligible_category, next_due
from .errors import (
    InvalidTemplateError,
    NotEligibleError,
    NotFoundError,
    SessionClosedError,
    SessionOpenError,
    StaleVersionError,
    ValidationError,
)
from .media import MediaRef

_CROCKFORD = "0123456789ABCDEFGHJKMNPQRSTVWXYZ"
_ulid_lock = threading.Lock()
_ulid_last: list[int] = [0, 0]  # [timestamp_ms, randomness]


def new_id() -> str:
    """26-character time-ordered unique identifier (48-bit millisecond
    timestamp + 80 random bits, Crockford base32). Lookups are exact-match."""
    with _ulid_lock:
        ts = time.time_ns() // 1_000_000
        if ts > _ulid_last[0]:
            rand = secrets.randbits(80)
        else:
            ts = _ulid_last[0]
            rand = _ulid_last[1] + 1  # same millisecond: bump to stay ordered
            if rand >= 1 << 80:
                ts += 1
                rand = secrets.randbits(80)
        _ulid_last[0], _ulid_last[1] = ts, rand
    value = (ts << 80) | rand
    chars = []
    for _ in range(26):
        chars.append(_CROCKFORD[value & 0x1F])
        value >>= 5
    return "".join(reversed(chars))


@dataclass(frozen=True)
class Patient:
    id: str
    name: str
    date_of_birth: date
    mother_name: str
    father_name: str
    gestational_week_at_birth: int
    corrected_age_at_registration: int  # weeks, possibly negative pre-term
    birth_weight: int  # grams
    discharge_diagnosis: str = ""


@dataclass
class ItemResult:
    item_id: str
    selected_template_id: str
    score: int
    note: str = ""
    media: list[MediaRef] = field(default_factory=list)


@dataclass
class ExamSession:
    id: str
    patient_id: str
    category: str
    timestamp: datetime
    age_at_exam: int  # corrected age in weeks at the examination
    month_mark: int | None
    items: list[ItemResult] = field(default_factory=list)
    status: str = "open"
    version: int = 1
    summary: dict | None = None


def _rfc3339(dt: datetime) -> str:
    return dt.astimezone(timezone.utc).isoformat().replace("+00:00", "Z")


def _parse_rfc3339(text: str) -> datetime:
    return datetime.fromisoformat(text.replace("Z", "+00:00")).astimezone(timezone.utc)


def _patient_to_json(p: Patient) -> dict:
    return {
        "id": p.id,
        "name": p.name,
        "date_of_birth": p.date_of_birth.isoformat(),
        "mother_name": p.mother_name,
        "father_name": p.father_name,
        "gestational_week_at_birth": p.gestational_week_at_birth,
        "corrected_age_at_registration": p.corrected_age_at_registration,
        "birth_weight": p.birth_weight,
        "discharge_diagnosis": p.discharge_diagnosis,
    }


def _patient_from_json(d: dict) -> Patient:
    return Patient(
        id=d["id"],
        name=d["name"],
        date_of_birth=date.fromisoformat(d["date_of_birth"]),
        mother_name=d["mother_name"],
        father_name=d["father_name"],
        gestational_week_at_birth=d["gestational_week_at_birth"],
        corrected_age_at_registration=d["corrected_age_at_registration"],
        birth_weight=d["birth_weight"],
        discharge_diagnosis=d.get("discharge_diagnosis", ""),
    )


def _item_to_json(it: ItemResult) -> dict:
    return {
        "item_id": it.item_id,
        "selected_template_id": it.selected_template_id,
        "score": it.score,
        "note": it.note,
        "media": [m.to_json() for m in it.media],
    }


def _item_from_json(d: dict) -> ItemResult:
    return ItemResult(
        item_id=d["item_id"],
        selected_template_id=d["selected_template_id"],
        score=d["score"],
        note=d.get("note", ""),
        media=[MediaRef.from_json(m) for m in d.get("media", [])],
    )


def _session_to_json(s: ExamSession) -> dict:
    return {
        "id": s.id,
        "patient_id": s.patient_id,
        "category": s.category,
        "timestamp": _rfc3339(s.timestamp),
        "age_at_exam": s.age_at_exam,
        "month_mark": s.month_mark,
        "items": [_item_to_json(i) for i in s.items],
        "status": s.status,
        "version": s.version,
        "summary": s.summary,
    }


def _session_from_json(d: dict) -> ExamSession:
    return ExamSession(
        id=d["id"],
        patient_id=d["patient_id"],
        category=d["category"],
        timestamp=_parse_rfc3339(d["timestamp"]),
        age_at_exam=d["age_at_exam"],
        month_mark=d.get("month_mark"),
        items=[_item_from_json(i) for i in d.get("items", [])],
        status=d["status"],
        version=d["version"],
        summary=d.get("summary"),
    )


def validate_registration(info: dict, registered_on: date) -> dict:
    """Check mandatory registration fields and numeric ranges; returns the
    normalized field dict (without id)."""
    def text_field(key: str) -> str:
        value = info.get(key)
        if not isinstance(value, str) or not value.strip():
            raise ValidationError(f"{key} is mandatory and must be non-empty")
        return value.strip()

    name = text_field("name")
    mother = text_field("mother_name")
    father = text_field("father_name")

    dob_raw = info.get("date_of_birth")
    if isinstance(dob_raw, date):
        dob = dob_raw
    elif isinstance(dob_raw, str):
        try:
            dob = date.fromisoformat(dob_raw)
        except ValueError as exc:
            raise ValidationError(f"date_of_birth must be YYYY-MM-DD: {exc}") from exc
    else:
        raise ValidationError("date_of_birth is mandatory")
    if dob > registered_on:
        raise ValidationError("date_of_birth lies in the future")

    def int_field(key: str, lo: int, hi: int) -> int:
        value = info.get(key)
        if isinstance(value, bool) or not isinstance(value, int):
            raise ValidationError(f"{key} is mandatory and must be an integer")
        if not lo <= value <= hi:
            raise ValidationError(f"{key} {value} outside the accepted range {lo}..{hi}")
        return value

    gw = int_field("gestational_week_at_birth", 20, 44)
    weight = int_field("birth_weight", 300, 6000)
    diagnosis = info.get("discharge_diagnosis", "")
    if not isinstance(diagnosis, str):
        raise ValidationError("discharge_diagnosis must be text")

    return {
        "name": name,
        "date_of_birth": dob,
        "mother_name": mother,
        "father_name": father,
        "gestational_week_at_birth": gw,
        "birth_weight": weight,
        "discharge_diagnosis": diagnosis,
    }


class RecordStore:
    """Durable store for patients and examination sessions."""

    LOG_NAME = "records.jsonl"

    def __init__(self, data_dir: str | Path, catalogs: dict[str, ExamCatalog] | None = None):
        self.data_dir = Path(data_dir)
        self.data_dir.mkdir(parents=True, exist_ok=True)
        self.catalogs = catalogs or {
            catalog_mod.NEONATAL: catalog_mod.load_bundled_catalog(catalog_mod.NEONATAL),
            catalog_mod.POST_NEONATAL: catalog_mod.load_bundled_catalog(catalog_mod.POST_NEONATAL),
        }
        self.catalog_version = catalog_mod.catalog_version(self.catalogs)
        self._lock = threading.RLock()
        self._patients: dict[str, Patient] = {}
        self._sessions: dict[str, ExamSession] = {}
        self._log_path = self.data_dir / self.LOG_NAME
        self._replay()

    # -- persistence ------------------------------------------------------

    def _replay(self) -> None:
        if not self._log_path.exists():
            return
        with self._log_path.open("r", encoding="utf-8") as fh:
            for line in fh:
                line = line.strip()
                if not line:
                    continue
                event = json.loads(line)
                kind, data = event["event"], event["data"]
                if kind == "patient":
                    p = _patient_from_json(data)
                    self._patients[p.id] = p
                elif kind == "session":
                    s = _session_from_json(data)
                    self._sessions[s.id] = s
                elif kind == "import":
                    self._patients = {
                        p["id"]: _patient_from_json(p) for p in data["patients"]
                    }
                    self._sessions = {
                        s["id"]: _session_from_json(s) for s in data["sessions"]
                    }

    def _append(self, event: str, data: dict) -> None:
        line = json.dumps({"event": event, "data": data}, sort_keys=True)
        with self._log_path.open("a", encoding="utf-8") as fh:
            fh.write(line + "\n")
            fh.flush()
            os.fsync(fh.fileno())

    # -- patients ---------------------------------------------------------

    def register_patient(self, info: dict, registered_on: date | None = None) -> Patient:
        registered_on = registered_on or datetime.now(timezone.utc).date()
        with self._lock:
            fields = validate_registration(info, registered_on)
            corrected = corrected_age_weeks(
                fields["gestational_week_at_birth"], fields["date_of_birth"], registered_on
            )
            patient = Patient(
                id=new_id(),
                corrected_age_at_registration=corrected,
                **fields,
            )
            self._patients[patient.id] = patient
            self._append("patient", _patient_to_json(patient))
            return patient

    def lookup_patient(self, patient_id: str) -> Patient:
        patient = self._patients.get(patient_id)
        if patient is None:
            raise NotFoundError(f"no patient with id {patient_id!r}")
        return patient

    # -- sessions ---------------------------------------------------------

    def _has_neonatal_session(self, patient_id: str) -> bool:
        return any(
            s.patient_id == patient_id and s.category == catalog_mod.NEONATAL
            for s in self._sessions.values()
        )

    def _open_session_for(self, patient_id: str) -> ExamSession | None:
        for s in self._sessions.values():
            if s.patient_id == patient_id and s.status == "open":
                return s
        return None

    def start_session(
        self, patient_id: str, category: str, timestamp: datetime | None = None
    ) -> ExamSession:
        timestamp = timestamp or datetime.now(timezone.utc)
        if timestamp.tzinfo is None:
            timestamp = timestamp.replace(tzinfo=timezone.utc)
        with self._lock:
            patient = self.lookup_patient(patient_id)
            if category not in self.catalogs:
                raise ValidationError(f"unknown category {category!r}")
            if self._open_session_for(patient_id) is not None:
                raise SessionOpenError(f"patient {patient_id} already has an open session")
            allowed = eligible_category(
                patient.gestational_week_at_birth,
                patient.date_of_birth,
                timestamp.date(),
                has_prior_neonatal=self._has_neonatal_session(patient_id),
            )
            if allowed != category:
                raise NotEligibleError(
                    f"patient is eligible for {allowed!r}, not {category!r}",
                    details={"eligible": allowed},
                )
            month_mark = None
            if category == catalog_mod.POST_NEONATAL:
                completed = {
                    s.month_mark
                    for s in self._sessions.values()
                    if s.patient_id == patient_id
                    and s.category == catalog_mod.POST_NEONATAL
                    and s.month_mark is not None
                }
                month_mark = next_due(
                    corrected_age_months(
                        patient.gestational_week_at_birth,
                        patient.date_of_birth,
                        timestamp.date(),
                    ),
                    completed,
                )
            session = ExamSession(
                id=new_id(),
                patient_id=patient_id,
                category=category,
                timestamp=timestamp,
                age_at_exam=corrected_age_weeks(
                    patient.gestational_week_at_birth,
                    patient.date_of_birth,
                    timestamp.date(),
                ),
                month_mark=month_mark,
            )
            self._sessions[session.id] = session
            self._append("session", _session_to_json(session))
            return session

    def get_session(self, session_id: str) -> ExamSession:
        session = self._sessions.get(session_id)
        if session is None:
            raise NotFoundError(f"no session with id {session_id!r}")
        return session

    def record_item(
        self,
        session_id: str,
        item_id: str,
        template_id: str,
        media: list[MediaRef] | None = None,
        note: str = "",
        expected_version: int | None = None,
    ) -> ItemResult:
        with self._lock:
            session = self.get_session(session_id)
            if session.status == "closed":
                raise SessionClosedError(f"session {session_id} is closed")
            if expected_version is not None and expected_version != session.version:
                raise StaleVersionError(
                    f"session version is {session.version}, caller expected {expected_version}",
                    details={"version": session.version},
                )
            item = self.catalogs[session.category].item(item_id)
            if item is None:
                raise NotFoundError(
                    f"item {item_id!r} is not part of the {session.category} examination"
                )
            template = item.template(template_id)
            if template is None:
                raise InvalidTemplateError(
                    f"template {template_id!r} does not belong to item {item_id!r}"
                )
            result = ItemResult(
                item_id=item_id,
                selected_template_id=template_id,
                score=template.score,
                note=note,
                media=list(media or []),
            )
            session.items = [r for r in session.items if r.item_id != item_id]
            session.items.append(result)
            session.version += 1
            self._append("session", _session_to_json(session))
            return result

    def close_session(self, session_id: str) -> dict:
        with self._lock:
            session = self.get_session(session_id)
            if session.status == "closed":
                raise SessionClosedError(f"session {session_id} is already closed")
            total = sum(r.score for r in session.items)
            summary = {
                "session_id": session.id,
                "items": [
                    {"item_id": r.item_id, "score": r.score} for r in session.items
                ],
                "total": total,
                "incomplete": len(session.items)
                < len(self.catalogs[session.category].items),
            }
            session.status = "closed"
            session.version += 1
            session.summary = summary
            self._append("session", _session_to_json(session))
            return summary

    # -- timeline ---------------------------------------------------------

    def history(self, patient_id: str) -> list[dict]:
        """Chronological read-only view of a patient's sessions; media come
        back as refs, never bytes."""
        with self._lock:
            self.lookup_patient(patient_id)
            sessions = sorted(
                (s for s in self._sessions.values() if s.patient_id == patient_id),
                key=lambda s: (s.timestamp, s.id),
            )
            return [
                {
                    "session_id": s.id,
                    "category": s.category,
                    "timestamp": _rfc3339(s.timestamp),
                    "month_mark": s.month_mark,
                    "status": s.status,
                    "age_at_exam": s.age_at_exam,
                    "version": s.version,
                    "items": [_item_to_json(r) for r in s.items],
                    "total": sum(r.score for r in s.items),
                    "incomplete": (s.summary or {}).get("incomplete"),
                }
                for s in sessions
            ]

    # -- export / import --------------------------------------------------

    def export_json(self) -> str:
        """Canonical full-store document; export -> import -> export is
        byte-identical."""
        with self._lock:
            doc = {
                "catalog_version": self.catalog_version,
                "patients": [
                    _patient_to_json(p)
                    for p in sorted(self._patients.values(), key=lambda p: p.id)
                ],
                "sessions": [
                    _session_to_json(s)
                    for s in sorted(self._sessions.values(), key=lambda s: s.id)
                ],
            }
            return json.dumps(doc, sort_keys=True, indent=2) + "\n"

    def import_json(self, text: str) -> None:
        try:
            doc = json.loads(text)
            patients = [_patient_from_json(p) for p in doc["patients"]]
            sessions = [_session_from_json(s) for s in doc["sessions"]]
        except (json.JSONDecodeError, KeyError, TypeError, ValueError) as exc:
            raise ValidationError(f"store document is malformed: {exc}") from exc
        with self._lock:
            self._patients = {p.id: p for p in patients}
            self._sessions = {s.id: s for s in sessions}
            self._append(
                "import",
                {
                    "patients": [_patient_to_json(p) for p in patients],
                    "sessions": [_session_to_json(s) for s in sessions],
                },
            )
