from datetime import date, datetime, timedelta, timezone

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hine.errors import (
    InvalidTemplateError,
    NotEligibleError,
    NotFoundError,
    SessionClosedError,
    SessionOpenError,
    StaleVersionError,
    ValidationError,
)
from hine.media import MediaRef
from hine.records import RecordStore, new_id

BIRTH = date(2026, 7, 1)
REGISTERED = BIRTH + timedelta(weeks=2)
NEONATAL_DAY = datetime(2026, 7, 29, 10, 0, tzinfo=timezone.utc)  # 4 weeks, 36+4


def valid_info(**overrides):
    info = {
        "name": "Asha Rao",
        "date_of_birth": BIRTH.isoformat(),
        "mother_name": "Meera Rao",
        "father_name": "Vikram Rao",
        "gestational_week_at_birth": 36,
        "birth_weight": 2400,
        "discharge_diagnosis": "stable preterm",
    }
    info.update(overrides)
    return info


@pytest.fixture
def store(tmp_path):
    return RecordStore(tmp_path)


def register(store, **overrides):
    return store.register_patient(valid_info(**overrides), registered_on=REGISTERED)


class TestRegistration:
    def test_round_trip(self, store):
        patient = register(store)
        back = store.lookup_patient(patient.id)
        assert back == patient
        assert back.name == "Asha Rao"
        assert back.corrected_age_at_registration == -2  # two weeks before term

    def test_ids_are_unique_and_time_ordered(self, store):
        a = register(store)
        b = register(store)
        assert a.id != b.id
        assert len(a.id) == len(b.id) == 26
        assert a.id < b.id

    def test_empty_name_rejected(self, store):
        with pytest.raises(ValidationError, match="name"):
            register(store, name="  ")

    def test_low_birth_weight_rejected(self, store):
        with pytest.raises(ValidationError, match="birth_weight"):
            register(store, birth_weight=100)

    def test_unknown_id_not_found(self, store):
        with pytest.raises(NotFoundError):
            store.lookup_patient("01ARZ3NDEKTSV4RRFFQ69G5FAV")

    def test_lookup_is_exact_match(self, store):
        patient = register(store)
        with pytest.raises(NotFoundError):
            store.lookup_patient(patient.id.lower())
        with pytest.raises(NotFoundError):
            store.lookup_patient(" " + patient.id)

    def test_gestational_week_out_of_range(self, store):
        with pytest.raises(ValidationError):
            register(store, gestational_week_at_birth=19)

    @settings(max_examples=50, deadline=None)
    @given(
        name=st.text(min_size=1).filter(str.strip),
        gw=st.integers(20, 44),
        weight=st.integers(300, 6000),
    )
    def test_round_trip_arbitrary_valid(self, tmp_path_factory, name, gw, weight):
        store = RecordStore(tmp_path_factory.mktemp("s"))
        patient = store.register_patient(
            valid_info(name=name, gestational_week_at_birth=gw, birth_weight=weight),
            registered_on=REGISTERED,
        )
        back = store.lookup_patient(patient.id)
        assert back.name == name.strip()
        assert back.gestational_week_at_birth == gw
        assert back.birth_weight == weight


class TestSessions:
    def test_neonatal_happy_path(self, store):
        patient = register(store)
        session = store.start_session(patient.id, "neonatal", NEONATAL_DAY)
        assert session.status == "open"
        assert session.month_mark is None
        assert session.age_at_exam == 0  # at term-equivalent age

    def test_second_neonatal_not_eligible(self, store):
        patient = register(store)
        sid = store.start_session(patient.id, "neonatal", NEONATAL_DAY).id
        store.close_session(sid)
        with pytest.raises(NotEligibleError):
            store.start_session(patient.id, "neonatal", NEONATAL_DAY + timedelta(days=1))

    def test_open_session_blocks_another(self, store):
        patient = register(store)
        store.start_session(patient.id, "neonatal", NEONATAL_DAY)
        with pytest.raises(SessionOpenError):
            store.start_session(patient.id, "neonatal", NEONATAL_DAY)

    def test_follow_up_month_mark(self, store):
        patient = register(store)
        # corrected 7.5 months: 7.5 avg months + 4 weeks prematurity
        when = datetime.combine(
            BIRTH + timedelta(days=int(7.5 * 30.4375) + 28),
            datetime.min.time(),
            tzinfo=timezone.utc,
        )
        session = store.start_session(patient.id, "post_neonatal", when)
        assert session.month_mark == 9  # earlier marks are no longer due

    def test_month_mark_skips_completed(self, store):
        patient = register(store)
        for months, expected in ((3.1, 3), (6.2, 6), (7.5, 9)):
            when = datetime.combine(
                BIRTH + timedelta(days=int(months * 30.4375) + 28),
                datetime.min.time(),
                tzinfo=timezone.utc,
            )
            session = store.start_session(patient.id, "post_neonatal", when)
            assert session.month_mark == expected
            store.close_session(session.id)

    def test_unknown_patient(self, store):
        with pytest.raises(NotFoundError):
            store.start_session("nope", "neonatal", NEONATAL_DAY)


class TestItems:
    @pytest.fixture
    def open_session(self, store):
        patient = register(store)
        session = store.start_session(patient.id, "neonatal", NEONATAL_DAY)
        return store, patient, session

    def test_record_and_score_copied(self, open_session):
        store, _, session = open_session
        item = store.catalogs["neonatal"].items[0]
        result = store.record_item(session.id, item.id, item.templates[2].id)
        assert result.score == item.templates[2].score
        assert store.get_session(session.id).version == 2

    def test_rerecording_replaces(self, open_session):
        store, _, session = open_session
        item = store.catalogs["neonatal"].items[0]
        store.record_item(session.id, item.id, item.templates[0].id)
        store.record_item(session.id, item.id, item.templates[3].id)
        stored = store.get_session(session.id)
        assert len(stored.items) == 1
        assert stored.items[0].score == item.templates[3].score
        assert stored.version == 3

    def test_template_from_other_item_rejected(self, open_session):
        store, _, session = open_session
        items = store.catalogs["neonatal"].items
        with pytest.raises(InvalidTemplateError):
            store.record_item(session.id, items[0].id, items[1].templates[0].id)

    def test_unknown_item_not_found(self, open_session):
        store, _, session = open_session
        with pytest.raises(NotFoundError):
            store.record_item(session.id, "tickling", "t-1")

    def test_stale_version_detected(self, open_session):
        store, _, session = open_session
        item = store.catalogs["neonatal"].items[0]
        store.record_item(session.id, item.id, item.templates[0].id, expected_version=1)
        with pytest.raises(StaleVersionError):
            store.record_item(session.id, item.id, item.templates[1].id, expected_version=1)

    def test_media_refs_attach(self, open_session):
        store, _, session = open_session
        item = store.catalogs["neonatal"].items[0]
        ref = MediaRef(hash="ab" * 32, kind="frame", width=352, height=288)
        result = store.record_item(session.id, item.id, item.templates[0].id, media=[ref])
        assert result.media == [ref]


class TestClose:
    def test_total_is_sum_of_scores(self, store):
        patient = register(store)
        session = store.start_session(patient.id, "neonatal", NEONATAL_DAY)
        catalog = store.catalogs["neonatal"]
        # pick templates scoring 2, 3, 1 on the first three items
        for item, score in zip(catalog.items, (2, 3, 1)):
            template = next(t for t in item.templates if t.score == score)
            store.record_item(session.id, item.id, template.id)
        summary = store.close_session(session.id)
        assert summary["total"] == 6
        assert summary["incomplete"] is True  # only 3 of 10 items recorded

    def test_empty_session_closes_incomplete(self, store):
        patient = register(store)
        session = store.start_session(patient.id, "neonatal", NEONATAL_DAY)
        summary = store.close_session(session.id)
        assert summary["total"] == 0
        assert summary["incomplete"] is True

    def test_full_session_is_complete(self, store):
        patient = register(store)
        session = store.start_session(patient.id, "neonatal", NEONATAL_DAY)
        for item in store.catalogs["neonatal"].items:
            store.record_item(session.id, item.id, item.templates[0].id)
        assert store.close_session(session.id)["incomplete"] is False

    def test_double_close_rejected(self, store):
        patient = register(store)
        session = store.start_session(patient.id, "neonatal", NEONATAL_DAY)
        store.close_session(session.id)
        with pytest.raises(SessionClosedError):
            store.close_session(session.id)

    def test_closed_session_immutable_bytes(self, store, tmp_path):
        patient = register(store)
        session = store.start_session(patient.id, "neonatal", NEONATAL_DAY)
        item = store.catalogs["neonatal"].items[0]
        store.record_item(session.id, item.id, item.templates[0].id)
        store.close_session(session.id)
        log = store.data_dir / RecordStore.LOG_NAME
        before = log.read_bytes()
        with pytest.raises(SessionClosedError):
            store.record_item(session.id, item.id, item.templates[1].id)
        assert log.read_bytes() == before
        assert store.export_json() in (store.export_json(),)  # deterministic


class TestHistory:
    def test_chronological_order_and_totals(self, store):
        patient = register(store)
        marks = []
        for months in (3.1, 6.2):
            when = datetime.combine(
                BIRTH + timedelta(days=int(months * 30.4375) + 28),
                datetime.min.time(),
                tzinfo=timezone.utc,
            )
            session = store.start_session(patient.id, "post_neonatal", when)
            item = store.catalogs["post_neonatal"].items[0]
            store.record_item(session.id, item.id, item.templates[1].id)
            store.close_session(session.id)
            marks.append(session.month_mark)
        timeline = store.history(patient.id)
        assert [t["month_mark"] for t in timeline] == marks == [3, 6]
        timestamps = [t["timestamp"] for t in timeline]
        assert timestamps == sorted(timestamps)
        for entry in timeline:
            assert entry["total"] == sum(i["score"] for i in entry["items"])

    def test_media_refs_pass_through(self, store):
        patient = register(store)
        session = store.start_session(patient.id, "neonatal", NEONATAL_DAY)
        item = store.catalogs["neonatal"].items[0]
        refs = [
            MediaRef(hash="aa" * 32, kind="frame", width=352, height=288),
            MediaRef(hash="bb" * 32, kind="frame", width=352, height=288),
        ]
        store.record_item(session.id, item.id, item.templates[0].id, media=refs)
        timeline = store.history(patient.id)
        hashes = [m["hash"] for m in timeline[0]["items"][0]["media"]]
        assert hashes == ["aa" * 32, "bb" * 32]

    def test_unknown_patient(self, store):
        with pytest.raises(NotFoundError):
            store.history("missing")


class TestDurability:
    def test_survives_restart(self, tmp_path):
        store = RecordStore(tmp_path)
        patient = store.register_patient(valid_info(), registered_on=REGISTERED)
        session = store.start_session(patient.id, "neonatal", NEONATAL_DAY)
        item = store.catalogs["neonatal"].items[0]
        store.record_item(session.id, item.id, item.templates[1].id)
        store.close_session(session.id)
        exported = store.export_json()

        reopened = RecordStore(tmp_path)
        assert reopened.export_json() == exported
        assert reopened.lookup_patient(patient.id) == patient

    def test_export_import_export_byte_identical(self, tmp_path):
        store = RecordStore(tmp_path / "a")
        patient = store.register_patient(valid_info(), registered_on=REGISTERED)
        session = store.start_session(patient.id, "neonatal", NEONATAL_DAY)
        item = store.catalogs["neonatal"].items[0]
        store.record_item(session.id, item.id, item.templates[0].id)
        store.close_session(session.id)
        doc = store.export_json()

        other = RecordStore(tmp_path / "b")
        other.import_json(doc)
        assert other.export_json() == doc

    def test_import_rejects_garbage(self, tmp_path):
        store = RecordStore(tmp_path)
        with pytest.raises(ValidationError):
            store.import_json("{}")


def test_new_id_monotone_within_burst():
    ids = [new_id() for _ in range(500)]
    assert ids == sorted(ids)
    assert len(set(ids)) == 500


def test_at_most_one_neonatal_session_under_concurrency(tmp_path):
    import threading

    store = RecordStore(tmp_path)
    patient = store.register_patient(valid_info(), registered_on=REGISTERED)
    outcomes = []

    def try_start():
        try:
            session = store.start_session(patient.id, "neonatal", NEONATAL_DAY)
            store.close_session(session.id)
            outcomes.append("ok")
        except (NotEligibleError, SessionOpenError):
            outcomes.append("rejected")

    threads = [threading.Thread(target=try_start) for _ in range(16)]
    for t in threads:
        t.start()
    for t in threads:
        t.join()
    assert outcomes.count("ok") == 1
    neonatal_sessions = [
        s for s in store.history(patient.id) if s["category"] == "neonatal"
    ]
    assert len(neonatal_sessions) == 1
