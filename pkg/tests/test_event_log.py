import io

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ampwatch.errors import InvalidInputError, LogParseError
from ampwatch.event_log import (
    AnomalyEvent,
    EventKind,
    LOG_HEADER,
    LogRecord,
    parse_record,
    read_events,
    read_log,
    serialize_record,
    write_events,
    write_log,
)


def test_basic_line():
    rec = LogRecord(1_700_000_000, 0.87, 0.12, 0, EventKind.NONE)
    assert serialize_record(rec) == "1700000000,0.8700,0.1200,0,none"


def test_training_phase_empty_z():
    rec = LogRecord(1_700_000_000, 0.07, None, 0, EventKind.NONE)
    assert serialize_record(rec) == "1700000000,0.0700,,0,none"


def test_anomaly_line():
    rec = LogRecord(1_700_000_500, 0.88, 3.1, 1, EventKind.ZSCORE)
    assert serialize_record(rec) == "1700000500,0.8800,3.1000,1,zscore"


def test_parse_garbage():
    with pytest.raises(LogParseError):
        parse_record("garbage")


def test_parse_flag_kind_inconsistency():
    with pytest.raises(LogParseError):
        parse_record("1700000000,0.8700,0.1200,1,none")
    with pytest.raises(LogParseError):
        parse_record("1700000000,0.8700,0.1200,0,zscore")


def test_parse_negative_rms():
    with pytest.raises(LogParseError):
        parse_record("1700000000,-0.1000,,0,none")


def test_parse_error_carries_position():
    with pytest.raises(LogParseError) as exc:
        parse_record("1700000000,xx,,0,none", line_number=17)
    assert exc.value.line_number == 17
    assert exc.value.column == 2
    assert "line 17" in str(exc.value)


def test_record_invariant_enforced_at_construction():
    with pytest.raises(InvalidInputError):
        LogRecord(0, 0.1, None, 1, EventKind.NONE)
    with pytest.raises(InvalidInputError):
        LogRecord(0, 0.1, None, 0, EventKind.WATCHDOG)


quant = st.integers(0, 10_000_000).map(lambda n: n / 10_000)
kinds = st.sampled_from([EventKind.NONE, EventKind.ZSCORE, EventKind.WATCHDOG])


@st.composite
def log_records(draw):
    kind = draw(kinds)
    z = draw(st.none() | st.integers(-500_000, 500_000).map(lambda n: n / 10_000))
    return LogRecord(
        timestamp_s=draw(st.integers(0, 2**33)),
        rms_amps=draw(quant),
        composite_z=z,
        anomaly_flag=0 if kind == EventKind.NONE else 1,
        event_kind=kind,
    )


@given(log_records())
@settings(max_examples=500)
def test_round_trip_identity(rec):
    assert parse_record(serialize_record(rec)) == rec


def test_file_round_trip_with_header():
    records = [
        LogRecord(100, 0.07, None, 0, EventKind.NONE),
        LogRecord(130, 0.87, None, 0, EventKind.NONE),
        LogRecord(160, 0.07, 0.5, 0, EventKind.NONE),
    ]
    buf = io.StringIO()
    write_log(records, buf)
    text = buf.getvalue()
    assert text.splitlines()[0] == LOG_HEADER
    assert read_log(io.StringIO(text)) == records
    # header is optional on read
    headerless = "\n".join(text.splitlines()[1:]) + "\n"
    assert read_log(io.StringIO(headerless)) == records


def test_strict_mode_rejects_out_of_order():
    text = "100,0.0700,,0,none\n90,0.0700,,0,none\n"
    with pytest.raises(LogParseError):
        read_log(io.StringIO(text), strict=True)
    assert len(read_log(io.StringIO(text), strict=False)) == 2


def test_events_file_round_trip():
    events = [
        AnomalyEvent(EventKind.ZSCORE, 1000, 3.1234, 1, 500, 1000),
        AnomalyEvent(EventKind.WATCHDOG, 9000, None, 0, 5000, 9000),
    ]
    buf = io.StringIO()
    write_events(events, buf)
    assert read_events(io.StringIO(buf.getvalue())) == events


def test_event_invariants():
    with pytest.raises(InvalidInputError):
        AnomalyEvent(EventKind.WATCHDOG, 1000, 2.0, 0, 500, 1000)
    with pytest.raises(InvalidInputError):
        AnomalyEvent(EventKind.ZSCORE, 400, 2.0, 0, 500, 1000)
