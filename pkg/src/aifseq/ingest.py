"""IDS observable ingestion: EVE JSON and Snort fast alerts to normalized form.

Two wire formats are supported and nothing else: Suricata EVE JSON (one
record per line, ``event_type: "alert"``) and the Snort fast-alert line::

    MM/DD-HH:MM:SS.ffffff  [**] [gid:sid:rev] MSG [**] \
        [Classification: TEXT] [Priority: N] {PROTO} SRC:SPORT -> DST:DPORT

Classification, Priority, and the ports are optional; the fast format
carries no year, so callers supply one. Parsers are pure functions; the
stream reader skips malformed records, counts them, and never aborts.
Timestamps are normalized to UTC on the way in. Ports are kept only for
port-carrying protocols (TCP/UDP/SCTP), so the same observable rendered in
either format parses to the same normalized record.
"""

from __future__ import annotations

import io
import json
import re
from dataclasses import dataclass, field
from datetime import datetime, timezone
from ipaddress import ip_address
from pathlib import Path
from typing import IO, Any, Iterable, Iterator

EVE_FORMAT = "eve"
SNORT_FAST_FORMAT = "snort_fast"

_PORTFUL_PROTOCOLS = frozenset({"TCP", "UDP", "SCTP"})

_FAST_LINE_RE = re.compile(
    r"(\d{2})/(\d{2})-(\d{2}):(\d{2}):(\d{2})\.(\d{6})\s+"
    r"\[\*\*\]\s+"
    r"\[(\d+):(\d+):(\d+)\]\s+"
    r"(.*?)\s+\[\*\*\]\s+"
    r"(?:\[Classification:\s*([^\]]*?)\s*\]\s+)?"
    r"(?:\[Priority:\s*(\d+)\]\s+)?"
    r"\{(\S+)\}\s+"
    r"(\S+)\s+->\s+(\S+)\s*$"
)

# Offsets like +0000 (no colon) predate the +00:00 spelling Python parses
# natively on 3.10; both occur in real EVE logs.
_COMPACT_OFFSET_RE = re.compile(r"([+-]\d{2})(\d{2})$")


class AlertParseError(ValueError):
    """One record could not be parsed; carries the input locator."""

    def __init__(self, message: str, ref: RawRef | None = None):
        super().__init__(message)
        self.ref = ref

    def __str__(self) -> str:
        base = super().__str__()
        return f"{self.ref}: {base}" if self.ref is not None else base


class FormatDetectionError(ValueError):
    """The input format could not be determined."""


@dataclass(frozen=True)
class RawRef:
    """Locator of one input record: source name plus 1-based line number."""

    source: str
    index: int

    def __str__(self) -> str:
        return f"{self.source}:{self.index}"


_DEFAULT_REF = RawRef("<input>", 0)


@dataclass(slots=True)
class NormalizedAlert:
    """One IDS alert in wire-format-independent form.

    ``timestamp`` is always UTC; ``(generator_id, signature_id, revision)``
    identify the triggering signature; ports are ``None`` exactly when the
    protocol does not carry them.
    """

    timestamp: datetime
    src_ip: str
    src_port: int | None
    dst_ip: str
    dst_port: int | None
    protocol: str
    generator_id: int
    signature_id: int
    revision: int
    signature_msg: str
    category: str | None
    severity: int | None
    source_format: str
    raw_ref: RawRef

    def content_fields(self) -> tuple:
        """Everything except provenance (source_format, raw_ref)."""
        return (
            self.timestamp,
            self.src_ip,
            self.src_port,
            self.dst_ip,
            self.dst_port,
            self.protocol,
            self.generator_id,
            self.signature_id,
            self.revision,
            self.signature_msg,
            self.category,
            self.severity,
        )


@dataclass
class IngestStats:
    """Counts for one stream pass: seen = emitted + skipped + malformed."""

    records_seen: int = 0
    alerts_emitted: int = 0
    non_alert_skipped: int = 0
    malformed: int = 0
    first_error_samples: list[tuple[str, str]] = field(default_factory=list)

    MAX_ERROR_SAMPLES = 10

    def record_error(self, ref: RawRef | None, reason: str) -> None:
        self.malformed += 1
        if len(self.first_error_samples) < self.MAX_ERROR_SAMPLES:
            self.first_error_samples.append((str(ref) if ref else "?", reason))

    def reconciles(self) -> bool:
        return self.records_seen == self.alerts_emitted + self.non_alert_skipped + self.malformed

    def to_dict(self) -> dict:
        return {
            "records_seen": self.records_seen,
            "alerts_emitted": self.alerts_emitted,
            "non_alert_skipped": self.non_alert_skipped,
            "malformed": self.malformed,
            "first_error_samples": [list(pair) for pair in self.first_error_samples],
        }


def _parse_timestamp(text: str, ref: RawRef) -> datetime:
    try:
        ts = datetime.fromisoformat(text)
    except ValueError:
        fixed = _COMPACT_OFFSET_RE.sub(r"\1:\2", text.replace("Z", "+00:00"))
        try:
            ts = datetime.fromisoformat(fixed)
        except ValueError:
            raise AlertParseError(f"unparseable timestamp {text!r}", ref) from None
    if ts.tzinfo is None:
        raise AlertParseError(f"timestamp {text!r} has no UTC offset", ref)
    return ts.astimezone(timezone.utc)


def _valid_ip(text: Any) -> bool:
    if not isinstance(text, str) or not text:
        return False
    # Fast path for plain IPv4; ipaddress handles IPv6 and the oddities.
    parts = text.split(".")
    if len(parts) == 4:
        for p in parts:
            if not p.isdigit() or len(p) > 3 or int(p) > 255 or (p[0] == "0" and len(p) > 1):
                break
        else:
            return True
    try:
        ip_address(text)
    except ValueError:
        return False
    return True


def _check_port(value: Any, what: str, ref: RawRef) -> int:
    if not isinstance(value, int) or isinstance(value, bool) or not 0 <= value <= 65535:
        raise AlertParseError(f"invalid {what} {value!r}", ref)
    return value


def _normalize_ports(
    protocol: str, src_port: int | None, dst_port: int | None, ref: RawRef
) -> tuple[int | None, int | None]:
    if protocol in _PORTFUL_PROTOCOLS:
        if src_port is None or dst_port is None:
            raise AlertParseError(f"{protocol} record is missing a port", ref)
        return src_port, dst_port
    # Portless protocol: drop any port the producer attached.
    return None, None


def parse_eve_record(line: str, *, ref: RawRef = _DEFAULT_REF) -> NormalizedAlert | None:
    """Parse one EVE JSON record; None for non-alert events.

    Raises AlertParseError on malformed JSON, missing mandatory fields, or
    an unparseable timestamp. Unknown EVE fields are ignored.
    """
    try:
        record = json.loads(line)
    except json.JSONDecodeError as exc:
        raise AlertParseError(f"malformed JSON: {exc.msg}", ref) from None
    if not isinstance(record, dict):
        raise AlertParseError("record is not a JSON object", ref)
    if record.get("event_type") != "alert":
        return None

    alert = record.get("alert")
    if not isinstance(alert, dict):
        raise AlertParseError("alert object missing", ref)

    for name in ("timestamp", "src_ip", "dest_ip", "proto"):
        if name not in record:
            raise AlertParseError(f"mandatory field {name!r} missing", ref)
    if "signature_id" not in alert or "signature" not in alert:
        raise AlertParseError("alert.signature_id / alert.signature missing", ref)

    timestamp = _parse_timestamp(record["timestamp"], ref)
    src_ip, dst_ip = record["src_ip"], record["dest_ip"]
    if not _valid_ip(src_ip):
        raise AlertParseError(f"invalid src_ip {src_ip!r}", ref)
    if not _valid_ip(dst_ip):
        raise AlertParseError(f"invalid dest_ip {dst_ip!r}", ref)

    proto = record["proto"]
    if not isinstance(proto, str) or not proto:
        raise AlertParseError(f"invalid proto {proto!r}", ref)
    protocol = proto.upper()

    src_port = record.get("src_port")
    dst_port = record.get("dest_port")
    if protocol in _PORTFUL_PROTOCOLS:
        src_port = _check_port(src_port, "src_port", ref)
        dst_port = _check_port(dst_port, "dest_port", ref)
    src_port, dst_port = _normalize_ports(protocol, src_port, dst_port, ref)

    sid = alert["signature_id"]
    gid = alert.get("gid", 1)
    rev = alert.get("rev", 0)
    for name, value in (("signature_id", sid), ("gid", gid), ("rev", rev)):
        if not isinstance(value, int) or isinstance(value, bool) or value < 0:
            raise AlertParseError(f"invalid alert.{name} {value!r}", ref)

    msg = alert["signature"]
    if not isinstance(msg, str):
        raise AlertParseError(f"invalid alert.signature {msg!r}", ref)

    category = alert.get("category")
    if category is not None and not isinstance(category, str):
        raise AlertParseError(f"invalid alert.category {category!r}", ref)
    if category == "":
        category = None

    severity = alert.get("severity")
    if severity is not None and (
        not isinstance(severity, int) or isinstance(severity, bool) or severity < 1
    ):
        raise AlertParseError(f"invalid alert.severity {severity!r}", ref)

    return NormalizedAlert(
        timestamp=timestamp,
        src_ip=src_ip,
        src_port=src_port,
        dst_ip=dst_ip,
        dst_port=dst_port,
        protocol=protocol,
        generator_id=gid,
        signature_id=sid,
        revision=rev,
        signature_msg=msg,
        category=category,
        severity=severity,
        source_format=EVE_FORMAT,
        raw_ref=ref,
    )


def _split_endpoint(text: str, protocol: str, ref: RawRef) -> tuple[str, int | None]:
    if protocol in _PORTFUL_PROTOCOLS:
        addr, sep, port_text = text.rpartition(":")
        if not sep or not port_text.isdigit():
            raise AlertParseError(f"{protocol} endpoint {text!r} has no port", ref)
        port = int(port_text)
        if port > 65535 or not _valid_ip(addr):
            raise AlertParseError(f"invalid endpoint {text!r}", ref)
        return addr, port
    if not _valid_ip(text):
        raise AlertParseError(f"invalid endpoint {text!r}", ref)
    return text, None


def parse_snort_fast_line(
    line: str, assumed_year: int, *, ref: RawRef = _DEFAULT_REF
) -> NormalizedAlert:
    """Parse one Snort fast-alert line.

    The format carries no year, so ``assumed_year`` supplies it; the time is
    taken as UTC. Raises AlertParseError when the line does not match the
    fast shape or carries invalid values.
    """
    match = _FAST_LINE_RE.match(line.rstrip("\r\n"))
    if match is None:
        raise AlertParseError("line does not match the fast-alert shape", ref)
    (
        month,
        day,
        hour,
        minute,
        second,
        micros,
        gid,
        sid,
        rev,
        msg,
        category,
        priority,
        proto,
        src_text,
        dst_text,
    ) = match.groups()

    try:
        timestamp = datetime(
            assumed_year,
            int(month),
            int(day),
            int(hour),
            int(minute),
            int(second),
            int(micros),
            tzinfo=timezone.utc,
        )
    except ValueError as exc:
        raise AlertParseError(f"invalid timestamp: {exc}", ref) from None

    protocol = proto.upper()
    src_ip, src_port = _split_endpoint(src_text, protocol, ref)
    dst_ip, dst_port = _split_endpoint(dst_text, protocol, ref)

    return NormalizedAlert(
        timestamp=timestamp,
        src_ip=src_ip,
        src_port=src_port,
        dst_ip=dst_ip,
        dst_port=dst_port,
        protocol=protocol,
        generator_id=int(gid),
        signature_id=int(sid),
        revision=int(rev),
        signature_msg=msg,
        category=category if category else None,
        severity=int(priority) if priority is not None else None,
        source_format=SNORT_FAST_FORMAT,
        raw_ref=ref,
    )


def render_eve_record(alert: NormalizedAlert) -> str:
    """Render a normalized alert back into an EVE JSON line.

    Reparsing the result recovers the alert field-for-field (provenance
    aside); used for export and for cross-format fixtures.
    """
    record: dict[str, Any] = {
        "timestamp": alert.timestamp.isoformat(),
        "event_type": "alert",
        "src_ip": alert.src_ip,
    }
    if alert.src_port is not None:
        record["src_port"] = alert.src_port
    record["dest_ip"] = alert.dst_ip
    if alert.dst_port is not None:
        record["dest_port"] = alert.dst_port
    record["proto"] = alert.protocol
    alert_obj: dict[str, Any] = {
        "gid": alert.generator_id,
        "signature_id": alert.signature_id,
        "rev": alert.revision,
        "signature": alert.signature_msg,
    }
    if alert.category is not None:
        alert_obj["category"] = alert.category
    if alert.severity is not None:
        alert_obj["severity"] = alert.severity
    record["alert"] = alert_obj
    return json.dumps(record, separators=(",", ":"))


def render_snort_fast_line(alert: NormalizedAlert) -> str:
    """Render a normalized alert as a Snort fast-alert line (year dropped)."""
    ts = alert.timestamp.astimezone(timezone.utc)
    stamp = ts.strftime("%m/%d-%H:%M:%S.%f")
    sig = f"[{alert.generator_id}:{alert.signature_id}:{alert.revision}]"
    parts = [f"{stamp}  [**] {sig} {alert.signature_msg} [**]"]
    if alert.category is not None:
        parts.append(f"[Classification: {alert.category}]")
    if alert.severity is not None:
        parts.append(f"[Priority: {alert.severity}]")
    src = alert.src_ip if alert.src_port is None else f"{alert.src_ip}:{alert.src_port}"
    dst = alert.dst_ip if alert.dst_port is None else f"{alert.dst_ip}:{alert.dst_port}"
    parts.append(f"{{{alert.protocol}}} {src} -> {dst}")
    return " ".join(parts)


def _line_iter(source: Any) -> tuple[Iterator[str], str]:
    """Lines plus a display name for any supported source kind."""
    if isinstance(source, (str, Path)):
        path = Path(source)
        fh = open(path, "r", encoding="utf-8", errors="replace")
        return fh, path.name
    if isinstance(source, (bytes, bytearray)):
        return iter(source.decode("utf-8", errors="replace").splitlines()), "<bytes>"
    if isinstance(source, io.RawIOBase) or isinstance(source, io.BufferedIOBase):
        wrapped = io.TextIOWrapper(source, encoding="utf-8", errors="replace")
        return wrapped, getattr(source, "name", "<stream>") or "<stream>"
    if hasattr(source, "read"):
        return iter(source), getattr(source, "name", "<stream>") or "<stream>"
    return iter(source), "<stream>"


def read_alert_stream(
    source: str | Path | IO | Iterable[str] | bytes,
    fmt: str = "auto",
    assumed_year: int | None = None,
    *,
    source_name: str | None = None,
) -> tuple[Iterator[NormalizedAlert], IngestStats]:
    """Stream alerts out of a file, file object, or iterable of lines.

    Returns an iterator plus the stats object it fills in while consumed.
    Malformed records are counted and sampled, never fatal; blank lines are
    not records. ``fmt`` is ``"eve"``, ``"snort_fast"``, or ``"auto"``
    (first non-empty line starting with ``{`` means EVE). The fast format
    requires ``assumed_year``.
    """
    if fmt not in (EVE_FORMAT, SNORT_FAST_FORMAT, "auto"):
        raise ValueError(f"unknown format {fmt!r}")
    lines, detected_name = _line_iter(source)
    name = source_name or detected_name
    stats = IngestStats()

    def generate() -> Iterator[NormalizedAlert]:
        resolved = None if fmt == "auto" else fmt
        try:
            for index, line in enumerate(lines, start=1):
                stripped = line.strip()
                if not stripped:
                    continue
                if resolved is None:
                    resolved = EVE_FORMAT if stripped.startswith("{") else SNORT_FAST_FORMAT
                    if resolved == SNORT_FAST_FORMAT and assumed_year is None:
                        raise FormatDetectionError(
                            "snort_fast input needs assumed_year (the format has no year field)"
                        )
                ref = RawRef(name, index)
                stats.records_seen += 1
                try:
                    if resolved == EVE_FORMAT:
                        alert = parse_eve_record(stripped, ref=ref)
                        if alert is None:
                            stats.non_alert_skipped += 1
                            continue
                    else:
                        alert = parse_snort_fast_line(stripped, assumed_year, ref=ref)
                except AlertParseError as exc:
                    stats.record_error(ref, str(exc.args[0] if exc.args else exc))
                    continue
                stats.alerts_emitted += 1
                yield alert
        finally:
            if hasattr(lines, "close"):
                lines.close()

    if fmt == SNORT_FAST_FORMAT and assumed_year is None:
        raise FormatDetectionError(
            "snort_fast input needs assumed_year (the format has no year field)"
        )
    return generate(), stats
