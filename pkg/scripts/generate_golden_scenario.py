#!/usr/bin/env python3
"""Regenerate the checked-in two-attacker EVE scenario fixture.

Deterministic: a fixed seed and a fixed base time, no wall clock. The
scenario holds exactly 200 alert records plus 5 non-alert flow records:

  10.0.0.5   reconnaissance -> privilege escalation -> data exfiltration
  10.0.0.66  reconnaissance -> denial of service

Phases within one attacker are separated by quiet gaps longer than the
default 600 s episode threshold; the two attackers overlap in time so the
stream interleaves. All categories used are covered by the shipped
starter mapping.
"""

from __future__ import annotations

import json
import random
from datetime import datetime, timedelta, timezone
from pathlib import Path

BASE = datetime(2021, 3, 1, 8, 0, 0, tzinfo=timezone.utc)
OUT = Path(__file__).resolve().parent.parent / "tests" / "data" / "golden_scenario.eve.json"

SCAN_MSGS = [
    "ET SCAN Behavioral unusual port 445 traffic",
    "ET SCAN Rapid POP3 connections",
    "GPL SCAN superscan echo",
]
PROBE_MSGS = [
    "ET SCAN Potential VNC scan 5800-5820",
    "GPL RPC portmap listing TCP 111",
]
ADMIN_MSGS = [
    "ET EXPLOIT Possible SMBv1 admin share access",
    "GPL ATTACK_RESPONSE command completed banner",
]
LOGIN_MSGS = ["ET POLICY Incorrect admin login attempt"]
ROOT_MSGS = ["GPL TELNET root login prompt"]
SDF_MSGS = [
    "ET POLICY Outbound document transfer",
    "ET DATA Credit card number detected in clear",
]
DOS_MSGS = [
    "ET DOS SYN flood inbound",
    "ET DOS Excessive HTTP GET requests",
    "ET WEB_SERVER Slowloris header pattern",
]


def alert(ts, src, sport, dst, dport, sid, rev, msg, category, severity):
    return {
        "timestamp": ts.isoformat(),
        "event_type": "alert",
        "src_ip": src,
        "src_port": sport,
        "dest_ip": dst,
        "dest_port": dport,
        "proto": "TCP",
        "alert": {
            "gid": 1,
            "signature_id": sid,
            "rev": rev,
            "signature": msg,
            "category": category,
            "severity": severity,
        },
    }


def phase(rng, start, count, min_step, max_step, make):
    events = []
    offset = start
    for i in range(count):
        events.append(make(i, BASE + timedelta(seconds=round(offset, 6))))
        offset += rng.uniform(min_step, max_step)
    return events, offset


def main() -> None:
    rng = random.Random(20240814)
    events = []

    def sport():
        return rng.randint(32768, 61000)

    # Attacker A: 10.0.0.5
    recon_targets = ["192.168.1.20", "192.168.1.21", "192.168.1.22"]

    def a_recon(i, ts):
        if i % 2 == 0:
            msg, category, sid = rng.choice(SCAN_MSGS), "Detection of a Network Scan", 2010001 + i % 3
        else:
            msg, category, sid = rng.choice(PROBE_MSGS), "Attempted Information Leak", 2011001 + i % 2
        return alert(ts, "10.0.0.5", sport(), rng.choice(recon_targets),
                     rng.choice([22, 80, 139, 443, 445]), sid, 1 + i % 3, msg, category, 3)

    batch, end = phase(rng, 0.0, 30, 5, 18, a_recon)
    events += batch

    def a_priv(i, ts):
        if i >= 18:
            msg, category, sid, sev = rng.choice(ROOT_MSGS), "Successful Administrator Privilege Gain", 2021001, 1
        elif i % 5 == 4:
            msg, category, sid, sev = rng.choice(LOGIN_MSGS), "An attempted login using a suspicious username was detected", 2022001, 2
        else:
            msg, category, sid, sev = rng.choice(ADMIN_MSGS), "Attempted Administrator Privilege Gain", 2020001 + i % 4, 1
        return alert(ts, "10.0.0.5", sport(), "192.168.1.20", 22, sid, 1, msg, category, sev)

    batch, end = phase(rng, end + 900, 20, 3, 15, a_priv)
    events += batch

    def a_exfil(i, ts):
        return alert(ts, "10.0.0.5", sport(), "203.0.113.50", 443,
                     2030001 + i % 2, 2, rng.choice(SDF_MSGS),
                     "Sensitive Data was Transmitted Across the Network", 2)

    batch, _ = phase(rng, end + 1200, 15, 4, 20, a_exfil)
    events += batch

    # Attacker B: 10.0.0.66
    def b_recon(i, ts):
        if i % 2 == 0:
            msg, category, sid = rng.choice(SCAN_MSGS), "Detection of a Network Scan", 2010001 + i % 3
        else:
            msg, category, sid = rng.choice(PROBE_MSGS), "Attempted Information Leak", 2011001 + i % 2
        return alert(ts, "10.0.0.66", sport(), "192.168.1.30",
                     rng.choice([21, 25, 80, 8080]), sid, 2, msg, category, 3)

    batch, b_end = phase(rng, 120.0, 25, 6, 20, b_recon)
    events += batch

    def b_dos(i, ts):
        return alert(ts, "10.0.0.66", sport(), "192.168.1.30", 80,
                     2040001 + i % 5, 1, rng.choice(DOS_MSGS),
                     "Attempted Denial of Service", 2)

    batch, _ = phase(rng, b_end + 800, 110, 0.5, 3, b_dos)
    events += batch

    assert len(events) == 200

    for offset, src in [(50, "10.0.0.5"), (700, "10.0.0.66"), (1500, "10.0.0.5"),
                        (2500, "10.0.0.66"), (3500, "10.0.0.5")]:
        events.append({
            "timestamp": (BASE + timedelta(seconds=offset)).isoformat(),
            "event_type": "flow",
            "src_ip": src,
            "src_port": 55555,
            "dest_ip": "192.168.1.1",
            "dest_port": 53,
            "proto": "TCP",
            "flow": {"pkts_toserver": 4, "bytes_toserver": 320},
        })

    events.sort(key=lambda e: e["timestamp"])
    OUT.parent.mkdir(parents=True, exist_ok=True)
    with open(OUT, "w", encoding="utf-8") as fh:
        for event in events:
            fh.write(json.dumps(event, separators=(",", ":")) + "\n")
    print(f"wrote {len(events)} events -> {OUT}")


if __name__ == "__main__":
    main()
