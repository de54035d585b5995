import sys

import pytest

from onsim.config import from_dict

W_AP = {"kind": "WLAN_G", "power_w": 0.03, "rate_bps": 54000000, "range_m": 100.0}
W_MT = {"kind": "WLAN_G", "power_w": 0.02, "rate_bps": 54000000, "range_m": 80.0}


def small_raw(**over):
    """AP, one consumer at 90 m and two static relays halfway."""
    raw = {
        "name": "small", "horizon_s": 4.0, "phases": [[0.0, 3]],
        "nodes": [
            {"id": "ap", "role": "ap", "position": [0, 0], "interfaces": [W_AP]},
            {"id": "c1", "role": "consumer", "position": [90, 0], "interfaces": [W_MT]},
            {"id": "ma", "role": "relay", "position": [40, 5], "interfaces": [W_MT]},
            {"id": "mb", "role": "relay", "position": [40, -5], "interfaces": [W_MT]},
        ],
        "flows": [{"kind": "VOIP_G711", "src": "c1", "dst": "core"}],
        "cms": {"policies": [{"name": "cov", "trigger": "CoverageGap"}]},
    }
    raw.update(over)
    return raw


@pytest.fixture
def small_cfg():
    return from_dict(small_raw())


def pytest_terminal_summary(terminalreporter):
    acceptance = sys.modules.get("test_acceptance")
    if acceptance is None or not acceptance.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for name in sorted(acceptance.RESULTS, key=lambda k: int(k[1:])):
        ok, detail = acceptance.RESULTS[name]
        terminalreporter.write_line(f"{name} {'PASS' if ok else 'FAIL'}: {detail}")
