import numpy as np

from allagmatic.ca import INITIAL_STATE, TARGET_STATE, CAConfig, build_ca
from allagmatic.io import format_trace, read_pgm, read_trace, to_pgm


def rule110_trace():
    return build_ca(CAConfig(), 110, INITIAL_STATE).run(15)


def test_trace_text():
    trace = rule110_trace()
    text = format_trace(trace, {"rule": 110})
    lines = text.splitlines()
    assert lines[0] == "# rule: 110"
    assert lines[1] == INITIAL_STATE and lines[-1] == TARGET_STATE
    assert len(lines) == 17
    np.testing.assert_array_equal(read_trace(text), trace.snapshots)


def test_pgm_layout():
    trace = rule110_trace()
    data = to_pgm(trace, {"rule": 110})
    assert data.startswith(b"P5\n# ")
    assert b"\n31 16\n255\n" in data
    pixels = data[-31 * 16 :]
    assert pixels[15] == 0 and pixels[0] == 255  # 1 is black, 0 is white
    np.testing.assert_array_equal(read_pgm(data), trace.snapshots)


def test_pgm_without_comment():
    rows = np.array([[0, 1], [1, 1]], dtype=np.uint8)
    assert to_pgm(rows) == b"P5\n2 2\n255\n" + bytes([255, 0, 0, 0])
