import pytest

from qsspi.acquisition import RunConfig
from qsspi.adversary import AttackSpec
from qsspi.scene import builtin_glyph


def partial_config(true="F", fraud="mirrored-L", ratio=1000, variant="partial_intercept_resend", n=5, **kw):
    side = 2**n
    attack = AttackSpec(variant, fraud_scene=builtin_glyph(fraud, side), intensity_ratio=ratio)
    return RunConfig(resolution_exponent=n, attack=attack, **kw), builtin_glyph(true, side)


@pytest.fixture
def f8_partial():
    return partial_config()


# criterion number -> (passed, detail); filled by test_acceptance.py
ACCEPTANCE: dict[int, tuple[bool, str]] = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(ACCEPTANCE):
        passed, detail = ACCEPTANCE[number]
        terminalreporter.write_line(f"criterion {number:2d}: {'PASS' if passed else 'FAIL'}  {detail}")
