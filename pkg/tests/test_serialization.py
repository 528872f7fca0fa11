from pathlib import Path

from jetframes.jetspace import JetContext, defining_equations_iterated
from jetframes.wronskian import (
    VARIANT_POWER,
    classical_wronskian,
    cramer_coefficients,
    power_wronskian,
)
from jetframes.frames import coordinate_field, shifted_coefficient_field

GOLDEN = Path(__file__).parent / "golden_serialization.txt"


def render_current() -> str:
    ctx = JetContext(2, 3)
    lines = ["# canonical serializations, parameters n=2 d=3"]
    lines.append("power_wronskian_chart1 = " + power_wronskian(1, ctx).to_text())
    lines.append("classical_wronskian = " + classical_wronskian(ctx).to_text())
    lines.append("order1_equation = " + defining_equations_iterated(ctx)[1].to_text())
    c = cramer_coefficients(VARIANT_POWER, (0, 1, 0), ctx, 1)
    lines.append("cramer_b1_alpha010 = " + c.b[1].to_text())
    lines.append("cramer_b2_alpha010 = " + c.b[2].to_text())
    lines.append("coordinate_field_2:")
    lines.append(coordinate_field(2, ctx).field.to_text())
    lines.append("shifted_field_a111_l111:")
    lines.append(shifted_coefficient_field((1, 1, 1), (1, 1, 1), ctx).field.to_text())
    return "\n".join(lines) + "\n"


def test_canonical_text_matches_golden_file():
    assert render_current() == GOLDEN.read_text()


def test_field_serialization_one_line_per_direction():
    ctx = JetContext(2, 3)
    f = coordinate_field(1, ctx)
    text = f.to_text()
    lines = text.splitlines()
    assert lines[0] == f.label
    assert len(lines) - 1 == len(f.field.coeffs)
    assert all(line.startswith("d/d") for line in lines[1:])
