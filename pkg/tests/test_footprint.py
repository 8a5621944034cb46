from regencodes import footprint
from regencodes.shares import CodeConfig


def test_nominal_sizes_at_running_example():
    sizes = {s: footprint.nominal_matrix_bytes(s, 32, 16, 16) for s in ("rs", "pm", "el", "rl")}
    assert sizes == {"rs": 1024, "pm": 2048, "el": 262144, "rl": 262144}


def test_actual_shapes():
    assert footprint.actual_matrix_shape(CodeConfig("rs", 32, 16)) == (32, 16)
    assert footprint.actual_matrix_shape(CodeConfig("pm", 32, 16, 30)) == (32, 30)
    assert footprint.actual_matrix_shape(CodeConfig("el", 32, 16, 30)) == (240, 480)
    assert footprint.actual_matrix_bytes(CodeConfig("rl", 32, 16, 30)) == 230400


def test_actual_matches_built_generator():
    from regencodes import linear

    cfg = CodeConfig("el", 8, 4, 6)
    code = linear.el_build(cfg)
    assert code.generator.nbytes == footprint.actual_matrix_bytes(cfg)


def test_table_rows():
    rows = footprint.footprint_table()
    assert [r["scheme"] for r in rows] == ["RS", "PM", "EL", "RL"]
    assert rows[1]["actual_shape"] == "32x30"
