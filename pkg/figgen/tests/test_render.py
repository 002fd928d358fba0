import math
import os

import pytest

from figgen.cli import main
from figgen.reader import ENERGY_NEUTRAL, ReaderError, read_table
from figgen.render import FigureSpec, KindMismatchError, render

DATA = os.path.join(os.path.dirname(__file__), "data")


def golden(name):
    return os.path.join(DATA, name)


@pytest.mark.parametrize("kind", ["fig3", "fig4", "fig5"])
def test_render_all_kinds(kind, tmp_path):
    out = tmp_path / f"{kind}.png"
    info = render(FigureSpec(golden(f"{kind}_golden.csv"), kind, str(out)))
    assert out.exists() and out.stat().st_size > 0
    assert info.n_series > 0


@pytest.mark.parametrize("suffix", [".png", ".svg"])
def test_rerender_identical_bytes(suffix, tmp_path):
    a, b = tmp_path / f"a{suffix}", tmp_path / f"b{suffix}"
    for out in (a, b):
        render(FigureSpec(golden("fig4_golden.csv"), "fig4", str(out)))
    assert a.read_bytes() == b.read_bytes()


def test_energy_neutral_rows_become_markers(tmp_path):
    table = read_table(golden("fig4_golden.csv"))
    n_neutral = sum(1 for v in table.column("lifetime_years") if v is ENERGY_NEUTRAL)
    assert n_neutral > 0
    info = render(FigureSpec(golden("fig4_golden.csv"), "fig4",
                             str(tmp_path / "f4.png")))
    assert info.n_neutral_markers == n_neutral
    info5 = render(FigureSpec(golden("fig5_golden.csv"), "fig5",
                              str(tmp_path / "f5.png")))
    table5 = read_table(golden("fig5_golden.csv"))
    n5 = sum(1 for v in table5.column("lifetime_years") if v is ENERGY_NEUTRAL)
    assert info5.n_neutral_markers == n5


def test_unbounded_epp_flagged(tmp_path):
    table = read_table(golden("fig3_golden.csv"))
    n_inf = sum(1 for v in table.column("epp_j")
                if isinstance(v, float) and math.isinf(v))
    info = render(FigureSpec(golden("fig3_golden.csv"), "fig3",
                             str(tmp_path / "f3.png")))
    assert info.n_neutral_markers == n_inf > 0


def test_plotted_values_match_csv(tmp_path):
    # no recomputation: every drawn number exists in the source column
    table = read_table(golden("fig4_golden.csv"))
    finite = {v for v in table.column("lifetime_years") if isinstance(v, float)}
    info = render(FigureSpec(golden("fig4_golden.csv"), "fig4",
                             str(tmp_path / "f4.png")))
    drawn = {y for xs, ys in info.series.values() for y in ys}
    assert drawn <= finite


def test_kind_mismatch_is_hard_error(tmp_path):
    with pytest.raises(KindMismatchError):
        render(FigureSpec(golden("fig4_golden.csv"), "fig5", str(tmp_path / "x.png")))
    assert not (tmp_path / "x.png").exists()


def test_empty_csv_writes_nothing(tmp_path):
    src = tmp_path / "empty.csv"
    src.write_text("# figure_kind = fig4\nsf,t_w_s,lifetime_years,p_s\n")
    out = tmp_path / "out.png"
    with pytest.raises(ReaderError):
        render(FigureSpec(str(src), "fig4", str(out)))
    assert not out.exists()


def test_missing_columns(tmp_path):
    src = tmp_path / "cols.csv"
    src.write_text("# figure_kind = fig4\nsf,p_s\n9,0.5\n")
    with pytest.raises(ReaderError):
        render(FigureSpec(str(src), "fig4", str(tmp_path / "o.png")))


class TestCli:
    def test_render_ok(self, tmp_path, capsys):
        out = tmp_path / "f4.png"
        assert main(["render", "--kind", "fig4", "--csv", golden("fig4_golden.csv"),
                     "--out", str(out)]) == 0
        assert "series" in capsys.readouterr().out
        assert out.exists()

    def test_mismatch_exit_code(self, tmp_path):
        assert main(["render", "--kind", "fig3", "--csv", golden("fig4_golden.csv"),
                     "--out", str(tmp_path / "x.png")]) == 2

    def test_label_overrides(self, tmp_path):
        assert main(["render", "--kind", "fig5", "--csv", golden("fig5_golden.csv"),
                     "--out", str(tmp_path / "f5.svg"),
                     "--xlabel", "N", "--ylabel", "years"]) == 0
