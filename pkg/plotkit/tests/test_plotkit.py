"""plotkit tests, including the secondary acceptance checks:

- sd_log and density_iterates render from the decay-figure run, and the
  plotted point values equal summaries.csv bit-exactly;
- the cobweb plot marks 0.17267 for (j=4, k=5);
- rendering never mutates the artifacts and is idempotent.
"""

import hashlib
from pathlib import Path

import numpy as np
import pytest

from plotkit import PlotSpec, read_summaries, render
from plotkit.artifacts import ArtifactError

FIXTURES = Path(__file__).parent / "fixtures"
SD_RUN = FIXTURES / "run_sd_small"
POINTMASS_RUN = FIXTURES / "run_pointmass"
CIRCLE_RUN = FIXTURES / "run_circle"
TABLE = FIXTURES / "binomial_table_k5.csv"


def _tree_digest(root: Path) -> str:
    h = hashlib.sha256()
    for p in sorted(root.rglob("*")):
        if p.is_file():
            h.update(p.name.encode())
            h.update(p.read_bytes())
    return h.hexdigest()


class TestSdLog:
    def test_values_bit_exact_passthrough(self, tmp_path):
        out = tmp_path / "sd.png"
        result = render(PlotSpec(run_dir=str(SD_RUN), kind="sd_log", out_path=str(out)))
        assert out.exists()
        csv_sds = [float(line.split(",")[2]) for line in (SD_RUN / "summaries.csv").read_text().strip().splitlines()[1:]]
        assert result.series["sd"] == csv_sds  # float equality: pure pass-through
        assert result.series["generation"] == list(range(len(csv_sds)))

    def test_artifact_not_mutated_and_idempotent(self, tmp_path):
        before = _tree_digest(SD_RUN)
        a = render(PlotSpec(run_dir=str(SD_RUN), kind="sd_log", out_path=str(tmp_path / "a.png")))
        b = render(PlotSpec(run_dir=str(SD_RUN), kind="sd_log", out_path=str(tmp_path / "b.png")))
        assert _tree_digest(SD_RUN) == before
        assert a.series == b.series


class TestDensityIterates:
    def test_renders_all_iterates(self, tmp_path):
        out = tmp_path / "dens.png"
        result = render(PlotSpec(run_dir=str(SD_RUN), kind="density_iterates", out_path=str(out)))
        assert out.exists()
        assert result.series["iterates"] == list(range(7))
        assert not result.warnings

    def test_sd_column_passthrough(self, tmp_path):
        result = render(
            PlotSpec(run_dir=str(SD_RUN), kind="density_iterates", out_path=str(tmp_path / "d.png"))
        )
        summ = read_summaries(SD_RUN)
        assert result.series["sd"] == summ["sd"]

    def test_iterate_selection(self, tmp_path):
        result = render(
            PlotSpec(
                run_dir=str(SD_RUN), kind="density_iterates",
                out_path=str(tmp_path / "d.png"), iterates=(0, 3, 6),
            )
        )
        assert result.series["iterates"] == [0, 3, 6]

    def test_missing_iterate_rejected(self, tmp_path):
        with pytest.raises(ArtifactError):
            render(
                PlotSpec(
                    run_dir=str(SD_RUN), kind="density_iterates",
                    out_path=str(tmp_path / "d.png"), iterates=(99,),
                )
            )

    def test_point_mass_histogram_fallback(self, tmp_path):
        result = render(
            PlotSpec(run_dir=str(POINTMASS_RUN), kind="density_iterates", out_path=str(tmp_path / "p.png"))
        )
        assert result.path.exists()
        assert any("histogram" in w for w in result.warnings)


class TestCobweb:
    def test_marks_p_crit_for_4_5(self, tmp_path):
        out = tmp_path / "cobweb.svg"
        result = render(
            PlotSpec(
                run_dir=None, kind="cobweb", out_path=str(out),
                j=4, k=5, table_csv=str(TABLE),
            )
        )
        assert out.exists()
        marked = result.series["p_crit_marked"]
        assert marked == pytest.approx(0.17267, abs=5e-6)
        # the mark is read from the table artifact, never recomputed
        table_value = [
            line for line in TABLE.read_text().splitlines() if line.startswith("5,4,")
        ][0].split(",")[3]
        assert marked == float(table_value)

    def test_identity_fixed_points_on_curve(self, tmp_path):
        result = render(
            PlotSpec(run_dir=None, kind="cobweb", out_path=str(tmp_path / "c.png"), j=2, k=2)
        )
        grid = np.array(result.series["grid"])
        curve = np.array(result.series["map"])
        mid = np.argmin(np.abs(grid - 0.5))
        assert curve[0] == 0.0 and curve[-1] == 1.0
        assert curve[mid] == pytest.approx(0.5, abs=1e-12)

    def test_requires_j_and_k(self, tmp_path):
        with pytest.raises(ValueError):
            PlotSpec(run_dir=None, kind="cobweb", out_path=str(tmp_path / "c.png"), j=4)

    def test_no_mark_without_table_entry(self, tmp_path):
        result = render(
            PlotSpec(
                run_dir=None, kind="cobweb", out_path=str(tmp_path / "c.png"),
                j=1, k=2, table_csv=str(TABLE),
            )
        )
        assert result.series["p_crit_marked"] is None
        assert result.warnings


class TestOtherKinds:
    def test_circle_density(self, tmp_path):
        result = render(
            PlotSpec(run_dir=str(CIRCLE_RUN), kind="circle_density", out_path=str(tmp_path / "c.png"))
        )
        assert result.path.exists()

    def test_distance_hist(self, tmp_path):
        result = render(
            PlotSpec(run_dir=str(SD_RUN), kind="distance_hist", out_path=str(tmp_path / "h.png"))
        )
        assert result.path.exists()

    def test_unknown_kind(self, tmp_path):
        with pytest.raises(ValueError):
            PlotSpec(run_dir=str(SD_RUN), kind="scatter3d", out_path=str(tmp_path / "x.png"))


class TestCli:
    def test_render_cli(self, tmp_path, capsys):
        from plotkit.cli import main

        out = tmp_path / "sd.png"
        code = main(["render", "--run", str(SD_RUN), "--kind", "sd_log", "--out", str(out)])
        assert code == 0
        assert out.exists()

    def test_missing_run_exit_3(self, tmp_path, capsys):
        from plotkit.cli import main

        code = main(
            ["render", "--run", str(tmp_path / "nope"), "--kind", "sd_log", "--out", str(tmp_path / "x.png")]
        )
        assert code == 3
