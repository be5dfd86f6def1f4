import math
import re
import xml.etree.ElementTree as ET
from datetime import date
from pathlib import Path

import pytest

from corpustrends.compare import LinkageTree, Projection2D
from corpustrends.report import (
    RenderSpec,
    render_dendrogram_svg,
    render_scatter_svg,
    render_trend_table,
    render_volcano_csv,
    render_volcano_svg,
)
from corpustrends.trends import TargetSpec, TimeBucket
from corpustrends.volcano import VolcanoRecord, WeightedStats

FIXTURES = Path(__file__).parent / "fixtures"


def sample_table():
    buckets = [
        TimeBucket("2017 S1", date(2017, 1, 1), date(2017, 7, 1)),
        TimeBucket("2017 S2", date(2017, 7, 1), date(2018, 1, 1)),
    ]
    table = {
        ("2017 S1", "transformer"): {
            "large language model": 12.5,
            "attention mechanism": 7.0,
            "neural network": 7.0,
            "translation": 2.3,
        },
        ("2017 S2", "transformer"): {"encryption": 1.0},
    }
    return table, buckets


def vrec(term, count, fc, p, df=5):
    return VolcanoRecord(
        term=term,
        log2_fc=fc,
        p_value=p,
        stats=WeightedStats(mean=0.0, std=0.0, n_min=df + 1, df=df),
        target_count=count,
        reference_count=0,
    )


class TestRenderTrendTable:
    def test_matches_golden_bytes(self):
        table, buckets = sample_table()
        md, csv_text = render_trend_table(table, TargetSpec("transformer"), buckets)
        assert md.encode("utf-8") == (FIXTURES / "golden_trend_table.md").read_bytes()
        assert csv_text.encode("utf-8") == (FIXTURES / "golden_trend_table.csv").read_bytes()

    def test_nan_cells_fill_short_rows(self):
        table, buckets = sample_table()
        md, _ = render_trend_table(table, TargetSpec("transformer"), buckets)
        last_row = md.strip().splitlines()[-1]
        assert last_row.count("(nan)") == 4

    def test_bucket_with_no_data_all_nan(self):
        _, buckets = sample_table()
        md, csv_text = render_trend_table({}, TargetSpec("transformer"), buckets)
        for row in md.strip().splitlines()[4:]:
            assert row.count("(nan)") == 5
        assert csv_text == "bucket,target,term,score\n"

    def test_scores_one_decimal(self):
        table = {("2017 S1", "t"): {"a": 1.2345}}
        buckets = [TimeBucket("2017 S1", date(2017, 1, 1), date(2017, 7, 1))]
        md, csv_text = render_trend_table(table, TargetSpec("t"), buckets)
        assert "a (1.2)" in md
        assert ",1.2\n" in csv_text

    def test_empty_buckets_rejected(self):
        with pytest.raises(ValueError):
            render_trend_table({}, TargetSpec("t"), [])

    def test_byte_deterministic(self):
        table, buckets = sample_table()
        a = render_trend_table(table, TargetSpec("transformer"), buckets)
        b = render_trend_table(dict(reversed(list(table.items()))), TargetSpec("transformer"), buckets)
        assert a == b


def circle_centers(svg):
    root = ET.fromstring(svg)
    ns = "{http://www.w3.org/2000/svg}"
    return [
        (float(c.get("cx")), float(c.get("cy")))
        for c in root.iter(f"{ns}circle")
    ]


def guide_lines(svg):
    root = ET.fromstring(svg)
    ns = "{http://www.w3.org/2000/svg}"
    return [
        (float(l.get("x1")), float(l.get("y1")), float(l.get("x2")), float(l.get("y2")))
        for l in root.iter(f"{ns}line")
    ]


class TestRenderVolcanoSvg:
    def test_valid_xml(self):
        svg = render_volcano_svg([vrec("a", 5, 2.0, 0.01)], {"a"}, 0.05, 1.0)
        ET.fromstring(svg)

    def test_p_one_sits_on_zero_baseline(self):
        records = [vrec("flat", 5, 0.0, 1.0), vrec("hot", 5, 3.0, 1e-6)]
        svg = render_volcano_svg(records, {"hot"}, 0.05, 1.0)
        centers = circle_centers(svg)
        # -log10(1) = 0 is the y-minimum, so "flat" renders at the bottom of
        # the plot area (largest cy).
        assert centers[0][1] == max(c[1] for c in centers)

    def test_point_at_threshold_lies_on_guide_lines(self):
        records = [vrec("edge", 5, 1.0, 0.05), vrec("other", 5, 3.0, 1e-4)]
        svg = render_volcano_svg(records, set(), 0.05, 1.0)
        (vertical, horizontal) = guide_lines(svg)
        edge = circle_centers(svg)[0]
        assert edge[0] == pytest.approx(vertical[0], abs=0.02)
        assert edge[1] == pytest.approx(horizontal[1], abs=0.02)

    def test_specific_terms_colored_red(self):
        svg = render_volcano_svg(
            [vrec("hot", 5, 3.0, 1e-4), vrec("cold", 5, 0.0, 0.9)], {"hot"}, 0.05, 1.0
        )
        fills = re.findall(r'circle[^>]*fill="(#\w{6})"', svg)
        assert fills == ["#d62728", "#1f77b4"]

    def test_byte_deterministic(self):
        records = [vrec("a", 5, 2.0, 0.01), vrec("b", 7, -0.5, 0.4)]
        assert render_volcano_svg(records, {"a"}, 0.05, 1.0) == render_volcano_svg(
            records, {"a"}, 0.05, 1.0
        )

    def test_no_records_rejected(self):
        with pytest.raises(ValueError):
            render_volcano_svg([], set(), 0.05, 1.0)


class TestRenderDendrogramSvg:
    def tree(self):
        return LinkageTree(
            leaf_labels=["a", "b", "c"], merges=[(0, 1, 0.2), (2, 3, 0.7)]
        )

    def test_valid_xml_with_leaf_labels(self):
        svg = render_dendrogram_svg(self.tree())
        root = ET.fromstring(svg)
        texts = [t.text for t in root.iter("{http://www.w3.org/2000/svg}text")]
        assert texts == ["a", "b", "c"]

    def test_one_bracket_per_merge(self):
        svg = render_dendrogram_svg(self.tree())
        assert svg.count("<polyline") == 2

    def test_higher_merge_drawn_higher(self):
        svg = render_dendrogram_svg(self.tree())
        ys = [
            min(float(p.split(",")[1]) for p in pl.split('points="')[1].split('"')[0].split())
            for pl in svg.split("\n")
            if "<polyline" in pl
        ]
        # Smaller y pixel means higher on screen; the 0.7 merge is above 0.2.
        assert ys[1] < ys[0]


class TestRenderScatterSvg:
    def proj(self):
        return Projection2D(
            points={"alpha": (0.0, 0.0), "beta": (1.0, 1.0), "gamma": (2.0, 0.5)},
            method="linear",
        )

    def test_valid_xml(self):
        ET.fromstring(render_scatter_svg(self.proj()))

    def test_category_colors_and_legend(self):
        labels = {"alpha": "cs.CR", "beta": "cs.NI", "gamma": "cs.CR"}
        svg = render_scatter_svg(self.proj(), labels)
        root = ET.fromstring(svg)
        ns = "{http://www.w3.org/2000/svg}"
        legend = [t.text for t in root.iter(f"{ns}text")]
        assert legend == ["cs.CR", "cs.NI"]
        fills = [c.get("fill") for c in root.iter(f"{ns}circle")]
        # Points emitted in sorted term order: alpha, beta, gamma.
        assert fills[0] == fills[2] != fills[1]

    def test_xml_escaping(self):
        proj = Projection2D(points={'a<b>&"c': (0.0, 0.0), "x": (1.0, 1.0), "y": (0.5, 0.5)}, method="linear")
        svg = render_scatter_svg(proj)
        ET.fromstring(svg)
        assert "&lt;b&gt;" in svg

    def test_byte_deterministic_under_dict_order(self):
        p1 = self.proj()
        p2 = Projection2D(points=dict(reversed(list(p1.points.items()))), method="linear")
        assert render_scatter_svg(p1) == render_scatter_svg(p2)

    def test_empty_rejected(self):
        with pytest.raises(ValueError):
            render_scatter_svg(Projection2D(points={}, method="linear"))


class TestRenderVolcanoCsv:
    def test_columns_and_flag(self):
        csv_text = render_volcano_csv(
            [vrec("a", 5, 2.0, 0.01), vrec("b", 3, 0.1, 0.9)], {"a"}
        )
        lines = csv_text.splitlines()
        assert lines[0] == "term,count,log2_fc,p_value,df,specific"
        assert lines[1].startswith("a,5,2,") and lines[1].endswith(",5,1")
        assert lines[2].endswith(",5,0")


class TestRenderSpec:
    def test_invalid_dimensions(self):
        with pytest.raises(ValueError):
            RenderSpec(width=0)


class TestAllSvgsParse:
    def test_every_renderer_output_is_wellformed(self):
        svgs = [
            render_volcano_svg([vrec("a", 5, 2.0, 0.01)], {"a"}, 0.05, 1.0),
            render_dendrogram_svg(LinkageTree(["x", "y"], [(0, 1, 0.5)])),
            render_scatter_svg(
                Projection2D({"a": (0, 0), "b": (1, 1), "c": (2, 2)}, "linear")
            ),
        ]
        for svg in svgs:
            root = ET.fromstring(svg)
            assert root.tag.endswith("svg")
            assert root.get("version") == "1.1"
