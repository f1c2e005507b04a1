"""Direct rendering checks; the CLI tests cover the end-to-end path."""

import xml.etree.ElementTree as ET

import numpy as np
import pytest

from planesep import DimensionMismatchError, repository, svgplot
from planesep.svgplot import _clip_plane_to_box

NS = "{http://www.w3.org/2000/svg}"


class TestClipping:
    def test_diagonal_line(self):
        seg = _clip_plane_to_box(np.array([-1.0 / 4.5, -1.0 / 4.5]), 9.0)
        assert seg is not None
        (x0, y0), (x1, y1) = seg
        for x, y in ((x0, y0), (x1, y1)):
            assert 0 <= x <= 9 and 0 <= y <= 9
            assert abs(1.0 - x / 4.5 - y / 4.5) < 1e-9

    def test_vertical_line(self):
        seg = _clip_plane_to_box(np.array([-0.5, 0.0]), 9.0)
        assert seg is not None
        assert all(abs(p[0] - 2.0) < 1e-9 for p in seg)

    def test_horizontal_line(self):
        seg = _clip_plane_to_box(np.array([0.0, -0.25]), 9.0)
        assert seg is not None
        assert all(abs(p[1] - 4.0) < 1e-9 for p in seg)

    def test_line_outside_box(self):
        assert _clip_plane_to_box(np.array([0.05, 0.05]), 9.0) is None


class TestRender:
    def test_marker_positions_match_digits(self):
        repo = repository.build([37], 2, 0)
        root = ET.fromstring(svgplot.render_svg(repo))
        (circle,) = root.findall(f".//{NS}circle")
        # 37 maps to (7, 3): x pixel 40 + 7*48, y pixel 40 + (9-3)*48
        assert float(circle.get("cx")) == pytest.approx(40 + 7 * 48)
        assert float(circle.get("cy")) == pytest.approx(40 + 6 * 48)

    def test_rejects_other_dimensions(self):
        repo = repository.build([5, 7, 11], 3, 0)
        with pytest.raises(DimensionMismatchError):
            svgplot.render_svg(repo)

    def test_output_is_parseable_svg(self):
        repo = repository.build([2, 3, 5, 7], 2, 1)
        root = ET.fromstring(svgplot.render_svg(repo))
        assert root.tag == f"{NS}svg"
        assert root.get("viewBox")
