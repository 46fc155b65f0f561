import json

import numpy as np
import pytest

from conftest import make_surface
from rmfruled.curve import CurveDef
from rmfruled.frame import ExplicitTheta, RotationMinimizing
from rmfruled.invariants import base_curve_report
from rmfruled.mesh_io import (read_obj, samples_to_csv, tessellate, write_obj,
                              write_report)
from rmfruled.ruled import classify


@pytest.fixture(scope="module")
def strip():
    # nearly-straight base curve with a constant perpendicular ruling: a strip
    c = CurveDef.from_strings("s", "0.001*s^2", "0", 0, 1)
    return make_surface(c, ExplicitTheta.from_string("0"), "0", "0", "1")


def test_plane_strip_two_by_two(strip):
    mesh = tessellate(strip, 2, 2)
    assert mesh.vertices.shape == (4, 3)
    assert mesh.faces.shape == (2, 3)
    assert not mesh.flat_shaded
    n0 = mesh.normals[0]
    for n in mesh.normals:
        assert n == pytest.approx(n0, abs=5e-3)


def test_grid_counts(geodesic_example):
    mesh = tessellate(geodesic_example, 101, 11)
    assert mesh.vertices.shape == (101 * 11, 3)
    assert mesh.faces.shape == (100 * 10 * 2, 3)


def test_vertices_are_exact_surface_points(geodesic_example):
    mesh = tessellate(geodesic_example, 11, 5)
    s_vals = np.linspace(-5, 5, 11)
    v_vals = np.linspace(-1, 1, 5)
    for i, s in enumerate(s_vals):
        for j, v in enumerate(v_vals):
            assert np.array_equal(mesh.vertices[i * 5 + j],
                                  geodesic_example.point(float(s), float(v)))


def test_normals_unit_length(rmf_polynomial):
    mesh = tessellate(rmf_polynomial, 21, 7)
    for n in mesh.normals:
        assert n is not None
        assert np.linalg.norm(n) == pytest.approx(1.0, abs=1e-9)


def test_tangent_director_flags_flat_shaded(helix):
    surf = make_surface(helix, RotationMinimizing(0.0), "1", "0", "0")
    mesh = tessellate(surf, 11, 5)
    assert mesh.flat_shaded
    # the v = 0 column is the singular locus
    for i in range(11):
        assert mesh.normals[i * 5 + 2] is None


def test_face_indices_in_range(geodesic_example):
    mesh = tessellate(geodesic_example, 13, 6)
    assert mesh.faces.min() >= 0
    assert mesh.faces.max() < len(mesh.vertices)


def test_faces_ccw_wrt_normals(strip):
    mesh = tessellate(strip, 6, 4)
    for tri in mesh.faces:
        a, b, c = (mesh.vertices[k] for k in tri)
        n = np.mean([mesh.normals[k] for k in tri], axis=0)
        assert float(np.dot(np.cross(b - a, c - a), n)) > 0


def test_obj_single_triangle_counts(strip):
    mesh = tessellate(strip, 2, 2)
    text = write_obj(mesh)
    lines = text.splitlines()
    assert sum(1 for l in lines if l.startswith("v ")) == 4
    assert sum(1 for l in lines if l.startswith("vn ")) == 4
    assert sum(1 for l in lines if l.startswith("f ")) == 2


def test_obj_write_parse_write_idempotent(rmf_polynomial):
    mesh = tessellate(rmf_polynomial, 9, 5)
    text = write_obj(mesh)
    assert write_obj(read_obj(text)) == text


def test_obj_deterministic(geodesic_example):
    m1 = tessellate(geodesic_example, 21, 5)
    m2 = tessellate(geodesic_example, 21, 5)
    assert write_obj(m1) == write_obj(m2)


# ---------------------------------------------------------------------------
# reports


def test_csv_geodesic_column(geodesic_example):
    grid = [s for s in np.linspace(-5, 5, 51) if abs(s) > 1e-6]
    rep = base_curve_report(geodesic_example, grid)
    text = samples_to_csv(rep.samples)
    lines = text.splitlines()
    header = lines[0].split(",")
    k_g_idx = header.index("k_g")
    for line in lines[1:]:
        assert abs(float(line.split(",")[k_g_idx])) < 1e-9


def test_csv_distribution_parameter_zero_for_tangent(helix):
    surf = make_surface(helix, RotationMinimizing(0.0), "1", "0", "0")
    rep = base_curve_report(surf, np.linspace(-4, 4, 21))
    text = samples_to_csv(rep.samples)
    header, *rows = text.splitlines()
    p_idx = header.split(",").index("P")
    for row in rows:
        assert abs(float(row.split(",")[p_idx])) < 1e-12


def test_csv_empty_grid_header_only(helix):
    surf = make_surface(helix, RotationMinimizing(0.0), "1", "0", "0")
    rep = base_curve_report(surf, [])
    text = samples_to_csv(rep.samples)
    assert text == samples_to_csv([])
    assert text.splitlines()[0].startswith("s,kappa,tau")
    assert len(text.splitlines()) == 1


def test_json_report_schema(rmf_polynomial):
    rep = classify(rmf_polynomial, 21, 5)
    doc = json.loads(write_report(rep, [], "json"))
    assert doc["schema_version"] == 1
    assert doc["verdict"] in ("yes", "no", "borderline")
    assert "max_abs_det" in doc and "special_case" in doc


def test_write_report_rejects_unknown_format(rmf_polynomial):
    with pytest.raises(ValueError):
        write_report(None, [], "xml")
