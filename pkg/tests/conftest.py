"""Shared fixtures: named geometries are built once per session.

Everything downstream treats them as read-only; cochains derived from a
presentation are fresh objects, so sharing the geometry is safe.
"""

import pytest

from deligne import get_geometry


def _session_geometry(name):
    @pytest.fixture(scope="session", name=name.replace("-", "_"))
    def fixture():
        return get_geometry(name)

    return fixture


circle_2arc = _session_geometry("circle-2arc")
circle_3arc = _session_geometry("circle-3arc")
annulus = _session_geometry("annulus")
sphere_octahedron_2chart = _session_geometry("sphere-octahedron-2chart")
torus2_4chart = _session_geometry("torus2-4chart")
solid_torus = _session_geometry("solid-torus")
torus3_8chart = _session_geometry("torus3-8chart")
