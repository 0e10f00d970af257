"""
Unit tests for synthetic mesh generation
"""
import numpy as np
import pytest

from services.ricci.app.curvature import full_report
from services.ricci.app.errors import UsageError
from services.ricci.app.fileio import parse_trajectory, serialize_trajectory
from services.ricci.app.meshgen import bernoulli_pressure, generate, potential_flow_velocity
from services.ricci.app.models import NodeType
from services.ricci.app.schemas import MeshSpec, Obstacle

pytestmark = pytest.mark.unit

OBSTACLE = Obstacle(center_x=0.5, center_y=0.5, radius=0.12)


def refined_spec(**overrides):
    values = {"nx": 40, "ny": 16, "obstacle": OBSTACLE, "refine_radius": 0.2}
    values.update(overrides)
    return MeshSpec(**values)


class TestStructuredGrid:
    """Test the unrefined generator"""

    def test_interior_degree_six(self):
        """Test that every interior node has six neighbours"""
        g = generate(MeshSpec(nx=12, ny=8)).frames[0]
        interior = g.node_type == int(NodeType.INTERIOR)
        assert interior.sum() == 11 * 7
        assert set(g.degrees[interior].tolist()) == {6}

    def test_node_count(self):
        """Test the node and cell counts of a plain grid"""
        g = generate(MeshSpec(nx=4, ny=3)).frames[0]
        assert g.node_count == 5 * 4
        assert len(g.cells) == 2 * 4 * 3

    def test_boundary_tags(self):
        """Test inlet, outlet and wall tags with walls winning at corners"""
        g = generate(MeshSpec(nx=4, ny=4)).frames[0]
        x, y = g.positions[:, 0], g.positions[:, 1]
        assert set(g.node_type[(x == 0.0) & (y > 0.0) & (y < 1.0)].tolist()) == {int(NodeType.INLET)}
        assert set(g.node_type[(x == 2.5) & (y > 0.0) & (y < 1.0)].tolist()) == {int(NodeType.OUTLET)}
        assert set(g.node_type[(y == 0.0) | (y == 1.0)].tolist()) == {int(NodeType.WALL)}

    def test_uniform_flow_without_obstacle(self):
        """Test that the field is the free stream without an obstacle"""
        g = generate(MeshSpec(nx=4, ny=4, inflow_speed=2.0)).frames[0]
        assert np.allclose(g.velocity, [2.0, 0.0])
        assert np.allclose(g.pressure, 0.0)


class TestObstacle:
    """Test the cut-out disk and its flow field"""

    def test_no_nodes_inside(self):
        """Test that the disk interior is empty"""
        g = generate(MeshSpec(nx=40, ny=16, obstacle=OBSTACLE)).frames[0]
        distance = np.linalg.norm(g.positions - [0.5, 0.5], axis=1)
        assert distance.min() >= OBSTACLE.radius - 1e-12

    def test_ring_tagged_and_on_circle(self):
        """Test that obstacle nodes sit on the circle"""
        g = generate(MeshSpec(nx=40, ny=16, obstacle=OBSTACLE)).frames[0]
        ring = g.node_type == int(NodeType.OBSTACLE)
        assert ring.sum() > 0
        distance = np.linalg.norm(g.positions[ring] - [0.5, 0.5], axis=1)
        assert distance == pytest.approx(OBSTACLE.radius, abs=1e-12)

    def test_radial_velocity_vanishes_on_ring(self):
        """Test the no-penetration condition on the obstacle"""
        g = generate(refined_spec()).frames[0]
        ring = g.node_type == int(NodeType.OBSTACLE)
        offset = g.positions[ring] - [0.5, 0.5]
        radial = np.sum(g.velocity[ring] * offset, axis=1) / np.linalg.norm(offset, axis=1)
        assert np.abs(radial).max() < 1e-9

    def test_far_field(self):
        """Test that the field tends to the free stream far away"""
        velocity = potential_flow_velocity(np.array([[1e6, 1e6], [-1e6, 3e5]]), 1.5, OBSTACLE)
        assert velocity == pytest.approx(np.array([[1.5, 0.0], [1.5, 0.0]]), abs=1e-9)

    def test_divergence_free(self):
        """Test that the analytic field is divergence free away from the disk"""
        h = 1e-5
        points = np.array([[0.1, 0.2], [0.9, 0.8], [1.5, 0.5], [0.5, 0.9]])
        dx = (potential_flow_velocity(points + [h, 0], 1.0, OBSTACLE)[:, 0]
              - potential_flow_velocity(points - [h, 0], 1.0, OBSTACLE)[:, 0]) / (2 * h)
        dy = (potential_flow_velocity(points + [0, h], 1.0, OBSTACLE)[:, 1]
              - potential_flow_velocity(points - [0, h], 1.0, OBSTACLE)[:, 1]) / (2 * h)
        assert np.abs(dx + dy).max() < 1e-5

    def test_bernoulli(self):
        """Test pressure from the Bernoulli relation"""
        pressure = bernoulli_pressure(np.array([[1.0, 0.0], [0.0, 2.0]]), 1.0)
        assert pressure.tolist() == [0.0, -1.5]

    def test_obstacle_must_fit(self):
        """Test that an obstacle crossing the boundary is rejected"""
        spec = MeshSpec(nx=10, ny=4, obstacle=Obstacle(center_x=0.5, center_y=0.5, radius=0.6))
        with pytest.raises(UsageError, match="does not fit"):
            generate(spec)


class TestRefinement:
    """Test refinement around the obstacle"""

    def test_degree_heterogeneity(self):
        """Test that refinement creates degrees above and below six"""
        g = generate(refined_spec()).frames[0]
        interior = g.node_type == int(NodeType.INTERIOR)
        degrees = g.degrees[interior]
        assert degrees.max() > 6
        assert degrees.min() < 6

    def test_cells_stay_consistent(self):
        """Test that every refined cell side is an edge"""
        g = generate(refined_spec()).frames[0]
        for a, b, c in g.cells:
            assert g.has_edge(a, b) and g.has_edge(b, c) and g.has_edge(a, c)

    def test_lowest_curvature_near_obstacle(self):
        """Test that the most negative node curvature sits in the refined zone"""
        g = generate(refined_spec(nx=30, ny=12)).frames[0]
        report = full_report(g)
        interior = [i for i in report.node_curvature if g.node_type[i] == int(NodeType.INTERIOR)]
        lowest = min(interior, key=lambda i: (report.node_curvature[i], i))
        gap = np.linalg.norm(g.positions[lowest] - [0.5, 0.5]) - OBSTACLE.radius
        # bisected cells around the refined zone reach about two cell widths further out
        cell = np.hypot(2.5 / 30, 1.0 / 12)
        assert gap <= 0.2 + 2 * cell

    def test_refine_without_obstacle_ignored(self):
        """Test that a refinement radius alone leaves the grid plain"""
        plain = generate(MeshSpec(nx=6, ny=4)).frames[0]
        refined = generate(MeshSpec(nx=6, ny=4, refine_radius=0.3)).frames[0]
        assert plain.equals(refined)


class TestFrames:
    """Test multi-frame trajectories"""

    def test_static_frames(self):
        """Test that frames share topology and vary in speed"""
        t = generate(MeshSpec(nx=6, ny=4, frames=4))
        assert t.static_mesh and len(t) == 4
        speeds = [float(frame.velocity[:, 0].mean()) for frame in t.frames]
        assert speeds[0] == pytest.approx(1.0)
        assert speeds[1] == pytest.approx(1.1)
        assert speeds[3] == pytest.approx(0.9)

    def test_file_round_trip(self):
        """Test that a generated trajectory survives the file format bit-exactly"""
        t = generate(refined_spec(nx=12, ny=6, obstacle=Obstacle(center_x=0.6, center_y=0.5, radius=0.2), frames=2))
        text = serialize_trajectory(t)
        again = parse_trajectory(text)
        assert again.equals(t)
        assert serialize_trajectory(again) == text
