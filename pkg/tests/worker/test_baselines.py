"""
Baseline rewiring tests (DIGL, SDRF, FoSR, BORF)
"""
import itertools

import numpy as np
import pytest

from services.ricci.app.curvature import full_report
from services.ricci.app.errors import DisconnectedGraphError, UsageError
from services.ricci.app.models import build_from_edges
from services.worker.worker_app.pool import Budget
from services.worker.worker_app.tasks_baselines import borf, digl, fosr, sdrf
from tests.conftest import complete_graph, cycle_graph, path_graph, random_connected_graph

pytestmark = pytest.mark.worker


def diffusion_oracle(g, alpha):
    """PPR diffusion by explicit matrix inverse."""
    n = g.node_count
    a_hat = np.eye(n)
    for i, j in g.edges:
        a_hat[i, j] = a_hat[j, i] = 1.0
    d = np.diag(1.0 / np.sqrt(a_hat.sum(axis=1)))
    return alpha * np.linalg.inv(np.eye(n) - (1.0 - alpha) * d @ a_hat @ d)


def disconnected_graph():
    return build_from_edges(np.zeros((4, 2)), [(0, 1), (2, 3)])


class TestDigl:
    """Test diffusion rewiring"""

    def test_full_teleport_adds_nothing(self):
        """Test that alpha = 1 leaves the graph unchanged"""
        result = digl(path_graph(5), alpha=1.0, eps=0.0)
        assert result.added == []

    def test_zero_threshold_adds_every_non_edge(self):
        """Test that eps = 0 closes a connected graph"""
        result = digl(path_graph(4), alpha=0.01, eps=0.0)
        assert sorted((s, r) for s, r, _ in result.added) == [(0, 2), (0, 3), (1, 3)]
        assert result.graph.edge_count == 6

    def test_path_matches_oracle(self):
        """Test P_3 against an explicit inverse"""
        g = path_graph(3)
        diffusion = diffusion_oracle(g, 0.01)
        expected = [(0, 2)] if diffusion[0, 2] > 0.4 else []
        result = digl(g, alpha=0.01, eps=0.4)
        assert [(s, r) for s, r, _ in result.added] == expected

    def test_random_graph_matches_oracle(self):
        """Test the thresholded pair set on a random graph"""
        g = random_connected_graph(np.random.default_rng(29), 15, 5)
        diffusion = diffusion_oracle(g, 0.2)
        expected = [
            (i, j) for i, j in itertools.combinations(range(15), 2)
            if diffusion[i, j] > 0.05 and not g.has_edge(i, j)
        ]
        result = digl(g, alpha=0.2, eps=0.05)
        assert [(s, r) for s, r, _ in result.added] == expected
        assert g.edge_set <= result.graph.edge_set

    def test_disconnected(self):
        """Test that DIGL needs a connected graph"""
        with pytest.raises(DisconnectedGraphError):
            digl(disconnected_graph())

    def test_bad_alpha(self):
        """Test that alpha outside (0, 1] is rejected"""
        with pytest.raises(UsageError):
            digl(path_graph(3), alpha=0.0)


class TestSdrf:
    """Test curvature-driven surgery"""

    def test_complete_graph_unchanged(self):
        """Test that K_4 offers no candidate around its edges"""
        result = sdrf(complete_graph(4))
        assert result.added == []

    def test_barbell_targets_bridge(self, barbell):
        """Test that the bridge is the first edge supported"""
        kappa = full_report(barbell).edge_curvature
        assert min(kappa, key=kappa.get) == (2, 3)
        result = sdrf(barbell, max_iterations=1)
        first = result.stats["improvements"][0]
        assert first["edge"] == [2, 3]
        assert first["before"] == pytest.approx(-2 / 3)
        p, q = first["added"]
        assert p in (0, 1, 2, 3) and q in (2, 3, 4, 5)

    def test_iteration_cap(self):
        """Test that at most max_iterations edges are added, each improving its target"""
        result = sdrf(path_graph(5), max_iterations=2)
        assert len(result.added) <= 2
        assert len(result.stats["improvements"]) == len(result.added)
        for step in result.stats["improvements"]:
            assert step["after"] > step["before"]

    def test_no_removals(self):
        """Test that SDRF only adds edges"""
        g = random_connected_graph(np.random.default_rng(31), 20, 5)
        result = sdrf(g, max_iterations=3)
        assert result.removed == []
        assert g.edge_set <= result.graph.edge_set

    def test_budget(self):
        """Test that an exhausted budget stops the loop"""
        result = sdrf(path_graph(6), max_iterations=5, budget=Budget(1e-12))
        assert result.stats["timed_out"]
        assert result.added == []


class TestFosr:
    """Test spectral-gap augmentation"""

    def test_path_single_candidate(self):
        """Test that P_3 gains its only non-edge"""
        result = fosr(path_graph(3), max_iterations=1)
        assert result.added == [(0, 2, "bidirectional")]

    def test_complete_graph(self):
        """Test that a complete graph has nothing to add"""
        assert fosr(complete_graph(5)).added == []

    def test_cycle_picks_antipodal_chord(self):
        """Test the first chord on C_6

        The second eigenspace of C_6 is odd under the half turn, so
        x_u x_v is smallest on an antipodal pair.
        """
        result = fosr(cycle_graph(6), max_iterations=1)
        (u, v, _), = result.added
        assert v - u == 3

    def test_deterministic_by_seed(self):
        """Test that equal seeds give equal additions"""
        g = random_connected_graph(np.random.default_rng(37), 20, 4)
        assert fosr(g, max_iterations=5, seed=2).added == fosr(g, max_iterations=5, seed=2).added

    def test_disconnected(self):
        """Test that FoSR needs a connected graph"""
        with pytest.raises(DisconnectedGraphError):
            fosr(disconnected_graph())


class TestBorf:
    """Test batched transport-plan rewiring"""

    def test_identity(self, barbell):
        """Test that zero counts leave the graph unchanged"""
        result = borf(barbell, batches=2, add_per_batch=0, remove_per_batch=0)
        assert result.added == [] and result.removed == []
        assert result.graph.equals(barbell)

    def test_triangle_removal(self):
        """Test that tied edges are removed in lexicographic order"""
        result = borf(complete_graph(3), batches=1, add_per_batch=0, remove_per_batch=1)
        assert result.removed == [(0, 1)]

    def test_barbell_max_mass_pair(self, barbell):
        """Test that the added pair carries the most transported mass across the bridge"""
        transport = full_report(barbell, keep_plans=True).transport_plans[(2, 3)]
        result = borf(barbell, batches=1, add_per_batch=1, remove_per_batch=0)
        (p, q, _), = result.added
        assert p in (0, 1) and q in (4, 5)
        mass = transport.mass_between(p, q) + transport.mass_between(q, p)
        assert mass == pytest.approx(1 / 3)

    def test_zero_mass_pair_still_added(self):
        """Test that an edge whose only non-adjacent pair carries no mass still gets a shortcut"""
        # two triangles sharing edge (1, 2); (0, 3) is the only missing pair
        g = build_from_edges(np.zeros((4, 2)), [(0, 1), (0, 2), (1, 2), (1, 3), (2, 3)])
        transport = full_report(g, keep_plans=True).transport_plans[(1, 2)]
        assert transport.mass_between(0, 3) + transport.mass_between(3, 0) == pytest.approx(0.0, abs=1e-12)
        result = borf(g, batches=1, add_per_batch=5, remove_per_batch=0)
        assert result.added == [(0, 3, "bidirectional")]

    def test_one_pass_per_batch(self, barbell):
        """Test that curvature is computed once per batch"""
        result = borf(barbell, batches=3, add_per_batch=1, remove_per_batch=0)
        assert result.stats["curvature_computations"] == 3
        assert result.stats["batches_completed"] == 3

    def test_timeout(self):
        """Test that an exhausted budget returns a partial result"""
        g = random_connected_graph(np.random.default_rng(41), 30, 10)
        result = borf(g, batches=5, budget=Budget(1e-6))
        assert result.stats["timed_out"]
        assert result.stats["batches_completed"] == 1

    def test_bad_counts(self, barbell):
        """Test that negative counts are rejected"""
        with pytest.raises(UsageError):
            borf(barbell, add_per_batch=-1)
