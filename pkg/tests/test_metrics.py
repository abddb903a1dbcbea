import math

import numpy as np
from django.test import SimpleTestCase, tag

from django_flockspc.config import ScenarioConfig, Spawn
from django_flockspc.engine import Trace, TraceRecord
from django_flockspc.exceptions import EmptyWindowError, InvalidInputError
from django_flockspc.metrics import (MetricsSample, Thresholds, aggregate, compute_metrics,
                                     render_markdown_table, seed_statistics, summarize_samples,
                                     thresholds_for, thresholds_from_geometry)
from django_flockspc.model import Obstacle

DEFAULT_THRESHOLDS = Thresholds(dist_thr=0.20, comp_thr=10.0, clear_thr=0.28)


def brute_force(positions, obstacles):
    """ All-pairs reference metrics in plain Python floats. """
    points = [tuple(float(c) for c in p) for p in positions]
    dist_min = None
    for i in range(len(points)):
        for j in range(i + 1, len(points)):
            dx, dy, dz = (points[i][k] - points[j][k] for k in range(3))
            d = math.sqrt(dx * dx + dy * dy + dz * dz)
            dist_min = d if dist_min is None else min(dist_min, d)
    centroid = [0.0, 0.0, 0.0]
    for p in points:
        for k in range(3):
            centroid[k] += p[k]
    centroid = [c / len(points) for c in centroid]
    comp_max = 0.0
    for p in points:
        dx, dy, dz = (p[k] - centroid[k] for k in range(3))
        comp_max = max(comp_max, math.sqrt(dx * dx + dy * dy + dz * dz))
    clear_obj = None
    for p in points:
        for o in obstacles:
            dx, dy = p[0] - o.center_xy[0], p[1] - o.center_xy[1]
            d = math.sqrt(dx * dx + dy * dy)
            clear_obj = d if clear_obj is None else min(clear_obj, d)
    return dist_min, comp_max, clear_obj


def synthetic_trace(dist_mins, obstacles=(), start=0.0, period=1.0):
    """
    A two-agent trace whose agents sit ``dist_mins[k]`` apart at tick ``k``.
    """
    cfg = ScenarioConfig(name='synthetic', agent_count=2, obstacles=obstacles,
                         spawn=Spawn(positions=np.array([[0, 0, 1], [1, 0, 1]], dtype=float)))
    records = []
    for k, d in enumerate(dist_mins):
        positions = np.array([[0.0, 0.0, 1.0], [d, 0.0, 1.0]])
        records.append(TraceRecord(time=start + k * period, positions=positions,
                                   velocities=np.zeros((2, 3)), observed=positions,
                                   setpoints=positions, decisions=(), costs=(),
                                   grad_norms=np.zeros(2), neighbor_counts=(1, 1), target=None))
    return Trace(cfg=cfg, records=records)


class TestComputeMetrics(SimpleTestCase):

    def test_triangle(self):
        """
        Test the three metrics on a right triangle
        """
        sample = compute_metrics([(0, 0, 1), (1, 0, 1), (0, 1, 1)], [])
        self.assertEqual(sample.dist_min, 1.0)
        self.assertAlmostEqual(sample.comp_max, math.sqrt(5) / 3)
        self.assertIsNone(sample.clear_obj)

    def test_clearance_uses_xy(self):
        """
        Test clearance as xy distance to the obstacle centre
        """
        sample = compute_metrics([(5, 6, 2), (9, 9, 1)], [Obstacle((5, 5), 0.15)])
        self.assertEqual(sample.clear_obj, 1.0)

    def test_single_agent(self):
        """
        Test that one agent has no dist_min
        """
        sample = compute_metrics([(1, 2, 3)], [])
        self.assertIsNone(sample.dist_min)
        self.assertEqual(sample.comp_max, 0.0)

    def test_no_agents(self):
        """
        Test that metrics need an agent
        """
        with self.assertRaises(InvalidInputError):
            compute_metrics(np.empty((0, 3)), [])

    def test_coincident_agents(self):
        """
        Test that comp_max is zero exactly when all agents coincide
        """
        self.assertEqual(compute_metrics([(0.1, 0.2, 0.3)] * 4, []).comp_max, 0.0)
        self.assertGreater(compute_metrics([(0.1, 0.2, 0.3)] * 3 + [(0.1, 0.2, 0.3001)], []).comp_max, 0)

    def test_translation_invariance(self):
        """
        Test metrics under a rigid translation of agents and obstacles
        """
        rng = np.random.default_rng(1)
        positions = rng.uniform(-3, 3, size=(12, 3))
        obstacles = [Obstacle(tuple(rng.uniform(-3, 3, 2)), 0.15) for _ in range(4)]
        shift = np.array([10.5, -7.25, 3.0])
        moved = [Obstacle(tuple(np.array(o.center_xy) + shift[:2]), o.radius) for o in obstacles]
        a = compute_metrics(positions, obstacles)
        b = compute_metrics(positions + shift, moved)
        self.assertAlmostEqual(a.dist_min, b.dist_min, places=9)
        self.assertAlmostEqual(a.comp_max, b.comp_max, places=9)
        self.assertAlmostEqual(a.clear_obj, b.clear_obj, places=9)

    def test_adding_agent_never_raises_dist_min(self):
        """
        Test that inserting an agent can only lower dist_min
        """
        rng = np.random.default_rng(2)
        for _ in range(200):
            positions = rng.uniform(-2, 2, size=(int(rng.integers(2, 10)), 3))
            before = compute_metrics(positions, []).dist_min
            after = compute_metrics(np.vstack([positions, rng.uniform(-2, 2, 3)]), []).dist_min
            self.assertLessEqual(after, before)

    @tag('slow')
    def test_brute_force_oracle(self):
        """
        Test exact agreement with an all-pairs reference on 10^4 random
        configurations
        """
        rng = np.random.default_rng(10)
        for _ in range(10000):
            positions = rng.uniform(-5, 5, size=(int(rng.integers(2, 31)), 3))
            obstacles = [Obstacle(tuple(rng.uniform(-5, 5, 2)), 0.15)
                         for _ in range(int(rng.integers(0, 12)))]
            sample = compute_metrics(positions, obstacles)
            self.assertEqual((sample.dist_min, sample.comp_max, sample.clear_obj),
                             brute_force(positions, obstacles))

    def test_brute_force_oracle_sample(self):
        """
        Test exact agreement with an all-pairs reference on a few configurations
        """
        rng = np.random.default_rng(11)
        for _ in range(100):
            positions = rng.uniform(-5, 5, size=(int(rng.integers(2, 31)), 3))
            obstacles = [Obstacle(tuple(rng.uniform(-5, 5, 2)), 0.15)
                         for _ in range(int(rng.integers(0, 12)))]
            sample = compute_metrics(positions, obstacles)
            self.assertEqual((sample.dist_min, sample.comp_max, sample.clear_obj),
                             brute_force(positions, obstacles))


class TestThresholds(SimpleTestCase):

    def test_geometry(self):
        """
        Test thresholds built from the simulation geometry
        """
        thresholds = thresholds_from_geometry(0.07, 0.06, 0.15, 10.0)
        self.assertAlmostEqual(thresholds.dist_thr, 0.20)
        self.assertAlmostEqual(thresholds.clear_thr, 0.28)
        self.assertEqual(thresholds.comp_thr, 10.0)

    def test_degenerate_zero(self):
        """
        Test that all-zero geometry gives zero thresholds
        """
        thresholds = thresholds_from_geometry(0, 0, 0, 0)
        self.assertEqual((thresholds.dist_thr, thresholds.comp_thr, thresholds.clear_thr), (0, 0, 0))

    def test_negative_radius(self):
        """
        Test that radii must not be negative
        """
        with self.assertRaises(InvalidInputError):
            thresholds_from_geometry(-0.07, 0.06, 0.15, 10.0)

    def test_scenario_thresholds(self):
        """
        Test that a scenario's clearance threshold uses its largest obstacle
        """
        cfg = ScenarioConfig(agent_count=1, obstacles=(Obstacle((0, 0), 0.15), Obstacle((4, 4), 0.3)))
        self.assertAlmostEqual(thresholds_for(cfg).clear_thr, 0.07 + 0.3 + 0.06)


class TestAggregate(SimpleTestCase):

    def test_passing_run(self):
        """
        Test a run that keeps its separation
        """
        summary = aggregate(synthetic_trace([0.78, 0.80, 0.79], start=10.0), DEFAULT_THRESHOLDS, 10.0)
        self.assertEqual(summary.dist_min, 0.78)
        self.assertTrue(summary.dist_ok)
        self.assertTrue(summary.passed)
        self.assertIsNone(summary.clear_obj)
        self.assertIsNone(summary.clear_ok)

    def test_failing_run(self):
        """
        Test a run whose separation dips below the threshold
        """
        summary = aggregate(synthetic_trace([0.5, 0.14, 0.6], start=10.0), DEFAULT_THRESHOLDS, 10.0)
        self.assertEqual(summary.dist_min, 0.14)
        self.assertFalse(summary.dist_ok)
        self.assertFalse(summary.passed)

    def test_formation_prefix_is_ignored(self):
        """
        Test that samples before the formation time are left out
        """
        summary = aggregate(synthetic_trace([0.01, 0.02, 0.7, 0.8], period=5.0), DEFAULT_THRESHOLDS, 10.0)
        self.assertEqual(summary.dist_min, 0.7)
        self.assertEqual(summary.samples, 2)

    def test_boundary_fails(self):
        """
        Test that a metric exactly on its threshold fails
        """
        samples = [MetricsSample(time=1.0, dist_min=0.2, comp_max=10.0, clear_obj=0.28)]
        summary = summarize_samples(samples, DEFAULT_THRESHOLDS, 0.0)
        self.assertFalse(summary.dist_ok)
        self.assertFalse(summary.comp_ok)
        self.assertFalse(summary.clear_ok)

    def test_empty_window(self):
        """
        Test that a trace ending before the formation time is an error
        """
        with self.assertRaises(EmptyWindowError):
            aggregate(synthetic_trace([0.5, 0.5]), DEFAULT_THRESHOLDS, 10.0)
        with self.assertRaises(EmptyWindowError):
            summarize_samples([], DEFAULT_THRESHOLDS, 0.0)

    def test_obstacle_clearance_verdict(self):
        """
        Test the clearance verdict of a run with an obstacle
        """
        trace = synthetic_trace([0.8, 0.8], obstacles=(Obstacle((0, 0.25), 0.15),), start=1.0)
        summary = aggregate(trace, DEFAULT_THRESHOLDS, 0.0)
        self.assertAlmostEqual(summary.clear_obj, 0.25)
        self.assertFalse(summary.clear_ok)


class TestMarkdownTable(SimpleTestCase):

    def summaries(self):
        rows = []
        for seed, (spc, pfc) in enumerate([(0.78, 0.14), (0.80, 0.30)]):
            for controller, dist in (('SPC', spc), ('PFC', pfc)):
                rows.append(summarize_samples(
                    [MetricsSample(time=10.0, dist_min=dist, comp_max=1.5, clear_obj=None)],
                    DEFAULT_THRESHOLDS, 0.0, agent_count=4, obstacle_count=0,
                    controller=controller, llc_family='A', seed=seed))
        return rows

    def test_worst_case_cells(self):
        """
        Test that table cells show the worst seed with its verdict
        """
        table = render_markdown_table(self.summaries())
        lines = table.strip().splitlines()
        self.assertEqual(len(lines), 3)
        self.assertIn('PFC/A dist_min', lines[0])
        self.assertIn('SPC/A dist_min', lines[0])
        self.assertIn('0.14 ✗', lines[2])
        self.assertIn('0.78 ✓', lines[2])
        self.assertIn(' - |', lines[2])

    def test_seed_statistics(self):
        """
        Test minimum and median across seeds
        """
        stats = seed_statistics(self.summaries())
        spc = stats[(4, 0, math.inf, 'SPC', 'A')].to_dict()
        self.assertEqual(spc['seeds'], [0, 1])
        self.assertEqual(spc['dist_min']['min'], 0.78)
        self.assertAlmostEqual(spc['dist_min']['median'], 0.79)
        self.assertIsNone(spc['clear_obj'])
        self.assertIsNone(spc['r_h'])

    def test_radius_column(self):
        """
        Test that sweeping the neighbourhood radius adds an r_H column
        """
        rows = [summarize_samples([MetricsSample(time=1.0, dist_min=0.5, comp_max=1.0, clear_obj=None)],
                                  DEFAULT_THRESHOLDS, 0.0, agent_count=9, controller='SPC',
                                  llc_family='B', r_h=r_h)
                for r_h in (0.9, math.inf)]
        lines = render_markdown_table(rows).strip().splitlines()
        self.assertIn('r_H', lines[0])
        self.assertEqual(len(lines), 4)
        self.assertIn('0.90', lines[2])
        self.assertIn('∞', lines[3])
