import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from motkit import kalman
from motkit.assignment import INFEASIBLE
from motkit.association import (
    CHI2_GATE_4DOF,
    FeatureGallery,
    GateConfig,
    associate,
    cosine_cost,
    gate_cost_matrix,
    iou_cost,
    matching_cascade,
)
from motkit.errors import MissingFeatureError
from motkit.model import BoundingBox, Detection, box_to_state
from motkit.tracker import Track, TrackStatus


def unit(*values):
    v = np.array(values, dtype=float)
    return v / np.linalg.norm(v)


def det(box, embedding=None, frame=1, index=0):
    return Detection(frame, box, 1.0, embedding, index)


def make_track(box, embedding=None, status=TrackStatus.CONFIRMED,
               time_since_update=1, track_id=1, budget=100):
    gallery = FeatureGallery(budget)
    if embedding is not None:
        gallery.add(embedding)
    state = kalman.predict(kalman.initiate(box_to_state(box).positional))
    return Track(
        id=track_id,
        state=state,
        status=status,
        gallery=gallery,
        time_since_update=time_since_update,
    )


class TestFeatureGallery:
    def test_budget_is_enforced(self):
        gallery = FeatureGallery(3)
        for i in range(5):
            gallery.add(unit(1, i))
        assert len(gallery) == 3

    def test_rejects_non_unit_vectors(self):
        gallery = FeatureGallery(2)
        with pytest.raises(ValueError):
            gallery.add(np.array([0.5, 0.5]))

    def test_rejects_dimension_change(self):
        gallery = FeatureGallery(2)
        gallery.add(unit(1, 0))
        with pytest.raises(ValueError):
            gallery.add(unit(1, 0, 0))


class TestCosineCost:
    def test_identical_vector_costs_zero(self):
        gallery = FeatureGallery(10)
        x = unit(1, 2, 3)
        gallery.add(x)
        costs = cosine_cost(gallery, [det(BoundingBox(0, 0, 1, 1), x)])
        assert costs[0] == pytest.approx(0.0, abs=1e-12)

    def test_orthogonal_vector_costs_one(self):
        gallery = FeatureGallery(10)
        gallery.add(unit(1, 0))
        costs = cosine_cost(gallery, [det(BoundingBox(0, 0, 1, 1), unit(0, 1))])
        assert costs[0] == pytest.approx(1.0)

    def test_gallery_takes_minimum(self):
        # hand computation on 2-D unit vectors: cos 0 deg = 1, cos 45 deg
        x = unit(1, 0)
        y = unit(1, 1)
        gallery = FeatureGallery(10)
        gallery.add(x)
        gallery.add(y)
        probe = det(BoundingBox(0, 0, 1, 1), unit(1, 0))
        cost = cosine_cost(gallery, [probe])[0]
        assert cost == pytest.approx(min(1 - 1.0, 1 - 1 / np.sqrt(2)), abs=1e-12)

    def test_missing_embedding_raises(self):
        gallery = FeatureGallery(10)
        gallery.add(unit(1, 0))
        with pytest.raises(MissingFeatureError):
            cosine_cost(gallery, [det(BoundingBox(0, 0, 1, 1))])

    def test_empty_gallery_rejected(self):
        with pytest.raises(ValueError):
            cosine_cost(FeatureGallery(10), [det(BoundingBox(0, 0, 1, 1), unit(1, 0))])

    @given(st.integers(1, 6), st.integers(0, 2**32 - 1))
    @settings(max_examples=40, deadline=None)
    def test_growing_gallery_never_increases_cost(self, extra, seed):
        rng = np.random.default_rng(seed)
        gallery = FeatureGallery(50)
        gallery.add(unit(*rng.normal(size=4)))
        probes = [det(BoundingBox(0, 0, 1, 1), unit(*rng.normal(size=4)))]
        before = cosine_cost(gallery, probes).copy()
        for _ in range(extra):
            gallery.add(unit(*rng.normal(size=4)))
        after = cosine_cost(gallery, probes)
        assert (after <= before + 1e-12).all()


class TestGateCostMatrix:
    def test_detection_at_projected_mean_untouched(self):
        box = BoundingBox(10, 10, 20, 40)
        state = kalman.predict(kalman.initiate(box_to_state(box).positional))
        mean4, _ = kalman.project(state)
        from motkit.model import StateVector, state_to_box

        at_mean = state_to_box(StateVector(*mean4, 0, 0, 0, 0))
        costs = np.array([[0.42]])
        gated = gate_cost_matrix(costs, [state], [det(at_mean)], CHI2_GATE_4DOF)
        assert gated[0, 0] == 0.42

    def test_zero_threshold_gates_everything_displaced(self):
        box = BoundingBox(10, 10, 20, 40)
        state = kalman.predict(kalman.initiate(box_to_state(box).positional))
        far = det(BoundingBox(500, 10, 20, 40))
        gated = gate_cost_matrix(np.array([[0.1]]), [state], [far], 0.0)
        assert gated[0, 0] == INFEASIBLE

    def test_far_detection_gated_at_default_threshold(self):
        box = BoundingBox(10, 10, 20, 40)
        state = kalman.predict(kalman.initiate(box_to_state(box).positional))
        far = det(BoundingBox(2000, 2000, 20, 40))
        distance = kalman.gating_distance(
            state, [box_to_state(far.box).positional]
        )[0]
        assert distance > 100
        gated = gate_cost_matrix(np.array([[0.1]]), [state], [far], CHI2_GATE_4DOF)
        assert gated[0, 0] == INFEASIBLE

    def test_feasible_values_never_modified(self):
        rng = np.random.default_rng(2)
        boxes = [BoundingBox(10 + 100 * i, 10, 20, 40) for i in range(3)]
        states = [
            kalman.predict(kalman.initiate(box_to_state(b).positional)) for b in boxes
        ]
        dets = [det(b, index=i) for i, b in enumerate(boxes)]
        costs = rng.uniform(0, 1, (3, 3))
        gated = gate_cost_matrix(costs, states, dets, CHI2_GATE_4DOF)
        feasible = np.isfinite(gated)
        assert (gated[feasible] == costs[feasible]).all()


class TestIouCost:
    def test_identical_boxes_cost_zero(self):
        box = BoundingBox(10, 10, 20, 40)
        track = make_track(box)
        costs = iou_cost([track], [det(box)])
        assert costs[0, 0] == pytest.approx(0.0, abs=1e-12)

    def test_disjoint_boxes_cost_one(self):
        track = make_track(BoundingBox(0, 0, 10, 10))
        costs = iou_cost([track], [det(BoundingBox(500, 500, 10, 10))])
        assert costs[0, 0] == 1.0

    def test_third_overlap_costs_two_thirds(self):
        track = make_track(BoundingBox(0, 0, 2, 2))
        costs = iou_cost([track], [det(BoundingBox(1, 0, 2, 2))])
        assert costs[0, 0] == pytest.approx(2 / 3, abs=1e-9)


class TestMatchingCascade:
    def test_redetection_matches_at_first_level(self):
        box = BoundingBox(10, 10, 20, 40)
        x = unit(1, 0, 0)
        track = make_track(box, x, time_since_update=1)
        result = matching_cascade([track], [det(box, x)], GateConfig())
        assert result.matches == ((0, 0),)

    def test_fresher_track_wins_under_equal_appearance(self):
        box = BoundingBox(10, 10, 20, 40)
        x = unit(1, 0, 0)
        fresh = make_track(box, x, time_since_update=1, track_id=1)
        stale = make_track(box, x, time_since_update=5, track_id=2)
        config = GateConfig()
        result = matching_cascade([stale, fresh], [det(box, x)], config)
        assert result.matches == ((1, 0),)
        # priority holds regardless of list order
        result = matching_cascade([fresh, stale], [det(box, x)], config)
        assert result.matches == ((0, 0),)

    def test_gate_blocks_all_tracks(self):
        x = unit(1, 0, 0)
        track = make_track(BoundingBox(10, 10, 20, 40), x)
        far = det(BoundingBox(5000, 5000, 20, 40), x)
        result = matching_cascade([track], [far], GateConfig())
        assert result.matches == ()
        assert result.unmatched_rows == (0,)
        assert result.unmatched_cols == (0,)

    def test_tentative_tracks_do_not_participate(self):
        box = BoundingBox(10, 10, 20, 40)
        x = unit(1, 0, 0)
        track = make_track(box, x, status=TrackStatus.TENTATIVE)
        result = matching_cascade([track], [det(box, x)], GateConfig())
        assert result.matches == ()


class TestAssociate:
    def test_iou_rescues_appearance_mismatch(self):
        # embeddings orthogonal, boxes nearly identical: stage 1 fails on
        # the cosine ceiling, stage 2 matches by overlap
        box = BoundingBox(10, 10, 20, 40)
        track = make_track(box, unit(1, 0))
        detection = det(BoundingBox(10.5, 10, 20, 40), unit(0, 1))
        result = associate([track], [detection], GateConfig())
        assert result.matches == ((0, 0),)

    def test_no_tracks(self):
        result = associate([], [det(BoundingBox(0, 0, 1, 1), unit(1, 0))], GateConfig())
        assert result.matches == ()
        assert result.unmatched_cols == (0,)

    def test_no_detections(self):
        track = make_track(BoundingBox(0, 0, 10, 10), unit(1, 0))
        result = associate([track], [], GateConfig())
        assert result.matches == ()
        assert result.unmatched_rows == (0,)

    def test_long_missed_confirmed_track_skips_iou_stage(self):
        box = BoundingBox(10, 10, 20, 40)
        track = make_track(box, unit(1, 0), time_since_update=3)
        detection = det(box, unit(0, 1))  # appearance vetoes the cascade
        result = associate([track], [detection], GateConfig())
        assert result.matches == ()

    def test_detector_only_mode_runs_iou_over_all_tracks(self):
        box = BoundingBox(10, 10, 20, 40)
        track = make_track(box, unit(1, 0), time_since_update=3)
        detection = det(box)  # no embedding anywhere: cascade skipped
        result = associate([track], [detection], GateConfig())
        assert result.matches == ((0, 0),)

    def test_partition_invariant(self):
        boxes = [BoundingBox(10 + 60 * i, 10, 20, 40) for i in range(3)]
        tracks = [
            make_track(b, unit(1, 0, i + 1), track_id=i + 1) for i, b in enumerate(boxes)
        ]
        dets = [det(b, unit(1, 0, i + 1), index=i) for i, b in enumerate(boxes[:2])]
        result = associate(tracks, dets, GateConfig())
        rows = sorted([r for r, _ in result.matches] + list(result.unmatched_rows))
        cols = sorted([c for _, c in result.matches] + list(result.unmatched_cols))
        assert rows == [0, 1, 2]
        assert cols == [0, 1]
