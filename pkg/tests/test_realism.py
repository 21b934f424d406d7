import math

import numpy as np
import pytest

from belllab.core import (
    SYM_E,
    SYM_EP,
    SYM_P,
    SYM_PP,
    Block,
    Provenance,
    Side,
    correlate,
)
from belllab.quantum import SingletSource
from belllab.realism import (
    CollapseSequential,
    FileReplay,
    LHVSign,
    ReplayFormatError,
    UnsupportedAxisError,
    collapse_sequential_assign,
    generate_block,
    lhv_outcome,
    lhv_outcomes,
    model_from_spec,
)

SQRT2 = math.sqrt(2.0)
V3_ANGLES = {SYM_P: 0.0, SYM_E: 3 * math.pi / 4, SYM_EP: -3 * math.pi / 4}


def lhv_block(angles, n, seed=0):
    return generate_block(LHVSign(), Block.from_angles(angles, count=n), seed)


class TestLhvOutcome:
    def test_alice_aligned(self):
        assert lhv_outcome(0.0, 0.0, Side.ALICE) == 1

    def test_bob_is_negation(self):
        assert lhv_outcome(0.0, 0.0, Side.BOB) == -1

    def test_sign_flips_across_quarter_turn(self):
        assert lhv_outcome(0.0, math.pi / 2 - 0.01, Side.ALICE) == 1
        assert lhv_outcome(0.0, math.pi / 2 + 0.01, Side.ALICE) == -1

    def test_vectorized_matches_scalar(self):
        lambdas = np.linspace(0, math.tau, 37)
        outs = lhv_outcomes(lambdas, 1.1, Side.BOB)
        assert [lhv_outcome(l, 1.1, Side.BOB) for l in lambdas] == list(outs)


class TestLhvTwoPointFunction:
    N = 100_000

    @pytest.mark.parametrize("delta", [0.0, math.pi / 4, math.pi / 2, 3 * math.pi / 4, math.pi])
    def test_same_side(self, delta):
        asg = lhv_block({SYM_E: 0.0, SYM_EP: delta}, self.N, seed=21)
        expected = 1 - 2 * delta / math.pi
        assert correlate(asg[SYM_E], asg[SYM_EP]).mean == pytest.approx(
            expected, abs=4 / math.sqrt(self.N)
        )

    @pytest.mark.parametrize("delta", [0.0, math.pi / 4, math.pi / 2, 3 * math.pi / 4, math.pi])
    def test_opposite_side(self, delta):
        asg = lhv_block({SYM_E: 0.0, SYM_P: delta}, self.N, seed=22)
        expected = -1 + 2 * delta / math.pi
        assert correlate(asg[SYM_E], asg[SYM_P]).mean == pytest.approx(
            expected, abs=4 / math.sqrt(self.N)
        )

    def test_equal_axes_cancel_exactly_per_pair(self):
        # opposite-side same-angle values must sum to zero on every pair
        asg = lhv_block({SYM_E: 0.9, SYM_P: 0.9}, 50_000, seed=3)
        assert np.all(asg[SYM_E].values + asg[SYM_P].values == 0)

    def test_cross_correlation_at_three_quarter_gap(self):
        asg = lhv_block(V3_ANGLES, self.N, seed=4)
        assert correlate(asg[SYM_E], asg[SYM_P]).mean == pytest.approx(
            0.5, abs=4 / math.sqrt(self.N)
        )


class TestGenerateBlock:
    def test_provenance_tags(self):
        asg = lhv_block(V3_ANGLES, 100)
        assert asg[SYM_E].provenance is Provenance.MEASURED
        assert asg[SYM_P].provenance is Provenance.MEASURED
        assert asg[SYM_EP].provenance is Provenance.COUNTERFACTUAL

    def test_one_sequence_per_axis(self):
        asg = lhv_block(V3_ANGLES, 64)
        assert set(asg.sequences) == set(V3_ANGLES)
        assert all(len(asg[s]) == 64 for s in V3_ANGLES)

    def test_deterministic_in_seed(self):
        a1 = lhv_block(V3_ANGLES, 500, seed=9)
        a2 = lhv_block(V3_ANGLES, 500, seed=9)
        assert all(
            np.array_equal(a1[s].values, a2[s].values) for s in V3_ANGLES
        )

    def test_measured_value_is_the_counterfactual_value(self):
        # the same per-pair tuple serves both roles: re-running the model
        # with a subset of the axes reproduces the same values
        full = lhv_block(V3_ANGLES, 1000, seed=5)
        only_e = lhv_block({SYM_E: V3_ANGLES[SYM_E]}, 1000, seed=5)
        assert np.array_equal(full[SYM_E].values, only_e[SYM_E].values)


class TestCollapseSequential:
    N = 100_000

    def test_correlations_at_the_three_angle_config(self):
        block = Block.from_angles(V3_ANGLES, count=self.N)
        asg = generate_block(CollapseSequential(), block, seed=12)
        tol = 4 / math.sqrt(self.N)
        assert correlate(asg[SYM_P], asg[SYM_E]).mean == pytest.approx(SQRT2 / 2, abs=tol)
        assert correlate(asg[SYM_P], asg[SYM_EP]).mean == pytest.approx(SQRT2 / 2, abs=tol)
        # conditional independence gives cos(tE-tP)*cos(tE'-tP) = 1/2
        assert correlate(asg[SYM_E], asg[SYM_EP]).mean == pytest.approx(0.5, abs=tol)

    def test_equal_axes_forced_anti_correlation(self):
        block = Block.from_angles({SYM_P: 0.4, SYM_E: 0.4}, count=10_000)
        asg = generate_block(CollapseSequential(), block, seed=2)
        assert np.all(asg[SYM_E].values + asg[SYM_P].values == 0)

    def test_p_prime_unsupported(self):
        block = Block.from_angles({**V3_ANGLES, SYM_PP: 0.2}, count=10)
        with pytest.raises(UnsupportedAxisError):
            generate_block(CollapseSequential(), block, seed=0)

    def test_requires_p_axis(self):
        block = Block.from_angles({SYM_E: 0.0, SYM_EP: 1.0}, count=10)
        with pytest.raises(UnsupportedAxisError):
            generate_block(CollapseSequential(), block, seed=0)

    def test_scalar_assign_matches_model(self):
        block = Block.from_angles(V3_ANGLES, count=50)
        asg = generate_block(CollapseSequential(), block, seed=8)
        src = SingletSource(8)
        for i in (0, 7, 49):
            p, e, ep = collapse_sequential_assign(
                i, V3_ANGLES[SYM_P], V3_ANGLES[SYM_E], V3_ANGLES[SYM_EP], src
            )
            assert (p, e, ep) == (
                asg[SYM_P].values[i],
                asg[SYM_E].values[i],
                asg[SYM_EP].values[i],
            )

    def test_p_marginal_unbiased(self):
        block = Block.from_angles(V3_ANGLES, count=self.N)
        asg = generate_block(CollapseSequential(), block, seed=14)
        assert abs(np.mean(asg[SYM_P].values)) <= 4 / math.sqrt(self.N)

    def test_even_nonlocal_output_satisfies_the_finite_run_identity(self):
        # the identity binds any actual sequences, local or not
        from belllab.inequalities import sica_v3_check

        block = Block.from_angles(V3_ANGLES, count=5000)
        asg = generate_block(CollapseSequential(), block, seed=6)
        assert sica_v3_check(asg[SYM_E], asg[SYM_P], asg[SYM_EP]) >= 0.0


class TestFileReplay:
    def write_vectors(self, tmp_path, text):
        path = tmp_path / "vectors.txt"
        path.write_text(text)
        return path

    def test_round_trip(self, tmp_path):
        path = self.write_vectors(
            tmp_path,
            "E=0.5 E'=-1.0 P=0.0\n"
            "1 -1 1\n"
            "-1 -1 1\n"
            "1 1 -1\n",
        )
        block = Block.from_angles({SYM_E: 0.5, SYM_EP: -1.0, SYM_P: 0.0}, count=3)
        asg = generate_block(FileReplay(path), block, seed=0)
        assert list(asg[SYM_E].values) == [1, -1, 1]
        assert list(asg[SYM_EP].values) == [-1, -1, 1]
        assert list(asg[SYM_P].values) == [1, 1, -1]

    def test_subset_of_file_axes(self, tmp_path):
        path = self.write_vectors(tmp_path, "E=0.5 P=0.0\n1 -1\n-1 1\n")
        block = Block.from_angles({SYM_P: 0.0}, count=2)
        asg = generate_block(FileReplay(path), block, seed=0)
        assert list(asg[SYM_P].values) == [-1, 1]

    def test_angle_mismatch(self, tmp_path):
        path = self.write_vectors(tmp_path, "E=0.5 P=0.0\n1 -1\n")
        block = Block.from_angles({SYM_E: 0.6, SYM_P: 0.0}, count=1)
        with pytest.raises(ReplayFormatError, match="angle mismatch"):
            generate_block(FileReplay(path), block, seed=0)

    def test_too_few_rows(self, tmp_path):
        path = self.write_vectors(tmp_path, "E=0.5\n1\n")
        block = Block.from_angles({SYM_E: 0.5}, count=5)
        with pytest.raises(ReplayFormatError, match="data rows"):
            generate_block(FileReplay(path), block, seed=0)

    def test_bad_value(self, tmp_path):
        path = self.write_vectors(tmp_path, "E=0.5\n2\n")
        block = Block.from_angles({SYM_E: 0.5}, count=1)
        with pytest.raises(ReplayFormatError, match="\\+1 or -1"):
            generate_block(FileReplay(path), block, seed=0)

    def test_ragged_row(self, tmp_path):
        path = self.write_vectors(tmp_path, "E=0.5 P=0.0\n1\n")
        block = Block.from_angles({SYM_E: 0.5, SYM_P: 0.0}, count=1)
        with pytest.raises(ReplayFormatError, match="values, expected"):
            generate_block(FileReplay(path), block, seed=0)

    def test_bad_header(self, tmp_path):
        path = self.write_vectors(tmp_path, "E:0.5\n1\n")
        block = Block.from_angles({SYM_E: 0.5}, count=1)
        with pytest.raises(ReplayFormatError, match="symbol=angle"):
            generate_block(FileReplay(path), block, seed=0)

    def test_missing_axis(self, tmp_path):
        path = self.write_vectors(tmp_path, "E=0.5\n1\n")
        block = Block.from_angles({SYM_E: 0.5, SYM_P: 0.0}, count=1)
        with pytest.raises(ReplayFormatError, match="not in header"):
            generate_block(FileReplay(path), block, seed=0)


def test_model_from_spec():
    assert isinstance(model_from_spec("lhv-sign"), LHVSign)
    assert isinstance(model_from_spec("collapse_sequential"), CollapseSequential)
    assert isinstance(model_from_spec("file-replay", "x.txt"), FileReplay)
    with pytest.raises(ValueError, match="needs a path"):
        model_from_spec("file-replay")
    with pytest.raises(ValueError, match="unknown"):
        model_from_spec("bohmian")
