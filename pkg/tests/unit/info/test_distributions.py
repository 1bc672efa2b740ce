"""
Unit tests for Pmf, CondPmf and JointPmf.
"""
import numpy as np
import pytest
from app.info.distributions import CondPmf, JointPmf, Pmf

# ==================== HAPPY PATH TESTS ====================

def test_pmf_constructors():
    """Test: uniform and bernoulli build valid laws."""
    assert Pmf.uniform(4).probs == (0.25, 0.25, 0.25, 0.25)
    assert Pmf.bernoulli(0.3).array == pytest.approx([0.7, 0.3])


def test_cond_pmf_compose_bsc_cascade():
    """Test: Two BSCs compose into the BSC with the starred cross-over."""
    a = CondPmf.from_array([[0.9, 0.1], [0.1, 0.9]])
    b = CondPmf.from_array([[0.8, 0.2], [0.2, 0.8]])
    cascade = a.compose(b)
    assert cascade.array[0, 1] == pytest.approx(0.1 * 0.8 + 0.9 * 0.2)


def test_joint_marginals_recover_input_law():
    """Test: The x-marginal of p(x) p(y|x) is p(x)."""
    channel = CondPmf.from_array([[0.5, 0.5, 0.0], [0.0, 0.1, 0.9]])
    joint = channel.joint(Pmf.bernoulli(0.25))
    assert joint.marginal_x().array == pytest.approx([0.75, 0.25])
    assert joint.marginal_y().array.sum() == pytest.approx(1.0)


def test_models_are_frozen_and_hashable():
    """Test: Laws are immutable and can be used as dictionary keys."""
    law = CondPmf.identity(2)
    assert {law: 1}[CondPmf.identity(2)] == 1
    with pytest.raises(Exception):
        law.rows = ((0.0, 1.0), (1.0, 0.0))

# ==================== UNHAPPY PATH TESTS ====================

def test_pmf_rejects_bad_sum():
    """Test: Entries must sum to 1 within 1e-12."""
    with pytest.raises(ValueError, match="sum to 1"):
        Pmf(probs=(0.5, 0.4))


def test_pmf_rejects_negative_entries():
    """Test: Negative probabilities are rejected."""
    with pytest.raises(ValueError):
        Pmf(probs=(1.5, -0.5))


def test_cond_pmf_rejects_ragged_rows():
    """Test: Rows of different length are rejected."""
    with pytest.raises(ValueError):
        CondPmf(rows=((1.0,), (0.5, 0.5)))


def test_cond_pmf_compose_rejects_size_mismatch():
    """Test: Cascading needs matching inner alphabets."""
    with pytest.raises(ValueError, match="cannot cascade"):
        CondPmf.identity(2).compose(CondPmf.identity(3))


def test_joint_pmf_rejects_non_normalised_table():
    """Test: Joint tables must sum to 1."""
    with pytest.raises(ValueError):
        JointPmf.from_array(np.ones((2, 2)))
