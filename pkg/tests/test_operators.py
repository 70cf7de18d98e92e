import json

import numpy as np
import pytest

from chain_eigen import basis, operators
from chain_eigen.errors import DomainError, ResourceError
from chain_eigen.operators import ChainConfig, SparseOperator, matvec


def test_chain_config_validation():
    with pytest.raises(DomainError):
        ChainConfig(0)
    with pytest.raises(DomainError):
        ChainConfig(3, omega=float("nan"))
    cfg = ChainConfig(3, 1, -2)
    assert cfg.omega == -2.0 and isinstance(cfg.omega0, float)


def test_subspace_V_examples():
    v = operators.build_subspace_V(ChainConfig(3), 1)
    expected = np.array([[0, 1, 0], [1, 0, 1], [0, 1, 0]], float)
    np.testing.assert_array_equal(v.to_dense(), expected)
    v2 = operators.build_subspace_V(ChainConfig(3), 2).to_dense()
    assert v2[basis.rank((1, 3), 3), basis.rank((1, 2), 3)] == 1.0
    for n in (1, 4):
        v0 = operators.build_subspace_V(ChainConfig(n), 0)
        assert v0.dim == 1 and v0.nnz == 0


def test_full_H_examples():
    h = operators.build_full_H(ChainConfig(1, omega0=1, omega=1)).to_dense()
    np.testing.assert_array_equal(h, np.diag([-0.5, 0.5]))
    h = operators.build_full_H(ChainConfig(2, omega0=0, omega=1))
    assert h.entries() == [(1, 2, 1.0), (2, 1, 1.0)]
    h = operators.build_full_H(ChainConfig(2, omega0=1, omega=0)).to_dense()
    np.testing.assert_array_equal(np.diag(h), [-1, 0, 0, 1])
    np.testing.assert_array_equal(h - np.diag(np.diag(h)), 0)


def test_full_space_cap():
    with pytest.raises(ResourceError):
        operators.build_full_H(ChainConfig(15))


def test_matvec_examples():
    ident = SparseOperator(3, [0, 1, 2], [0, 1, 2], [1, 1, 1])
    x = np.array([0.5, -2.0, 3.0])
    np.testing.assert_array_equal(matvec(ident, x), x)
    np.testing.assert_array_equal(matvec(SparseOperator(3, [], [], []), x), 0)
    v = operators.build_subspace_V(ChainConfig(3, omega=2.5), 1)
    np.testing.assert_array_equal(matvec(v, [1, 0, 0]), [0, 2.5, 0])
    with pytest.raises(DomainError):
        matvec(v, np.ones(4))


def test_matvec_linear_and_blocked():
    v = operators.build_subspace_V(ChainConfig(6, omega=-0.7), 3)
    rng = np.random.default_rng(0)
    x, y = rng.normal(size=(2, v.dim))
    np.testing.assert_allclose(matvec(v, 2 * x - 3j * y), 2 * matvec(v, x) - 3j * matvec(v, y))
    block = np.column_stack([x, y])
    np.testing.assert_array_equal(matvec(v, block)[:, 1], matvec(v, y))
    np.testing.assert_allclose(matvec(v, x), v.to_dense() @ x, atol=1e-14)


def test_sparse_operator_canonical():
    op = SparseOperator.from_entries(3, [(2, 0, 1.0), (0, 2, 1.0), (1, 1, 4.0)])
    assert op.entries() == [(0, 2, 1.0), (1, 1, 4.0), (2, 0, 1.0)]
    assert op.is_symmetric()
    with pytest.raises(DomainError):
        SparseOperator.from_entries(2, [(0, 1, 1.0), (0, 1, 2.0)])
    with pytest.raises(DomainError):
        SparseOperator.from_entries(2, [(0, 2, 1.0)])
    doc = json.loads(op.to_json())
    assert doc == {"dim": 3, "entries": [[0, 2, 1.0], [1, 1, 4.0], [2, 0, 1.0]]}
    assert not SparseOperator.from_entries(2, [(0, 1, 1.0)]).is_symmetric()


CONFIGS = [ChainConfig(n, 1.3, w) for n in range(1, 11) for w in (1.0, -0.7)]


@pytest.mark.parametrize("cfg", CONFIGS, ids=lambda c: f"N{c.n_atoms}_w{c.omega}")
def test_subspace_V_is_restricted_full_H(cfg):
    full = operators.build_full_H(cfg)
    assert full.is_symmetric()
    for m in range(cfg.n_atoms + 1):
        sub = operators.build_subspace_V(cfg, m)
        assert sub.is_symmetric()
        assert np.all(sub.diagonal() == 0)
        block = operators.restrict(full, operators.level_masks(cfg.n_atoms, m))
        bare = cfg.omega0 * (m - cfg.n_atoms / 2)
        np.testing.assert_array_equal(block - bare * np.eye(sub.dim), sub.to_dense())
        hsub = operators.build_subspace_H(cfg, m).to_dense()
        np.testing.assert_array_equal(hsub, block)


@pytest.mark.parametrize("n", range(1, 11))
def test_full_H_preserves_excitation_number(n):
    cfg = ChainConfig(n, 0.9, 1.1)
    h = operators.build_full_H(cfg)
    counts = operators.popcounts(n)
    rng = np.random.default_rng(n)
    for m in range(n + 1):
        x = np.where(counts == m, rng.normal(size=2**n), 0.0)
        y = matvec(h, x)
        assert np.all(y[counts != m] == 0)


def test_nnz_equals_hop_count():
    for n in range(1, 9):
        cfg = ChainConfig(n)
        for m in range(n + 1):
            v = operators.build_subspace_V(cfg, m)
            dense = v.to_dense()
            total = 0
            for i, p in enumerate(basis.enumerate_patterns(n, m)):
                moves = basis.hops(p, n)
                total += len(moves)
                assert np.count_nonzero(dense[:, i]) == len(moves)
            assert v.nnz == total
            # each bond move counted from both ends
            assert total % 2 == 0


def test_general_couplings_triangle():
    cfg = ChainConfig(3, omega0=0.0, omega=1.0)
    tri = operators.build_full_V(cfg, {(1, 2): 1.0, (2, 3): 1.0, (1, 3): 0.5}).to_dense()
    chain = operators.build_full_V(cfg).to_dense()
    diff = tri - chain
    # only |1,x> <-> |x,3> moves across the base differ: masks 001<->100 and 011<->110
    assert diff[0b100, 0b001] == 0.5 and diff[0b110, 0b011] == 0.5
    assert np.count_nonzero(diff) == 4
    with pytest.raises(DomainError):
        operators.build_full_V(cfg, {(1, 1): 1.0})
