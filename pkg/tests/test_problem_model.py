"""
Unit tests for the problem model service

Tests:
- Complete graphs and Cartesian products (Kronecker-sum oracle)
- Partitioning QUBO structure and ground states
- QUBO -> Ising equivalence
- Energy evaluation
- K_m □ K_n detection
"""

import itertools

import networkx as nx
import numpy as np
import pytest

from cpcg.exceptions import InputError
from cpcg.models.problem import DoublyIndexedLabeling, IsingModel, QuboMatrix, Vartype
from cpcg.services.problem_model import (
    all_states,
    cartesian_product,
    complete_graph,
    detect_cpcg,
    energies,
    energy,
    ground_states,
    ising_from_qubo,
    partitioning_qubo,
    product_graph,
    qubo_problem_graph,
)


def random_qubo(n: int, seed: int) -> QuboMatrix:
    """Dense random QUBO with an offset."""
    rng = np.random.default_rng(seed)
    terms = {(i, j): float(rng.integers(-5, 6)) for i in range(n) for j in range(i, n)}
    return QuboMatrix.from_terms(n, terms, offset=1.5)


class TestGraphs:
    """Test suite for complete graphs and products."""

    def test_complete_graph(self):
        """Test K_m edge count and the m >= 1 precondition."""
        assert complete_graph(5).number_of_edges() == 10
        assert complete_graph(1).number_of_nodes() == 1
        with pytest.raises(InputError):
            complete_graph(0)

    @pytest.mark.parametrize("m,n", [(2, 2), (3, 2), (4, 3), (8, 7)])
    def test_product_matches_kronecker_sum(self, m, n):
        """Test adjacency equals A_m ⊗ I_n + I_m ⊗ A_n in (a, i) order."""
        graph = product_graph(m, n)
        order = [(a, i) for a in range(m) for i in range(n)]
        assert list(graph.nodes) == order
        a_m = nx.to_numpy_array(nx.complete_graph(m))
        a_n = nx.to_numpy_array(nx.complete_graph(n))
        expected = np.kron(a_m, np.eye(n)) + np.kron(np.eye(m), a_n)
        np.testing.assert_array_equal(nx.to_numpy_array(graph, nodelist=order), expected)

    def test_product_counts(self):
        """Test K_8 □ K_7 has 56 vertices of degree 13."""
        graph = product_graph(8, 7)
        assert graph.number_of_nodes() == 56
        assert {d for _, d in graph.degree} == {13}

    def test_product_of_empty_graph(self):
        """Test that an empty factor is rejected."""
        with pytest.raises(InputError):
            cartesian_product(nx.Graph(), complete_graph(3))


class TestQubo:
    """Test suite for QUBO construction and conversion."""

    def test_folding(self):
        """Test (j, i) terms fold onto (i, j) and duplicates add up."""
        q = QuboMatrix.from_terms(3, {(1, 0): 2.0, (0, 1): 1.0, (2, 2): -1.0})
        assert q.terms == {(0, 1): 3.0, (2, 2): -1.0}
        assert q.coefficient(1, 0) == 3.0

    def test_term_out_of_range(self):
        """Test indices must be below n."""
        with pytest.raises(InputError):
            QuboMatrix.from_terms(2, {(0, 2): 1.0})

    def test_partitioning_graph_is_product(self):
        """Test the K_4, K=2 partitioning QUBO graph is K_4 □ K_2."""
        qubo, labeling = partitioning_qubo(complete_graph(4), 2, 1.0, 1.0)
        assert qubo.n == 8
        graph = qubo_problem_graph(qubo)
        assert nx.is_isomorphic(graph, product_graph(4, 2))
        for u, v in graph.edges:
            (iu, ku), (iv, kv) = labeling.pair_of(u), labeling.pair_of(v)
            assert (iu == iv) != (ku == kv)

    def test_partitioning_labels(self):
        """Test index (i-1)*K + (k-1) is labelled (i, k)."""
        qubo, labeling = partitioning_qubo(complete_graph(3), 2, 1.0, 1.0)
        assert qubo.labels[3] == (2, 2)
        assert labeling.pair_of(3) == (2, 2)

    def test_partitioning_ground_states(self):
        """Test every exhaustive ground state of K_4, K=2, A=B=3 is a balanced partition."""
        qubo, _ = partitioning_qubo(complete_graph(4), 2, 3.0, 3.0)
        best, minimisers = ground_states(qubo)
        assert best == pytest.approx(-2.0)
        assert len(minimisers) == 6
        for x in minimisers:
            slots = np.asarray(x).reshape(4, 2)
            assert (slots.sum(axis=1) == 1).all()
            assert (slots.sum(axis=0) == 2).all()

    def test_partitioning_rejects_bad_parameters(self):
        """Test K >= 2 and positive penalties."""
        with pytest.raises(InputError, match="K >= 2"):
            partitioning_qubo(complete_graph(4), 1, 1.0, 1.0)
        with pytest.raises(InputError, match="positive"):
            partitioning_qubo(complete_graph(4), 2, 0.0, 1.0)

    @pytest.mark.parametrize("n", [1, 4, 8, 12])
    def test_ising_equivalence(self, n):
        """Test E_qubo(x) = E_ising(2x - 1) + offset on every assignment."""
        qubo = random_qubo(n, seed=n)
        model, offset = ising_from_qubo(qubo)
        x = all_states(n, Vartype.BINARY)
        np.testing.assert_allclose(energies(qubo, x), energies(model, 2 * x - 1) + offset)


class TestEnergy:
    """Test suite for energy evaluation."""

    def test_single_ising_energy(self):
        """Test a two-spin model by hand."""
        model = IsingModel(variables=("a", "b"), h=np.array([1.0, -2.0]), J={(0, 1): 0.5})
        assert energy(model, [1, 1]) == pytest.approx(-0.5)
        assert energy(model, [-1, 1]) == pytest.approx(-3.5)

    def test_domain_checked(self):
        """Test wrong lengths and values are rejected."""
        model = IsingModel(variables=("a", "b"), h=np.zeros(2))
        with pytest.raises(InputError, match="values"):
            energy(model, [1])
        with pytest.raises(InputError, match="must be in"):
            energy(model, [0, 1])

    def test_coupling_order_enforced(self):
        """Test J keys must satisfy i < j."""
        with pytest.raises(InputError, match="i < j"):
            IsingModel(variables=("a", "b"), h=np.zeros(2), J={(1, 0): 1.0})


class TestDetect:
    """Test suite for detect_cpcg."""

    @pytest.mark.parametrize(
        "m,n", [(m, n) for m in range(2, 9) for n in range(2, m + 1)]
    )
    def test_round_trip(self, m, n):
        """Test detection recovers (m, n) and a consistent labeling."""
        found = detect_cpcg(product_graph(m, n))
        assert found is not None
        got_m, got_n, labeling = found
        assert (got_m, got_n) == (m, n)
        assert isinstance(labeling, DoublyIndexedLabeling)
        graph = product_graph(m, n)
        for u, v in itertools.combinations(graph.nodes, 2):
            (au, iu), (av, iv) = labeling.pair_of(u), labeling.pair_of(v)
            assert graph.has_edge(u, v) == ((au == av) != (iu == iv))

    def test_relabelled_input(self):
        """Test detection ignores vertex names and order."""
        graph = product_graph(5, 3)
        rng = np.random.default_rng(0)
        names = [f"v{k}" for k in rng.permutation(15)]
        shuffled = nx.relabel_nodes(graph, dict(zip(graph.nodes, names)))
        found = detect_cpcg(shuffled)
        assert found is not None and found[:2] == (5, 3)

    @pytest.mark.parametrize("graph", [
        nx.cycle_graph(5),
        nx.petersen_graph(),
        nx.complete_graph(4),
        nx.cycle_graph(6),
    ])
    def test_non_products(self, graph):
        """Test graphs that are not K_m □ K_n give None."""
        assert detect_cpcg(graph) is None

    def test_missing_edge(self):
        """Test a product with one edge removed is not detected."""
        graph = product_graph(4, 3)
        graph.remove_edge((0, 0), (1, 0))
        assert detect_cpcg(graph) is None

    def test_labeling_bijection_required(self):
        """Test DoublyIndexedLabeling rejects non-bijective pairs."""
        with pytest.raises(InputError, match="bijection"):
            DoublyIndexedLabeling(N=2, K=1, pairs={"a": (1, 1), "b": (1, 1)})
