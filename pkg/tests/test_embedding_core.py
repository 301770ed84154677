"""
Unit tests for the embedding core service

Tests:
- Validation of correct embeddings
- Mutation detection (overlap, disconnected chain, dead qubit, missing edge)
- Chain statistics
- Physical lowering: uniform-chain energy shift and exhaustive ground-state agreement
- Strict and majority decoding
"""

import networkx as nx
import numpy as np
import pytest

from cpcg.exceptions import DecodeError, InputError
from cpcg.models.chimera import ChimeraSpec
from cpcg.models.embedding import DecodePolicy, Embedding, ViolationKind
from cpcg.models.problem import IsingModel, Vartype
from cpcg.services.chimera_topology import build_hardware, ideal_hardware
from cpcg.services.cpcg_embedder import cpcg_embed
from cpcg.services.embedding_core import (
    chain_coupler,
    chain_offset,
    chain_stats,
    decode,
    default_chain_strength,
    lower_model,
    spanning_tree,
    validate,
)
from cpcg.services.problem_model import all_states, energies, ground_states, product_graph

MUTATIONS = range(50)


@pytest.fixture(scope="module")
def k87():
    """K_8 □ K_7 problem, ideal C_8 and its product embedding."""
    spec, emb = cpcg_embed(8, 7)
    return product_graph(8, 7), ideal_hardware(spec.rows), emb


def random_ising(graph: nx.Graph, seed: int) -> IsingModel:
    """Integer-valued Ising model on graph."""
    rng = np.random.default_rng(seed)
    variables = tuple(graph.nodes)
    index = {v: i for i, v in enumerate(variables)}
    J = {}
    for u, v in graph.edges:
        i, j = sorted((index[u], index[v]))
        J[(i, j)] = float(rng.choice([-2, -1, 1, 2]))
    h = rng.integers(-2, 3, size=len(variables)).astype(float)
    return IsingModel(variables=variables, h=h, J=J)


class TestValidate:
    """Test suite for validate."""

    def test_product_embedding_valid(self, k87):
        """Test the K_8 □ K_7 construction passes."""
        problem, hw, emb = k87
        assert validate(problem, hw, emb).valid

    def test_spec_mismatch(self, k87):
        """Test an embedding for another chip is rejected outright."""
        problem, _, emb = k87
        with pytest.raises(InputError, match="targets"):
            validate(problem, ideal_hardware(9), emb)

    def test_unmapped_variable(self, k87):
        """Test a dropped chain is reported."""
        problem, hw, emb = k87
        chains = dict(emb.chains)
        del chains[(0, 0)]
        report = validate(problem, hw, emb.with_chains(chains))
        assert ViolationKind.UNMAPPED_VARIABLE in report.kinds()

    @pytest.mark.parametrize("seed", MUTATIONS)
    def test_overlap_detected(self, k87, seed):
        """Test a qubit copied into another chain is reported."""
        problem, hw, emb = k87
        rng = np.random.default_rng(seed)
        variables = emb.variables
        u, v = rng.choice(len(variables), size=2, replace=False)
        stolen = int(rng.choice(sorted(emb.chains[variables[v]])))
        chains = dict(emb.chains)
        chains[variables[u]] = chains[variables[u]] | {stolen}
        report = validate(problem, hw, emb.with_chains(chains))
        assert ViolationKind.OVERLAP in report.kinds()

    @pytest.mark.parametrize("seed", MUTATIONS)
    def test_disconnection_detected(self, k87, seed):
        """Test removing a cut qubit of a chain is reported."""
        problem, hw, emb = k87
        rng = np.random.default_rng(seed)
        variable = emb.variables[rng.integers(len(emb.variables))]
        chain = emb.chains[variable]
        cuts = sorted(nx.articulation_points(hw.graph.subgraph(chain)))
        assert cuts
        chains = dict(emb.chains)
        chains[variable] = chain - {int(rng.choice(cuts))}
        report = validate(problem, hw, emb.with_chains(chains))
        assert ViolationKind.DISCONNECTED_CHAIN in report.kinds()

    @pytest.mark.parametrize("seed", MUTATIONS)
    def test_dead_qubit_detected(self, k87, seed):
        """Test a chain qubit killed on the chip is reported."""
        problem, hw, emb = k87
        rng = np.random.default_rng(seed)
        victim = int(rng.choice(sorted(emb.qubits())))
        faulty = build_hardware(hw.spec, [victim])
        report = validate(problem, faulty, emb)
        assert ViolationKind.DEAD_QUBIT in report.kinds()

    @pytest.mark.parametrize("seed", MUTATIONS)
    def test_missing_edge_detected(self, k87, seed):
        """Test a problem edge between uncoupled chains is reported."""
        problem, hw, emb = k87
        rng = np.random.default_rng(seed)
        variables = emb.variables
        candidates = [
            (u, v)
            for i, u in enumerate(variables)
            for v in variables[i + 1:]
            if not problem.has_edge(u, v) and chain_coupler(hw, emb.chains[u], emb.chains[v]) is None
        ]
        assert candidates
        u, v = candidates[rng.integers(len(candidates))]
        extended = problem.copy()
        extended.add_edge(u, v)
        report = validate(extended, hw, emb)
        assert report.kinds() == {ViolationKind.MISSING_EDGE}

    def test_dead_coupler_inside_chain(self):
        """Test a dead coupler that splits a two-qubit chain."""
        spec = ChimeraSpec(1, 1, 4)
        hw = build_hardware(spec, dead_couplers=[(0, 4)])
        emb = Embedding.from_chains(spec, {"x": [0, 4]})
        graph = nx.Graph()
        graph.add_node("x")
        assert validate(graph, hw, emb).kinds() == {ViolationKind.DISCONNECTED_CHAIN}


class TestChainStats:
    """Test suite for chain_stats and spanning_tree."""

    def test_product_stats(self, k87):
        """Test K_8 □ K_7 has 56 chains of length 9."""
        _, _, emb = k87
        stats = chain_stats(emb)
        assert stats.qubit_total == 504
        assert (stats.chain_min, stats.chain_max) == (9, 9)
        assert stats.chain_mean == 9.0
        assert stats.chain_stddev == 0.0
        assert stats.histogram == {9: 56}

    def test_mixed_lengths(self):
        """Test population standard deviation over lengths 1 and 3."""
        spec = ChimeraSpec(1, 1, 4)
        stats = chain_stats(Embedding.from_chains(spec, {"a": [0], "b": [1, 4, 5]}))
        assert stats.chain_mean == 2.0
        assert stats.chain_stddev == pytest.approx(1.0)
        assert stats.histogram == {1: 1, 3: 1}

    def test_empty(self):
        """Test an empty embedding."""
        stats = chain_stats(Embedding.from_chains(ChimeraSpec(1, 1, 4), {}))
        assert stats.qubit_total == 0

    def test_spanning_tree(self, k87):
        """Test every chain gets |chain| - 1 tree edges over real couplers."""
        _, hw, emb = k87
        for chain in emb.chains.values():
            edges = spanning_tree(hw, chain)
            assert len(edges) == len(chain) - 1
            assert all(hw.has_coupler(a, b) for a, b in edges)


class TestLowerAndDecode:
    """Test suite for lower_model, chain_offset and decode."""

    def test_default_chain_strength(self):
        """Test 1 + the largest per-variable coupling load."""
        model = IsingModel(variables=("a", "b", "c"), h=np.array([1.0, -3.0, 0.0]),
                           J={(0, 1): 2.0, (1, 2): -0.5})
        assert default_chain_strength(model) == pytest.approx(6.5)

    def test_rejects_non_positive_strength(self, k87):
        """Test chain strength must be positive."""
        problem, hw, emb = k87
        with pytest.raises(InputError, match="positive"):
            lower_model(random_ising(problem, 0), emb, hw, 0.0)

    def test_rejects_invalid_embedding(self, k87):
        """Test lowering checks the embedding first."""
        problem, hw, emb = k87
        faulty = build_hardware(hw.spec, [min(emb.qubits())])
        with pytest.raises(InputError, match="DEAD_QUBIT"):
            lower_model(random_ising(problem, 0), emb, faulty, 2.0)

    def test_lowered_shape(self, k87):
        """Test the physical model covers every chain qubit and keeps the total field."""
        problem, hw, emb = k87
        model = random_ising(problem, 1)
        physical = lower_model(model, emb, hw, 3.0)
        assert physical.variables == tuple(sorted(emb.qubits()))
        assert physical.h.sum() == pytest.approx(model.h.sum())
        chain_edges = sum(len(c) - 1 for c in emb.chains.values())
        assert len(physical.J) == chain_edges + len(model.J)

    @pytest.mark.slow
    def test_ground_states_agree(self):
        """Test K_3 □ K_2: physical ground states decode to logical ground states."""
        problem = product_graph(3, 2)
        spec, emb = cpcg_embed(3, 2)
        hw = ideal_hardware(spec.rows)
        model = random_ising(problem, 7)
        strength = default_chain_strength(model)
        physical = lower_model(model, emb, hw, strength)
        assert physical.n == 18

        logical_best, logical_states = ground_states(model)
        physical_best, physical_states = ground_states(physical)
        assert physical_best == pytest.approx(logical_best + chain_offset(emb, strength))

        logical_set = {tuple(int(s) for s in state) for state in logical_states}
        for state in physical_states:
            assignment = dict(zip(physical.variables, (int(s) for s in state)))
            decoded = decode(assignment, emb)
            assert tuple(decoded[v] for v in model.variables) in logical_set

    @pytest.mark.parametrize("strength", [0.5, 3.0])
    def test_uniform_chains_shift_energy(self, strength):
        """Test every uniform chain assignment of K_3 □ K_2 costs its logical energy plus one constant."""
        problem = product_graph(3, 2)
        spec, emb = cpcg_embed(3, 2)
        model = random_ising(problem, 11)
        physical = lower_model(model, emb, ideal_hardware(spec.rows), strength)
        owner = emb.owners()
        shift = chain_offset(emb, strength)

        logical_states = all_states(model.n, Vartype.SPIN)
        assert len(logical_states) == 64
        position = {v: i for i, v in enumerate(model.variables)}
        lifted = np.array([[state[position[owner[q]]] for q in physical.variables] for state in logical_states])
        np.testing.assert_allclose(energies(physical, lifted), energies(model, logical_states) + shift)

    def test_strict_decode(self):
        """Test intact chains decode and broken chains raise."""
        spec = ChimeraSpec(1, 1, 4)
        emb = Embedding.from_chains(spec, {"a": [0, 4], "b": [1, 5]})
        assert decode({0: 1, 4: 1, 1: -1, 5: -1}, emb) == {"a": 1, "b": -1}
        with pytest.raises(DecodeError, match="a"):
            decode({0: 1, 4: -1, 1: -1, 5: -1}, emb)

    def test_majority_decode(self):
        """Test majority voting with ties broken low."""
        spec = ChimeraSpec(1, 1, 4)
        emb = Embedding.from_chains(spec, {"a": [0, 4, 5], "b": [1, 6]})
        result = decode({0: 1, 4: 1, 5: -1, 1: 1, 6: -1}, emb, DecodePolicy.MAJORITY)
        assert result == {"a": 1, "b": -1}

    def test_decode_missing_qubit(self):
        """Test an assignment must cover every chain qubit."""
        emb = Embedding.from_chains(ChimeraSpec(1, 1, 4), {"a": [0, 4]})
        with pytest.raises(InputError, match="lacks"):
            decode({0: 1}, emb)
