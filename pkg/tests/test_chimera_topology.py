"""
Unit tests for the Chimera topology service

Tests:
- Qubit and coupler counts
- Coordinate round-trip
- Adjacency rule and degrees
- Fault handling
- Capacity maps
- Presets and seeded fault masks
"""

import networkx as nx
import pytest

from cpcg.exceptions import InputError
from cpcg.models.chimera import ChimeraSpec, Shore
from cpcg.services.chimera_topology import (
    build_hardware,
    capacity_map,
    ideal_hardware,
    is_ideal_coupler,
    neighbors,
    preset_hardware,
    random_fault_mask,
    representative_509_mask,
)


@pytest.fixture
def c2():
    """Ideal C_{2,2,4}."""
    return ideal_hardware(2)


@pytest.fixture
def c8():
    """Ideal C_{8,8,4}."""
    return ideal_hardware(8)


class TestChimeraSpec:
    """Test suite for chip dimensions and ids."""

    def test_counts(self):
        """Test qubit and coupler formulas."""
        spec = ChimeraSpec(8, 8, 4)
        assert spec.num_qubits == 512
        assert ChimeraSpec(2, 2, 4).num_couplers == 80

    def test_round_trip(self):
        """Test coord -> id -> coord is the identity."""
        spec = ChimeraSpec(3, 5, 4)
        for q in range(spec.num_qubits):
            assert spec.to_linear(*spec.to_coord(q)) == q

    def test_id_convention(self):
        """Test the frozen row-major, V-before-H numbering."""
        spec = ChimeraSpec(2, 2, 4)
        assert spec.to_linear(0, 0, Shore.V, 0) == 0
        assert spec.to_linear(0, 0, Shore.H, 0) == 4
        assert spec.to_linear(0, 1, Shore.V, 0) == 8
        assert spec.to_linear(1, 0, Shore.H, 3) == 23

    def test_shore_too_small(self):
        """Test that L < 2 is rejected."""
        with pytest.raises(InputError, match="shore"):
            ChimeraSpec(2, 2, 1)

    def test_describe(self):
        """Test the C_{N,M,L} name."""
        assert ChimeraSpec(8, 8, 4).describe() == "C_{8,8,4}"


class TestBuildHardware:
    """Test suite for build_hardware and neighbours."""

    def test_c8_ideal(self, c8):
        """Test 512 qubits with maximum degree 6."""
        assert c8.num_operable == 512
        assert max(d for _, d in c8.graph.degree) == 6

    def test_single_cell_is_k44(self):
        """Test C_{1,1,4} is K_{4,4}."""
        hw = ideal_hardware(1)
        assert hw.num_operable == 8
        assert all(d == 4 for _, d in hw.graph.degree)
        assert nx.is_isomorphic(hw.graph, nx.complete_bipartite_graph(4, 4))

    def test_c2_couplers(self, c2):
        """Test 80 couplers on C_{2,2,4} by enumeration."""
        assert c2.graph.number_of_edges() == 80

    def test_degree_bound(self, c8):
        """Test every qubit has degree at most L + 2, corner cells L or L + 1."""
        spec = c8.spec
        for q, d in c8.graph.degree:
            assert d <= 6
            row, col, _, _ = spec.to_coord(q)
            if (row, col) in {(0, 0), (0, 7), (7, 0), (7, 7)}:
                assert d in (4, 5)

    def test_neighbors_h_qubit(self, c2):
        """Test H(0,0,0) sees the four V-qubits of its cell and H(0,1,0)."""
        spec = c2.spec
        q = spec.to_linear(0, 0, Shore.H, 0)
        expected = {spec.to_linear(0, 0, Shore.V, b) for b in range(4)}
        expected.add(spec.to_linear(0, 1, Shore.H, 0))
        assert neighbors(c2, q) == expected

    def test_neighbors_single_cell(self):
        """Test V(0,0,2) of a lone cell sees exactly the four H-qubits."""
        hw = ideal_hardware(1)
        q = hw.spec.to_linear(0, 0, Shore.V, 2)
        assert neighbors(hw, q) == {hw.spec.to_linear(0, 0, Shore.H, b) for b in range(4)}

    def test_dead_neighbor_removed(self):
        """Test a dead H(0,1,0) lowers the degree of H(0,0,0) to 4."""
        spec = ChimeraSpec(2, 2, 4)
        hw = build_hardware(spec, [spec.to_linear(0, 1, Shore.H, 0)])
        assert len(neighbors(hw, spec.to_linear(0, 0, Shore.H, 0))) == 4

    def test_neighbors_of_dead_qubit(self):
        """Test that asking for a dead qubit's neighbours fails."""
        spec = ChimeraSpec(2, 2, 4)
        hw = build_hardware(spec, [3])
        with pytest.raises(InputError, match="dead"):
            neighbors(hw, 3)
        with pytest.raises(InputError, match="out of range"):
            neighbors(hw, 999)

    def test_out_of_range_fault(self):
        """Test that fault ids outside the chip are rejected."""
        with pytest.raises(InputError, match="outside"):
            build_hardware(ChimeraSpec(2, 2, 4), [32])

    def test_non_coupler_fault(self):
        """Test that a dead coupler must be a real coupler."""
        with pytest.raises(InputError, match="not a coupler"):
            build_hardware(ChimeraSpec(2, 2, 4), dead_couplers=[(0, 1)])

    def test_dead_coupler_only_removes_edge(self, c2):
        """Test a dead coupler keeps both qubits operable."""
        hw = build_hardware(c2.spec, dead_couplers=[(4, 0)])
        assert hw.num_operable == 32
        assert not hw.has_coupler(0, 4)
        assert hw.graph.number_of_edges() == 79

    def test_fault_monotonicity(self, c8):
        """Test that faults never add edges."""
        spec = c8.spec
        faulty = build_hardware(spec, random_fault_mask(spec, 8, seed=3))
        ideal_edges = {frozenset(e) for e in c8.graph.edges}
        assert {frozenset(e) for e in faulty.graph.edges} <= ideal_edges

    def test_is_ideal_coupler(self):
        """Test in-cell and inter-cell coupler recognition."""
        spec = ChimeraSpec(2, 2, 4)
        assert is_ideal_coupler(spec, 0, 4)
        assert is_ideal_coupler(spec, 0, spec.to_linear(1, 0, Shore.V, 0))
        assert not is_ideal_coupler(spec, 0, spec.to_linear(1, 0, Shore.V, 1))
        assert not is_ideal_coupler(spec, 4, spec.to_linear(1, 0, Shore.H, 0))


class TestCapacityMap:
    """Test suite for capacity_map."""

    def test_ideal_full(self, c8):
        """Test every cell of an ideal chip has capacity (L, L)."""
        cap = capacity_map(c8)
        assert all(cap.at(r, c) == (4, 4) for r in range(8) for c in range(8))

    def test_one_dead_v_qubit(self):
        """Test a dead V-qubit in (3,3) lowers only that cell's vertical capacity."""
        spec = ChimeraSpec(8, 8, 4)
        cap = capacity_map(build_hardware(spec, [spec.to_linear(3, 3, Shore.V, 1)]))
        assert cap.at(3, 3) == (3, 4)
        assert cap.total == 511

    def test_empty_cell(self):
        """Test a cell with all 2L qubits dead has capacity (0, 0)."""
        spec = ChimeraSpec(2, 2, 4)
        dead = [spec.to_linear(1, 1, s, o) for s in Shore for o in range(4)]
        assert capacity_map(build_hardware(spec, dead)).at(1, 1) == (0, 0)

    def test_consistency(self):
        """Test the capacity total equals the operable qubit count."""
        spec = ChimeraSpec(8, 8, 4)
        hw = build_hardware(spec, random_fault_mask(spec, 20, seed=11))
        assert capacity_map(hw).total == hw.num_operable == 492


class TestPresetsAndMasks:
    """Test suite for chip presets and fault masks."""

    def test_presets(self):
        """Test preset sizes."""
        assert preset_hardware("dw2").num_operable == 512
        assert preset_hardware("dw2x").num_operable == 1152
        assert preset_hardware("c16").num_operable == 2048

    def test_509_mask(self):
        """Test the representative mask leaves 509 operable qubits."""
        hw = preset_hardware("dw2", with_509_mask=True)
        assert hw.num_operable == 509
        assert sorted(hw.dead_qubits) == representative_509_mask(hw.spec)

    def test_unknown_preset(self):
        """Test an unknown preset name."""
        with pytest.raises(InputError, match="unknown chip preset"):
            preset_hardware("pegasus")

    def test_random_mask_seeded(self):
        """Test the same seed gives the same distinct qubits."""
        spec = ChimeraSpec(8, 8, 4)
        first = random_fault_mask(spec, 8, seed=5)
        assert first == random_fault_mask(spec, 8, seed=5)
        assert len(set(first)) == 8

    def test_random_mask_exclude(self):
        """Test excluded qubits are never chosen."""
        spec = ChimeraSpec(1, 1, 4)
        assert random_fault_mask(spec, 7, seed=1, exclude=[0]) == list(range(1, 8))
        with pytest.raises(InputError, match="cannot kill"):
            random_fault_mask(spec, 8, seed=1, exclude=[0])
