"""
Unit tests for the fault-tolerant embedder service

Tests:
- Zero faults reproduce the ideal construction exactly
- Single-fault extension and the representative 509-qubit chip
- Coupler faults
- Soundness over random fault masks
- Failure reports and configuration checks
"""

import numpy as np
import pytest

from cpcg.exceptions import InputError
from cpcg.models.chimera import ChimeraSpec, Shore
from cpcg.models.layout import Subset
from cpcg.services.chimera_topology import (
    build_hardware,
    ideal_hardware,
    preset_hardware,
    random_fault_mask,
)
from cpcg.services.cpcg_embedder import CpcgEmbedder, bus_plan
from cpcg.services.embedding_core import validate
from cpcg.services.fault_tolerant_embedder import (
    FaultTolerantEmbedder,
    FtConfig,
    capacity_requirements,
    ft_cpcg_embed,
    operable_wires,
)
from cpcg.services.file_formats import embedding_to_json
from cpcg.services.problem_model import product_graph
from cpcg.services.triangular_embedder import nexus_template

C8 = ChimeraSpec(8, 8, 4)


class TestIdealChip:
    """Test suite for fault-free chips."""

    @pytest.mark.parametrize("n", [2, 4, 6, 7])
    def test_matches_construction(self, n):
        """Test zero faults give byte-identical output to the ideal construction."""
        outcome = ft_cpcg_embed(ideal_hardware(8), 8, n)
        assert outcome.success
        assert outcome.details["extensions"] == 0
        expected = CpcgEmbedder(4).construct(8, n, chip_rows=8).embedding
        assert embedding_to_json(outcome.embedding) == embedding_to_json(expected)

    def test_capacity_requirements(self):
        """Test the census of the K_8 □ K_7 plan never exceeds L per cell."""
        plan = bus_plan(8, 7, 4)
        required = capacity_requirements(plan, plan.template)
        assert required.vertical.max() == 4
        assert required.horizontal.max() == 4
        assert required.total == 504

    def test_capacity_requirements_mismatch(self):
        """Test a plan and template for different cliques are rejected."""
        plan = bus_plan(8, 3, 4)
        with pytest.raises(InputError, match="does not match"):
            capacity_requirements(plan, nexus_template(6, 4))


class TestFaults:
    """Test suite for faulty chips."""

    def test_single_dead_qubit(self):
        """Test a dead H(1,0,2) costs K_8 □ K_6 exactly one extension."""
        hw = build_hardware(C8, [C8.to_linear(1, 0, Shore.H, 2)])
        outcome = ft_cpcg_embed(hw, 8, 6)
        assert outcome.success
        assert outcome.details["extensions"] == 1
        assert validate(product_graph(8, 6), hw, outcome.embedding).valid

    def test_dead_coupler(self):
        """Test a dead coupler on a bus row is routed around."""
        a = C8.to_linear(1, 0, Shore.H, 2)
        b = C8.to_linear(1, 1, Shore.H, 2)
        hw = build_hardware(C8, dead_couplers=[(a, b)])
        outcome = ft_cpcg_embed(hw, 8, 6)
        assert outcome.success
        assert outcome.details["extensions"] == 1
        assert validate(product_graph(8, 6), hw, outcome.embedding).valid

    def test_509_chip(self):
        """Test K_8 □ K_6 on the representative 509-qubit chip."""
        hw = preset_hardware("dw2", with_509_mask=True)
        outcome = ft_cpcg_embed(hw, 8, 6)
        assert outcome.success
        assert validate(product_graph(8, 6), hw, outcome.embedding).valid
        assert not outcome.embedding.qubits() & hw.dead_qubits

    def test_operable_wires(self):
        """Test a dead qubit removes its wire from the runs through its cell."""
        dead = C8.to_linear(1, 0, Shore.H, 2)
        hw = build_hardware(C8, [dead])
        plan = bus_plan(8, 6, 4)
        row_run = plan.run((0, Subset.X, 0, Shore.H))
        col_run = plan.run((0, Subset.X, 0, Shore.V))
        assert operable_wires(hw, row_run) == [0, 1, 3]
        assert operable_wires(hw, col_run) == [0, 1, 2, 3]
        assert operable_wires(ideal_hardware(plan.spec.rows), row_run) == [0, 1, 2, 3]

    @pytest.mark.slow
    def test_random_masks_sound(self):
        """Test every success over 200 random masks of 1-8 dead qubits is valid."""
        problem = product_graph(8, 6)
        rng = np.random.default_rng(2024)
        successes = 0
        for trial in range(200):
            count = int(rng.integers(1, 9))
            hw = build_hardware(C8, random_fault_mask(C8, count, seed=trial))
            outcome = ft_cpcg_embed(hw, 8, 6)
            if outcome.success:
                successes += 1
                assert validate(problem, hw, outcome.embedding).valid
            else:
                assert outcome.details["reason"]
        assert successes > 0


class TestFailures:
    """Test suite for failure reports and configuration."""

    def test_insufficient_qubits(self):
        """Test a chip with fewer qubits than variables."""
        outcome = ft_cpcg_embed(ideal_hardware(1), 8, 6)
        assert not outcome.success
        assert outcome.details["reason"] == "insufficient_qubits"

    def test_footprint_exceeds_chip(self):
        """Test K_8 □ K_8 does not fit C_8 even without faults."""
        outcome = ft_cpcg_embed(ideal_hardware(8), 8, 8)
        assert not outcome.success
        assert outcome.details["reason"] == "footprint_exceeds_chip"
        assert "reason=footprint_exceeds_chip" in outcome.report_text()
        assert outcome.report_text().startswith("success=false")

    def test_extension_limit(self):
        """Test a copy that needs more extensions than allowed."""
        hw = build_hardware(C8, [C8.to_linear(1, 0, Shore.H, 2), C8.to_linear(2, 0, Shore.H, 2)])
        config = FtConfig(max_extensions=1, max_total_shift=1, coupler_retries=0)
        outcome = FaultTolerantEmbedder(hw, config).embed(8, 6)
        assert not outcome.success
        assert outcome.details["reason"] in {"max_extensions", "max_total_shift"}
        assert outcome.details["nexus"] == 0

    def test_non_square_chip(self):
        """Test the embedder needs a square chip."""
        with pytest.raises(InputError, match="square"):
            FaultTolerantEmbedder(ideal_hardware(4, 6))

    @pytest.mark.parametrize("kwargs", [
        {"max_extensions": 0},
        {"max_total_shift": 0},
        {"coupler_retries": -1},
    ])
    def test_config_validation(self, kwargs):
        """Test limits must be in range."""
        with pytest.raises(InputError):
            FtConfig(**kwargs)

    def test_diagonal_order_validation(self):
        """Test the sweep order must name both diagonals once."""
        with pytest.raises(InputError, match="diagonal_order"):
            FtConfig(diagonal_order=("lower-left", "lower-left"))

    def test_reversed_diagonal_order(self):
        """Test the upper-right bus space can be swept first."""
        config = FtConfig(diagonal_order=("upper-right", "lower-left"))
        assert config.subset_rank(Subset.Y) == 0
        assert config.subset_rank(Subset.X) == 1
        hw = ideal_hardware(8)
        outcome = FaultTolerantEmbedder(hw, config).embed(8, 5)
        assert outcome.success
        assert validate(product_graph(8, 5), hw, outcome.embedding).valid
