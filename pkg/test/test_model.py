import numpy as np
import pytest

from Fssqm.audit import m_identity_residual
from Fssqm.errors import DimensionError, InvariantViolation, PhiPositivityError, UnsupportedOrderError
from Fssqm.models import ComponentFunction, ComponentKind, StructureFunctionSpec, StructureKind
from Fssqm.utils.fock_service import build_fock_rep
from Fssqm.utils.linalg import adjoint, anticommutator, block, identity, inf_norm, mat_power, scaled_residual
from Fssqm.utils.model_service import (
    build_block_operator,
    build_covariant_derivative,
    build_grading_tau,
    build_hamiltonian,
    build_M_operators,
    build_model,
    build_reduction_unitary,
    build_ssqm_limit,
    build_supercharge,
    covariant_phases,
    cyclic_products,
    hermitian_charges,
    m_tables,
)

OSC = StructureFunctionSpec(StructureKind.OSCILLATOR)
ONE = ComponentFunction.constant()


def _model(lam, dim=None, f=None, spec=OSC, phases=None):
    rep = build_fock_rep(spec, lam, dim or 8 * lam)
    return build_model(rep, f or [ONE] * lam, phases)


@pytest.fixture(scope="module")
def model3():
    return _model(3, 20)


class TestComponentFunction:
    def test_poly_is_ascending(self):
        f = ComponentFunction(ComponentKind.POLY, coeffs=(1.0, 2.0, 3.0))
        assert f.evaluate(np.array([0, 1, 2])).tolist() == [1, 6, 17]

    def test_shifted(self):
        assert ComponentFunction.shifted(2).evaluate(np.arange(4)).real.tolist() == [-2, -1, 0, 1]

    def test_table_holds_last_value(self):
        f = ComponentFunction(ComponentKind.TABLE, values=(1.0, 2.0, 3.0))
        assert f.evaluate(np.arange(5)).real.tolist() == [1, 2, 3, 3, 3]


class TestBlockOperators:
    def test_single_block(self):
        rep = build_fock_rep(OSC, 2, 8)
        out = build_block_operator(rep, {(1, 1): identity(8)}, 2)
        assert np.array_equal(out, np.diag([1.0] * 8 + [0.0] * 8))

    def test_out_of_range_block(self):
        rep = build_fock_rep(OSC, 2, 8)
        with pytest.raises(DimensionError):
            build_block_operator(rep, {(3, 1): identity(8)}, 2)

    def test_supercharge_pattern(self, model3):
        nonzero = {
            (r, c) for r in range(3) for c in range(3)
            if np.abs(block(model3.Q, r, c, model3.dim)).max() > 0
        }
        assert nonzero == {(1, 0), (2, 1), (0, 2)}

    def test_oscillator_blocks_with_unit_f(self, model3):
        rep = model3.rep
        assert np.allclose(model3.A[0], rep.a_op)
        assert np.allclose(model3.A[1], rep.a_op)
        assert np.allclose(model3.A[2], rep.adag_op @ rep.adag_op)
        assert np.allclose(build_supercharge(rep, [ONE] * 3), model3.Q)


class TestHamiltonian:
    def test_lambda3_tables(self, model3):
        n = np.arange(model3.dim)
        assert np.allclose(model3.h_tables[0], n * (n - 1))
        assert np.allclose(model3.h_tables[1], (n + 1) * n)
        assert np.allclose(model3.h_tables[2], (n + 2) * (n + 1))
        H, h = build_hamiltonian(model3.rep, [ONE] * 3)
        assert np.array_equal(H, model3.H)
        assert np.array_equal(h, model3.h_tables)

    def test_h_tables_match_operator_products(self, model3):
        s = np.arange(model3.safe_dim)
        for i, prod in enumerate(cyclic_products(model3.A)):
            assert scaled_residual(prod, np.diag(model3.h_tables[i]), s) <= 1e-12

    @pytest.mark.parametrize("lam", [2, 3, 4, 5, 6])
    def test_q_power_is_h(self, oscillator_model, lam):
        model = oscillator_model(lam, 40)
        cols = model.safe_indices()
        assert scaled_residual(mat_power(model.Q, lam), model.H, cols) <= 1e-9
        assert scaled_residual(mat_power(model.D, lam), model.H, cols) <= 1e-9

    def test_lambda2_h_is_F(self):
        model = _model(2, 16)
        n = np.arange(16)
        assert np.allclose(model.h_tables[0], n)
        assert np.allclose(model.h_tables[1], n + 1)

    def test_phi_positivity(self):
        rep = build_fock_rep(OSC, 3, 12)
        with pytest.raises(PhiPositivityError) as exc:
            build_model(rep, [ComponentFunction.shifted(5), ONE, ONE])
        assert exc.value.n == 2


class TestCovariantDerivative:
    def test_lambda2_phases(self):
        assert np.allclose(covariant_phases(2), [-1j, 1j])

    def test_product_of_phases_is_one(self):
        for lam in range(2, 7):
            assert np.isclose(np.prod(covariant_phases(lam)), 1.0)

    def test_q_commutes_with_d(self):
        model = _model(5, 40)
        q = model.q
        D = build_covariant_derivative(model.rep, [ONE] * 5)
        assert np.array_equal(D, model.D)
        residual = scaled_residual(D @ model.Q - q * model.Q @ D, 0.0, model.safe_indices())
        assert residual <= 1e-9


class TestGrading:
    def test_lambda2_tau(self):
        tau = build_grading_tau(2, 4)
        assert np.allclose(tau, np.diag([-1] * 4 + [1] * 4))

    def test_tau_power_and_q_commutation(self, model3):
        tau = model3.tau
        assert np.allclose(mat_power(tau, 3), identity(3 * model3.dim))
        residual = scaled_residual(tau @ model3.Q - model3.q * model3.Q @ tau, 0.0)
        assert residual <= 1e-12

    def test_reduction_unitary(self):
        rep = build_fock_rep(OSC, 2, 8)
        U = build_reduction_unitary(rep, 2)
        assert np.array_equal(block(U, 0, 1, 8).diagonal().real, [0, 1] * 4)
        assert np.allclose(U @ adjoint(U), identity(16))


class TestMOperators:
    def test_lambda3_closed_form(self, model3):
        n = np.arange(1, 10)
        m1, radicand = m_tables(model3.rep, model3.f_tables)
        assert radicand is None
        assert m1[0, 0] == 0.0
        assert np.allclose(m1[0, n], n**2 + n - 1)

    @pytest.mark.parametrize("lam,c1,c2,trailing", [
        (2, 1.0, -1.0, False),
        (3, 2 ** -0.5, 0.0, True),
        (4, 0.5, 0.5, False),
        (5, 2 ** -1.5, 0.0, True),
    ])
    def test_identities(self, oscillator_model, lam, c1, c2, trailing):
        model = oscillator_model(lam, 40)
        cols = model.safe_indices()
        Q1, Q2 = hermitian_charges(model.Q)
        for Qk, ck in ((Q1, c1), (Q2, c2)):
            assert m_identity_residual(Qk, model.M, ck * model.H, trailing, cols) <= 1e-8

    def test_m_count(self):
        assert len(_model(4, 32).M) == 2
        assert len(_model(5, 40).M) == 2
        assert len(_model(3, 20).M) == 1
        assert _model(6, 24).M == ()

    def test_unsupported_order(self):
        model = _model(6, 24)
        with pytest.raises(UnsupportedOrderError):
            build_M_operators(model)

    def test_radicands_nonnegative(self):
        model = _model(5, 40, f=[ComponentFunction.shifted(1), ComponentFunction.shifted(2), ONE, ONE, ONE])
        reached = model.safe_dim + 4
        assert model.radicands[:reached].min() >= -1e-10


class TestSsqmLimit:
    def test_nilpotent_pair(self):
        model = _model(2, 16)
        calQ, calQd = build_ssqm_limit(model)
        assert inf_norm(calQ @ calQ) == 0.0
        assert inf_norm(calQd @ calQd) == 0.0
        n = np.arange(16)
        expected = np.diag(np.concatenate([n, n + 1]).astype(float))
        assert scaled_residual(anticommutator(calQ, calQd), expected, model.safe_indices()) <= 1e-12

    def test_anticommutator_is_q_squared(self):
        model = _model(2, 16)
        calQ, calQd = build_ssqm_limit(model)
        cols = model.safe_indices()
        assert scaled_residual(anticommutator(calQ, calQd), model.Q @ model.Q, cols) <= 1e-12

    def test_requires_lambda2(self, model3):
        with pytest.raises(UnsupportedOrderError):
            build_ssqm_limit(model3)

    def test_requires_equal_real_f(self):
        model = _model(2, 16, f=[ONE, ComponentFunction.constant(2.0)])
        with pytest.raises(InvariantViolation):
            build_ssqm_limit(model)
