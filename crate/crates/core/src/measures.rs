//! Concurrence of two-qubit states (mixed and pure cuts) and the three-qubit
//! tangle, used as numeric oracles against the closed forms elsewhere in the
//! crate.

use crate::error::{Error, Result};
use crate::linalg::{singular_values, sqrtm_psd, CMat};
use crate::tensor::{partial_trace, reduced_state, DensityMatrix, Slot, StateVector};

/// Concurrence value together with the spin-flip eigenvalues that produced it.
#[derive(Clone, Debug)]
pub struct ConcurrenceResult {
    pub value: f64,
    /// Square roots of the eigenvalues of rho * rho_tilde, decreasing.
    pub spin_flip_eigs: [f64; 4],
}

/// Tangle of a pure three-qubit state for a chosen focus qubit.
#[derive(Clone, Debug)]
pub struct TangleResult {
    /// Squared concurrence of the focus-versus-rest bipartition.
    pub c2_focus_rest: f64,
    /// Squared pair concurrences with the two other qubits.
    pub c2_pairs: [f64; 2],
    pub tau: f64,
}

fn sigma_yy() -> CMat {
    // sigma_y tensor sigma_y is real: antidiagonal (-1, 1, 1, -1)
    let mut m = CMat::zeros(4, 4);
    m[(0, 3)] = crate::tensor::cr(-1.0);
    m[(1, 2)] = crate::tensor::cr(1.0);
    m[(2, 1)] = crate::tensor::cr(1.0);
    m[(3, 0)] = crate::tensor::cr(-1.0);
    m
}

/// Wootters concurrence of a two-qubit density matrix.
///
/// The spin-flip eigenvalues are obtained as singular values of
/// sqrt(rho) (sy x sy) conj(sqrt(rho)), which agrees with the square roots of
/// eig(rho rho_tilde) but keeps absolute accuracy near zero.
pub fn concurrence_mixed(rho: &DensityMatrix, tol: f64) -> Result<ConcurrenceResult> {
    if rho.matrix().rows != 4 {
        return Err(Error::DimensionMismatch(format!(
            "concurrence needs a 4x4 two-qubit state, got {}x{}",
            rho.matrix().rows,
            rho.matrix().cols
        )));
    }
    rho.validate(tol)?;
    let s = sqrtm_psd(rho.matrix());
    let k = s.matmul(&sigma_yy()).matmul(&s.conj());
    let sv = singular_values(&k);
    let mut lam = [0.0f64; 4];
    for (i, v) in sv.iter().take(4).enumerate() {
        lam[i] = v.max(0.0);
    }
    let value = (lam[0] - lam[1] - lam[2] - lam[3]).max(0.0);
    Ok(ConcurrenceResult { value, spin_flip_eigs: lam })
}

/// Concurrence of a pure state across the cut (focus | rest), valid when the
/// focus marginal is two-dimensional: C = 2 sqrt(det rho_focus).
pub fn concurrence_pure_cut(psi: &StateVector, focus: &[Slot]) -> Result<f64> {
    let rho = reduced_state(psi, focus)?;
    if rho.matrix().rows != 2 {
        return Err(Error::DimensionMismatch(format!(
            "focus marginal must be two-dimensional, got {}",
            rho.matrix().rows
        )));
    }
    let m = rho.matrix();
    let det = (m[(0, 0)] * m[(1, 1)] - m[(0, 1)] * m[(1, 0)]).re;
    Ok(2.0 * det.max(0.0).sqrt())
}

/// Three-tangle of a pure three-qubit state:
/// tau = C^2(focus|rest) - C^2(focus, q1) - C^2(focus, q2),
/// with pair concurrences from the mixed-state formula on the traced-out
/// two-qubit marginals.
pub fn tangle(psi: &StateVector, focus: Slot, tol: f64) -> Result<TangleResult> {
    let slots = psi.layout.slots();
    if slots.len() != 3 || slots.iter().any(|(_, d)| *d != 2) {
        return Err(Error::DimensionMismatch(
            "tangle needs a pure state over three qubit slots".into(),
        ));
    }
    if !psi.is_normalized(1e-8) {
        return Err(Error::InvalidParameter("tangle input must be normalized".into()));
    }
    let others: Vec<Slot> = slots
        .iter()
        .map(|(s, _)| *s)
        .filter(|s| *s != focus)
        .collect();
    if others.len() != 2 {
        return Err(Error::UnknownSlot(focus.name().into()));
    }
    let c_cut = concurrence_pure_cut(psi, &[focus])?;
    let rho_full = psi.to_density();
    let pair = |other: Slot| -> Result<f64> {
        let mut keep = [focus, other];
        keep.sort();
        let rho2 = partial_trace(&rho_full, &keep)?;
        Ok(concurrence_mixed(&rho2, tol)?.value)
    };
    let c1 = pair(others[0])?;
    let c2 = pair(others[1])?;
    Ok(TangleResult {
        c2_focus_rest: c_cut * c_cut,
        c2_pairs: [c1 * c1, c2 * c2],
        tau: c_cut * c_cut - c1 * c1 - c2 * c2,
    })
}
