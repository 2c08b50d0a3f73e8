//! Ordered multipartite Hilbert spaces: labeled slots, state vectors,
//! operators and density matrices with a fixed mixed-radix flattening.
//!
//! The slot order is always A, B, C, a, b, c with A most significant. An
//! absent ancilla is carried as a dimension-1 slot so every protocol works on
//! one uniform layout.

use crate::error::{Error, Result};
use crate::linalg::{eigvalsh, CMat, C64};

pub const TOL_ALGEBRAIC: f64 = 1e-12;
pub const TOL_ASSERT: f64 = 1e-10;
pub const TOL_MEASURE: f64 = 1e-9;

/// Slot labels. Uppercase are the main qutrit systems, lowercase the local
/// ancilla qubits held by the same party.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Slot {
    A,
    B,
    C,
    AncA,
    AncB,
    AncC,
}

impl Slot {
    pub fn name(self) -> &'static str {
        match self {
            Slot::A => "A",
            Slot::B => "B",
            Slot::C => "C",
            Slot::AncA => "a",
            Slot::AncB => "b",
            Slot::AncC => "c",
        }
    }

    /// Ancilla slot belonging to a main slot.
    pub fn ancilla_of(main: Slot) -> Slot {
        match main {
            Slot::A => Slot::AncA,
            Slot::B => Slot::AncB,
            Slot::C => Slot::AncC,
            other => other,
        }
    }
}

/// Ordered list of (label, dimension) pairs describing a composite space.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SystemLayout {
    slots: Vec<(Slot, usize)>,
}

impl SystemLayout {
    pub fn new(slots: Vec<(Slot, usize)>) -> Result<Self> {
        let mut seen = Vec::new();
        for (s, d) in &slots {
            if seen.contains(s) {
                return Err(Error::DuplicateSlot(s.name().into()));
            }
            if *d == 0 {
                return Err(Error::DimensionMismatch(format!(
                    "slot {} has dimension zero",
                    s.name()
                )));
            }
            seen.push(*s);
        }
        Ok(SystemLayout { slots })
    }

    /// The canonical discrimination layout: three qutrits plus ancilla qubits
    /// where `anc = (a, b, c)` flags which ancillas are present (dim 2).
    pub fn discrimination(anc: (bool, bool, bool)) -> Self {
        let d = |p: bool| if p { 2 } else { 1 };
        SystemLayout {
            slots: vec![
                (Slot::A, 3),
                (Slot::B, 3),
                (Slot::C, 3),
                (Slot::AncA, d(anc.0)),
                (Slot::AncB, d(anc.1)),
                (Slot::AncC, d(anc.2)),
            ],
        }
    }

    /// Three main qutrits, no ancillas.
    pub fn bare() -> Self {
        SystemLayout {
            slots: vec![(Slot::A, 3), (Slot::B, 3), (Slot::C, 3)],
        }
    }

    /// Qubit register on the ancilla labels, used for resource states.
    pub fn qubits(labels: &[Slot]) -> Self {
        SystemLayout {
            slots: labels.iter().map(|&s| (s, 2)).collect(),
        }
    }

    pub fn slots(&self) -> &[(Slot, usize)] {
        &self.slots
    }

    pub fn num_slots(&self) -> usize {
        self.slots.len()
    }

    pub fn total_dim(&self) -> usize {
        self.slots.iter().map(|(_, d)| d).product()
    }

    pub fn dim_of(&self, s: Slot) -> Result<usize> {
        self.slots
            .iter()
            .find(|(l, _)| *l == s)
            .map(|(_, d)| *d)
            .ok_or_else(|| Error::UnknownSlot(s.name().into()))
    }

    pub fn index_of(&self, s: Slot) -> Result<usize> {
        self.slots
            .iter()
            .position(|(l, _)| *l == s)
            .ok_or_else(|| Error::UnknownSlot(s.name().into()))
    }

    /// Mixed-radix decomposition of a flat index, big-endian in slot order.
    pub fn digits(&self, mut flat: usize) -> Vec<usize> {
        let mut out = vec![0; self.slots.len()];
        for (i, (_, d)) in self.slots.iter().enumerate().rev() {
            out[i] = flat % d;
            flat /= d;
        }
        out
    }

    pub fn flatten(&self, digits: &[usize]) -> usize {
        let mut idx = 0;
        for ((_, d), &g) in self.slots.iter().zip(digits) {
            debug_assert!(g < *d);
            idx = idx * d + g;
        }
        idx
    }

    pub fn concat(&self, other: &SystemLayout) -> Result<SystemLayout> {
        let mut slots = self.slots.clone();
        for (s, d) in &other.slots {
            if slots.iter().any(|(l, _)| l == s) {
                return Err(Error::DuplicateSlot(s.name().into()));
            }
            slots.push((*s, *d));
        }
        Ok(SystemLayout { slots })
    }
}

/// Complex amplitude vector over a layout.
#[derive(Clone, Debug)]
pub struct StateVector {
    pub layout: SystemLayout,
    pub amplitudes: Vec<C64>,
}

impl StateVector {
    pub fn new(layout: SystemLayout, amplitudes: Vec<C64>) -> Result<Self> {
        if amplitudes.len() != layout.total_dim() {
            return Err(Error::DimensionMismatch(format!(
                "amplitude length {} does not match layout dimension {}",
                amplitudes.len(),
                layout.total_dim()
            )));
        }
        Ok(StateVector { layout, amplitudes })
    }

    /// Basis ket |digits>.
    pub fn basis(layout: SystemLayout, digits: &[usize]) -> Self {
        let mut amp = vec![C64::new(0.0, 0.0); layout.total_dim()];
        amp[layout.flatten(digits)] = C64::new(1.0, 0.0);
        StateVector { layout, amplitudes: amp }
    }

    /// Single-slot ket from raw amplitudes, normalized.
    pub fn single(slot: Slot, amps: &[C64]) -> Self {
        let layout = SystemLayout::new(vec![(slot, amps.len())]).unwrap();
        let mut v = StateVector { layout, amplitudes: amps.to_vec() };
        v.normalize();
        v
    }

    pub fn norm(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn normalize(&mut self) {
        let n = self.norm();
        if n > 0.0 {
            for a in &mut self.amplitudes {
                *a /= n;
            }
        }
    }

    pub fn normalized(&self) -> StateVector {
        let mut v = self.clone();
        v.normalize();
        v
    }

    pub fn is_normalized(&self, tol: f64) -> bool {
        (self.norm() - 1.0).abs() < tol
    }

    pub fn scale(&self, s: C64) -> StateVector {
        let mut v = self.clone();
        for a in &mut v.amplitudes {
            *a *= s;
        }
        v
    }

    pub fn add(&self, other: &StateVector) -> Result<StateVector> {
        if self.layout != other.layout {
            return Err(Error::LayoutMismatch("addition of different layouts".into()));
        }
        let mut v = self.clone();
        for (a, b) in v.amplitudes.iter_mut().zip(&other.amplitudes) {
            *a += b;
        }
        Ok(v)
    }

    /// Density matrix |psi><psi| (not normalized beyond the state itself).
    pub fn to_density(&self) -> DensityMatrix {
        let n = self.amplitudes.len();
        let mut m = CMat::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                m[(i, j)] = self.amplitudes[i] * self.amplitudes[j].conj();
            }
        }
        DensityMatrix {
            op: Operator { layout: self.layout.clone(), matrix: m },
        }
    }
}

/// Kronecker product of state vectors; layouts concatenate in the given order.
pub fn tensor(factors: &[&StateVector]) -> Result<StateVector> {
    let mut layout = SystemLayout::new(vec![])?;
    let mut amps = vec![C64::new(1.0, 0.0)];
    for f in factors {
        layout = layout.concat(&f.layout)?;
        let mut next = Vec::with_capacity(amps.len() * f.amplitudes.len());
        for a in &amps {
            for b in &f.amplitudes {
                next.push(a * b);
            }
        }
        amps = next;
    }
    StateVector::new(layout, amps)
}

/// Inner product, conjugate-linear in the first argument.
pub fn inner(x: &StateVector, y: &StateVector) -> Result<C64> {
    if x.layout != y.layout {
        return Err(Error::LayoutMismatch("inner product of different layouts".into()));
    }
    Ok(x.amplitudes
        .iter()
        .zip(&y.amplitudes)
        .map(|(a, b)| a.conj() * b)
        .sum())
}

/// Square operator over a layout.
#[derive(Clone, Debug)]
pub struct Operator {
    pub layout: SystemLayout,
    pub matrix: CMat,
}

impl Operator {
    pub fn new(layout: SystemLayout, matrix: CMat) -> Result<Self> {
        let d = layout.total_dim();
        if matrix.rows != d || matrix.cols != d {
            return Err(Error::DimensionMismatch(format!(
                "matrix {}x{} does not match layout dimension {}",
                matrix.rows, matrix.cols, d
            )));
        }
        Ok(Operator { layout, matrix })
    }

    pub fn identity(layout: SystemLayout) -> Self {
        let d = layout.total_dim();
        Operator { layout, matrix: CMat::identity(d) }
    }

    pub fn apply(&self, v: &StateVector) -> Result<StateVector> {
        if self.layout != v.layout {
            return Err(Error::LayoutMismatch("operator applied to different layout".into()));
        }
        StateVector::new(self.layout.clone(), self.matrix.apply(&v.amplitudes))
    }
}

/// Embed an operator acting on a subset of slots into a full layout, identity
/// on the remaining slots. `target_slots` must appear in layout order and the
/// small matrix is indexed by the targets' mixed radix in that order; the
/// targets need not be adjacent in the layout.
pub fn embed_local(op: &CMat, layout: &SystemLayout, target_slots: &[Slot]) -> Result<Operator> {
    let mut tidx = Vec::with_capacity(target_slots.len());
    let mut tdims = Vec::with_capacity(target_slots.len());
    for &s in target_slots {
        let i = layout.index_of(s)?;
        tidx.push(i);
        tdims.push(layout.slots()[i].1);
    }
    for w in tidx.windows(2) {
        if w[1] <= w[0] {
            return Err(Error::LayoutMismatch(
                "target slots must be given in layout order".into(),
            ));
        }
    }
    let tdim: usize = tdims.iter().product();
    if op.rows != tdim || op.cols != tdim {
        return Err(Error::DimensionMismatch(format!(
            "operator {}x{} does not match target dimension {}",
            op.rows, op.cols, tdim
        )));
    }
    let d = layout.total_dim();
    let mut full = CMat::zeros(d, d);
    for row in 0..d {
        let digits = layout.digits(row);
        let mut trow = 0;
        for (k, &ti) in tidx.iter().enumerate() {
            trow = trow * tdims[k] + digits[ti];
        }
        for tcol in 0..tdim {
            // unpack tcol into target digits
            let mut rem = tcol;
            let mut cdigits = digits.clone();
            for k in (0..tidx.len()).rev() {
                cdigits[tidx[k]] = rem % tdims[k];
                rem /= tdims[k];
            }
            let entry = op[(trow, tcol)];
            if entry.norm_sqr() == 0.0 {
                continue;
            }
            let col = layout.flatten(&cdigits);
            full[(row, col)] = entry;
        }
    }
    Operator::new(layout.clone(), full)
}

/// Density matrix with Hermiticity / trace / positivity validation helpers.
#[derive(Clone, Debug)]
pub struct DensityMatrix {
    pub op: Operator,
}

impl DensityMatrix {
    pub fn new(layout: SystemLayout, matrix: CMat) -> Result<Self> {
        Ok(DensityMatrix { op: Operator::new(layout, matrix)? })
    }

    pub fn layout(&self) -> &SystemLayout {
        &self.op.layout
    }

    pub fn matrix(&self) -> &CMat {
        &self.op.matrix
    }

    pub fn trace(&self) -> C64 {
        self.op.matrix.trace()
    }

    pub fn validate(&self, tol: f64) -> Result<()> {
        let herm = self.op.matrix.hermiticity_defect();
        if herm > tol {
            return Err(Error::NotHermitian(herm));
        }
        let tr = self.trace();
        if (tr.re - 1.0).abs() > tol || tr.im.abs() > tol {
            return Err(Error::NotUnitTrace(tr.re));
        }
        let w = eigvalsh(&self.op.matrix);
        let min = w.last().copied().unwrap_or(0.0);
        if min < -tol {
            return Err(Error::NotPsd(min));
        }
        Ok(())
    }
}

/// Partial trace keeping the listed slots (result keeps layout order).
pub fn partial_trace(rho: &DensityMatrix, keep: &[Slot]) -> Result<DensityMatrix> {
    if keep.is_empty() {
        return Err(Error::EmptyKeep);
    }
    let layout = rho.layout();
    let mut keep_idx = Vec::new();
    for &s in keep {
        keep_idx.push(layout.index_of(s)?);
    }
    keep_idx.sort_unstable();
    keep_idx.dedup();
    let n = layout.num_slots();
    let trace_idx: Vec<usize> = (0..n).filter(|i| !keep_idx.contains(i)).collect();
    let kept_slots: Vec<(Slot, usize)> = keep_idx.iter().map(|&i| layout.slots()[i]).collect();
    let new_layout = SystemLayout::new(kept_slots)?;
    let kd = new_layout.total_dim();
    let kdims: Vec<usize> = keep_idx.iter().map(|&i| layout.slots()[i].1).collect();
    let tdims: Vec<usize> = trace_idx.iter().map(|&i| layout.slots()[i].1).collect();
    let ttotal: usize = tdims.iter().product();
    let mut out = CMat::zeros(kd, kd);
    let mut digits = vec![0usize; n];
    for ki in 0..kd {
        let kdi = unflatten(ki, &kdims);
        for kj in 0..kd {
            let kdj = unflatten(kj, &kdims);
            let mut acc = C64::new(0.0, 0.0);
            for t in 0..ttotal {
                let td = unflatten(t, &tdims);
                for (pos, &slot_i) in keep_idx.iter().enumerate() {
                    digits[slot_i] = kdi[pos];
                }
                for (pos, &slot_i) in trace_idx.iter().enumerate() {
                    digits[slot_i] = td[pos];
                }
                let row = layout.flatten(&digits);
                for (pos, &slot_i) in keep_idx.iter().enumerate() {
                    digits[slot_i] = kdj[pos];
                }
                let col = layout.flatten(&digits);
                acc += rho.matrix()[(row, col)];
            }
            out[(ki, kj)] = acc;
        }
    }
    DensityMatrix::new(new_layout, out)
}

fn unflatten(mut flat: usize, dims: &[usize]) -> Vec<usize> {
    let mut out = vec![0; dims.len()];
    for i in (0..dims.len()).rev() {
        out[i] = flat % dims[i];
        flat /= dims[i];
    }
    out
}

/// Reduced state of a pure vector on the kept slots.
pub fn reduced_state(psi: &StateVector, keep: &[Slot]) -> Result<DensityMatrix> {
    partial_trace(&psi.to_density(), keep)
}

pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

pub fn cr(re: f64) -> C64 {
    C64::new(re, 0.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn basis_kron_product() {
        let q0 = StateVector::single(Slot::AncA, &[cr(1.0), cr(0.0)]);
        let q1 = StateVector::single(Slot::AncB, &[cr(1.0), cr(0.0)]);
        let t = tensor(&[&q0, &q1]).unwrap();
        assert_eq!(t.amplitudes, vec![cr(1.0), cr(0.0), cr(0.0), cr(0.0)]);
    }

    #[test]
    fn tensor_total_dimension() {
        let main = SystemLayout::bare();
        let anc = SystemLayout::qubits(&[Slot::AncA, Slot::AncB, Slot::AncC]);
        assert_eq!(main.concat(&anc).unwrap().total_dim(), 216);
    }

    #[test]
    fn tensor_distributes_superposition() {
        let plus = StateVector::single(Slot::AncA, &[cr(1.0), cr(1.0)]);
        let zero = StateVector::single(Slot::AncB, &[cr(1.0), cr(0.0)]);
        let t = tensor(&[&plus, &zero]).unwrap();
        let s = 1.0 / 2.0_f64.sqrt();
        assert_abs_diff_eq!(t.amplitudes[0].re, s, epsilon = 1e-15);
        assert_abs_diff_eq!(t.amplitudes[2].re, s, epsilon = 1e-15);
        assert_eq!(t.amplitudes[1], cr(0.0));
    }

    #[test]
    fn tensor_rejects_duplicate_labels() {
        let a = StateVector::single(Slot::A, &[cr(1.0), cr(0.0), cr(0.0)]);
        let b = StateVector::single(Slot::A, &[cr(1.0), cr(0.0), cr(0.0)]);
        assert!(tensor(&[&a, &b]).is_err());
    }

    #[test]
    fn embed_identity_is_identity() {
        let layout = SystemLayout::new(vec![(Slot::A, 3), (Slot::B, 3)]).unwrap();
        let op = embed_local(&CMat::identity(3), &layout, &[Slot::A]).unwrap();
        assert!(op.matrix.sub(&CMat::identity(9)).max_abs() < 1e-15);
    }

    #[test]
    fn embed_projector_on_ancilla() {
        // |1><1| on slot a of layout (A:3, a:2): ones where the a digit is 1
        let layout = SystemLayout::new(vec![(Slot::A, 3), (Slot::AncA, 2)]).unwrap();
        let mut p1 = CMat::zeros(2, 2);
        p1[(1, 1)] = cr(1.0);
        let op = embed_local(&p1, &layout, &[Slot::AncA]).unwrap();
        for i in 0..6 {
            let expect = if i % 2 == 1 { 1.0 } else { 0.0 };
            assert_abs_diff_eq!(op.matrix[(i, i)].re, expect, epsilon = 1e-15);
        }
        assert_abs_diff_eq!(op.matrix.trace().re, 3.0, epsilon = 1e-15);
    }

    #[test]
    fn embed_nonadjacent_slots_factorizes() {
        // op on (A, b) of (A, B, b); check (op x I)(x (x) y) = (op x)(...) structure
        let layout =
            SystemLayout::new(vec![(Slot::A, 2), (Slot::B, 2), (Slot::AncB, 2)]).unwrap();
        // swap-like op on A,b: |a_digit, b_digit> -> phase
        let mut op = CMat::zeros(4, 4);
        op[(0, 0)] = cr(1.0);
        op[(1, 2)] = cr(1.0);
        op[(2, 1)] = cr(1.0);
        op[(3, 3)] = cr(1.0);
        let full = embed_local(&op, &layout, &[Slot::A, Slot::AncB]).unwrap();
        // |1>_A |0>_B |0>_b -> |0>_A |0>_B |1>_b
        let v = StateVector::basis(layout.clone(), &[1, 0, 0]);
        let w = full.apply(&v).unwrap();
        let expect = StateVector::basis(layout, &[0, 0, 1]);
        assert!((inner(&expect, &w).unwrap().re - 1.0).abs() < 1e-14);
    }

    #[test]
    fn partial_trace_bell_is_maximally_mixed() {
        let layout = SystemLayout::qubits(&[Slot::AncA, Slot::AncB]);
        let s = 1.0 / 2.0_f64.sqrt();
        let bell = StateVector::new(layout, vec![cr(s), cr(0.0), cr(0.0), cr(s)]).unwrap();
        let rho = reduced_state(&bell, &[Slot::AncA]).unwrap();
        assert_abs_diff_eq!(rho.matrix()[(0, 0)].re, 0.5, epsilon = 1e-14);
        assert_abs_diff_eq!(rho.matrix()[(1, 1)].re, 0.5, epsilon = 1e-14);
        assert!(rho.matrix()[(0, 1)].norm() < 1e-14);
    }

    #[test]
    fn partial_trace_product_keeps_factor() {
        let layout = SystemLayout::qubits(&[Slot::AncA, Slot::AncB]);
        let v = StateVector::basis(layout, &[0, 0]);
        let rho = reduced_state(&v, &[Slot::AncB]).unwrap();
        assert_abs_diff_eq!(rho.matrix()[(0, 0)].re, 1.0, epsilon = 1e-14);
    }

    #[test]
    fn partial_trace_keep_all_roundtrip() {
        let layout = SystemLayout::qubits(&[Slot::AncA, Slot::AncB]);
        let s = 1.0 / 2.0_f64.sqrt();
        let bell = StateVector::new(layout, vec![cr(s), cr(0.0), cr(0.0), cr(s)]).unwrap();
        let rho = bell.to_density();
        let kept = partial_trace(&rho, &[Slot::AncA, Slot::AncB]).unwrap();
        assert!(kept.matrix().sub(rho.matrix()).max_abs() < 1e-15);
    }

    #[test]
    fn partial_trace_empty_keep_rejected() {
        let layout = SystemLayout::qubits(&[Slot::AncA]);
        let v = StateVector::basis(layout, &[0]);
        assert!(matches!(
            partial_trace(&v.to_density(), &[]),
            Err(Error::EmptyKeep)
        ));
    }

    #[test]
    fn inner_product_examples() {
        let zero = StateVector::single(Slot::A, &[cr(1.0), cr(0.0), cr(0.0)]);
        let one = StateVector::single(Slot::A, &[cr(0.0), cr(1.0), cr(0.0)]);
        assert_eq!(inner(&zero, &one).unwrap(), cr(0.0));
        // unnormalized |0+1> against |0>
        let layout = SystemLayout::new(vec![(Slot::A, 3)]).unwrap();
        let plus_raw = StateVector::new(layout, vec![cr(1.0), cr(1.0), cr(0.0)]).unwrap();
        assert_abs_diff_eq!(inner(&plus_raw, &zero).unwrap().re, 1.0, epsilon = 1e-15);
    }

    #[test]
    fn inner_is_conjugate_linear_in_first_argument() {
        let x = StateVector::single(Slot::A, &[c(0.3, 0.4), c(0.5, -0.2), cr(0.1)]);
        let y = StateVector::single(Slot::A, &[c(-0.1, 0.9), cr(0.2), c(0.0, 0.3)]);
        let lhs = inner(&x.scale(c(0.0, 1.0)), &y).unwrap();
        let rhs = inner(&x, &y).unwrap() * c(0.0, -1.0);
        assert!((lhs - rhs).norm() < 1e-15);
    }
}
