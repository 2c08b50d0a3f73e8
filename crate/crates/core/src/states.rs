//! The twelve orthogonal product states in 3x3x3 used as the discrimination
//! instance, general product-state sets, orthogonality verification and the
//! line-oriented text format for user-supplied sets.

use crate::error::{Error, Result};
use crate::linalg::C64;
use crate::tensor::{cr, inner, tensor, Slot, StateVector, SystemLayout};

/// A tripartite product state with explicit per-party factors.
#[derive(Clone, Debug)]
pub struct ProductState {
    /// Normalized dim-3 factor per party, in order A, B, C.
    pub factors: [Vec<C64>; 3],
    /// Tensor product of the factors over the bare layout.
    pub assembled: StateVector,
    /// 1-based index within its set.
    pub index: usize,
}

impl ProductState {
    pub fn from_factors(factors: [Vec<C64>; 3], index: usize) -> Result<Self> {
        for f in &factors {
            if f.len() != 3 {
                return Err(Error::DimensionMismatch(
                    "party factors must be three-dimensional".into(),
                ));
            }
        }
        let norm = |v: &[C64]| {
            let n = v.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
            v.iter().map(|x| x / n).collect::<Vec<_>>()
        };
        let fa = norm(&factors[0]);
        let fb = norm(&factors[1]);
        let fc = norm(&factors[2]);
        let sa = StateVector::new(SystemLayout::new(vec![(Slot::A, 3)])?, fa.clone())?;
        let sb = StateVector::new(SystemLayout::new(vec![(Slot::B, 3)])?, fb.clone())?;
        let sc = StateVector::new(SystemLayout::new(vec![(Slot::C, 3)])?, fc.clone())?;
        let assembled = tensor(&[&sa, &sb, &sc])?;
        Ok(ProductState { factors: [fa, fb, fc], assembled, index })
    }

    pub fn factor(&self, party: Slot) -> &[C64] {
        match party {
            Slot::A => &self.factors[0],
            Slot::B => &self.factors[1],
            Slot::C => &self.factors[2],
            _ => panic!("product states have main-party factors only"),
        }
    }
}

/// Ordered set of product states over a common layout.
#[derive(Clone, Debug)]
pub struct StateSet {
    pub states: Vec<ProductState>,
}

impl StateSet {
    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }
}

fn ket(digit: usize) -> Vec<C64> {
    let mut v = vec![cr(0.0); 3];
    v[digit] = cr(1.0);
    v
}

fn ket_pm(i: usize, j: usize, sign: f64) -> Vec<C64> {
    let mut v = vec![cr(0.0); 3];
    v[i] = cr(1.0);
    v[j] = cr(sign);
    v
}

/// The canonical twelve-state instance. Superposition factors are stored
/// normalized.
pub fn build_canonical_set() -> StateSet {
    let specs: [( Vec<C64>, Vec<C64>, Vec<C64> ); 12] = [
        (ket(0), ket(1), ket_pm(0, 1, 1.0)),
        (ket(0), ket(1), ket_pm(0, 1, -1.0)),
        (ket(0), ket(2), ket_pm(0, 2, 1.0)),
        (ket(0), ket(2), ket_pm(0, 2, -1.0)),
        (ket(1), ket_pm(0, 1, 1.0), ket(0)),
        (ket(1), ket_pm(0, 1, -1.0), ket(0)),
        (ket(2), ket_pm(0, 2, 1.0), ket(0)),
        (ket(2), ket_pm(0, 2, -1.0), ket(0)),
        (ket_pm(0, 1, 1.0), ket(0), ket(1)),
        (ket_pm(0, 1, -1.0), ket(0), ket(1)),
        (ket_pm(0, 2, 1.0), ket(0), ket(2)),
        (ket_pm(0, 2, -1.0), ket(0), ket(2)),
    ];
    let states = specs
        .into_iter()
        .enumerate()
        .map(|(i, (a, b, c))| ProductState::from_factors([a, b, c], i + 1).unwrap())
        .collect();
    StateSet { states }
}

/// Pairwise-orthogonality check; returns the verdict and the largest
/// off-diagonal Gram magnitude.
pub fn verify_orthogonality(set: &StateSet, tol: f64) -> Result<(bool, f64)> {
    let n = set.len();
    let mut worst = 0.0f64;
    for i in 0..n {
        for j in (i + 1)..n {
            let ov = inner(&set.states[i].assembled, &set.states[j].assembled)?.norm();
            worst = worst.max(ov);
        }
    }
    Ok((worst < tol, worst))
}

/// Parse the line-oriented set format: one state per line, parties separated
/// by `|`, each party a signed sum of basis digits, e.g. `0 | 1 | 0+1`.
/// Comments start with `#`; factors are normalized.
pub fn parse_state_set(text: &str) -> Result<StateSet> {
    let mut states = Vec::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let parts: Vec<&str> = line.split('|').collect();
        if parts.len() != 3 {
            return Err(Error::Parse {
                line: lineno + 1,
                msg: format!("expected three party factors separated by '|', got {}", parts.len()),
            });
        }
        let mut factors: Vec<Vec<C64>> = Vec::with_capacity(3);
        for part in &parts {
            factors.push(parse_factor(part, lineno + 1)?);
        }
        let st = ProductState::from_factors(
            [factors[0].clone(), factors[1].clone(), factors[2].clone()],
            states.len() + 1,
        )?;
        states.push(st);
    }
    Ok(StateSet { states })
}

fn parse_factor(s: &str, line: usize) -> Result<Vec<C64>> {
    let mut v = vec![cr(0.0); 3];
    let mut sign = 1.0;
    let mut seen_digit = false;
    for ch in s.chars() {
        match ch {
            ' ' | '\t' => {}
            '+' => sign = 1.0,
            '-' | '\u{2212}' => sign = -1.0,
            d if d.is_ascii_digit() => {
                let digit = d.to_digit(10).unwrap() as usize;
                if digit > 2 {
                    return Err(Error::Parse {
                        line,
                        msg: format!("basis label {digit} exceeds dimension 3"),
                    });
                }
                v[digit] += cr(sign);
                sign = 1.0;
                seen_digit = true;
            }
            other => {
                return Err(Error::Parse { line, msg: format!("unexpected character '{other}'") })
            }
        }
    }
    if !seen_digit {
        return Err(Error::Parse { line, msg: "empty party factor".into() });
    }
    if v.iter().all(|x| x.norm_sqr() == 0.0) {
        return Err(Error::Parse { line, msg: "factor sums to zero".into() });
    }
    Ok(v)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tensor::reduced_state;
    use approx::assert_abs_diff_eq;

    #[test]
    fn canonical_set_has_twelve_states() {
        assert_eq!(build_canonical_set().len(), 12);
    }

    #[test]
    fn canonical_pair_five_six_orthogonal() {
        let set = build_canonical_set();
        let ov = inner(&set.states[4].assembled, &set.states[5].assembled).unwrap();
        assert!(ov.norm() < 1e-15);
    }

    #[test]
    fn canonical_gram_is_identity() {
        let set = build_canonical_set();
        let (ok, worst) = verify_orthogonality(&set, 1e-12).unwrap();
        assert!(ok, "worst off-diagonal {worst:.3e}");
        for s in &set.states {
            assert!(s.assembled.is_normalized(1e-12));
        }
    }

    #[test]
    fn canonical_states_are_rank_one_products() {
        let set = build_canonical_set();
        for s in &set.states {
            for party in [Slot::A, Slot::B, Slot::C] {
                let rho = reduced_state(&s.assembled, &[party]).unwrap();
                let w = crate::linalg::eigvalsh(rho.matrix());
                assert_abs_diff_eq!(w[0], 1.0, epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn non_orthogonal_pair_detected() {
        let a = ProductState::from_factors([ket(0), ket(0), ket(0)], 1).unwrap();
        let b = ProductState::from_factors([ket(0), ket(0), ket_pm(0, 1, 1.0)], 2).unwrap();
        let set = StateSet { states: vec![a, b] };
        let (ok, worst) = verify_orthogonality(&set, 1e-12).unwrap();
        assert!(!ok);
        assert_abs_diff_eq!(worst, 1.0 / 2.0_f64.sqrt(), epsilon = 1e-12);
    }

    #[test]
    fn singleton_is_vacuously_orthogonal() {
        let a = ProductState::from_factors([ket(0), ket(0), ket(0)], 1).unwrap();
        let set = StateSet { states: vec![a] };
        assert!(verify_orthogonality(&set, 1e-12).unwrap().0);
    }

    #[test]
    fn parser_roundtrips_canonical_set() {
        let text = "\
# canonical instance
0 | 1 | 0+1
0 | 1 | 0-1
0 | 2 | 0+2
0 | 2 | 0-2
1 | 0+1 | 0
1 | 0-1 | 0
2 | 0+2 | 0
2 | 0-2 | 0
0+1 | 0 | 1
0-1 | 0 | 1
0+2 | 0 | 2
0-2 | 0 | 2
";
        let parsed = parse_state_set(text).unwrap();
        let canon = build_canonical_set();
        assert_eq!(parsed.len(), 12);
        for (p, c) in parsed.states.iter().zip(&canon.states) {
            let ov = inner(&p.assembled, &c.assembled).unwrap().norm();
            assert_abs_diff_eq!(ov, 1.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn parser_reports_line_numbers() {
        let err = parse_state_set("0 | 1 | 0+1\n0 | | 1\n").unwrap_err();
        match err {
            Error::Parse { line, .. } => assert_eq!(line, 2),
            other => panic!("unexpected error {other}"),
        }
        let err = parse_state_set("0 | 5 | 1\n").unwrap_err();
        match err {
            Error::Parse { line, .. } => assert_eq!(line, 1),
            other => panic!("unexpected error {other}"),
        }
    }
}
