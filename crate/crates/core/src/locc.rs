//! Local measurements with ancillas, protocol-tree execution against a
//! candidate set, node-level validation (completeness, orthogonality
//! preservation, leaf contracts, probability conservation) and the
//! orthogonality-preserving-measurement triviality checker.

use crate::error::{Error, Result};
use crate::linalg::{rank_real, CMat, C64};
use crate::states::StateSet;
use crate::tensor::{cr, embed_local, Slot, StateVector, SystemLayout};
use serde::Serialize;

/// A measurement performed by one party on its main system, optionally joint
/// with its local ancilla qubit. Operator matrices are indexed main-major:
/// row = main_digit * anc_dim + anc_digit.
#[derive(Clone, Debug)]
pub struct LocalMeasurement {
    pub party: Slot,
    pub uses_ancilla: bool,
    /// Outcome label and Kraus operator per outcome.
    pub operators: Vec<(String, CMat)>,
}

impl LocalMeasurement {
    pub fn new(party: Slot, uses_ancilla: bool, operators: Vec<(String, CMat)>) -> Self {
        LocalMeasurement { party, uses_ancilla, operators }
    }

    pub fn local_dim(&self, layout: &SystemLayout) -> Result<usize> {
        let main = layout.dim_of(self.party)?;
        let anc = if self.uses_ancilla {
            layout.dim_of(Slot::ancilla_of(self.party))?
        } else {
            1
        };
        Ok(main * anc)
    }

    /// Max-norm residual of sum M^dagger M - I on the local space.
    pub fn completeness_residual(&self) -> f64 {
        let d = self.operators[0].1.rows;
        let mut acc = CMat::zeros(d, d);
        for (_, m) in &self.operators {
            acc = acc.add(&m.dagger().matmul(m));
        }
        acc.sub(&CMat::identity(d)).max_abs()
    }

    pub fn check_complete(&self, tol: f64) -> Result<()> {
        let res = self.completeness_residual();
        if res > tol {
            return Err(Error::IncompleteMeasurement(res));
        }
        Ok(())
    }

    fn target_slots(&self) -> Vec<Slot> {
        if self.uses_ancilla {
            vec![self.party, Slot::ancilla_of(self.party)]
        } else {
            vec![self.party]
        }
    }

    /// Embed each outcome operator into the full layout.
    pub fn embedded(&self, layout: &SystemLayout) -> Result<Vec<(String, CMat)>> {
        let targets = self.target_slots();
        self.operators
            .iter()
            .map(|(lab, m)| Ok((lab.clone(), embed_local(m, layout, &targets)?.matrix)))
            .collect()
    }
}

/// Unnormalized post-states with branch probabilities, per outcome label.
pub type OutcomeBranches = Vec<(String, Vec<(StateVector, f64)>)>;

/// Apply a measurement to weighted candidates. Returns, per outcome, the
/// unnormalized post-states and branch probabilities
/// p = weight * <psi| M^dagger M |psi>.
pub fn apply_measurement(
    candidates: &[(StateVector, f64)],
    m: &LocalMeasurement,
    layout: &SystemLayout,
    tol: f64,
) -> Result<OutcomeBranches> {
    m.check_complete(tol)?;
    let embedded = m.embedded(layout)?;
    let mut out = Vec::with_capacity(embedded.len());
    for (label, op) in embedded {
        let mut posts = Vec::with_capacity(candidates.len());
        for (psi, w) in candidates {
            if psi.layout != *layout {
                return Err(Error::LayoutMismatch("candidate layout differs".into()));
            }
            let post = StateVector::new(layout.clone(), op.apply(&psi.amplitudes))?;
            let p = w * post.norm().powi(2);
            posts.push((post, p));
        }
        out.push((label, posts));
    }
    Ok(out)
}

/// True iff every outcome keeps all candidate pairs orthogonal. Also returns
/// the worst normalized pair overlap observed.
pub fn check_orthogonality_preserving(
    m: &LocalMeasurement,
    candidates: &[StateVector],
    layout: &SystemLayout,
    tol: f64,
) -> Result<(bool, f64)> {
    m.check_complete(1e-10)?;
    let embedded = m.embedded(layout)?;
    let mut worst = 0.0f64;
    for (_, op) in &embedded {
        let posts: Vec<StateVector> = candidates
            .iter()
            .map(|c| StateVector::new(layout.clone(), op.apply(&c.amplitudes)))
            .collect::<Result<_>>()?;
        worst = worst.max(worst_pair_overlap(&posts));
    }
    Ok((worst < tol, worst))
}

fn worst_pair_overlap(posts: &[StateVector]) -> f64 {
    let mut worst = 0.0f64;
    for i in 0..posts.len() {
        let ni = posts[i].norm();
        if ni * ni < 1e-18 {
            continue;
        }
        for j in (i + 1)..posts.len() {
            let nj = posts[j].norm();
            if nj * nj < 1e-18 {
                continue;
            }
            let ov = crate::tensor::inner(&posts[i], &posts[j]).unwrap().norm();
            worst = worst.max(ov / (ni * nj));
        }
    }
    worst
}

/// Terminal node of a protocol tree.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Leaf {
    /// Exactly one surviving candidate (1-based index).
    Identify(usize),
    /// Exactly two mutually orthogonal survivors; two orthogonal pure states
    /// are always LOCC-distinguishable, so the branch counts as success.
    Pair(usize, usize),
    /// Fallback branch: candidates revert to the initial configuration and an
    /// ambiguous strategy with error weight xi_e applies. This is the branch
    /// whose probability the error formulas track.
    Fallback,
    /// Resource-collapse branch: an ancilla conditioning step failed, leaving
    /// the initial configuration with a product resource. Physically the same
    /// terminal situation as Fallback but accounted separately because the
    /// reference error formulas exclude it.
    Discard,
}

impl Leaf {
    pub fn kind(&self) -> &'static str {
        match self {
            Leaf::Identify(_) => "identify",
            Leaf::Pair(..) => "pair",
            Leaf::Fallback => "fallback",
            Leaf::Discard => "discard",
        }
    }

    pub fn describe(&self) -> String {
        match self {
            Leaf::Identify(i) => format!("identify:{i}"),
            Leaf::Pair(i, j) => format!("pair:{i},{j}"),
            Leaf::Fallback => "fallback".into(),
            Leaf::Discard => "discard".into(),
        }
    }
}

/// Rooted measurement tree. Branches correspond one-to-one to the outcomes of
/// the node measurement.
#[derive(Clone, Debug)]
pub enum ProtocolNode {
    Measure { measurement: LocalMeasurement, branches: Vec<ProtocolNode> },
    Leaf(Leaf),
}

impl ProtocolNode {
    pub fn leaf(l: Leaf) -> Self {
        ProtocolNode::Leaf(l)
    }

    pub fn measure(measurement: LocalMeasurement, branches: Vec<ProtocolNode>) -> Self {
        assert_eq!(
            measurement.operators.len(),
            branches.len(),
            "every outcome needs a branch"
        );
        ProtocolNode::Measure { measurement, branches }
    }
}

/// One root-to-leaf record for one candidate.
#[derive(Clone, Debug, Serialize)]
pub struct BranchRecord {
    pub path: Vec<String>,
    pub probability: f64,
    pub leaf: String,
}

/// Per-candidate execution summary.
#[derive(Clone, Debug, Serialize)]
pub struct CandidateReport {
    pub index: usize,
    pub branches: Vec<BranchRecord>,
    pub total_probability: f64,
    pub residual_mass: f64,
    pub discard_mass: f64,
}

/// Validation flags accumulated over the whole tree.
#[derive(Clone, Debug, Serialize)]
pub struct ProtocolChecks {
    pub completeness: bool,
    pub orthogonality: bool,
    pub leaf_contracts: bool,
    pub worst_completeness_residual: f64,
    pub worst_pair_overlap: f64,
    /// Smallest reversion fidelity seen at fallback and discard leaves.
    pub min_revert_fidelity: f64,
    pub failures: Vec<String>,
}

impl ProtocolChecks {
    pub fn all_pass(&self) -> bool {
        self.completeness && self.orthogonality && self.leaf_contracts
    }
}

/// Full execution report of a protocol tree against a candidate set.
#[derive(Clone, Debug, Serialize)]
pub struct RunReport {
    pub protocol: String,
    pub r: f64,
    pub per_state: Vec<CandidateReport>,
    pub checks: ProtocolChecks,
    pub residual_mass_avg: f64,
    pub discard_mass_avg: f64,
}

impl RunReport {
    /// Average probability mass routed through branches whose path contains
    /// the given outcome label.
    pub fn mass_through(&self, label: &str) -> f64 {
        let mut acc = 0.0;
        for cand in &self.per_state {
            for b in &cand.branches {
                if b.path.iter().any(|p| p == label) {
                    acc += b.probability;
                }
            }
        }
        acc / self.per_state.len() as f64
    }

    pub fn to_json(&self) -> serde_json::Value {
        // serde_json maps are ordered, which keeps output diff-stable
        serde_json::to_value(self).expect("report serialization")
    }
}

struct Executor<'a> {
    layout: &'a SystemLayout,
    originals: &'a [StateVector],
    main_slots: Vec<Slot>,
    anc_slots: Vec<Slot>,
    tol_orth: f64,
    tol_leaf: f64,
    checks: ProtocolChecks,
    records: Vec<Vec<BranchRecord>>,
}

impl<'a> Executor<'a> {
    fn run(&mut self, states: &[StateVector], node: &ProtocolNode, path: &mut Vec<String>) {
        match node {
            ProtocolNode::Leaf(leaf) => {
                self.visit_leaf(states, *leaf, path);
            }
            ProtocolNode::Measure { measurement, branches } => {
                let residual = measurement.completeness_residual();
                self.checks.worst_completeness_residual =
                    self.checks.worst_completeness_residual.max(residual);
                if residual > 1e-12 {
                    self.checks.completeness = false;
                    self.checks.failures.push(format!(
                        "incomplete measurement at path {:?}: residual {residual:.3e}",
                        path
                    ));
                }
                let embedded = measurement
                    .embedded(self.layout)
                    .expect("embedding measurement into protocol layout");
                for ((label, op), branch) in embedded.iter().zip(branches) {
                    let posts: Vec<StateVector> = states
                        .iter()
                        .map(|s| {
                            StateVector::new(self.layout.clone(), op.apply(&s.amplitudes)).unwrap()
                        })
                        .collect();
                    let worst = worst_pair_overlap(&posts);
                    self.checks.worst_pair_overlap = self.checks.worst_pair_overlap.max(worst);
                    if worst > self.tol_orth {
                        self.checks.orthogonality = false;
                        let msg = format!(
                            "orthogonality broken after outcome {label} at path {:?}: overlap {worst:.3e}",
                            path
                        );
                        if !self.checks.failures.contains(&msg) {
                            self.checks.failures.push(msg);
                        }
                    }
                    path.push(label.clone());
                    self.run(&posts, branch, path);
                    path.pop();
                }
            }
        }
    }

    fn visit_leaf(&mut self, states: &[StateVector], leaf: Leaf, path: &[String]) {
        let probs: Vec<f64> = states.iter().map(|s| s.norm().powi(2)).collect();
        let survivors: Vec<usize> = probs
            .iter()
            .enumerate()
            .filter(|(_, &p)| p > self.tol_leaf)
            .map(|(i, _)| i + 1)
            .collect();
        let total: f64 = probs.iter().sum();
        if total > self.tol_leaf {
            match leaf {
                Leaf::Identify(k) => {
                    if survivors != vec![k] {
                        self.checks.leaf_contracts = false;
                        self.checks.failures.push(format!(
                            "identify leaf {k} at path {:?} has survivors {:?}",
                            path, survivors
                        ));
                    }
                }
                Leaf::Pair(i, j) => {
                    if survivors != vec![i.min(j), i.max(j)] {
                        self.checks.leaf_contracts = false;
                        self.checks.failures.push(format!(
                            "pair leaf ({i},{j}) at path {:?} has survivors {:?}",
                            path, survivors
                        ));
                    } else {
                        let a = &states[i - 1];
                        let b = &states[j - 1];
                        let ov = crate::tensor::inner(a, b).unwrap().norm()
                            / (a.norm() * b.norm());
                        if ov > self.tol_orth {
                            self.checks.leaf_contracts = false;
                            self.checks.failures.push(format!(
                                "pair leaf ({i},{j}) at path {:?} not orthogonal: {ov:.3e}",
                                path
                            ));
                        }
                    }
                }
                Leaf::Fallback | Leaf::Discard => {
                    for (idx, s) in states.iter().enumerate() {
                        if probs[idx] <= self.tol_leaf {
                            continue;
                        }
                        let f = self.revert_fidelity(idx, s);
                        self.checks.min_revert_fidelity =
                            self.checks.min_revert_fidelity.min(f);
                        if f < 1.0 - 1e-10 {
                            self.checks.leaf_contracts = false;
                            self.checks.failures.push(format!(
                                "{} leaf at path {:?}: candidate {} reversion fidelity {f:.12}",
                                leaf.kind(),
                                path,
                                idx + 1
                            ));
                        }
                    }
                }
            }
        }
        for (idx, p) in probs.iter().enumerate() {
            self.records[idx].push(BranchRecord {
                path: path.to_vec(),
                probability: *p,
                leaf: leaf.describe(),
            });
        }
    }

    /// Fidelity of the main-register marginal with the original candidate:
    /// <psi_i| Tr_anc(|w><w|) |psi_i> for the normalized post-state w.
    fn revert_fidelity(&self, idx: usize, post: &StateVector) -> f64 {
        let w = post.normalized();
        let rho = crate::tensor::reduced_state(&w, &self.main_slots).unwrap();
        let orig = &self.originals[idx];
        let v = rho.matrix().apply(&orig.amplitudes);
        orig.amplitudes
            .iter()
            .zip(&v)
            .map(|(a, b)| (a.conj() * b).re)
            .sum()
    }
}

/// Execute a protocol tree. `candidates` supplies the per-party product
/// states, `resource` the shared ancilla state on slots (a, b, c); the run
/// operates over the concatenated layout.
pub fn run_protocol(
    name: &str,
    r: f64,
    tree: &ProtocolNode,
    candidates: &StateSet,
    resource: &StateVector,
) -> Result<RunReport> {
    let layout = candidates.states[0].assembled.layout.concat(&resource.layout)?;
    let extended: Vec<StateVector> = candidates
        .states
        .iter()
        .map(|s| crate::tensor::tensor(&[&s.assembled, resource]))
        .collect::<Result<_>>()?;
    let originals: Vec<StateVector> =
        candidates.states.iter().map(|s| s.assembled.clone()).collect();
    let mut exec = Executor {
        layout: &layout,
        originals: &originals,
        main_slots: vec![Slot::A, Slot::B, Slot::C],
        anc_slots: vec![Slot::AncA, Slot::AncB, Slot::AncC],
        tol_orth: 1e-10,
        tol_leaf: 1e-12,
        checks: ProtocolChecks {
            completeness: true,
            orthogonality: true,
            leaf_contracts: true,
            worst_completeness_residual: 0.0,
            worst_pair_overlap: 0.0,
            min_revert_fidelity: 1.0,
            failures: Vec::new(),
        },
        records: vec![Vec::new(); candidates.len()],
    };
    let mut path = Vec::new();
    exec.run(&extended, tree, &mut path);
    let _ = &exec.anc_slots;

    let mut per_state = Vec::with_capacity(candidates.len());
    let mut res_acc = 0.0;
    let mut dis_acc = 0.0;
    for (idx, branches) in exec.records.into_iter().enumerate() {
        let total: f64 = branches.iter().map(|b| b.probability).sum();
        let residual: f64 = branches
            .iter()
            .filter(|b| b.leaf == "fallback")
            .map(|b| b.probability)
            .sum();
        let discard: f64 = branches
            .iter()
            .filter(|b| b.leaf == "discard")
            .map(|b| b.probability)
            .sum();
        if (total - 1.0).abs() > 1e-10 {
            exec.checks.leaf_contracts = false;
            exec.checks
                .failures
                .push(format!("candidate {} total probability {total}", idx + 1));
        }
        res_acc += residual;
        dis_acc += discard;
        per_state.push(CandidateReport {
            index: idx + 1,
            branches,
            total_probability: total,
            residual_mass: residual,
            discard_mass: discard,
        });
    }
    let n = per_state.len() as f64;
    Ok(RunReport {
        protocol: name.to_string(),
        r,
        per_state,
        checks: exec.checks,
        residual_mass_avg: res_acc / n,
        discard_mass_avg: dis_acc / n,
    })
}

/// Report of the orthogonality-preserving-measurement triviality analysis for
/// one party.
#[derive(Clone, Debug, Serialize)]
pub struct OpmConstraintReport {
    pub party: String,
    pub num_constraints: usize,
    /// Real dimension of the space of Hermitian E = M^dagger M compatible with
    /// keeping the set orthogonal.
    pub solution_dim: usize,
    /// True iff that space is exactly span{identity}: every allowed
    /// measurement is trivial and the party cannot start.
    pub trivial_only: bool,
}

/// Build the real-linear constraints Re/Im <p_i|E|p_j> = 0 for every ordered
/// pair whose complementary-party overlap is nonzero, and measure the
/// dimension of the Hermitian solution space.
pub fn opm_triviality_check(set: &StateSet, party: Slot) -> Result<OpmConstraintReport> {
    if set.is_empty() {
        return Err(Error::InvalidParameter("empty candidate set".into()));
    }
    let d = 3usize;
    let complements: [Slot; 2] = match party {
        Slot::A => [Slot::B, Slot::C],
        Slot::B => [Slot::A, Slot::C],
        Slot::C => [Slot::A, Slot::B],
        other => return Err(Error::UnknownSlot(other.name().into())),
    };
    // Hermitian parametrization: d real diagonal entries, then (Re, Im) per
    // upper off-diagonal entry.
    let npar = d * d;
    let mut rows: Vec<Vec<f64>> = Vec::new();
    let dot = |x: &[C64], y: &[C64]| -> C64 { x.iter().zip(y).map(|(a, b)| a.conj() * b).sum() };
    let n = set.len();
    for i in 0..n {
        for j in 0..n {
            if i == j {
                continue;
            }
            let mut w = cr(1.0);
            for comp in complements {
                w *= dot(set.states[i].factor(comp), set.states[j].factor(comp));
            }
            if w.norm() < 1e-12 {
                continue;
            }
            let pi = set.states[i].factor(party);
            let pj = set.states[j].factor(party);
            // <p_i|E|p_j> = sum_kl conj(pi_k) pj_l E_kl, scaled by w
            let mut coeff = vec![C64::new(0.0, 0.0); npar];
            for k in 0..d {
                coeff[k] = w * pi[k].conj() * pj[k];
            }
            let mut off = d;
            for k in 0..d {
                for l in (k + 1)..d {
                    let fkl = w * pi[k].conj() * pj[l];
                    let flk = w * pi[l].conj() * pj[k];
                    // E_kl = x + iy, E_lk = x - iy
                    coeff[off] = fkl + flk;
                    coeff[off + 1] = (fkl - flk) * C64::new(0.0, 1.0);
                    off += 2;
                }
            }
            rows.push(coeff.iter().map(|z| z.re).collect());
            rows.push(coeff.iter().map(|z| z.im).collect());
        }
    }
    let num_constraints = rows.len();
    let rank = rank_real(&rows, 1e-10);
    let solution_dim = npar - rank;
    Ok(OpmConstraintReport {
        party: party.name().to_string(),
        num_constraints,
        solution_dim,
        trivial_only: solution_dim == 1,
    })
}

/// The three-outcome template on Alice's qutrit plus ancilla qubit:
/// M1 = X P[|0>_A; |0>_a] + Y P[(|1>,|2>)_A; |1>_a],
/// M2 = Y P[|0>_A; |1>_a] + X P[(|1>,|2>)_A; |0>_a],
/// M3 = I_A x (sqrt(1-X^2) P[|0>_a] + sqrt(1-Y^2) P[|1>_a]).
pub fn measurement_template(x: f64, y: f64) -> Result<LocalMeasurement> {
    for (name, v) in [("X", x), ("Y", y)] {
        if !(v > 0.0 && v <= 1.0 + 1e-12) {
            return Err(Error::InvalidParameter(format!("{name} = {v} outside (0, 1]")));
        }
    }
    let x = x.min(1.0);
    let y = y.min(1.0);
    let d = 6; // (A, a) main-major
    let idx = |main: usize, anc: usize| main * 2 + anc;
    let mut m1 = CMat::zeros(d, d);
    m1[(idx(0, 0), idx(0, 0))] = cr(x);
    m1[(idx(1, 1), idx(1, 1))] = cr(y);
    m1[(idx(2, 1), idx(2, 1))] = cr(y);
    let mut m2 = CMat::zeros(d, d);
    m2[(idx(0, 1), idx(0, 1))] = cr(y);
    m2[(idx(1, 0), idx(1, 0))] = cr(x);
    m2[(idx(2, 0), idx(2, 0))] = cr(x);
    let mut m3 = CMat::zeros(d, d);
    let f0 = (1.0 - x * x).max(0.0).sqrt();
    let f1 = (1.0 - y * y).max(0.0).sqrt();
    for main in 0..3 {
        m3[(idx(main, 0), idx(main, 0))] = cr(f0);
        m3[(idx(main, 1), idx(main, 1))] = cr(f1);
    }
    Ok(LocalMeasurement::new(
        Slot::A,
        true,
        vec![("M1".into(), m1), ("M2".into(), m2), ("M3".into(), m3)],
    ))
}
