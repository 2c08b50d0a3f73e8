//! Concrete resource states and protocol trees for the five built-in
//! discrimination protocols (corollary1, corollary2, theorem1, theorem2,
//! theorem3), plus the closed-form branch-mass formulas they are checked
//! against.
//!
//! Tree reconstruction notes. The twisted template on Alice's side must be
//! mass-balanced against the resource's ancilla marginal or it merges the
//! |0+-k>_A candidate pairs, so:
//!
//! * theorem1 / corollary2 run M(1, r^2) directly,
//! * theorem2 first lets Charlie measure his ancilla in the computational
//!   basis; the c=0 branch holds a boosted two-qubit resource
//!   (r^2|00> + |11>/sqrt2)_ab for which M(1, sqrt2 r^2) (or the X-scaled
//!   variant above the zero-error point) is exactly balanced. The c=1 branch
//!   collapses the resource to a product and is a discard leaf.
//! * theorem3 mirrors that shape with conditioning on both b and c. The
//!   conditioned resource is then a pure product, which provably breaks the
//!   downstream eliminations; the run report flags this and the branch-mass
//!   formulas remain exact. See the run-report checks rather than trusting
//!   the tree shape.

use crate::error::{Error, Result};
use crate::ghz::{build_ghz_state, GhzParams};
use crate::linalg::CMat;
use crate::locc::{measurement_template, Leaf, LocalMeasurement, ProtocolNode, RunReport};
use crate::states::build_canonical_set;
use crate::tensor::{cr, Slot, StateVector, SystemLayout};
use std::f64::consts::{FRAC_PI_2, FRAC_PI_4};

/// Resource families backing the protocols.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ResourceFamily {
    /// Two-qubit (r^2|00> + |11>)/sqrt(1+r^4) shared by Alice and Bob.
    BellLike,
    /// psi(pi/2, pi/2, pi/2, r): no reduced bipartite entanglement.
    CaseI,
    /// psi(pi/2, pi/2, pi/4, r): one entangled pair (a, b).
    CaseII,
    /// psi(pi/2, pi/4, pi/4, r): two entangled pairs (a, b) and (a, c).
    CaseIII,
}

impl ResourceFamily {
    pub fn name(self) -> &'static str {
        match self {
            ResourceFamily::BellLike => "BellLike",
            ResourceFamily::CaseI => "CaseI",
            ResourceFamily::CaseII => "CaseII",
            ResourceFamily::CaseIII => "CaseIII",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "belllike" | "bell" => Ok(ResourceFamily::BellLike),
            "casei" | "case1" => Ok(ResourceFamily::CaseI),
            "caseii" | "case2" => Ok(ResourceFamily::CaseII),
            "caseiii" | "case3" => Ok(ResourceFamily::CaseIII),
            other => Err(Error::InvalidParameter(format!("unknown family '{other}'"))),
        }
    }

    pub fn ghz_params(self, r: f64) -> Option<GhzParams> {
        let angles = match self {
            ResourceFamily::BellLike => return None,
            ResourceFamily::CaseI => (FRAC_PI_2, FRAC_PI_2, FRAC_PI_2),
            ResourceFamily::CaseII => (FRAC_PI_2, FRAC_PI_2, FRAC_PI_4),
            ResourceFamily::CaseIII => (FRAC_PI_2, FRAC_PI_4, FRAC_PI_4),
        };
        Some(GhzParams::new(angles.0, angles.1, angles.2, r).expect("valid family params"))
    }
}

/// A realized resource state on the ancilla slots.
#[derive(Clone, Debug)]
pub struct ResourceSpec {
    pub family: ResourceFamily,
    pub r: f64,
    pub realized: StateVector,
    /// Which of the ancillas (a, b, c) are dimension two.
    pub ancillas: (bool, bool, bool),
}

pub fn make_resource(family: ResourceFamily, r: f64) -> Result<ResourceSpec> {
    if !(r > 0.0 && r <= 1.0) {
        return Err(Error::InvalidParameter(format!("r = {r} outside (0, 1]")));
    }
    let u = r.powi(4);
    match family {
        ResourceFamily::BellLike => {
            let n = (1.0 + u).sqrt();
            let layout = SystemLayout::new(vec![
                (Slot::AncA, 2),
                (Slot::AncB, 2),
                (Slot::AncC, 1),
            ])?;
            let realized = StateVector::new(
                layout,
                vec![cr(r * r / n), cr(0.0), cr(0.0), cr(1.0 / n)],
            )?;
            Ok(ResourceSpec { family, r, realized, ancillas: (true, true, false) })
        }
        _ => {
            let params = family.ghz_params(r).unwrap();
            let g = build_ghz_state(&params)?;
            Ok(ResourceSpec { family, r, realized: g.state, ancillas: (true, true, true) })
        }
    }
}

/// Numeric pair concurrences (C_AB, C_AC, C_BC) of the realized resource.
pub fn resource_concurrences(res: &ResourceSpec, tol: f64) -> Result<(f64, f64, f64)> {
    use crate::measures::concurrence_mixed;
    use crate::tensor::partial_trace;
    let rho = res.realized.to_density();
    if res.family == ResourceFamily::BellLike {
        let ab = partial_trace(&rho, &[Slot::AncA, Slot::AncB])?;
        let c = concurrence_mixed(&ab, tol)?.value;
        return Ok((c, 0.0, 0.0));
    }
    let mut out = [0.0; 3];
    for (i, keep) in [
        [Slot::AncA, Slot::AncB],
        [Slot::AncA, Slot::AncC],
        [Slot::AncB, Slot::AncC],
    ]
    .iter()
    .enumerate()
    {
        let m = partial_trace(&rho, keep)?;
        out[i] = concurrence_mixed(&m, tol)?.value;
    }
    Ok((out[0], out[1], out[2]))
}

/// Numeric tangle of the realized resource; zero for the two-qubit family.
pub fn resource_tangle(res: &ResourceSpec, tol: f64) -> Result<f64> {
    if res.family == ResourceFamily::BellLike {
        return Ok(0.0);
    }
    Ok(crate::measures::tangle(&res.realized, Slot::AncA, tol)?.tau)
}

/// Fallback-branch mass tracked by the error formulas, as a function of r.
pub fn residual_formula(family: ResourceFamily, r: f64) -> f64 {
    let u = r.powi(4);
    let n = 1.0 + u;
    match family {
        ResourceFamily::BellLike | ResourceFamily::CaseI => (1.0 - u) / n,
        ResourceFamily::CaseII => {
            if u <= 0.5 {
                (1.0 - 2.0 * u) / (2.0 * n)
            } else {
                (u / n) * (1.0 - 1.0 / (2.0 * u))
            }
        }
        ResourceFamily::CaseIII => {
            if r * r <= 0.5 {
                (1.0 - 4.0 * u) / (4.0 * n)
            } else {
                (u / n) * (1.0 - 1.0 / (4.0 * u))
            }
        }
    }
}

/// Mass of the ancilla-conditioning discard branches, as a function of r.
pub fn discard_formula(family: ResourceFamily, r: f64) -> f64 {
    let n = 1.0 + r.powi(4);
    match family {
        ResourceFamily::BellLike | ResourceFamily::CaseI => 0.0,
        ResourceFamily::CaseII => 1.0 / (2.0 * n),
        ResourceFamily::CaseIII => 3.0 / (4.0 * n),
    }
}

/// Per-branch success mass (each of M1 and M2), as a function of r.
pub fn success_branch_formula(family: ResourceFamily, r: f64) -> f64 {
    let u = r.powi(4);
    let n = 1.0 + u;
    match family {
        ResourceFamily::BellLike | ResourceFamily::CaseI => u / n,
        ResourceFamily::CaseII => {
            if u <= 0.5 {
                u / n
            } else {
                1.0 / (2.0 * n)
            }
        }
        ResourceFamily::CaseIII => {
            if r * r <= 0.5 {
                u / n
            } else {
                1.0 / (4.0 * n)
            }
        }
    }
}

// operator helpers on (main 3) x (ancilla 2), main-major indexing

fn pma(main_digits: &[usize], anc: usize) -> CMat {
    let mut m = CMat::zeros(6, 6);
    for &d in main_digits {
        let i = d * 2 + anc;
        m[(i, i)] = cr(1.0);
    }
    m
}

fn peel(party: Slot, anc_digit: usize) -> LocalMeasurement {
    let n1 = pma(&[1], anc_digit);
    let n2 = pma(&[2], anc_digit);
    let nbar = CMat::identity(6).sub(&n1).sub(&n2);
    LocalMeasurement::new(
        party,
        true,
        vec![("N1".into(), n1), ("N2".into(), n2), ("Nbar".into(), nbar)],
    )
}

fn alice_peel(anc_digit: usize) -> LocalMeasurement {
    let r1 = pma(&[1], anc_digit);
    let r2 = pma(&[2], anc_digit);
    let rbar = CMat::identity(6).sub(&r1).sub(&r2);
    LocalMeasurement::new(
        Slot::A,
        true,
        vec![("R1".into(), r1), ("R2".into(), r2), ("Rbar".into(), rbar)],
    )
}

fn digit_split(party: Slot) -> LocalMeasurement {
    let p = |d: usize| {
        let mut m = CMat::zeros(3, 3);
        m[(d, d)] = cr(1.0);
        m
    };
    LocalMeasurement::new(
        party,
        false,
        vec![("Q1".into(), p(1)), ("Q2".into(), p(2)), ("Q0".into(), p(0))],
    )
}

fn pm_split(party: Slot, hi: usize) -> LocalMeasurement {
    // {P[(|0> + |hi>)/sqrt2], complement} resolves a +- pair on `party`
    let s = 1.0 / 2.0_f64.sqrt();
    let mut v = vec![cr(0.0); 3];
    v[0] = cr(s);
    v[hi] = cr(s);
    let plus = CMat::outer(&v, &v);
    let rest = CMat::identity(3).sub(&plus);
    LocalMeasurement::new(
        party,
        false,
        vec![("plus".into(), plus), ("rest".into(), rest)],
    )
}

fn ancilla_gate(party: Slot, label: char) -> LocalMeasurement {
    let mut p0 = CMat::zeros(2, 2);
    p0[(0, 0)] = cr(1.0);
    let mut p1 = CMat::zeros(2, 2);
    p1[(1, 1)] = cr(1.0);
    let id3 = CMat::identity(3);
    LocalMeasurement::new(
        party,
        true,
        vec![
            (format!("{label}0"), id3.kron(&p0)),
            (format!("{label}1"), id3.kron(&p1)),
        ],
    )
}

/// Elimination cascade after a successful template outcome. `db` is the
/// ancilla digit tagging Bob-side survivors of the |1>,|2> B-groups and `da`
/// the digit tagging Alice-side survivors of the |1>,|2> A-groups.
fn success_subtree(db: usize, da: usize) -> ProtocolNode {
    let id = |i: usize| ProtocolNode::leaf(Leaf::Identify(i));
    let charlie12 = ProtocolNode::measure(pm_split(Slot::C, 1), vec![id(1), id(2)]);
    let charlie34 = ProtocolNode::measure(pm_split(Slot::C, 2), vec![id(3), id(4)]);
    let bob56 = ProtocolNode::measure(pm_split(Slot::B, 1), vec![id(5), id(6)]);
    let bob78 = ProtocolNode::measure(pm_split(Slot::B, 2), vec![id(7), id(8)]);
    let alice_inner = ProtocolNode::measure(
        alice_peel(da),
        vec![bob56, bob78, ProtocolNode::leaf(Leaf::Discard)],
    );
    let charlie_inner = ProtocolNode::measure(
        digit_split(Slot::C),
        vec![
            ProtocolNode::leaf(Leaf::Pair(9, 10)),
            ProtocolNode::leaf(Leaf::Pair(11, 12)),
            alice_inner,
        ],
    );
    ProtocolNode::measure(peel(Slot::B, db), vec![charlie12, charlie34, charlie_inner])
}

fn template_stage(x: f64, y: f64, m2_db: usize, m2_da: usize) -> Result<ProtocolNode> {
    Ok(ProtocolNode::measure(
        measurement_template(x, y)?,
        vec![
            success_subtree(0, 1),
            success_subtree(m2_db, m2_da),
            ProtocolNode::leaf(Leaf::Fallback),
        ],
    ))
}

/// GHZ-assisted protocol: two balanced twisted outcomes, no fallback mass.
pub fn protocol_corollary1() -> Result<(ResourceSpec, ProtocolNode)> {
    let res = make_resource(ResourceFamily::CaseI, 1.0)?;
    Ok((res, template_stage(1.0, 1.0, 1, 0)?))
}

/// Two-qubit partially entangled resource, template M(1, r^2).
pub fn protocol_theorem1(r: f64) -> Result<(ResourceSpec, ProtocolNode)> {
    let res = make_resource(ResourceFamily::BellLike, r)?;
    Ok((res, template_stage(1.0, r * r, 1, 0)?))
}

/// Three-qubit CaseI resource, same template and residual as theorem1.
pub fn protocol_corollary2(r: f64) -> Result<(ResourceSpec, ProtocolNode)> {
    let res = make_resource(ResourceFamily::CaseI, r)?;
    Ok((res, template_stage(1.0, r * r, 1, 0)?))
}

/// CaseII resource: Charlie conditions his ancilla, then the balanced
/// template M(1, sqrt2 r^2) below the zero-error point r^4 = 1/2 and
/// M(1/(sqrt2 r^2), 1) above it.
pub fn protocol_theorem2(r: f64) -> Result<(ResourceSpec, ProtocolNode)> {
    let res = make_resource(ResourceFamily::CaseII, r)?;
    let u = r.powi(4);
    let (x, y) = if u <= 0.5 {
        (1.0, 2.0_f64.sqrt() * r * r)
    } else {
        (1.0 / (2.0_f64.sqrt() * r * r), 1.0)
    };
    let tree = ProtocolNode::measure(
        ancilla_gate(Slot::C, 'c'),
        vec![template_stage(x, y, 1, 0)?, ProtocolNode::leaf(Leaf::Discard)],
    );
    Ok((res, tree))
}

/// CaseIII resource: Bob and Charlie condition their ancillas, then
/// M(1, 2 r^2) below r^2 = 1/2 and M(1/(2 r^2), 1) above. The conditioned
/// resource is a product state, so the elimination cascade necessarily breaks
/// orthogonality; run reports carry the failure flags.
pub fn protocol_theorem3(r: f64) -> Result<(ResourceSpec, ProtocolNode)> {
    let res = make_resource(ResourceFamily::CaseIII, r)?;
    let s = r * r;
    let (x, y) = if s <= 0.5 { (1.0, 2.0 * s) } else { (1.0 / (2.0 * s), 1.0) };
    // b collapses to |0>, so both template branches peel with digit 0 on Bob
    let alice = ProtocolNode::measure(
        measurement_template(x, y)?,
        vec![
            success_subtree(0, 1),
            success_subtree(0, 0),
            ProtocolNode::leaf(Leaf::Fallback),
        ],
    );
    let charlie_gate = ProtocolNode::measure(
        ancilla_gate(Slot::C, 'c'),
        vec![alice, ProtocolNode::leaf(Leaf::Discard)],
    );
    let tree = ProtocolNode::measure(
        ancilla_gate(Slot::B, 'b'),
        vec![charlie_gate, ProtocolNode::leaf(Leaf::Discard)],
    );
    Ok((res, tree))
}

/// Named protocols exposed by the command line and the sweep driver.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ProtocolKind {
    Corollary1,
    Corollary2,
    Theorem1,
    Theorem2,
    Theorem3,
}

impl ProtocolKind {
    pub fn name(self) -> &'static str {
        match self {
            ProtocolKind::Corollary1 => "corollary1",
            ProtocolKind::Corollary2 => "corollary2",
            ProtocolKind::Theorem1 => "theorem1",
            ProtocolKind::Theorem2 => "theorem2",
            ProtocolKind::Theorem3 => "theorem3",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "corollary1" => Ok(ProtocolKind::Corollary1),
            "corollary2" => Ok(ProtocolKind::Corollary2),
            "theorem1" => Ok(ProtocolKind::Theorem1),
            "theorem2" => Ok(ProtocolKind::Theorem2),
            "theorem3" => Ok(ProtocolKind::Theorem3),
            other => Err(Error::InvalidParameter(format!("unknown protocol '{other}'"))),
        }
    }

    pub fn family(self) -> ResourceFamily {
        match self {
            ProtocolKind::Corollary1 | ProtocolKind::Corollary2 => ResourceFamily::CaseI,
            ProtocolKind::Theorem1 => ResourceFamily::BellLike,
            ProtocolKind::Theorem2 => ResourceFamily::CaseII,
            ProtocolKind::Theorem3 => ResourceFamily::CaseIII,
        }
    }

    pub fn build(self, r: f64) -> Result<(ResourceSpec, ProtocolNode)> {
        match self {
            ProtocolKind::Corollary1 => protocol_corollary1(),
            ProtocolKind::Corollary2 => protocol_corollary2(r),
            ProtocolKind::Theorem1 => protocol_theorem1(r),
            ProtocolKind::Theorem2 => protocol_theorem2(r),
            ProtocolKind::Theorem3 => protocol_theorem3(r),
        }
    }
}

/// Protocol for a resource family at parameter r.
pub fn family_protocol(family: ResourceFamily, r: f64) -> Result<(ResourceSpec, ProtocolNode)> {
    match family {
        ResourceFamily::BellLike => protocol_theorem1(r),
        ResourceFamily::CaseI => protocol_corollary2(r),
        ResourceFamily::CaseII => protocol_theorem2(r),
        ResourceFamily::CaseIII => protocol_theorem3(r),
    }
}

/// Build the canonical instance, the protocol and run it.
pub fn execute(kind: ProtocolKind, r: f64) -> Result<RunReport> {
    let (res, tree) = kind.build(r)?;
    let set = build_canonical_set();
    crate::locc::run_protocol(kind.name(), if kind == ProtocolKind::Corollary1 { 1.0 } else { r }, &tree, &set, &res.realized)
}
