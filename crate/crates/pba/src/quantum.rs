//! Finite projector systems: algebras of Hermitian idempotents under the
//! commutation relation, built either by closing a generating set or by
//! gluing explicit measurement contexts, plus density-matrix states.

use nalgebra::DMatrix;
use num_complex::Complex64;
use thiserror::Error;

use crate::algebra::{AlgebraError, PartialBooleanAlgebra};
use crate::bits::BitMatrix;
use crate::builder::{Amalgam, Part};
use crate::graph::AtomGraph;
use crate::state::{is_state, AlgebraState};

pub type CMatrix = DMatrix<Complex64>;

/// Validity tolerance for Hermiticity, idempotence and trace checks.
pub const PROJECTOR_TOL: f64 = 1e-9;
/// Commutation and deduplication tolerance.
pub const COMPAT_TOL: f64 = 1e-8;
/// Default cap on closure size.
pub const DEFAULT_CLOSURE_CAP: usize = 4096;

#[derive(Debug, Error)]
pub enum QuantumError {
    #[error("matrix is not Hermitian within {PROJECTOR_TOL}: deviation {0:.3e}")]
    NotHermitian(f64),
    #[error("matrix is not idempotent within {PROJECTOR_TOL}: deviation {0:.3e}")]
    NotIdempotent(f64),
    #[error("projector `{0}` is not rank one (trace {1:.6})")]
    NotRankOne(String, f64),
    #[error("dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),
    #[error("cap exceeded: closure grew past {0} projectors")]
    CapExceeded(usize),
    #[error("not a density matrix: {0}")]
    NotDensityMatrix(String),
    #[error("closure invariant broken: {0}")]
    ClosureInvariant(String),
    #[error("derived probabilities violate the state conditions on `{0}`")]
    StateConditionsViolated(String),
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
}

/// A Hermitian idempotent matrix, validated on construction.
#[derive(Debug, Clone)]
pub struct Projector {
    matrix: CMatrix,
}

impl Projector {
    pub fn new(matrix: CMatrix) -> Result<Self, QuantumError> {
        if matrix.nrows() != matrix.ncols() {
            return Err(QuantumError::DimensionMismatch(
                matrix.nrows(),
                matrix.ncols(),
            ));
        }
        let herm = (&matrix - matrix.adjoint()).norm();
        if herm > PROJECTOR_TOL {
            return Err(QuantumError::NotHermitian(herm));
        }
        let idem = (&matrix * &matrix - &matrix).norm();
        if idem > PROJECTOR_TOL {
            return Err(QuantumError::NotIdempotent(idem));
        }
        Ok(Projector { matrix })
    }

    /// Rank-1 projector onto the span of a (not necessarily normalized)
    /// complex vector.
    pub fn from_vector(v: &[Complex64]) -> Result<Self, QuantumError> {
        let d = v.len();
        let norm2: f64 = v.iter().map(|z| z.norm_sqr()).sum();
        assert!(norm2 > 0.0, "cannot project onto the zero vector");
        let mut m = CMatrix::zeros(d, d);
        for i in 0..d {
            for j in 0..d {
                m[(i, j)] = v[i] * v[j].conj() / Complex64::new(norm2, 0.0);
            }
        }
        Projector::new(m)
    }

    /// Rank-1 projector from a real vector.
    pub fn from_real_vector(v: &[f64]) -> Result<Self, QuantumError> {
        let cv: Vec<Complex64> = v.iter().map(|&x| Complex64::new(x, 0.0)).collect();
        Projector::from_vector(&cv)
    }

    pub fn zero(dim: usize) -> Self {
        Projector {
            matrix: CMatrix::zeros(dim, dim),
        }
    }

    pub fn identity(dim: usize) -> Self {
        Projector {
            matrix: CMatrix::identity(dim, dim),
        }
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    /// Rank as the rounded trace.
    pub fn rank(&self) -> usize {
        self.matrix.trace().re.round().max(0.0) as usize
    }

    pub fn commutes_with(&self, other: &Projector) -> bool {
        (&self.matrix * &other.matrix - &other.matrix * &self.matrix).norm() <= COMPAT_TOL
    }

    pub fn distance(&self, other: &Projector) -> f64 {
        (&self.matrix - &other.matrix).norm()
    }
}

/// Hermitian positive semidefinite unit-trace matrix.
#[derive(Debug, Clone)]
pub struct DensityMatrix {
    matrix: CMatrix,
}

impl DensityMatrix {
    pub fn new(matrix: CMatrix) -> Result<Self, QuantumError> {
        if matrix.nrows() != matrix.ncols() {
            return Err(QuantumError::DimensionMismatch(
                matrix.nrows(),
                matrix.ncols(),
            ));
        }
        let herm = (&matrix - matrix.adjoint()).norm();
        if herm > PROJECTOR_TOL {
            return Err(QuantumError::NotDensityMatrix(format!(
                "not Hermitian (deviation {herm:.3e})"
            )));
        }
        let tr = matrix.trace();
        if (tr.re - 1.0).abs() > PROJECTOR_TOL || tr.im.abs() > PROJECTOR_TOL {
            return Err(QuantumError::NotDensityMatrix(format!("trace {tr}")));
        }
        let eig = nalgebra::SymmetricEigen::new(matrix.clone());
        if let Some(min) = eig
            .eigenvalues
            .iter()
            .cloned()
            .reduce(f64::min)
            .filter(|&m| m < -PROJECTOR_TOL)
        {
            return Err(QuantumError::NotDensityMatrix(format!(
                "negative eigenvalue {min:.3e}"
            )));
        }
        Ok(DensityMatrix { matrix })
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    /// Maximally mixed state.
    pub fn maximally_mixed(dim: usize) -> Self {
        DensityMatrix {
            matrix: CMatrix::identity(dim, dim) / Complex64::new(dim as f64, 0.0),
        }
    }

    /// Pure state from a (not necessarily normalized) vector.
    pub fn pure(v: &[Complex64]) -> Result<Self, QuantumError> {
        Ok(DensityMatrix {
            matrix: Projector::from_vector(v)?.matrix,
        })
    }
}

/// A finite projector system: Hermitian idempotents indexed like the
/// elements of the induced algebra.
#[derive(Debug, Clone)]
pub struct QuantumSystem {
    pub projectors: Vec<Projector>,
    pub algebra: PartialBooleanAlgebra,
    pub generator_ids: Vec<usize>,
    /// Generator pairs whose distance fell inside `[1e-9, 1e-6]`; they did
    /// not merge, but sit close to the dedup tolerance.
    pub near_duplicates: Vec<(String, String, f64)>,
}

impl QuantumSystem {
    pub fn dim(&self) -> usize {
        self.projectors.first().map_or(0, Projector::dim)
    }

    /// Atom graph of the induced algebra, with projector-rank sanity intact.
    pub fn atom_graph(&self) -> AtomGraph {
        self.algebra.atom_graph()
    }
}

/// Close a labeled generating set under negation and, for commuting pairs,
/// products and joins; dedup by Frobenius distance; build the algebra tables
/// over the commutation relation.
pub fn generate_system(
    generators: &[(String, Projector)],
    cap: usize,
) -> Result<QuantumSystem, QuantumError> {
    assert!(!generators.is_empty(), "at least one generator required");
    let dim = generators[0].1.dim();
    for (_, p) in generators {
        if p.dim() != dim {
            return Err(QuantumError::DimensionMismatch(dim, p.dim()));
        }
    }

    let mut labels: Vec<String> = vec!["0".into(), "1".into()];
    let mut mats: Vec<CMatrix> = vec![Projector::zero(dim).matrix, Projector::identity(dim).matrix];
    let mut generator_ids = Vec::with_capacity(generators.len());
    let mut near_duplicates = Vec::new();

    let find = |mats: &[CMatrix], m: &CMatrix| -> Option<usize> {
        mats.iter().position(|x| (x - m).norm() <= COMPAT_TOL)
    };

    for (name, p) in generators {
        match find(&mats, &p.matrix) {
            Some(idx) => generator_ids.push(idx),
            None => {
                mats.push(p.matrix.clone());
                labels.push(name.clone());
                generator_ids.push(mats.len() - 1);
            }
        }
    }
    for (gi, (name_i, pi)) in generators.iter().enumerate() {
        for (name_j, pj) in generators.iter().skip(gi + 1) {
            let d = pi.distance(pj);
            if (PROJECTOR_TOL..=1e-6).contains(&d) {
                near_duplicates.push((name_i.clone(), name_j.clone(), d));
            }
        }
    }

    // Fixed-point closure.
    let identity = CMatrix::identity(dim, dim);
    let mut frontier = 0usize;
    while frontier < mats.len() {
        let upto = mats.len();
        if upto > cap {
            return Err(QuantumError::CapExceeded(cap));
        }
        for i in frontier..upto {
            let neg = &identity - &mats[i];
            if find(&mats, &neg).is_none() {
                let label = derived_label(&labels, &format!("~{}", labels[i]), mats.len());
                mats.push(neg);
                labels.push(label);
            }
        }
        let upto2 = mats.len();
        for i in 0..upto2 {
            for j in i.max(frontier)..upto2 {
                if i == j {
                    continue;
                }
                let com = (&mats[i] * &mats[j] - &mats[j] * &mats[i]).norm();
                if com > COMPAT_TOL {
                    continue;
                }
                let meet = symmetrize_product(&mats[i], &mats[j]);
                if find(&mats, &meet).is_none() {
                    let label = derived_label(&labels, "", mats.len());
                    mats.push(meet);
                    labels.push(label);
                }
                let join = &mats[i] + &mats[j] - symmetrize_product(&mats[i], &mats[j]);
                if find(&mats, &join).is_none() {
                    let label = derived_label(&labels, "", mats.len());
                    mats.push(join);
                    labels.push(label);
                }
                if mats.len() > cap {
                    return Err(QuantumError::CapExceeded(cap));
                }
            }
        }
        frontier = upto;
    }

    let projectors: Vec<Projector> = mats
        .iter()
        .map(|m| Projector::new(m.clone()))
        .collect::<Result<_, _>>()
        .map_err(|e| {
            QuantumError::ClosureInvariant(format!("closure left the projector set: {e}"))
        })?;

    let algebra = tables_from_projectors(&labels, &projectors)?;
    Ok(QuantumSystem {
        projectors,
        algebra,
        generator_ids,
        near_duplicates,
    })
}

fn derived_label(labels: &[String], candidate: &str, idx: usize) -> String {
    if !candidate.is_empty() && candidate.len() <= 12 && !labels.iter().any(|l| l == candidate) {
        candidate.to_string()
    } else {
        format!("e{idx}")
    }
}

/// Commuting products can pick up tiny anti-Hermitian noise; clean it.
fn symmetrize_product(a: &CMatrix, b: &CMatrix) -> CMatrix {
    let p = a * b;
    (&p + p.adjoint()) * Complex64::new(0.5, 0.0)
}

/// Build the algebra tables over commutation from a closed projector list.
fn tables_from_projectors(
    labels: &[String],
    projectors: &[Projector],
) -> Result<PartialBooleanAlgebra, QuantumError> {
    let n = projectors.len();
    let dim = projectors[0].dim();
    let identity = CMatrix::identity(dim, dim);
    let find = |m: &CMatrix| -> Result<usize, QuantumError> {
        projectors
            .iter()
            .position(|x| (&x.matrix - m).norm() <= COMPAT_TOL)
            .ok_or_else(|| QuantumError::ClosureInvariant("operation result missing".into()))
    };
    let zero = find(&CMatrix::zeros(dim, dim))?;
    let one = find(&identity)?;

    let mut compat = BitMatrix::new(n);
    let mut meet = vec![u32::MAX; n * n];
    let mut join = vec![u32::MAX; n * n];
    let mut neg = vec![u32::MAX; n];
    for i in 0..n {
        neg[i] = find(&(&identity - &projectors[i].matrix))? as u32;
        for j in i..n {
            if !projectors[i].commutes_with(&projectors[j]) {
                continue;
            }
            let m = find(&symmetrize_product(
                &projectors[i].matrix,
                &projectors[j].matrix,
            ))?;
            let jn = find(
                &(&projectors[i].matrix + &projectors[j].matrix
                    - symmetrize_product(&projectors[i].matrix, &projectors[j].matrix)),
            )?;
            compat.set(i, j, true);
            compat.set(j, i, true);
            meet[i * n + j] = m as u32;
            meet[j * n + i] = m as u32;
            join[i * n + j] = jn as u32;
            join[j * n + i] = jn as u32;
        }
    }
    Ok(PartialBooleanAlgebra::from_parts(
        labels.to_vec(),
        zero,
        one,
        compat,
        meet,
        join,
        neg,
    ))
}

/// Orthogonality graph of labeled rank-1 projectors: edge iff traces of the
/// products vanish.
pub fn orthogonality_graph(projectors: &[(String, Projector)]) -> Result<AtomGraph, QuantumError> {
    for (name, p) in projectors {
        let tr = p.matrix.trace().re;
        if (tr - 1.0).abs() > PROJECTOR_TOL {
            return Err(QuantumError::NotRankOne(name.clone(), tr));
        }
    }
    let labels: Vec<String> = projectors.iter().map(|(n, _)| n.clone()).collect();
    let mut g = AtomGraph::new(labels);
    for i in 0..projectors.len() {
        for j in i + 1..projectors.len() {
            let overlap = (&projectors[i].1.matrix * &projectors[j].1.matrix)
                .trace()
                .norm();
            if overlap <= COMPAT_TOL {
                g.add_edge(i, j);
            }
        }
    }
    Ok(g)
}

/// Probabilities `tr(ρP)` over a system, checked against the state
/// conditions.
pub fn density_to_state(
    rho: &DensityMatrix,
    system: &QuantumSystem,
) -> Result<AlgebraState, QuantumError> {
    if rho.dim() != system.dim() {
        return Err(QuantumError::DimensionMismatch(rho.dim(), system.dim()));
    }
    let values: Vec<f64> = system
        .projectors
        .iter()
        .map(|p| (&rho.matrix * &p.matrix).trace().re.clamp(0.0, 1.0))
        .collect();
    let (ok, violations) = is_state(&system.algebra, &values);
    if !ok {
        return Err(QuantumError::StateConditionsViolated(
            violations
                .first()
                .map(|v| v.elements.join(","))
                .unwrap_or_default(),
        ));
    }
    Ok(AlgebraState { values })
}

/// Five rank-1 projectors in dimension 3 forming two orthogonal triples that
/// share their first vector; the closure is the two-context gluing `b1`.
pub fn scenario_fig2() -> QuantumSystem {
    let phi = std::f64::consts::PI / 5.0;
    let gens = vec![
        (
            "c".to_string(),
            Projector::from_real_vector(&[0.0, 0.0, 1.0]).unwrap(),
        ),
        (
            "a1".to_string(),
            Projector::from_real_vector(&[1.0, 0.0, 0.0]).unwrap(),
        ),
        (
            "b1".to_string(),
            Projector::from_real_vector(&[0.0, 1.0, 0.0]).unwrap(),
        ),
        (
            "a2".to_string(),
            Projector::from_real_vector(&[phi.cos(), phi.sin(), 0.0]).unwrap(),
        ),
        (
            "b2".to_string(),
            Projector::from_real_vector(&[-phi.sin(), phi.cos(), 0.0]).unwrap(),
        ),
    ];
    generate_system(&gens, DEFAULT_CLOSURE_CAP).expect("closure stays at 12 elements")
}

/// The five-cycle of rank-1 projectors in dimension 3: neighbors in the
/// cycle are orthogonal. The closure has one extra atom per cycle edge.
pub fn scenario_kcbs() -> QuantumSystem {
    let cos2 = (std::f64::consts::PI / 5.0).cos() / (1.0 + (std::f64::consts::PI / 5.0).cos());
    let (ct, st) = (cos2.sqrt(), (1.0 - cos2).sqrt());
    let gens: Vec<(String, Projector)> = (0..5)
        .map(|i| {
            let angle = 4.0 * std::f64::consts::PI * i as f64 / 5.0;
            (
                format!("P{i}"),
                Projector::from_real_vector(&[ct, st * angle.cos(), st * angle.sin()]).unwrap(),
            )
        })
        .collect();
    let mut system =
        generate_system(&gens, DEFAULT_CLOSURE_CAP).expect("closure stays at 22 elements");

    // rename the edge complements ~(Pi ∨ Pi+1) to their usual short names
    let dim = 3;
    let identity = CMatrix::identity(dim, dim);
    for i in 0..5usize {
        let j = (i + 1) % 5;
        let pi = &system.projectors[system.generator_ids[i]];
        let pj = &system.projectors[system.generator_ids[j]];
        let target = &identity - &pi.matrix - &pj.matrix;
        let idx = system
            .projectors
            .iter()
            .position(|p| (&p.matrix - &target).norm() <= COMPAT_TOL)
            .expect("closure contains the edge complements");
        system
            .algebra
            .rename_element(idx, format!("P{i}{j}"))
            .expect("fresh label");
    }
    system
}

/// The two-party four-context measurement scenario in dimension 4: one side
/// measures along z or x, the other along the two diagonal axes. Sixteen
/// product atoms in four 16-element contexts glued over the shared
/// marginals; compatibility is context membership, not full commutation, so
/// the gluing stays at sixteen atoms.
pub fn scenario_chsh() -> QuantumSystem {
    let dim = 4usize;
    // single-qubit eigenprojectors
    let qubit = |angle_from_z: f64| -> [CMatrix; 2] {
        let (c, s) = ((angle_from_z / 2.0).cos(), (angle_from_z / 2.0).sin());
        let plus = Projector::from_real_vector(&[c, s]).unwrap().matrix;
        let minus = Projector::from_real_vector(&[-s, c]).unwrap().matrix;
        [plus, minus]
    };
    let a = qubit(0.0); // z basis
    let a_prime = qubit(std::f64::consts::FRAC_PI_2); // x basis
    let b = qubit(std::f64::consts::FRAC_PI_4); // (z+x)/sqrt(2)
    let b_prime = qubit(-std::f64::consts::FRAC_PI_4); // (z-x)/sqrt(2)

    let sides: [(&str, &[CMatrix; 2]); 2] = [("a", &a), ("a'", &a_prime)];
    let bobs: [(&str, &[CMatrix; 2]); 2] = [("b", &b), ("b'", &b_prime)];
    let sign = ["+", "-"];

    let mut contexts: Vec<Vec<String>> = Vec::new();
    let mut atom_mats: Vec<Vec<CMatrix>> = Vec::new();
    let mut overrides: Vec<(Part, String)> = Vec::new();
    for (ci, (an, am)) in sides.iter().enumerate() {
        for (bn, bm) in bobs.iter() {
            let ctx = contexts.len();
            let mut atoms = Vec::with_capacity(4);
            let mut mats = Vec::with_capacity(4);
            for i in 0..2 {
                for j in 0..2 {
                    atoms.push(format!("{an}{}{bn}{}", sign[i], sign[j]));
                    mats.push(am[i].kronecker(&bm[j]));
                }
            }
            // the four marginal subsets get their measurement names
            overrides.push(((ctx, 0b0011), format!("{an}{}", sign[0])));
            overrides.push(((ctx, 0b1100), format!("{an}{}", sign[1])));
            if ci == 0 {
                // Bob's marginals are shared across Alice's settings; name
                // them once
                overrides.push(((ctx, 0b0101), format!("{bn}{}", sign[0])));
                overrides.push(((ctx, 0b1010), format!("{bn}{}", sign[1])));
            }
            contexts.push(atoms);
            atom_mats.push(mats);
        }
    }

    // subset matrices per context
    let subset_matrix = |ctx: usize, mask: u64| -> CMatrix {
        let mut m = CMatrix::zeros(dim, dim);
        for (bit, mat) in atom_mats[ctx].iter().enumerate() {
            if mask >> bit & 1 == 1 {
                m += mat;
            }
        }
        m
    };

    // identify equal subset sums across contexts
    let mut identifications: Vec<(Part, Part)> = Vec::new();
    let all_masks: Vec<Vec<CMatrix>> = (0..4)
        .map(|c| (0..16).map(|m| subset_matrix(c, m)).collect())
        .collect();
    for c1 in 0..4usize {
        for c2 in c1 + 1..4 {
            for m1 in 1..15u64 {
                for m2 in 1..15u64 {
                    if (&all_masks[c1][m1 as usize] - &all_masks[c2][m2 as usize]).norm()
                        <= PROJECTOR_TOL
                    {
                        identifications.push(((c1, m1), (c2, m2)));
                    }
                }
            }
        }
    }

    let assembled = Amalgam {
        contexts,
        identifications,
        overrides,
    }
    .assemble_with_lookup()
    .expect("context gluing is consistent");

    let n = assembled.algebra.len();
    let mut projectors = vec![None; n];
    for c in 0..4usize {
        for m in 0..16u64 {
            let e = assembled.lookup[c][m as usize];
            if projectors[e].is_none() {
                projectors[e] = Some(Projector::new(subset_matrix(c, m)).unwrap());
            }
        }
    }
    let projectors: Vec<Projector> = projectors.into_iter().map(Option::unwrap).collect();
    let generator_ids: Vec<usize> = (0..4)
        .flat_map(|c| (0..4).map(move |b| (c, b)))
        .map(|(c, b)| assembled.lookup[c][1usize << b])
        .collect();

    QuantumSystem {
        projectors,
        algebra: assembled.algebra,
        generator_ids,
        near_duplicates: vec![],
    }
}
