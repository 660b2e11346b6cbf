//! Canonical-form reduction of MinRank instances, the solution transform, and
//! the reduction pipeline that turns a uniform instance into a canonical one.
//!
//! An instance (M_0, ..., M_k) is in canonical form when the first k
//! vectorized entries of M_0 vanish and the first k vectorized entries of M_i
//! form the Kronecker pattern. Reduction works on the (k+1) x mn matrix whose
//! rows are the vectorized M_i.

use crate::gf::{fe_add, Fe};
use crate::keygen::{KeygenError, MinRankInstance, Witness};
use crate::matgf::{row_vec_mul, KOutcome, MatGF};

/// The data of a successful canonical reduction.
pub struct CanonicalReduction {
    /// (M'_0, ..., M'_k), index 0 holding M'_0.
    pub instance: MinRankInstance,
    /// The k x k block L_1 (rows <M_1>..<M_k>, first k columns).
    pub l1: MatGF,
    pub l1_inv: MatGF,
    /// The first k entries of <M_0>.
    pub ell1: Vec<Fe>,
}

/// Typed outcome of [`to_canonical`].
pub enum Reduction {
    Reduced(CanonicalReduction),
    NotReducible,
}

/// Where [`reduce_r`] stopped, in pipeline order.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AbortStage {
    /// E^R does not have full column rank.
    EnotInCalE,
    /// The L_1 block is singular.
    NotReducible,
    /// I - X is singular.
    IXSingular,
}

pub enum ReduceOutcome {
    Success {
        instance: MinRankInstance,
        alpha: Vec<Fe>,
        k_mat: MatGF,
    },
    Abort(AbortStage),
}

/// The (k+1) x mn matrix whose rows are <M_1>, ..., <M_k>, <M_0>, in this
/// order.
pub fn build_l_matrix(inst: &MinRankInstance) -> MatGF {
    let p = &inst.params;
    let mn = p.m * p.n;
    let mut l = MatGF::zero(p.k + 1, mn, &p.field);
    for i in 1..=p.k {
        let v = inst.matrices[i].vectorize();
        for (j, &x) in v.iter().enumerate() {
            l.set(i - 1, j, x);
        }
    }
    let v0 = inst.matrices[0].vectorize();
    for (j, &x) in v0.iter().enumerate() {
        l.set(p.k, j, x);
    }
    l
}

/// Reduces an instance to canonical form when its L_1 block is invertible.
///
/// The reduced rows are computed from the closed-form blocks
/// (I_k | L_1^-1 L_2 ; 0 | ell_2 - ell_1 L_1^-1 L_2) rather than a full
/// (k+1) x (k+1) product.
pub fn to_canonical(inst: &MinRankInstance) -> Result<Reduction, KeygenError> {
    let p = &inst.params;
    let (k, mn) = (p.k, p.m * p.n);
    let l = build_l_matrix(inst);

    let mut l1 = MatGF::zero(k, k, &p.field);
    let mut l2 = MatGF::zero(k, mn - k, &p.field);
    for i in 0..k {
        for j in 0..k {
            l1.set(i, j, l.get(i, j));
        }
        for j in k..mn {
            l2.set(i, j - k, l.get(i, j));
        }
    }
    let ell1: Vec<Fe> = (0..k).map(|j| l.get(k, j)).collect();
    let ell2: Vec<Fe> = (k..mn).map(|j| l.get(k, j)).collect();

    let Some(l1_inv) = l1.inverse() else {
        return Ok(Reduction::NotReducible);
    };
    let reduced_l2 = l1_inv.mul(&l2)?; // L_1^-1 L_2
    let ell1_part = row_vec_mul(&ell1, &reduced_l2)?;
    let m0_tail: Vec<Fe> = ell2
        .iter()
        .zip(ell1_part.iter())
        .map(|(&a, &b)| crate::gf::fe_sub(a, b, &p.field))
        .collect();

    let mut matrices = Vec::with_capacity(k + 1);
    let mut v0 = vec![0 as Fe; k];
    v0.extend_from_slice(&m0_tail);
    matrices.push(MatGF::devectorize(&v0, p.m, p.n, &p.field)?);
    for i in 0..k {
        let mut v = vec![0 as Fe; k];
        v[i] = 1;
        for j in 0..mn - k {
            v.push(reduced_l2.get(i, j));
        }
        matrices.push(MatGF::devectorize(&v, p.m, p.n, &p.field)?);
    }

    Ok(Reduction::Reduced(CanonicalReduction {
        instance: MinRankInstance { matrices, params: p.clone() },
        l1,
        l1_inv,
        ell1,
    }))
}

/// alpha' = alpha L_1 + ell_1 (row-vector convention): the solution of the
/// canonical instance for the same E.
pub fn transform_solution(alpha: &[Fe], red: &CanonicalReduction) -> Result<Vec<Fe>, KeygenError> {
    if alpha.len() != red.l1.rows() {
        return Err(KeygenError::InvalidParams(format!(
            "alpha length {} for k = {}",
            alpha.len(),
            red.l1.rows()
        )));
    }
    let f = red.instance.params.field.clone();
    let prod = row_vec_mul(alpha, &red.l1)?;
    Ok(prod
        .iter()
        .zip(red.ell1.iter())
        .map(|(&a, &b)| fe_add(a, b, &f))
        .collect())
}

/// True iff <M_0>_i = 0 for i <= k and <M_i>_j = delta_{i,j} for i, j <= k.
pub fn is_canonical(inst: &MinRankInstance) -> bool {
    let k = inst.params.k;
    let v0 = inst.matrices[0].vectorize();
    if v0[..k].iter().any(|&x| x != 0) {
        return false;
    }
    for i in 1..=k {
        let v = inst.matrices[i].vectorize();
        for j in 0..k {
            let want = if j + 1 == i { 1 } else { 0 };
            if v[j] != want {
                return false;
            }
        }
    }
    true
}

/// The reduction pipeline over a uniformly generated instance/witness pair:
/// recover K from E, reduce to canonical form, transform the solution, and
/// check that the associated k x k system is regular. Abort stages are
/// first-failure, in pipeline order, so their frequencies map one-to-one onto
/// the probability bounds.
pub fn reduce_r(inst: &MinRankInstance, wit: &Witness) -> Result<ReduceOutcome, KeygenError> {
    let p = &inst.params;

    // stage 2: E must lie in the set with full-column-rank right block
    let k_mat = match wit.e.solve_k_matrix(p.r)? {
        KOutcome::NoSolution => return Ok(ReduceOutcome::Abort(AbortStage::EnotInCalE)),
        KOutcome::Unique(k) => k,
    };

    // stage 3: canonical reduction
    let red = match to_canonical(inst)? {
        Reduction::NotReducible => return Ok(ReduceOutcome::Abort(AbortStage::NotReducible)),
        Reduction::Reduced(red) => red,
    };
    let alpha = transform_solution(&wit.alpha, &red)?;

    // stage 4: I - X must be invertible for the canonical instance and K
    let mut ix = MatGF::identity(p.k, &p.field);
    for j in 0..p.k {
        let (_, mj_right) = red.instance.matrices[j + 1].split_lr(p.r)?;
        let pv = mj_right.mul(&k_mat)?.vectorize();
        for i in 0..p.k {
            let cur = ix.get(i, j);
            ix.set(i, j, crate::gf::fe_sub(cur, pv[i], &p.field));
        }
    }
    if ix.rank() < p.k {
        return Ok(ReduceOutcome::Abort(AbortStage::IXSingular));
    }

    Ok(ReduceOutcome::Success {
        instance: red.instance,
        alpha,
        k_mat,
    })
}
