//! Flag-type combinatorics and the stratification of weighted flags.
//!
//! Index pairs and cell supports are 0-based throughout.

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::flagcore::{self, FlagRep, FlagType, WeightVector};
use crate::linalg;

/// Skew tolerance on inputs to [`horizontal_project`].
pub const SKEW_TOL: f64 = 1e-12;

fn check_same_n(j: &FlagType, i: &FlagType) -> Result<usize> {
    if j.n() != i.n() {
        return Err(Error::DimensionMismatch {
            expected: j.n(),
            found: i.n(),
        });
    }
    Ok(j.n())
}

/// `J ⪯ I`: every subspace dimension of an `I`-flag is also one of `J`'s,
/// so each part of `I` is a sum of consecutive parts of `J`.
pub fn coarser(j: &FlagType, i: &FlagType) -> Result<bool> {
    check_same_n(j, i)?;
    let jd = j.dims();
    Ok(i.dims().iter().all(|d| jd.binary_search(d).is_ok()))
}

/// All flag types (ordered compositions) of `n`.
pub fn all_types(n: usize) -> Vec<FlagType> {
    fn rec(rest: usize, prefix: &mut Vec<usize>, out: &mut Vec<FlagType>) {
        if rest == 0 {
            out.push(FlagType::new(prefix.clone()).expect("positive parts"));
            return;
        }
        for p in 1..=rest {
            prefix.push(p);
            rec(rest - p, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    if n > 0 {
        rec(n, &mut Vec::new(), &mut out);
    }
    out
}

/// An unweighted flag of a given type, represented by an adapted frame:
/// the `k`-th subspace is spanned by the first `d_k` columns.
#[derive(Clone, Debug, PartialEq)]
pub struct Flag {
    flag_type: FlagType,
    frame: DMatrix<f64>,
}

impl Flag {
    pub fn new(flag_type: FlagType, frame: DMatrix<f64>) -> Result<Self> {
        let n = flag_type.n();
        if frame.nrows() != n || frame.ncols() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: frame.nrows().max(frame.ncols()),
            });
        }
        linalg::check_orthonormal(&frame, flagcore::FRAME_TOL, "frame")?;
        Ok(Flag { flag_type, frame })
    }

    /// The flag underlying a weighted flag, with type `τ(μ)`.
    pub fn of_rep(rep: &FlagRep, zero_tol: f64) -> Result<Self> {
        Ok(Flag {
            flag_type: flagcore::type_of(rep.mu(), zero_tol)?,
            frame: rep.frame().clone(),
        })
    }

    pub fn flag_type(&self) -> &FlagType {
        &self.flag_type
    }

    pub fn frame(&self) -> &DMatrix<f64> {
        &self.frame
    }

    /// Orthogonal projectors onto the nested subspaces `E_1 ⊂ … ⊂ E_r = ℝⁿ`.
    /// Two adapted frames give the same flag iff these agree.
    pub fn projectors(&self) -> Vec<DMatrix<f64>> {
        self.flag_type
            .dims()
            .into_iter()
            .map(|d| linalg::projector(&self.frame.columns(0, d).into_owned()))
            .collect()
    }
}

/// `p_{J→I}`: forget the subspaces of a `J`-flag whose dimension is not a
/// cumulative dimension of `I`. The frame is unchanged.
pub fn project_flag(flag: &Flag, j: &FlagType, i: &FlagType) -> Result<Flag> {
    if flag.flag_type() != j {
        return Err(Error::invalid(format!(
            "flag has type {}, expected {j}",
            flag.flag_type()
        )));
    }
    if !coarser(j, i)? {
        return Err(Error::invalid(format!("type {j} is not coarser than {i}")));
    }
    Ok(Flag {
        flag_type: i.clone(),
        frame: flag.frame.clone(),
    })
}

/// `X_I`: pairs `(a, b)`, `a < b`, lying strictly inside one diagonal
/// block of the type.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BlockIndexSet {
    n: usize,
    pairs: Vec<(usize, usize)>,
}

impl BlockIndexSet {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn pairs(&self) -> &[(usize, usize)] {
        &self.pairs
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn contains(&self, a: usize, b: usize) -> bool {
        let key = if a < b { (a, b) } else { (b, a) };
        self.pairs.binary_search(&key).is_ok()
    }
}

pub fn block_indices(t: &FlagType) -> BlockIndexSet {
    let mut pairs = Vec::new();
    for block in t.blocks() {
        for a in block.clone() {
            for b in a + 1..block.end {
                pairs.push((a, b));
            }
        }
    }
    pairs.sort_unstable();
    BlockIndexSet { n: t.n(), pairs }
}

/// Orthogonal projection of a skew matrix onto `𝔪_I` (zero diagonal blocks).
pub fn horizontal_project(b: &DMatrix<f64>, t: &FlagType) -> Result<DMatrix<f64>> {
    let n = linalg::check_skew(b, SKEW_TOL, "frame velocity")?;
    if n != t.n() {
        return Err(Error::DimensionMismatch {
            expected: t.n(),
            found: n,
        });
    }
    Ok(horizontal_project_unchecked(b, t))
}

pub(crate) fn horizontal_project_unchecked(b: &DMatrix<f64>, t: &FlagType) -> DMatrix<f64> {
    let mut out = b.clone();
    for block in t.blocks() {
        for a in block.clone() {
            for c in block.clone() {
                out[(a, c)] = 0.0;
            }
        }
    }
    out
}

/// Support `K` of the weights: identifies the cell `M(r; K)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct CellKey {
    n: usize,
    support: Vec<usize>,
}

impl CellKey {
    pub fn new(n: usize, mut support: Vec<usize>) -> Result<Self> {
        support.sort_unstable();
        support.dedup();
        if support.is_empty() {
            return Err(Error::invalid("cell support must be non-empty"));
        }
        if support.iter().any(|&k| k >= n) {
            return Err(Error::invalid(format!("cell support index outside 0..{n}")));
        }
        Ok(CellKey { n, support })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// 0-based indices `k` with `μ_k > 0`.
    pub fn support(&self) -> &[usize] {
        &self.support
    }

    /// True for the dense cell where every weight is positive.
    pub fn is_interior(&self) -> bool {
        self.support.len() == self.n
    }

    /// The type `I(K)` shared by every flag in the cell.
    pub fn flag_type(&self) -> FlagType {
        let mut parts = Vec::new();
        let mut prev = 0;
        for &k in &self.support {
            parts.push(k + 1 - prev);
            prev = k + 1;
        }
        if prev < self.n {
            parts.push(self.n - prev);
        }
        FlagType::new(parts).expect("positive parts")
    }
}

pub fn cell_of(mu: &WeightVector, zero_tol: f64) -> Result<CellKey> {
    if !(zero_tol >= 0.0) {
        return Err(Error::invalid("zero_tol must be nonnegative"));
    }
    let support: Vec<usize> = mu
        .as_slice()
        .iter()
        .enumerate()
        .filter(|(_, &w)| w > zero_tol)
        .map(|(k, _)| k)
        .collect();
    let key = CellKey::new(mu.n(), support)?;
    let t = flagcore::type_of(mu, zero_tol)?;
    if key.flag_type() != t {
        return Err(Error::Numerical(format!(
            "cell type {} disagrees with detected type {t}",
            key.flag_type()
        )));
    }
    Ok(key)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sampling;
    use nalgebra::DVector;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn ft(p: &[usize]) -> FlagType {
        FlagType::new(p.to_vec()).unwrap()
    }

    #[test]
    fn coarser_examples() {
        assert!(coarser(&ft(&[2, 1, 1]), &ft(&[2, 2])).unwrap());
        assert!(coarser(&ft(&[1, 1]), &ft(&[2])).unwrap());
        assert!(!coarser(&ft(&[2, 1]), &ft(&[1, 2])).unwrap());
        assert!(coarser(&ft(&[2, 1]), &ft(&[2])).is_err());
        assert!(coarser(&ft(&[2, 1]), &ft(&[3])).unwrap());
    }

    #[test]
    fn coarser_is_partial_order() {
        for n in 1..=6 {
            let types = all_types(n);
            assert_eq!(types.len(), 1 << (n - 1));
            for a in &types {
                assert!(coarser(a, a).unwrap());
                for b in &types {
                    let ab = coarser(a, b).unwrap();
                    if ab && coarser(b, a).unwrap() {
                        assert_eq!(a, b);
                    }
                    if !ab {
                        continue;
                    }
                    for c in &types {
                        if coarser(b, c).unwrap() {
                            assert!(coarser(a, c).unwrap());
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn coarser_matches_segment_sums() {
        // independent check: greedily sum consecutive parts of J
        fn segments(j: &[usize], i: &[usize]) -> bool {
            let mut it = j.iter();
            for &p in i {
                let mut acc = 0;
                while acc < p {
                    match it.next() {
                        Some(q) => acc += q,
                        None => return false,
                    }
                }
                if acc != p {
                    return false;
                }
            }
            it.next().is_none()
        }
        for n in 1..=6 {
            for a in all_types(n) {
                for b in all_types(n) {
                    assert_eq!(coarser(&a, &b).unwrap(), segments(a.parts(), b.parts()));
                }
            }
        }
    }

    #[test]
    fn project_identity_frame() {
        let flag = Flag::new(ft(&[2, 1, 1]), DMatrix::identity(4, 4)).unwrap();
        let p = project_flag(&flag, &ft(&[2, 1, 1]), &ft(&[2, 2])).unwrap();
        let projs = p.projectors();
        assert_eq!(projs.len(), 2);
        let e12 = DMatrix::from_diagonal(&DVector::from_vec(vec![1.0, 1.0, 0.0, 0.0]));
        assert!((&projs[0] - e12).norm() < 1e-15);
        assert!((&projs[1] - DMatrix::identity(4, 4)).norm() < 1e-15);
        let same = project_flag(&flag, &ft(&[2, 1, 1]), &ft(&[2, 1, 1])).unwrap();
        assert_eq!(same, flag);
        assert!(project_flag(&flag, &ft(&[2, 1, 1]), &ft(&[1, 3])).is_err());
        assert!(project_flag(&flag, &ft(&[1, 1, 2]), &ft(&[2, 2])).is_err());
    }

    #[test]
    fn projections_compose() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let (j, i, i2) = (ft(&[1, 1, 2, 1]), ft(&[2, 2, 1]), ft(&[4, 1]));
        for _ in 0..20 {
            let u = sampling::random_orthogonal(&mut rng, 5);
            let flag = Flag::new(j.clone(), u).unwrap();
            let two = project_flag(&project_flag(&flag, &j, &i).unwrap(), &i, &i2).unwrap();
            let one = project_flag(&flag, &j, &i2).unwrap();
            for (a, b) in two.projectors().iter().zip(one.projectors()) {
                assert!((a - b).norm() < 1e-14);
            }
        }
    }

    #[test]
    fn block_index_examples() {
        assert!(block_indices(&ft(&[1, 1, 1])).is_empty());
        assert_eq!(block_indices(&ft(&[1, 2])).pairs(), &[(1, 2)]);
        assert_eq!(block_indices(&ft(&[2, 1])).pairs(), &[(0, 1)]);
        for n in 1..=6 {
            for t in all_types(n) {
                let expect: usize = t.parts().iter().map(|p| p * (p - 1) / 2).sum();
                assert_eq!(block_indices(&t).len(), expect);
            }
        }
    }

    #[test]
    fn horizontal_projection_properties() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let n = 5;
        for t in all_types(n) {
            let b = sampling::random_skew(&mut rng, n);
            let c = sampling::random_skew(&mut rng, n);
            let pb = horizontal_project(&b, &t).unwrap();
            let pc = horizontal_project(&c, &t).unwrap();
            assert_eq!(horizontal_project(&pb, &t).unwrap(), pb);
            assert!((&b - &pb).dot(&pc).abs() < 1e-13);
            let set = block_indices(&t);
            let diff = &b - &pb;
            for a in 0..n {
                for c2 in a + 1..n {
                    assert_eq!(diff[(a, c2)] != 0.0, set.contains(a, c2));
                }
            }
        }
        let b = sampling::random_skew(&mut rng, 4);
        assert_eq!(horizontal_project(&b, &FlagType::complete(4)).unwrap(), b);
        assert_eq!(horizontal_project(&b, &ft(&[4])).unwrap(), DMatrix::zeros(4, 4));
        let not_skew = DMatrix::identity(4, 4);
        assert!(horizontal_project(&not_skew, &ft(&[4])).is_err());
    }

    #[test]
    fn horizontal_inclusion_monotone() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let n = 5;
        let types = all_types(n);
        for j in &types {
            for i in &types {
                if !coarser(j, i).unwrap() {
                    continue;
                }
                let b = sampling::random_skew(&mut rng, n);
                let pi = horizontal_project(&b, i).unwrap();
                assert_eq!(horizontal_project(&pi, j).unwrap(), pi);
            }
        }
    }

    #[test]
    fn cell_examples() {
        let w = |v: &[f64]| WeightVector::new(v.to_vec()).unwrap();
        assert_eq!(cell_of(&w(&[0.5, 0.5, 0.0]), 1e-9).unwrap().support(), &[0, 1]);
        let k = cell_of(&w(&[0.0, 0.0, 1.0 / 6.0, 0.5, 0.0, 1.0 / 3.0, 0.0]), 1e-9).unwrap();
        assert_eq!(k.support(), &[2, 3, 5]);
        assert_eq!(k.flag_type().parts(), &[3, 1, 2, 1]);
        let k = cell_of(&w(&[0.2, 0.3, 0.5]), 1e-9).unwrap();
        assert!(k.is_interior());
        assert!(cell_of(&w(&[0.5, 0.5]), 0.6).is_err());
    }
}
