use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hopf::Atom;
use crate::linalg::{kernel, mat_mul, rank, transpose, QMatrix};
use crate::poly::MultiPoly;
use crate::rational::{fmt_q, parse_q, q};

pub const SLICE_ATTEMPTS: usize = 64;

/// A `k`-dimensional linear subspace of `Q^n`, given by both a basis and
/// a set of normals.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LinearSlice {
    ambient: usize,
    basis: QMatrix,
    normals: QMatrix,
    seed: Option<u64>,
}

impl LinearSlice {
    /// The subspace `{t : xi_i . t = 0}`; normals must be independent.
    pub fn from_normals(ambient: usize, normals: QMatrix, seed: Option<u64>) -> Result<Self> {
        if let Some(r) = normals.iter().find(|r| r.len() != ambient) {
            return Err(Error::ArityMismatch { left: ambient, right: r.len() });
        }
        if rank(&normals) != normals.len() {
            return Err(Error::Precondition("slice normals are linearly dependent".into()));
        }
        if normals.len() >= ambient {
            return Err(Error::Precondition("a slice needs dimension at least 1".into()));
        }
        let basis = kernel(&normals, ambient);
        Ok(Self { ambient, basis, normals, seed })
    }

    /// The span of independent rows.
    pub fn from_basis(ambient: usize, basis: QMatrix) -> Result<Self> {
        if let Some(r) = basis.iter().find(|r| r.len() != ambient) {
            return Err(Error::ArityMismatch { left: ambient, right: r.len() });
        }
        if basis.is_empty() || rank(&basis) != basis.len() {
            return Err(Error::Precondition("slice basis must be nonempty and independent".into()));
        }
        let normals = kernel(&basis, ambient);
        Ok(Self { ambient, basis, normals, seed: None })
    }

    pub fn ambient(&self) -> usize {
        self.ambient
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &QMatrix {
        &self.basis
    }

    pub fn normals(&self) -> &QMatrix {
        &self.normals
    }

    pub fn seed(&self) -> Option<u64> {
        self.seed
    }

    /// `normals * basis^T`, which must vanish.
    pub fn orthogonality(&self) -> QMatrix {
        mat_mul(&self.normals, &transpose(&self.basis))
    }

    pub fn to_atom(&self) -> Atom {
        Atom::span(self.ambient, self.basis.clone()).expect("basis rows have the ambient length")
    }

    pub fn to_spec(&self) -> SliceSpec {
        let fmt = |m: &QMatrix| m.iter().map(|r| r.iter().map(fmt_q).collect()).collect();
        SliceSpec { ambient: self.ambient, seed: self.seed, normals: fmt(&self.normals), basis: Some(fmt(&self.basis)) }
    }

    pub fn from_spec(spec: &SliceSpec) -> Result<Self> {
        let parse = |m: &Vec<Vec<String>>| -> Result<QMatrix> {
            m.iter().map(|r| r.iter().map(|s| parse_q(s)).collect()).collect()
        };
        let s = Self::from_normals(spec.ambient, parse(&spec.normals)?, spec.seed)?;
        Ok(s)
    }
}

/// Serialized slice: seed and exact normals (basis optional, recomputed).
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SliceSpec {
    pub ambient: usize,
    #[serde(default)]
    pub seed: Option<u64>,
    pub normals: Vec<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub basis: Option<Vec<Vec<String>>>,
}

/// Deterministic pseudo-random slice with integer normals in `[-9, 9]`.
pub fn make_slice(n: usize, k: usize, seed: u64) -> Result<LinearSlice> {
    if k < 1 || k > n {
        return Err(Error::Precondition(format!("need 1 <= k <= n, got k = {k}, n = {n}")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..SLICE_ATTEMPTS {
        let normals: QMatrix = (0..n - k).map(|_| (0..n).map(|_| q(rng.gen_range(-9..=9))).collect()).collect();
        if rank(&normals) == n - k {
            let basis = kernel(&normals, n);
            return Ok(LinearSlice { ambient: n, basis, normals, seed: Some(seed) });
        }
    }
    Err(Error::CannotGenerate(SLICE_ATTEMPTS))
}

/// `p(sum_j u_j b_j)` as a polynomial in the slice coordinates `u`.
pub fn restrict(p: &MultiPoly, s: &LinearSlice) -> Result<MultiPoly> {
    if p.arity() != s.ambient {
        return Err(Error::ArityMismatch { left: p.arity(), right: s.ambient });
    }
    let k = s.dim();
    let images: Vec<MultiPoly> = (0..s.ambient)
        .map(|i| {
            MultiPoly::from_terms(
                k,
                (0..k).map(|j| {
                    let mut e = vec![0u32; k];
                    e[j] = 1;
                    (e, s.basis[j][i].clone())
                }),
            )
        })
        .collect();
    Ok(p.compose(&images))
}

