use num_integer::Integer;

use crate::error::{Error, Result};
use crate::poly::MultiPoly;

/// Which inequality row of the tables applies.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Regime {
    /// `n - D(l+1)/2 >= 0`: `f = P`.
    PDominant,
    /// Strictly between the two thresholds: `f = P^a Psi^b`.
    Mixed,
    /// `n - D l/2 <= 0`: `f = Psi`.
    PsiDominant,
}

impl Regime {
    pub fn tag(self) -> &'static str {
        match self {
            Regime::PDominant => "p-dominant",
            Regime::Mixed => "mixed",
            Regime::PsiDominant => "psi-dominant",
        }
    }
}

/// `P^p_exp * Psi^psi_exp`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Monomial2 {
    pub p_exp: u32,
    pub psi_exp: u32,
}

impl Monomial2 {
    pub fn degree(&self, loops: u32) -> u32 {
        self.p_exp * (loops + 1) + self.psi_exp * loops
    }

    pub fn build(&self, p: &MultiPoly, psi: &MultiPoly) -> MultiPoly {
        &p.pow(self.p_exp) * &psi.pow(self.psi_exp)
    }

    pub fn display(&self) -> String {
        match (self.p_exp, self.psi_exp) {
            (0, 0) => "1".into(),
            (a, 0) => pow_str("P", a),
            (0, b) => pow_str("Psi", b),
            (a, b) => format!("{}*{}", pow_str("P", a), pow_str("Psi", b)),
        }
    }
}

fn pow_str(base: &str, k: u32) -> String {
    if k == 1 {
        base.to_string()
    } else {
        format!("{base}^{k}")
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CaseTableResult {
    pub regime: Regime,
    /// Number of parameters: `n` (affine) or the slice dimension `k`.
    pub size: u32,
    pub dimension: u32,
    pub loops: u32,
    pub f: Monomial2,
    pub m: u32,
    /// Polynomial factor of the numerator form (affine tables).
    pub omega: Monomial2,
    /// Numerator `h` (sliced tables).
    pub h: Option<Monomial2>,
    pub c: u32,
    /// Upper bound on the filtration index; negative means the range is empty.
    pub r_max: Option<i64>,
}

impl CaseTableResult {
    pub fn deg_f(&self) -> u32 {
        self.f.degree(self.loops)
    }
}

fn check(size: i64, d: i64, loops: i64) -> Result<()> {
    if d % 2 != 0 {
        return Err(Error::OddDimension(d));
    }
    if size < 1 || d <= 0 || loops < 1 {
        return Err(Error::Precondition(format!("need n >= 1, D > 0, l >= 1 (got {size}, {d}, {loops})")));
    }
    Ok(())
}

/// `(f, m, omega, C)` for the parametric integral with `n` edges.
pub fn case_table_affine(n: i64, d: i64, loops: i64) -> Result<CaseTableResult> {
    check(n, d, loops)?;
    let half = d / 2;
    let a = n - half * (loops + 1);
    let b = n - half * loops;
    let (regime, f, m, omega) = if a >= 0 {
        (Regime::PDominant, Monomial2 { p_exp: 1, psi_exp: 0 }, b, Monomial2 { p_exp: 0, psi_exp: a as u32 })
    } else if b <= 0 {
        (Regime::PsiDominant, Monomial2 { p_exp: 0, psi_exp: 1 }, -a, Monomial2 { p_exp: (-b) as u32, psi_exp: 0 })
    } else {
        let m = b.gcd(&half);
        (
            Regime::Mixed,
            Monomial2 { p_exp: (b / m) as u32, psi_exp: (half / m) as u32 },
            m,
            Monomial2 { p_exp: 0, psi_exp: b as u32 },
        )
    };
    let c = match regime {
        Regime::PDominant => b * (loops + 1),
        Regime::Mixed => b * loops + n,
        Regime::PsiDominant => m * loops,
    };
    let res = CaseTableResult {
        regime,
        size: n as u32,
        dimension: d as u32,
        loops: loops as u32,
        f,
        m: m as u32,
        omega,
        h: None,
        c: c as u32,
        r_max: None,
    };
    assert_eq!(res.c, res.m * res.deg_f(), "C = m deg f");
    Ok(res)
}

/// `(f, m, h, r_max)` for a `k`-dimensional slice.
pub fn case_table_sliced(k: i64, d: i64, loops: i64) -> Result<CaseTableResult> {
    check(k, d, loops)?;
    let half = d / 2;
    let a = k - half * (loops + 1);
    let b = k - half * loops;
    let (regime, f, m, h, r_max) = if a >= 0 {
        (Regime::PDominant, Monomial2 { p_exp: 1, psi_exp: 0 }, b, Monomial2 { p_exp: 0, psi_exp: a as u32 }, half * loops)
    } else if b <= 0 {
        (
            Regime::PsiDominant,
            Monomial2 { p_exp: 0, psi_exp: 1 },
            -a,
            Monomial2 { p_exp: (-b) as u32, psi_exp: 0 },
            2 * k - half * (loops + 1),
        )
    } else {
        let m = b.gcd(&half);
        (
            Regime::Mixed,
            Monomial2 { p_exp: (b / m) as u32, psi_exp: (half / m) as u32 },
            m,
            Monomial2 { p_exp: 0, psi_exp: b as u32 },
            k - m,
        )
    };
    let deg_f = f.degree(loops as u32) as i64;
    Ok(CaseTableResult {
        regime,
        size: k as u32,
        dimension: d as u32,
        loops: loops as u32,
        f,
        m: m as u32,
        omega: h,
        h: Some(h),
        c: (m * deg_f) as u32,
        r_max: Some(r_max),
    })
}
