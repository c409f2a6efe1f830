use std::cmp::Ordering;

/// Monomial orders. `LocalDegLex` is the negative-degree order used for
/// standard bases at the origin: lower total degree is larger, ties by lex.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum MonomialOrder {
    Grlex,
    Lex,
    LocalDegLex,
}

impl MonomialOrder {
    pub fn cmp(self, a: &[u32], b: &[u32]) -> Ordering {
        match self {
            MonomialOrder::Grlex => grlex_cmp(a, b),
            MonomialOrder::Lex => a.cmp(b),
            MonomialOrder::LocalDegLex => {
                let (da, db): (u32, u32) = (a.iter().sum(), b.iter().sum());
                db.cmp(&da).then_with(|| a.cmp(b))
            }
        }
    }

    pub fn is_local(self) -> bool {
        matches!(self, MonomialOrder::LocalDegLex)
    }
}

pub fn grlex_cmp(a: &[u32], b: &[u32]) -> Ordering {
    let (da, db): (u32, u32) = (a.iter().sum(), b.iter().sum());
    da.cmp(&db).then_with(|| a.cmp(b))
}

pub fn divides(a: &[u32], b: &[u32]) -> bool {
    a.iter().zip(b).all(|(x, y)| x <= y)
}

pub fn lcm(a: &[u32], b: &[u32]) -> Vec<u32> {
    a.iter().zip(b).map(|(x, y)| *x.max(y)).collect()
}

pub fn sub_exps(a: &[u32], b: &[u32]) -> Vec<u32> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

pub fn degree(a: &[u32]) -> u32 {
    a.iter().sum()
}
