use std::fmt;
use std::ops::{Add, Mul};

/// Usage annotation on a context binding: unused, used exactly once, or
/// used an arbitrary number of times.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Index {
    Zero,
    One,
    Omega,
}

impl Index {
    pub const ALL: [Index; 3] = [Index::Zero, Index::One, Index::Omega];

    pub fn is_zero(self) -> bool {
        self == Index::Zero
    }

    /// Least upper bound in the order 0 < 1 < ω. Used to merge the usage of
    /// parameter-typed bindings across case branches.
    pub fn join(self, other: Index) -> Index {
        self.max(other)
    }
}

pub fn idx_add(k: Index, l: Index) -> Index {
    match (k, l) {
        (Index::Zero, x) | (x, Index::Zero) => x,
        _ => Index::Omega,
    }
}

pub fn idx_mul(k: Index, l: Index) -> Index {
    match (k, l) {
        (Index::Zero, _) | (_, Index::Zero) => Index::Zero,
        (Index::One, x) | (x, Index::One) => x,
        (Index::Omega, Index::Omega) => Index::Omega,
    }
}

impl Add for Index {
    type Output = Index;

    fn add(self, rhs: Index) -> Index {
        idx_add(self, rhs)
    }
}

impl Mul for Index {
    type Output = Index;

    fn mul(self, rhs: Index) -> Index {
        idx_mul(self, rhs)
    }
}

impl fmt::Display for Index {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Index::Zero => f.write_str("0"),
            Index::One => f.write_str("1"),
            Index::Omega => f.write_str("ω"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::Index::*;
    use super::*;

    #[test]
    fn addition_table() {
        assert_eq!(idx_add(Zero, One), One);
        assert_eq!(idx_add(One, One), Omega);
        assert_eq!(idx_add(Zero, Zero), Zero);
        assert_eq!(idx_add(One, Omega), Omega);
        assert_eq!(idx_add(Omega, Zero), Omega);
    }

    #[test]
    fn multiplication_table() {
        assert_eq!(idx_mul(Zero, Omega), Zero);
        assert_eq!(idx_mul(One, Omega), Omega);
        assert_eq!(idx_mul(Omega, Omega), Omega);
        assert_eq!(idx_mul(One, One), One);
        assert_eq!(idx_mul(Omega, Zero), Zero);
    }

    #[test]
    fn join_is_max() {
        assert_eq!(Zero.join(One), One);
        assert_eq!(Omega.join(One), Omega);
    }
}
