/// Direction of an elementary order: `+e_ij` or `-e_ij`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub const BOTH: [Sign; 2] = [Sign::Plus, Sign::Minus];

    pub fn flip(self) -> Sign {
        match self {
            Sign::Plus => Sign::Minus,
            Sign::Minus => Sign::Plus,
        }
    }

    pub fn symbol(self) -> char {
        match self {
            Sign::Plus => '+',
            Sign::Minus => '-',
        }
    }
}

/// Off-diagonal ordered pairs `(i, j)` of a `d`-asset market in lexicographic order.
pub fn pairs(d: usize) -> Vec<(usize, usize)> {
    (0..d).flat_map(|i| (0..d).filter(move |&j| j != i).map(move |j| (i, j))).collect()
}

/// Position of `(i, j)` in [`pairs`].
pub fn pair_index(d: usize, i: usize, j: usize) -> usize {
    debug_assert!(i != j && i < d && j < d);
    i * (d - 1) + if j < i { j } else { j - 1 }
}

/// Which signed elementary orders span the admissible cone of order matrices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConeSpec {
    d: usize,
    plus: Vec<bool>,
    minus: Vec<bool>,
}

impl ConeSpec {
    /// All of `M^d`.
    pub fn full(d: usize) -> Self {
        let n = pairs(d).len();
        ConeSpec { d, plus: vec![true; n], minus: vec![true; n] }
    }

    /// Nonnegative matrices only.
    pub fn nonnegative(d: usize) -> Self {
        let n = pairs(d).len();
        ConeSpec { d, plus: vec![true; n], minus: vec![false; n] }
    }

    /// Flags listed in [`pairs`] order.
    pub fn from_flags(d: usize, plus: Vec<bool>, minus: Vec<bool>) -> Option<Self> {
        let n = pairs(d).len();
        (plus.len() == n && minus.len() == n).then_some(ConeSpec { d, plus, minus })
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn num_pairs(&self) -> usize {
        self.plus.len()
    }

    pub fn allowed(&self, pair: usize, sign: Sign) -> bool {
        match sign {
            Sign::Plus => self.plus[pair],
            Sign::Minus => self.minus[pair],
        }
    }

    pub fn plus_allowed(&self, i: usize, j: usize) -> bool {
        self.plus[pair_index(self.d, i, j)]
    }

    pub fn minus_allowed(&self, i: usize, j: usize) -> bool {
        self.minus[pair_index(self.d, i, j)]
    }

    pub fn plus_flags(&self) -> &[bool] {
        &self.plus
    }

    pub fn minus_flags(&self) -> &[bool] {
        &self.minus
    }
}
