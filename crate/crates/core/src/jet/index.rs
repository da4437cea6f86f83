use std::fmt;
use std::sync::OnceLock;

/// Highest jet order the index tables cover.
pub const MAX_ORDER: usize = 8;
/// Highest order accepted from user configuration.
pub const MAX_USER_ORDER: usize = 6;
pub const DEFAULT_ORDER: usize = 4;

/// A coordinate direction. In the foliation context the same three slots
/// carry (t, y, h).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Var {
    T,
    X,
    Y,
}

impl Var {
    pub const ALL: [Var; 3] = [Var::T, Var::X, Var::Y];

    pub fn index(self) -> usize {
        match self {
            Var::T => 0,
            Var::X => 1,
            Var::Y => 2,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Var::T => "t",
            Var::X => "x",
            Var::Y => "y",
        }
    }
}

/// Multi-index (i, j, k): derivative orders in t, x, y.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct MultiIndex(pub [u8; 3]);

impl MultiIndex {
    pub const ZERO: MultiIndex = MultiIndex([0, 0, 0]);

    pub const fn new(i: u8, j: u8, k: u8) -> Self {
        MultiIndex([i, j, k])
    }

    pub fn unit(v: Var) -> Self {
        let mut a = [0u8; 3];
        a[v.index()] = 1;
        MultiIndex(a)
    }

    pub fn degree(self) -> usize {
        self.0.iter().map(|&c| c as usize).sum()
    }

    pub fn get(self, v: Var) -> u8 {
        self.0[v.index()]
    }

    pub fn bump(self, v: Var) -> Self {
        let mut a = self.0;
        a[v.index()] += 1;
        MultiIndex(a)
    }

    pub fn add(self, o: MultiIndex) -> Self {
        MultiIndex([self.0[0] + o.0[0], self.0[1] + o.0[1], self.0[2] + o.0[2]])
    }

    /// `self − o` when `o ≤ self` componentwise.
    pub fn checked_sub(self, o: MultiIndex) -> Option<Self> {
        Some(MultiIndex([
            self.0[0].checked_sub(o.0[0])?,
            self.0[1].checked_sub(o.0[1])?,
            self.0[2].checked_sub(o.0[2])?,
        ]))
    }

    /// Letters spelling the derivative, e.g. `txx` for (1,2,0).
    pub fn letters(self) -> String {
        let mut s = String::new();
        for v in Var::ALL {
            for _ in 0..self.get(v) {
                s.push_str(v.name());
            }
        }
        s
    }

    /// Sequence of directions whose successive application yields this index.
    pub fn path(self) -> Vec<Var> {
        let mut out = Vec::with_capacity(self.degree());
        for v in Var::ALL {
            for _ in 0..self.get(v) {
                out.push(v);
            }
        }
        out
    }

    /// Every multi-index of degree at most `order`, in storage order.
    pub fn all_up_to(order: usize) -> &'static [MultiIndex] {
        let t = tables();
        &t.indices[..t.sizes[order.min(MAX_ORDER)]]
    }
}

impl fmt::Display for MultiIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{},{})", self.0[0], self.0[1], self.0[2])
    }
}

pub(crate) struct Tables {
    pub indices: Vec<MultiIndex>,
    pub sizes: [usize; MAX_ORDER + 1],
    lookup: Vec<u16>,
    /// For each storage slot α: (slot of β, slot of α−β, C(α,β)).
    pub leibniz: Vec<Vec<(u16, u16, f64)>>,
}

const SIDE: usize = MAX_ORDER + 1;

impl Tables {
    fn build() -> Self {
        let mut indices = Vec::new();
        let mut sizes = [0usize; MAX_ORDER + 1];
        for d in 0..=MAX_ORDER {
            for i in (0..=d).rev() {
                for j in (0..=d - i).rev() {
                    indices.push(MultiIndex::new(i as u8, j as u8, (d - i - j) as u8));
                }
            }
            sizes[d] = indices.len();
        }
        let mut lookup = vec![u16::MAX; SIDE * SIDE * SIDE];
        for (n, a) in indices.iter().enumerate() {
            lookup[flat(*a)] = n as u16;
        }
        let slot = |a: MultiIndex| lookup[flat(a)];
        let leibniz = indices
            .iter()
            .map(|&a| {
                let mut terms = Vec::new();
                for i in 0..=a.0[0] {
                    for j in 0..=a.0[1] {
                        for k in 0..=a.0[2] {
                            let b = MultiIndex::new(i, j, k);
                            let c = a.checked_sub(b).expect("b <= a");
                            let w = binom(a.0[0], i) * binom(a.0[1], j) * binom(a.0[2], k);
                            terms.push((slot(b), slot(c), w));
                        }
                    }
                }
                terms
            })
            .collect();
        Tables {
            indices,
            sizes,
            lookup,
            leibniz,
        }
    }

    pub fn slot(&self, a: MultiIndex) -> usize {
        self.lookup[flat(a)] as usize
    }
}

fn flat(a: MultiIndex) -> usize {
    (a.0[0] as usize * SIDE + a.0[1] as usize) * SIDE + a.0[2] as usize
}

fn binom(n: u8, k: u8) -> f64 {
    let mut r = 1.0;
    for m in 0..k {
        r = r * (n - m) as f64 / (m + 1) as f64;
    }
    r
}

pub(crate) fn tables() -> &'static Tables {
    static T: OnceLock<Tables> = OnceLock::new();
    T.get_or_init(Tables::build)
}

/// Number of stored coefficients of a jet of the given order.
pub fn coeff_count(order: usize) -> usize {
    tables().sizes[order]
}
