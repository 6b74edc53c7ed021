//! Inclusion-exclusion transforms on sequences and on subset functions.
//!
//! Sequence transforms (binomial, inverse binomial, symmetric) use the direct
//! quadratic sum with exact binomials. Subset transforms run the in-place
//! dimension-by-dimension recurrence over a dense table of `2^w` values.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exact::{binomial_row, Rational};

/// Finite dense sequence `s_0 ..= s_N`, never empty.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<Rational>", into = "Vec<Rational>")]
pub struct Sequence(Vec<Rational>);

impl Sequence {
    pub fn new(values: Vec<Rational>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::EmptySequence);
        }
        Ok(Sequence(values))
    }

    /// Convenience constructor for integer literals; panics on an empty slice.
    pub fn from_ints(values: &[i64]) -> Self {
        Sequence::new(values.iter().map(|&v| Rational::from(v)).collect())
            .expect("non-empty literal")
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    /// Always false; kept for API symmetry with slices.
    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// The largest index `N`.
    pub fn last_index(&self) -> usize {
        self.0.len() - 1
    }

    pub fn values(&self) -> &[Rational] {
        &self.0
    }

    pub fn into_values(self) -> Vec<Rational> {
        self.0
    }

    pub fn reversed(&self) -> Sequence {
        Sequence(self.0.iter().rev().cloned().collect())
    }

    /// Comma separated `p/q` literals.
    pub fn to_csv(&self) -> String {
        self.0.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(",")
    }
}

impl std::ops::Index<usize> for Sequence {
    type Output = Rational;
    fn index(&self, i: usize) -> &Rational {
        &self.0[i]
    }
}

impl TryFrom<Vec<Rational>> for Sequence {
    type Error = Error;
    fn try_from(v: Vec<Rational>) -> Result<Self> {
        Sequence::new(v)
    }
}

impl From<Sequence> for Vec<Rational> {
    fn from(s: Sequence) -> Self {
        s.0
    }
}

impl std::str::FromStr for Sequence {
    type Err = Error;

    /// Parses `"a,b,c"` where each entry is a rational literal.
    fn from_str(s: &str) -> Result<Self> {
        let values = s
            .split(',')
            .filter(|t| !t.trim().is_empty())
            .map(str::parse)
            .collect::<Result<Vec<Rational>>>()?;
        Sequence::new(values)
    }
}

/// Sum `Σ_k sign(n, k) C(n, k) s_k` for every `n`, where the sign pattern is
/// supplied by the caller.
fn signed_binomial_sums(s: &Sequence, negate: impl Fn(usize, usize) -> bool) -> Sequence {
    let out = (0..s.len())
        .map(|n| {
            let row = binomial_row(n as u64);
            let mut acc = Rational::zero();
            for (k, c) in row.into_iter().enumerate() {
                let term = Rational::from(c) * &s[k];
                if negate(n, k) {
                    acc -= term;
                } else {
                    acc += term;
                }
            }
            acc
        })
        .collect();
    Sequence(out)
}

/// `a_n = Σ_k C(n,k) b_k`.
pub fn binomial_transform(b: &Sequence) -> Sequence {
    signed_binomial_sums(b, |_, _| false)
}

/// `b_n = Σ_k (-1)^(n-k) C(n,k) a_k`.
pub fn inverse_binomial_transform(a: &Sequence) -> Sequence {
    signed_binomial_sums(a, |n, k| (n - k) % 2 == 1)
}

/// Symmetric transform `t_n = Σ_k (-1)^k C(n,k) s_k`; an involution.
pub fn sie_transform(s: &Sequence) -> Sequence {
    signed_binomial_sums(s, |_, k| k % 2 == 1)
}

/// Whether `(a, b)` is a symmetric pair. Both directions are checked.
pub fn is_sie_pair(a: &Sequence, b: &Sequence) -> Result<bool> {
    if a.len() != b.len() {
        return Err(Error::LengthMismatch { left: a.len(), right: b.len() });
    }
    Ok(sie_transform(b) == *a && sie_transform(a) == *b)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Orientation {
    Difference,
    Rotated,
}

impl Orientation {
    fn name(self) -> &'static str {
        match self {
            Orientation::Difference => "difference",
            Orientation::Rotated => "rotated",
        }
    }
}

/// Triangular array of rationals.
///
/// In `Difference` orientation `rows[0]` is the top row and row `i` has
/// `N+1-i` entries. In `Rotated` orientation rows are indexed from the apex
/// and row `k` has `k+1` entries.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DifferenceTriangle {
    pub orientation: Orientation,
    pub rows: Vec<Vec<Rational>>,
}

impl DifferenceTriangle {
    /// Leading entries of each row of a difference table.
    pub fn zeroth_diagonal(&self) -> Result<Sequence> {
        self.expect(Orientation::Difference)?;
        Sequence::new(self.rows.iter().map(|r| r[0].clone()).collect())
    }

    pub fn left_diagonal(&self) -> Result<Sequence> {
        self.expect(Orientation::Rotated)?;
        Sequence::new(self.rows.iter().map(|r| r[0].clone()).collect())
    }

    pub fn right_diagonal(&self) -> Result<Sequence> {
        self.expect(Orientation::Rotated)?;
        Sequence::new(self.rows.iter().map(|r| r[r.len() - 1].clone()).collect())
    }

    pub fn bottom_row(&self) -> Sequence {
        let row = match self.orientation {
            Orientation::Difference => self.rows.first(),
            Orientation::Rotated => self.rows.last(),
        };
        Sequence(row.cloned().unwrap_or_default())
    }

    /// Checks the defining recurrence of the current orientation.
    pub fn satisfies_invariant(&self) -> bool {
        let n = self.rows.len();
        match self.orientation {
            Orientation::Difference => (0..n.saturating_sub(1)).all(|i| {
                let (upper, lower) = (&self.rows[i], &self.rows[i + 1]);
                lower.len() + 1 == upper.len()
                    && lower.iter().enumerate().all(|(j, v)| *v == &upper[j + 1] - &upper[j])
            }),
            Orientation::Rotated => (0..n.saturating_sub(1)).all(|k| {
                let (upper, lower) = (&self.rows[k], &self.rows[k + 1]);
                upper.len() + 1 == lower.len()
                    && upper.iter().enumerate().all(|(j, v)| *v == &lower[j] + &lower[j + 1])
            }),
        }
    }

    fn expect(&self, orientation: Orientation) -> Result<()> {
        if self.orientation != orientation {
            return Err(Error::WrongOrientation(orientation.name()));
        }
        Ok(())
    }
}

/// Difference table whose zeroth row is `top`; each lower entry is the entry
/// above-right minus the entry above-left.
pub fn difference_triangle(top: &Sequence) -> DifferenceTriangle {
    let mut rows = vec![top.values().to_vec()];
    while rows.last().map_or(0, Vec::len) > 1 {
        let prev = rows.last().unwrap();
        let next = prev.windows(2).map(|w| &w[1] - &w[0]).collect();
        rows.push(next);
    }
    DifferenceTriangle { orientation: Orientation::Difference, rows }
}

/// Rotates a difference table so every entry is the sum of the two below it.
///
/// Rotated row `k`, entry `j` is difference row `j`, entry `N-k`.
pub fn rotate_triangle(t: &DifferenceTriangle) -> Result<DifferenceTriangle> {
    t.expect(Orientation::Difference)?;
    let n = t.rows.len() - 1;
    let rows = (0..=n)
        .map(|k| (0..=k).map(|j| t.rows[j][n - k].clone()).collect())
        .collect();
    Ok(DifferenceTriangle { orientation: Orientation::Rotated, rows })
}

/// Builds a symmetric pair `(ā, b̄)` from an arbitrary seed `B_0..B_N`:
/// `ā_{N-n} = Σ_k C(n,k) B_k` and `b̄_{N-n} = Σ_k C(n,k) B_{N-k}`.
pub fn pair_from_seed(seed: &Sequence) -> (Sequence, Sequence) {
    let abar = binomial_transform(seed).reversed();
    let bbar = binomial_transform(&seed.reversed()).reversed();
    (abar, bbar)
}

/// New bottom row `e` with `e_0 = leftmost` and `e_{i+1} = bottom_i - e_i`.
pub fn extend_rotated_row(bottom: &Sequence, leftmost: &Rational) -> Sequence {
    let mut out = Vec::with_capacity(bottom.len() + 1);
    out.push(leftmost.clone());
    for b in bottom.values() {
        let next = b - out.last().unwrap();
        out.push(next);
    }
    Sequence(out)
}

/// Closed interval `[lo, hi]`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Interval {
    pub lo: Rational,
    pub hi: Rational,
}

impl Interval {
    pub fn contains(&self, x: &Rational) -> bool {
        &self.lo <= x && x <= &self.hi
    }
}

/// Exact set of `leftmost` values for which [`extend_rotated_row`] yields an
/// all-nonnegative row, or `None` when there is none.
///
/// Writing `e_i = (-1)^i x + c_i`, even positions give lower bounds
/// `x >= -c_i` and odd positions give upper bounds `x <= c_i`.
pub fn nonneg_extension_interval(bottom: &Sequence) -> Option<Interval> {
    let mut offset = Rational::zero();
    let mut lo = Rational::zero();
    let mut hi: Option<Rational> = None;
    for (i, b) in bottom.values().iter().enumerate() {
        // offset of e_{i+1}
        offset = b - &offset;
        if (i + 1) % 2 == 0 {
            let bound = -&offset;
            if bound > lo {
                lo = bound;
            }
        } else if hi.as_ref().is_none_or(|h| offset < *h) {
            hi = Some(offset.clone());
        }
    }
    let hi = hi.expect("bottom row is non-empty");
    (lo <= hi).then_some(Interval { lo, hi })
}

pub const MAX_GROUND_SET: u32 = 24;

/// Dense function on the subsets of `{0, .., w-1}`; bit `i` of a mask marks
/// membership of element `i`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "SubsetFunctionRepr", into = "SubsetFunctionRepr")]
pub struct SubsetFunction {
    w: u32,
    values: Vec<Rational>,
}

#[derive(Serialize, Deserialize)]
struct SubsetFunctionRepr {
    w: u32,
    values: Vec<Rational>,
}

impl TryFrom<SubsetFunctionRepr> for SubsetFunction {
    type Error = Error;
    fn try_from(r: SubsetFunctionRepr) -> Result<Self> {
        SubsetFunction::new(r.w, r.values)
    }
}

impl From<SubsetFunction> for SubsetFunctionRepr {
    fn from(f: SubsetFunction) -> Self {
        SubsetFunctionRepr { w: f.w, values: f.values }
    }
}

impl SubsetFunction {
    pub fn new(w: u32, values: Vec<Rational>) -> Result<Self> {
        if w == 0 || w > MAX_GROUND_SET {
            return Err(Error::GroundSetSize(w));
        }
        let expected = 1usize << w;
        if values.len() != expected {
            return Err(Error::SubsetTableSize { expected, actual: values.len() });
        }
        Ok(SubsetFunction { w, values })
    }

    pub fn from_fn(w: u32, f: impl FnMut(usize) -> Rational) -> Result<Self> {
        if w == 0 || w > MAX_GROUND_SET {
            return Err(Error::GroundSetSize(w));
        }
        SubsetFunction::new(w, (0..1usize << w).map(f).collect())
    }

    pub fn ground_set_size(&self) -> u32 {
        self.w
    }

    pub fn full_mask(&self) -> usize {
        (1usize << self.w) - 1
    }

    pub fn get(&self, mask: usize) -> &Rational {
        &self.values[mask]
    }

    pub fn values(&self) -> &[Rational] {
        &self.values
    }

    fn butterfly(&self, f: impl Fn(&Rational, &mut Rational)) -> SubsetFunction {
        let mut v = self.values.clone();
        for bit in 0..self.w {
            let step = 1usize << bit;
            for block in v.chunks_exact_mut(step * 2) {
                let (without, with) = block.split_at_mut(step);
                for (lo, hi) in without.iter().zip(with) {
                    f(lo, hi);
                }
            }
        }
        SubsetFunction { w: self.w, values: v }
    }
}

/// `A(S) = Σ_{T ⊆ S} B(T)`.
pub fn subset_zeta(b: &SubsetFunction) -> SubsetFunction {
    b.butterfly(|lo, hi| *hi += lo)
}

/// `B(S) = Σ_{T ⊆ S} (-1)^{|S|-|T|} A(T)`.
pub fn subset_moebius(a: &SubsetFunction) -> SubsetFunction {
    a.butterfly(|lo, hi| *hi -= lo)
}

/// `t(S) = Σ_{T ⊆ S} (-1)^{|T|} s(T)`; an involution.
pub fn subset_sie_transform(s: &SubsetFunction) -> SubsetFunction {
    s.butterfly(|lo, hi| *hi = lo - &*hi)
}

/// Symmetric pair from a seed on the subsets of a finite ground set:
/// `ā(S) = Σ_{T⊆Δ∖S} B(T)` and `b̄(S) = Σ_{T⊆Δ∖S} B(Δ∖T)`.
pub fn subset_pair_from_seed(seed: &SubsetFunction) -> (SubsetFunction, SubsetFunction) {
    let full = seed.full_mask();
    let complement = |f: &SubsetFunction| SubsetFunction {
        w: f.w,
        values: (0..=full).map(|m| f.values[full ^ m].clone()).collect(),
    };
    let abar = complement(&subset_zeta(seed));
    let bbar = complement(&subset_zeta(&complement(seed)));
    (abar, bbar)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::binomial;
    use proptest::prelude::*;

    fn q(s: &str) -> Rational {
        s.parse().unwrap()
    }

    fn seq(v: &[i64]) -> Sequence {
        Sequence::from_ints(v)
    }

    // Naive O(3^w) subset sums, independent of the butterfly.
    fn naive_subset_sum(f: &SubsetFunction, weight: impl Fn(usize, usize) -> i64) -> Vec<Rational> {
        (0..=f.full_mask())
            .map(|s| {
                let mut acc = Rational::zero();
                let mut t = s;
                loop {
                    acc += Rational::from(weight(s, t)) * f.get(t);
                    if t == 0 {
                        break;
                    }
                    t = (t - 1) & s;
                }
                acc
            })
            .collect()
    }

    fn parity(x: usize) -> i64 {
        if x.count_ones() % 2 == 0 {
            1
        } else {
            -1
        }
    }

    #[test]
    fn empty_sequence_rejected() {
        assert_eq!(Sequence::new(vec![]), Err(Error::EmptySequence));
        assert!("".parse::<Sequence>().is_err());
        assert!(serde_json::from_str::<Sequence>("[]").is_err());
    }

    #[test]
    fn binomial_transform_examples() {
        assert_eq!(binomial_transform(&seq(&[1, 0, 1, 2, 9, 44])), seq(&[1, 1, 2, 6, 24, 120]));
        assert_eq!(binomial_transform(&seq(&[1])), seq(&[1]));
        assert_eq!(binomial_transform(&seq(&[0, 0, 0])), seq(&[0, 0, 0]));
    }

    #[test]
    fn inverse_binomial_transform_examples() {
        assert_eq!(inverse_binomial_transform(&seq(&[1, 1, 2, 6, 24, 120])), seq(&[1, 0, 1, 2, 9, 44]));
        let c = q("-7/3");
        let s = Sequence::new(vec![c.clone(), c.clone(), c.clone()]).unwrap();
        let z = Rational::zero();
        assert_eq!(inverse_binomial_transform(&s).values(), &[c, z.clone(), z]);
    }

    #[test]
    fn sie_transform_examples() {
        let left = seq(&[120, 24, 6, 2, 1, 1]);
        let right = seq(&[120, 96, 78, 64, 53, 44]);
        assert_eq!(sie_transform(&left), right);
        assert_eq!(sie_transform(&right), left);

        let p = q("1/3");
        let powers = |base: &Rational| Sequence::new((0..=4).map(|k| base.pow(k)).collect()).unwrap();
        assert_eq!(sie_transform(&powers(&p)), powers(&(Rational::one() - &p)));
    }

    #[test]
    fn is_sie_pair_examples() {
        assert!(is_sie_pair(&seq(&[120, 24, 6, 2, 1, 1]), &seq(&[120, 96, 78, 64, 53, 44])).unwrap());
        assert!(!is_sie_pair(&seq(&[1, 1]), &seq(&[1, 1])).unwrap());
        let c = Sequence::new(vec![q("5/7")]).unwrap();
        assert!(is_sie_pair(&c, &c).unwrap());
        assert!(matches!(
            is_sie_pair(&seq(&[1]), &seq(&[1, 0])),
            Err(Error::LengthMismatch { left: 1, right: 2 })
        ));
    }

    #[test]
    fn difference_triangle_examples() {
        let t = difference_triangle(&seq(&[1, 1, 2, 6, 24, 120]));
        assert_eq!(t.zeroth_diagonal().unwrap(), seq(&[1, 0, 1, 2, 9, 44]));
        assert_eq!(t.rows[2], seq(&[1, 3, 14, 78]).into_values());
        assert!(t.satisfies_invariant());

        let single = difference_triangle(&seq(&[1]));
        assert_eq!(single.rows, vec![vec![Rational::one()]]);

        let two = difference_triangle(&seq(&[0, 1]));
        assert_eq!(two.rows[1], vec![Rational::one()]);
    }

    #[test]
    fn rotate_triangle_examples() {
        let r = rotate_triangle(&difference_triangle(&seq(&[1, 1, 2, 6, 24, 120]))).unwrap();
        assert_eq!(r.left_diagonal().unwrap(), seq(&[120, 24, 6, 2, 1, 1]));
        assert_eq!(r.right_diagonal().unwrap(), seq(&[120, 96, 78, 64, 53, 44]));
        assert_eq!(r.bottom_row(), seq(&[1, 0, 1, 2, 9, 44]));
        assert_eq!(r.rows[3], seq(&[2, 4, 14, 64]).into_values());
        assert!(r.satisfies_invariant());

        let single = rotate_triangle(&difference_triangle(&seq(&[9]))).unwrap();
        assert_eq!(single.rows, vec![vec![Rational::from(9)]]);

        let two = rotate_triangle(&difference_triangle(&seq(&[3, 10]))).unwrap();
        assert_eq!(two.left_diagonal().unwrap(), seq(&[10, 3]));
        assert_eq!(two.bottom_row(), seq(&[3, 7]));
        assert!(two.satisfies_invariant());

        assert_eq!(rotate_triangle(&r), Err(Error::WrongOrientation("difference")));
        assert!(r.zeroth_diagonal().is_err());
    }

    #[test]
    fn pair_from_seed_examples() {
        let (a, b) = pair_from_seed(&seq(&[1, 0, 1, 2, 9, 44]));
        assert_eq!(a, seq(&[120, 24, 6, 2, 1, 1]));
        assert_eq!(b, seq(&[120, 96, 78, 64, 53, 44]));

        let c = Sequence::new(vec![q("2/9")]).unwrap();
        assert_eq!(pair_from_seed(&c), (c.clone(), c));

        let (a, b) = pair_from_seed(&seq(&[1, 1]));
        assert_eq!((a, b), (seq(&[2, 1]), seq(&[2, 1])));
    }

    #[test]
    fn extension_examples() {
        let r1 = extend_rotated_row(&seq(&[1, 0, 1, 2, 9, 44]), &Rational::one());
        assert_eq!(r1, seq(&[1, 0, 0, 1, 1, 8, 36]));
        let r2 = extend_rotated_row(&r1, &Rational::one());
        assert_eq!(r2, seq(&[1, 0, 0, 0, 1, 0, 8, 28]));
        let c = q("3/4");
        assert_eq!(
            extend_rotated_row(&Sequence::new(vec![c.clone()]).unwrap(), &Rational::zero()).values(),
            &[Rational::zero(), c]
        );
    }

    #[test]
    fn nonneg_interval_examples() {
        assert_eq!(nonneg_extension_interval(&seq(&[1, 0, 0, 0, 1, 0, 8, 28])), None);
        // Scan by hand: e = x, 1-x, x-1, 2-x, x, 9-x, 35+x.
        let iv = nonneg_extension_interval(&seq(&[1, 0, 1, 2, 9, 44])).unwrap();
        assert_eq!(iv, Interval { lo: Rational::one(), hi: Rational::one() });
        assert!(iv.contains(&Rational::one()));
        let c = q("5/2");
        let iv = nonneg_extension_interval(&Sequence::new(vec![c.clone()]).unwrap()).unwrap();
        assert_eq!(iv, Interval { lo: Rational::zero(), hi: c });
        assert_eq!(nonneg_extension_interval(&seq(&[-1])), None);
    }

    #[test]
    fn subset_zeta_examples() {
        let ind_empty = SubsetFunction::from_fn(3, |m| Rational::from((m == 0) as i64)).unwrap();
        assert!(subset_zeta(&ind_empty).values().iter().all(Rational::is_one));
        let zero = SubsetFunction::from_fn(3, |_| Rational::zero()).unwrap();
        assert_eq!(subset_zeta(&zero), zero);

        let b = SubsetFunction::new(2, [1, 2, 3, 4].map(Rational::from).to_vec()).unwrap();
        let a = subset_zeta(&b);
        assert_eq!(*a.get(0b11), 10);
        assert_eq!(a.values(), &[1, 3, 4, 10].map(Rational::from));
        assert_eq!(subset_moebius(&a), b);

        let ones = SubsetFunction::from_fn(4, |_| Rational::one()).unwrap();
        let m = subset_moebius(&ones);
        assert!(m.values().iter().enumerate().all(|(s, v)| *v == (s == 0) as i64));
    }

    #[test]
    fn subset_sie_of_constant_is_empty_indicator() {
        let ones = SubsetFunction::from_fn(5, |_| Rational::one()).unwrap();
        let t = subset_sie_transform(&ones);
        assert!(t.values().iter().enumerate().all(|(s, v)| *v == (s == 0) as i64));
    }

    #[test]
    fn subset_pair_with_full_indicator_seed() {
        let w = 4;
        let full = (1usize << w) - 1;
        let seed = SubsetFunction::from_fn(w, |m| Rational::from((m == full) as i64)).unwrap();
        let (a, b) = subset_pair_from_seed(&seed);
        let empty_indicator = SubsetFunction::from_fn(w, |m| Rational::from((m == 0) as i64)).unwrap();
        assert_eq!(a, empty_indicator);
        assert!(b.values().iter().all(Rational::is_one));
    }

    #[test]
    fn cardinality_seed_reproduces_sequence_pair() {
        let derangements = seq(&[1, 0, 1, 2, 9, 44]);
        let seed = SubsetFunction::from_fn(5, |m| derangements[m.count_ones() as usize].clone()).unwrap();
        let (a, b) = subset_pair_from_seed(&seed);
        let (sa, sb) = pair_from_seed(&derangements);
        for m in 0..32usize {
            let k = m.count_ones() as usize;
            assert_eq!(a.get(m), &sa[k]);
            assert_eq!(b.get(m), &sb[k]);
        }
        assert_eq!(*a.get(0b00011), 6); // (5-2)!
    }

    #[test]
    fn subset_function_validation() {
        assert_eq!(SubsetFunction::new(0, vec![]), Err(Error::GroundSetSize(0)));
        assert_eq!(SubsetFunction::from_fn(25, |_| Rational::zero()), Err(Error::GroundSetSize(25)));
        assert!(matches!(
            SubsetFunction::new(2, vec![Rational::zero(); 3]),
            Err(Error::SubsetTableSize { expected: 4, actual: 3 })
        ));
        let json = r#"{"w":1,"values":["1/2","3"]}"#;
        let f: SubsetFunction = serde_json::from_str(json).unwrap();
        assert_eq!(serde_json::to_string(&f).unwrap(), r#"{"w":1,"values":["1/2","3/1"]}"#);
        assert!(serde_json::from_str::<SubsetFunction>(r#"{"w":2,"values":["1"]}"#).is_err());
    }

    #[test]
    fn triangle_serializes_with_orientation() {
        let t = difference_triangle(&seq(&[0, 1]));
        let json = serde_json::to_string(&t).unwrap();
        assert_eq!(json, r#"{"orientation":"difference","rows":[["0/1","1/1"],["1/1"]]}"#);
    }

    fn arb_rational() -> impl Strategy<Value = Rational> {
        (-60i64..60, 1i64..12).prop_map(|(n, d)| Rational::new(n, d).unwrap())
    }

    fn arb_sequence(max_len: usize) -> impl Strategy<Value = Sequence> {
        prop::collection::vec(arb_rational(), 1..=max_len).prop_map(|v| Sequence::new(v).unwrap())
    }

    fn arb_subset_fn(max_w: u32) -> impl Strategy<Value = SubsetFunction> {
        (1..=max_w).prop_flat_map(|w| {
            prop::collection::vec(arb_rational(), 1usize << w)
                .prop_map(move |v| SubsetFunction::new(w, v).unwrap())
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn sie_is_involution(s in arb_sequence(40)) {
            prop_assert_eq!(sie_transform(&sie_transform(&s)), s);
        }

        #[test]
        fn binomial_transforms_invert(s in arb_sequence(40)) {
            prop_assert_eq!(inverse_binomial_transform(&binomial_transform(&s)), s.clone());
            prop_assert_eq!(binomial_transform(&inverse_binomial_transform(&s)), s);
        }

        #[test]
        fn sequence_transform_matches_direct_sum(s in arb_sequence(12)) {
            let t = sie_transform(&s);
            for n in 0..s.len() {
                let mut direct = Rational::zero();
                for k in 0..=n {
                    let sign = if k % 2 == 0 { 1 } else { -1 };
                    direct += Rational::from(binomial(n as u64, k as i64) * sign) * &s[k];
                }
                prop_assert_eq!(&t[n], &direct);
            }
        }

        #[test]
        fn seeded_pairs_are_symmetric(seed in arb_sequence(31)) {
            let (a, b) = pair_from_seed(&seed);
            prop_assert!(is_sie_pair(&a, &b).unwrap());
        }

        #[test]
        fn zeroth_diagonal_is_inverse_transform(top in arb_sequence(20)) {
            let t = difference_triangle(&top);
            prop_assert!(t.satisfies_invariant());
            prop_assert_eq!(t.zeroth_diagonal().unwrap(), inverse_binomial_transform(&top));
        }

        #[test]
        fn rotation_properties(top in arb_sequence(20)) {
            let d = difference_triangle(&top);
            let r = rotate_triangle(&d).unwrap();
            prop_assert!(r.satisfies_invariant());
            prop_assert_eq!(r.left_diagonal().unwrap(), top.reversed());
            prop_assert_eq!(r.right_diagonal().unwrap(), sie_transform(&top.reversed()));
            prop_assert_eq!(r.bottom_row(), d.zeroth_diagonal().unwrap());
        }

        #[test]
        fn interval_is_sound_and_complete(bottom in arb_sequence(10), probe in arb_rational()) {
            let nonneg = |x: &Rational| extend_rotated_row(&bottom, x).values().iter().all(|v| !v.is_negative());
            match nonneg_extension_interval(&bottom) {
                Some(iv) => {
                    prop_assert!(iv.lo <= iv.hi);
                    prop_assert!(nonneg(&iv.lo));
                    prop_assert!(nonneg(&iv.hi));
                    let mid = (&iv.lo + &iv.hi) / Rational::from(2);
                    prop_assert!(nonneg(&mid));
                    prop_assert_eq!(nonneg(&probe), iv.contains(&probe));
                }
                None => prop_assert!(!nonneg(&probe)),
            }
        }

        #[test]
        fn fast_subset_transforms_match_naive(f in arb_subset_fn(8)) {
            prop_assert_eq!(subset_zeta(&f).values().to_vec(), naive_subset_sum(&f, |_, _| 1));
            prop_assert_eq!(subset_moebius(&f).values().to_vec(), naive_subset_sum(&f, |s, t| parity(s ^ t)));
            prop_assert_eq!(subset_sie_transform(&f).values().to_vec(), naive_subset_sum(&f, |_, t| parity(t)));
        }

        #[test]
        fn subset_round_trips(f in arb_subset_fn(10)) {
            prop_assert_eq!(subset_moebius(&subset_zeta(&f)), f.clone());
            prop_assert_eq!(subset_sie_transform(&subset_sie_transform(&f)), f);
        }

        #[test]
        fn subset_seeded_pairs_are_symmetric(seed in arb_subset_fn(10)) {
            let (a, b) = subset_pair_from_seed(&seed);
            prop_assert_eq!(subset_sie_transform(&a), b.clone());
            prop_assert_eq!(subset_sie_transform(&b), a);
        }
    }
}
