//! Terminating hypergeometric series over the rationals, and exact checks of
//! the series identities that come out of the urn model.
//!
//! The `pFq` series is
//!
//! ```text
//! pFq(u_1..u_p; v_1..v_q | x) = Σ_k [(u_1)_k ... (u_p)_k] / [(v_1)_k ... (v_q)_k] x^k / k!
//! ```
//!
//! It is evaluated only when some upper parameter is a non-positive integer
//! `-n`; the sum then stops at `k = n`. Lower rising factorials are built one
//! factor at a time, so a lower parameter that only hits zero after the
//! cut-off is harmless.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exact::{binomial_row, factorial, rational_binomial, rising_factorial, Rational};
use crate::series::PowerSeries;
use crate::transforms::{sie_transform, Sequence};
use crate::urns::{multi_urn_bbar, urn_abar, urn_bbar, UrnSpec};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HypergeometricSpec {
    pub upper: Vec<Rational>,
    pub lower: Vec<Rational>,
    #[serde(rename = "x")]
    pub argument: Rational,
}

impl HypergeometricSpec {
    pub fn new(upper: Vec<Rational>, lower: Vec<Rational>, argument: Rational) -> Self {
        HypergeometricSpec { upper, lower, argument }
    }

    /// Smallest `n >= 0` such that `-n` is an upper parameter.
    pub fn termination_index(&self) -> Option<u64> {
        self.upper.iter().filter_map(Rational::as_nonpositive_integer).min()
    }

    /// `m+1 F m(-n, r_1..r_m; r_1+b_1..r_m+b_m | 1)`, the series form of the
    /// multi-urn probability.
    pub fn for_urns(n: u64, spec: &UrnSpec) -> Self {
        let mut upper = vec![-Rational::from(n)];
        upper.extend(spec.urns().iter().map(|u| u.r.clone()));
        let lower = spec.urns().iter().map(|u| u.total()).collect();
        HypergeometricSpec::new(upper, lower, Rational::one())
    }
}

/// Coefficients `t_0..=t_last` of `Σ t_k` where `t_{k+1} = t_k Π(u+k)/Π(v+k) x/(k+1)`.
fn pfq_terms(upper: &[Rational], lower: &[Rational], x: &Rational, last: u64) -> Result<Vec<Rational>> {
    let mut terms = Vec::with_capacity(last as usize + 1);
    let mut term = Rational::one();
    terms.push(term.clone());
    for k in 0..last {
        let kq = Rational::from(k);
        let mut den = Rational::from(k + 1);
        for v in lower {
            let f = v + &kq;
            if f.is_zero() {
                return Err(Error::LowerPole);
            }
            den *= f;
        }
        let mut num = x.clone();
        for u in upper {
            num *= u + &kq;
        }
        term = term * num / den;
        terms.push(term.clone());
    }
    Ok(terms)
}

/// Exact value of a terminating `pFq`.
pub fn eval_terminating_pfq(spec: &HypergeometricSpec) -> Result<Rational> {
    let n = spec.termination_index().ok_or(Error::NonTerminating)?;
    Ok(pfq_terms(&spec.upper, &spec.lower, &spec.argument, n)?.into_iter().sum())
}

/// `pFq(upper; lower | c x)` as a power series in `x` through `order`.
pub fn pfq_series(upper: &[Rational], lower: &[Rational], c: &Rational, order: usize) -> Result<PowerSeries> {
    Ok(PowerSeries::new(pfq_terms(upper, lower, c, order as u64)?))
}

/// Both sides of a scalar identity.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct IdentityCheck {
    pub holds: bool,
    pub lhs: Rational,
    pub rhs: Rational,
}

impl IdentityCheck {
    pub fn compare(lhs: Rational, rhs: Rational) -> Self {
        IdentityCheck { holds: lhs == rhs, lhs, rhs }
    }
}

/// Both sides of a series identity, coefficient by coefficient.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SeriesCheck {
    pub holds: bool,
    pub lhs: Vec<Rational>,
    pub rhs: Vec<Rational>,
}

impl SeriesCheck {
    pub fn compare(lhs: PowerSeries, rhs: PowerSeries) -> Self {
        SeriesCheck { holds: lhs == rhs, lhs: lhs.into_coeffs(), rhs: rhs.into_coeffs() }
    }
}

/// `(b)_n/(r+b)_n` against `Σ_k (-1)^k C(n,k) (r)_k/(r+b)_k`.
pub fn chu_vandermonde_check(n: u64, r: &Rational, b: &Rational) -> Result<IdentityCheck> {
    let abar = Sequence::new((0..=n).map(|k| urn_abar(k, r, b)).collect::<Result<_>>()?)?;
    let alternating = sie_transform(&abar)[n as usize].clone();
    Ok(IdentityCheck::compare(urn_bbar(n, r, b)?, alternating))
}

/// EGF form of an inclusion-exclusion pair through `order`.
///
/// Symmetric: `F_a(x) = e^x F_b(-x)` and `F_b(x) = e^x F_a(-x)`.
/// Asymmetric: `F_a(x) = e^x F_b(x)` and `F_b(x) = e^{-x} F_a(x)`.
/// The returned sides are those of the first equation; `holds` covers both.
pub fn egf_pair_check(a: &Sequence, b: &Sequence, symmetric: bool, order: usize) -> Result<SeriesCheck> {
    let max = a.len().min(b.len()) - 1;
    if order > max {
        return Err(Error::OrderTooLarge { order, max });
    }
    let fa = PowerSeries::egf(a, order);
    let fb = PowerSeries::egf(b, order);
    let one = Rational::one();
    let exp = PowerSeries::exp(&one, order);
    let (rhs_a, rhs_b) = if symmetric {
        (&exp * &fb.negate_argument(), &exp * &fa.negate_argument())
    } else {
        (&exp * &fb, &PowerSeries::exp(&-one, order) * &fa)
    };
    let second = fb == rhs_b;
    let mut check = SeriesCheck::compare(fa, rhs_a);
    check.holds &= second;
    Ok(check)
}

/// `1F1(b; b+r | x) = e^x 1F1(r; b+r | -x)` through `order`.
pub fn f11_transform_check(b: &Rational, r: &Rational, order: usize) -> Result<SeriesCheck> {
    let bottom = [b + r];
    let lhs = pfq_series(std::slice::from_ref(b), &bottom, &Rational::one(), order)?;
    let inner = pfq_series(std::slice::from_ref(r), &bottom, &-Rational::one(), order)?;
    let rhs = &PowerSeries::exp(&Rational::one(), order) * &inner;
    Ok(SeriesCheck::compare(lhs, rhs))
}

fn check_all_positive(params: &[&Rational]) -> Result<()> {
    if let Some(p) = params.iter().find(|p| !p.is_positive()) {
        return Err(Error::InvalidParameter(format!("parameter {p} must be positive")));
    }
    Ok(())
}

/// Parameters `(r_1, b_1, r_2, b_2)` of two urns.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TwoUrns {
    pub r1: Rational,
    pub b1: Rational,
    pub r2: Rational,
    pub b2: Rational,
}

impl TwoUrns {
    pub fn new(r1: Rational, b1: Rational, r2: Rational, b2: Rational) -> Result<Self> {
        check_all_positive(&[&r1, &b1, &r2, &b2])?;
        Ok(TwoUrns { r1, b1, r2, b2 })
    }

    pub fn from_spec(spec: &UrnSpec) -> Result<Self> {
        match spec.urns() {
            [u, v] => TwoUrns::new(u.r.clone(), u.b.clone(), v.r.clone(), v.b.clone()),
            other => Err(Error::InvalidParameter(format!("expected 2 urns, got {}", other.len()))),
        }
    }

    fn validate(&self) -> Result<()> {
        check_all_positive(&[&self.r1, &self.b1, &self.r2, &self.b2])
    }

    /// `3F2(-n, r_1, r_2; r_1+b_1, r_2+b_2 | 1)`.
    pub fn spec(&self, n: u64) -> HypergeometricSpec {
        HypergeometricSpec::new(
            vec![-Rational::from(n), self.r1.clone(), self.r2.clone()],
            vec![&self.r1 + &self.b1, &self.r2 + &self.b2],
            Rational::one(),
        )
    }
}

/// Left side of the two-urn identity, `3F2(-n, r_1, r_2; r_1+b_1, r_2+b_2 | 1)`.
pub fn f32_lhs(n: u64, p: &TwoUrns) -> Result<Rational> {
    p.validate()?;
    eval_terminating_pfq(&p.spec(n))
}

/// Sum over outcome classes: `(R,B)` `i` times, `(B,R)` `j` times and `(B,B)`
/// `k` times, weighted by the trinomial `n!/(i! j! k!)`.
pub fn f32_trinomial_rhs(n: u64, p: &TwoUrns) -> Result<Rational> {
    p.validate()?;
    let fact: Vec<Rational> = (0..=n).map(|k| Rational::from(factorial(k))).collect();
    let den = rising_factorial(&(&p.r1 + &p.b1), n) * rising_factorial(&(&p.r2 + &p.b2), n);
    let mut acc = Rational::zero();
    for i in 0..=n {
        for j in 0..=n - i {
            let k = n - i - j;
            let multinomial = &fact[n as usize] / (&fact[i as usize] * &fact[j as usize] * &fact[k as usize]);
            acc += multinomial
                * rising_factorial(&p.r1, i)
                * rising_factorial(&p.b1, j + k)
                * rising_factorial(&p.r2, j)
                * rising_factorial(&p.b2, i + k);
        }
    }
    Ok(acc / den)
}

/// Conditioning on the first urn: `Σ_i C(n,i) (r_1)_i (b_1)_{n-i} (b_2)_i / ((r_1+b_1)_n (r_2+b_2)_i)`.
pub fn f32_single_sum(n: u64, p: &TwoUrns) -> Result<Rational> {
    p.validate()?;
    let first_total = rising_factorial(&(&p.r1 + &p.b1), n);
    let second_total = &p.r2 + &p.b2;
    let mut acc = Rational::zero();
    for (i, c) in binomial_row(n).into_iter().enumerate() {
        let i = i as u64;
        acc += Rational::from(c)
            * rising_factorial(&p.r1, i)
            * rising_factorial(&p.b1, n - i)
            * rising_factorial(&p.b2, i)
            / rising_factorial(&second_total, i);
    }
    Ok(acc / first_total)
}

/// `3F2(-n, r_1, r_2; r_1+b_1, r_2+b_2 | 1)` against
/// `(b_1)_n/(r_1+b_1)_n · 3F2(-n, r_1, b_2; 1-b_1-n, r_2+b_2 | 1)`.
pub fn f32_gasper_check(n: u64, p: &TwoUrns) -> Result<IdentityCheck> {
    let lhs = f32_lhs(n, p)?;
    let nq = Rational::from(n);
    let transformed = HypergeometricSpec::new(
        vec![-&nq, p.r1.clone(), p.b2.clone()],
        vec![Rational::one() - &p.b1 - &nq, &p.r2 + &p.b2],
        Rational::one(),
    );
    let prefactor = rising_factorial(&p.b1, n) / rising_factorial(&(&p.r1 + &p.b1), n);
    Ok(IdentityCheck::compare(lhs, prefactor * eval_terminating_pfq(&transformed)?))
}

/// `U_{m,n}(r) = Σ_k (-1)^k C(n,k) (r/(r+k))^m`.
pub fn u_number(m: u32, n: u64, r: &Rational) -> Result<Rational> {
    let mut acc = Rational::zero();
    for (k, c) in binomial_row(n).into_iter().enumerate() {
        let ratio = r.checked_div(&(r + Rational::from(k as u64))).map_err(|_| Error::Pole)?;
        let term = Rational::from(c) * ratio.pow(m);
        if k % 2 == 0 {
            acc += term;
        } else {
            acc -= term;
        }
    }
    Ok(acc)
}

/// `z Π_{j=0}^{n} 1/(1 - z/(r+j))` through `order`.
fn u_gf_product(n: u64, r: &Rational, order: usize) -> Result<PowerSeries> {
    let mut prod = PowerSeries::one(order);
    for j in 0..=n {
        let c = (r + Rational::from(j)).recip().map_err(|_| Error::Pole)?;
        prod = &prod * &PowerSeries::geometric(&c, order);
    }
    Ok(prod.shift())
}

/// Generating function of the `U` numbers:
///
/// ```text
/// r C(r+n, n) Σ_{m>=1} U_{m,n}(r) (z/r)^m = z / Π_{j=0}^{n} (1 - z/(r+j))
/// ```
///
/// with `C(r+n, n) = (r+1)_n / n!`. The prefactor is `(r)_{n+1}/n!`, as the
/// partial-fraction expansion of the right side gives; see
/// [`u_gf_unscaled_check`] for the variant without the leading `r` and with
/// the `m = 0` term.
pub fn u_gf_check(n: u64, r: &Rational, order: usize) -> Result<SeriesCheck> {
    if r.is_zero() {
        return Err(Error::Pole);
    }
    let prefactor = r * rational_binomial(r, n);
    let lhs = u_gf_lhs(n, r, order, &prefactor, 1)?;
    Ok(SeriesCheck::compare(lhs, u_gf_product(n, r, order)?))
}

/// `C(r+n, n) Σ_{m>=0} U_{m,n}(r) (z/r)^m` against the same product. Equal
/// only when `r = 1` and `n >= 1`.
pub fn u_gf_unscaled_check(n: u64, r: &Rational, order: usize) -> Result<SeriesCheck> {
    if r.is_zero() {
        return Err(Error::Pole);
    }
    let lhs = u_gf_lhs(n, r, order, &rational_binomial(r, n), 0)?;
    Ok(SeriesCheck::compare(lhs, u_gf_product(n, r, order)?))
}

fn u_gf_lhs(n: u64, r: &Rational, order: usize, prefactor: &Rational, first_m: usize) -> Result<PowerSeries> {
    let inv_r = r.recip()?;
    let coeffs = (0..=order)
        .map(|m| {
            if m < first_m {
                return Ok(Rational::zero());
            }
            Ok(prefactor * u_number(m as u32, n, r)? * inv_r.pow(m as u32))
        })
        .collect::<Result<_>>()?;
    Ok(PowerSeries::new(coeffs))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PositivityViolation {
    pub spec_index: usize,
    pub n: u64,
    pub value: Rational,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PositivityReport {
    pub evaluated: usize,
    pub violations: Vec<PositivityViolation>,
}

/// Evaluates the multi-urn series for every spec and every `n <= n_max`,
/// collecting any non-positive value.
pub fn positivity_scan(n_max: u64, specs: &[UrnSpec]) -> Result<PositivityReport> {
    let mut report = PositivityReport { evaluated: 0, violations: Vec::new() };
    for (spec_index, spec) in specs.iter().enumerate() {
        for n in 0..=n_max {
            let value = multi_urn_bbar(n, spec)?;
            report.evaluated += 1;
            if !value.is_positive() {
                report.violations.push(PositivityViolation { spec_index, n, value });
            }
        }
    }
    Ok(report)
}
