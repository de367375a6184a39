//! Closed-form separability probabilities, evaluated exactly where the
//! Gamma factors allow it and to a requested number of digits otherwise.
//!
//! * `p1`: the concise series `Σ_i f(α + i)`;
//! * `p2`: `1 − prefactor · ₆F₅(…; 1)`;
//! * `p_k4`, `q_k4`: the α = 4 induced-measure formulas, exact rationals;
//! * `forrester_pdf*`: the 2x2 octonionic eigenvalue density and its
//!   normalizer.

use rug::float::Constant;
use rug::ops::Pow;
use rug::{Float, Integer, Rational};
use serde::Serialize;

use crate::error::{Error, Result};

/// Coefficients of q(α), highest degree first.
pub const Q_COEFFS: [i64; 6] = [185000, 779750, 1289125, 1042015, 410694, 63000];

/// Coefficients of S(k), highest degree first.
pub const S_COEFFS: [i64; 11] = [
    8,
    736,
    30908,
    785888,
    13511051,
    165605534,
    1478827827,
    9572954872,
    43203702816,
    122897189520,
    166878079200,
];

pub const MIN_PRECISION: u32 = 20;

/// Consecutive sub-threshold terms required before a geometric tail is
/// accepted.
const QUIET_TERMS: usize = 50;
/// Number of trailing term ratios used for the geometric tail bound.
const RATIO_WINDOW: usize = 10;
const MAX_TERMS: usize = 1_000_000;

/// Working precision in bits for `digits` decimal digits.
pub fn working_bits(digits: u32) -> u32 {
    (f64::from(digits) * std::f64::consts::LOG2_10).ceil() as u32 + 64
}

fn ten_pow_neg(digits: u32, bits: u32) -> Float {
    Float::with_val(bits, 10).pow(-(digits as i32))
}

pub fn poly_eval(coeffs: &[i64], x: &Rational) -> Rational {
    coeffs
        .iter()
        .fold(Rational::new(), |acc, &c| acc * x + Rational::from(c))
}

fn rat(n: i64, d: i64) -> Rational {
    Rational::from((n, d))
}

/// Parses `"p/q"`, an integer, or a plain decimal such as `"0.125"`.
pub fn parse_rational(s: &str) -> Result<Rational> {
    let s = s.trim();
    if let Some((int, frac)) = s.split_once('.') {
        if s.contains('/') {
            return Err(Error::Domain(format!("cannot parse '{s}' as a rational")));
        }
        let neg = int.starts_with('-');
        let digits = format!("{}{}", int.trim_start_matches(['-', '+']), frac);
        let num: Integer = digits
            .parse()
            .map_err(|_| Error::Domain(format!("cannot parse '{s}' as a rational")))?;
        let den = Integer::from(10).pow(frac.len() as u32);
        let r = Rational::from((num, den));
        return Ok(if neg { -r } else { r });
    }
    s.parse::<Rational>()
        .map_err(|_| Error::Domain(format!("cannot parse '{s}' as a rational")))
}

// ---------------------------------------------------------------------------
// Exact Gamma at integers and half-integers
// ---------------------------------------------------------------------------

/// `Γ(x) = r · √π^p` for a positive integer (`p = 0`) or positive
/// half-integer (`p = 1`), using `Γ(n + 1/2) = (2n)! √π / (4^n n!)`.
pub fn gamma_half_integer(x: &Rational) -> Option<(Rational, u32)> {
    if *x <= 0 {
        return None;
    }
    let den = x.denom();
    if *den == 1 {
        let n = x.numer().to_u32()?;
        return Some((Rational::from(Integer::from(Integer::factorial(n - 1))), 0));
    }
    if *den == 2 {
        let n = (x.numer().clone() - 1u32) / 2u32;
        let n = n.to_u32()?;
        let num = Integer::from(Integer::factorial(2 * n));
        let den = Integer::from(4).pow(n) * Integer::from(Integer::factorial(n));
        return Some((Rational::from((num, den)), 1));
    }
    None
}

/// A product `coef · √π^power` that stays exact while every Gamma argument
/// is an integer or half-integer.
#[derive(Clone, Debug)]
pub struct SqrtPiRational {
    pub coef: Rational,
    pub sqrt_pi_power: i32,
}

impl SqrtPiRational {
    pub fn one() -> Self {
        SqrtPiRational {
            coef: Rational::from(1),
            sqrt_pi_power: 0,
        }
    }

    pub fn mul_rational(mut self, r: &Rational) -> Self {
        self.coef *= r;
        self
    }

    pub fn mul_gamma(mut self, x: &Rational) -> Option<Self> {
        let (r, p) = gamma_half_integer(x)?;
        self.coef *= r;
        self.sqrt_pi_power += p as i32;
        Some(self)
    }

    pub fn div_gamma(mut self, x: &Rational) -> Option<Self> {
        let (r, p) = gamma_half_integer(x)?;
        self.coef /= r;
        self.sqrt_pi_power -= p as i32;
        Some(self)
    }

    pub fn into_rational(self) -> Option<Rational> {
        (self.sqrt_pi_power == 0).then_some(self.coef)
    }
}

/// `2^e` for integer `e`.
fn two_pow(e: &Rational) -> Option<Rational> {
    if *e.denom() != 1 {
        return None;
    }
    let e = e.numer().to_i32()?;
    let p = Rational::from(Integer::from(1) << e.unsigned_abs());
    Some(if e >= 0 { p } else { p.recip() })
}

fn pow2_rational(e: i32) -> Rational {
    let p = Rational::from(Integer::from(1) << e.unsigned_abs());
    if e >= 0 {
        p
    } else {
        p.recip()
    }
}

fn gamma_float(x: &Rational, bits: u32) -> Float {
    Float::with_val(bits, x).gamma()
}

// ---------------------------------------------------------------------------
// Results
// ---------------------------------------------------------------------------

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ProbForm {
    Exact,
    TruncatedSeries,
}

/// A probability value: an exact rational, or a high-precision value with
/// `|true − value| ≤ error_bound`.
#[derive(Clone, Debug)]
pub struct ExactProb {
    pub exact: Option<Rational>,
    pub value: Float,
    pub error_bound: Float,
    pub form: ProbForm,
    pub precision: u32,
    pub terms: u64,
}

impl ExactProb {
    fn exact(r: Rational, precision: u32) -> Self {
        let bits = working_bits(precision);
        ExactProb {
            value: Float::with_val(bits, &r),
            exact: Some(r),
            error_bound: Float::new(bits),
            form: ProbForm::Exact,
            precision,
            terms: 0,
        }
    }

    pub fn to_f64(&self) -> f64 {
        self.value.to_f64()
    }

    /// Decimal expansion with `digits` significant digits.
    pub fn decimal(&self, digits: usize) -> String {
        format_decimal(&self.value, digits)
    }

    /// `|self − r|` as a float.
    pub fn distance_to(&self, r: &Rational) -> Float {
        let bits = self.value.prec();
        let d = Float::with_val(bits, &self.value - Float::with_val(bits, r));
        d.abs()
    }

    /// Simplest rational inside the error enclosure, accepted only when its
    /// denominator is at most `10^((precision − 5) / 2)`; a random interval
    /// of this width would typically need a denominator near
    /// `10^(precision / 2)`.
    pub fn recognize(&self) -> Option<Rational> {
        if let Some(r) = &self.exact {
            return Some(r.clone());
        }
        // exact endpoints, widened by one ulp of the rounded midpoint
        let mid = self.value.to_rational()?;
        let ulp = match self.value.get_exp() {
            Some(e) => Rational::from(Integer::from(1) << self.value.prec()).recip()
                * pow2_rational(e),
            None => Rational::new(),
        };
        let half = self.error_bound.to_rational()? + ulp;
        let lo = Rational::from(&mid - &half).max(Rational::new());
        let hi = mid + half;
        let r = simplest_rational_between(&lo, &hi)?;
        let limit = Integer::from(10).pow(self.precision.saturating_sub(5) / 2);
        (*r.denom() <= limit).then_some(r)
    }
}

pub fn format_decimal(x: &Float, digits: usize) -> String {
    if x.is_zero() {
        return "0".into();
    }
    let s = x.to_string_radix(10, Some(digits));
    // MPFR prints d.ddd…e±x; rewrite as plain positional notation
    let (mant, exp) = match s.split_once('e') {
        Some((m, e)) => (m.to_string(), e.parse::<i64>().unwrap_or(0)),
        None => (s.clone(), 0),
    };
    let neg = mant.starts_with('-');
    let mant = mant.trim_start_matches('-');
    let (ip, fp) = mant.split_once('.').unwrap_or((mant, ""));
    let digits_all = format!("{ip}{fp}");
    let point = ip.len() as i64 + exp;
    let body = if point <= 0 {
        format!("0.{}{}", "0".repeat((-point) as usize), digits_all)
    } else if point as usize >= digits_all.len() {
        format!("{}{}", digits_all, "0".repeat(point as usize - digits_all.len()))
    } else {
        let (a, b) = digits_all.split_at(point as usize);
        format!("{a}.{b}")
    };
    if neg {
        format!("-{body}")
    } else {
        body
    }
}

/// Simplest rational (smallest denominator) in the closed interval
/// `[lo, hi]`, for `0 ≤ lo ≤ hi`.
pub fn simplest_rational_between(lo: &Rational, hi: &Rational) -> Option<Rational> {
    if lo > hi || *lo < 0 {
        return None;
    }
    let ceil_lo = lo.clone().ceil();
    if ceil_lo <= *hi {
        return Some(ceil_lo);
    }
    let n = lo.clone().floor();
    let inner_lo = Rational::from(hi - &n).recip();
    let inner_hi = Rational::from(lo - &n).recip();
    let inner = simplest_rational_between(&inner_lo, &inner_hi)?;
    Some(n + inner.recip())
}

// ---------------------------------------------------------------------------
// f(α) and P1
// ---------------------------------------------------------------------------

fn q_of(alpha: &Rational) -> Rational {
    poly_eval(&Q_COEFFS, alpha)
}

/// Exact `f(α)` when `α` is an integer or half-integer.
pub fn f_term_exact(alpha: &Rational) -> Option<Rational> {
    if *alpha <= 0 {
        return None;
    }
    let a = alpha.clone();
    let pow2 = two_pow(&(rat(-4, 1) * &a - 6u32))?;
    let mut acc = SqrtPiRational::one()
        .mul_rational(&(q_of(&a) / Rational::from(3)))
        .mul_rational(&pow2);
    acc = acc.mul_gamma(&(rat(3, 1) * &a + rat(5, 2)))?;
    acc = acc.mul_gamma(&(rat(5, 1) * &a + 2u32))?;
    acc = acc.div_gamma(&(a.clone() + 1u32))?;
    acc = acc.div_gamma(&(rat(2, 1) * &a + 3u32))?;
    acc = acc.div_gamma(&(rat(5, 1) * &a + rat(13, 2)))?;
    acc.into_rational()
}

/// `f(α)` to `precision` digits.
pub fn f_term(alpha: &Rational, precision: u32) -> Result<Float> {
    if *alpha <= 0 {
        return Err(Error::Domain(format!("f(α) needs α > 0, got {alpha}")));
    }
    let bits = working_bits(precision);
    if let Some(r) = f_term_exact(alpha) {
        return Ok(Float::with_val(bits, &r));
    }
    let a = alpha;
    let mut v = Float::with_val(bits, &q_of(a)) / 3u32;
    let e = Float::with_val(bits, &(rat(-4, 1) * a - 6u32));
    v *= e.exp2();
    v *= gamma_float(&(rat(3, 1) * a + rat(5, 2)), bits);
    v *= gamma_float(&(rat(5, 1) * a + 2u32), bits);
    v /= gamma_float(&(a.clone() + 1u32), bits);
    v /= gamma_float(&(rat(2, 1) * a + 3u32), bits);
    v /= gamma_float(&(rat(5, 1) * a + rat(13, 2)), bits);
    Ok(v)
}

/// `f(β + 1) / f(β)`, a rational function of β.
pub fn f_ratio(beta: &Rational) -> Rational {
    let b = beta;
    let mut r = q_of(&(b.clone() + 1u32)) / q_of(b) / Rational::from(16);
    for m in [rat(5, 2), rat(7, 2), rat(9, 2)] {
        r *= rat(3, 1) * b + m;
    }
    for m in 2..=6 {
        r *= rat(5, 1) * b + Rational::from(m);
    }
    r /= b.clone() + 1u32;
    r /= rat(2, 1) * b + 3u32;
    r /= rat(2, 1) * b + 4u32;
    for m in 0..5 {
        r /= rat(5, 1) * b + rat(13, 2) + Rational::from(m);
    }
    r
}

/// Limit of [`f_ratio`] as β → ∞: `27/64`.
pub fn f_ratio_limit() -> Rational {
    rat(27, 64)
}

/// `P1(α) = Σ_{i≥0} f(α + i)` with a geometric tail bound.
///
/// Summation stops once `QUIET_TERMS` consecutive terms fall below
/// `10^−precision`. The tail after the last term `t` is bounded by
/// `t·r/(1 − r)` where `r` is the larger of the last ten term ratios and
/// their limit 27/64. Integer and half-integer α are summed in exact
/// rational arithmetic.
pub fn p1(alpha: &Rational, precision: u32) -> Result<ExactProb> {
    check_precision(precision)?;
    if *alpha <= 0 {
        return Err(Error::Domain(format!("P1(α) needs α > 0, got {alpha}")));
    }
    let bits = working_bits(precision);
    let eps = Rational::from(Integer::from(10).pow(precision)).recip();
    let exact_start = f_term_exact(alpha);
    let mut ratios: Vec<Rational> = Vec::new();
    let mut beta = alpha.clone();
    let mut quiet = 0usize;
    let mut n_terms = 0u64;

    match exact_start {
        Some(t0) => {
            let mut term = t0;
            let mut sum = Rational::new();
            loop {
                sum += &term;
                n_terms += 1;
                quiet = if term < eps { quiet + 1 } else { 0 };
                let ratio = f_ratio(&beta);
                beta += 1u32;
                if quiet >= QUIET_TERMS {
                    let r = geometric_ratio(&ratios)?;
                    let tail = Rational::from(&term * &r) / (Rational::from(1) - &r);
                    let half = Rational::from(&tail / 2u32);
                    let mid = Rational::from(&sum + &half);
                    return Ok(ExactProb {
                        exact: None,
                        value: Float::with_val(bits, &mid),
                        error_bound: Float::with_val(bits, &half),
                        form: ProbForm::TruncatedSeries,
                        precision,
                        terms: n_terms,
                    });
                }
                term *= &ratio;
                push_ratio(&mut ratios, ratio);
                if n_terms as usize >= MAX_TERMS {
                    return Err(Error::NonConvergence(format!(
                        "P1({alpha}) still above threshold after {MAX_TERMS} terms"
                    )));
                }
            }
        }
        None => {
            let mut term = f_term(alpha, precision)?;
            let mut sum = Float::new(bits);
            let eps_f = ten_pow_neg(precision, bits);
            loop {
                sum += &term;
                n_terms += 1;
                quiet = if term < eps_f { quiet + 1 } else { 0 };
                let ratio = f_ratio(&beta);
                beta += 1u32;
                if quiet >= QUIET_TERMS {
                    let r = geometric_ratio(&ratios)?;
                    let rf = Float::with_val(bits, &r);
                    let tail = Float::with_val(bits, &term * &rf) / (Float::with_val(bits, 1) - &rf);
                    // rounding: one half-ulp per operation, generously
                    let round = Float::with_val(bits, 2).pow(-((bits - 8) as i32)) * (n_terms as u32 * 4);
                    let half = Float::with_val(bits, &tail / 2u32);
                    let value = Float::with_val(bits, &sum + &half);
                    return Ok(ExactProb {
                        exact: None,
                        value,
                        error_bound: half + round,
                        form: ProbForm::TruncatedSeries,
                        precision,
                        terms: n_terms,
                    });
                }
                term *= Float::with_val(bits, &ratio);
                push_ratio(&mut ratios, ratio);
                if n_terms as usize >= MAX_TERMS {
                    return Err(Error::NonConvergence(format!(
                        "P1({alpha}) still above threshold after {MAX_TERMS} terms"
                    )));
                }
            }
        }
    }
}

fn push_ratio(ratios: &mut Vec<Rational>, r: Rational) {
    ratios.push(r);
    if ratios.len() > RATIO_WINDOW {
        ratios.remove(0);
    }
}

fn geometric_ratio(ratios: &[Rational]) -> Result<Rational> {
    let mut r = f_ratio_limit();
    for x in ratios {
        if *x > r {
            r = x.clone();
        }
    }
    if r >= 1 {
        return Err(Error::NonConvergence(format!(
            "term ratio {} is not below 1",
            r.to_f64()
        )));
    }
    Ok(r)
}

fn check_precision(precision: u32) -> Result<()> {
    if precision < MIN_PRECISION {
        return Err(Error::Domain(format!(
            "precision must be at least {MIN_PRECISION} digits (got {precision})"
        )));
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// Hypergeometric series at unit argument
// ---------------------------------------------------------------------------

/// Result of summing a hypergeometric series.
#[derive(Clone, Debug)]
pub struct SeriesSum {
    pub value: Float,
    pub error_estimate: Float,
    pub direct_terms: u64,
    pub tail_orders: usize,
}

/// `pFq(upper; lower; 1)` for `p = q + 1` with
/// `Re(Σ lower − Σ upper) > 0`.
///
/// The first `N` terms are summed directly. The remainder
/// `T_N = Σ_{m≥N} t_m` is written as `t_N · G(N)` where `G` satisfies
/// `G(n) = 1 + R(n) G(n + 1)` with `R(n) = t_{n+1}/t_n`; `G` has an
/// asymptotic expansion `n Σ_j g_j n^{−j}` whose coefficients follow from
/// that recurrence. `N` is doubled until the smallest retained expansion
/// term is below `10^−precision` relative to the sum.
pub fn hypergeometric_unit(upper: &[Rational], lower: &[Rational], precision: u32) -> Result<SeriesSum> {
    if upper.len() != lower.len() + 1 {
        return Err(Error::Domain("need p = q + 1 parameters".into()));
    }
    if lower.iter().any(|b| *b <= 0 && *b.denom() == 1) {
        return Err(Error::Domain("lower parameter is a non-positive integer".into()));
    }
    let sum_up: Rational = upper.iter().sum();
    let sum_lo: Rational = lower.iter().sum();
    // t_n ~ n^{-s}
    let s = Rational::from(&sum_lo + 1u32) - &sum_up;
    if s <= 1 {
        return Err(Error::NonConvergence(format!(
            "series at unit argument diverges (parameter excess {})",
            Rational::from(&s - 1u32)
        )));
    }
    let bits = working_bits(precision) + 32;
    let eps = ten_pow_neg(precision, bits);
    let max_order = 120usize;
    let g = tail_coefficients(upper, lower, &s, max_order, bits)?;

    let max_param = upper
        .iter()
        .chain(lower.iter())
        .map(|x| x.to_f64().abs())
        .fold(1.0, f64::max);
    let mut n_target = ((8.0 * max_param).ceil() as u64).max(256);

    let up_f: Vec<Float> = upper.iter().map(|x| Float::with_val(bits, x)).collect();
    let lo_f: Vec<Float> = lower.iter().map(|x| Float::with_val(bits, x)).collect();
    let mut term = Float::with_val(bits, 1);
    let mut partial = Float::new(bits);
    let mut n: u64 = 0;
    loop {
        while n < n_target {
            partial += &term;
            let nf = Float::with_val(bits, n);
            let mut num = Float::with_val(bits, 1);
            for a in &up_f {
                num *= Float::with_val(bits, &nf + a);
            }
            let mut den = Float::with_val(bits, &nf + 1u32);
            for b in &lo_f {
                den *= Float::with_val(bits, &nf + b);
            }
            term *= num;
            term /= den;
            n += 1;
            if term.is_zero() {
                return Ok(SeriesSum {
                    value: partial,
                    error_estimate: Float::new(bits),
                    direct_terms: n,
                    tail_orders: 0,
                });
            }
        }
        // term == t_N, N == n
        let nf = Float::with_val(bits, n);
        let inv = Float::with_val(bits, nf.recip_ref());
        let mut pow = Float::with_val(bits, 1);
        let mut series = Float::new(bits);
        let mut last = Float::with_val(bits, f64::INFINITY);
        let mut orders = 0;
        for gj in &g {
            let t = Float::with_val(bits, gj * &pow);
            let mag = Float::with_val(bits, t.abs_ref());
            if mag > last && orders > 2 {
                break;
            }
            series += &t;
            last = mag;
            orders += 1;
            pow *= &inv;
        }
        let tail = Float::with_val(bits, &term * &nf) * &series;
        let value = Float::with_val(bits, &partial + &tail);
        // truncation of the expansion plus accumulated rounding
        let rounding = Float::with_val(bits, value.abs_ref())
            * Float::with_val(bits, 2).pow(-(bits as i32))
            * (4 * n + 64 * orders as u64);
        let err = Float::with_val(bits, &term * &nf).abs() * &last + rounding;
        let rel = Float::with_val(bits, &err / Float::with_val(bits, value.abs_ref()));
        if rel < eps {
            return Ok(SeriesSum {
                value,
                error_estimate: err,
                direct_terms: n,
                tail_orders: orders,
            });
        }
        if n as usize >= MAX_TERMS {
            return Err(Error::NonConvergence(format!(
                "hypergeometric tail error {} after {} terms",
                rel.to_f64(),
                n
            )));
        }
        n_target = n * 2;
    }
}

/// Generalized binomial `C(x, m)` for integer `x`.
fn gbinom(x: i64, m: usize, bits: u32) -> Float {
    let mut v = Float::with_val(bits, 1);
    for i in 0..m {
        v *= x - i as i64;
        v /= (i + 1) as u32;
    }
    v
}

/// Coefficients `g_0..g_J` of `G(n) ~ n Σ_j g_j n^{−j}`.
fn tail_coefficients(
    upper: &[Rational],
    lower: &[Rational],
    s: &Rational,
    orders: usize,
    bits: u32,
) -> Result<Vec<Float>> {
    let len = orders + 2;
    // R(x) = Π(1 + a x) / [(1 + x) Π(1 + b x)], x = 1/n
    let mut r = vec![Float::new(bits); len];
    r[0] = Float::with_val(bits, 1);
    let mul_linear = |poly: &mut Vec<Float>, c: &Float| {
        for k in (1..poly.len()).rev() {
            let add = Float::with_val(bits, &poly[k - 1] * c);
            poly[k] += add;
        }
    };
    let div_linear = |poly: &mut Vec<Float>, c: &Float| {
        // multiply by Σ (−c)^m x^m, i.e. poly[k] −= c·poly[k−1] in order
        for k in 1..poly.len() {
            let sub = Float::with_val(bits, &poly[k - 1] * c);
            poly[k] -= sub;
        }
    };
    for a in upper {
        mul_linear(&mut r, &Float::with_val(bits, a));
    }
    div_linear(&mut r, &Float::with_val(bits, 1));
    for b in lower {
        div_linear(&mut r, &Float::with_val(bits, b));
    }
    debug_assert!({
        let expect = Float::with_val(bits, &(-s.clone()));
        (Float::with_val(bits, &r[1] - &expect)).abs() < 1e-20
    });

    let mut g: Vec<Float> = Vec::with_capacity(orders);
    let mut h: Vec<Float> = Vec::with_capacity(orders);
    let h_of = |g: &[Float], q: usize| -> Float {
        let mut v = Float::new(bits);
        for (j, gj) in g.iter().enumerate().take(q + 1) {
            v += Float::with_val(bits, gj * &gbinom(1 - j as i64, q - j, bits));
        }
        v
    };
    for p in 1..=orders {
        let denom = Float::with_val(bits, &r[1] + (2 - p as i64));
        if denom.is_zero() {
            return Err(Error::NonConvergence(
                "integer parameter excess: logarithmic tail not supported".into(),
            ));
        }
        let mut acc = Float::with_val(bits, if p == 1 { 1 } else { 0 });
        for j in 0..p.saturating_sub(1) {
            acc += Float::with_val(bits, &g[j] * &gbinom(1 - j as i64, p - j, bits));
            let partial_h = Float::with_val(bits, &g[j] * &gbinom(1 - j as i64, p - 1 - j, bits));
            acc += Float::with_val(bits, &r[1] * &partial_h);
        }
        for m in 2..=p {
            acc += Float::with_val(bits, &r[m] * &h[p - m]);
        }
        let gp = -(acc / &denom);
        g.push(gp);
        // h up to index p−1 is now computable
        let hq = h_of(&g, p - 1);
        h.push(hq);
    }
    Ok(g)
}

// ---------------------------------------------------------------------------
// P2(α, k)
// ---------------------------------------------------------------------------

/// Upper parameters (excluding the leading 1 is not done here: all six are
/// returned) and lower parameters of the ₆F₅ in P2.
pub fn p2_parameters(alpha: &Rational, k: u32) -> (Vec<Rational>, Vec<Rational>) {
    let a = alpha;
    let k = Rational::from(k);
    let five_half = (rat(5, 2) * a) + &k;
    let upper = vec![
        Rational::from(1),
        Rational::from(&five_half + 1u32),
        (&five_half + rat(3, 2)),
        rat(2, 1) * a + &k + rat(3, 2),
        rat(3, 1) * a + &k + rat(3, 2),
        (&five_half + rat(19, 8)),
    ];
    let lower = vec![
        a.clone() + &k + 2u32,
        rat(4, 1) * a + &k + 2u32,
        (&five_half + rat(7, 4)),
        (&five_half + rat(9, 4)),
        (&five_half + rat(11, 8)),
    ];
    (upper, lower)
}

/// Exact prefactor of P2 when the Gamma arguments are integers or
/// half-integers and the π factors cancel.
pub fn p2_prefactor_exact(alpha: &Rational, k: u32) -> Option<Rational> {
    let a = alpha;
    let k = Rational::from(k);
    let lead = a.clone() * (rat(20, 1) * a + rat(8, 1) * &k + 11u32) / Rational::from(2);
    let acc = SqrtPiRational::one()
        .mul_rational(&lead)
        .mul_gamma(&(rat(5, 1) * a + rat(2, 1) * &k + 2u32))?
        .mul_gamma(&(rat(3, 1) * a + &k + rat(3, 2)))?
        .mul_gamma(&(rat(2, 1) * a + &k + rat(3, 2)))?
        .div_gamma(&(rat(5, 1) * a + rat(2, 1) * &k + rat(7, 2)))?
        .div_gamma(&(a.clone() + &k + 2u32))?
        .div_gamma(&(rat(4, 1) * a + &k + 2u32))?;
    let mut acc = acc;
    acc.sqrt_pi_power -= 1;
    acc.into_rational()
}

fn p2_prefactor(alpha: &Rational, k: u32, bits: u32) -> Float {
    if let Some(r) = p2_prefactor_exact(alpha, k) {
        return Float::with_val(bits, &r);
    }
    let a = alpha;
    let kk = Rational::from(k);
    let lead = a.clone() * (rat(20, 1) * a + rat(8, 1) * &kk + 11u32);
    let mut v = Float::with_val(bits, &lead);
    v *= gamma_float(&(rat(5, 1) * a + rat(2, 1) * &kk + 2u32), bits);
    v *= gamma_float(&(rat(3, 1) * a + &kk + rat(3, 2)), bits);
    v *= gamma_float(&(rat(2, 1) * a + &kk + rat(3, 2)), bits);
    v /= Float::with_val(bits, Constant::Pi).sqrt() * 2u32;
    v /= gamma_float(&(rat(5, 1) * a + rat(2, 1) * &kk + rat(7, 2)), bits);
    v /= gamma_float(&(a.clone() + &kk + 2u32), bits);
    v /= gamma_float(&(rat(4, 1) * a + &kk + 2u32), bits);
    v
}

/// `P2(α, k) = 1 − prefactor · ₆F₅(…; 1)`, parameters exactly as printed.
pub fn p2(alpha: &Rational, k: u32, precision: u32) -> Result<ExactProb> {
    check_precision(precision)?;
    if *alpha <= 0 {
        return Err(Error::Domain(format!("P2(α, k) needs α > 0, got {alpha}")));
    }
    let bits = working_bits(precision) + 32;
    let (upper, lower) = p2_parameters(alpha, k);
    // one extra digit inside the series so the product stays within budget
    let h = hypergeometric_unit(&upper, &lower, precision + 2)?;
    let pre = p2_prefactor(alpha, k, bits);
    let value = Float::with_val(bits, 1) - Float::with_val(bits, &pre * &h.value);
    let error_bound = Float::with_val(bits, &pre * &h.error_estimate).abs();
    Ok(ExactProb {
        exact: None,
        value,
        error_bound,
        form: ProbForm::TruncatedSeries,
        precision,
        terms: h.direct_terms,
    })
}

// ---------------------------------------------------------------------------
// α = 4 induced-measure formulas
// ---------------------------------------------------------------------------

pub fn s_poly(k: u32) -> Integer {
    let r = poly_eval(&S_COEFFS, &Rational::from(k));
    r.numer().clone()
}

/// `P(k, 4)` as an exact rational.
pub fn p_k4_rational(k: u32) -> Rational {
    let kr = Rational::from(k);
    let lead = Rational::from(Integer::from(1) << (2 * k + 25))
        * (kr.clone() + 11u32)
        * (kr.clone() + 12u32)
        * (kr.clone() + 13u32)
        * Rational::from(s_poly(k))
        / Rational::from(315);
    let mut acc = SqrtPiRational::one()
        .mul_rational(&lead)
        .mul_gamma(&(kr.clone() + rat(27, 2)))
        .and_then(|x| x.mul_gamma(&(rat(2, 1) * &kr + 23u32)))
        .and_then(|x| x.div_gamma(&(rat(3, 1) * &kr + 42u32)))
        .expect("half-integer arguments");
    acc.sqrt_pi_power -= 1;
    let subtrahend = acc.into_rational().expect("√π cancels");
    Rational::from(1) - subtrahend
}

/// `Q(k, 4)` as an exact rational.
pub fn q_k4_rational(k: u32) -> Rational {
    let kr = Rational::from(k);
    let cubic = kr.clone() * &kr * &kr + rat(34, 1) * &kr * &kr + rat(402, 1) * &kr + 1608u32;
    let lead = Rational::from(Integer::from(1) << (2 * k + 23)) * (kr.clone() + 11u32) * cubic;
    let mut acc = SqrtPiRational::one()
        .mul_rational(&lead)
        .mul_gamma(&(kr.clone() + rat(19, 2)))
        .and_then(|x| x.mul_gamma(&(kr.clone() + rat(23, 2))))
        .and_then(|x| x.mul_gamma(&(kr.clone() + rat(27, 2))))
        .and_then(|x| x.div_gamma(&(kr.clone() + 17u32)))
        .and_then(|x| x.div_gamma(&(rat(2, 1) * &kr + rat(43, 2))))
        .expect("half-integer arguments");
    // 1/π
    acc.sqrt_pi_power -= 2;
    let subtrahend = acc.into_rational().expect("π cancels");
    rat(1, 2) - subtrahend
}

pub fn p_k4(k: u32) -> ExactProb {
    ExactProb::exact(p_k4_rational(k), 40)
}

pub fn q_k4(k: u32) -> ExactProb {
    ExactProb::exact(q_k4_rational(k), 40)
}

/// `(P(k,4) − Q(k,4)) / P(k,4)`: the probability that a separable state
/// has `det ρ > det ρ^PT`.
pub fn ordering_ratio_k4(k: u32) -> Rational {
    let p = p_k4_rational(k);
    let q = q_k4_rational(k);
    Rational::from(&p - &q) / p
}

// ---------------------------------------------------------------------------
// 2x2 octonionic eigenvalue density
// ---------------------------------------------------------------------------

/// Unnormalized density `(λ1λ2)^a e^{−c(λ1+λ2)} (λ2−λ1)^8`.
pub fn forrester_pdf(lambda1: f64, lambda2: f64, a: f64, c: f64) -> f64 {
    if lambda1 < 0.0 || lambda2 < lambda1 {
        return 0.0;
    }
    (lambda1 * lambda2).powf(a) * (-c * (lambda1 + lambda2)).exp() * (lambda2 - lambda1).powi(8)
}

/// [`forrester_pdf`] with the domain checked.
pub fn forrester_pdf_checked(lambda1: f64, lambda2: f64, a: f64, c: f64) -> Result<f64> {
    if !(0.0 <= lambda1 && lambda1 <= lambda2) {
        return Err(Error::Domain(format!(
            "density needs 0 <= λ1 <= λ2 (got {lambda1}, {lambda2})"
        )));
    }
    check_pdf_params(a, c)?;
    Ok(forrester_pdf(lambda1, lambda2, a, c))
}

fn check_pdf_params(a: f64, c: f64) -> Result<()> {
    if !(a > -1.0) || !(c > 0.0) {
        return Err(Error::Domain(format!("density needs a > -1 and c > 0 (got a={a}, c={c})")));
    }
    Ok(())
}

/// `∫∫_{0≤λ1≤λ2}` of [`forrester_pdf`]. With the integrand symmetric in
/// the two eigenvalues this is half the integral over the quadrant:
/// `½ c^{−(2a+10)} Σ_j C(8,j) (−1)^{8−j} Γ(a+j+1) Γ(a+9−j)`.
pub fn forrester_pdf_norm(a: f64, c: f64, precision: u32) -> Result<Float> {
    check_pdf_params(a, c)?;
    let bits = working_bits(precision) + 64;
    let af = Float::with_val(bits, a);
    let mut sum = Float::new(bits);
    for j in 0..=8u32 {
        let binom = Integer::from(Integer::binomial_u(8, j));
        let g1 = Float::with_val(bits, &af + (j + 1)).gamma();
        let g2 = Float::with_val(bits, &af + (9 - j)).gamma();
        let mut t = g1 * g2 * &binom;
        if (8 - j) % 2 == 1 {
            t = -t;
        }
        sum += t;
    }
    let cpow = Float::with_val(bits, c).pow(Float::with_val(bits, &af * 2u32) + 10u32);
    Ok(sum / cpow / 2u32)
}

pub fn forrester_pdf_norm_f64(a: f64, c: f64) -> f64 {
    forrester_pdf_norm(a, c, 30).map(|f| f.to_f64()).unwrap_or(f64::NAN)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gamma_half_integer_values() {
        assert_eq!(gamma_half_integer(&rat(5, 1)), Some((rat(24, 1), 0)));
        // Γ(1/2) = √π, Γ(5/2) = 3√π/4
        assert_eq!(gamma_half_integer(&rat(1, 2)), Some((rat(1, 1), 1)));
        assert_eq!(gamma_half_integer(&rat(5, 2)), Some((rat(3, 4), 1)));
        assert_eq!(gamma_half_integer(&rat(1, 3)), None);
        assert_eq!(gamma_half_integer(&rat(0, 1)), None);
    }

    #[test]
    fn parse_rationals() {
        assert_eq!(parse_rational("1/175").unwrap(), rat(1, 175));
        assert_eq!(parse_rational("0.125").unwrap(), rat(1, 8));
        assert_eq!(parse_rational("-0.994").unwrap(), rat(-994, 1000));
        assert_eq!(parse_rational("4").unwrap(), rat(4, 1));
        assert!(parse_rational("x").is_err());
    }

    #[test]
    fn simplest_rational_examples() {
        assert_eq!(simplest_rational_between(&rat(3, 10), &rat(4, 10)), Some(rat(1, 3)));
        assert_eq!(simplest_rational_between(&rat(1, 2), &rat(1, 2)), Some(rat(1, 2)));
        assert_eq!(simplest_rational_between(&rat(7, 5), &rat(9, 5)), Some(rat(3, 2)));
        assert_eq!(simplest_rational_between(&rat(2, 1), &rat(3, 1)), Some(rat(2, 1)));
    }

    #[test]
    fn decimal_formatting() {
        let x = Float::with_val(200, &rat(29, 64));
        assert_eq!(format_decimal(&x, 6), "0.453125");
        let y = Float::with_val(200, &rat(1, 1000));
        assert_eq!(format_decimal(&y, 3), "0.00100");
        let z = Float::with_val(200, 1234.5);
        assert_eq!(format_decimal(&z, 6), "1234.50");
    }

    #[test]
    fn f_ratio_matches_consecutive_terms() {
        for a in [rat(1, 2), rat(1, 1), rat(4, 1), rat(7, 3)] {
            let t0 = f_term(&a, 30).unwrap();
            let t1 = f_term(&(a.clone() + 1u32), 30).unwrap();
            let r = Float::with_val(200, &f_ratio(&a));
            let direct = Float::with_val(200, &t1 / &t0);
            let d = Float::with_val(200, &direct - &r).abs();
            assert!(d < 1e-28, "α = {a}");
        }
    }

    #[test]
    fn low_precision_rejected() {
        assert!(matches!(p1(&rat(1, 1), 10), Err(Error::Domain(_))));
        assert!(matches!(p1(&rat(0, 1), 25), Err(Error::Domain(_))));
        assert!(matches!(p2(&rat(-1, 2), 0, 25), Err(Error::Domain(_))));
    }

    #[test]
    fn hypergeometric_known_closed_form() {
        // 2F1(a, b; c; 1) = Γ(c)Γ(c−a−b)/(Γ(c−a)Γ(c−b)); with a = 1/2,
        // b = 1/2, c = 3/2: Γ(3/2)Γ(1/2)/(Γ(1)Γ(1)) = π/2
        let h = hypergeometric_unit(&[rat(1, 2), rat(1, 2)], &[rat(3, 2)], 30).unwrap();
        let pi_half = Float::with_val(256, Constant::Pi) / 2u32;
        let d = Float::with_val(256, &h.value - &pi_half).abs();
        assert!(d < 1e-30, "diff {}", d.to_f64());
        // 3F2(1, 1, 1; 2, 2; 1) = ζ(2) = π²/6 (t_n ~ n^-2)
        let z = hypergeometric_unit(&[rat(1, 1), rat(1, 1), rat(1, 1)], &[rat(2, 1), rat(2, 1)], 30).unwrap();
        let zeta2 = Float::with_val(256, Constant::Pi).square() / 6u32;
        let d = Float::with_val(256, &z.value - &zeta2).abs();
        assert!(d < 1e-29, "diff {}", d.to_f64());
    }

    #[test]
    fn divergent_series_rejected() {
        // 2F1(1, 1; 2; 1) = Σ 1/(n+1) diverges
        assert!(matches!(
            hypergeometric_unit(&[rat(1, 1), rat(1, 1)], &[rat(2, 1)], 25),
            Err(Error::NonConvergence(_))
        ));
    }

    #[test]
    fn pdf_domain_and_zeros() {
        assert_eq!(forrester_pdf(2.0, 2.0, 3.0, 0.5), 0.0);
        assert!(forrester_pdf_checked(3.0, 2.0, 3.0, 0.5).is_err());
        assert!(forrester_pdf_checked(1.0, 2.0, -1.0, 0.5).is_err());
        assert!(forrester_pdf_checked(1.0, 2.0, 1.0, 0.0).is_err());
        let v0 = forrester_pdf(1.5, 4.0, 0.0, 0.5);
        let expect = (-0.5f64 * 5.5).exp() * 2.5f64.powi(8);
        assert!((v0 - expect).abs() < 1e-12 * expect);
    }
}
