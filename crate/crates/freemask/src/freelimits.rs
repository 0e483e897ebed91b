//! Exact limiting *-moments.
//!
//! Every formula here is a finite sum over non-crossing pair partitions:
//! elliptic-family mixed moments weight each pair by rho when its two
//! positions carry the same star and by 1 otherwise (labels must match), and
//! Marchenko-Pastur moments weight a partition by y^(u-1) where u counts the
//! gamma-pi orbits living entirely on odd positions.

use crate::combinat::{self, K_MAX};
use crate::error::{Error, Result};
use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::fmt;

/// One letter of a *-word: a family label (1-based) and a star flag
/// (`star == true` means the adjoint, which is the transpose for the real
/// matrix models in this crate).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Letter {
    pub label: usize,
    pub star: bool,
}

/// A non-empty *-word such as a1 a1* a2 a2*.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Word {
    letters: Vec<Letter>,
}

impl Word {
    pub fn new(letters: Vec<Letter>) -> Result<Self> {
        if letters.is_empty() {
            return Err(Error::domain("a word needs at least one letter"));
        }
        if letters.iter().any(|l| l.label == 0) {
            return Err(Error::domain("letter labels are 1-based"));
        }
        Ok(Word { letters })
    }

    /// Single-label word from star flags alone.
    pub fn from_stars(stars: &[bool]) -> Result<Self> {
        Word::new(stars.iter().map(|&star| Letter { label: 1, star }).collect())
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn letters(&self) -> &[Letter] {
        &self.letters
    }

    pub fn labels(&self) -> std::collections::BTreeSet<usize> {
        self.letters.iter().map(|l| l.label).collect()
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, l) in self.letters.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{}{}", l.label, if l.star { "*" } else { "" })?;
        }
        Ok(())
    }
}

impl std::str::FromStr for Word {
    type Err = Error;

    /// Parses "1,1*,2,2*": comma-separated letters, each a 1-based label
    /// with an optional trailing `*`. Errors carry the 1-based column of
    /// the offending character.
    fn from_str(s: &str) -> Result<Self> {
        let mut letters = Vec::new();
        let mut col = 1usize;
        for part in s.split(',') {
            let token = part.trim();
            let token_col = col + part.len() - part.trim_start().len();
            if token.is_empty() {
                return Err(Error::parse(token_col, "empty letter"));
            }
            let (digits, star) = match token.strip_suffix('*') {
                Some(d) => (d, true),
                None => (token, false),
            };
            if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
                return Err(Error::parse(token_col, format!("expected a label like 3 or 3*, got {token:?}")));
            }
            let label: usize = digits
                .parse()
                .map_err(|_| Error::parse(token_col, format!("label {digits:?} is out of range")))?;
            if label == 0 {
                return Err(Error::parse(token_col, "labels are 1-based"));
            }
            letters.push(Letter { label, star });
            col += part.len() + 1;
        }
        Word::new(letters)
    }
}

fn check_rho(rho: f64) -> Result<()> {
    if !(rho.is_finite() && (-1.0..=1.0).contains(&rho)) {
        return Err(Error::domain(format!("rho = {rho} must lie in [-1, 1]")));
    }
    Ok(())
}

fn check_even_len(len: usize) -> Result<Option<usize>> {
    if len == 0 {
        return Err(Error::domain("moment of an empty word"));
    }
    if len > 2 * K_MAX {
        return Err(Error::size_limit(format!(
            "word length {len} exceeds 2*K_MAX = {}",
            2 * K_MAX
        )));
    }
    Ok(if len % 2 == 0 { Some(len / 2) } else { None })
}

/// Limiting *-moment of a single elliptic variable with parameter rho: the
/// word is given by its star pattern (false = plain, true = adjoint). Odd
/// lengths vanish; even lengths sum over non-crossing pairings, a pair
/// contributing rho when its endpoints carry equal stars and 1 otherwise.
/// rho = 0 is the circular variable, rho = 1 the semicircular one.
pub fn elliptic_star_moment(stars: &[bool], rho: f64) -> Result<f64> {
    check_rho(rho)?;
    let Some(k) = check_even_len(stars.len())? else {
        return Ok(0.0);
    };
    let mut total = 0.0;
    combinat::for_each_nc2_with_bound(k, K_MAX, |pairs| {
        let mut prod = 1.0;
        for &(r, s) in pairs {
            if stars[r - 1] == stars[s - 1] {
                prod *= rho;
                if prod == 0.0 {
                    break;
                }
            }
        }
        total += prod;
    })?;
    Ok(total)
}

/// Limiting mixed *-moment of a free family of elliptic variables, one rho
/// per label. A non-crossing pair contributes only when it joins equal
/// labels, with weight rho_label on equal stars and 1 on opposite stars.
pub fn free_family_mixed_moment(word: &Word, rho: &BTreeMap<usize, f64>) -> Result<f64> {
    for label in word.labels() {
        match rho.get(&label) {
            None => {
                return Err(Error::config(format!(
                    "word uses label {label} but no rho was supplied for it"
                )))
            }
            Some(&r) => check_rho(r)?,
        }
    }
    let Some(k) = check_even_len(word.len())? else {
        return Ok(0.0);
    };
    let letters = word.letters();
    let mut total = 0.0;
    combinat::for_each_nc2_with_bound(k, K_MAX, |pairs| {
        let mut prod = 1.0;
        for &(r, s) in pairs {
            let (a, b) = (letters[r - 1], letters[s - 1]);
            if a.label != b.label {
                prod = 0.0;
                break;
            }
            if a.star == b.star {
                prod *= rho[&a.label];
                if prod == 0.0 {
                    break;
                }
            }
        }
        total += prod;
    })?;
    Ok(total)
}

/// Marchenko-Pastur law with ratio y > 0: density supported on
/// [(1-sqrt y)^2, (1+sqrt y)^2] plus an atom of mass max(0, 1 - 1/y) at 0.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MPLaw {
    y: f64,
}

impl MPLaw {
    pub fn new(y: f64) -> Result<Self> {
        if !(y.is_finite() && y > 0.0) {
            return Err(Error::domain(format!("MP ratio y = {y} must be positive")));
        }
        Ok(MPLaw { y })
    }

    pub fn y(&self) -> f64 {
        self.y
    }

    /// Left edge (1 - sqrt y)^2 of the continuous part.
    pub fn lower_edge(&self) -> f64 {
        let d = 1.0 - self.y.sqrt();
        d * d
    }

    /// Right edge (1 + sqrt y)^2.
    pub fn upper_edge(&self) -> f64 {
        let d = 1.0 + self.y.sqrt();
        d * d
    }

    /// Mass of the atom at zero: max(0, 1 - 1/y).
    pub fn atom(&self) -> f64 {
        (1.0 - 1.0 / self.y).max(0.0)
    }
}

fn check_moment_k(k: usize) -> Result<()> {
    if k == 0 || k > K_MAX {
        return Err(Error::domain(format!("moment order k = {k} must satisfy 1 <= k <= {K_MAX}")));
    }
    Ok(())
}

fn check_y(y: f64) -> Result<()> {
    if !(y.is_finite() && y > 0.0) {
        return Err(Error::domain(format!("MP ratio y = {y} must be positive")));
    }
    Ok(())
}

/// k-th Marchenko-Pastur moment via the non-crossing expansion:
/// sum over NC2(2k) of y^(u(pi)-1), u(pi) = number of gamma-pi orbits
/// consisting entirely of odd positions.
pub fn mp_moment_nc(k: usize, y: f64) -> Result<f64> {
    check_moment_k(k)?;
    check_y(y)?;
    let mut total = 0.0;
    combinat::for_each_nc2_with_bound(k, K_MAX, |pairs| {
        let (_, odd_orbits) = combinat::orbit_stats(pairs);
        total += y.powi(odd_orbits as i32 - 1);
    })?;
    Ok(total)
}

/// k-th Marchenko-Pastur moment in closed form:
/// sum_{r=0}^{k-1} y^r / (r+1) * C(k, r) * C(k-1, r).
pub fn mp_moment_closed(k: usize, y: f64) -> Result<f64> {
    check_moment_k(k)?;
    check_y(y)?;
    let binom = |n: usize, r: usize| -> f64 {
        let mut v: u128 = 1;
        for i in 0..r {
            v = v * (n - i) as u128 / (i + 1) as u128;
        }
        v as f64
    };
    let mut total = 0.0;
    for r in 0..k {
        total += y.powi(r as i32) / (r + 1) as f64 * binom(k, r) * binom(k - 1, r);
    }
    Ok(total)
}

/// Limiting normalized trace of a product of sample-covariance factors,
/// one label per factor: sum over NC2(2K) of y^(u-1) restricted to pairings
/// that join equal labels, where factor t occupies positions 2t-1 and 2t.
/// With all labels equal this is `mp_moment_nc(K, y)`.
pub fn covariance_mixed_moment_nc(labels: &[usize], y: f64) -> Result<f64> {
    check_moment_k(labels.len())?;
    check_y(y)?;
    if labels.iter().any(|&l| l == 0) {
        return Err(Error::domain("labels are 1-based"));
    }
    let k = labels.len();
    let mut total = 0.0;
    combinat::for_each_nc2_with_bound(k, K_MAX, |pairs| {
        for &(r, s) in pairs {
            if labels[(r - 1) / 2] != labels[(s - 1) / 2] {
                return;
            }
        }
        let (_, odd_orbits) = combinat::orbit_stats(pairs);
        total += y.powi(odd_orbits as i32 - 1);
    })?;
    Ok(total)
}

/// Density of the continuous part of the MP law; zero off the support and
/// at x = 0.
pub fn mp_density(x: f64, law: &MPLaw) -> f64 {
    let (a, b) = (law.lower_edge(), law.upper_edge());
    if x <= 0.0 || x < a || x > b {
        return 0.0;
    }
    ((b - x) * (x - a)).sqrt() / (2.0 * PI * x * law.y())
}

/// Integrand after substituting x = c + r sin(theta) into the MP density:
/// the edge square roots become r cos^2(theta) exactly, so the integrand is
/// smooth on [-pi/2, pi/2]. When a = 0 (y = 1) the 1/x pole cancels
/// algebraically to r (1 - sin theta) / (2 pi y).
fn mp_theta_integrand(theta: f64, law: &MPLaw) -> f64 {
    let (a, b) = (law.lower_edge(), law.upper_edge());
    let c = 0.5 * (a + b);
    let r = 0.5 * (b - a);
    let st = theta.sin();
    if a == 0.0 {
        return r * (1.0 - st) / (2.0 * PI * law.y());
    }
    let x = c + r * st;
    let ct = theta.cos();
    r * r * ct * ct / (2.0 * PI * law.y() * x)
}

/// Adaptive Simpson on [a, b] with the usual |S2 - S1|/15 acceptance test.
fn adaptive_simpson(f: &impl Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
    fn simpson(f: &impl Fn(f64) -> f64, a: f64, fa: f64, b: f64, fb: f64) -> (f64, f64, f64) {
        let m = 0.5 * (a + b);
        let fm = f(m);
        (m, fm, (b - a) / 6.0 * (fa + 4.0 * fm + fb))
    }
    #[allow(clippy::too_many_arguments)]
    fn rec(
        f: &impl Fn(f64) -> f64,
        a: f64,
        fa: f64,
        b: f64,
        fb: f64,
        m: f64,
        fm: f64,
        whole: f64,
        tol: f64,
        depth: u32,
        force: u32,
    ) -> f64 {
        let (lm, flm, left) = simpson(f, a, fa, m, fm);
        let (rm, frm, right) = simpson(f, m, fm, b, fb);
        let delta = left + right - whole;
        // `force` keeps the first few levels splitting unconditionally:
        // symmetric integrands can make the very first refinement agree with
        // the coarse estimate while both are far off.
        if depth == 0 || (force == 0 && delta.abs() <= 15.0 * tol) {
            return left + right + delta / 15.0;
        }
        let (d, fc) = (depth - 1, force.saturating_sub(1));
        rec(f, a, fa, m, fm, lm, flm, left, 0.5 * tol, d, fc)
            + rec(f, m, fm, b, fb, rm, frm, right, 0.5 * tol, d, fc)
    }
    if a == b {
        return 0.0;
    }
    let (fa, fb) = (f(a), f(b));
    let (m, fm, whole) = simpson(f, a, fa, b, fb);
    rec(f, a, fa, b, fb, m, fm, whole, tol, 48, 4)
}

const QUAD_TOL: f64 = 1e-10;

/// Distribution function of the MP law: atom at zero plus the integral of the
/// density up to x, computed by adaptive Simpson in the angle variable.
pub fn mp_cdf(x: f64, law: &MPLaw) -> f64 {
    if x < 0.0 {
        return 0.0;
    }
    let atom = law.atom();
    let (a, b) = (law.lower_edge(), law.upper_edge());
    if x <= a {
        return atom;
    }
    let c = 0.5 * (a + b);
    let r = 0.5 * (b - a);
    let t = ((x.min(b) - c) / r).clamp(-1.0, 1.0);
    let upper = t.asin();
    atom + adaptive_simpson(&|th| mp_theta_integrand(th, law), -0.5 * PI, upper, QUAD_TOL)
}

/// k-th moment of the MP law by quadrature against the density (the atom at
/// zero contributes nothing for k >= 1). Independent cross-check for the two
/// combinatorial routes.
pub fn mp_moment_quadrature(k: usize, law: &MPLaw) -> Result<f64> {
    if k == 0 {
        return Err(Error::domain("quadrature moment needs k >= 1"));
    }
    let (a, b) = (law.lower_edge(), law.upper_edge());
    let c = 0.5 * (a + b);
    let r = 0.5 * (b - a);
    let f = |th: f64| {
        let x = c + r * th.sin();
        x.powi(k as i32) * mp_theta_integrand(th, law)
    };
    Ok(adaptive_simpson(&f, -0.5 * PI, 0.5 * PI, QUAD_TOL))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::combinat::catalan;
    use proptest::prelude::*;

    fn alternating(k: usize) -> Vec<bool> {
        (0..2 * k).map(|i| i % 2 == 1).collect()
    }

    #[test]
    fn elliptic_basic_values() {
        // single pair, opposite stars: always 1
        assert_eq!(elliptic_star_moment(&[false, true], 0.3).unwrap(), 1.0);
        // equal stars: rho
        assert_eq!(elliptic_star_moment(&[false, false], 0.5).unwrap(), 0.5);
        // semicircular rho=1, all plain, length 6: Catalan(3) = 5
        assert_eq!(elliptic_star_moment(&[false; 6], 1.0).unwrap(), 5.0);
        // circular alternating length 4: both NC pairings survive
        assert_eq!(elliptic_star_moment(&alternating(2), 0.0).unwrap(), 2.0);
        // circular, stars (1,1,*,*): only {(1,4),(2,3)} survives
        assert_eq!(
            elliptic_star_moment(&[false, false, true, true], 0.0).unwrap(),
            1.0
        );
        // elliptic all-plain length 4 at rho: both pairings give rho^2
        let rho = 0.5;
        assert_eq!(elliptic_star_moment(&[false; 4], rho).unwrap(), 2.0 * rho * rho);
    }

    #[test]
    fn elliptic_odd_length_vanishes() {
        for len in [1usize, 3, 5, 7] {
            let stars: Vec<bool> = (0..len).map(|i| i % 2 == 0).collect();
            assert_eq!(elliptic_star_moment(&stars, 0.7).unwrap(), 0.0);
        }
    }

    #[test]
    fn elliptic_alternating_is_catalan_for_every_rho() {
        for k in 1..=K_MAX {
            for rho in [-1.0, -0.3, 0.0, 0.5, 1.0] {
                let v = elliptic_star_moment(&alternating(k), rho).unwrap();
                assert_eq!(v, catalan(k).unwrap() as f64, "k={k} rho={rho}");
            }
        }
    }

    #[test]
    fn elliptic_all_plain_is_rho_pow_k_catalan() {
        // every NC pair joins an odd and an even position, so with equal
        // stars everywhere each of the k pairs contributes rho
        for k in 1..=6 {
            for rho in [-0.8, 0.25, 1.0] {
                let v = elliptic_star_moment(&vec![false; 2 * k], rho).unwrap();
                let expect = rho.powi(k as i32) * catalan(k).unwrap() as f64;
                assert!((v - expect).abs() < 1e-12, "k={k} rho={rho}: {v} vs {expect}");
            }
        }
    }

    #[test]
    fn elliptic_rejects_bad_input() {
        assert!(elliptic_star_moment(&[], 0.0).is_err());
        assert!(elliptic_star_moment(&[false, true], 1.5).is_err());
        assert!(elliptic_star_moment(&vec![false; 2 * K_MAX + 2], 0.0).is_err());
    }

    fn word(spec: &[(usize, bool)]) -> Word {
        Word::new(spec.iter().map(|&(label, star)| Letter { label, star }).collect()).unwrap()
    }

    #[test]
    fn mixed_moment_free_independence() {
        let mut rho = BTreeMap::new();
        rho.insert(1, 0.0);
        rho.insert(2, 0.0);
        // c1 c2 c1* c2*: the only label-respecting pairing crosses
        let w = word(&[(1, false), (2, false), (1, true), (2, true)]);
        assert_eq!(free_family_mixed_moment(&w, &rho).unwrap(), 0.0);
        // c1 c1* c2 c2*: factorizes, value 1
        let w = word(&[(1, false), (1, true), (2, false), (2, true)]);
        assert_eq!(free_family_mixed_moment(&w, &rho).unwrap(), 1.0);
    }

    #[test]
    fn mixed_moment_reduces_to_single_variable() {
        let mut rho = BTreeMap::new();
        rho.insert(3, 0.6);
        for stars in [vec![false, true, false, true], vec![false; 6], vec![true, false]] {
            let w = Word::new(
                stars.iter().map(|&s| Letter { label: 3, star: s }).collect(),
            )
            .unwrap();
            assert_eq!(
                free_family_mixed_moment(&w, &rho).unwrap(),
                elliptic_star_moment(&stars, 0.6).unwrap()
            );
        }
    }

    #[test]
    fn mixed_moment_missing_rho_is_config_error() {
        let w = word(&[(1, false), (2, true)]);
        let mut rho = BTreeMap::new();
        rho.insert(1, 0.0);
        assert!(matches!(
            free_family_mixed_moment(&w, &rho).unwrap_err(),
            crate::error::Error::Config(_)
        ));
    }

    #[test]
    fn mp_moments_small_k() {
        // m1 = 1, m2 = 1 + y, m3 = 1 + 3y + y^2
        for y in [0.25, 0.5, 1.0, 2.0, 4.0] {
            assert!((mp_moment_nc(1, y).unwrap() - 1.0).abs() < 1e-14);
            assert!((mp_moment_nc(2, y).unwrap() - (1.0 + y)).abs() < 1e-14);
            assert!((mp_moment_nc(3, y).unwrap() - (1.0 + 3.0 * y + y * y)).abs() < 1e-12);
        }
        assert!((mp_moment_closed(2, 2.0).unwrap() - 3.0).abs() < 1e-14);
        assert!((mp_moment_closed(3, 0.5).unwrap() - 2.75).abs() < 1e-14);
    }

    #[test]
    fn mp_nc_matches_closed_form() {
        for k in 1..=K_MAX {
            for y in [0.25, 0.5, 1.0, 2.0, 4.0] {
                let nc = mp_moment_nc(k, y).unwrap();
                let closed = mp_moment_closed(k, y).unwrap();
                assert!((nc - closed).abs() <= 1e-10 * closed.max(1.0), "k={k} y={y}: {nc} vs {closed}");
            }
        }
    }

    #[test]
    fn mp_at_y_one_is_catalan() {
        for k in 1..=K_MAX {
            assert_eq!(mp_moment_nc(k, 1.0).unwrap(), catalan(k).unwrap() as f64);
        }
    }

    #[test]
    fn covariance_mixed_moment_values() {
        // single label reduces to the plain MP moment
        for k in 1..=5 {
            for y in [0.5, 1.0, 2.0] {
                assert_eq!(
                    covariance_mixed_moment_nc(&vec![7; k], y).unwrap(),
                    mp_moment_nc(k, y).unwrap()
                );
            }
        }
        // alternating labels: only the interval pairing survives, value 1
        for y in [0.5, 1.0, 2.0] {
            assert_eq!(covariance_mixed_moment_nc(&[1, 2], y).unwrap(), 1.0);
        }
    }

    #[test]
    fn mp_density_point_values() {
        let law = MPLaw::new(1.0).unwrap();
        // f(2) = sqrt(2*2) / (4 pi) = 1/(2 pi)
        let v = mp_density(2.0, &law);
        assert!((v - 1.0 / (2.0 * PI)).abs() < 1e-15, "{v}");
        assert_eq!(mp_density(-1.0, &law), 0.0);
        assert_eq!(mp_density(4.5, &law), 0.0);
        assert_eq!(mp_density(0.0, &law), 0.0);
        let law2 = MPLaw::new(0.25).unwrap();
        assert_eq!(mp_density(0.1, &law2), 0.0); // below lower edge 0.25
    }

    #[test]
    fn mp_cdf_total_mass_and_atom() {
        for y in [0.25, 0.5, 1.0, 2.0, 4.0] {
            let law = MPLaw::new(y).unwrap();
            let total = mp_cdf(law.upper_edge(), &law);
            assert!((total - 1.0).abs() < 1e-8, "y={y}: total {total}");
            assert!((mp_cdf(law.upper_edge() + 5.0, &law) - 1.0).abs() < 1e-8);
        }
        let law = MPLaw::new(2.0).unwrap();
        assert!((law.atom() - 0.5).abs() < 1e-15);
        assert!((mp_cdf(0.0, &law) - 0.5).abs() < 1e-12);
        assert_eq!(mp_cdf(-0.5, &law), 0.0);
        let law = MPLaw::new(0.5).unwrap();
        assert_eq!(law.atom(), 0.0);
        assert_eq!(mp_cdf(0.0, &law), 0.0);
    }

    #[test]
    fn mp_cdf_matches_density_midpoint() {
        // numeric derivative of the cdf recovers the density in the bulk
        for y in [0.5, 1.0, 2.0] {
            let law = MPLaw::new(y).unwrap();
            let x = 0.5 * (law.lower_edge() + law.upper_edge());
            let h = 1e-5;
            let deriv = (mp_cdf(x + h, &law) - mp_cdf(x - h, &law)) / (2.0 * h);
            assert!((deriv - mp_density(x, &law)).abs() < 1e-6, "y={y}");
        }
    }

    #[test]
    fn mp_moments_match_quadrature() {
        for k in 1..=4 {
            for y in [0.25, 0.5, 1.0, 2.0] {
                let law = MPLaw::new(y).unwrap();
                let q = mp_moment_quadrature(k, &law).unwrap();
                let m = mp_moment_closed(k, y).unwrap();
                assert!((q - m).abs() < 1e-6 * m.max(1.0), "k={k} y={y}: {q} vs {m}");
            }
        }
    }

    #[test]
    fn word_parse_basics() {
        assert!(Word::new(vec![]).is_err());
        let w = word(&[(1, false), (1, true)]);
        assert_eq!(w.to_string(), "1,1*");
        assert_eq!(w.len(), 2);
    }

    proptest! {
        #[test]
        fn odd_words_always_vanish(len in 1usize..8, seed in any::<u64>()) {
            let len = len * 2 - 1; // force odd
            let stars: Vec<bool> = (0..len).map(|i| (seed >> (i % 64)) & 1 == 1).collect();
            prop_assert_eq!(elliptic_star_moment(&stars, 0.4).unwrap(), 0.0);
        }

        #[test]
        fn mp_cdf_is_monotone(y in 0.1f64..4.0, x1 in -1.0f64..7.0, x2 in -1.0f64..7.0) {
            let law = MPLaw::new(y).unwrap();
            let (lo, hi) = if x1 <= x2 { (x1, x2) } else { (x2, x1) };
            prop_assert!(mp_cdf(lo, &law) <= mp_cdf(hi, &law) + 1e-12);
        }

        #[test]
        fn mp_cdf_bounded(y in 0.1f64..4.0, x in -1.0f64..8.0) {
            let law = MPLaw::new(y).unwrap();
            let v = mp_cdf(x, &law);
            prop_assert!((-1e-12..=1.0 + 1e-8).contains(&v));
        }
    }
}
