//! Entropy function and the asymptotic upper bound on the normalized
//! structure function, with its constants and inverse.

use num_bigint::BigUint;
use num_traits::ToPrimitive;
use serde::Serialize;

use crate::error::{Error, Result};

/// Binary entropy without domain checks; arguments are clamped to `[0, 1]`.
fn h(p: f64) -> f64 {
    let p = p.clamp(0.0, 1.0);
    if p == 0.0 || p == 1.0 {
        0.0
    } else {
        -p * p.log2() - (1.0 - p) * (1.0 - p).log2()
    }
}

fn check_unit(name: &str, x: f64) -> Result<()> {
    if (0.0..=1.0).contains(&x) {
        Ok(())
    } else {
        Err(Error::DomainError(format!("{name} = {x} is outside [0, 1]")))
    }
}

fn check_base(b: usize) -> Result<()> {
    if b < 2 {
        Err(Error::InvalidAlphabet(b))
    } else {
        Ok(())
    }
}

/// `H(p) = -p log2 p - (1-p) log2 (1-p)`, with `0 log 0 = 0`.
pub fn entropy(p: f64) -> Result<f64> {
    check_unit("p", p)?;
    Ok(h(p))
}

/// The `x` in `[0, 1/2]` with `H(x) = y`, by bisection.
pub fn entropy_inv(y: f64) -> Result<f64> {
    check_unit("y", y)?;
    Ok(h_inv(y))
}

fn h_inv(y: f64) -> f64 {
    let (mut lo, mut hi) = (0.0f64, 0.5f64);
    while hi - lo > 1e-13 {
        let mid = 0.5 * (lo + hi);
        if h(mid) < y {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// `Ĥ(p) = H(p) / log2 b`.
pub fn entropy_b(p: f64, b: usize) -> Result<f64> {
    check_base(b)?;
    check_unit("p", p)?;
    Ok(hb(p, b))
}

fn hb(p: f64, b: usize) -> f64 {
    h(p) / (b as f64).log2()
}

fn hb_inv(y: f64, b: usize) -> f64 {
    h_inv((y * (b as f64).log2()).min(1.0))
}

/// `log2 C(n, k)`, from the exact binomial.
pub fn log2_binomial(n: u64, k: u64) -> f64 {
    if k > n {
        return f64::NEG_INFINITY;
    }
    log2_big(&exact_binomial(n, k))
}

/// `C(n, k)` as a quotient of two balanced products.
pub fn exact_binomial(n: u64, k: u64) -> BigUint {
    let k = k.min(n - k);
    product(n - k + 1, n) / product(1, k)
}

fn product(lo: u64, hi: u64) -> BigUint {
    match hi.checked_sub(lo) {
        None => BigUint::from(1u32),
        Some(0) => BigUint::from(lo),
        Some(d) => {
            let mid = lo + d / 2;
            product(lo, mid) * product(mid + 1, hi)
        }
    }
}

fn log2_big(x: &BigUint) -> f64 {
    let bits = x.bits();
    if bits <= 64 {
        return (x.to_u64().unwrap() as f64).log2();
    }
    let shift = bits - 64;
    ((x >> shift).to_u64().unwrap() as f64).log2() + shift as f64
}

/// `|log2 C(n, k) - n H(k/n)|`.
pub fn entropy_gap(n: u64, k: u64) -> f64 {
    if n == 0 {
        return 0.0;
    }
    (log2_binomial(n, k) - n as f64 * h(k as f64 / n as f64)).abs()
}

/// Constants of the bound for alphabet size `b`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BoundConstants {
    pub b: usize,
    /// `1 + Ĥ(b/(b+2)) + (1 - 1/log2 b)·b/(b+2)`.
    pub c_b: f64,
    /// `2p / T(p) = sqrt(1 - (4/(b(b+2)))^2)`.
    pub l_b: f64,
    /// Slope of the linear piece: `ψ(p) = c_b - α_b p` for `p <= L_b/2`.
    pub alpha_b: f64,
    /// `Ĥ(1/2 - L_b/2)`, where the entropy piece of `u` ends.
    pub a1: f64,
    /// `(α_b - c_b)/(α_b - 1)`, where the trivial piece `1 - a` begins.
    pub a2: f64,
}

impl BoundConstants {
    /// `T(p) = 2p / L_b`.
    pub fn t_of(&self, p: f64) -> f64 {
        2.0 * p / self.l_b
    }
}

pub fn bound_constants(b: usize) -> Result<BoundConstants> {
    check_base(b)?;
    let bf = b as f64;
    let x = bf / (bf + 2.0);
    let c_b = if b == 2 {
        2.0
    } else {
        1.0 + hb(x, b) + (1.0 - 1.0 / bf.log2()) * x
    };
    let l_b = (1.0 - (4.0 / (bf * (bf + 2.0))).powi(2)).sqrt();
    let a1 = hb(0.5 - l_b / 2.0, b);
    let alpha_b = 2.0 / l_b * (c_b - a1);
    let a2 = (alpha_b - c_b) / (alpha_b - 1.0);
    Ok(BoundConstants {
        b,
        c_b,
        l_b,
        alpha_b,
        a1,
        a2,
    })
}

/// Upper bound `u(a)` on `limsup h_x(an)/n`.
pub fn u_bound(a: f64, b: usize) -> Result<f64> {
    check_unit("a", a)?;
    let k = bound_constants(b)?;
    Ok(if a <= k.a1 {
        0.5 - hb_inv(a, b)
    } else if a <= k.a2 {
        (k.c_b - a) / k.alpha_b
    } else {
        1.0 - a
    })
}

/// `Δ(T_1, T_2, r)`: exponential growth rate of the number of paths through
/// a Kayleigh graph with `pn` states that spend `T_1 n` steps before the loop
/// state, `T_2 n` after it, and take `rn` self-loops.
pub fn delta(t1: f64, t2: f64, r: f64, p: f64, b: usize) -> Result<f64> {
    check_base(b)?;
    let rest = 1.0 - t1 - t2;
    if !(0.0..=0.5).contains(&p) || t1 < p - 1e-12 || t2 < p - 1e-12 || rest < -1e-12 || r < 0.0 || r > rest.max(0.0) + 1e-12 {
        return Err(Error::DomainError(format!(
            "(T1, T2, r, p) = ({t1}, {t2}, {r}, {p}) is outside the simplex"
        )));
    }
    let inner = if rest <= 0.0 { 0.0 } else { rest * hb(r / rest, b) };
    Ok(t1 * hb(0.5 - p / (2.0 * t1), b)
        + t2 * hb(0.5 - p / (2.0 * t2), b)
        + inner
        + rest
        + (1.0 - 1.0 / (b as f64).log2()) * r)
}

/// `φ(T, p) = T Ĥ(1/2 - p/T) + (1 - T) c_b`: `Δ` at `T_1 = T_2 = T/2` and the
/// stationary `r`.
pub fn phi(t: f64, p: f64, b: usize) -> Result<f64> {
    let k = bound_constants(b)?;
    if !(0.0..=0.5).contains(&p) || t > 1.0 || t < 2.0 * p || t <= 0.0 {
        return Err(Error::DomainError(format!("(T, p) = ({t}, {p}) is outside 2p <= T <= 1")));
    }
    Ok(t * hb(0.5 - p / t, b) + (1.0 - t) * k.c_b)
}

/// `φ(min(1, T(p)), p)`, the path-count bound before capping by `1 - p`.
pub fn psi_path_bound(p: f64, b: usize) -> Result<f64> {
    if !(0.0..=0.5).contains(&p) {
        return Err(Error::DomainError(format!("p = {p} is outside [0, 1/2]")));
    }
    let k = bound_constants(b)?;
    Ok(if p >= k.l_b / 2.0 {
        hb(0.5 - p, b)
    } else {
        k.c_b - k.alpha_b * p
    })
}

/// `ψ = u⁻¹`: the path-count bound capped by the trivial `1 - p`.
pub fn psi(p: f64, b: usize) -> Result<f64> {
    Ok(psi_path_bound(p, b)?.min(1.0 - p))
}

/// Sampled curves: `(series, x, y)` with series `"u"` over `a ∈ [0, 1]` and
/// `"psi"` over `p ∈ [0, 1/2]`, `grid` points each.
pub fn bounds_table(b: usize, grid: usize) -> Result<Vec<(&'static str, f64, f64)>> {
    if grid < 2 {
        return Err(Error::DomainError(format!("grid must have at least 2 points, got {grid}")));
    }
    let mut rows = Vec::with_capacity(2 * grid);
    for i in 0..grid {
        let a = i as f64 / (grid - 1) as f64;
        rows.push(("u", a, u_bound(a, b)?));
    }
    for i in 0..grid {
        let p = 0.5 * i as f64 / (grid - 1) as f64;
        rows.push(("psi", p, psi(p, b)?));
    }
    Ok(rows)
}

/// Outcome of one numeric property check.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LemmaCheck {
    pub name: &'static str,
    pub points: usize,
    pub failures: usize,
    /// Largest violation seen (0 when none).
    pub worst: f64,
}

impl LemmaCheck {
    pub fn passed(&self) -> bool {
        self.failures == 0 && self.points > 0
    }
}

/// `Δ(T/2 + ε, T/2 - ε, r) <= Δ(T/2, T/2, r)` over a grid, `b = 2`.
pub fn check_symmetric_split(b: usize) -> Result<LemmaCheck> {
    let mut check = LemmaCheck {
        name: "symmetric split maximizes delta",
        points: 0,
        failures: 0,
        worst: 0.0,
    };
    for pi in 1..=9 {
        let p = 0.05 * pi as f64;
        for ti in 1..=20 {
            let t = 2.0 * p + (1.0 - 2.0 * p) * ti as f64 / 20.0;
            for ri in 0..=4 {
                let r = (1.0 - t) * ri as f64 / 4.0;
                let center = delta(t / 2.0, t / 2.0, r, p, b)?;
                let room = t / 2.0 - p;
                for ei in 1..=10 {
                    let eps = room * ei as f64 / 10.0;
                    let off = delta(t / 2.0 + eps, t / 2.0 - eps, r, p, b)?;
                    check.points += 1;
                    if off > center + 1e-12 {
                        check.failures += 1;
                        check.worst = check.worst.max(off - center);
                    }
                }
            }
        }
    }
    Ok(check)
}

/// Centered difference of `Δ(T, ·)` vanishes at `r = (1-T) b/(b+2)`. The
/// grid keeps `T <= 0.9`, where the difference quotient is accurate enough.
pub fn check_stationary_r(b: usize) -> Result<LemmaCheck> {
    let step = 1e-4;
    let mut check = LemmaCheck {
        name: "stationary loop count",
        points: 0,
        failures: 0,
        worst: 0.0,
    };
    let x = b as f64 / (b as f64 + 2.0);
    for pi in 1..=9 {
        let p = 0.05 * pi as f64;
        if 2.0 * p > 0.9 {
            continue;
        }
        for ti in 0..=20 {
            let t = 2.0 * p + (0.9 - 2.0 * p) * ti as f64 / 20.0;
            let r = (1.0 - t) * x;
            if r - step < 0.0 || r + step > 1.0 - t {
                continue;
            }
            let d = (delta(t / 2.0, t / 2.0, r + step, p, b)? - delta(t / 2.0, t / 2.0, r - step, p, b)?) / (2.0 * step);
            check.points += 1;
            if d.abs() >= 1e-6 {
                check.failures += 1;
            }
            check.worst = check.worst.max(d.abs());
        }
    }
    Ok(check)
}

/// `∂φ/∂T > 0` exactly when `T < T(p)`, by centered differences on a grid
/// that stays `gap` away from `T(p)`.
pub fn check_phi_slope(b: usize) -> Result<LemmaCheck> {
    let k = bound_constants(b)?;
    let (step, gap) = (1e-6, 1e-3);
    let mut check = LemmaCheck {
        name: "phi increases below T(p) and decreases above",
        points: 0,
        failures: 0,
        worst: 0.0,
    };
    for pi in 1..=49 {
        let p = 0.01 * pi as f64;
        let tp = k.t_of(p);
        for ti in 0..=200 {
            let t = 2.0 * p + (1.0 - 2.0 * p) * ti as f64 / 200.0;
            if (t - tp).abs() < gap || t - step < 2.0 * p || t + step > 1.0 {
                continue;
            }
            let d = (phi(t + step, p, b)? - phi(t - step, p, b)?) / (2.0 * step);
            check.points += 1;
            if (d > 0.0) != (t < tp) {
                check.failures += 1;
                check.worst = check.worst.max(d.abs());
            }
        }
    }
    Ok(check)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn entropy_basics() {
        assert_eq!(entropy(0.5).unwrap(), 1.0);
        assert_eq!(entropy(0.0).unwrap(), 0.0);
        assert_eq!(entropy(1.0).unwrap(), 0.0);
        assert!((entropy_inv(entropy(0.3).unwrap()).unwrap() - 0.3).abs() < 1e-10);
        assert!(entropy(1.5).is_err());
        assert!(entropy_inv(-0.1).is_err());
        assert!((entropy_b(0.5, 4).unwrap() - 0.5).abs() < 1e-15);
    }

    #[test]
    fn binomials() {
        assert_eq!(log2_binomial(10, 0), 0.0);
        assert_eq!(entropy_gap(10, 0), 0.0);
        assert!((log2_binomial(4, 2) - 6f64.log2()).abs() < 1e-12);
        assert!((log2_binomial(1000, 500) - 994.691).abs() < 1e-3);
        for n in (2..=4096u64).step_by(2) {
            assert!(entropy_gap(n, n / 2) <= 2.0 * ((n + 1) as f64).log2(), "n={n}");
        }
    }

    #[test]
    fn binary_constants() {
        let k = bound_constants(2).unwrap();
        assert_eq!(k.c_b, 2.0);
        assert!((k.l_b - 3f64.sqrt() / 2.0).abs() < 1e-15);
        assert!((k.t_of(0.3) - 4.0 * 0.3 / 3f64.sqrt()).abs() < 1e-12);
        assert!((k.alpha_b - 3.79994).abs() < 5e-5);
        let x = 0.5 - 3f64.sqrt() / 4.0;
        let slope = ((1.0 - x) / x).log2();
        assert!((k.alpha_b - slope).abs() < 1e-4);
        assert!((k.a1 - 0.3546).abs() < 1e-4);
        assert!((k.a2 - 0.64285).abs() < 1e-4);
        assert!(bound_constants(1).is_err());
    }

    #[test]
    fn c_b_matches_closed_form() {
        // b^{c_b} = b(b+2)/2, which makes the two expressions for L_b agree
        for b in 2..=16usize {
            let k = bound_constants(b).unwrap();
            let bf = b as f64;
            assert!((bf.powf(k.c_b) - bf * (bf + 2.0) / 2.0).abs() < 1e-9 * bf * bf, "b={b}");
            let via_c = (1.0 - 4.0 * bf.powf(-2.0 * k.c_b)).sqrt();
            assert!((via_c - k.l_b).abs() < 1e-12);
            assert!(k.a1 < k.a2);
        }
    }

    #[test]
    fn u_pieces() {
        let k = bound_constants(2).unwrap();
        assert_eq!(u_bound(1.0, 2).unwrap(), 0.0);
        assert!((u_bound(0.0, 2).unwrap() - 0.5).abs() < 1e-12);
        let left = 0.5 - hb_inv(k.a1, 2);
        let mid = (k.c_b - k.a1) / k.alpha_b;
        assert!((left - mid).abs() < 1e-9);
        assert!((left - 3f64.sqrt() / 4.0).abs() < 1e-9);
        let mid2 = (k.c_b - k.a2) / k.alpha_b;
        assert!((mid2 - (1.0 - k.a2)).abs() < 1e-9);
        assert!((mid2 - 0.35715).abs() < 1e-4);
        assert!(u_bound(1.1, 2).is_err());
    }

    #[test]
    fn psi_is_the_inverse_of_u() {
        for b in 2..=5 {
            for i in 1..=49 {
                let p = i as f64 / 100.0;
                let a = psi(p, b).unwrap();
                assert!((u_bound(a, b).unwrap() - p).abs() < 1e-8, "b={b} p={p}");
            }
        }
        assert_eq!(psi(0.5, 2).unwrap(), 0.0);
        assert!((phi(1.0, 0.2, 2).unwrap() - h(0.3)).abs() < 1e-15);
        // the uncapped bound exceeds 1 - p near p = 0
        assert!(psi_path_bound(0.05, 2).unwrap() > 0.95);
        assert_eq!(psi(0.05, 2).unwrap(), 0.95);
    }

    #[test]
    fn curves_are_monotone_and_continuous() {
        for b in 2..=4 {
            let n = 20000;
            let us: Vec<f64> = (0..=n).map(|i| u_bound(i as f64 / n as f64, b).unwrap()).collect();
            assert!(us.windows(2).all(|w| w[1] <= w[0] + 1e-12));
            assert!(us.windows(2).all(|w| (w[0] - w[1]).abs() < 1e-2));
            let ps: Vec<f64> = (0..=n).map(|i| psi(0.5 * i as f64 / n as f64, b).unwrap()).collect();
            assert!(ps.windows(2).all(|w| w[1] <= w[0] + 1e-12));
            assert!(ps.windows(2).all(|w| (w[0] - w[1]).abs() < 1e-2));
        }
    }

    #[test]
    fn lemma_checks_pass() {
        for b in 2..=4 {
            let c = check_symmetric_split(b).unwrap();
            assert!(c.passed(), "{c:?}");
            let c = check_stationary_r(b).unwrap();
            assert!(c.passed(), "{c:?}");
        }
        let c = check_phi_slope(2).unwrap();
        assert!(c.passed(), "{c:?}");
    }

    #[test]
    fn domains_are_checked() {
        assert!(phi(0.1, 0.2, 2).is_err());
        assert!(delta(0.1, 0.5, 0.0, 0.2, 2).is_err());
        assert!(delta(0.3, 0.3, 0.5, 0.2, 2).is_err());
        assert!(delta(0.5, 0.5, 0.0, 0.2, 2).is_ok());
        assert!(psi(0.6, 2).is_err());
        assert!(bounds_table(2, 1).is_err());
        assert_eq!(exact_binomial(10, 3), BigUint::from(120u32));
        assert_eq!(exact_binomial(7, 7), BigUint::from(1u32));
        assert_eq!(exact_binomial(0, 0), BigUint::from(1u32));
    }

    #[test]
    fn table_shape() {
        let rows = bounds_table(2, 11).unwrap();
        assert_eq!(rows.len(), 22);
        assert_eq!(rows[10], ("u", 1.0, 0.0));
        assert_eq!(rows[11].0, "psi");
        assert_eq!(rows[21], ("psi", 0.5, 0.0));
    }

    proptest! {
        #[test]
        fn entropy_inverse_roundtrip(x in 0.0f64..=0.5) {
            prop_assert!((h_inv(h(x)) - x).abs() < 1e-10, "x={x} got {}", h_inv(h(x)));
        }

        #[test]
        fn entropy_is_concave_and_symmetric(x in 0.0f64..=1.0, y in 0.0f64..=1.0) {
            prop_assert!((h(x) - h(1.0 - x)).abs() < 1e-12);
            prop_assert!(h(0.5 * (x + y)) + 1e-12 >= 0.5 * (h(x) + h(y)));
        }
    }
}
