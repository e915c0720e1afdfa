//! Closed-form tight-bound evaluators for polynomial latencies and numeric
//! sup evaluators for the general upper-bound formulas (in their reduced
//! two-variable forms).

use crate::latency::LatencyFunction;
use crate::num::xlny;

/// `F(k,h) = (k+1)^{(1-h)/(k-h)} (h+1)^{(k-1)/(k-h)}`, the reduced form of
/// the weighted NPoA bound; at most 2, attained at (1, 0).
pub fn f_weighted(k: f64, h: f64) -> f64 {
    let e1 = (1.0 - h) / (k - h);
    let e2 = (k - 1.0) / (k - h);
    (e1 * (k + 1.0).ln() + e2 * (h + 1.0).ln()).exp()
}

/// `F(k,h) = ((k+1)^{k+1}/k^k)^{(1-h)/(k-h)} ((h+1)^{h+1}/h^h)^{(k-1)/(k-h)}`
/// (0^0 := 1), the reduced form of the greedy competitive-ratio bound;
/// at most 4, attained at (1, 0). Evaluated in log domain.
pub fn f_greedy(k: f64, h: f64) -> f64 {
    let e1 = (1.0 - h) / (k - h);
    let e2 = (k - 1.0) / (k - h);
    let a = (k + 1.0) * (k + 1.0).ln() - xlny(k, k);
    let b = (h + 1.0) * (h + 1.0).ln() - xlny(h, h);
    (e1 * a + e2 * b).exp()
}

/// The tight bounds for polynomial latencies of maximum degree `p`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PolyBounds {
    pub weighted_npoa: f64,
    pub unweighted_npoa: f64,
    pub nonatomic_npoa: f64,
    pub greedy_cr: f64,
}

pub fn poly_bounds(p: u32) -> PolyBounds {
    let pf = p as f64;
    PolyBounds {
        weighted_npoa: 2f64.powi(p as i32),
        unweighted_npoa: 2f64.powi(p as i32),
        nonatomic_npoa: (pf / std::f64::consts::E).exp(),
        greedy_cr: 4f64.powi(p as i32),
    }
}

/// A numeric supremum: the incumbent value and where it was found.
#[derive(Debug, Clone, Copy)]
pub struct SupResult {
    pub value: f64,
    pub arg: (f64, f64),
}

const GRID_POINTS: usize = 512;
const REFINE_ROUNDS: usize = 3;

struct Axis {
    lo: f64,
    hi: f64,
    log: bool,
}

impl Axis {
    fn samples(&self, n: usize) -> Vec<f64> {
        if n == 1 || self.hi <= self.lo {
            return vec![self.lo];
        }
        (0..n)
            .map(|i| {
                let t = i as f64 / (n - 1) as f64;
                if self.log {
                    (self.lo.ln() + (self.hi.ln() - self.lo.ln()) * t).exp()
                } else {
                    self.lo + (self.hi - self.lo) * t
                }
            })
            .collect()
    }
}

/// Dense grid maximization with local refinement around the incumbent.
/// `value` returns None off the feasible region.
fn maximize_2d(
    mut ax: Axis,
    mut ay: Axis,
    value: impl Fn(f64, f64) -> Option<f64>,
) -> SupResult {
    let mut best = SupResult { value: f64::NEG_INFINITY, arg: (ax.lo, ay.lo) };
    for _ in 0..=REFINE_ROUNDS {
        let xs = ax.samples(GRID_POINTS);
        let ys = ay.samples(GRID_POINTS);
        let (mut bi, mut bj) = (0usize, 0usize);
        for (i, &x) in xs.iter().enumerate() {
            for (j, &y) in ys.iter().enumerate() {
                if let Some(v) = value(x, y) {
                    if v > best.value {
                        best = SupResult { value: v, arg: (x, y) };
                        (bi, bj) = (i, j);
                    }
                }
            }
        }
        // Zoom into the neighboring grid cells of the incumbent.
        ax = Axis {
            lo: xs[bi.saturating_sub(1)],
            hi: xs[(bi + 1).min(xs.len() - 1)],
            log: ax.log,
        };
        ay = Axis {
            lo: ys[bj.saturating_sub(1)],
            hi: ys[(bj + 1).min(ys.len() - 1)],
            log: ay.log,
        };
    }
    best
}

/// `sup (f(k+1)/f(o))^{o/k}` over integers 1 <= o <= k <= k_max and f in
/// the family. Exhaustive over the integer lattice, so exact at the argmax.
pub fn sup_unweighted(family: &[LatencyFunction], k_max: u64) -> SupResult {
    let mut best = SupResult { value: f64::NEG_INFINITY, arg: (1.0, 1.0) };
    for f in family {
        for k in 1..=k_max {
            for o in 1..=k {
                let (kf, of) = (k as f64, o as f64);
                let v = (f.eval(kf + 1.0) / f.eval(of)).powf(of / kf);
                if v > best.value {
                    best = SupResult { value: v, arg: (kf, of) };
                }
            }
        }
    }
    best
}

/// `sup (f(k)/f(o))^{o/k}` over reals k >= o > 0 and f in the family,
/// by log-spaced grid search with refinement.
pub fn sup_nonatomic(family: &[LatencyFunction]) -> SupResult {
    maximize_2d(
        Axis { lo: 1e-2, hi: 1e3, log: true },
        Axis { lo: 1e-2, hi: 1e3, log: true },
        |k, o| {
            if k < o {
                return None;
            }
            let best = family
                .iter()
                .map(|f| (o / k) * (f.eval(k) / f.eval(o)).ln())
                .fold(f64::NEG_INFINITY, f64::max);
            Some(best.exp())
        },
    )
}

fn sup_over_kh(
    f_family: &[LatencyFunction],
    g_family: &[LatencyFunction],
    phi: impl Fn(&LatencyFunction, f64) -> f64,
    psi: impl Fn(&LatencyFunction, f64) -> f64,
) -> SupResult {
    maximize_2d(
        Axis { lo: 1.0, hi: 1e3, log: true },
        Axis { lo: 0.0, hi: 1.0 - 1e-9, log: false },
        |k, h| {
            let e1 = (1.0 - h) / (k - h);
            let e2 = (k - 1.0) / (k - h);
            let best_f = f_family
                .iter()
                .map(|f| phi(f, k))
                .fold(f64::NEG_INFINITY, f64::max);
            let best_g = g_family
                .iter()
                .map(|g| psi(g, h))
                .fold(f64::NEG_INFINITY, f64::max);
            Some((e1 * best_f + e2 * best_g).exp())
        },
    )
}

/// Numeric sup of the weighted NPoA upper-bound form
/// `(f(k+1)/f(1))^{(1-h)/(k-h)} (g(h+1)/g(1))^{(k-1)/(k-h)}`
/// over k >= 1, 0 <= h < 1, and the two function families.
pub fn sup_weighted_general(
    f_family: &[LatencyFunction],
    g_family: &[LatencyFunction],
) -> SupResult {
    sup_over_kh(
        f_family,
        g_family,
        |f, k| (f.eval(k + 1.0) / f.eval(1.0)).ln(),
        |g, h| (g.eval(h + 1.0) / g.eval(1.0)).ln(),
    )
}

/// Numeric sup of the greedy competitive-ratio upper-bound form
/// `(f(k+1)^{k+1}/(f(k)^k f(1)))^{(1-h)/(k-h)} (g(h+1)^{h+1}/(g(h)^h g(1)))^{(k-1)/(k-h)}`.
pub fn sup_greedy_general(
    f_family: &[LatencyFunction],
    g_family: &[LatencyFunction],
) -> SupResult {
    sup_over_kh(
        f_family,
        g_family,
        |f, k| (k + 1.0) * f.eval(k + 1.0).ln() - k * f.eval(k).ln() - f.eval(1.0).ln(),
        |g, h| (h + 1.0) * g.eval(h + 1.0).ln() - xlny(h, g.eval(h)) - g.eval(1.0).ln(),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::num::rel_close;

    #[test]
    fn f_weighted_examples() {
        assert!(rel_close(f_weighted(1.0, 0.0), 2.0, 1e-12));
        assert!(rel_close(f_weighted(2.0, 0.0), 3f64.sqrt(), 1e-12));
        for h in [0.0, 0.3, 0.7, 0.99] {
            assert!(rel_close(f_weighted(1.0, h), 2.0, 1e-12));
        }
    }

    #[test]
    fn f_greedy_examples() {
        assert!(rel_close(f_greedy(1.0, 0.0), 4.0, 1e-12));
        assert!(rel_close(f_greedy(2.0, 0.0), (27f64 / 4.0).sqrt(), 1e-12));
        for h in [0.0, 0.3, 0.7, 0.99] {
            assert!(rel_close(f_greedy(1.0, h), 4.0, 1e-12));
        }
    }

    #[test]
    fn poly_bounds_rows() {
        let b = poly_bounds(1);
        assert_eq!(b.weighted_npoa, 2.0);
        assert_eq!(b.unweighted_npoa, 2.0);
        assert!(rel_close(b.nonatomic_npoa, 1.444667861, 1e-8));
        assert_eq!(b.greedy_cr, 4.0);

        let b0 = poly_bounds(0);
        assert_eq!(
            (b0.weighted_npoa, b0.unweighted_npoa, b0.nonatomic_npoa, b0.greedy_cr),
            (1.0, 1.0, 1.0, 1.0)
        );

        let b3 = poly_bounds(3);
        assert_eq!(b3.weighted_npoa, 8.0);
        assert!(rel_close(b3.nonatomic_npoa, (3.0 / std::f64::consts::E).exp(), 1e-12));
        assert_eq!(b3.greedy_cr, 64.0);
    }

    #[test]
    fn sup_unweighted_monomials() {
        for p in [0u32, 1, 2, 3] {
            let fam = [LatencyFunction::monomial(p)];
            let sup = sup_unweighted(&fam, 50);
            assert_eq!(sup.value, 2f64.powi(p as i32));
            if p > 0 {
                assert_eq!(sup.arg, (1.0, 1.0));
            }
        }
        let constant = [LatencyFunction::constant(3.0).unwrap()];
        assert_eq!(sup_unweighted(&constant, 50).value, 1.0);
    }

    #[test]
    fn sup_nonatomic_monomials() {
        for p in [0u32, 1, 2, 3] {
            let fam = [LatencyFunction::monomial(p)];
            let expected = (p as f64 / std::f64::consts::E).exp();
            let sup = sup_nonatomic(&fam);
            assert!(
                (sup.value - expected).abs() < 1e-6,
                "p={p}: {} vs {expected}",
                sup.value
            );
        }
    }

    #[test]
    fn sup_general_monomials() {
        for p in [0u32, 1, 2, 3] {
            let fam = [LatencyFunction::monomial(p)];
            let w = sup_weighted_general(&fam, &fam);
            assert!((w.value - 2f64.powi(p as i32)).abs() < 1e-6, "p={p}: {}", w.value);
            let g = sup_greedy_general(&fam, &fam);
            assert!((g.value - 4f64.powi(p as i32)).abs() < 1e-6, "p={p}: {}", g.value);
        }
        let constant = [LatencyFunction::constant(1.0).unwrap()];
        assert!((sup_weighted_general(&constant, &constant).value - 1.0).abs() < 1e-9);
        assert!((sup_greedy_general(&constant, &constant).value - 1.0).abs() < 1e-9);
    }
}
