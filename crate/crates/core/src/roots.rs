//! Scalar root bracketing, bisection and golden-section search.

/// Bisection on `[a, b]` where `f(a)` and `f(b)` have opposite signs.
pub fn bisect<F: Fn(f64) -> f64>(f: &F, mut a: f64, mut b: f64, tol: f64) -> f64 {
    let mut fa = f(a);
    for _ in 0..200 {
        if (b - a).abs() <= tol {
            break;
        }
        let m = 0.5 * (a + b);
        let fm = f(m);
        if fm == 0.0 {
            return m;
        }
        if (fm < 0.0) == (fa < 0.0) {
            a = m;
            fa = fm;
        } else {
            b = m;
        }
    }
    0.5 * (a + b)
}

/// Intervals `[x_i, x_{i+1}]` of an `n`-point periodic grid on `[lo, lo+period)`
/// over which `f` changes sign. Returns grid indices.
pub fn periodic_sign_changes(values: &[f64]) -> Vec<usize> {
    let n = values.len();
    (0..n)
        .filter(|&i| {
            let a = values[i];
            let b = values[(i + 1) % n];
            (a < 0.0 && b >= 0.0) || (a >= 0.0 && b < 0.0)
        })
        .collect()
}

/// All roots of a `period`-periodic function, bracketed on `n` grid points
/// then bisected to `tol`. Returned in increasing order within `[lo, lo+period)`.
pub fn periodic_roots<F: Fn(f64) -> f64>(f: &F, lo: f64, period: f64, n: usize, tol: f64) -> Vec<f64> {
    let h = period / n as f64;
    let vals: Vec<f64> = (0..n).map(|i| f(lo + h * i as f64)).collect();
    periodic_sign_changes(&vals)
        .into_iter()
        .map(|i| {
            let a = lo + h * i as f64;
            let r = bisect(f, a, a + h, tol);
            if r >= lo + period {
                r - period
            } else {
                r
            }
        })
        .collect()
}

/// Golden-section search for a local maximum of `f` on `[a, b]`.
pub fn golden_max<F: Fn(f64) -> f64>(f: &F, mut a: f64, mut b: f64, tol: f64) -> (f64, f64) {
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    for _ in 0..300 {
        if (b - a).abs() <= tol {
            break;
        }
        if fc > fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d);
        }
    }
    let x = 0.5 * (a + b);
    let fx = f(x);
    // the endpoints of the original bracket are never probed; keep the best seen
    [(x, fx), (c, fc), (d, fd)].into_iter().fold((x, fx), |acc, p| if p.1 > acc.1 { p } else { acc })
}

/// Global maximum of a `period`-periodic function: dense grid, then
/// golden-section refinement around the best grid point.
pub fn periodic_max<F: Fn(f64) -> f64>(f: &F, lo: f64, period: f64, n: usize, tol: f64) -> (f64, f64) {
    let h = period / n as f64;
    let (best, _) = (0..n)
        .map(|i| (i, f(lo + h * i as f64)))
        .fold((0, f64::NEG_INFINITY), |acc, p| if p.1 > acc.1 { p } else { acc });
    let center = lo + h * best as f64;
    golden_max(f, center - h, center + h, tol)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{PI, TAU};

    #[test]
    fn roots_of_cosine() {
        let r = periodic_roots(&|x: f64| x.cos(), 0.0, TAU, 64, 1e-13);
        assert_eq!(r.len(), 2);
        assert!((r[0] - PI / 2.0).abs() < 1e-12);
        assert!((r[1] - 3.0 * PI / 2.0).abs() < 1e-12);
    }

    #[test]
    fn wrapped_root() {
        // root exactly at the seam of the grid
        let r = periodic_roots(&|x: f64| (x - 0.01).sin(), 0.0, TAU, 10, 1e-13);
        assert_eq!(r.len(), 2);
        assert!(r.iter().any(|&x| (x - 0.01).abs() < 1e-12));
    }

    #[test]
    fn golden_finds_peak() {
        let (x, v) = periodic_max(&|x: f64| -(x - 2.0).powi(2), 0.0, 5.0, 100, 1e-10);
        assert!((x - 2.0).abs() < 1e-8);
        assert!(v.abs() < 1e-15);
    }
}
