//! Small statistics helpers: moments, log-log slopes, and a two-sample
//! Kolmogorov–Smirnov test used by the generator cross-validation.

use crate::scalar::Scalar;

pub fn mean<F: Scalar>(xs: &[F]) -> F {
    if xs.is_empty() {
        return F::zero();
    }
    let mut s = F::zero();
    for &x in xs {
        s += x;
    }
    s / F::cast_usize(xs.len())
}

/// Unbiased sample variance (divisor `n - 1`); zero for fewer than two points.
pub fn sample_variance<F: Scalar>(xs: &[F]) -> F {
    if xs.len() < 2 {
        return F::zero();
    }
    let m = mean(xs);
    let mut s = F::zero();
    for &x in xs {
        let d = x - m;
        s += d * d;
    }
    s / F::cast_usize(xs.len() - 1)
}

/// Sample mean together with its standard error `sqrt(var / n)`.
pub fn mean_and_se<F: Scalar>(xs: &[F]) -> (F, F) {
    let m = mean(xs);
    let se = (sample_variance(xs) / F::cast_usize(xs.len().max(1))).sqrt();
    (m, se)
}

/// Least-squares slope of `ln y` against `ln x`.
///
/// Returns `None` when fewer than two points remain or any coordinate is
/// not strictly positive (a vanishing error makes the rate ill-defined,
/// not infinite).
pub fn log_log_slope<F: Scalar>(points: &[(F, F)]) -> Option<F> {
    if points.len() < 2 {
        return None;
    }
    let mut logs = Vec::with_capacity(points.len());
    for &(x, y) in points {
        if !(x > F::zero()) || !(y > F::zero()) {
            return None;
        }
        logs.push((x.ln(), y.ln()));
    }
    let n = F::cast_usize(logs.len());
    let mut sx = F::zero();
    let mut sy = F::zero();
    for &(lx, ly) in &logs {
        sx += lx;
        sy += ly;
    }
    let (mx, my) = (sx / n, sy / n);
    let mut num = F::zero();
    let mut den = F::zero();
    for &(lx, ly) in &logs {
        num += (lx - mx) * (ly - my);
        den += (lx - mx) * (lx - mx);
    }
    if den == F::zero() {
        return None;
    }
    Some(num / den)
}

/// Two-sample Kolmogorov–Smirnov test.
///
/// Returns `(d, p)`: the sup distance between the empirical CDFs and the
/// asymptotic p-value with the standard small-sample correction
/// `(sqrt(n_e) + 0.12 + 0.11 / sqrt(n_e)) * d`.
pub fn ks_two_sample<F: Scalar>(a: &[F], b: &[F]) -> (F, F) {
    assert!(!a.is_empty() && !b.is_empty(), "KS needs nonempty samples");
    let mut xs: Vec<F> = a.to_vec();
    let mut ys: Vec<F> = b.to_vec();
    xs.sort_by(|p, q| p.partial_cmp(q).unwrap());
    ys.sort_by(|p, q| p.partial_cmp(q).unwrap());

    let (n1, n2) = (xs.len(), ys.len());
    let (mut i, mut j) = (0usize, 0usize);
    let mut d = F::zero();
    while i < n1 && j < n2 {
        let (x, y) = (xs[i], ys[j]);
        if x <= y {
            i += 1;
        }
        if y <= x {
            j += 1;
        }
        let f1 = F::cast_usize(i) / F::cast_usize(n1);
        let f2 = F::cast_usize(j) / F::cast_usize(n2);
        let gap = (f1 - f2).abs();
        if gap > d {
            d = gap;
        }
    }

    let ne = F::cast_usize(n1) * F::cast_usize(n2)
        / (F::cast_usize(n1) + F::cast_usize(n2));
    let lambda = (ne.sqrt() + F::cast(0.12) + F::cast(0.11) / ne.sqrt()) * d;
    if lambda < F::cast(0.25) {
        // tail is 1 to ~1e-8 here, and the alternating series stops
        // converging as lambda → 0
        return (d, F::one());
    }
    // Alternating series for the Kolmogorov tail; 100 terms is far past
    // convergence for any lambda that matters.
    let mut p = F::zero();
    let mut sign = F::one();
    for k in 1..=100 {
        let kf = F::cast_usize(k);
        let term = sign * (F::cast(-2.0) * kf * kf * lambda * lambda).exp();
        p += term;
        sign = -sign;
        if term.abs() < F::cast(1e-16) {
            break;
        }
    }
    p = (F::cast(2.0) * p).max(F::zero()).min(F::one());
    (d, p)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;

    #[test]
    fn moments_of_a_small_sample() {
        let xs = [1.0f64, 2.0, 3.0, 4.0];
        assert!((mean(&xs) - 2.5).abs() < 1e-15);
        // var = (2.25 + 0.25 + 0.25 + 2.25) / 3
        assert!((sample_variance(&xs) - 5.0 / 3.0).abs() < 1e-15);
        let (m, se) = mean_and_se(&xs);
        assert!((m - 2.5).abs() < 1e-15);
        assert!((se - (5.0f64 / 12.0).sqrt()).abs() < 1e-15);
    }

    #[test]
    fn slope_recovers_exact_power_law() {
        let pts: Vec<(f64, f64)> = (1..=6).map(|k| {
            let x = 2f64.powi(k);
            (x, 3.7 * x.powf(-1.25))
        }).collect();
        let s = log_log_slope(&pts).unwrap();
        assert!((s + 1.25).abs() < 1e-12, "slope {s}");
    }

    #[test]
    fn slope_degenerate_inputs_give_none() {
        assert_eq!(log_log_slope::<f64>(&[(1.0, 1.0)]), None);
        assert_eq!(log_log_slope(&[(1.0, 0.0), (2.0, 1.0)]), None);
        assert_eq!(log_log_slope(&[(1.0, 1.0), (1.0, 2.0)]), None);
    }

    #[test]
    fn ks_same_sample_has_zero_distance() {
        let xs: Vec<f64> = (0..50).map(|i| i as f64 * 0.1).collect();
        let (d, p) = ks_two_sample(&xs, &xs);
        assert_eq!(d, 0.0);
        assert!(p > 0.999);
    }

    #[test]
    fn ks_separates_shifted_normals_and_accepts_equal_ones() {
        use crate::scalar::Scalar as _;
        let mut rng = rand_chacha::ChaCha12Rng::seed_from_u64(11);
        let a: Vec<f64> = (0..800).map(|_| f64::standard_normal(&mut rng)).collect();
        let b: Vec<f64> = (0..800).map(|_| f64::standard_normal(&mut rng)).collect();
        let c: Vec<f64> = b.iter().map(|x| x + 1.0).collect();
        let (_, p_same) = ks_two_sample(&a, &b);
        let (_, p_diff) = ks_two_sample(&a, &c);
        assert!(p_same > 0.01, "p_same = {p_same}");
        assert!(p_diff < 1e-6, "p_diff = {p_diff}");
    }

    #[test]
    fn ks_distance_known_small_case() {
        // a = {1,2}, b = {1.5}: CDF gap peaks at 1/2.
        let (d, _) = ks_two_sample(&[1.0f64, 2.0], &[1.5f64]);
        assert!((d - 0.5).abs() < 1e-15);
    }
}
