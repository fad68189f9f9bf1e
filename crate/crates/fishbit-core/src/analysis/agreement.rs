//! Agreement between paired estimator outputs.
//!
//! The acceptance question for the onboard approximations is whether they
//! track the exact estimates linearly: Pearson r close to 1 and a
//! least-squares slope close to the approximation's analytic ratio.

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum AgreementError {
    #[error("degenerate input: {0}")]
    DegenerateInput(String),
}

/// Pearson correlation and least-squares line for paired series.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Agreement {
    pub pearson_r: f64,
    /// Slope of the least-squares fit of y on x.
    pub slope: f64,
    pub intercept: f64,
    /// Coefficient of determination of the fit (the square of `pearson_r`
    /// for simple linear regression).
    pub r_squared: f64,
    pub n: usize,
}

/// Computes Pearson r and the least-squares line of `ys` on `xs`.
/// Needs at least 3 pairs and non-zero variance on both sides.
pub fn agreement(xs: &[f64], ys: &[f64]) -> Result<Agreement, AgreementError> {
    if xs.len() != ys.len() {
        return Err(AgreementError::DegenerateInput(format!(
            "length mismatch: {} vs {}",
            xs.len(),
            ys.len()
        )));
    }
    if xs.len() < 3 {
        return Err(AgreementError::DegenerateInput(format!(
            "{} pairs, need at least 3",
            xs.len()
        )));
    }
    if let Some(v) = xs.iter().chain(ys).find(|v| !v.is_finite()) {
        return Err(AgreementError::DegenerateInput(format!("non-finite value {v}")));
    }
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let mut sxx = 0.0;
    let mut syy = 0.0;
    let mut sxy = 0.0;
    for (&x, &y) in xs.iter().zip(ys) {
        sxx += (x - mx) * (x - mx);
        syy += (y - my) * (y - my);
        sxy += (x - mx) * (y - my);
    }
    if sxx == 0.0 || syy == 0.0 {
        return Err(AgreementError::DegenerateInput(
            "a series is constant; correlation is undefined".into(),
        ));
    }
    let pearson_r = sxy / (sxx.sqrt() * syy.sqrt());
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    Ok(Agreement {
        pearson_r,
        slope,
        intercept,
        r_squared: pearson_r * pearson_r,
        n: xs.len(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn identity_pairs_give_perfect_agreement() {
        let xs = [1.0, 2.0, 3.0, 4.0];
        let a = agreement(&xs, &xs).unwrap();
        assert!((a.pearson_r - 1.0).abs() < 1e-15);
        assert!((a.slope - 1.0).abs() < 1e-15);
        assert!(a.intercept.abs() < 1e-15);
        assert!((a.r_squared - 1.0).abs() < 1e-15);
        assert_eq!(a.n, 4);
    }

    #[test]
    fn exact_affine_relation_is_recovered() {
        let xs = [0.5, 1.5, 2.0, 3.25, 7.0];
        let ys: Vec<f64> = xs.iter().map(|x| 2.0 * x + 1.0).collect();
        let a = agreement(&xs, &ys).unwrap();
        assert!((a.pearson_r - 1.0).abs() < 1e-12);
        assert!((a.slope - 2.0).abs() < 1e-12);
        assert!((a.intercept - 1.0).abs() < 1e-12);
    }

    #[test]
    fn anticorrelation_is_minus_one() {
        let xs = [1.0, 2.0, 3.0];
        let ys = [3.0, 2.0, 1.0];
        let a = agreement(&xs, &ys).unwrap();
        assert!((a.pearson_r + 1.0).abs() < 1e-15);
        assert!((a.slope + 1.0).abs() < 1e-15);
    }

    #[test]
    fn pearson_is_invariant_under_positive_affine_transforms() {
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        for _ in 0..100 {
            let xs: Vec<f64> = (0..20).map(|_| rng.random_range(-5.0..5.0)).collect();
            let ys: Vec<f64> =
                xs.iter().map(|x| 0.7 * x + rng.random_range(-1.0..1.0)).collect();
            let a = rng.random_range(0.1..10.0);
            let b = rng.random_range(-100.0..100.0);
            let c = rng.random_range(0.1..10.0);
            let d = rng.random_range(-100.0..100.0);
            let xs_t: Vec<f64> = xs.iter().map(|x| a * x + b).collect();
            let ys_t: Vec<f64> = ys.iter().map(|y| c * y + d).collect();
            let base = agreement(&xs, &ys).unwrap();
            let trans = agreement(&xs_t, &ys_t).unwrap();
            assert!(
                (base.pearson_r - trans.pearson_r).abs() < 1e-9,
                "{} vs {}",
                base.pearson_r,
                trans.pearson_r
            );
        }
    }

    #[test]
    fn degenerate_inputs_are_rejected() {
        assert!(agreement(&[1.0, 2.0], &[1.0, 2.0]).is_err()); // too few
        assert!(agreement(&[1.0, 2.0, 3.0], &[1.0, 2.0]).is_err()); // mismatch
        assert!(agreement(&[1.0, 1.0, 1.0], &[1.0, 2.0, 3.0]).is_err()); // constant x
        assert!(agreement(&[1.0, 2.0, 3.0], &[5.0, 5.0, 5.0]).is_err()); // constant y
        assert!(agreement(&[1.0, f64::NAN, 3.0], &[1.0, 2.0, 3.0]).is_err());
    }
}
