//! Summary statistics and the unpaired Welch t-test.

use statrs::function::beta::beta_reg;

use crate::error::{Error, Result};

pub fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

/// Sample variance (n − 1 denominator); zero for fewer than two values.
pub fn variance(xs: &[f64]) -> f64 {
    if xs.len() < 2 {
        return 0.0;
    }
    let m = mean(xs);
    xs.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / (xs.len() - 1) as f64
}

pub fn std_dev(xs: &[f64]) -> f64 {
    variance(xs).sqrt()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WelchTest {
    pub t: f64,
    /// Welch–Satterthwaite degrees of freedom.
    pub dof: f64,
    /// Two-sided.
    pub p: f64,
}

impl WelchTest {
    pub fn significant(&self, alpha: f64) -> bool {
        self.p < alpha
    }
}

/// Two-sided survival of |T| for Student's t with `dof` degrees of freedom,
/// `P(|T| ≥ |t|) = I_{ν/(ν+t²)}(ν/2, 1/2)`.
pub fn t_two_sided(t: f64, dof: f64) -> f64 {
    if t.is_infinite() {
        return 0.0;
    }
    let x = dof / (dof + t * t);
    beta_reg(dof / 2.0, 0.5, x).clamp(0.0, 1.0)
}

/// Unpaired two-sided Welch test of `mean(a) = mean(b)`, no multiplicity
/// correction. When both samples have zero variance the test degenerates:
/// `p = 1` for equal means, `p = 0` otherwise.
pub fn welch_t_test(a: &[f64], b: &[f64]) -> Result<WelchTest> {
    if a.len() < 2 || b.len() < 2 {
        return Err(Error::Degenerate(format!(
            "welch test needs at least two values per side, got {} and {}",
            a.len(),
            b.len()
        )));
    }
    if a.iter().chain(b).any(|x| !x.is_finite()) {
        return Err(Error::Degenerate("welch test input is not finite".into()));
    }
    let (na, nb) = (a.len() as f64, b.len() as f64);
    let (ma, mb) = (mean(a), mean(b));
    let (qa, qb) = (variance(a) / na, variance(b) / nb);
    let se2 = qa + qb;
    if se2 == 0.0 {
        let equal = ma == mb;
        return Ok(WelchTest {
            t: if equal { 0.0 } else { (ma - mb).signum() * f64::INFINITY },
            dof: na + nb - 2.0,
            p: if equal { 1.0 } else { 0.0 },
        });
    }
    let t = (ma - mb) / se2.sqrt();
    let dof = se2 * se2 / (qa * qa / (na - 1.0) + qb * qb / (nb - 1.0));
    Ok(WelchTest {
        t,
        dof,
        p: t_two_sided(t, dof),
    })
}
