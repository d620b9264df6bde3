use num_complex::Complex64;
use serde::Serialize;

use super::growth::check_count_growth;
use super::series::SeriesBundle;
use super::sets::LSet;
use crate::error::{domain, Result};
use crate::quasi::PqSpec;

/// Numerical look at `x + x^{r+1} B(x, -1) = 1` on truncated series.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ZeroFreeProbe {
    pub r: u32,
    pub order: usize,
    /// `x_0 = 1/φ`.
    pub x0: f64,
    /// `1 - 1/φ`, the limit of the anchor as the order grows.
    pub target: f64,
    /// `x_0^{r+1} B_{≤K}(x_0, 1)`.
    pub anchor: f64,
    pub anchor_gap: f64,
    /// Anchor at each truncation order `≤ K`.
    pub anchor_by_order: Vec<(usize, f64)>,
    pub anchor_increasing: bool,
    /// Upper bound on `x_0^{r+1} Σ_{k>K} [x^k]B(x_0, 1)` from `c_k ≤ C φ_r^k`.
    pub tail_bound: f64,
    /// Grid moduli and the number of angles per modulus.
    pub moduli: Vec<f64>,
    pub angles: usize,
    /// `min |x + x^{r+1} B_{≤K}(x, -1) - 1|` over the grid.
    pub min_distance_from_one: f64,
    /// `max |B_{≤K}(x, -1)|` over the grid.
    pub max_b_minus: f64,
    /// `B_{≤K}(x_0, 1)`.
    pub b_plus_at_x0: f64,
    /// `|B(x, -1)| < B(x_0, 1)` at every grid point.
    pub dominated: bool,
}

fn eval(coeffs: &[i128], x: Complex64) -> Complex64 {
    coeffs
        .iter()
        .rev()
        .fold(Complex64::new(0.0, 0.0), |acc, &c| acc * x + c as f64)
}

/// Evaluates truncated `B(x, ±1)` at `x_0 = 1/φ` and on circles
/// `|x| = ρ`, `ρ ∈ moduli ⊂ (0, 1/φ_r)`, each sampled at `angles` points.
pub fn probe_zero_free(spec: &PqSpec, order: usize, moduli: &[f64], angles: usize) -> Result<ZeroFreeProbe> {
    if spec.r < 2 {
        return Err(domain("B needs r ≥ 2"));
    }
    if angles == 0 {
        return Err(domain("need at least one angle per modulus"));
    }
    let growth = check_count_growth(spec.r, 60)?;
    let radius = 1.0 / growth.phi_r;
    if let Some(bad) = moduli.iter().find(|&&m| !(m > 0.0 && m < radius)) {
        return Err(domain(format!(
            "modulus {bad} outside (0, 1/φ_r) = (0, {radius})"
        )));
    }
    let bundle = SeriesBundle::build(spec, &LSet::empty(), order)?;
    let b_plus = bundle.b.eval_z(1);
    let b_minus = bundle.b.eval_z(-1);
    let phi = (1.0 + 5f64.sqrt()) / 2.0;
    let x0 = 1.0 / phi;
    let lift = x0.powi(spec.r as i32 + 1);

    let mut anchor_by_order = Vec::with_capacity(order + 1);
    let mut partial = 0.0;
    for (k, &c) in b_plus.iter().enumerate() {
        partial += c as f64 * x0.powi(k as i32);
        anchor_by_order.push((k, lift * partial));
    }
    let anchor = lift * partial;
    let target = 1.0 - x0;
    let anchor_increasing = anchor_by_order.windows(2).all(|w| w[1].1 >= w[0].1);
    let q = growth.phi_r * x0;
    let tail_bound = lift * growth.constant * q.powi(order as i32 + 1) / (1.0 - q);

    let b_plus_at_x0 = partial;
    let mut min_distance_from_one = f64::INFINITY;
    let mut max_b_minus: f64 = 0.0;
    for &rho in moduli {
        for j in 0..angles {
            let theta = std::f64::consts::TAU * j as f64 / angles as f64;
            let x = Complex64::from_polar(rho, theta);
            let b = eval(&b_minus, x);
            let lhs = x + x.powu(spec.r + 1) * b;
            min_distance_from_one = min_distance_from_one.min((lhs - 1.0).norm());
            max_b_minus = max_b_minus.max(b.norm());
        }
    }
    Ok(ZeroFreeProbe {
        r: spec.r,
        order,
        x0,
        target,
        anchor,
        anchor_gap: (anchor - target).abs(),
        anchor_by_order,
        anchor_increasing,
        tail_bound,
        moduli: moduli.to_vec(),
        angles,
        min_distance_from_one,
        max_b_minus,
        b_plus_at_x0,
        dominated: max_b_minus < b_plus_at_x0,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec(r: u32) -> PqSpec {
        PqSpec::new(2, 3, r, 2).unwrap()
    }

    #[test]
    fn anchor_grows_towards_target() {
        let x0 = 2.0 / (1.0 + 5f64.sqrt());
        let p = probe_zero_free(&spec(6), 18, &[x0], 64).unwrap();
        assert!(p.anchor_increasing);
        assert!(p.anchor < p.target);
        assert!(p.min_distance_from_one > 0.0);
        assert!(p.anchor + p.tail_bound >= p.target);
    }

    #[test]
    fn origin_is_zero_free() {
        let p = probe_zero_free(&spec(2), 10, &[1e-9], 8).unwrap();
        assert!((p.min_distance_from_one - 1.0).abs() < 1e-6);
    }

    #[test]
    fn rejects_moduli_outside_disc() {
        assert!(probe_zero_free(&spec(2), 10, &[0.9], 8).is_err());
        assert!(probe_zero_free(&spec(1), 10, &[0.5], 8).is_err());
    }
}
