//! Gauss-Legendre collocation tableaux and the SRK3 method.

use super::split::{gauss_node_weight, split_coefficients, SplitCoefficient};
use super::{PartitionedTableau, RKTableau, TableauFamily};
use crate::error::{Error, Result};
use nalgebra::{DMatrix, DVector};

/// P_s and P_s' on [-1, 1] by the three-term recurrence.
fn legendre_pair(s: usize, x: f64) -> (f64, f64) {
    let (mut p_prev, mut p) = (1.0, x);
    let (mut dp_prev, mut dp) = (0.0, 1.0);
    for k in 1..s {
        let kf = k as f64;
        let p_next = ((2.0 * kf + 1.0) * x * p - kf * p_prev) / (kf + 1.0);
        let dp_next = dp_prev + (2.0 * kf + 1.0) * p;
        p_prev = p;
        p = p_next;
        dp_prev = dp;
        dp = dp_next;
    }
    (p, dp)
}

/// Roots of the shifted Legendre polynomial of degree s, by Newton
/// iteration from Chebyshev seeds, to 1e-15.
fn gauss_nodes(s: usize) -> Vec<f64> {
    let mut nodes = Vec::with_capacity(s);
    for i in 1..=s {
        let mut x = -(std::f64::consts::PI * (4.0 * i as f64 - 1.0) / (4.0 * s as f64 + 2.0)).cos();
        for _ in 0..100 {
            let (p, dp) = legendre_pair(s, x);
            let dx = p / dp;
            x -= dx;
            if dx.abs() < 1e-15 {
                break;
            }
        }
        nodes.push(0.5 * (x + 1.0));
    }
    nodes.sort_by(|a, b| a.partial_cmp(b).unwrap());
    nodes
}

/// Solve the collocation conditions at the given nodes:
/// rows of `a` satisfy sum_j a_ij c_j^{k-1} = c_i^k / k for k = 1..s,
/// weights satisfy sum_j b_j c_j^{k-1} = 1/k.
pub(super) fn collocation_from_nodes(c: &[f64]) -> (Vec<Vec<f64>>, Vec<f64>) {
    let s = c.len();
    let v = DMatrix::from_fn(s, s, |k, j| c[j].powi(k as i32));
    let lu = v.lu();
    let mut a = vec![vec![0.0; s]; s];
    for i in 0..s {
        let rhs = DVector::from_fn(s, |k, _| c[i].powi(k as i32 + 1) / (k as f64 + 1.0));
        let row = lu.solve(&rhs).expect("collocation system is nonsingular");
        a[i].copy_from_slice(row.as_slice());
    }
    let rhs = DVector::from_fn(s, |k, _| 1.0 / (k as f64 + 1.0));
    let b = lu.solve(&rhs).expect("weight system is nonsingular");
    (a, b.as_slice().to_vec())
}

/// Gauss-Legendre collocation tableau with s stages (1 <= s <= 6);
/// abar = a, bbar = b, R(inf) = (-1)^s, no d-vector.
pub fn gauss_legendre(s: usize) -> Result<PartitionedTableau> {
    if !(1..=6).contains(&s) {
        return Err(Error::Tableau(format!(
            "Gauss-Legendre stage count must be in 1..=6, got {s}"
        )));
    }
    let seeds = gauss_nodes(s);
    // refine nodes and weights in extended precision for the split parts
    let mut c = Vec::with_capacity(s);
    let mut b = Vec::with_capacity(s);
    let mut b_split = Vec::with_capacity(s);
    for seed in &seeds {
        let (cs, ws) = gauss_node_weight(s, *seed);
        c.push(cs.value);
        b.push(ws.value);
        b_split.push(ws);
    }
    let (a, b_vander) = collocation_from_nodes(&c);
    for (bd, bv) in b.iter().zip(&b_vander) {
        debug_assert!((bd - bv).abs() < 1e-13, "weight paths disagree: {bd} vs {bv}");
    }
    let name = format!("glrk{s}");
    let q = RKTableau::new(&name, c.clone(), a.clone(), b.clone());
    let p = RKTableau::new(&name, c, a, b);
    Ok(PartitionedTableau::new(
        TableauFamily::GaussLegendre,
        q,
        p,
        None,
        (-1.0_f64).powi(s as i32),
        b_split.clone(),
        b_split,
    ))
}

/// Three-stage symplectic Runge-Kutta method whose central stage equals
/// the chord midpoint; abar = a, bbar = b, R(inf) = -1.
pub fn srk3() -> Result<PartitionedTableau> {
    let r = 15.0_f64.sqrt() / 10.0;
    let (w1, w2) = (5.0 / 36.0, 2.0 / 9.0);
    let c = vec![0.5 - r, 0.5, 0.5 + r];
    let a = vec![
        vec![w1, w2, w1 - r],
        vec![w1, w2, w1],
        vec![w1 + r, w2, w1],
    ];
    let b = vec![5.0 / 18.0, 4.0 / 9.0, 5.0 / 18.0];
    let five_18 = split_coefficients("0.277777777777777777777777777777777778")?;
    let four_9 = split_coefficients("0.444444444444444444444444444444444444")?;
    let b_split: Vec<SplitCoefficient> = vec![five_18, four_9, five_18];
    let q = RKTableau::new("srk3", c.clone(), a.clone(), b.clone());
    let p = RKTableau::new("srk3", c, a, b);
    Ok(PartitionedTableau::new(
        TableauFamily::Srk3,
        q,
        p,
        None,
        -1.0,
        b_split.clone(),
        b_split,
    ))
}
