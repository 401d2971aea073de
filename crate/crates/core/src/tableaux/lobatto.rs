//! Lobatto III tableaux, stored as exact rational/surd constants for
//! s = 2..4 and paired so the symplecticity conditions hold:
//! IIIA pairs with IIIB, IIIB with IIIA, IIIC with IIIC*; IIID and IIIE
//! are the elementwise means of the IIIA/IIIB and IIIC/IIIC* matrices
//! and pair with themselves.

use super::split::{split_coefficients, SplitCoefficient};
use super::{d_vector, PartitionedTableau, RKTableau, TableauFamily};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LobattoFamily {
    IIIA,
    IIIB,
    IIIC,
    IIICstar,
    IIID,
    IIIE,
}

impl LobattoFamily {
    fn tableau_family(&self) -> TableauFamily {
        match self {
            LobattoFamily::IIIA => TableauFamily::LobattoIIIA,
            LobattoFamily::IIIB => TableauFamily::LobattoIIIB,
            LobattoFamily::IIIC => TableauFamily::LobattoIIIC,
            LobattoFamily::IIICstar => TableauFamily::LobattoIIICstar,
            LobattoFamily::IIID => TableauFamily::LobattoIIID,
            LobattoFamily::IIIE => TableauFamily::LobattoIIIE,
        }
    }
}

fn nodes(s: usize) -> Vec<f64> {
    let r5 = 5.0_f64.sqrt();
    match s {
        2 => vec![0.0, 1.0],
        3 => vec![0.0, 0.5, 1.0],
        4 => vec![0.0, (5.0 - r5) / 10.0, (5.0 + r5) / 10.0, 1.0],
        _ => unreachable!(),
    }
}

fn weights(s: usize) -> Vec<f64> {
    match s {
        2 => vec![0.5, 0.5],
        3 => vec![1.0 / 6.0, 2.0 / 3.0, 1.0 / 6.0],
        4 => vec![1.0 / 12.0, 5.0 / 12.0, 5.0 / 12.0, 1.0 / 12.0],
        _ => unreachable!(),
    }
}

fn weight_splits(s: usize) -> Result<Vec<SplitCoefficient>> {
    let half = split_coefficients("0.5")?;
    let sixth = split_coefficients("0.166666666666666666666666666666666667")?;
    let two_thirds = split_coefficients("0.666666666666666666666666666666666667")?;
    let twelfth = split_coefficients("0.0833333333333333333333333333333333333")?;
    let five_12 = split_coefficients("0.416666666666666666666666666666666667")?;
    Ok(match s {
        2 => vec![half, half],
        3 => vec![sixth, two_thirds, sixth],
        4 => vec![twelfth, five_12, five_12, twelfth],
        _ => unreachable!(),
    })
}

fn matrix_a(s: usize) -> Vec<Vec<f64>> {
    let r5 = 5.0_f64.sqrt();
    match s {
        2 => vec![vec![0.0, 0.0], vec![0.5, 0.5]],
        3 => vec![
            vec![0.0, 0.0, 0.0],
            vec![5.0 / 24.0, 1.0 / 3.0, -1.0 / 24.0],
            vec![1.0 / 6.0, 2.0 / 3.0, 1.0 / 6.0],
        ],
        4 => vec![
            vec![0.0, 0.0, 0.0, 0.0],
            vec![
                (11.0 + r5) / 120.0,
                (25.0 - r5) / 120.0,
                (25.0 - 13.0 * r5) / 120.0,
                (-1.0 + r5) / 120.0,
            ],
            vec![
                (11.0 - r5) / 120.0,
                (25.0 + 13.0 * r5) / 120.0,
                (25.0 + r5) / 120.0,
                (-1.0 - r5) / 120.0,
            ],
            vec![1.0 / 12.0, 5.0 / 12.0, 5.0 / 12.0, 1.0 / 12.0],
        ],
        _ => unreachable!(),
    }
}

fn matrix_b(s: usize) -> Vec<Vec<f64>> {
    let r5 = 5.0_f64.sqrt();
    match s {
        2 => vec![vec![0.5, 0.0], vec![0.5, 0.0]],
        3 => vec![
            vec![1.0 / 6.0, -1.0 / 6.0, 0.0],
            vec![1.0 / 6.0, 1.0 / 3.0, 0.0],
            vec![1.0 / 6.0, 5.0 / 6.0, 0.0],
        ],
        4 => vec![
            vec![1.0 / 12.0, -(1.0 + r5) / 24.0, (-1.0 + r5) / 24.0, 0.0],
            vec![
                1.0 / 12.0,
                (25.0 + r5) / 120.0,
                (25.0 - 13.0 * r5) / 120.0,
                0.0,
            ],
            vec![
                1.0 / 12.0,
                (25.0 + 13.0 * r5) / 120.0,
                (25.0 - r5) / 120.0,
                0.0,
            ],
            vec![1.0 / 12.0, (11.0 - r5) / 24.0, (11.0 + r5) / 24.0, 0.0],
        ],
        _ => unreachable!(),
    }
}

fn matrix_c(s: usize) -> Vec<Vec<f64>> {
    let r5 = 5.0_f64.sqrt();
    match s {
        2 => vec![vec![0.5, -0.5], vec![0.5, 0.5]],
        3 => vec![
            vec![1.0 / 6.0, -1.0 / 3.0, 1.0 / 6.0],
            vec![1.0 / 6.0, 5.0 / 12.0, -1.0 / 12.0],
            vec![1.0 / 6.0, 2.0 / 3.0, 1.0 / 6.0],
        ],
        4 => vec![
            vec![1.0 / 12.0, -r5 / 12.0, r5 / 12.0, -1.0 / 12.0],
            vec![
                1.0 / 12.0,
                0.25,
                (10.0 - 7.0 * r5) / 60.0,
                r5 / 60.0,
            ],
            vec![
                1.0 / 12.0,
                (10.0 + 7.0 * r5) / 60.0,
                0.25,
                -r5 / 60.0,
            ],
            vec![1.0 / 12.0, 5.0 / 12.0, 5.0 / 12.0, 1.0 / 12.0],
        ],
        _ => unreachable!(),
    }
}

fn matrix_cstar(s: usize) -> Vec<Vec<f64>> {
    let r5 = 5.0_f64.sqrt();
    match s {
        2 => vec![vec![0.0, 0.0], vec![1.0, 0.0]],
        3 => vec![
            vec![0.0, 0.0, 0.0],
            vec![0.25, 0.25, 0.0],
            vec![0.0, 1.0, 0.0],
        ],
        4 => vec![
            vec![0.0, 0.0, 0.0, 0.0],
            vec![
                (5.0 + r5) / 60.0,
                1.0 / 6.0,
                (15.0 - 7.0 * r5) / 60.0,
                0.0,
            ],
            vec![
                (5.0 - r5) / 60.0,
                (15.0 + 7.0 * r5) / 60.0,
                1.0 / 6.0,
                0.0,
            ],
            vec![1.0 / 6.0, (5.0 - r5) / 12.0, (5.0 + r5) / 12.0, 0.0],
        ],
        _ => unreachable!(),
    }
}

fn mean(x: &[Vec<f64>], y: &[Vec<f64>]) -> Vec<Vec<f64>> {
    x.iter()
        .zip(y)
        .map(|(rx, ry)| rx.iter().zip(ry).map(|(a, b)| 0.5 * (a + b)).collect())
        .collect()
}

/// Lobatto tableau with the requested q-side family and s in 2..=4.
pub fn lobatto(family: LobattoFamily, s: usize) -> Result<PartitionedTableau> {
    if !(2..=4).contains(&s) {
        return Err(Error::Tableau(format!(
            "Lobatto stage count must be in 2..=4, got {s}"
        )));
    }
    let c = nodes(s);
    let b = weights(s);
    let splits = weight_splits(s)?;
    let (a_q, a_p, with_d) = match family {
        LobattoFamily::IIIA => (matrix_a(s), matrix_b(s), true),
        LobattoFamily::IIIB => (matrix_b(s), matrix_a(s), true),
        LobattoFamily::IIIC => (matrix_c(s), matrix_cstar(s), true),
        LobattoFamily::IIICstar => (matrix_cstar(s), matrix_c(s), true),
        LobattoFamily::IIID => {
            let m = mean(&matrix_a(s), &matrix_b(s));
            (m.clone(), m, false)
        }
        LobattoFamily::IIIE => {
            let m = mean(&matrix_c(s), &matrix_cstar(s));
            (m.clone(), m, false)
        }
    };
    let tf = family.tableau_family();
    let name = format!("{}-{s}", tf.token());
    let q = RKTableau::new(&name, c.clone(), a_q, b.clone());
    let p = RKTableau::new(&name, c, a_p, b);
    let d = if with_d { Some(d_vector(s)?) } else { None };
    Ok(PartitionedTableau::new(
        tf,
        q,
        p,
        d,
        (-1.0_f64).powi(s as i32 - 1),
        splits.clone(),
        splits,
    ))
}

#[cfg(test)]
mod tests {
    use super::super::gauss::collocation_from_nodes;
    use super::super::check_symplecticity;
    use super::*;

    #[test]
    fn rejects_unsupported_stage_counts() {
        assert!(lobatto(LobattoFamily::IIIA, 1).is_err());
        assert!(lobatto(LobattoFamily::IIIE, 5).is_err());
    }

    #[test]
    fn iiia_two_stage_is_the_trapezoidal_pair() {
        let t = lobatto(LobattoFamily::IIIA, 2).unwrap();
        assert_eq!(t.q_tableau.a, vec![vec![0.0, 0.0], vec![0.5, 0.5]]);
        assert_eq!(t.q_tableau.b, vec![0.5, 0.5]);
        assert_eq!(t.q_tableau.c, vec![0.0, 1.0]);
        assert_eq!(t.r_infinity, -1.0);
        assert_eq!(t.d.as_deref(), Some(&[1.0, -1.0][..]));
    }

    #[test]
    fn iiia_matches_collocation_at_lobatto_nodes() {
        for s in 2..=4 {
            let t = lobatto(LobattoFamily::IIIA, s).unwrap();
            let (a, b) = collocation_from_nodes(&t.q_tableau.c);
            for i in 0..s {
                assert!((b[i] - t.q_tableau.b[i]).abs() < 1e-13);
                for j in 0..s {
                    assert!(
                        (a[i][j] - t.q_tableau.a[i][j]).abs() < 5e-13,
                        "s={s} a[{i}][{j}]: {} vs {}",
                        a[i][j],
                        t.q_tableau.a[i][j]
                    );
                }
            }
        }
    }

    #[test]
    fn iiid_is_elementwise_mean_of_iiia_and_iiib() {
        for s in 2..=4 {
            let d = lobatto(LobattoFamily::IIID, s).unwrap();
            let a = lobatto(LobattoFamily::IIIA, s).unwrap();
            let b = lobatto(LobattoFamily::IIIB, s).unwrap();
            for i in 0..s {
                for j in 0..s {
                    assert_eq!(
                        d.q_tableau.a[i][j],
                        0.5 * (a.q_tableau.a[i][j] + b.q_tableau.a[i][j])
                    );
                }
            }
        }
    }

    #[test]
    fn iiie_three_stage_is_symplectic() {
        let t = lobatto(LobattoFamily::IIIE, 3).unwrap();
        assert!(check_symplecticity(&t) <= 1e-12);
    }

    #[test]
    fn quadrature_exact_to_lobatto_order() {
        // Lobatto weights integrate monomials exactly up to degree 2s-3
        for s in 2..=4 {
            let t = lobatto(LobattoFamily::IIIB, s).unwrap();
            for k in 1..=(2 * s - 2) {
                let quad: f64 = t
                    .q_tableau
                    .b
                    .iter()
                    .zip(&t.q_tableau.c)
                    .map(|(b, c)| b * c.powi(k as i32 - 1))
                    .sum();
                assert!(
                    (quad - 1.0 / k as f64).abs() < 1e-14,
                    "s={s} moment {k}: {quad}"
                );
            }
        }
    }

    #[test]
    fn conjugate_pairs_satisfy_the_pairing_identity() {
        // abar_ij = b_j - b_j a_ji / b_i reproduces the stored partner matrix
        for fam in [LobattoFamily::IIIA, LobattoFamily::IIIC] {
            for s in 2..=4 {
                let t = lobatto(fam, s).unwrap();
                let b = &t.q_tableau.b;
                for i in 0..s {
                    for j in 0..s {
                        let conj = b[j] - b[j] * t.q_tableau.a[j][i] / b[i];
                        assert!(
                            (conj - t.p_tableau.a[i][j]).abs() < 1e-14,
                            "{fam:?} s={s} ({i},{j})"
                        );
                    }
                }
            }
        }
    }
}
