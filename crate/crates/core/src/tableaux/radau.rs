//! Radau IIA collocation tableaux, stored as exact rational/surd
//! constants. Stiffly accurate (last row of `a` equals `b`, c_s = 1);
//! the same tableau is used for q and p, R(inf) = 0.

use super::split::split_coefficients;
use super::{PartitionedTableau, RKTableau, TableauFamily};
use crate::error::{Error, Result};

/// Radau IIA tableau with s in {2, 3}.
pub fn radau_iia(s: usize) -> Result<PartitionedTableau> {
    let (c, a, b, b_strings): (Vec<f64>, Vec<Vec<f64>>, Vec<f64>, Vec<&str>) = match s {
        2 => (
            vec![1.0 / 3.0, 1.0],
            vec![vec![5.0 / 12.0, -1.0 / 12.0], vec![0.75, 0.25]],
            vec![0.75, 0.25],
            vec!["0.75", "0.25"],
        ),
        3 => {
            let r6 = 6.0_f64.sqrt();
            (
                vec![(4.0 - r6) / 10.0, (4.0 + r6) / 10.0, 1.0],
                vec![
                    vec![
                        (88.0 - 7.0 * r6) / 360.0,
                        (296.0 - 169.0 * r6) / 1800.0,
                        (-2.0 + 3.0 * r6) / 225.0,
                    ],
                    vec![
                        (296.0 + 169.0 * r6) / 1800.0,
                        (88.0 + 7.0 * r6) / 360.0,
                        (-2.0 - 3.0 * r6) / 225.0,
                    ],
                    vec![(16.0 - r6) / 36.0, (16.0 + r6) / 36.0, 1.0 / 9.0],
                ],
                vec![(16.0 - r6) / 36.0, (16.0 + r6) / 36.0, 1.0 / 9.0],
                vec![
                    "0.376403062700467275050075442369280795",
                    "0.512485826188421613838813446519608094",
                    "0.111111111111111111111111111111111111",
                ],
            )
        }
        _ => {
            return Err(Error::Tableau(format!(
                "Radau IIA stage count must be 2 or 3, got {s}"
            )))
        }
    };
    let splits = b_strings
        .iter()
        .map(|s| split_coefficients(s))
        .collect::<Result<Vec<_>>>()?;
    let name = format!("radau-iia-{s}");
    let q = RKTableau::new(&name, c.clone(), a.clone(), b.clone());
    let p = RKTableau::new(&name, c, a, b);
    Ok(PartitionedTableau::new(
        TableauFamily::RadauIIA,
        q,
        p,
        None,
        0.0,
        splits.clone(),
        splits,
    ))
}

#[cfg(test)]
mod tests {
    use super::super::gauss::collocation_from_nodes;
    use super::*;

    #[test]
    fn rejects_unsupported_stage_counts() {
        assert!(radau_iia(1).is_err());
        assert!(radau_iia(4).is_err());
    }

    #[test]
    fn two_stage_matches_collocation_at_right_radau_points() {
        let t = radau_iia(2).unwrap();
        assert_eq!(t.q_tableau.c, vec![1.0 / 3.0, 1.0]);
        let (a, b) = collocation_from_nodes(&t.q_tableau.c);
        for i in 0..2 {
            assert!((b[i] - t.q_tableau.b[i]).abs() < 1e-14);
            for j in 0..2 {
                assert!((a[i][j] - t.q_tableau.a[i][j]).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn stiffly_accurate_and_right_endpoint_included() {
        for s in [2, 3] {
            let t = radau_iia(s).unwrap();
            assert_eq!(t.q_tableau.c[s - 1], 1.0);
            for j in 0..s {
                assert_eq!(t.q_tableau.a[s - 1][j], t.q_tableau.b[j]);
            }
        }
    }

    #[test]
    fn three_stage_satisfies_collocation_conditions() {
        let t = radau_iia(3).unwrap();
        let (a, b) = collocation_from_nodes(&t.q_tableau.c);
        for i in 0..3 {
            assert!((b[i] - t.q_tableau.b[i]).abs() < 1e-13);
            for j in 0..3 {
                assert!(
                    (a[i][j] - t.q_tableau.a[i][j]).abs() < 1e-13,
                    "a[{i}][{j}]: {} vs {}",
                    a[i][j],
                    t.q_tableau.a[i][j]
                );
            }
        }
    }
}
