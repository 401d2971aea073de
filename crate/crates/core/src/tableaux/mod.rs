//! Runge-Kutta coefficient sets for the partitioned integrators.
//!
//! A [`PartitionedTableau`] bundles the q-side coefficients `(a, b)` with the
//! p-side coefficients `(abar, bbar)` chosen so that the symplecticity
//! conditions `b_i abar_ij + bbar_j a_ji = b_i bbar_j` and `bbar_i = b_i`
//! hold, plus the stability-function value `R(inf)` used by the projection
//! methods and, for Lobatto pairings, the null-space vector `d`.

mod gauss;
mod lobatto;
mod radau;
pub(crate) mod split;

pub use gauss::{gauss_legendre, srk3};
pub use lobatto::{lobatto, LobattoFamily};
pub use radau::radau_iia;
pub use split::{split_coefficients, SplitCoefficient};

use crate::error::{Error, Result};

/// One Runge-Kutta coefficient set (nodes, matrix, weights).
#[derive(Debug, Clone, PartialEq)]
pub struct RKTableau {
    pub name: String,
    pub s: usize,
    /// Nodes in [0, 1].
    pub c: Vec<f64>,
    /// s x s coefficient matrix.
    pub a: Vec<Vec<f64>>,
    /// Weights.
    pub b: Vec<f64>,
}

impl RKTableau {
    pub fn new(name: &str, c: Vec<f64>, a: Vec<Vec<f64>>, b: Vec<f64>) -> Self {
        let s = c.len();
        debug_assert!(a.len() == s && a.iter().all(|row| row.len() == s) && b.len() == s);
        RKTableau {
            name: name.to_string(),
            s,
            c,
            a,
            b,
        }
    }

    /// Largest deviation of a row sum of `a` from the corresponding node.
    pub fn row_sum_defect(&self) -> f64 {
        (0..self.s)
            .map(|i| (self.a[i].iter().sum::<f64>() - self.c[i]).abs())
            .fold(0.0, f64::max)
    }

    /// Deviation of the weight sum from one.
    pub fn weight_sum_defect(&self) -> f64 {
        (self.b.iter().sum::<f64>() - 1.0).abs()
    }
}

/// Method family; determines pairing rules, d-vector and R(inf).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TableauFamily {
    GaussLegendre,
    LobattoIIIA,
    LobattoIIIB,
    LobattoIIIC,
    LobattoIIICstar,
    LobattoIIID,
    LobattoIIIE,
    Srk3,
    RadauIIA,
}

impl TableauFamily {
    pub fn token(&self) -> &'static str {
        match self {
            TableauFamily::GaussLegendre => "glrk",
            TableauFamily::LobattoIIIA => "lobatto-iiia",
            TableauFamily::LobattoIIIB => "lobatto-iiib",
            TableauFamily::LobattoIIIC => "lobatto-iiic",
            TableauFamily::LobattoIIICstar => "lobatto-iiicstar",
            TableauFamily::LobattoIIID => "lobatto-iiid",
            TableauFamily::LobattoIIIE => "lobatto-iiie",
            TableauFamily::Srk3 => "srk3",
            TableauFamily::RadauIIA => "radau-iia",
        }
    }
}

/// A symplectic-partitioned pair of tableaux (or the Radau IIA tableau
/// applied to both q and p).
#[derive(Debug, Clone, PartialEq)]
pub struct PartitionedTableau {
    pub family: TableauFamily,
    /// Coefficients (a, b) defining the stage positions Q.
    pub q_tableau: RKTableau,
    /// Coefficients (abar, bbar) defining the stage momenta P.
    pub p_tableau: RKTableau,
    /// Null-space coefficients for linearly dependent stage velocities.
    pub d: Option<Vec<f64>>,
    /// Stability-function value at infinity; +-1 except Radau IIA (0).
    pub r_infinity: f64,
    /// Split q-weights for round-off-controlled updates.
    pub b_split: Vec<SplitCoefficient>,
    /// Split p-weights.
    pub bbar_split: Vec<SplitCoefficient>,
}

impl PartitionedTableau {
    pub(crate) fn new(
        family: TableauFamily,
        q_tableau: RKTableau,
        p_tableau: RKTableau,
        d: Option<Vec<f64>>,
        r_infinity: f64,
        b_split: Vec<SplitCoefficient>,
        bbar_split: Vec<SplitCoefficient>,
    ) -> Self {
        PartitionedTableau {
            family,
            q_tableau,
            p_tableau,
            d,
            r_infinity,
            b_split,
            bbar_split,
        }
    }

    pub fn stages(&self) -> usize {
        self.q_tableau.s
    }

    /// Registry name, e.g. "glrk3" or "lobatto-iiib-2".
    pub fn name(&self) -> String {
        match self.family {
            TableauFamily::Srk3 => "srk3".to_string(),
            _ => format!("{}{}", prefix_with_sep(self.family), self.stages()),
        }
    }

    /// True for methods symmetric under time reversal.
    pub fn is_symmetric(&self) -> bool {
        !matches!(
            self.family,
            TableauFamily::LobattoIIIC | TableauFamily::LobattoIIICstar | TableauFamily::RadauIIA
        )
    }

    /// Stage index whose (Q, P) equals the chord midpoint, if any.
    /// Holds for the implicit midpoint rule and for SRK3.
    pub fn midpoint_stage_index(&self) -> Option<usize> {
        match self.family {
            TableauFamily::GaussLegendre if self.stages() == 1 => Some(0),
            TableauFamily::Srk3 => Some(1),
            _ => None,
        }
    }

    /// Structural checks: row sums, weight sum, symplecticity (except
    /// Radau IIA), |R(inf)| and d-vector consistency.
    ///
    /// The classical two-stage Lobatto IIIB matrix has row sums
    /// (1/2, 1/2) against nodes (0, 1): it is defined by the pairing
    /// conditions, not by collocation. The row-sum check is skipped for
    /// the tableaux containing it.
    pub fn validate(&self, tol: f64) -> Result<()> {
        let name = self.name();
        let contains_iiib2 = self.stages() == 2
            && matches!(
                self.family,
                TableauFamily::LobattoIIIA | TableauFamily::LobattoIIIB | TableauFamily::LobattoIIID
            );
        for t in [&self.q_tableau, &self.p_tableau] {
            if !contains_iiib2 && t.row_sum_defect() > tol {
                return Err(Error::Tableau(format!(
                    "{name}: row sum defect {:.3e} exceeds {tol:.1e}",
                    t.row_sum_defect()
                )));
            }
            if t.weight_sum_defect() > tol {
                return Err(Error::Tableau(format!(
                    "{name}: weight sum defect {:.3e} exceeds {tol:.1e}",
                    t.weight_sum_defect()
                )));
            }
        }
        if self.family == TableauFamily::RadauIIA {
            if self.r_infinity != 0.0 {
                return Err(Error::Tableau(format!("{name}: Radau IIA must have R(inf) = 0")));
            }
        } else {
            let res = check_symplecticity(self);
            if res > tol {
                return Err(Error::Tableau(format!(
                    "{name}: symplecticity residual {res:.3e} exceeds {tol:.1e}"
                )));
            }
            if (self.r_infinity.abs() - 1.0).abs() > 0.0 {
                return Err(Error::Tableau(format!("{name}: |R(inf)| must be 1")));
            }
        }
        if let Some(d) = &self.d {
            if d.len() != self.stages() {
                return Err(Error::Tableau(format!("{name}: d-vector length mismatch")));
            }
        }
        Ok(())
    }
}

fn prefix_with_sep(family: TableauFamily) -> String {
    match family {
        TableauFamily::GaussLegendre => "glrk".to_string(),
        TableauFamily::Srk3 => "srk3".to_string(),
        f => format!("{}-", f.token()),
    }
}

/// Symplecticity residual of a partitioned pair:
/// `max_ij |b_i abar_ij + bbar_j a_ji - b_i bbar_j|` combined with
/// `max_i |bbar_i - b_i|`.
pub fn check_symplecticity(t: &PartitionedTableau) -> f64 {
    let s = t.stages();
    let a = &t.q_tableau.a;
    let b = &t.q_tableau.b;
    let abar = &t.p_tableau.a;
    let bbar = &t.p_tableau.b;
    let mut res: f64 = 0.0;
    for i in 0..s {
        res = res.max((bbar[i] - b[i]).abs());
        for j in 0..s {
            res = res.max((b[i] * abar[i][j] + bbar[j] * a[j][i] - b[i] * bbar[j]).abs());
        }
    }
    res
}

/// Null-space coefficients for Lobatto pairings with linearly dependent
/// stage velocities.
pub fn d_vector(s: usize) -> Result<Vec<f64>> {
    match s {
        2 => Ok(vec![1.0, -1.0]),
        3 => Ok(vec![0.5, -1.0, 0.5]),
        4 => Ok(vec![1.0, -5.0_f64.sqrt(), 5.0_f64.sqrt(), -1.0]),
        _ => Err(Error::Tableau(format!(
            "no d-vector stored for s = {s} (supported: 2, 3, 4)"
        ))),
    }
}

/// Resolve a tableau by registry name.
///
/// Grammar: family token plus optional stage suffix, e.g. "glrk4",
/// "lobatto-iiib-3", "srk3", "radau-iia-2".
pub fn by_name(name: &str) -> Result<PartitionedTableau> {
    let name = name.trim().to_ascii_lowercase();
    if name == "srk3" {
        return srk3();
    }
    if let Some(rest) = name.strip_prefix("glrk") {
        let s: usize = rest
            .parse()
            .map_err(|_| Error::Tableau(format!("bad stage count in `{name}`")))?;
        return gauss_legendre(s);
    }
    if let Some(rest) = name.strip_prefix("radau-iia-") {
        let s: usize = rest
            .parse()
            .map_err(|_| Error::Tableau(format!("bad stage count in `{name}`")))?;
        return radau_iia(s);
    }
    if let Some(rest) = name.strip_prefix("lobatto-") {
        let (fam, s) = rest
            .rsplit_once('-')
            .ok_or_else(|| Error::Tableau(format!("missing stage suffix in `{name}`")))?;
        let s: usize = s
            .parse()
            .map_err(|_| Error::Tableau(format!("bad stage count in `{name}`")))?;
        let family = match fam {
            "iiia" => LobattoFamily::IIIA,
            "iiib" => LobattoFamily::IIIB,
            "iiic" => LobattoFamily::IIIC,
            "iiicstar" | "iiic*" => LobattoFamily::IIICstar,
            "iiid" => LobattoFamily::IIID,
            "iiie" => LobattoFamily::IIIE,
            other => {
                return Err(Error::Tableau(format!("unknown Lobatto family `{other}`")));
            }
        };
        return lobatto(family, s);
    }
    Err(Error::Tableau(format!("unknown tableau `{name}`")))
}

/// Names of every tableau in the registry.
pub fn registry_names() -> Vec<String> {
    let mut names: Vec<String> = (1..=6).map(|s| format!("glrk{s}")).collect();
    for fam in ["iiia", "iiib", "iiic", "iiicstar", "iiid", "iiie"] {
        for s in 2..=4 {
            names.push(format!("lobatto-{fam}-{s}"));
        }
    }
    names.push("srk3".to_string());
    names.push("radau-iia-2".to_string());
    names.push("radau-iia-3".to_string());
    names
}

/// Every tableau in the registry, constructed.
pub fn registry() -> Vec<PartitionedTableau> {
    registry_names()
        .iter()
        .map(|n| by_name(n).expect("registry entry must construct"))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    const TOL: f64 = 1e-12;

    #[test]
    fn registry_constructs_and_validates() {
        for t in registry() {
            t.validate(TOL).unwrap();
            assert_eq!(by_name(&t.name()).unwrap().name(), t.name());
        }
    }

    #[test]
    fn non_radau_tableaux_are_symplectic_radau_is_not() {
        for t in registry() {
            let res = check_symplecticity(&t);
            if t.family == TableauFamily::RadauIIA {
                assert!(res > 1e-3, "{} residual {res}", t.name());
            } else {
                assert!(res <= TOL, "{} residual {res}", t.name());
            }
        }
    }

    #[test]
    fn gauss_legendre_single_stage_residual_is_exactly_zero() {
        // 1*(1/2) + 1*(1/2) - 1*1 = 0 in exact f64 arithmetic
        let t = gauss_legendre(1).unwrap();
        assert_eq!(check_symplecticity(&t), 0.0);
    }

    #[test]
    fn r_infinity_values() {
        for s in 1..=6 {
            let t = gauss_legendre(s).unwrap();
            assert_eq!(t.r_infinity, (-1.0_f64).powi(s as i32));
        }
        for fam in [
            LobattoFamily::IIIA,
            LobattoFamily::IIIB,
            LobattoFamily::IIIC,
            LobattoFamily::IIICstar,
            LobattoFamily::IIID,
            LobattoFamily::IIIE,
        ] {
            for s in 2..=4 {
                let t = lobatto(fam, s).unwrap();
                assert_eq!(t.r_infinity, (-1.0_f64).powi(s as i32 - 1));
            }
        }
        assert_eq!(srk3().unwrap().r_infinity, -1.0);
        assert_eq!(radau_iia(2).unwrap().r_infinity, 0.0);
    }

    #[test]
    fn r_infinity_matches_stability_function_where_a_invertible() {
        // R(inf) = 1 - b^T A^{-1} e for an invertible coefficient matrix
        use nalgebra::{DMatrix, DVector};
        for name in ["glrk1", "glrk2", "glrk3", "glrk4", "glrk5", "glrk6", "srk3"] {
            let t = by_name(name).unwrap();
            let s = t.stages();
            let a = DMatrix::from_fn(s, s, |i, j| t.q_tableau.a[i][j]);
            let b = DVector::from_vec(t.q_tableau.b.clone());
            let e = DVector::from_element(s, 1.0);
            let ainv_e = a.lu().solve(&e).unwrap();
            let rinf = 1.0 - b.dot(&ainv_e);
            assert!(
                (rinf - t.r_infinity).abs() < 1e-9,
                "{name}: computed {rinf}, stored {}",
                t.r_infinity
            );
        }
        for s in [2, 3] {
            let t = radau_iia(s).unwrap();
            let a = DMatrix::from_fn(s, s, |i, j| t.q_tableau.a[i][j]);
            let b = DVector::from_vec(t.q_tableau.b.clone());
            let e = DVector::from_element(s, 1.0);
            let rinf = 1.0 - b.dot(&a.lu().solve(&e).unwrap());
            assert!(rinf.abs() < 1e-12, "radau-iia-{s}: R(inf) = {rinf}");
        }
    }

    #[test]
    fn d_vectors_stored_values() {
        assert_eq!(d_vector(2).unwrap(), vec![1.0, -1.0]);
        assert_eq!(d_vector(3).unwrap(), vec![0.5, -1.0, 0.5]);
        let d4 = d_vector(4).unwrap();
        assert_eq!(d4[0], 1.0);
        assert!((d4[1] + 5.0_f64.sqrt()).abs() == 0.0);
        assert!(d_vector(5).is_err());
    }

    #[test]
    fn d_vectors_sum_to_zero_and_reverse_symmetric_up_to_sign() {
        for s in 2..=4 {
            let d = d_vector(s).unwrap();
            assert!(d.iter().sum::<f64>().abs() < 1e-15);
            let plus = (0..s).all(|i| d[i] == d[s - 1 - i]);
            let minus = (0..s).all(|i| d[i] == -d[s - 1 - i]);
            assert!(plus || minus, "s={s}: {d:?}");
        }
    }

    #[test]
    fn d_attached_only_for_dependent_velocity_pairings() {
        for t in registry() {
            let expect = matches!(
                t.family,
                TableauFamily::LobattoIIIA
                    | TableauFamily::LobattoIIIB
                    | TableauFamily::LobattoIIIC
                    | TableauFamily::LobattoIIICstar
            );
            assert_eq!(t.d.is_some(), expect, "{}", t.name());
        }
    }

    #[test]
    fn split_weights_reconstruct_the_f64_weights() {
        for t in registry() {
            for (i, sc) in t.b_split.iter().enumerate() {
                assert_eq!(sc.value, t.q_tableau.b[i], "{} b[{i}]", t.name());
                assert!(sc.correction.abs() <= 1e-16 * sc.value.abs().max(1.0));
            }
        }
    }

    #[test]
    fn unknown_names_rejected() {
        assert!(by_name("glrk7").is_err());
        assert!(by_name("glrk0").is_err());
        assert!(by_name("lobatto-iiix-2").is_err());
        assert!(by_name("lobatto-iiia-5").is_err());
        assert!(by_name("radau-iia-4").is_err());
        assert!(by_name("nonsense").is_err());
    }
}
