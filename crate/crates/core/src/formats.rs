//! JSON interchange. Integers cross this boundary as `i64`.

use num_bigint::BigInt;
use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize};

use crate::bondal::{BondalVerdict, WallRelation};
use crate::cohomology::CohomologyTable;
use crate::collection::{ExceptionalVerdict, Violation};
use crate::divisor::{is_fano, TorusDivisor};
use crate::error::{Error, Result};
use crate::fan::{euler_characteristic, poincare_polynomial, validate, Fan};
use crate::frobenius::{SplittingReport, SplittingResult};
use crate::lattice::IntVector;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FanFile {
    pub dim: usize,
    pub rays: Vec<Vec<i64>>,
    pub max_cones: Vec<Vec<usize>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DivisorFile {
    pub coeffs: Vec<i64>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CollectionFile {
    pub bundles: Vec<Vec<i64>>,
}

fn parse<'a, T: Deserialize<'a>>(text: &'a str) -> Result<T> {
    serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))
}

fn small(x: &BigInt) -> Result<i64> {
    x.to_i64().ok_or_else(|| Error::Overflow(format!("{x} does not fit in i64")))
}

fn small_vec(v: &[BigInt]) -> Result<Vec<i64>> {
    v.iter().map(small).collect()
}

/// Structural checks only; run [`crate::fan::validate`] for smoothness and
/// completeness.
pub fn parse_fan(text: &str) -> Result<Fan> {
    let f: FanFile = parse(text)?;
    Fan::new(f.dim, f.rays.iter().map(|r| IntVector::from_i64(r)).collect(), f.max_cones)
}

pub fn fan_file(fan: &Fan) -> Result<FanFile> {
    Ok(FanFile {
        dim: fan.dim(),
        rays: fan.rays().iter().map(|r| small_vec(r.entries())).collect::<Result<_>>()?,
        max_cones: fan.max_cones().to_vec(),
    })
}

pub fn parse_divisor(text: &str) -> Result<TorusDivisor> {
    let d: DivisorFile = parse(text)?;
    Ok(TorusDivisor::from_i64(&d.coeffs))
}

pub fn divisor_file(d: &TorusDivisor) -> Result<DivisorFile> {
    Ok(DivisorFile {
        coeffs: small_vec(d.coeffs())?,
    })
}

pub fn parse_collection(text: &str) -> Result<Vec<TorusDivisor>> {
    let c: CollectionFile = parse(text)?;
    Ok(c.bundles.iter().map(|b| TorusDivisor::from_i64(b)).collect())
}

pub fn collection_file(bundles: &[TorusDivisor]) -> Result<CollectionFile> {
    Ok(CollectionFile {
        bundles: bundles.iter().map(|b| small_vec(b.coeffs())).collect::<Result<_>>()?,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct VarietyInfo {
    pub variety: String,
    pub dim: usize,
    pub rays: usize,
    pub max_cones: usize,
    pub picard_rank: usize,
    pub smooth: bool,
    pub complete: bool,
    /// Only decided for smooth complete fans.
    pub fano: Option<bool>,
    pub euler_characteristic: i64,
    /// Coefficients of the Poincaré polynomial, lowest degree first.
    pub poincare: Vec<i64>,
}

pub fn variety_info(fan: &Fan, name: &str) -> Result<VarietyInfo> {
    let report = validate(fan);
    let fano = if report.is_ok() { Some(is_fano(fan)?) } else { None };
    Ok(VarietyInfo {
        variety: name.to_string(),
        dim: fan.dim(),
        rays: fan.ray_count(),
        max_cones: fan.max_cones().len(),
        picard_rank: fan.picard_rank(),
        smooth: report.smooth,
        complete: report.complete,
        fano,
        euler_characteristic: small(&euler_characteristic(fan))?,
        poincare: small_vec(poincare_polynomial(fan).coeffs())?,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ClassJson {
    pub class: Vec<i64>,
    pub multiplicity: u64,
    pub representative: Vec<i64>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SplittingJson {
    pub p: u64,
    pub n: usize,
    pub classes: Vec<ClassJson>,
}

pub fn splitting_json(r: &SplittingResult) -> Result<SplittingJson> {
    Ok(SplittingJson {
        p: r.p,
        n: r.n,
        classes: r
            .classes
            .iter()
            .map(|c| {
                Ok(ClassJson {
                    class: small_vec(c.class.coords())?,
                    multiplicity: c.multiplicity,
                    representative: small_vec(c.representative.coeffs())?,
                })
            })
            .collect::<Result<_>>()?,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SplittingReportJson {
    pub pass: bool,
    pub p: u64,
    pub classes: usize,
    pub multiplicity_sum: u64,
    pub expected_sum: u64,
    pub c1_identity: Option<bool>,
    pub second_base_cone: Option<usize>,
    pub base_cone_agrees: Option<bool>,
    pub stable_at_p_plus_2: bool,
}

pub fn splitting_report_json(r: &SplittingResult, report: &SplittingReport, stable: bool) -> SplittingReportJson {
    SplittingReportJson {
        pass: report.passed(),
        p: r.p,
        classes: r.classes.len(),
        multiplicity_sum: report.multiplicity_sum,
        expected_sum: report.expected_sum,
        c1_identity: report.c1_identity,
        second_base_cone: report.second_base_cone,
        base_cone_agrees: report.base_cone_agrees,
        stable_at_p_plus_2: stable,
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CohomologyJson {
    pub dims: Vec<u64>,
    #[serde(rename = "box")]
    pub box_radius: i64,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub contributions: Vec<ContributionJson>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ContributionJson {
    pub m: Vec<i64>,
    pub dims: Vec<u64>,
}

pub fn cohomology_json(t: &CohomologyTable) -> CohomologyJson {
    CohomologyJson {
        dims: t.dims.clone(),
        box_radius: t.box_radius,
        contributions: t
            .contributions
            .iter()
            .map(|(m, dims)| ContributionJson {
                m: m.clone(),
                dims: dims.clone(),
            })
            .collect(),
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct WallJson {
    pub rays: Vec<usize>,
    pub u_plus: usize,
    pub u_minus: usize,
    pub coeffs: Vec<i64>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BondalJson {
    pub pass: bool,
    pub walls: usize,
    pub violations: Vec<WallJson>,
}

fn wall_json(r: &WallRelation) -> Result<WallJson> {
    Ok(WallJson {
        rays: r.wall.rays.clone(),
        u_plus: r.wall.u_plus,
        u_minus: r.wall.u_minus,
        coeffs: small_vec(&r.coeffs)?,
    })
}

pub fn bondal_json(v: &BondalVerdict) -> Result<BondalJson> {
    Ok(BondalJson {
        pass: v.pass,
        walls: v.relations.len(),
        violations: v.violations.iter().map(wall_json).collect::<Result<_>>()?,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ViolationJson {
    pub kind: &'static str,
    pub from: usize,
    pub to: usize,
    pub dims: Vec<u64>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ExceptionalJson {
    pub pass: bool,
    pub bundles: usize,
    pub tables: usize,
    pub violations: Vec<ViolationJson>,
}

pub fn exceptional_json(v: &ExceptionalVerdict) -> ExceptionalJson {
    let violations = v
        .violations
        .iter()
        .map(|x| match x {
            Violation::NotExceptional { index, dims } => ViolationJson {
                kind: "not_exceptional",
                from: *index,
                to: *index,
                dims: dims.clone(),
            },
            Violation::Backward { j, k, dims } => ViolationJson {
                kind: "backward",
                from: *k,
                to: *j,
                dims: dims.clone(),
            },
            Violation::HigherForward { j, k, dims } => ViolationJson {
                kind: "higher_forward",
                from: *j,
                to: *k,
                dims: dims.clone(),
            },
        })
        .collect();
    ExceptionalJson {
        pass: v.pass,
        bundles: v.table.len(),
        tables: v.table.iter().map(Vec::len).sum(),
        violations,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::variety::{build_named, VarietySpec};

    #[test]
    fn fan_round_trip() {
        let fan = build_named(&VarietySpec::Xd(3)).unwrap();
        let text = serde_json::to_string(&fan_file(&fan).unwrap()).unwrap();
        assert_eq!(parse_fan(&text).unwrap(), fan);
    }

    #[test]
    fn parse_examples() {
        let fan = parse_fan(r#"{"dim":1,"rays":[[1],[-1]],"max_cones":[[0],[1]]}"#).unwrap();
        assert_eq!(fan.ray_count(), 2);
        assert_eq!(
            parse_divisor(r#"{"coeffs":[2,-1]}"#).unwrap(),
            TorusDivisor::from_i64(&[2, -1])
        );
        assert_eq!(parse_collection(r#"{"bundles":[[0,0],[1,0]]}"#).unwrap().len(), 2);
    }

    #[test]
    fn rejects_malformed_input() {
        for bad in [
            "",
            "[]",
            r#"{"dim":1,"rays":[[1],[-1]]}"#,
            r#"{"dim":1,"rays":[[1],[-1]],"max_cones":[[0],[1]],"extra":0}"#,
            r#"{"dim":1,"rays":[[2],[-1]],"max_cones":[[0],[1]]}"#,
            r#"{"dim":2,"rays":[[1],[-1]],"max_cones":[[0],[1]]}"#,
            r#"{"dim":1,"rays":[[1],[-1]],"max_cones":[[0],[5]]}"#,
            r#"{"dim":1,"rays":[[1],[-1]],"max_cones":[[0],[-1]]}"#,
            r#"{"dim":1,"rays":[[1.5],[-1]],"max_cones":[[0],[1]]}"#,
            r#"{"dim":1,"rays":[[99999999999999999999],[-1]],"max_cones":[[0],[1]]}"#,
        ] {
            assert!(parse_fan(bad).is_err(), "{bad}");
        }
        assert!(parse_divisor(r#"{"coeffs":"1"}"#).is_err());
        assert!(parse_collection(r#"{"bundles":[1]}"#).is_err());
    }

    #[test]
    fn splitting_output_shape() {
        let fan = build_named(&VarietySpec::Projective(1)).unwrap();
        let r = crate::frobenius::thomsen_split(&fan, &TorusDivisor::zero(2), 3, 0).unwrap();
        let json = serde_json::to_value(splitting_json(&r).unwrap()).unwrap();
        assert_eq!(
            json,
            serde_json::json!({
                "p": 3,
                "n": 1,
                "classes": [
                    {"class": [0], "multiplicity": 1, "representative": [0, 0]},
                    {"class": [1], "multiplicity": 2, "representative": [0, 1]}
                ]
            })
        );
    }
}
