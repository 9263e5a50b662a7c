//! Job files: a system, a list of operations and output options, run over
//! any supported field.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::ambient::{Ambient, AmbientSpec, DegreeSpec};
use crate::blowup::{impose_chain, BlowupChainSpec, ChainJson};
use crate::coeffs::{CoefficientField, ExtField, Field, FieldSpec, LiftResult, PrimeField, Rationals};
use crate::conditions::{image_system, impose_containment, impose_points, trace, PointCondition, SchemeJson, SchemeSpec};
use crate::error::{Error, Result};
use crate::linsys::{LinearSys, SystemJson};
use crate::poly::{Monomial, MultiPoly};
use crate::singular::analyze;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct JobFile {
    pub ambient: AmbientSpec,
    pub system: SystemSpec,
    #[serde(default)]
    pub operations: Vec<Operation>,
    #[serde(default)]
    pub output: OutputOptions,
}

/// Exactly one of: a degree (complete system), sections, or matrix + monomials.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SystemSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub degree: Option<DegreeSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sections: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub matrix: Option<Vec<Vec<String>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub monomials: Option<Vec<String>>,
    /// Echelonize the sections even when they are independent.
    #[serde(default)]
    pub change_basis: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PointJson {
    pub point: Vec<String>,
    #[serde(default = "one")]
    pub multiplicity: u32,
}

fn one() -> u32 {
    1
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "op", rename_all = "kebab-case", deny_unknown_fields)]
pub enum Operation {
    ImposePoints {
        points: Vec<PointJson>,
    },
    /// `count` random points, each with the given multiplicity (or a list of
    /// multiplicities, one per point). Coordinates are drawn from `range`
    /// when given, otherwise uniformly from a finite field.
    RandomPoints {
        #[serde(default)]
        count: Option<usize>,
        #[serde(default = "one")]
        multiplicity: u32,
        #[serde(default)]
        multiplicities: Option<Vec<u32>>,
        #[serde(default)]
        range: Option<(i64, i64)>,
    },
    ImposeChain {
        chains: Vec<ChainJson>,
    },
    Containment {
        scheme: SchemeJson,
    },
    Trace {
        scheme: SchemeJson,
    },
    ImageSystem {
        map: Vec<String>,
        scheme: SchemeJson,
        degree: u32,
    },
    Reduction,
    SingularPoints,
}

impl Operation {
    pub fn name(&self) -> &'static str {
        match self {
            Operation::ImposePoints { .. } => "impose-points",
            Operation::RandomPoints { .. } => "random-points",
            Operation::ImposeChain { .. } => "impose-chain",
            Operation::Containment { .. } => "containment",
            Operation::Trace { .. } => "trace",
            Operation::ImageSystem { .. } => "image-system",
            Operation::Reduction => "reduction",
            Operation::SingularPoints => "singular-points",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputOptions {
    /// List the sections of the final system.
    #[serde(default = "yes")]
    pub sections: bool,
    #[serde(default = "default_max")]
    pub max_sections: usize,
}

fn yes() -> bool {
    true
}

fn default_max() -> usize {
    50
}

impl Default for OutputOptions {
    fn default() -> Self {
        OutputOptions { sections: true, max_sections: default_max() }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct StepReport {
    pub op: String,
    pub nsections: usize,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub detail: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct JobReport {
    pub initial: String,
    pub steps: Vec<StepReport>,
    pub result: String,
    pub nsections: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sections: Option<Vec<String>>,
    pub truncated: bool,
}

impl JobReport {
    pub fn render(&self) -> String {
        let mut s = format!("system: {}\n", self.initial);
        for st in &self.steps {
            s.push_str(&format!("{}: nsections={}\n", st.op, st.nsections));
            for d in &st.detail {
                s.push_str(&format!("  {d}\n"));
            }
        }
        s.push_str(&format!("result: {}\n", self.result));
        if let Some(secs) = &self.sections {
            s.push_str("sections:\n");
            for p in secs {
                s.push_str(&format!("  {p}\n"));
            }
            if self.truncated {
                s.push_str(&format!("  ... ({} in total)\n", self.nsections));
            }
        }
        s
    }
}

impl JobFile {
    pub fn from_json_str(s: &str) -> Result<Self> {
        serde_json::from_str(s).map_err(|e| Error::InvalidArgument(format!("job file: {e}")))
    }

    /// The same job over another field.
    pub fn with_field(&self, field: FieldSpec) -> Self {
        let mut j = self.clone();
        j.ambient.field = field;
        j
    }

    fn system_json(&self) -> SystemJson {
        SystemJson {
            ambient: self.ambient.clone(),
            degree: self.system.degree.clone(),
            sections: self.system.sections.clone(),
            matrix: self.system.matrix.clone(),
            monomials: self.system.monomials.clone(),
        }
    }
}

/// Runs `job`, drawing random points from a generator seeded with `seed`.
pub fn run_job(job: &JobFile, seed: u64) -> Result<JobReport> {
    match CoefficientField::from_spec(&job.ambient.field)? {
        CoefficientField::Rationals(f) => run_typed(&f, job, seed).map(|(r, _)| r),
        CoefficientField::Prime(f) => run_typed(&f, job, seed).map(|(r, _)| r),
        CoefficientField::Extension(f) => run_typed::<ExtField>(&f, job, seed).map(|(r, _)| r),
    }
}

/// Runs `job` over a concrete field, returning the report and the final system.
pub fn run_typed<F: Field>(field: &F, job: &JobFile, seed: u64) -> Result<(JobReport, LinearSys<F>)> {
    let mut l = LinearSys::from_json(field, &job.system_json())?;
    if job.system.change_basis {
        l = LinearSys::from_sections(l.ambient(), l.sections().to_vec(), true, true)?;
    }
    let initial = l.to_string();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut steps = Vec::new();
    for op in &job.operations {
        let mut detail = Vec::new();
        l = apply(&l, op, &mut rng, &mut detail, &job.output)?;
        steps.push(StepReport { op: op.name().to_string(), nsections: l.nsections(), detail });
    }
    let n = l.nsections();
    let sections = job.output.sections.then(|| {
        let basis = if n <= job.output.max_sections { l.sections().to_vec() } else { Vec::new() };
        basis.iter().map(|p| l.format_poly(p)).collect()
    });
    let report = JobReport {
        initial,
        steps,
        result: l.to_string(),
        nsections: n,
        truncated: job.output.sections && n > job.output.max_sections,
        sections,
    };
    Ok((report, l))
}

fn apply<F: Field>(
    l: &LinearSys<F>,
    op: &Operation,
    rng: &mut ChaCha8Rng,
    detail: &mut Vec<String>,
    output: &OutputOptions,
) -> Result<LinearSys<F>> {
    let a = l.ambient();
    let scheme = |s: &SchemeJson| SchemeSpec::from_json(a, s);
    match op {
        Operation::ImposePoints { points } => {
            let conds = points
                .iter()
                .map(|p| Ok(PointCondition::new(a.parse_point(&p.point)?, p.multiplicity)))
                .collect::<Result<Vec<_>>>()?;
            impose_points(l, &conds)
        }
        Operation::RandomPoints { count, multiplicity, multiplicities, range } => {
            let mults = match (multiplicities, count) {
                (Some(m), None) => m.clone(),
                (Some(m), Some(c)) if m.len() == *c => m.clone(),
                (None, Some(c)) => vec![*multiplicity; *c],
                _ => return Err(Error::InvalidArgument("random-points needs count or multiplicities (of matching length)".into())),
            };
            let mut conds = Vec::with_capacity(mults.len());
            for m in mults {
                conds.push(PointCondition::new(a.random_point(rng, *range)?, m));
            }
            if conds.len() <= 8 {
                for c in &conds {
                    detail.push(format!("{} m={}", a.format_point(&c.point), c.multiplicity));
                }
            }
            impose_points(l, &conds)
        }
        Operation::ImposeChain { chains } => {
            let specs = chains.iter().map(|c| BlowupChainSpec::from_json(a, c)).collect::<Result<Vec<_>>>()?;
            impose_chain(l, &specs)
        }
        Operation::Containment { scheme: s } => impose_containment(l, &scheme(s)?),
        Operation::Trace { scheme: s } => trace(l, &scheme(s)?),
        Operation::ImageSystem { map, scheme: s, degree } => {
            let f = map.iter().map(|m| a.parse_poly(m)).collect::<Result<Vec<_>>>()?;
            image_system(a, &f, &scheme(s)?, *degree)
        }
        Operation::Reduction => {
            let (r, g) = l.reduction()?;
            detail.push(format!("fixed part: {}", a.format_poly(&g)));
            Ok(r)
        }
        Operation::SingularPoints => {
            for s in l.sections().iter().take(output.max_sections) {
                let report = analyze(a, s)?;
                detail.push(format!("section {}", l.format_poly(s)));
                detail.extend(report.render(a).lines().map(|x| x.to_string()));
            }
            Ok(l.clone())
        }
    }
}

/// Coefficients of the unique section of a job's result over several primes,
/// combined by CRT and rational reconstruction.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct JobLift {
    /// Primes whose result had exactly one section.
    pub used: Vec<u64>,
    pub skipped: Vec<u64>,
    pub monomials: Vec<String>,
    /// Lifted coefficient of each monomial, `None` where reconstruction failed.
    pub coefficients: Vec<Option<String>>,
    #[serde(skip)]
    pub lift: LiftResult,
    /// The lifted section over QQ, when every coefficient reconstructed.
    pub polynomial: Option<String>,
}

/// Runs `job` over GF(p) for every prime and lifts the normalized section.
/// Random points must use an integer range so every prime sees the same points.
pub fn lift_job(job: &JobFile, primes: &[u64], seed: u64) -> Result<JobLift> {
    let mut used = Vec::new();
    let mut skipped = Vec::new();
    let mut per_prime: Vec<BTreeMap<Monomial, u64>> = Vec::new();
    for &p in primes {
        let f = PrimeField::new(p)?;
        let (_, l) = run_typed(&f, &job.with_field(FieldSpec::Gf { p, k: 1, modulus: None }), seed)?;
        if l.nsections() != 1 {
            skipped.push(p);
            continue;
        }
        let s = l.basis().remove(0);
        let s = s.scale(&f.inv(s.leading_coeff().unwrap()).unwrap());
        per_prime.push(s.terms().map(|(m, c)| (m.clone(), *c)).collect());
        used.push(p);
    }
    if used.is_empty() {
        return Err(Error::NoSolution);
    }
    let mut support: Vec<Monomial> = per_prime.iter().flat_map(|m| m.keys().cloned()).collect();
    support.sort();
    support.dedup();
    support.reverse();
    let moduli: Vec<BigInt> = used.iter().map(|&p| BigInt::from(p)).collect();
    let residues: Vec<Vec<BigInt>> = per_prime
        .iter()
        .map(|m| support.iter().map(|k| BigInt::from(m.get(k).copied().unwrap_or(0))).collect())
        .collect();
    let lift = crate::coeffs::lift(&moduli, &residues)?;
    let qa = Ambient::from_spec(&Rationals, &AmbientSpec { field: FieldSpec::Rational, ..job.ambient.clone() })?;
    let polynomial = lift.all_lifted().then(|| {
        let p = MultiPoly::from_terms(&Rationals, qa.nvars(), support.iter().cloned().zip(lift.lifted.iter().map(|c| c.clone().unwrap())));
        qa.format_poly(&p)
    });
    let monomials = support.iter().map(|m| m.format_with(qa.names())).collect();
    let coefficients = lift.lifted.iter().map(|c| c.as_ref().map(|c| c.to_string())).collect();
    Ok(JobLift { used, skipped, monomials, coefficients, lift, polynomial })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn job(s: &str) -> JobFile {
        JobFile::from_json_str(s).unwrap()
    }

    #[test]
    fn empty_operations_echo_the_system() {
        let j = job(r#"{"ambient":{"kind":"projective","dim":2,"field":{"kind":"rational"}},"system":{"degree":[2]}}"#);
        let r = run_job(&j, 0).unwrap();
        assert_eq!(r.nsections, 6);
        assert!(r.steps.is_empty());
        assert_eq!(r.sections.as_ref().unwrap().len(), 6);
        assert!(r.render().starts_with("system: linear system on P^2"));
    }

    #[test]
    fn unknown_keys_are_rejected() {
        let bad = r#"{"ambient":{"kind":"projective","dim":2,"field":{"kind":"rational"}},"system":{"degree":[2]},"extra":1}"#;
        assert!(JobFile::from_json_str(bad).is_err());
        let bad_op = r#"{"ambient":{"kind":"projective","dim":2,"field":{"kind":"rational"}},"system":{"degree":[2]},"operations":[{"op":"impose-points","pts":[]}]}"#;
        assert!(JobFile::from_json_str(bad_op).is_err());
    }

    #[test]
    fn matrix_job_with_change_of_basis() {
        let j = job(
            r#"{"ambient":{"kind":"projective","dim":2,"field":{"kind":"rational"}},
                "system":{"matrix":[["1","0","0","0","0","1"],["0","0","1","-1","0","0"],["0","1","1","0","0","0"],["0","0","0","1","0","0"]],
                          "monomials":["x^2","x*y","y^2","x*z","y*z","z^2"],"change_basis":true}}"#,
        );
        let r = run_job(&j, 0).unwrap();
        assert_eq!(r.sections.unwrap(), ["x^2+z^2", "x*z", "y^2", "x*y"]);
    }

    #[test]
    fn operations_chain_together() {
        let j = job(
            r#"{"ambient":{"kind":"affine","dim":2,"field":{"kind":"gf","p":101}},
                "system":{"degree":[4]},
                "operations":[
                  {"op":"impose-points","points":[{"point":["1","2"],"multiplicity":2}]},
                  {"op":"impose-chain","chains":[{"point":["0","0"],"mults":[2,2],"tangents":[["1","0"]]}]},
                  {"op":"random-points","count":2,"range":[1,50]},
                  {"op":"containment","scheme":{"generators":["x"],"saturated":true}}
                ]}"#,
        );
        let r = run_job(&j, 5).unwrap();
        let ns: Vec<usize> = r.steps.iter().map(|s| s.nsections).collect();
        assert_eq!(ns[..3], [12, 6, 4]);
        assert_eq!(run_job(&j, 5).unwrap(), r);
    }

    #[test]
    fn trace_and_image_operations() {
        let j = job(
            r#"{"ambient":{"kind":"projective","dim":2,"field":{"kind":"rational"}},
                "system":{"degree":[2]},
                "operations":[{"op":"trace","scheme":{"generators":["x"],"saturated":true}}]}"#,
        );
        assert_eq!(run_job(&j, 0).unwrap().nsections, 3);
        let j = job(
            r#"{"ambient":{"kind":"projective","dim":1,"field":{"kind":"rational"}},
                "system":{"degree":[1]},
                "operations":[{"op":"image-system","map":["x1^2","x1*x2","x2^2"],"scheme":{"generators":[]},"degree":2}]}"#,
        );
        let r = run_job(&j, 0).unwrap();
        assert_eq!(r.nsections, 1);
    }

    #[test]
    fn singular_point_operation() {
        let j = job(
            r#"{"ambient":{"kind":"projective","dim":3,"field":{"kind":"gf","p":7}},
                "system":{"sections":["x1*x2*x3+x1*x2*x4+x1*x3*x4+x2*x3*x4"]},
                "operations":[{"op":"singular-points"}]}"#,
        );
        let r = run_job(&j, 0).unwrap();
        assert!(r.steps[0].detail.iter().any(|l| l == "total=4 A1=4"));
    }

    #[test]
    fn lifting_a_unique_section() {
        // the conic through five integer points, recovered from residues
        let j = job(
            r#"{"ambient":{"kind":"projective","dim":2,"field":{"kind":"rational"}},
                "system":{"degree":[2]},
                "operations":[{"op":"impose-points","points":[
                  {"point":["1","0","1"]},{"point":["0","1","1"]},{"point":["2","3","1"]},{"point":["-1","4","1"]},{"point":["5","-2","1"]}]}]}"#,
        );
        let exact = run_job(&j, 0).unwrap().sections.unwrap()[0].clone();
        let primes: Vec<u64> = vec![1_000_003, 1_000_033, 1_000_037, 1_000_039];
        let lifted = lift_job(&j, &primes, 0).unwrap();
        let poly = lifted.polynomial.unwrap();
        let a = Ambient::projective(&Rationals, 2);
        let (p, q) = (a.parse_poly(&poly).unwrap(), a.parse_poly(&exact).unwrap());
        assert_eq!(p.monic(), q.monic());
    }
}
