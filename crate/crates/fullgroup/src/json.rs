//! Versioned JSON artifacts. Maps are `BTreeMap`s and group elements,
//! clopen sets and points use their textual encodings, so equal inputs give
//! byte-identical files.

use std::collections::BTreeMap;

use fullgroup_core::transfer::{GwState, TransferResult};
use fullgroup_core::{
    Backend, Bisection, ClopenSet, ConjugateFactor, ConjugateProduct, DecompositionResult, DerivedWitness,
    Environment, GroupElement, GroupWord, ProofTrace, SplitResult,
};
use serde::{Deserialize, Serialize};

use crate::error::HarnessError;

pub const FORMAT_VERSION: u32 = 1;

fn check_version(found: u32) -> Result<(), HarnessError> {
    if found == FORMAT_VERSION {
        Ok(())
    } else {
        Err(HarnessError::Config(format!("unsupported format_version {found}, expected {FORMAT_VERSION}")))
    }
}

pub fn to_pretty<T: Serialize>(value: &T) -> Result<String, HarnessError> {
    Ok(serde_json::to_string_pretty(value)? + "\n")
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CompareFile {
    pub format_version: u32,
    pub backend: String,
    pub a: String,
    pub b: String,
    pub bisection: String,
    pub source: String,
    pub range: String,
}

impl CompareFile {
    pub fn new(a: &ClopenSet, b: &ClopenSet, u: &Bisection) -> Self {
        let (source, range) = u.source_range();
        CompareFile {
            format_version: FORMAT_VERSION,
            backend: u.backend().to_string(),
            a: a.to_string(),
            b: b.to_string(),
            bisection: u.to_string(),
            source: source.to_string(),
            range: range.to_string(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct WitnessDoc {
    pub expr: String,
    pub elements: BTreeMap<String, String>,
}

impl WitnessDoc {
    pub fn new(w: &DerivedWitness) -> Self {
        WitnessDoc {
            expr: w.expr.to_string(),
            elements: w.elements.iter().map(|(k, v)| (k.clone(), v.to_string())).collect(),
        }
    }

    pub fn to_witness(&self, backend: Backend) -> Result<DerivedWitness, HarnessError> {
        let mut w = DerivedWitness::new(backend);
        w.expr = self.expr.parse()?;
        for (name, text) in &self.elements {
            let g: GroupElement = text.parse()?;
            backend.check_same(&g.backend())?;
            w.bind(name, g);
        }
        Ok(w)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TransferFile {
    pub format_version: u32,
    pub backend: String,
    pub a: String,
    pub b: String,
    pub kind: String,
    pub element: String,
    pub image_of_a: String,
    pub support: String,
    pub witness: Option<WitnessDoc>,
}

impl TransferFile {
    pub fn new(a: &ClopenSet, b: &ClopenSet, r: &TransferResult) -> Result<Self, HarnessError> {
        Ok(TransferFile {
            format_version: FORMAT_VERSION,
            backend: r.element.backend().to_string(),
            a: a.to_string(),
            b: b.to_string(),
            kind: r.kind.name().to_string(),
            element: r.element.to_string(),
            image_of_a: r.element.image(a)?.to_string(),
            support: r.element.support().to_string(),
            witness: r.witness.as_ref().map(WitnessDoc::new),
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SwapFile {
    pub format_version: u32,
    pub backend: String,
    pub a: String,
    pub b: String,
    pub element: String,
    pub support: String,
}

impl SwapFile {
    pub fn new(a: &ClopenSet, b: &ClopenSet, g: &GroupElement) -> Self {
        SwapFile {
            format_version: FORMAT_VERSION,
            backend: g.backend().to_string(),
            a: a.to_string(),
            b: b.to_string(),
            element: g.to_string(),
            support: g.support().to_string(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GwRoundDoc {
    pub round: usize,
    pub residual_a: String,
    pub residual_b: String,
    pub diameter_a: String,
    pub diameter_b: String,
    pub annulus_a: String,
    pub annulus_b: String,
    pub alpha: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GwFile {
    pub format_version: u32,
    pub backend: String,
    pub a_minus_b: String,
    pub b_minus_a: String,
    pub x0: String,
    pub y0: String,
    pub partial: String,
    pub rounds: Vec<GwRoundDoc>,
}

impl GwFile {
    pub fn new(state: &GwState) -> Result<Self, HarnessError> {
        let mut rounds = Vec::with_capacity(state.rounds.len());
        for (i, r) in state.rounds.iter().enumerate() {
            rounds.push(GwRoundDoc {
                round: i + 1,
                residual_a: r.residual_a.to_string(),
                residual_b: r.residual_b.to_string(),
                diameter_a: r.residual_a.diameter_bound()?.to_ratio().to_string(),
                diameter_b: r.residual_b.diameter_bound()?.to_ratio().to_string(),
                annulus_a: r.annulus_a.to_string(),
                annulus_b: r.annulus_b.to_string(),
                alpha: r.alpha.to_string(),
            });
        }
        Ok(GwFile {
            format_version: FORMAT_VERSION,
            backend: state.backend.to_string(),
            a_minus_b: state.start_a.to_string(),
            b_minus_a: state.start_b.to_string(),
            x0: state.x0.to_string(),
            y0: state.y0.to_string(),
            partial: state.partial.to_string(),
            rounds,
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FactorDoc {
    pub element: String,
    pub bound: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DecompositionFile {
    pub format_version: u32,
    pub backend: String,
    pub element: String,
    pub epsilon: Option<String>,
    pub factors: Vec<FactorDoc>,
}

impl DecompositionFile {
    pub fn new(alpha: &GroupElement, d: &DecompositionResult) -> Self {
        DecompositionFile {
            format_version: FORMAT_VERSION,
            backend: d.backend.to_string(),
            element: alpha.to_string(),
            epsilon: d.epsilon.map(|e| e.to_string()),
            factors: d
                .factors
                .iter()
                .zip(&d.bounds)
                .map(|(f, c)| FactorDoc { element: f.to_string(), bound: c.to_string() })
                .collect(),
        }
    }

    pub fn to_result(&self) -> Result<(GroupElement, DecompositionResult), HarnessError> {
        check_version(self.format_version)?;
        let backend: Backend = self.backend.parse()?;
        let alpha: GroupElement = self.element.parse()?;
        let mut factors = Vec::new();
        let mut bounds = Vec::new();
        for f in &self.factors {
            factors.push(f.element.parse()?);
            bounds.push(f.bound.parse()?);
        }
        let epsilon = match &self.epsilon {
            Some(e) => Some(e.parse().map_err(|_| HarnessError::Config(format!("bad epsilon {e:?}")))?),
            None => None,
        };
        Ok((alpha, DecompositionResult { backend, factors, bounds, epsilon }))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FactorEntry {
    pub conjugator: String,
    /// `+1` for the generator, `-1` for its inverse.
    pub sign: i8,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TraceDoc {
    pub tag: String,
    pub detail: String,
}

/// A product of conjugates of a named generator, the environment binding
/// every name it mentions, and the element it must evaluate to.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CertificateFile {
    pub format_version: u32,
    pub backend: String,
    pub generator: String,
    pub environment: BTreeMap<String, String>,
    pub target: String,
    pub factors: Vec<FactorEntry>,
    pub trace: Vec<TraceDoc>,
}

impl CertificateFile {
    pub fn new(cp: &ConjugateProduct, env: &Environment, target: &GroupElement, trace: &ProofTrace) -> Self {
        CertificateFile {
            format_version: FORMAT_VERSION,
            backend: env.backend().to_string(),
            generator: cp.generator.clone(),
            environment: env.elements().iter().map(|(k, v)| (k.clone(), v.to_string())).collect(),
            target: target.to_string(),
            factors: cp
                .factors
                .iter()
                .map(|f| FactorEntry { conjugator: f.conjugator.to_string(), sign: if f.inverse { -1 } else { 1 } })
                .collect(),
            trace: trace.entries.iter().map(|e| TraceDoc { tag: e.tag.clone(), detail: e.detail.clone() }).collect(),
        }
    }

    pub fn from_json(text: &str) -> Result<Self, HarnessError> {
        let file: CertificateFile = serde_json::from_str(text)?;
        check_version(file.format_version)?;
        Ok(file)
    }

    /// Parses every element and word; base and backend mismatches are errors.
    pub fn to_parts(&self) -> Result<(ConjugateProduct, Environment, GroupElement), HarnessError> {
        check_version(self.format_version)?;
        let backend: Backend = self.backend.parse()?;
        let mut env = Environment::new(backend);
        for (name, text) in &self.environment {
            let g: GroupElement = text.parse()?;
            backend.check_same(&g.backend())?;
            env.insert(name, g)?;
        }
        let target: GroupElement = self.target.parse()?;
        backend.check_same(&target.backend())?;
        let mut factors = Vec::with_capacity(self.factors.len());
        for f in &self.factors {
            let inverse = match f.sign {
                1 => false,
                -1 => true,
                s => return Err(HarnessError::Config(format!("factor sign must be 1 or -1, found {s}"))),
            };
            factors.push(ConjugateFactor { conjugator: GroupWord::parse(&f.conjugator)?, inverse });
        }
        Ok((ConjugateProduct { generator: self.generator.clone(), factors }, env, target))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SplitFile {
    pub format_version: u32,
    pub backend: String,
    pub tau: String,
    pub tau1: String,
    pub tau2: String,
    pub separating_cylinder: String,
    pub proper_part: String,
    pub certificate: CertificateFile,
}

impl SplitFile {
    pub fn new(tau: &GroupElement, s: &SplitResult) -> Self {
        SplitFile {
            format_version: FORMAT_VERSION,
            backend: tau.backend().to_string(),
            tau: tau.to_string(),
            tau1: s.tau1.to_string(),
            tau2: s.tau2.to_string(),
            separating_cylinder: s.a.to_string(),
            proper_part: s.a0.to_string(),
            certificate: CertificateFile::new(&s.certificate, &s.environment, &s.tau1, &ProofTrace::default()),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use fullgroup_core::certificate::{commutator_target, simplicity_certificate, verify_certificate};

    #[test]
    fn certificate_round_trip() {
        let backend = Backend::odometer(2);
        let mut env = Environment::new(backend);
        env.insert("tau0", "odo2:[(ε;+1)]".parse().unwrap()).unwrap();
        env.insert("alpha", "odo2:[(00;+1),(10;-1),(01;0),(11;0)]".parse().unwrap()).unwrap();
        env.insert("beta", "odo2:[(00;+2),(01;-2),(10;0),(11;0)]".parse().unwrap()).unwrap();
        let targets = vec![("alpha".to_string(), "beta".to_string())];
        let (cp, trace) = simplicity_certificate("tau0", &targets, &mut env).unwrap();
        let target = commutator_target(&targets, &env).unwrap();
        let file = CertificateFile::new(&cp, &env, &target, &trace);
        let text = to_pretty(&file).unwrap();
        let again = CertificateFile::from_json(&text).unwrap();
        assert_eq!(again, file);
        assert_eq!(to_pretty(&again).unwrap(), text);
        let (cp2, env2, target2) = again.to_parts().unwrap();
        assert_eq!(cp2, cp);
        assert!(verify_certificate(&cp2, &env2, &target2).unwrap());
    }

    #[test]
    fn rejects_bad_files() {
        let mut file = CertificateFile {
            format_version: FORMAT_VERSION,
            backend: "odo2".into(),
            generator: "t".into(),
            environment: BTreeMap::from([("t".to_string(), "odo2:[(ε;+1)]".to_string())]),
            target: "odo2:[(ε;0)]".into(),
            factors: vec![FactorEntry { conjugator: "1".into(), sign: 2 }],
            trace: vec![],
        };
        assert!(file.to_parts().is_err());
        file.factors[0].sign = 1;
        assert!(file.to_parts().is_ok());
        file.target = "odo3:[(ε;0)]".into();
        assert_eq!(file.to_parts().unwrap_err().exit_code(), 2);
        file.target = "odo2:[(ε;0)]".into();
        file.format_version = 9;
        assert!(file.to_parts().is_err());
    }
}
