//! JSON instance files. Rationals are strings such as `"3"`, `"-1/2"`.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::complex::{Complex, Simplex, VertexId};
use crate::error::{Error, Result};
use crate::pl_map::{CriticalValue, Norm, PLMap};
use crate::rational::{self, Rational};
use crate::reduction::{SphereMap, SphereVertex};

pub const FORMAT_VERSION: u32 = 1;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum AlphaSpec {
    Rational(String),
    Sqrt { sqrt: String },
}

impl AlphaSpec {
    pub fn to_value(&self) -> Result<CriticalValue> {
        match self {
            AlphaSpec::Rational(s) => Ok(CriticalValue::Rat(rational::parse(s)?)),
            AlphaSpec::Sqrt { sqrt } => Ok(CriticalValue::SqrtRat(rational::parse(sqrt)?)),
        }
    }

    pub fn from_value(v: &CriticalValue) -> AlphaSpec {
        match v {
            CriticalValue::Rat(q) => AlphaSpec::Rational(rational::format(q)),
            CriticalValue::SqrtRat(q) => AlphaSpec::Sqrt { sqrt: rational::format(q) },
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VertexRecord {
    pub id: u32,
    pub f: Vec<String>,
    /// Inequality constraint values `g(v) <= 0`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub g: Option<Vec<String>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InstanceFile {
    pub version: u32,
    pub n: usize,
    pub norm: Norm,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha: Option<AlphaSpec>,
    pub vertices: Vec<VertexRecord>,
    pub simplices: Vec<Vec<u32>>,
}

/// A parsed instance.
#[derive(Clone, Debug, PartialEq)]
pub struct Instance {
    pub f: PLMap,
    pub norm: Norm,
    pub alpha: Option<CriticalValue>,
    /// Inequality constraints on the same complex, when present.
    pub g: Option<PLMap>,
}

fn parse_vector(v: u32, values: &[String], len: usize, what: &str) -> Result<Vec<Rational>> {
    if values.len() != len {
        return Err(Error::Parse(format!("vertex {v}: {what} has {} entries, expected {len}", values.len())));
    }
    values.iter().map(|s| rational::parse(s)).collect()
}

fn build_complex(vertices: &BTreeSet<u32>, simplices: &[Vec<u32>]) -> Result<Complex> {
    let mut all = Vec::new();
    for s in simplices {
        if s.is_empty() {
            return Err(Error::Parse("empty simplex".into()));
        }
        if let Some(v) = s.iter().find(|v| !vertices.contains(v)) {
            return Err(Error::Parse(format!("simplex refers to unknown vertex {v}")));
        }
        let simplex = Simplex::from_ids(s);
        if simplex.len() != s.len() {
            return Err(Error::Parse(format!("simplex {s:?} repeats a vertex")));
        }
        all.push(simplex);
    }
    all.extend(vertices.iter().map(|v| Simplex::vertex(VertexId(*v))));
    Ok(Complex::closure(all))
}

impl InstanceFile {
    pub fn from_json(text: &str) -> Result<InstanceFile> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("serialisable")
    }

    pub fn to_instance(&self) -> Result<Instance> {
        if self.version != FORMAT_VERSION {
            return Err(Error::Parse(format!("unsupported version {}", self.version)));
        }
        if self.n == 0 {
            return Err(Error::Parse("n must be positive".into()));
        }
        let mut ids = BTreeSet::new();
        for v in &self.vertices {
            if !ids.insert(v.id) {
                return Err(Error::Parse(format!("duplicate vertex id {}", v.id)));
            }
        }
        let complex = build_complex(&ids, &self.simplices)?;
        let mut values = BTreeMap::new();
        let mut g_values = BTreeMap::new();
        let k = self.vertices.iter().find_map(|v| v.g.as_ref().map(Vec::len));
        for v in &self.vertices {
            values.insert(VertexId(v.id), parse_vector(v.id, &v.f, self.n, "f")?);
            match (k, &v.g) {
                (Some(k), Some(g)) => {
                    g_values.insert(VertexId(v.id), parse_vector(v.id, g, k, "g")?);
                }
                (Some(_), None) => return Err(Error::Parse(format!("vertex {} lacks g values", v.id))),
                _ => {}
            }
        }
        let f = PLMap::new(complex.clone(), self.n, values)?;
        let g = match k {
            Some(k) => Some(PLMap::new(complex, k, g_values)?),
            None => None,
        };
        let alpha = self.alpha.as_ref().map(AlphaSpec::to_value).transpose()?;
        Ok(Instance { f, norm: self.norm, alpha, g })
    }

    pub fn from_instance(inst: &Instance) -> InstanceFile {
        let fmt = |y: &[Rational]| y.iter().map(rational::format).collect::<Vec<_>>();
        let vertices = inst
            .f
            .values()
            .iter()
            .map(|(v, y)| VertexRecord { id: v.0, f: fmt(y), g: inst.g.as_ref().map(|g| fmt(g.value(*v))) })
            .collect();
        let simplices = inst
            .f
            .complex()
            .maximal_simplices()
            .into_iter()
            .filter(|s| s.len() > 1)
            .map(|s| s.ids())
            .collect();
        InstanceFile {
            version: FORMAT_VERSION,
            n: inst.f.n(),
            norm: inst.norm,
            alpha: inst.alpha.as_ref().map(AlphaSpec::from_value),
            vertices,
            simplices,
        }
    }
}

impl Instance {
    pub fn from_json(text: &str) -> Result<Instance> {
        InstanceFile::from_json(text)?.to_instance()
    }

    pub fn to_json(&self) -> String {
        InstanceFile::from_instance(self).to_json()
    }

    pub fn new(f: PLMap, norm: Norm) -> Instance {
        Instance { f, norm, alpha: None, g: None }
    }
}

/// A raw extension question: does `sphere_map: A -> Sigma^(n-1)` extend over `X`?
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExtensionFile {
    pub version: u32,
    pub n: usize,
    /// Maximal simplices of `X`.
    pub simplices: Vec<Vec<u32>>,
    /// Maximal simplices of `A`.
    pub subcomplex: Vec<Vec<u32>>,
    /// Image of each vertex of `A`, written `+e1`, `-e2`, ...
    pub sphere_map: BTreeMap<u32, String>,
}

#[derive(Clone, Debug)]
pub struct ExtensionProblem {
    pub x: Complex,
    pub a: Complex,
    pub map: SphereMap,
}

impl ExtensionFile {
    pub fn from_json(text: &str) -> Result<ExtensionFile> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("serialisable")
    }

    pub fn to_problem(&self) -> Result<ExtensionProblem> {
        if self.version != FORMAT_VERSION {
            return Err(Error::Parse(format!("unsupported version {}", self.version)));
        }
        let ids: BTreeSet<u32> = self.simplices.iter().flatten().copied().collect();
        let x = build_complex(&ids, &self.simplices)?;
        let a = x.subcomplex(self.subcomplex.iter().map(|s| Simplex::from_ids(s)))?;
        let images = self
            .sphere_map
            .iter()
            .map(|(v, s)| Ok((VertexId(*v), s.parse::<SphereVertex>()?)))
            .collect::<Result<BTreeMap<_, _>>>()?;
        let map = SphereMap::new(a.clone(), self.n, images)?;
        Ok(ExtensionProblem { x, a, map })
    }

    pub fn from_problem(p: &ExtensionProblem) -> ExtensionFile {
        let maximal = |c: &Complex| c.maximal_simplices().into_iter().map(|s| s.ids()).collect();
        ExtensionFile {
            version: FORMAT_VERSION,
            n: p.map.n(),
            simplices: maximal(&p.x),
            subcomplex: maximal(&p.a),
            sphere_map: p.map.images().iter().map(|(v, img)| (v.0, img.to_string())).collect(),
        }
    }
}
